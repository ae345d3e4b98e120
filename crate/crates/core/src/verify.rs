//! The identity suite: every closed form used by the kernel analysis,
//! checked against an independent computation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{HomPoly, MultiIndex3};
use crate::error::Result;
use crate::kernel::{
    closed_form_constants, contelmat_expected, contelmat_pairing, gram_matrix_check, i_integral, t_matrix, tridiag_det,
};
use crate::mesh::{nodal_patch, Triangulation};
use crate::polytools::frame::{dot, norm, sub, BarycentricFrame, Point};
use crate::polytools::quadrature::{integrate_bary, integrate_interval, triangle_quadrature};
use crate::polytools::{closed_form_integral, tangent_sign, IntegralId};

/// Deliberate corruption of one closed form, to prove the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fault {
    FlipIntegralSign(IntegralId),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Largest Jacobi degree in the integral table.
    pub n_max: usize,
    pub seed: u64,
    pub triangles: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { n_max: 20, seed: 0, triangles: 100, fault: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, errors: impl IntoIterator<Item = f64>, tol: f64) -> Self {
        let mut cases = 0;
        let mut max_error: f64 = 0.0;
        let mut finite = true;
        for e in errors {
            cases += 1;
            finite &= e.is_finite();
            max_error = max_error.max(e);
        }
        Self { name: name.into(), cases, max_error, tol, pass: finite && max_error <= tol }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Random counterclockwise triangle in `[-1, 1]²` with all angles above 0.2.
pub fn random_triangle(rng: &mut impl Rng) -> BarycentricFrame {
    loop {
        let mut v: [Point; 3] = std::array::from_fn(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        let a2 = crate::polytools::signed_area2(v[0], v[1], v[2]);
        if a2 < 0.0 {
            v.swap(1, 2);
        }
        if let Ok(f) = BarycentricFrame::new(v[0], v[1], v[2]) {
            if f.angles.iter().all(|&a| a > 0.2) {
                return f;
            }
        }
    }
}

pub fn jacobi_integral_checks(cfg: &VerifyConfig) -> Vec<IdentityCheck> {
    IntegralId::ALL
        .iter()
        .map(|&id| {
            let errs = (0..=cfg.n_max).map(|n| {
                let mut closed = closed_form_integral(id, n);
                if cfg.fault == Some(Fault::FlipIntegralSign(id)) && n % 2 == 1 {
                    closed = -closed;
                }
                let quad = integrate_interval(id.integrand_degree(n) + 2, |t| id.integrand(n, t));
                rel(closed, quad)
            });
            IdentityCheck::new(format!("jacobi-integral-{}", id.name()), errs, 1e-11)
        })
        .collect()
}

/// Central differences of the barycentric map along `w`.
fn fd_directional(f: &BarycentricFrame, i: usize, x: Point, w: Point) -> f64 {
    let h = 1e-4;
    let a = f.barycentric([x[0] + h * w[0], x[1] + h * w[1]])[i];
    let b = f.barycentric([x[0] - h * w[0], x[1] - h * w[1]])[i];
    (a - b) / (2.0 * h)
}

pub fn barycentric_checks(cfg: &VerifyConfig) -> Vec<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let frames: Vec<BarycentricFrame> = (0..cfg.triangles).map(|_| random_triangle(&mut rng)).collect();
    let pairs = || (0..3).flat_map(|i| (0..3).map(move |k| (i, k)));
    let centroid = |f: &BarycentricFrame| f.point([1.0 / 3.0; 3]);

    // exact gradients reproduce λ_i(A_j) - λ_i(A_k) = δ_ij - δ_ik
    let grad_exact = frames.iter().flat_map(|f| {
        pairs().map(move |(i, j)| {
            let k = (j + 1) % 3;
            let want = (i == j) as i32 as f64 - (i == k) as i32 as f64;
            (dot(f.grads[i], sub(f.vertices[j], f.vertices[k])) - want).abs()
        })
    });
    let grad_fd = frames.iter().flat_map(|f| {
        (0..3).flat_map(move |i| {
            [[1.0, 0.0], [0.0, 1.0]].into_iter().map(move |e| (fd_directional(f, i, centroid(f), e) - dot(f.grads[i], e)).abs())
        })
    });
    let normal_exact = frames
        .iter()
        .flat_map(|f| pairs().map(move |(i, k)| (f.normal_derivative_closed(i, k) - f.normal_derivative(i, k)).abs()));
    let normal_fd = frames.iter().flat_map(|f| {
        pairs().map(move |(i, k)| (fd_directional(f, i, centroid(f), f.normals[k]) - f.normal_derivative_closed(i, k)).abs())
    });
    let tangent_exact = frames.iter().flat_map(|f| {
        pairs().map(move |(i, k)| (f.tangential_derivative_closed(i, k) - f.tangential_derivative(i, k)).abs())
    });
    let tangent_fd = frames.iter().flat_map(|f| {
        pairs().map(move |(i, k)| {
            (fd_directional(f, i, centroid(f), f.tangents[k]) - f.tangential_derivative_closed(i, k)).abs()
        })
    });
    // ε_{i,k} is the sign of ∂_{t_k} λ_i
    let eps = frames.iter().flat_map(|f| {
        pairs().map(move |(i, k)| (f.tangential_derivative(i, k) * f.edge_lengths[k] - tangent_sign(i, k)).abs())
    });
    vec![
        IdentityCheck::new("barycentric-gradient", grad_exact, 1e-11),
        IdentityCheck::new("barycentric-gradient-fd", grad_fd, 1e-6),
        IdentityCheck::new("normal-derivative", normal_exact, 1e-11),
        IdentityCheck::new("normal-derivative-fd", normal_fd, 1e-6),
        IdentityCheck::new("tangential-derivative", tangent_exact, 1e-11),
        IdentityCheck::new("tangential-derivative-fd", tangent_fd, 1e-6),
        IdentityCheck::new("tangent-sign", eps, 1e-11),
    ]
}

/// `n + 1` random positive angles with sum below `π`.
pub fn random_angles(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let total = rng.random_range(0.05..0.98) * PI;
    let w: Vec<f64> = (0..=n).map(|_| rng.random_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s * total).collect()
}

pub fn determinant_check(cfg: &VerifyConfig) -> IdentityCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xde7);
    let mut errs = Vec::new();
    for n in 1..=8 {
        for _ in 0..200 {
            let a = random_angles(&mut rng, n);
            errs.push(tridiag_det(&t_matrix(&a), Some(&a)).rel_diff.unwrap());
        }
    }
    IdentityCheck::new("tridiagonal-determinant", errs, 1e-11)
}

pub fn gram_check() -> Result<IdentityCheck> {
    let errs = [3, 5, 7, 9]
        .iter()
        .map(|&p| gram_matrix_check(p).map(|g| g.max_entry_rel.max(g.det_rel)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IdentityCheck::new("gram-matrix", errs, 1e-11))
}

pub fn critical_function_checks(cfg: &VerifyConfig) -> Result<Vec<IdentityCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xc0de);
    let mut ortho = Vec::new();
    for p in [5, 7] {
        let rule = triangle_quadrature(2 * p)?;
        for _ in 0..30 {
            let f = random_triangle(&mut rng);
            let mut w = HomPoly::zero(p - 2);
            w.coeffs.iter_mut().for_each(|c| *c = rng.random_range(-1.0..1.0));
            let scale = w.max_abs_coeff() * f.area;
            for ell in 0..3 {
                let q = crate::basis::jacobi_of_lambda(p - 1, 0.0, 2.0, ell);
                for j in (0..3).filter(|&j| j != ell) {
                    let v = integrate_bary(&rule, f.area, |l| w.eval(l) * l[j] * q.eval(l));
                    ortho.push(v.abs() / scale);
                }
            }
        }
    }

    let mut ip = Vec::new();
    let mut cont = Vec::new();
    for p in [5, 7] {
        let c = closed_form_constants(p)?.c_p;
        for _ in 0..20 {
            let f = random_triangle(&mut rng);
            let sigma = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let pm = |a: usize, b: usize, c: usize| MultiIndex3([a, b, c]);
            let vals = [
                i_integral(&f, p, sigma, 0, 0, pm(p, 0, 0)) / p as f64,
                i_integral(&f, p, sigma, 1, 0, pm(1, p - 1, 0)),
                i_integral(&f, p, sigma, 2, 0, pm(1, 0, p - 1)),
                i_integral(&f, p, sigma, 0, 1, pm(p - 1, 1, 0)),
                i_integral(&f, p, sigma, 0, 2, pm(p - 1, 0, 1)),
            ];
            ip.extend(vals.iter().map(|&v| rel(v, sigma * c)));
        }
        if p == 5 {
            for _ in 0..10 {
                let f = random_triangle(&mut rng);
                let a: f64 = rng.random_range(0.0..2.0 * PI);
                let w = [a.cos(), a.sin()];
                for ell in 0..3 {
                    for mu in MultiIndex3::all_of_degree(p).into_iter().filter(|m| m.0[0] >= 1) {
                        let got = contelmat_pairing(&f, p, -1.0, ell, mu, w)?;
                        let want = contelmat_expected(&f, p, -1.0, c, ell, mu, w);
                        cont.push((got - want).abs() / want.abs().max(1.0));
                    }
                }
            }
        }
    }
    Ok(vec![
        IdentityCheck::new("jacobi-orthogonality", ortho, 1e-12),
        IdentityCheck::new("critical-integrals-equal", ip, 1e-11),
        IdentityCheck::new("critical-element-pairing", cont, 1e-11),
    ])
}

/// Two triangles `K = (z', a, e)` and `K' = (z', e, b)` sharing `E = z'e`
/// with `a, z', b` collinear.
fn random_critical_pair(rng: &mut impl Rng) -> (BarycentricFrame, BarycentricFrame) {
    loop {
        let z = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let t: f64 = rng.random_range(0.0..2.0 * PI);
        let s = t + rng.random_range(0.3..PI - 0.3);
        let (r, ra, rb) = (rng.random_range(0.5..1.5), rng.random_range(0.5..1.5), rng.random_range(0.5..1.5));
        let e = [z[0] + r * t.cos(), z[1] + r * t.sin()];
        // a sits clockwise of e, so (z', a, e) and (z', e, b) are counterclockwise
        let a = [z[0] + ra * (2.0 * t - s).cos(), z[1] + ra * (2.0 * t - s).sin()];
        let b = [z[0] - rb * (2.0 * t - s).cos(), z[1] - rb * (2.0 * t - s).sin()];
        if let (Ok(k), Ok(k2)) = (BarycentricFrame::new(z, a, e), BarycentricFrame::new(z, e, b)) {
            if k.angles.iter().chain(&k2.angles).all(|&x| x > 0.15) {
                return (k, k2);
            }
        }
    }
}

pub fn edge_geometry_checks(cfg: &VerifyConfig) -> Result<Vec<IdentityCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xed9e);
    let mut jump = Vec::new();
    for _ in 0..cfg.triangles {
        let (k, k2) = random_critical_pair(&mut rng);
        let e = sub(k.vertices[2], k.vertices[0]);
        let len = norm(e);
        // K lies clockwise of E, so the counterclockwise rotation leaves K
        let n = [-e[1] / len, e[0] / len];
        let lhs = dot(k.grads[1], n) - dot(k2.grads[2], n);
        let rhs = -(1.0 / k.angles[2].tan() + 1.0 / k2.angles[1].tan()) / len;
        jump.push((lhs - rhs).abs() / rhs.abs().max(1.0));
    }

    let mut tang = Vec::new();
    for _ in 0..cfg.triangles {
        let z = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let t: f64 = rng.random_range(0.0..PI);
        let s = t + rng.random_range(0.3..PI - 0.3);
        let d1 = [t.cos(), t.sin()];
        let d2 = [s.cos(), s.sin()];
        let r: Vec<f64> = (0..4).map(|_| rng.random_range(0.4..1.6)).collect();
        let v = vec![
            [z[0] + r[0] * d1[0], z[1] + r[0] * d1[1]],
            [z[0] + r[1] * d2[0], z[1] + r[1] * d2[1]],
            [z[0] - r[2] * d1[0], z[1] - r[2] * d1[1]],
            [z[0] - r[3] * d2[0], z[1] - r[3] * d2[1]],
            z,
        ];
        let mesh = Triangulation::from_parts(v, vec![[4, 0, 1], [4, 1, 2], [4, 2, 3], [4, 3, 0]])?;
        let patch = nodal_patch(&mesh, 4)?;
        for i in 0..4 {
            let dir = sub(patch.rim_points[i], patch.center_point);
            let l = norm(dir);
            let v1 = [dir[0] / l, dir[1] / l];
            let (k, k2) = (patch.frame(i), patch.frame((i + 1) % 4));
            tang.push((dot(k.grads[0], v1) - dot(k2.grads[0], v1)).abs());
        }
    }
    Ok(vec![
        IdentityCheck::new("critical-normal-jump", jump, 1e-11),
        IdentityCheck::new("crisscross-tangential-jump", tang, 1e-12),
    ])
}

/// Runs every identity family in a fixed order.
pub fn run_identity_suite(cfg: &VerifyConfig) -> Result<Vec<IdentityCheck>> {
    let mut out = jacobi_integral_checks(cfg);
    out.extend(barycentric_checks(cfg));
    out.push(determinant_check(cfg));
    out.push(gram_check()?);
    out.extend(critical_function_checks(cfg)?);
    out.extend(edge_geometry_checks(cfg)?);
    Ok(out)
}
