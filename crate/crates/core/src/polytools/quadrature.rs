//! Gauss–Jacobi rules on `[-1, 1]` and collapsed (Duffy) rules on triangles.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::gamma;

use super::frame::BarycentricFrame;
use super::jacobi::{deriv_unchecked, eval_unchecked};
use crate::error::{Error, Result};

pub const MAX_TRIANGLE_DEGREE: usize = 40;

/// Nodes and weights of the `n`-point Gauss–Jacobi rule for the weight
/// `(1-x)^α (1+x)^β`, exact for polynomials of degree `2n - 1`.
///
/// Nodes come from the Golub–Welsch eigenproblem and are polished by Newton
/// steps on `P_n^(α,β)`; weights use the Christoffel formula.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let ab = alpha + beta;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        jm[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + ab;
            let b = 4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0));
            jm[(k, k + 1)] = b.sqrt();
            jm[(k + 1, k)] = b.sqrt();
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jm).eigenvalues.iter().cloned().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let dp = deriv_unchecked(n, alpha, beta, *x);
            if dp == 0.0 {
                break;
            }
            let step = eval_unchecked(n, alpha, beta, *x) / dp;
            *x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
    }
    // Christoffel weights up to a common factor, normalized to the exact mass
    // 2^(α+β+1) Γ(α+1) Γ(β+1) / Γ(α+β+2); this avoids large-argument gamma ratios.
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let dp = deriv_unchecked(n, alpha, beta, x);
            1.0 / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    let mass = 2f64.powf(ab + 1.0) * gamma_fn(alpha + 1.0) * gamma_fn(beta + 1.0) / gamma_fn(ab + 2.0);
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w *= mass / total;
    }
    (nodes, weights)
}

/// Γ(x), exact for positive integers (the Lanczos fit is only good to a few ulps).
fn gamma_fn(x: f64) -> f64 {
    if x.fract() == 0.0 && x > 0.0 && x < 171.0 {
        (1..x as usize).map(|k| k as f64).product()
    } else {
        gamma(x)
    }
}

pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Integrates `f` over `[-1, 1]` with a Gauss–Legendre rule exact to `degree`.
pub fn integrate_interval(degree: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(degree / 2 + 1);
    x.iter().zip(&w).map(|(&x, &w)| w * f(x)).sum()
}

/// Triangle rule in barycentric form with weights normalized to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Collapsed-coordinate rule: Gauss–Legendre in the free direction and
/// Gauss–Jacobi `(1, 0)` in the collapsed one, `⌈(d+1)/2⌉` points each.
pub fn triangle_quadrature(degree: usize) -> Result<QuadratureRule> {
    if degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    let n = degree / 2 + 1;
    let (xi, wxi) = gauss_legendre(n);
    let (eta, weta) = gauss_jacobi(n, 1.0, 0.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&e, &we) in eta.iter().zip(&weta) {
        for (&x, &wx) in xi.iter().zip(&wxi) {
            let l2 = 0.25 * (1.0 + x) * (1.0 - e);
            let l3 = 0.5 * (1.0 + e);
            points.push([1.0 - l2 - l3, l2, l3]);
            // reference area 1/2, Jacobian (1-η)/8 absorbed by the Jacobi weight
            weights.push(wx * we / 4.0);
        }
    }
    Ok(QuadratureRule { points, weights, exact_degree: degree })
}

/// `Σ_q w_q |K| f(x_q)`.
pub fn integrate_on_triangle(
    rule: &QuadratureRule,
    frame: &BarycentricFrame,
    f: impl Fn([f64; 2]) -> f64,
) -> f64 {
    let s: f64 = rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(l, w)| w * f(frame.point(*l)))
        .sum();
    s * frame.area
}

/// `Σ_q w_q |K| f(λ_q)`, with `f` taking barycentric coordinates.
pub fn integrate_bary(rule: &QuadratureRule, area: f64, f: impl Fn([f64; 3]) -> f64) -> f64 {
    rule.points.iter().zip(&rule.weights).map(|(l, w)| w * f(*l)).sum::<f64>() * area
}
