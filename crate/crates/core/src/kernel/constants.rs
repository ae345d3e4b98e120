//! Reference-element constants and the element pairings behind them.

use serde::Serialize;

use crate::basis::{jacobi_of_lambda, HomPoly, MultiIndex3};
use crate::error::{Error, Result};
use crate::polytools::frame::{BarycentricFrame, Point};
use crate::polytools::jacobi::{deriv_unchecked, eval_unchecked};
use crate::polytools::quadrature::{integrate_bary, triangle_quadrature};

const REFERENCE_AREA: f64 = 0.5;

fn check_odd(p: usize) -> Result<()> {
    if p.is_multiple_of(2) || p < 3 {
        return Err(Error::Parity { p, msg: "expected odd p >= 3" });
    }
    Ok(())
}

/// `P_{p-1}^{(0,2)}(1 - 2λ_ℓ)`.
fn q_hat(p: usize, l: [f64; 3], ell: usize) -> f64 {
    eval_unchecked(p - 1, 0.0, 2.0, 1.0 - 2.0 * l[ell])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormConstants {
    pub p: usize,
    /// `2 ∫_K̂ P_{p-1}^{(0,2)}(1 - 2λ_2) λ_2^{p-1}` at the default degree.
    pub c_p: f64,
    /// The same integral four degrees higher.
    pub c_p_audit: f64,
    pub d_p: f64,
    pub d_p_quadrature: f64,
    pub iota_ratio: f64,
    pub iota_ratio_quadrature: f64,
    pub theta_p: f64,
    pub theta_p_quadrature: f64,
}

/// All integrals are on the reference triangle; barycentric index 1 plays
/// the role of the second coordinate.
pub fn closed_form_constants(p: usize) -> Result<ClosedFormConstants> {
    check_odd(p)?;
    let c = |deg: usize| -> Result<f64> {
        let rule = triangle_quadrature(deg)?;
        Ok(2.0 * integrate_bary(&rule, REFERENCE_AREA, |l| q_hat(p, l, 1) * l[1].powi(p as i32 - 1)))
    };
    let rule = triangle_quadrature(2 * p)?;
    let legendre_d = |x: f64| deriv_unchecked(p, 0.0, 0.0, x);
    let d_q = integrate_bary(&rule, REFERENCE_AREA, |l| q_hat(p, l, 1));
    let iota = integrate_bary(&rule, REFERENCE_AREA, |l| q_hat(p, l, 0) * legendre_d(1.0 - 2.0 * l[1]));
    let theta = integrate_bary(&rule, REFERENCE_AREA, |l| q_hat(p, l, 1) * legendre_d(1.0 - 2.0 * l[1]));
    let odd_sign = if (p - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(ClosedFormConstants {
        p,
        c_p: c(2 * p)?,
        c_p_audit: c(2 * p + 4)?,
        d_p: odd_sign / (p * (p + 1)) as f64,
        d_p_quadrature: d_q,
        iota_ratio: odd_sign,
        iota_ratio_quadrature: iota / REFERENCE_AREA,
        theta_p: 1.0,
        theta_p_quadrature: theta / REFERENCE_AREA,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramCheck {
    pub p: usize,
    pub g: [[f64; 3]; 3],
    pub g_closed: [[f64; 3]; 3],
    pub det: f64,
    pub det_closed: f64,
    pub max_entry_rel: f64,
    pub det_rel: f64,
}

fn det3(g: &[[f64; 3]; 3]) -> f64 {
    g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
}

/// Gram matrix of `P(1 - 2λ_2)`, `P(1 - 2λ_3)` and `1` on the reference
/// triangle, against `diag 1/2, off-diagonal 1/(p(p+1))`.
pub fn gram_matrix_check(p: usize) -> Result<GramCheck> {
    check_odd(p)?;
    let rule = triangle_quadrature(2 * p)?;
    let f = |i: usize, l: [f64; 3]| match i {
        0 => q_hat(p, l, 1),
        1 => q_hat(p, l, 2),
        _ => 1.0,
    };
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = integrate_bary(&rule, REFERENCE_AREA, |l| f(i, l) * f(j, l));
        }
    }
    let off = 1.0 / (p * (p + 1)) as f64;
    let mut g_closed = [[off; 3]; 3];
    for (i, row) in g_closed.iter_mut().enumerate() {
        row[i] = 0.5;
    }
    let pf = p as f64;
    let det_closed =
        (pf + pf * pf + 4.0) * (pf + 2.0).powi(2) * (pf - 1.0).powi(2) / (8.0 * pf.powi(3) * (pf + 1.0).powi(3));
    let det = det3(&g);
    let max_entry_rel = (0..9)
        .map(|k| {
            let (i, j) = (k / 3, k % 3);
            (g[i][j] - g_closed[i][j]).abs() / g_closed[i][j]
        })
        .fold(0.0, f64::max);
    Ok(GramCheck { p, g, g_closed, det, det_closed, max_entry_rel, det_rel: (det - det_closed).abs() / det_closed })
}

/// `q_{A_ℓ} = (σ/|K|) P_{p-1}^{(0,2)}(1 - 2λ_ℓ)` on one triangle.
fn q_local(p: usize, sigma: f64, area: f64, ell: usize) -> HomPoly {
    jacobi_of_lambda(p - 1, 0.0, 2.0, ell).scale(sigma / area)
}

/// `I^{(ℓ,s)} = μ_s ∫_K q_{A_ℓ} λ^{μ - e_s}` (0-based `ℓ`, `s`), zero when
/// `μ_s = 0`. Exact integration.
pub fn i_integral(frame: &BarycentricFrame, p: usize, sigma: f64, ell: usize, s: usize, mu: MultiIndex3) -> f64 {
    if mu.0[s] == 0 {
        return 0.0;
    }
    let mut lower = mu;
    lower.0[s] -= 1;
    let f = &q_local(p, sigma, frame.area, ell) * &HomPoly::monomial(lower);
    mu.0[s] as f64 * f.integrate(frame.area)
}

/// `∫_K q_{A_ℓ} div(λ^μ w)` by quadrature of degree `2p`.
pub fn contelmat_pairing(
    frame: &BarycentricFrame,
    p: usize,
    sigma: f64,
    ell: usize,
    mu: MultiIndex3,
    w: Point,
) -> Result<f64> {
    let rule = triangle_quadrature(2 * p)?;
    let q = q_local(p, sigma, frame.area, ell);
    let div = HomPoly::monomial(mu).directional(&frame.grads, w);
    Ok(integrate_bary(&rule, frame.area, |l| q.eval(l) * div.eval(l)))
}

/// Case table for the pairing above with `A_1` (index 0) the patch center;
/// valid for `μ_1 >= 1`.
pub fn contelmat_expected(
    frame: &BarycentricFrame,
    p: usize,
    sigma: f64,
    c_p: f64,
    ell: usize,
    mu: MultiIndex3,
    w: Point,
) -> f64 {
    let dw = |s: usize| frame.directional_derivative(s, w);
    let m = mu.0;
    let v = match (ell, m) {
        (0, [a, 0, 0]) if a == p => p as f64 * dw(0),
        (1, [1, b, 0]) if b == p - 1 => dw(0),
        (2, [1, 0, c]) if c == p - 1 => dw(0),
        (0, [a, 1, 0]) if a == p - 1 => dw(1),
        (0, [a, 0, 1]) if a == p - 1 => dw(2),
        _ => 0.0,
    };
    sigma * c_p * v
}
