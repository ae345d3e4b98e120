//! Jacobi polynomials `P_n^(α,β)` by the forward three-term recurrence.

use crate::error::{Error, Result};

/// Slack allowed outside `[-1, 1]` before an argument is rejected.
pub const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::Domain(format!(
                "Jacobi exponents must exceed -1 (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(Self { n, alpha, beta })
    }

    /// Legendre polynomial of degree `n`.
    pub fn legendre(n: usize) -> Self {
        Self { n, alpha: 0.0, beta: 0.0 }
    }
}

/// Coefficients of `P_k = (a_k x + b_k) P_{k-1} - c_k P_{k-2}` for `k >= 2`.
///
/// For `k = 1` the returned `(a, b, 0)` reproduces
/// `P_1 = (α+1) + (α+β+2)(x-1)/2`.
pub(crate) fn recurrence_coefficients(k: usize, alpha: f64, beta: f64) -> (f64, f64, f64) {
    debug_assert!(k >= 1);
    if k == 1 {
        let a = 0.5 * (alpha + beta + 2.0);
        let b = 0.5 * (alpha - beta);
        return (a, b, 0.0);
    }
    let n = k as f64;
    let s = 2.0 * n + alpha + beta;
    let denom = 2.0 * n * (n + alpha + beta) * (s - 2.0);
    let a = (s - 1.0) * s * (s - 2.0) / denom;
    let b = (s - 1.0) * (alpha * alpha - beta * beta) / denom;
    let c = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * s / denom;
    (a, b, c)
}

fn check_domain(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain(format!("Jacobi argument {x} outside [-1, 1]")));
    }
    Ok(())
}

/// Evaluates without the domain check; the recurrence itself is valid on all of R.
pub(crate) fn eval_unchecked(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let (a, b, _) = recurrence_coefficients(1, alpha, beta);
    let mut cur = a * x + b;
    for k in 2..=n {
        let (a, b, c) = recurrence_coefficients(k, alpha, beta);
        let next = (a * x + b) * cur - c * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn jacobi_eval(p: JacobiParams, x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(eval_unchecked(p.n, p.alpha, p.beta, x))
}

/// `d/dx P_n^(α,β)(x) = (n+α+β+1)/2 · P_{n-1}^(α+1,β+1)(x)`.
pub fn jacobi_deriv(p: JacobiParams, x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(deriv_unchecked(p.n, p.alpha, p.beta, x))
}

pub(crate) fn deriv_unchecked(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + alpha + beta + 1.0) * eval_unchecked(n - 1, alpha + 1.0, beta + 1.0, x)
}

/// Shifted factorial `(a)_n = a (a+1) ... (a+n-1)`.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).map(|k| a + k as f64).product()
}

/// Closed-form endpoint values `(P_n(1), P_n(-1))`.
pub fn endpoint_values(p: JacobiParams) -> (f64, f64) {
    let fact: f64 = (1..=p.n).map(|k| k as f64).product();
    let sign = if p.n.is_multiple_of(2) { 1.0 } else { -1.0 };
    (
        pochhammer(p.alpha + 1.0, p.n) / fact,
        sign * pochhammer(p.beta + 1.0, p.n) / fact,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_normalization() {
        let p = JacobiParams::new(4, 0.0, 2.0).unwrap();
        assert!((jacobi_eval(p, 1.0).unwrap() - 1.0).abs() < 1e-13);
        let p = JacobiParams::legendre(3);
        assert!((jacobi_eval(p, -1.0).unwrap() + 1.0).abs() < 1e-13);
        for n in 0..15 {
            for &(a, b) in &[(0.0, 0.0), (0.0, 2.0), (1.0, 1.0), (2.0, 0.0), (0.0, 1.0)] {
                let p = JacobiParams::new(n, a, b).unwrap();
                let (up, down) = endpoint_values(p);
                assert!((jacobi_eval(p, 1.0).unwrap() - up).abs() <= 1e-13 * up.abs().max(1.0));
                assert!((jacobi_eval(p, -1.0).unwrap() - down).abs() <= 1e-13 * down.abs().max(1.0));
            }
        }
    }

    #[test]
    fn degree_zero_is_one() {
        let p = JacobiParams::new(0, 1.5, 0.3).unwrap();
        assert_eq!(jacobi_eval(p, 0.3).unwrap(), 1.0);
        assert_eq!(jacobi_deriv(p, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn legendre_two_at_half() {
        // independent oracle: (3x^2 - 1)/2
        let x: f64 = 0.5;
        let oracle = (3.0 * x * x - 1.0) / 2.0;
        assert_eq!(oracle, -0.125);
        let v = jacobi_eval(JacobiParams::legendre(2), x).unwrap();
        assert!((v - oracle).abs() < 1e-15);
    }

    #[test]
    fn linear_derivative() {
        for &x in &[-1.0, -0.2, 0.7, 1.0] {
            assert!((jacobi_deriv(JacobiParams::legendre(1), x).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = JacobiParams::legendre(5);
        let x = 0.37;
        let h = 1e-6;
        let fd = (jacobi_eval(p, x + h).unwrap() - jacobi_eval(p, x - h).unwrap()) / (2.0 * h);
        assert!((jacobi_deriv(p, x).unwrap() - fd).abs() < 1e-7);
    }

    #[test]
    fn domain_errors() {
        let p = JacobiParams::legendre(3);
        assert!(jacobi_eval(p, 1.0 + 1e-10).is_err());
        assert!(jacobi_eval(p, 1.0 + 1e-13).is_ok());
        assert!(jacobi_eval(p, f64::NAN).is_err());
        assert!(JacobiParams::new(2, -1.0, 0.0).is_err());
    }
}
