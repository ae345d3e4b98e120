//! Closed-form values of the Jacobi integrals used by the critical-function
//! calculus.
//!
//! | id | integrand on `[-1, 1]`            | value              |
//! |----|-----------------------------------|--------------------|
//! | I  | `(1+t) P_n^(0,2)`                 | `4(-1)^n/((n+1)(n+2))` |
//! | J  | `(1+t) (P_n^(0,2))^2`             | `2`                |
//! | S  | `P_n^(0,2)`                       | `2(-1)^n`          |
//! | L  | `(1-t) P_n^(1,1)`                 | `4(-1)^n/(n+2)`    |
//! | H  | `P_n^(0,1)`                       | `2(-1)^n/(n+1)`    |
//! | T  | `(1-t) P_n^(0,2) P_n^(1,1)`       | `2(n+1)`           |
//! | G  | `(1-t) P_n^(2,0) P_n^(1,1)`       | `4/(n+2)`          |

use serde::Serialize;

use super::jacobi::eval_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IntegralId {
    I,
    J,
    S,
    L,
    H,
    T,
    G,
}

impl IntegralId {
    pub const ALL: [IntegralId; 7] = [
        IntegralId::I,
        IntegralId::J,
        IntegralId::S,
        IntegralId::L,
        IntegralId::H,
        IntegralId::T,
        IntegralId::G,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntegralId::I => "I",
            IntegralId::J => "J",
            IntegralId::S => "S",
            IntegralId::L => "L",
            IntegralId::H => "H",
            IntegralId::T => "T",
            IntegralId::G => "G",
        }
    }

    /// Polynomial degree of the integrand, used to size a Gauss rule.
    pub fn integrand_degree(self, n: usize) -> usize {
        match self {
            IntegralId::I | IntegralId::L => n + 1,
            IntegralId::J => 2 * n + 1,
            IntegralId::S | IntegralId::H => n,
            IntegralId::T | IntegralId::G => 2 * n + 1,
        }
    }

    /// Pointwise value of the defining integrand.
    pub fn integrand(self, n: usize, t: f64) -> f64 {
        let p = |a: f64, b: f64| eval_unchecked(n, a, b, t);
        match self {
            IntegralId::I => (1.0 + t) * p(0.0, 2.0),
            IntegralId::J => (1.0 + t) * p(0.0, 2.0).powi(2),
            IntegralId::S => p(0.0, 2.0),
            IntegralId::L => (1.0 - t) * p(1.0, 1.0),
            IntegralId::H => p(0.0, 1.0),
            IntegralId::T => (1.0 - t) * p(0.0, 2.0) * p(1.0, 1.0),
            IntegralId::G => (1.0 - t) * p(2.0, 0.0) * p(1.0, 1.0),
        }
    }
}

pub fn closed_form_integral(id: IntegralId, n: usize) -> f64 {
    let nf = n as f64;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    match id {
        IntegralId::I => 4.0 * sign / ((nf + 1.0) * (nf + 2.0)),
        IntegralId::J => 2.0,
        IntegralId::S => 2.0 * sign,
        IntegralId::L => 4.0 * sign / (nf + 2.0),
        IntegralId::H => 2.0 * sign / (nf + 1.0),
        IntegralId::T => 2.0 * (nf + 1.0),
        IntegralId::G => 4.0 / (nf + 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_examples() {
        assert!((closed_form_integral(IntegralId::I, 1) + 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(closed_form_integral(IntegralId::J, 7), 2.0);
        assert!((closed_form_integral(IntegralId::G, 4) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(closed_form_integral(IntegralId::S, 3), -2.0);
    }

    #[test]
    fn zeroth_order_values_are_two() {
        for id in IntegralId::ALL {
            assert_eq!(closed_form_integral(id, 0), 2.0, "{}", id.name());
        }
    }
}
