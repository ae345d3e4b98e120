//! One-dimensional Jacobi calculus, closed-form integrals, barycentric
//! frames and quadrature.

pub mod frame;
pub mod integrals;
pub mod jacobi;
pub mod quadrature;

pub use frame::{signed_area2, tangent_sign, BarycentricFrame, Point};
pub use integrals::{closed_form_integral, IntegralId};
pub use jacobi::{endpoint_values, jacobi_deriv, jacobi_eval, pochhammer, JacobiParams};
pub use quadrature::{
    gauss_jacobi, gauss_legendre, integrate_bary, integrate_interval, integrate_on_triangle, triangle_quadrature,
    QuadratureRule, MAX_TRIANGLE_DEGREE,
};
