//! Lagrange and Crouzeix–Raviart bases as piecewise barycentric polynomials.

pub mod cr;
pub mod lagrange;
pub mod moments;
pub mod piecewise;
pub mod poly;

pub use cr::{
    conforming_basis, cr_basis, cr_edge_bubble, cr_triangle_bubble, cr_triangle_bubble_local, CrBasis,
    CrEntry, CrTag,
};
pub use lagrange::{
    lagrange_basis, lagrange_local, lagrange_nodes, LagrangeNode, LagrangeNodes, NodeClass, NodeKey,
};
pub use moments::jump_moment;
pub use piecewise::{poly_divergence, PiecewisePoly};
pub use poly::{jacobi_composed, jacobi_of_lambda, monomial_integral, n_monomials, HomPoly, MultiIndex3};
