//! Global Stokes discretization: assembly, inf-sup constant and solve.

pub mod assemble;
pub mod divergence;
pub mod infsup;
pub mod solve;

pub use assemble::{
    assemble, assemble_with_basis, AssemblyOptions, PressureDof, Space, StokesSystem, VelocityDof, VelocityNorm,
};
pub use divergence::{divergence_image_check, zero_mean_projection};
pub use infsup::{infsup_constant, InfSupResult, DEFAULT_ZERO_TOL};
pub use solve::{load_vector, manufactured_force, manufactured_velocity, solve_stokes, StokesSolution, PIVOT_RATIO_MIN};
