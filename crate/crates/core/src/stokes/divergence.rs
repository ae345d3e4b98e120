use nalgebra::DVector;

use super::assemble::StokesSystem;
use super::infsup::chol_mp;
use crate::error::{Error, Result};
use crate::kernel::{kernel_dimension, TolPolicy};

/// Relative `Mp`-norm distance from the pressure `q` (coefficients) to the
/// image of the discrete divergence, `{Mp⁻¹ B v}`.
pub fn divergence_image_check(sys: &StokesSystem, q: &DVector<f64>) -> Result<f64> {
    let mp = chol_mp(sys)?;
    let l = mp.l();
    let y = l.transpose() * q;
    let n = y.norm();
    if n == 0.0 {
        return Ok(0.0);
    }
    let g = l.solve_lower_triangular(&sys.b).ok_or(Error::SingularMass)?;
    let k = kernel_dimension(&g, TolPolicy::default());
    Ok((k.null_basis.transpose() * y).norm() / n)
}

/// `q - (meanᵀq / meanᵀ1) 1`.
pub fn zero_mean_projection(sys: &StokesSystem, q: &DVector<f64>) -> Result<DVector<f64>> {
    let mp = chol_mp(sys)?;
    let one = super::infsup::constant_coords(sys, &mp);
    Ok(q - &one * (sys.mean.dot(q) / sys.mean.dot(&one)))
}
