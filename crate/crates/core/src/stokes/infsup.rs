//! Discrete inf-sup constant from the pressure Schur complement.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::Serialize;

use super::assemble::{Space, StokesSystem, VelocityNorm};
use crate::error::{Error, Result};

/// Generalized eigenvalues below this count as zero modes.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfSupResult {
    pub p: usize,
    pub space: Space,
    pub norm: VelocityNorm,
    pub c: f64,
    /// Ascending eigenvalues of `B A⁻¹ Bᵀ q = λ Mp q` on zero-mean pressures.
    pub spectrum: Vec<f64>,
    pub n_zero_modes: usize,
    pub zero_tol: f64,
    /// Overlap of the discarded eigenvector with the constant; close to 1.
    pub constant_overlap: f64,
}

pub(crate) fn chol_a(sys: &StokesSystem) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(sys.a.clone()).ok_or(Error::SingularStiffness)
}

pub(crate) fn chol_mp(sys: &StokesSystem) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(sys.mp.clone()).ok_or(Error::SingularMass)
}

/// `S = B A⁻¹ Bᵀ`, symmetrized.
pub(crate) fn schur(sys: &StokesSystem, a: &Cholesky<f64, Dyn>) -> DMatrix<f64> {
    let x = a.solve(&sys.b.transpose());
    let s = &sys.b * x;
    (&s + s.transpose()) * 0.5
}

/// Coefficients of the constant function 1 (its `L²` projection).
pub(crate) fn constant_coords(sys: &StokesSystem, mp: &Cholesky<f64, Dyn>) -> DVector<f64> {
    mp.solve(&sys.mean)
}

pub fn infsup_constant(sys: &StokesSystem, zero_tol: f64) -> Result<InfSupResult> {
    let a = chol_a(sys)?;
    let mp = chol_mp(sys)?;
    let l = mp.l();
    let s = schur(sys, &a);
    // Ŝ = L⁻¹ S L⁻ᵀ
    let x = l.solve_lower_triangular(&s).ok_or(Error::SingularMass)?;
    let sh = l.solve_lower_triangular(&x.transpose()).ok_or(Error::SingularMass)?;
    let sh = (&sh + sh.transpose()) * 0.5;

    let mut y = l.transpose() * constant_coords(sys, &mp);
    y /= y.norm();
    let n = sh.nrows();
    let proj = DMatrix::identity(n, n) - &y * y.transpose();
    let shift = 4.0 * sh.diagonal().amax().max(1.0);
    let h = &proj * &sh * &proj + &y * y.transpose() * shift;
    let eig = SymmetricEigen::new((&h + h.transpose()) * 0.5);

    let drop = (0..n)
        .max_by(|&i, &j| eig.eigenvectors.column(i).dot(&y).abs().total_cmp(&eig.eigenvectors.column(j).dot(&y).abs()))
        .ok_or_else(|| Error::Domain("empty pressure space".into()))?;
    let constant_overlap = eig.eigenvectors.column(drop).dot(&y).abs();
    let mut spectrum: Vec<f64> = (0..n).filter(|&i| i != drop).map(|i| eig.eigenvalues[i]).collect();
    spectrum.sort_by(|a, b| a.total_cmp(b));
    let n_zero_modes = spectrum.iter().filter(|&&v| v < zero_tol).count();
    let c = spectrum.first().map_or(0.0, |&v| v.max(0.0).sqrt());
    Ok(InfSupResult {
        p: sys.p,
        space: sys.space,
        norm: sys.norm,
        c,
        spectrum,
        n_zero_modes,
        zero_tol,
        constant_overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, MeshSpec};
    use crate::stokes::assemble::{assemble, AssemblyOptions};

    #[test]
    fn crisscross_cr_is_stable_and_conforming_is_not() {
        let m = generate_mesh(&MeshSpec::Crisscross { side: 1.0 }).unwrap();
        let cr = assemble(&m, 5, Space::Cr, &AssemblyOptions::default()).unwrap();
        let r = infsup_constant(&cr, DEFAULT_ZERO_TOL).unwrap();
        assert!(r.c > 1e-3 && r.n_zero_modes == 0, "{r:?}");
        assert!(r.constant_overlap > 1.0 - 1e-10);
        let conf = assemble(&m, 5, Space::Conforming, &AssemblyOptions::default()).unwrap();
        let r = infsup_constant(&conf, DEFAULT_ZERO_TOL).unwrap();
        assert!(r.n_zero_modes >= 1, "{r:?}");
    }

    #[test]
    fn spectrum_is_bounded_by_two() {
        // ‖div v‖² <= 2 |v|²
        let m = generate_mesh(&MeshSpec::Grid { n: 2, amp: 0.1, seed: 4 }).unwrap();
        let s = assemble(&m, 3, Space::Cr, &AssemblyOptions::default()).unwrap();
        let r = infsup_constant(&s, DEFAULT_ZERO_TOL).unwrap();
        assert!(r.spectrum.iter().all(|&v| v <= 2.0 + 1e-10 && v > -1e-10));
    }
}
