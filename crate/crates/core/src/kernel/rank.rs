//! Numerical rank and left null space through a dense SVD.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Below this singular-value gap the rank decision is flagged as fragile.
pub const GAP_WARNING: f64 = 1e3;

/// `τ = σ_max · max(rows, cols) · 2^-52 · safety`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TolPolicy {
    pub safety: f64,
}

impl Default for TolPolicy {
    fn default() -> Self {
        Self { safety: 64.0 }
    }
}

impl TolPolicy {
    pub fn threshold(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        sigma_max * rows.max(cols) as f64 * f64::EPSILON * self.safety
    }
}

#[derive(Debug, Clone)]
pub struct KernelDim {
    /// Dimension of `{y : yᵀ M = 0}`.
    pub dim: usize,
    /// Orthonormal columns spanning the left null space.
    pub null_basis: DMatrix<f64>,
    /// All `rows` singular values, descending (zeros appended when
    /// `cols < rows`).
    pub singular_values: Vec<f64>,
    pub tau: f64,
    /// `σ_{r-1} / σ_r` around the rank `r` (0-based), infinite when the
    /// spectrum is entirely above or below `τ`.
    pub gap: f64,
    pub ill_separated: bool,
}

pub fn kernel_dimension(m: &DMatrix<f64>, policy: TolPolicy) -> KernelDim {
    let (rows, cols) = m.shape();
    if rows == 0 {
        return KernelDim {
            dim: 0,
            null_basis: DMatrix::zeros(0, 0),
            singular_values: Vec::new(),
            tau: 0.0,
            gap: f64::INFINITY,
            ill_separated: false,
        };
    }
    // pad so the SVD returns a full left basis
    let mut a = DMatrix::zeros(rows, cols.max(rows));
    a.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = a.svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = sv[0];
    let tau = policy.threshold(sigma_max, rows, cols);
    let rank = sv.iter().filter(|&&s| s > tau).count();
    let dim = rows - rank;
    let gap = if rank == 0 || rank == rows {
        f64::INFINITY
    } else {
        sv[rank - 1] / sv[rank].max(sigma_max * f64::EPSILON)
    };
    let ill_separated = gap < GAP_WARNING;
    if ill_separated {
        log::warn!("ill-separated spectrum: gap {gap:.3e} at rank {rank}");
    }
    let null_basis = DMatrix::from_fn(rows, dim, |i, j| u[(i, order[rank + j])]);
    KernelDim { dim, null_basis, singular_values: sv, tau, gap, ill_separated }
}

impl KernelDim {
    /// `‖y - N Nᵀ y‖ / ‖y‖`; zero for `y = 0`.
    pub fn residual(&self, y: &DVector<f64>) -> f64 {
        let n = y.norm();
        if n == 0.0 {
            return 0.0;
        }
        let proj = &self.null_basis * (self.null_basis.transpose() * y);
        (y - proj).norm() / n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_is_all_kernel() {
        let k = kernel_dimension(&DMatrix::zeros(3, 5), TolPolicy::default());
        assert_eq!(k.dim, 3);
        assert_eq!(k.null_basis.ncols(), 3);
    }

    #[test]
    fn identity_padded_has_no_kernel() {
        let mut m = DMatrix::zeros(3, 5);
        m.view_mut((0, 0), (3, 3)).fill_with_identity();
        let k = kernel_dimension(&m, TolPolicy::default());
        assert_eq!(k.dim, 0);
        assert!(k.gap.is_infinite());
    }

    #[test]
    fn left_null_vector_is_found() {
        // rows 0 and 1 are equal, so (1, -1, 0)/√2 spans the left kernel
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 0.0, 1.0]);
        let k = kernel_dimension(&m, TolPolicy::default());
        assert_eq!(k.dim, 1);
        let y = DVector::from_vec(vec![1.0, -1.0, 0.0]);
        assert!(k.residual(&y) < 1e-14);
        assert!((k.null_basis.transpose() * &m).amax() < 1e-14);
        assert!(k.gap > 1e10);
    }

    #[test]
    fn close_singular_values_are_flagged() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3e-13, 1e-14]));
        let k = kernel_dimension(&m, TolPolicy::default());
        assert_eq!(k.dim, 1);
        assert!((k.gap - 30.0).abs() < 1e-6);
        assert!(k.ill_separated);
    }
}
