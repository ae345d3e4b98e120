//! The chain matrix `M_n` and its factorization `2 D_σ T_{n,α} D_E`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::critical::{critical_function_with_signs, edge_bubble_pairing, PatchPoint};
use super::signs::chain_signs;
use crate::error::{Error, Result};
use crate::mesh::{CriticalSet, NodalPatch};
use crate::polytools::frame::{norm, sub};

/// Symmetric tridiagonal `T_{n,α}` from the `n + 1` angles `α_1..α_{n+1}`
/// at the patch center: diagonal `sin(α_j + α_{j+1}) / (sin α_j sin α_{j+1})`,
/// off-diagonal `1 / sin α_{j+1}`.
pub fn t_matrix(angles: &[f64]) -> DMatrix<f64> {
    let n = angles.len().saturating_sub(1);
    let mut t = DMatrix::zeros(n, n);
    for k in 0..n {
        let (a, b) = (angles[k], angles[k + 1]);
        t[(k, k)] = (a + b).sin() / (a.sin() * b.sin());
        if k + 1 < n {
            t[(k, k + 1)] = 1.0 / b.sin();
            t[(k + 1, k)] = 1.0 / b.sin();
        }
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TridiagDet {
    pub recursion: f64,
    /// `sin(Σα) / Π sin α`, when the angles are known.
    pub closed: Option<f64>,
    pub rel_diff: Option<f64>,
}

/// Three-term determinant recursion, compared against the angle formula if
/// `angles` is given.
pub fn tridiag_det(t: &DMatrix<f64>, angles: Option<&[f64]>) -> TridiagDet {
    let n = t.nrows();
    let (mut prev, mut cur) = (1.0, if n > 0 { t[(0, 0)] } else { 1.0 });
    for k in 1..n {
        let next = t[(k, k)] * cur - t[(k, k - 1)] * t[(k - 1, k)] * prev;
        prev = cur;
        cur = next;
    }
    let closed = angles.map(|a| a.iter().sum::<f64>().sin() / a.iter().map(|x| x.sin()).product::<f64>());
    let rel_diff = closed.map(|c| (cur - c).abs() / c.abs().max(cur.abs()).max(f64::MIN_POSITIVE));
    TridiagDet { recursion: cur, closed, rel_diff }
}

#[derive(Debug, Clone)]
pub struct KernelMatrices {
    pub p: usize,
    /// Rim vertices `z_1..z_n` of the chain (global indices).
    pub chain: Vec<usize>,
    /// `(q_{z_j}, div(B_{E_i} n_i))` by quadrature, row `i`, column `j`.
    pub mn: DMatrix<f64>,
    /// The same entries from the closed forms for the diagonal and the two
    /// off-diagonals.
    pub mn_closed: DMatrix<f64>,
    pub t: DMatrix<f64>,
    pub d_sigma: DVector<f64>,
    pub d_e: DVector<f64>,
    /// `α_1..α_{n+1}`.
    pub angles: Vec<f64>,
    pub det_t: TridiagDet,
    /// Largest entrywise relative deviation of `mn` from `2 D_σ T D_E`.
    pub factorization_residual: f64,
    /// Largest entrywise relative deviation of `mn` from `mn_closed`.
    pub closed_residual: f64,
}

impl KernelMatrices {
    pub fn n(&self) -> usize {
        self.mn.nrows()
    }

    pub fn factorization(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| 2.0 * self.d_sigma[i] * self.t[(i, j)] * self.d_e[j])
    }
}

/// Relative entrywise deviation; zero reference entries are measured
/// against the largest reference entry.
fn entrywise_rel(a: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    let scale = reference.amax().max(f64::MIN_POSITIVE);
    a.iter()
        .zip(reference.iter())
        .map(|(x, r)| (x - r).abs() / if *r != 0.0 { r.abs() } else { scale })
        .fold(0.0, f64::max)
}

/// Assembles `M_n` for chain `chain_index` of the critical set. Quadrature
/// degree defaults to `2p`.
pub fn assemble_mn(
    patch: &NodalPatch,
    crit: &CriticalSet,
    chain_index: usize,
    p: usize,
    quad_degree: Option<usize>,
) -> Result<KernelMatrices> {
    if p.is_multiple_of(2) || p < 3 {
        return Err(Error::Parity { p, msg: "the chain matrix needs odd p >= 3" });
    }
    let chain = crit.chains.get(chain_index).ok_or(Error::NoChain)?;
    let m = patch.m();
    let n = chain.len();
    let qd = quad_degree.unwrap_or(2 * p);
    let signs: Vec<(usize, f64)> = chain_signs(patch, chain).into_iter().map(|(t, s)| (t, s as f64)).collect();
    // K_j = triangles[r_j] for j <= n, K_{n+1} follows the last spoke
    let tris: Vec<usize> = signs.iter().map(|s| s.0).collect();
    let angles: Vec<f64> = tris.iter().map(|&t| patch.frame(t).angles[0]).collect();
    let areas: Vec<f64> = tris.iter().map(|&t| patch.frame(t).area).collect();
    let lens: Vec<f64> = chain.rim.iter().map(|&r| norm(sub(patch.rim_points[r], patch.center_point))).collect();

    let qs = chain
        .rim
        .iter()
        .map(|&r| critical_function_with_signs(patch, PatchPoint::Rim(r), p, &signs))
        .collect::<Result<Vec<_>>>()?;
    let mut mn = DMatrix::zeros(n, n);
    for (i, &r) in chain.rim.iter().enumerate() {
        for (j, q) in qs.iter().enumerate() {
            if i.abs_diff(j) <= 1 {
                mn[(i, j)] = edge_bubble_pairing(patch, &q.poly, r, p, qd)?;
            }
        }
    }
    debug_assert!(tris.iter().all(|&t| t < m));

    // 1-based j in the formulas corresponds to index j - 1 here
    let sign = |j: usize| if j.is_multiple_of(2) { -1.0 } else { 1.0 };
    let mut mn_closed = DMatrix::zeros(n, n);
    for i in 0..n {
        let cot = 1.0 / angles[i].tan() + 1.0 / angles[i + 1].tan();
        mn_closed[(i, i)] = 2.0 * sign(i) * cot / lens[i];
        if i > 0 {
            mn_closed[(i, i - 1)] = sign(i) * lens[i] / areas[i];
        }
        if i + 1 < n {
            mn_closed[(i, i + 1)] = sign(i) * lens[i] / areas[i + 1];
        }
    }

    let t = t_matrix(&angles);
    let d_sigma = DVector::from_fn(n, |i, _| sign(i));
    let d_e = DVector::from_iterator(n, lens.iter().map(|l| 1.0 / l));
    let det_t = tridiag_det(&t, Some(&angles));
    let mut out = KernelMatrices {
        p,
        chain: chain.rim.iter().map(|&r| patch.rim[r]).collect(),
        mn,
        mn_closed,
        t,
        d_sigma,
        d_e,
        angles,
        det_t,
        factorization_residual: 0.0,
        closed_residual: 0.0,
    };
    out.factorization_residual = entrywise_rel(&out.mn, &out.factorization());
    out.closed_residual = entrywise_rel(&out.mn, &out.mn_closed);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{detect_critical_points, generate_mesh, nodal_patch, MeshSpec};
    use std::f64::consts::PI;

    #[test]
    fn quarter_angles_give_two() {
        let a = [PI / 4.0, PI / 4.0];
        let d = tridiag_det(&t_matrix(&a), Some(&a));
        assert!((d.recursion - 2.0).abs() < 1e-14);
        assert!((d.closed.unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn straight_angle_sum_is_singular() {
        let a = [0.4, 0.9, PI - 1.3];
        let d = tridiag_det(&t_matrix(&a), Some(&a));
        assert!(d.recursion.abs() < 1e-13);
        assert!(d.closed.unwrap().abs() < 1e-13);
    }

    #[test]
    fn recursion_matches_full_determinant() {
        let a = [0.3, 0.5, 0.2, 0.6, 0.4];
        let t = t_matrix(&a);
        let d = tridiag_det(&t, Some(&a));
        assert!((d.recursion - t.determinant()).abs() < 1e-10 * d.recursion.abs());
        assert!(d.rel_diff.unwrap() < 1e-12);
    }

    #[test]
    fn chain_matrix_factorizes() {
        for n in 1..=3 {
            let mesh = generate_mesh(&MeshSpec::Chain { n, seed: 11 }).unwrap();
            let patch = nodal_patch(&mesh, 0).unwrap();
            let crit = detect_critical_points(&patch, 1e-9);
            for p in [5, 7] {
                let k = assemble_mn(&patch, &crit, 0, p, None).unwrap();
                assert_eq!(k.n(), n);
                assert!(k.factorization_residual < 1e-9, "n={n} p={p}: {}", k.factorization_residual);
                assert!(k.closed_residual < 1e-9, "n={n} p={p}: {}", k.closed_residual);
                assert!(k.det_t.rel_diff.unwrap() < 1e-11);
            }
        }
    }

    #[test]
    fn errors() {
        let mesh = generate_mesh(&MeshSpec::Fan { m: 6, radius: 1.0 }).unwrap();
        let patch = nodal_patch(&mesh, 0).unwrap();
        let crit = detect_critical_points(&patch, 1e-9);
        assert!(matches!(assemble_mn(&patch, &crit, 0, 5, None), Err(Error::NoChain)));
        assert!(matches!(assemble_mn(&patch, &crit, 0, 4, None), Err(Error::Parity { .. })));
    }
}
