//! Dense assembly of the velocity stiffness, divergence coupling and
//! pressure mass matrices.
//!
//! Every element's contribution is computed independently (in parallel) and
//! then added in element order, so the result is bit-identical for any
//! number of threads.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{conforming_basis, cr_basis, CrBasis, CrTag, HomPoly, MultiIndex3};
use crate::error::{Error, Result};
use crate::mesh::Triangulation;
use crate::polytools::quadrature::{triangle_quadrature, QuadratureRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Cr,
    Conforming,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Cr => "cr",
            Space::Conforming => "conforming",
        })
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cr" => Ok(Space::Cr),
            "conforming" => Ok(Space::Conforming),
            _ => Err(Error::Domain(format!("unknown space `{s}` (expected cr or conforming)"))),
        }
    }
}

/// Norm used for the velocity Gram matrix `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocityNorm {
    /// Broken `H¹` seminorm (element-wise gradients).
    #[default]
    Seminorm,
    /// Broken seminorm plus the `L²` norm.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AssemblyOptions {
    /// Quadrature exactness degree; `None` means `2p`.
    pub quad_degree: Option<usize>,
    pub norm: VelocityNorm,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { quad_degree: None, norm: VelocityNorm::Seminorm }
    }
}

impl AssemblyOptions {
    pub fn degree_for(&self, p: usize) -> usize {
        self.quad_degree.unwrap_or(2 * p)
    }
}

/// Velocity dof: scalar basis entry times a canonical unit vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VelocityDof {
    pub entry: usize,
    pub tag: CrTag,
    pub component: usize,
}

/// Pressure dof: the monomial `λ^μ` (`|μ| = p - 1`) on one triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PressureDof {
    pub triangle: usize,
    pub mu: MultiIndex3,
}

#[derive(Debug, Clone)]
pub struct StokesSystem {
    pub p: usize,
    pub space: Space,
    pub norm: VelocityNorm,
    pub quad_degree: usize,
    pub basis: CrBasis,
    /// `a(φ_i, φ_j)`, velocity dofs interleaved as `2 * entry + component`.
    pub a: DMatrix<f64>,
    /// `(q_i, div φ_j)`.
    pub b: DMatrix<f64>,
    pub mp: DMatrix<f64>,
    /// `(q_i, 1)`.
    pub mean: DVector<f64>,
    pub velocity_dofs: Vec<VelocityDof>,
    pub pressure_dofs: Vec<PressureDof>,
}

impl StokesSystem {
    pub fn n_velocity(&self) -> usize {
        self.velocity_dofs.len()
    }

    pub fn n_pressure(&self) -> usize {
        self.pressure_dofs.len()
    }
}

/// Values of all degree-`d` monomials at the rule's points (`nq x n_mon`).
pub(crate) fn monomial_table(rule: &QuadratureRule, d: usize) -> DMatrix<f64> {
    let mus = MultiIndex3::all_of_degree(d);
    DMatrix::from_fn(rule.len(), mus.len(), |q, k| {
        let l = rule.points[q];
        let m = mus[k].0;
        l[0].powi(m[0] as i32) * l[1].powi(m[1] as i32) * l[2].powi(m[2] as i32)
    })
}

fn coeff_matrix(polys: &[&HomPoly]) -> DMatrix<f64> {
    let n = polys.first().map_or(0, |p| p.coeffs.len());
    DMatrix::from_fn(n, polys.len(), |i, j| polys[j].coeffs[i])
}

struct LocalBlock {
    entries: Vec<usize>,
    a: DMatrix<f64>,
    bx: DMatrix<f64>,
    by: DMatrix<f64>,
    mp: DMatrix<f64>,
    mean: DVector<f64>,
}

pub fn assemble(mesh: &Triangulation, p: usize, space: Space, opts: &AssemblyOptions) -> Result<StokesSystem> {
    let basis = match space {
        Space::Cr => cr_basis(mesh, p)?,
        Space::Conforming => conforming_basis(mesh, p)?,
    };
    assemble_with_basis(mesh, basis, space, opts)
}

pub fn assemble_with_basis(
    mesh: &Triangulation,
    basis: CrBasis,
    space: Space,
    opts: &AssemblyOptions,
) -> Result<StokesSystem> {
    let p = basis.p;
    let quad_degree = opts.degree_for(p);
    let rule = triangle_quadrature(quad_degree)?;
    let vp = monomial_table(&rule, p);
    let vq = monomial_table(&rule, p - 1);
    let np = vq.ncols();

    let mut local: Vec<Vec<usize>> = vec![Vec::new(); mesh.n_triangles()];
    for (k, e) in basis.entries.iter().enumerate() {
        for t in e.poly.support() {
            local[t].push(k);
        }
    }

    let blocks: Vec<LocalBlock> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let f = mesh.frame(t);
            let w = DVector::from_iterator(rule.len(), rule.weights.iter().map(|w| w * f.area));
            let polys: Vec<&HomPoly> = local[t].iter().map(|&k| basis.entries[k].poly.piece(t).unwrap()).collect();
            let grads: Vec<[HomPoly; 2]> = polys.iter().map(|q| q.gradient(&f.grads)).collect();
            let gx = &vq * coeff_matrix(&grads.iter().map(|g| &g[0]).collect::<Vec<_>>());
            let gy = &vq * coeff_matrix(&grads.iter().map(|g| &g[1]).collect::<Vec<_>>());
            let wgx = DMatrix::from_fn(gx.nrows(), gx.ncols(), |q, j| w[q] * gx[(q, j)]);
            let wgy = DMatrix::from_fn(gy.nrows(), gy.ncols(), |q, j| w[q] * gy[(q, j)]);
            let mut a = gx.transpose() * &wgx + gy.transpose() * &wgy;
            if opts.norm == VelocityNorm::Full {
                let phi = &vp * coeff_matrix(&polys);
                let wphi = DMatrix::from_fn(phi.nrows(), phi.ncols(), |q, j| w[q] * phi[(q, j)]);
                a += phi.transpose() * wphi;
            }
            let wvq = DMatrix::from_fn(vq.nrows(), np, |q, j| w[q] * vq[(q, j)]);
            LocalBlock {
                entries: local[t].clone(),
                a,
                bx: wvq.transpose() * gx,
                by: wvq.transpose() * gy,
                mp: vq.transpose() * &wvq,
                mean: wvq.row_sum().transpose(),
            }
        })
        .collect();

    let nv = 2 * basis.len();
    let npr = np * mesh.n_triangles();
    let mut a = DMatrix::zeros(nv, nv);
    let mut b = DMatrix::zeros(npr, nv);
    let mut mp = DMatrix::zeros(npr, npr);
    let mut mean = DVector::zeros(npr);
    for (t, blk) in blocks.iter().enumerate() {
        let off = t * np;
        for (i, &ki) in blk.entries.iter().enumerate() {
            for (j, &kj) in blk.entries.iter().enumerate() {
                a[(2 * ki, 2 * kj)] += blk.a[(i, j)];
                a[(2 * ki + 1, 2 * kj + 1)] += blk.a[(i, j)];
            }
            for r in 0..np {
                b[(off + r, 2 * ki)] += blk.bx[(r, i)];
                b[(off + r, 2 * ki + 1)] += blk.by[(r, i)];
            }
        }
        mp.view_mut((off, off), (np, np)).copy_from(&blk.mp);
        mean.rows_mut(off, np).copy_from(&blk.mean);
    }

    let velocity_dofs = basis
        .entries
        .iter()
        .enumerate()
        .flat_map(|(k, e)| (0..2).map(move |c| VelocityDof { entry: k, tag: e.tag, component: c }))
        .collect();
    let mus = MultiIndex3::all_of_degree(p - 1);
    let pressure_dofs = (0..mesh.n_triangles())
        .flat_map(|t| mus.iter().map(move |&mu| PressureDof { triangle: t, mu }))
        .collect();
    Ok(StokesSystem {
        p,
        space,
        norm: opts.norm,
        quad_degree,
        basis,
        a,
        b,
        mp,
        mean,
        velocity_dofs,
        pressure_dofs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, MeshSpec};

    #[test]
    fn crisscross_p1_dimensions() {
        let m = generate_mesh(&MeshSpec::Crisscross { side: 1.0 }).unwrap();
        let s = assemble(&m, 1, Space::Cr, &AssemblyOptions::default()).unwrap();
        assert_eq!(s.n_velocity(), 2 * m.interior_edges().count());
        assert_eq!(s.n_pressure(), 4);
    }

    #[test]
    fn stiffness_is_symmetric_and_positive_on_basis() {
        let m = generate_mesh(&MeshSpec::Crisscross { side: 1.0 }).unwrap();
        for p in [2, 3, 5] {
            let s = assemble(&m, p, Space::Cr, &AssemblyOptions::default()).unwrap();
            assert!((&s.a - s.a.transpose()).amax() < 1e-12 * s.a.amax());
            assert!((0..s.n_velocity()).all(|i| s.a[(i, i)] > 0.0));
        }
    }

    #[test]
    fn constant_pressure_is_orthogonal_to_divergence() {
        // integration by parts with zero traces / zero edge means
        let m = generate_mesh(&MeshSpec::Grid { n: 2, amp: 0.1, seed: 1 }).unwrap();
        for (p, space) in [(3, Space::Cr), (4, Space::Cr), (3, Space::Conforming)] {
            let s = assemble(&m, p, space, &AssemblyOptions::default()).unwrap();
            // the constant 1 in monomial coordinates is the coefficient vector of S^(p-1)
            let one = HomPoly::one(p - 1);
            let c = DVector::from_iterator(
                s.n_pressure(),
                (0..m.n_triangles()).flat_map(|_| one.coeffs.iter().cloned()),
            );
            let r = s.b.transpose() * &c;
            assert!(r.amax() < 1e-12 * s.b.amax(), "p={p} {space}: {}", r.amax());
            assert!((c.dot(&s.mean) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_degree_does_not_matter_beyond_exactness() {
        let m = generate_mesh(&MeshSpec::Crisscross { side: 1.0 }).unwrap();
        let a = assemble(&m, 3, Space::Cr, &AssemblyOptions::default()).unwrap();
        let opts = AssemblyOptions { quad_degree: Some(10), ..Default::default() };
        let b = assemble(&m, 3, Space::Cr, &opts).unwrap();
        assert!((&a.a - &b.a).amax() < 1e-12 * a.a.amax());
        assert!((&a.b - &b.b).amax() < 1e-12 * a.b.amax());
    }
}
