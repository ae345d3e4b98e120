//! Patch divergence matrices and certified kernel dimensions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::critical::critical_function;
use super::rank::{kernel_dimension, KernelDim, TolPolicy};
use crate::basis::{HomPoly, MultiIndex3, PiecewisePoly};
use crate::error::Result;
use crate::mesh::{detect_critical_points, CriticalKind, NodalPatch, DEFAULT_EPS_ANGLE};
use crate::stokes::assemble::{assemble, AssemblyOptions, Space, StokesSystem};

/// Minimum singular-value gap for a dimension to count as certified.
pub const GAP_CERTIFY: f64 = 1e6;

/// `B` on the patch submesh together with the diagonal scalings used
/// before the SVD.
#[derive(Debug, Clone)]
pub struct PatchDivergence {
    pub system: StokesSystem,
    /// `1/sqrt(diag Mp)`.
    pub row_scale: DVector<f64>,
    /// `1/sqrt(diag A)`.
    pub col_scale: DVector<f64>,
}

impl PatchDivergence {
    pub fn b(&self) -> &DMatrix<f64> {
        &self.system.b
    }

    pub fn scaled(&self) -> DMatrix<f64> {
        let b = &self.system.b;
        DMatrix::from_fn(b.nrows(), b.ncols(), |i, j| self.row_scale[i] * b[(i, j)] * self.col_scale[j])
    }

    /// Monomial coordinates of a patch-local piecewise polynomial of degree
    /// `p - 1`.
    pub fn pressure_coords(&self, q: &PiecewisePoly) -> DVector<f64> {
        let p = self.system.p;
        let mus = MultiIndex3::all_of_degree(p - 1);
        let np = mus.len();
        let mut c = DVector::zeros(self.system.n_pressure());
        for (&t, piece) in &q.pieces {
            let piece = piece.homogenize(p - 1);
            for (k, mu) in mus.iter().enumerate() {
                c[t * np + k] = piece.get(*mu);
            }
        }
        c
    }

    /// Coordinates of the patch indicator `1_z`.
    pub fn one_coords(&self) -> DVector<f64> {
        let m = self.system.pressure_dofs.iter().map(|d| d.triangle).max().map_or(0, |t| t + 1);
        let mut one = PiecewisePoly::zero(self.system.p - 1);
        for t in 0..m {
            one.insert(t, HomPoly::one(self.system.p - 1));
        }
        self.pressure_coords(&one)
    }

    /// Coordinates in the scaled row basis (`c ./ row_scale`).
    pub fn to_scaled(&self, c: &DVector<f64>) -> DVector<f64> {
        c.component_div(&self.row_scale)
    }
}

/// Rows: per-triangle monomials `λ^μ`, `|μ| = p - 1`. Columns: the vector
/// velocity basis of `S_{p,0}(T_z)` or `CR_{p,0}(T_z)` on the patch.
pub fn patch_divergence_matrix(patch: &NodalPatch, p: usize, space: Space, quad_degree: Option<usize>) -> Result<PatchDivergence> {
    let opts = AssemblyOptions { quad_degree, ..Default::default() };
    let system = assemble(&patch.submesh(), p, space, &opts)?;
    let row_scale = system.mp.diagonal().map(|d| 1.0 / d.sqrt());
    let col_scale = system.a.diagonal().map(|d| 1.0 / d.sqrt());
    Ok(PatchDivergence { system, row_scale, col_scale })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyzeOptions {
    pub eps_angle: f64,
    pub quad_degree: Option<usize>,
    pub tol: TolPolicy,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self { eps_angle: DEFAULT_EPS_ANGLE, quad_degree: None, tol: TolPolicy::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceKernel {
    pub space: Space,
    pub rows: usize,
    pub cols: usize,
    pub dim: usize,
    pub tau: f64,
    pub gap: f64,
    pub ill_separated: bool,
    /// Residual of `1_z` against the computed left null space.
    pub one_residual: f64,
    pub singular_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    pub center: usize,
    pub m: usize,
    pub p: usize,
    pub sigma_z: usize,
    pub critical_points: Vec<usize>,
    pub critical_kinds: Vec<CriticalKind>,
    pub rim_defects: Vec<f64>,
    pub center_defects: Option<[f64; 2]>,
    pub conforming: SpaceKernel,
    pub cr: SpaceKernel,
    /// `1 + σ_z`, stated for `p >= 4` only.
    pub predicted_dim_n: Option<usize>,
    pub predicted_dim_n_cr: usize,
    /// Residual of each critical function against the conforming kernel.
    pub critical_residuals: Vec<f64>,
    /// Largest residual of a CR kernel vector against the conforming kernel.
    pub inclusion_residual: f64,
    pub dims_ok: bool,
    pub gaps_ok: bool,
    pub inclusion_ok: bool,
    pub span_ok: bool,
    pub pass: bool,
}

fn space_kernel(space: Space, div: &PatchDivergence, k: &KernelDim) -> SpaceKernel {
    let b = div.b();
    SpaceKernel {
        space,
        rows: b.nrows(),
        cols: b.ncols(),
        dim: k.dim,
        tau: k.tau,
        gap: k.gap,
        ill_separated: k.ill_separated,
        one_residual: k.residual(&div.to_scaled(&div.one_coords())),
        singular_values: k.singular_values.clone(),
    }
}

pub fn analyze_patch(patch: &NodalPatch, p: usize, opts: &AnalyzeOptions) -> Result<KernelReport> {
    let crit = detect_critical_points(patch, opts.eps_angle);
    let conf = patch_divergence_matrix(patch, p, Space::Conforming, opts.quad_degree)?;
    let cr = patch_divergence_matrix(patch, p, Space::Cr, opts.quad_degree)?;
    let k_conf = kernel_dimension(&conf.scaled(), opts.tol);
    let k_cr = kernel_dimension(&cr.scaled(), opts.tol);

    let critical_residuals = crit
        .points
        .iter()
        .map(|&zp| {
            let q = critical_function(patch, &crit, zp, p)?;
            Ok(k_conf.residual(&conf.to_scaled(&conf.pressure_coords(&q.poly))))
        })
        .collect::<Result<Vec<f64>>>()?;
    // both matrices share the pressure basis and its scaling
    let inclusion_residual = (0..k_cr.dim)
        .map(|j| k_conf.residual(&k_cr.null_basis.column(j).into_owned()))
        .fold(0.0, f64::max);

    let conforming = space_kernel(Space::Conforming, &conf, &k_conf);
    let cr = space_kernel(Space::Cr, &cr, &k_cr);
    let predicted_dim_n = (p >= 4).then_some(1 + crit.sigma_z);
    let dims_ok = cr.dim == 1 && predicted_dim_n.is_none_or(|d| conforming.dim == d);
    let gaps_ok = conforming.gap >= GAP_CERTIFY && cr.gap >= GAP_CERTIFY;
    let inclusion_ok = cr.dim <= conforming.dim && inclusion_residual < 1e-9;
    let span_ok = conforming.one_residual < 1e-11
        && cr.one_residual < 1e-11
        && (predicted_dim_n.is_none() || critical_residuals.iter().all(|&r| r < 1e-9));
    Ok(KernelReport {
        center: patch.center,
        m: patch.m(),
        p,
        sigma_z: crit.sigma_z,
        critical_points: crit.points.clone(),
        critical_kinds: crit.kinds.clone(),
        rim_defects: crit.rim_defects.clone(),
        center_defects: crit.center_defects,
        conforming,
        cr,
        predicted_dim_n,
        predicted_dim_n_cr: 1,
        critical_residuals,
        inclusion_residual,
        dims_ok,
        gaps_ok,
        inclusion_ok,
        span_ok,
        pass: dims_ok && gaps_ok && inclusion_ok && span_ok,
    })
}
