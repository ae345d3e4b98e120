//! Saddle-point solve with a zero-mean pressure constraint.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::assemble::{monomial_table, StokesSystem};
use super::infsup::{chol_a, schur};
use crate::error::{Error, Result};
use crate::mesh::Triangulation;
use crate::polytools::frame::Point;
use crate::polytools::quadrature::triangle_quadrature;

/// Bordered systems with a smaller pivot ratio are treated as singular.
pub const PIVOT_RATIO_MIN: f64 = 1e-13;

#[derive(Debug, Clone, Serialize)]
pub struct StokesSolution {
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
    pub multiplier: f64,
    /// `‖A u - Bᵀ p - F‖ / ‖F‖` (absolute when `F = 0`).
    pub momentum_residual: f64,
    /// `‖B u‖ / (‖B‖_max ‖u‖)` (absolute when `u = 0`).
    pub divergence_residual: f64,
    /// `|meanᵀ p|`.
    pub mean_residual: f64,
    /// Smallest over largest `|U_ii|` of the bordered Schur LU factor.
    pub pivot_ratio: f64,
}

/// `F_j = ∫ f · φ_j` with quadrature of degree `load_degree`.
pub fn load_vector(mesh: &Triangulation, sys: &StokesSystem, f: &dyn Fn(Point) -> [f64; 2], load_degree: usize) -> Result<DVector<f64>> {
    let rule = triangle_quadrature(load_degree)?;
    let vp = monomial_table(&rule, sys.p);
    let mut out = DVector::zeros(sys.n_velocity());
    for (k, e) in sys.basis.entries.iter().enumerate() {
        for (&t, piece) in &e.poly.pieces {
            let frame = mesh.frame(t);
            let vals = &vp * DVector::from_column_slice(&piece.coeffs);
            for (q, l) in rule.points.iter().enumerate() {
                let fx = f(frame.point(*l));
                let w = rule.weights[q] * frame.area * vals[q];
                out[2 * k] += w * fx[0];
                out[2 * k + 1] += w * fx[1];
            }
        }
    }
    Ok(out)
}

/// Solves `A u - Bᵀ p = F`, `B u = 0`, `meanᵀ p = 0` through the pressure
/// Schur complement bordered by the mean constraint. Without `force`, a
/// numerically singular bordered matrix is an error.
pub fn solve_stokes(
    mesh: &Triangulation,
    sys: &StokesSystem,
    f: &dyn Fn(Point) -> [f64; 2],
    force: bool,
) -> Result<StokesSolution> {
    let rhs = load_vector(mesh, sys, f, 2 * sys.p + 2)?;
    let a = chol_a(sys)?;
    let s = schur(sys, &a);
    let np = sys.n_pressure();
    let mut k = DMatrix::zeros(np + 1, np + 1);
    k.view_mut((0, 0), (np, np)).copy_from(&s);
    k.view_mut((0, np), (np, 1)).copy_from(&sys.mean);
    k.view_mut((np, 0), (1, np)).copy_from(&sys.mean.transpose());
    let a_inv_f = a.solve(&rhs);
    let mut g = DVector::zeros(np + 1);
    g.rows_mut(0, np).copy_from(&(-(&sys.b * &a_inv_f)));

    let lu = k.lu();
    let diag = lu.u().diagonal().map(f64::abs);
    let pivot_ratio = if diag.is_empty() { 1.0 } else { diag.min() / diag.max().max(f64::MIN_POSITIVE) };
    if pivot_ratio < PIVOT_RATIO_MIN {
        let msg = format!("pivot ratio {pivot_ratio:.3e}: the pair has spurious pressure modes");
        if !force {
            return Err(Error::SingularSystem(msg));
        }
        log::warn!("{msg}; continuing because the solve was forced");
    }
    let sol = lu.solve(&g).ok_or_else(|| Error::SingularSystem("LU solve failed".into()))?;
    let p = sol.rows(0, np).into_owned();
    let u = a.solve(&(&rhs + sys.b.transpose() * &p));

    let mom = &sys.a * &u - sys.b.transpose() * &p - &rhs;
    let fnorm = rhs.norm();
    let bu = &sys.b * &u;
    let unorm = u.norm();
    Ok(StokesSolution {
        momentum_residual: if fnorm > 0.0 { mom.norm() / fnorm } else { mom.norm() },
        divergence_residual: if unorm > 0.0 { bu.norm() / (sys.b.amax() * unorm) } else { bu.norm() },
        mean_residual: sys.mean.dot(&p).abs(),
        velocity: u.iter().cloned().collect(),
        pressure: p.iter().cloned().collect(),
        multiplier: sol[np],
        pivot_ratio,
    })
}

impl StokesSolution {
    /// Discrete velocity at `x`.
    pub fn velocity_at(&self, mesh: &Triangulation, sys: &StokesSystem, x: Point) -> [f64; 2] {
        let mut v = [0.0; 2];
        for (k, e) in sys.basis.entries.iter().enumerate() {
            let phi = e.poly.eval_at(mesh, x);
            if phi != 0.0 {
                v[0] += self.velocity[2 * k] * phi;
                v[1] += self.velocity[2 * k + 1] * phi;
            }
        }
        v
    }
}

/// `u = curl ψ` for `ψ = x²(1-x)² y²(1-y)²`, divergence free and zero on
/// the boundary of the unit square.
pub fn manufactured_velocity(x: Point) -> [f64; 2] {
    let (a, da, _, _) = quartic(x[0]);
    let (b, db, _, _) = quartic(x[1]);
    [a * db, -da * b]
}

/// `-Δu` for [`manufactured_velocity`] (the exact pressure is zero).
pub fn manufactured_force(x: Point) -> [f64; 2] {
    let (a, da, d2a, d3a) = quartic(x[0]);
    let (b, db, d2b, d3b) = quartic(x[1]);
    [-(d2a * db + a * d3b), d3a * b + da * d2b]
}

/// `t²(1-t)²` and its first three derivatives.
fn quartic(t: f64) -> (f64, f64, f64, f64) {
    let s = 1.0 - t;
    (t * t * s * s, 2.0 * t * s * (1.0 - 2.0 * t), 2.0 - 12.0 * t + 12.0 * t * t, -12.0 + 24.0 * t)
}
