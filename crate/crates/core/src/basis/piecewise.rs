use std::collections::BTreeMap;

use serde::Serialize;

use super::poly::HomPoly;
use crate::error::{Error, Result};
use crate::mesh::Triangulation;
use crate::polytools::frame::Point;

/// Scalar piecewise polynomial: one homogeneous barycentric polynomial of
/// degree `degree` per support triangle, zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewisePoly {
    pub degree: usize,
    pub pieces: BTreeMap<usize, HomPoly>,
}

impl PiecewisePoly {
    pub fn zero(degree: usize) -> Self {
        Self { degree, pieces: BTreeMap::new() }
    }

    pub fn single(t: usize, poly: HomPoly) -> Self {
        let mut p = Self::zero(poly.degree);
        p.insert(t, poly);
        p
    }

    /// Stores `poly` on triangle `t`, homogenizing it up to `self.degree`.
    pub fn insert(&mut self, t: usize, poly: HomPoly) {
        self.pieces.insert(t, poly.homogenize(self.degree));
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.pieces.keys().cloned()
    }

    pub fn piece(&self, t: usize) -> Option<&HomPoly> {
        self.pieces.get(&t)
    }

    pub fn eval_bary(&self, t: usize, l: [f64; 3]) -> f64 {
        self.pieces.get(&t).map_or(0.0, |p| p.eval(l))
    }

    /// Value at `x`, taken from the lowest-index support triangle containing
    /// it; zero outside the support.
    pub fn eval_at(&self, mesh: &Triangulation, x: Point) -> f64 {
        for (&t, p) in &self.pieces {
            let l = mesh.frame(t).barycentric(x);
            if l.iter().all(|&v| v >= -1e-12) {
                return p.eval(l);
            }
        }
        0.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            degree: self.degree,
            pieces: self.pieces.iter().map(|(&t, p)| (t, p.scale(s))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let degree = self.degree.max(other.degree);
        let mut out = Self::zero(degree);
        for (&t, p) in self.pieces.iter().chain(&other.pieces) {
            let sum = match out.pieces.get(&t) {
                Some(q) => q + p,
                None => p.homogenize(degree),
            };
            out.pieces.insert(t, sum);
        }
        out
    }

    /// `∂_w` of the function on each support triangle, degree one lower.
    pub fn directional(&self, mesh: &Triangulation, w: Point) -> Self {
        let mut out = Self::zero(self.degree.saturating_sub(1));
        for (&t, p) in &self.pieces {
            out.pieces.insert(t, p.directional(&mesh.frame(t).grads, w));
        }
        out
    }

    /// Exact `∫_Ω f`.
    pub fn integrate(&self, mesh: &Triangulation) -> f64 {
        self.pieces.iter().map(|(&t, p)| p.integrate(mesh.frame(t).area)).sum()
    }
}

/// Exact element-wise divergence of `(vx, vy)`.
///
/// Both components must have the same degree, and the same support unless
/// one of them is identically zero.
pub fn poly_divergence(mesh: &Triangulation, vx: &PiecewisePoly, vy: &PiecewisePoly) -> Result<PiecewisePoly> {
    let same_support = vx.pieces.keys().eq(vy.pieces.keys());
    if vx.degree != vy.degree || !(same_support || vx.pieces.is_empty() || vy.pieces.is_empty()) {
        return Err(Error::MismatchedSupport);
    }
    let dx = vx.directional(mesh, [1.0, 0.0]);
    let dy = vy.directional(mesh, [0.0, 1.0]);
    let mut out = dx.add(&dy);
    out.degree = vx.degree.saturating_sub(1);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> Triangulation {
        Triangulation::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn divergence_of_first_barycentric() {
        let m = reference();
        let vx = PiecewisePoly::single(0, HomPoly::lambda(0));
        let d = poly_divergence(&m, &vx, &PiecewisePoly::zero(1)).unwrap();
        assert!((d.eval_bary(0, [0.2, 0.3, 0.5]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn divergence_of_identity_field_and_constants() {
        let m = reference();
        // x = λ2, y = λ3 on the reference triangle
        let vx = PiecewisePoly::single(0, HomPoly::lambda(1));
        let vy = PiecewisePoly::single(0, HomPoly::lambda(2));
        let d = poly_divergence(&m, &vx, &vy).unwrap();
        assert!((d.eval_bary(0, [0.1, 0.1, 0.8]) - 2.0).abs() < 1e-15);
        let c = PiecewisePoly::single(0, HomPoly::one(3).scale(4.0));
        let d = poly_divergence(&m, &c, &c).unwrap();
        assert!(d.pieces[&0].max_abs_coeff() < 1e-14);
    }

    #[test]
    fn mismatched_support_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let m = Triangulation::from_parts(v, vec![[0, 1, 2], [1, 3, 2]]).unwrap();
        let a = PiecewisePoly::single(0, HomPoly::lambda(0));
        let b = PiecewisePoly::single(1, HomPoly::lambda(0));
        assert!(matches!(poly_divergence(&m, &a, &b), Err(Error::MismatchedSupport)));
        let c = PiecewisePoly::single(0, HomPoly::one(2));
        assert!(poly_divergence(&m, &a, &c).is_err());
    }

    #[test]
    fn eval_outside_support_is_zero() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let m = Triangulation::from_parts(v, vec![[0, 1, 2], [1, 3, 2]]).unwrap();
        let a = PiecewisePoly::single(0, HomPoly::one(1));
        assert_eq!(a.eval_at(&m, [0.8, 0.8]), 0.0);
        assert_eq!(a.eval_at(&m, [0.2, 0.2]), 1.0);
    }
}
