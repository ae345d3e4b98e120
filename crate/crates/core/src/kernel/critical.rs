//! Critical functions `q_{p-1,z'}` and their pairing with CR edge bubbles.

use serde::Serialize;

use super::signs::{chain_signs, sign_assignment};
use crate::basis::{cr_edge_bubble, jacobi_of_lambda, HomPoly, PiecewisePoly};
use crate::error::{Error, Result};
use crate::mesh::{CriticalSet, NodalPatch, Triangulation};
use crate::polytools::frame::{norm, sub, Point};
use crate::polytools::jacobi::eval_unchecked;
use crate::polytools::quadrature::{integrate_bary, triangle_quadrature};

/// Where `z'` sits in the patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchPoint {
    Center,
    Rim(usize),
}

impl PatchPoint {
    pub fn locate(patch: &NodalPatch, v: usize) -> Result<Self> {
        if v == patch.center {
            return Ok(PatchPoint::Center);
        }
        patch.rim.iter().position(|&r| r == v).map(PatchPoint::Rim).ok_or(Error::NotCritical(v))
    }

    pub fn vertex(&self, patch: &NodalPatch) -> usize {
        match *self {
            PatchPoint::Center => patch.center,
            PatchPoint::Rim(i) => patch.rim[i],
        }
    }
}

/// One support triangle of a critical function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportPiece {
    /// Patch triangle index.
    pub triangle: usize,
    pub sigma: f64,
    /// Local index of `z'` in the patch frame `(z, rim[i-1], rim[i])`.
    pub local: usize,
    pub area: f64,
}

/// `(σ_K/|K|) P_{p-1}^{(0,2)}(1 - 2λ_{K,z'})` on the triangles containing
/// `z'`, in patch-local numbering (which is also the numbering of
/// [`NodalPatch::submesh`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalFunction {
    pub point: usize,
    pub location: PatchPoint,
    pub p: usize,
    pub support: Vec<SupportPiece>,
    pub poly: PiecewisePoly,
}

/// Support triangles of `z'` with their local vertex index, no signs.
fn support_of(patch: &NodalPatch, at: PatchPoint) -> Vec<(usize, usize)> {
    let m = patch.m();
    match at {
        PatchPoint::Center => (0..m).map(|i| (i, 0)).collect(),
        PatchPoint::Rim(k) => vec![(k, 2), ((k + 1) % m, 1)],
    }
}

/// Signs used for `q_{z'}`: the global alternation for the center, the
/// chain-local one for rim points (falling back to the global one on an
/// even patch).
fn default_signs(patch: &NodalPatch, crit: &CriticalSet, at: PatchPoint) -> Result<Vec<(usize, f64)>> {
    if let PatchPoint::Rim(k) = at {
        if let Some(ch) = crit.chains.iter().find(|c| c.rim.contains(&k)) {
            return Ok(chain_signs(patch, ch).into_iter().map(|(t, s)| (t, s as f64)).collect());
        }
    }
    let s = sign_assignment(patch)?;
    Ok((0..patch.m()).map(|i| (i, s.sign(i))).collect())
}

/// Builds the function for any patch vertex with explicit signs, without
/// checking criticality.
pub fn critical_function_with_signs(
    patch: &NodalPatch,
    at: PatchPoint,
    p: usize,
    signs: &[(usize, f64)],
) -> Result<CriticalFunction> {
    if p == 0 {
        return Err(Error::Domain("critical functions need p >= 1".into()));
    }
    let mut support = Vec::new();
    let mut poly = PiecewisePoly::zero(p - 1);
    for (t, local) in support_of(patch, at) {
        let sigma = signs
            .iter()
            .find(|s| s.0 == t)
            .map(|s| s.1)
            .ok_or_else(|| Error::Domain(format!("no sign for patch triangle {t}")))?;
        let area = patch.frame(t).area;
        poly.insert(t, jacobi_of_lambda(p - 1, 0.0, 2.0, local).scale(sigma / area));
        support.push(SupportPiece { triangle: t, sigma, local, area });
    }
    Ok(CriticalFunction { point: at.vertex(patch), location: at, p, support, poly })
}

/// `q_{p-1,z'}` for a critical point `z'` of the patch.
pub fn critical_function(patch: &NodalPatch, crit: &CriticalSet, z_prime: usize, p: usize) -> Result<CriticalFunction> {
    if !crit.points.contains(&z_prime) {
        return Err(Error::NotCritical(z_prime));
    }
    let at = PatchPoint::locate(patch, z_prime)?;
    critical_function_with_signs(patch, at, p, &default_signs(patch, crit, at)?)
}

impl CriticalFunction {
    /// Direct evaluation through the Jacobi recurrence at barycentric
    /// coordinates `l` of patch triangle `t`.
    pub fn eval_direct(&self, t: usize, l: [f64; 3]) -> f64 {
        self.support.iter().find(|s| s.triangle == t).map_or(0.0, |s| {
            s.sigma / s.area * eval_unchecked(self.p - 1, 0.0, 2.0, 1.0 - 2.0 * l[s.local])
        })
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.poly = out.poly.scale(-1.0);
        for s in &mut out.support {
            s.sigma = -s.sigma;
        }
        out
    }

    /// The same function on the parent mesh: pieces move to the global
    /// triangle indices and are re-expressed in the global vertex order.
    pub fn on_mesh(&self, mesh: &Triangulation, patch: &NodalPatch) -> PiecewisePoly {
        let m = patch.m();
        let mut out = PiecewisePoly::zero(self.poly.degree);
        for (&i, piece) in &self.poly.pieces {
            let g = patch.triangles[i];
            let locals = [patch.center, patch.rim[(i + m - 1) % m], patch.rim[i]];
            let perm = locals.map(|v| mesh.local_index(g, v).expect("patch triangle contains its vertices"));
            out.insert(g, piece.permute(perm));
        }
        out
    }
}

/// Result of comparing `(q_{z'}, div(B_E n_E))` with its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QkPairing {
    pub spoke: usize,
    pub quadrature: f64,
    pub closed_form: f64,
    /// The closed form presumes `z'` is critical.
    pub applicable: bool,
}

/// Unit normal of spoke `i` pointing into `triangles[i + 1]`.
pub fn spoke_normal(patch: &NodalPatch, i: usize) -> Point {
    let d = sub(patch.rim_points[i], patch.center_point);
    let l = norm(d);
    [-d[1] / l, d[0] / l]
}

/// `∫_{ω_z} q div(B_{E_i} n_i)` by quadrature of degree `quad_degree`,
/// with `B_{E_i}` the odd-order CR bubble on spoke `i`.
pub fn edge_bubble_pairing(patch: &NodalPatch, q: &PiecewisePoly, spoke: usize, p: usize, quad_degree: usize) -> Result<f64> {
    let sub = patch.submesh();
    let bubble = cr_edge_bubble(&sub, spoke, p)?;
    let n = spoke_normal(patch, spoke);
    let rule = triangle_quadrature(quad_degree)?;
    let mut total = 0.0;
    for (&t, b) in &bubble.pieces {
        let Some(qt) = q.piece(t) else { continue };
        let f = sub.frame(t);
        let db: HomPoly = b.directional(&f.grads, n);
        total += integrate_bary(&rule, f.area, |l| qt.eval(l) * db.eval(l));
    }
    Ok(total)
}

/// Pairs `q_{z'}` with the CR bubble of `spoke` (default: the spoke of a
/// rim point, spoke 0 for the center) and compares with
/// `2σ_K(-1)^{p-1}(cot a + cot a')/|E|`, where `K` is the triangle `n_E`
/// points out of and `a, a'` are the angles at the endpoint of `E` other
/// than `z'`.
pub fn verify_qk_pairing_with(q: &CriticalFunction, patch: &NodalPatch, spoke: usize, applicable: bool) -> Result<QkPairing> {
    let m = patch.m();
    let p = q.p;
    if spoke >= m {
        return Err(Error::OutOfRange { what: "spoke", index: spoke, len: m });
    }
    let quadrature = edge_bubble_pairing(patch, &q.poly, spoke, p, 2 * p + 2)?;
    let (a, b) = match q.location {
        PatchPoint::Center => patch.rim_angle_pairs()[spoke],
        PatchPoint::Rim(_) => (patch.frame(spoke).angles[0], patch.frame((spoke + 1) % m).angles[0]),
    };
    let sigma_k = q.support.iter().find(|s| s.triangle == spoke).map_or(0.0, |s| s.sigma);
    let len = norm(sub(patch.rim_points[spoke], patch.center_point));
    let parity = if p % 2 == 1 { 1.0 } else { -1.0 };
    let closed_form = 2.0 * sigma_k * parity * (1.0 / a.tan() + 1.0 / b.tan()) / len;
    Ok(QkPairing { spoke, quadrature, closed_form, applicable })
}

pub fn verify_qk_pairing(patch: &NodalPatch, crit: &CriticalSet, z_prime: usize, p: usize) -> Result<QkPairing> {
    let at = PatchPoint::locate(patch, z_prime)?;
    let applicable = crit.points.contains(&z_prime);
    let signs = match default_signs(patch, crit, at) {
        Ok(s) => s,
        // not critical and no global alternation: sign the two support triangles
        Err(_) => support_of(patch, at).iter().enumerate().map(|(k, &(t, _))| (t, if k == 0 { -1.0 } else { 1.0 })).collect(),
    };
    let q = critical_function_with_signs(patch, at, p, &signs)?;
    let spoke = match at {
        PatchPoint::Center => 0,
        PatchPoint::Rim(k) => k,
    };
    verify_qk_pairing_with(&q, patch, spoke, applicable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{detect_critical_points, generate_mesh, nodal_patch, MeshSpec};

    fn crisscross() -> (Triangulation, NodalPatch, CriticalSet) {
        let mesh = generate_mesh(&MeshSpec::Crisscross { side: 1.0 }).unwrap();
        let patch = nodal_patch(&mesh, 4).unwrap();
        let crit = detect_critical_points(&patch, 1e-9);
        (mesh, patch, crit)
    }

    #[test]
    fn centroid_value_on_first_triangle() {
        let (_, patch, crit) = crisscross();
        let q = critical_function(&patch, &crit, 4, 5).unwrap();
        let v = q.poly.eval_bary(0, [1.0 / 3.0; 3]);
        let expect = -4.0 * eval_unchecked(4, 0.0, 2.0, 1.0 - 2.0 / 3.0);
        assert!((v - expect).abs() < 1e-12 * expect.abs());
        assert_eq!(q.support.len(), 4);
    }

    #[test]
    fn two_evaluation_paths_agree() {
        let (_, patch, crit) = crisscross();
        for p in [3, 5, 7, 9] {
            let q = critical_function(&patch, &crit, 4, p).unwrap();
            for t in 0..4 {
                for k in 0..25 {
                    let a = ((k as f64) * 0.754877666).fract();
                    let b = ((k as f64) * 0.569840291).fract() * (1.0 - a);
                    let l = [a, b, 1.0 - a - b];
                    let (x, y) = (q.poly.eval_bary(t, l), q.eval_direct(t, l));
                    assert!((x - y).abs() < 1e-12 * y.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn non_critical_point_rejected() {
        let (_, patch, crit) = crisscross();
        assert!(matches!(critical_function(&patch, &crit, 0, 5), Err(Error::NotCritical(0))));
    }

    #[test]
    fn rim_support_is_two_triangles() {
        let mesh = generate_mesh(&MeshSpec::Chain { n: 2, seed: 3 }).unwrap();
        let patch = nodal_patch(&mesh, 0).unwrap();
        let crit = detect_critical_points(&patch, 1e-9);
        for &zp in &crit.points {
            let q = critical_function(&patch, &crit, zp, 5).unwrap();
            assert_eq!(q.poly.pieces.len(), 2);
            let off = (0..patch.m()).find(|t| !q.poly.pieces.contains_key(t)).unwrap();
            assert_eq!(q.poly.eval_bary(off, [0.2, 0.3, 0.5]), 0.0);
        }
    }

    #[test]
    fn on_mesh_matches_pointwise() {
        let (mesh, patch, crit) = crisscross();
        let q = critical_function(&patch, &crit, 4, 5).unwrap();
        let g = q.on_mesh(&mesh, &patch);
        let sub = patch.submesh();
        for x in [[0.5, 0.2], [0.8, 0.5], [0.45, 0.7], [0.2, 0.4]] {
            let a = g.eval_at(&mesh, x);
            let b = q.poly.eval_at(&sub, x);
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn crisscross_pairing_matches_closed_form() {
        let (_, patch, crit) = crisscross();
        let r = verify_qk_pairing(&patch, &crit, 4, 5).unwrap();
        assert!(r.applicable);
        let expect = -2.0 * 2.0 / (0.5f64.sqrt());
        assert!((r.closed_form - expect).abs() < 1e-12);
        assert!((r.quadrature - r.closed_form).abs() < 1e-10 * expect.abs());
        let q = critical_function(&patch, &crit, 4, 5).unwrap();
        let neg = verify_qk_pairing_with(&q.negated(), &patch, 0, true).unwrap();
        assert!((neg.quadrature + r.quadrature).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn perturbed_center_is_flagged_inapplicable() {
        let mut mesh = generate_mesh(&MeshSpec::Crisscross { side: 1.0 }).unwrap();
        mesh = mesh.map_vertices(|x| if x == [0.5, 0.5] { [0.55, 0.47] } else { x }).unwrap();
        let patch = nodal_patch(&mesh, 4).unwrap();
        let crit = detect_critical_points(&patch, 1e-9);
        let r = verify_qk_pairing(&patch, &crit, 4, 5).unwrap();
        assert!(!r.applicable);
        assert!((r.quadrature - r.closed_form).abs() > 1e-6);
    }
}
