use super::piecewise::PiecewisePoly;
use crate::error::{Error, Result};
use crate::mesh::Triangulation;
use crate::polytools::jacobi::eval_unchecked;
use crate::polytools::quadrature::gauss_legendre;

/// Value of `v` restricted to triangle `t` at the point of edge `e` with
/// parameter `s ∈ [0, 1]` measured from the lower-index endpoint.
fn trace(mesh: &Triangulation, v: &PiecewisePoly, t: usize, e: usize, s: f64) -> f64 {
    let Some(poly) = v.piece(t) else { return 0.0 };
    let [lo, hi] = mesh.edges[e].v;
    let tri = mesh.triangles[t];
    let mut l = [0.0; 3];
    l[tri.iter().position(|&w| w == lo).unwrap()] = 1.0 - s;
    l[tri.iter().position(|&w| w == hi).unwrap()] = s;
    poly.eval(l)
}

/// `∫_E [v]_E L_j` for the Legendre polynomials `L_j`, `j = 0..=q_degree`,
/// in the edge parameter running from the lower-index endpoint. The jump is
/// taken as (first adjacent triangle) − (second); on a boundary edge it is the
/// trace.
pub fn jump_moment(mesh: &Triangulation, e: usize, v: &PiecewisePoly, q_degree: usize) -> Result<Vec<f64>> {
    let edge = mesh.edges.get(e).ok_or(Error::OutOfRange { what: "edge", index: e, len: mesh.n_edges() })?;
    let [lo, hi] = edge.v.map(|w| mesh.vertices[w]);
    let len = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    let (x, w) = gauss_legendre((v.degree + q_degree) / 2 + 1);
    let mut out = vec![0.0; q_degree + 1];
    for (&xi, &wi) in x.iter().zip(&w) {
        let s = 0.5 * (1.0 + xi);
        let mut jump = 0.0;
        if let Some(t) = edge.triangles[0] {
            jump += trace(mesh, v, t, e, s);
        }
        if let Some(t) = edge.triangles[1] {
            jump -= trace(mesh, v, t, e, s);
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o += 0.5 * len * wi * jump * eval_unchecked(j, 0.0, 0.0, xi);
        }
    }
    Ok(out)
}
