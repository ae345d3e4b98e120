//! Crouzeix–Raviart bubbles and the zero-trace CR basis of order `p`.
//!
//! Odd `p`: Lagrange functions at interior non-vertex nodes plus one edge
//! bubble per interior edge. Even `p`: Lagrange functions at all interior
//! nodes plus one bubble per triangle.

use rayon::prelude::*;
use serde::Serialize;

use super::lagrange::{lagrange_basis, lagrange_nodes, LagrangeNodes, NodeClass};
use super::piecewise::PiecewisePoly;
use super::poly::{jacobi_of_lambda, HomPoly};
use crate::error::{Error, Result};
use crate::mesh::Triangulation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrTag {
    LagrangeNode(usize),
    TriangleBubble(usize),
    EdgeBubble(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrEntry {
    pub tag: CrTag,
    pub poly: PiecewisePoly,
}

#[derive(Debug, Clone)]
pub struct CrBasis {
    pub p: usize,
    pub entries: Vec<CrEntry>,
    pub nodes: LagrangeNodes,
}

impl CrBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `½(-1 + Σ_i P_p(1 - 2λ_i))` on a single triangle, `p` even.
pub fn cr_triangle_bubble_local(p: usize) -> Result<HomPoly> {
    if p % 2 == 1 || p == 0 {
        return Err(Error::Parity { p, msg: "triangle bubbles need even p >= 2" });
    }
    let mut b = HomPoly::one(p).scale(-1.0);
    for i in 0..3 {
        b = &b + &jacobi_of_lambda(p, 0.0, 0.0, i);
    }
    Ok(b.scale(0.5))
}

pub fn cr_triangle_bubble(t: usize, p: usize) -> Result<PiecewisePoly> {
    Ok(PiecewisePoly::single(t, cr_triangle_bubble_local(p)?))
}

/// `P_p(1 - 2λ_{K,A})` on each triangle `K` adjacent to the edge, with `A`
/// the vertex of `K` opposite the edge; `p` odd. A boundary edge yields a
/// one-triangle function.
pub fn cr_edge_bubble(mesh: &Triangulation, e: usize, p: usize) -> Result<PiecewisePoly> {
    if p.is_multiple_of(2) {
        return Err(Error::Parity { p, msg: "edge bubbles need odd p" });
    }
    let edge = mesh.edges.get(e).ok_or(Error::OutOfRange { what: "edge", index: e, len: mesh.n_edges() })?;
    let mut out = PiecewisePoly::zero(p);
    for t in edge.triangles.iter().flatten().cloned() {
        let opp = (0..3).find(|&i| mesh.tri_edges[t][i] == e).unwrap();
        out.insert(t, jacobi_of_lambda(p, 0.0, 0.0, opp));
    }
    Ok(out)
}

pub fn cr_basis(mesh: &Triangulation, p: usize) -> Result<CrBasis> {
    if p == 0 {
        return Err(Error::Domain("CR basis needs p >= 1".into()));
    }
    let nodes = lagrange_nodes(mesh, p);
    let odd = p % 2 == 1;
    let mut tags: Vec<CrTag> = nodes
        .interior()
        .filter(|&i| !odd || nodes.nodes[i].class == NodeClass::Interior)
        .map(CrTag::LagrangeNode)
        .collect();
    if odd {
        tags.extend(mesh.interior_edges().map(CrTag::EdgeBubble));
    } else {
        tags.extend((0..mesh.n_triangles()).map(CrTag::TriangleBubble));
    }
    let entries = tags
        .par_iter()
        .map(|&tag| {
            let poly = match tag {
                CrTag::LagrangeNode(id) => lagrange_basis(mesh, &nodes, id)?,
                CrTag::TriangleBubble(t) => cr_triangle_bubble(t, p)?,
                CrTag::EdgeBubble(e) => cr_edge_bubble(mesh, e, p)?,
            };
            Ok(CrEntry { tag, poly })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CrBasis { p, entries, nodes })
}

/// Basis of the conforming space `S_{p,0}`: Lagrange functions at every
/// interior node.
pub fn conforming_basis(mesh: &Triangulation, p: usize) -> Result<CrBasis> {
    if p == 0 {
        return Err(Error::Domain("conforming space needs p >= 1".into()));
    }
    let nodes = lagrange_nodes(mesh, p);
    let ids: Vec<usize> = nodes.interior().collect();
    let entries = ids
        .par_iter()
        .map(|&id| Ok(CrEntry { tag: CrTag::LagrangeNode(id), poly: lagrange_basis(mesh, &nodes, id)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrBasis { p, entries, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytools::jacobi::eval_unchecked;

    fn crisscross() -> Triangulation {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let t = vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
        Triangulation::from_parts(v, t).unwrap()
    }

    fn reference() -> Triangulation {
        Triangulation::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn triangle_bubble_forms_agree() {
        for p in [2, 4, 6] {
            let b = cr_triangle_bubble_local(p).unwrap();
            for k in 0..50 {
                let a = ((k as f64) * 0.754877666).fract();
                let c = ((k as f64) * 0.569840291).fract() * (1.0 - a);
                let l = [a, c, 1.0 - a - c];
                let direct = 0.5
                    * (-1.0 + (0..3).map(|i| eval_unchecked(p, 0.0, 0.0, 1.0 - 2.0 * l[i])).sum::<f64>());
                assert!((b.eval(l) - direct).abs() < 1e-12);
            }
            for j in 0..3 {
                let mut l = [0.0; 3];
                l[j] = 1.0;
                assert!((b.eval(l) - 1.0).abs() < 1e-13);
            }
        }
        assert!(matches!(cr_triangle_bubble_local(3), Err(Error::Parity { .. })));
    }

    #[test]
    fn edge_bubble_values() {
        let m = crisscross();
        for p in [1, 3, 5, 7] {
            for e in m.interior_edges() {
                let b = cr_edge_bubble(&m, e, p).unwrap();
                assert_eq!(b.pieces.len(), 2);
                let [a, c] = m.edges[e].v.map(|v| m.vertices[v]);
                for s in [0.0, 0.13, 0.5, 0.91, 1.0] {
                    let x = [a[0] + s * (c[0] - a[0]), a[1] + s * (c[1] - a[1])];
                    for &t in b.pieces.keys() {
                        let l = m.frame(t).barycentric(x);
                        assert!((b.eval_bary(t, l) - 1.0).abs() < 1e-12);
                    }
                }
                for &t in b.pieces.keys() {
                    let opp = (0..3).find(|&i| m.tri_edges[t][i] == e).unwrap();
                    let mut l = [0.0; 3];
                    l[opp] = 1.0;
                    assert!((b.eval_bary(t, l) + 1.0).abs() < 1e-12);
                }
            }
        }
        assert!(cr_edge_bubble(&m, 0, 4).is_err());
    }

    #[test]
    fn basis_dimensions() {
        let m = crisscross();
        assert_eq!(cr_basis(&m, 1).unwrap().len(), 4);
        // interior order-5 nodes: 4 spokes x 4 + 4 triangles x 6 + center
        let n5 = 4 * 4 + 4 * 6 + 1;
        assert_eq!(cr_basis(&m, 5).unwrap().len(), (n5 - 1) + 4);
        assert_eq!(cr_basis(&reference(), 2).unwrap().len(), 1);
        assert_eq!(conforming_basis(&m, 5).unwrap().len(), n5);
    }
}
