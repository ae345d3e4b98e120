//! Order-`p` Lagrange nodes and nodal basis functions.
//!
//! Nodes are identified topologically (mesh vertex, position along a mesh
//! edge, or interior multi-index of a triangle) rather than by coordinates,
//! so nodes shared between triangles are merged exactly.

use std::collections::BTreeMap;

use serde::Serialize;

use super::piecewise::PiecewisePoly;
use super::poly::{HomPoly, MultiIndex3};
use crate::error::{Error, Result};
use crate::mesh::Triangulation;
use crate::polytools::frame::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NodeKey {
    Vertex(usize),
    /// `k` steps (of `1/p`) from the lower-index endpoint of `edge`.
    Edge { edge: usize, k: usize },
    Cell { tri: usize, mu: MultiIndex3 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    /// A mesh vertex (interior or boundary, see `on_boundary`).
    Vertex,
    /// Non-vertex node on `∂Ω`.
    Boundary,
    /// Non-vertex node in `Ω`.
    Interior,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagrangeNode {
    pub key: NodeKey,
    pub point: Point,
    pub class: NodeClass,
    pub on_boundary: bool,
}

#[derive(Debug, Clone)]
pub struct LagrangeNodes {
    pub p: usize,
    pub nodes: Vec<LagrangeNode>,
    index: BTreeMap<NodeKey, usize>,
}

impl LagrangeNodes {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn id(&self, key: &NodeKey) -> Option<usize> {
        self.index.get(key).cloned()
    }

    /// Interior nodes `N_{p,Ω}`.
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.nodes[i].on_boundary)
    }
}

/// Global key of the node with local multi-index `mu` (`|mu| = p`) in `t`.
pub fn node_key(mesh: &Triangulation, t: usize, mu: MultiIndex3) -> NodeKey {
    let tri = mesh.triangles[t];
    let nz: Vec<usize> = (0..3).filter(|&i| mu.0[i] > 0).collect();
    match nz.len() {
        0 => NodeKey::Cell { tri: t, mu },
        1 => NodeKey::Vertex(tri[nz[0]]),
        2 => {
            let edge = mesh.tri_edges[t][3 - nz[0] - nz[1]];
            let upper = mesh.edges[edge].v[1];
            let at_upper = nz.iter().find(|&&i| tri[i] == upper).unwrap();
            NodeKey::Edge { edge, k: mu.0[*at_upper] }
        }
        _ => NodeKey::Cell { tri: t, mu },
    }
}

/// Local multi-index of a node in triangle `t`, if the node lies in `t`.
pub fn local_multi_index(mesh: &Triangulation, p: usize, t: usize, key: &NodeKey) -> Option<MultiIndex3> {
    let tri = mesh.triangles[t];
    match *key {
        NodeKey::Vertex(v) => {
            let i = tri.iter().position(|&w| w == v)?;
            let mut mu = [0; 3];
            mu[i] = p;
            Some(MultiIndex3(mu))
        }
        NodeKey::Edge { edge, k } => {
            let [lo, hi] = mesh.edges[edge].v;
            let i = tri.iter().position(|&w| w == lo)?;
            let j = tri.iter().position(|&w| w == hi)?;
            let mut mu = [0; 3];
            mu[i] = p - k;
            mu[j] = k;
            Some(MultiIndex3(mu))
        }
        NodeKey::Cell { tri: c, mu } => (c == t).then_some(mu),
    }
}

pub fn lagrange_nodes(mesh: &Triangulation, p: usize) -> LagrangeNodes {
    let mut found: BTreeMap<NodeKey, Point> = BTreeMap::new();
    for t in 0..mesh.n_triangles() {
        let f = mesh.frame(t);
        if p == 0 {
            found.insert(NodeKey::Cell { tri: t, mu: MultiIndex3([0; 3]) }, f.point([1.0 / 3.0; 3]));
            continue;
        }
        for mu in MultiIndex3::all_of_degree(p) {
            let key = node_key(mesh, t, mu);
            found.entry(key).or_insert_with(|| f.point(mu.0.map(|m| m as f64 / p as f64)));
        }
    }
    let mut nodes = Vec::with_capacity(found.len());
    let mut index = BTreeMap::new();
    for (key, point) in found {
        let (class, on_boundary) = match key {
            NodeKey::Vertex(v) => (NodeClass::Vertex, mesh.boundary_vertex[v]),
            NodeKey::Edge { edge, .. } if mesh.boundary_edge[edge] => (NodeClass::Boundary, true),
            _ => (NodeClass::Interior, false),
        };
        index.insert(key, nodes.len());
        nodes.push(LagrangeNode { key, point, class, on_boundary });
    }
    LagrangeNodes { p, nodes, index }
}

/// Nodal function of the reference node `mu` (`|mu| = p`):
/// `Π_i Π_{k < μ_i} (p λ_i - k S) / (k + 1)`.
pub fn lagrange_local(p: usize, mu: MultiIndex3) -> HomPoly {
    let mut f = HomPoly::one(0);
    for i in 0..3 {
        for k in 0..mu.0[i] {
            let mut a = [-(k as f64); 3];
            a[i] += p as f64;
            f = &f * &HomPoly::linear(a).scale(1.0 / (k + 1) as f64);
        }
    }
    f
}

pub fn lagrange_basis(mesh: &Triangulation, nodes: &LagrangeNodes, id: usize) -> Result<PiecewisePoly> {
    let node = nodes.nodes.get(id).ok_or(Error::UnknownNode(id))?;
    let p = nodes.p;
    let candidates: Vec<usize> = match node.key {
        NodeKey::Vertex(v) => mesh.vertex_triangles[v].clone(),
        NodeKey::Edge { edge, .. } => mesh.edges[edge].triangles.iter().flatten().cloned().collect(),
        NodeKey::Cell { tri, .. } => vec![tri],
    };
    let mut out = PiecewisePoly::zero(p);
    for t in candidates {
        if p == 0 {
            out.insert(t, HomPoly::one(0));
        } else if let Some(mu) = local_multi_index(mesh, p, t, &node.key) {
            out.insert(t, lagrange_local(p, mu));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crisscross() -> Triangulation {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let t = vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
        Triangulation::from_parts(v, t).unwrap()
    }

    fn reference() -> Triangulation {
        Triangulation::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn node_counts() {
        let r = reference();
        assert_eq!(lagrange_nodes(&r, 1).len(), 3);
        let n3 = lagrange_nodes(&r, 3);
        assert_eq!(n3.len(), 10);
        assert_eq!(n3.nodes.iter().filter(|n| n.class == NodeClass::Interior).count(), 1);
        assert_eq!(lagrange_nodes(&crisscross(), 2).len(), 13);
        assert_eq!(lagrange_nodes(&r, 0).len(), 1);
    }

    #[test]
    fn shared_nodes_coincide_geometrically() {
        let m = crisscross();
        let nodes = lagrange_nodes(&m, 5);
        for t in 0..m.n_triangles() {
            let f = m.frame(t);
            for mu in MultiIndex3::all_of_degree(5) {
                let id = nodes.id(&node_key(&m, t, mu)).unwrap();
                let x = f.point(mu.0.map(|k| k as f64 / 5.0));
                let y = nodes.nodes[id].point;
                assert!((x[0] - y[0]).abs() < 1e-14 && (x[1] - y[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kronecker_property() {
        let m = crisscross();
        for p in 1..=5 {
            let nodes = lagrange_nodes(&m, p);
            for id in 0..nodes.len() {
                let b = lagrange_basis(&m, &nodes, id).unwrap();
                for (j, n) in nodes.nodes.iter().enumerate() {
                    let expect = if j == id { 1.0 } else { 0.0 };
                    assert!((b.eval_at(&m, n.point) - expect).abs() < 1e-12, "p={p} {id} at {j}");
                }
            }
        }
    }

    #[test]
    fn quadratic_midpoint_function() {
        let r = reference();
        let nodes = lagrange_nodes(&r, 2);
        let id = nodes.id(&node_key(&r, 0, MultiIndex3([1, 1, 0]))).unwrap();
        let b = lagrange_basis(&r, &nodes, id).unwrap();
        let expect = &HomPoly::lambda(0) * &HomPoly::lambda(1);
        for (x, y) in b.pieces[&0].coeffs.iter().zip(&expect.scale(4.0).coeffs) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(lagrange_basis(&r, &nodes, 99).is_err());
    }

    #[test]
    fn hat_function() {
        let m = crisscross();
        let nodes = lagrange_nodes(&m, 1);
        let b = lagrange_basis(&m, &nodes, nodes.id(&NodeKey::Vertex(4)).unwrap()).unwrap();
        assert_eq!(b.pieces.len(), 4);
        assert!((b.eval_at(&m, [0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!(b.eval_at(&m, [1.0, 1.0]).abs() < 1e-15);
    }
}
