use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytools::frame::{norm, signed_area2, sub, BarycentricFrame, Point};

/// Edge `(v[0] < v[1])` with one or two adjacent triangles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub v: [usize; 2],
    pub triangles: [Option<usize>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1].is_none()
    }

    pub fn other_triangle(&self, t: usize) -> Option<usize> {
        match self.triangles {
            [Some(a), b] if a == t => b,
            [Some(a), Some(b)] if b == t => Some(a),
            _ => None,
        }
    }
}

/// Validated, counterclockwise, regular triangulation with full adjacency.
///
/// Edges are numbered by lexicographic order of their sorted vertex pairs, so
/// the numbering depends only on connectivity and not on triangle order.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// `tri_edges[t][i]` is the edge opposite local vertex `i`.
    pub tri_edges: Vec<[usize; 3]>,
    pub boundary_vertex: Vec<bool>,
    pub boundary_edge: Vec<bool>,
    /// Triangles incident to each vertex, in increasing index order.
    pub vertex_triangles: Vec<Vec<usize>>,
    /// Non-fatal notes produced during validation (flipped triangles).
    pub warnings: Vec<String>,
}

impl Triangulation {
    /// Builds adjacency and validates. Clockwise triangles are flipped with a
    /// warning; everything else that violates regularity is an error.
    pub fn from_parts(vertices: Vec<Point>, mut triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        let mut warnings = Vec::new();
        for (t, tri) in triangles.iter_mut().enumerate() {
            for &v in tri.iter() {
                if v >= nv {
                    return Err(Error::OutOfRange { what: "vertex", index: v, len: nv });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::DegenerateTriangle { tri: t, area: 0.0 });
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            let h = [norm(sub(b, a)), norm(sub(c, b)), norm(sub(a, c))]
                .into_iter()
                .fold(0.0, f64::max);
            let area = 0.5 * signed_area2(a, b, c);
            if !(area.abs() > 1e-14 * h * h) {
                return Err(Error::DegenerateTriangle { tri: t, area });
            }
            if area < 0.0 {
                tri.swap(1, 2);
                let msg = format!("triangle {t} was clockwise; flipped");
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }

        check_duplicate_vertices(&vertices)?;

        let mut edge_map: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                edge_map.entry((a.min(b), a.max(b))).or_default().push((t, a < b));
            }
        }
        let mut edges = Vec::with_capacity(edge_map.len());
        let mut index = BTreeMap::new();
        for (&(a, b), adj) in &edge_map {
            if adj.len() > 2 {
                return Err(Error::Regularity(format!(
                    "edge ({a}, {b}) is shared by {} triangles",
                    adj.len()
                )));
            }
            if adj.len() == 2 && adj[0].1 == adj[1].1 {
                return Err(Error::Regularity(format!(
                    "triangles {} and {} overlap across edge ({a}, {b})",
                    adj[0].0, adj[1].0
                )));
            }
            index.insert((a, b), edges.len());
            edges.push(Edge { v: [a, b], triangles: [Some(adj[0].0), adj.get(1).map(|x| x.0)] });
        }
        let tri_edges: Vec<[usize; 3]> = triangles
            .iter()
            .map(|tri| {
                [0, 1, 2].map(|i| {
                    let a = tri[(i + 1) % 3];
                    let b = tri[(i + 2) % 3];
                    index[&(a.min(b), a.max(b))]
                })
            })
            .collect();

        let boundary_edge: Vec<bool> = edges.iter().map(Edge::is_boundary).collect();
        let mut boundary_vertex = vec![false; nv];
        let mut boundary_degree = vec![0usize; nv];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            for &v in &e.v {
                boundary_vertex[v] = true;
                boundary_degree[v] += 1;
            }
        }
        let mut vertex_triangles = vec![Vec::new(); nv];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_triangles[v].push(t);
            }
        }
        for (v, tris) in vertex_triangles.iter().enumerate() {
            if tris.is_empty() {
                return Err(Error::Regularity(format!("vertex {v} belongs to no triangle")));
            }
            if boundary_vertex[v] && boundary_degree[v] != 2 {
                return Err(Error::Regularity(format!(
                    "vertex {v} touches {} boundary edges (non-manifold)",
                    boundary_degree[v]
                )));
            }
        }

        let mesh = Self {
            vertices,
            triangles,
            edges,
            tri_edges,
            boundary_vertex,
            boundary_edge,
            vertex_triangles,
            warnings,
        };
        mesh.check_hanging_nodes()?;
        mesh.check_angle_sums()?;
        Ok(mesh)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_vertices()).filter(|&v| !self.boundary_vertex[v])
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_edges()).filter(|&e| !self.boundary_edge[e])
    }

    pub fn frame(&self, t: usize) -> BarycentricFrame {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        // orientation and area were validated at construction
        BarycentricFrame::new(a, b, c).expect("validated triangle")
    }

    pub fn local_index(&self, t: usize, v: usize) -> Option<usize> {
        self.triangles[t].iter().position(|&w| w == v)
    }

    /// `#V - #E + #T`.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_triangles() as i64
    }

    /// Euler check for meshes declared simply connected.
    pub fn check_simply_connected(&self) -> Result<()> {
        let chi = self.euler_characteristic();
        if chi != 1 {
            return Err(Error::Regularity(format!("Euler characteristic {chi}, expected 1")));
        }
        Ok(())
    }

    /// Applies `f` to every vertex and revalidates.
    pub fn map_vertices(&self, f: impl Fn(Point) -> Point) -> Result<Self> {
        Self::from_parts(self.vertices.iter().map(|&x| f(x)).collect(), self.triangles.clone())
    }

    fn check_hanging_nodes(&self) -> Result<()> {
        // a hanging node sits in the relative interior of a boundary edge
        for (e, edge) in self.edges.iter().enumerate().filter(|(_, e)| e.is_boundary()) {
            let [a, b] = edge.v.map(|v| self.vertices[v]);
            let d = sub(b, a);
            let len2 = d[0] * d[0] + d[1] * d[1];
            for (v, &x) in self.vertices.iter().enumerate() {
                if !self.boundary_vertex[v] || edge.v.contains(&v) {
                    continue;
                }
                let w = sub(x, a);
                let s = (w[0] * d[0] + w[1] * d[1]) / len2;
                if s > 0.0 && s < 1.0 && signed_area2(a, b, x).abs() <= 1e-12 * len2 {
                    return Err(Error::Regularity(format!("hanging node {v} on edge {e}")));
                }
            }
        }
        Ok(())
    }

    fn check_angle_sums(&self) -> Result<()> {
        for v in self.interior_vertices() {
            let s: f64 = self.vertex_triangles[v]
                .iter()
                .map(|&t| self.frame(t).angles[self.local_index(t, v).unwrap()])
                .sum();
            if (s - 2.0 * PI).abs() > 1e-8 {
                return Err(Error::Regularity(format!(
                    "angles around interior vertex {v} sum to {s}, not 2π (overlap)"
                )));
            }
        }
        Ok(())
    }
}

fn check_duplicate_vertices(vertices: &[Point]) -> Result<()> {
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&i, &j| vertices[i].partial_cmp(&vertices[j]).unwrap());
    for w in order.windows(2) {
        if vertices[w[0]] == vertices[w[1]] {
            return Err(Error::Regularity(format!(
                "vertices {} and {} coincide",
                w[0].min(w[1]),
                w[0].max(w[1])
            )));
        }
    }
    Ok(())
}
