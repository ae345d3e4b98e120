//! Nodal patches around interior vertices and their critical points.
//!
//! Storage convention (0-based, cyclic in `m`): `rim[i]` is the far end of
//! spoke `spokes[i]`, and `triangles[i] = (z, rim[i-1], rim[i])` in
//! counterclockwise order. Consecutive triangles `triangles[i]` and
//! `triangles[i+1]` share `spokes[i]`. The first spoke is the one with the
//! smallest global edge index.

use std::f64::consts::PI;

use serde::Serialize;

use super::triangulation::Triangulation;
use crate::error::{Error, Result};
use crate::polytools::frame::{sub, BarycentricFrame, Point};

pub const DEFAULT_EPS_ANGLE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalPatch {
    pub center: usize,
    pub center_point: Point,
    pub triangles: Vec<usize>,
    pub spokes: Vec<usize>,
    pub rim: Vec<usize>,
    pub rim_points: Vec<Point>,
    pub is_interior: bool,
}

pub fn nodal_patch(mesh: &Triangulation, z: usize) -> Result<NodalPatch> {
    if z >= mesh.n_vertices() {
        return Err(Error::OutOfRange { what: "vertex", index: z, len: mesh.n_vertices() });
    }
    if mesh.boundary_vertex[z] {
        return Err(Error::BoundaryVertex(z));
    }
    let star = &mesh.vertex_triangles[z];
    let m = star.len();
    let start = star
        .iter()
        .flat_map(|&t| mesh.tri_edges[t])
        .filter(|&e| mesh.edges[e].v.contains(&z))
        .min()
        .expect("interior vertex has spokes");
    let other = |e: usize| {
        let [a, b] = mesh.edges[e].v;
        if a == z {
            b
        } else {
            a
        }
    };
    // successor / predecessor of z inside a counterclockwise triangle
    let neighbours = |t: usize| {
        let i = mesh.local_index(t, z).unwrap();
        let tri = mesh.triangles[t];
        (tri[(i + 1) % 3], tri[(i + 2) % 3])
    };

    let mut rim = vec![other(start)];
    let mut triangles = vec![usize::MAX; m];
    let mut cur = rim[0];
    for k in 1..=m {
        let t = *star
            .iter()
            .find(|&&t| neighbours(t).0 == cur)
            .ok_or_else(|| Error::Regularity(format!("patch of vertex {z} is not a closed fan")))?;
        triangles[k % m] = t;
        cur = neighbours(t).1;
        if k < m {
            rim.push(cur);
        }
    }
    if cur != rim[0] {
        return Err(Error::Regularity(format!("patch of vertex {z} does not close up")));
    }
    let spokes = rim
        .iter()
        .map(|&r| {
            let key = [z.min(r), z.max(r)];
            mesh.edges.iter().position(|e| e.v == key).unwrap()
        })
        .collect();
    Ok(NodalPatch {
        center: z,
        center_point: mesh.vertices[z],
        triangles,
        spokes,
        rim_points: rim.iter().map(|&r| mesh.vertices[r]).collect(),
        rim,
        is_interior: true,
    })
}

impl NodalPatch {
    pub fn m(&self) -> usize {
        self.rim.len()
    }

    fn rim_point(&self, i: isize) -> Point {
        let m = self.m() as isize;
        self.rim_points[i.rem_euclid(m) as usize]
    }

    /// Frame of `triangles[i]` with local vertices `(z, rim[i-1], rim[i])`.
    pub fn frame(&self, i: usize) -> BarycentricFrame {
        let i = i as isize;
        BarycentricFrame::new(self.center_point, self.rim_point(i - 1), self.rim_point(i))
            .expect("patch triangles are validated")
    }

    pub fn frames(&self) -> Vec<BarycentricFrame> {
        (0..self.m()).map(|i| self.frame(i)).collect()
    }

    /// Angle at `z` in each patch triangle.
    pub fn center_angles(&self) -> Vec<f64> {
        self.frames().iter().map(|f| f.angles[0]).collect()
    }

    /// For each rim vertex, the two angles it has in the triangles sharing
    /// its spoke: `(angle in triangles[i], angle in triangles[i+1])`.
    pub fn rim_angle_pairs(&self) -> Vec<(f64, f64)> {
        let f = self.frames();
        let m = self.m();
        (0..m).map(|i| (f[i].angles[2], f[(i + 1) % m].angles[1])).collect()
    }

    /// Patch as a standalone mesh: local vertex 0 is `z`, local vertex
    /// `i + 1` is `rim[i]`; spoke `i` becomes edge `i`, triangle `i` stays `i`.
    pub fn submesh(&self) -> Triangulation {
        let m = self.m();
        let mut vertices = vec![self.center_point];
        vertices.extend(&self.rim_points);
        let triangles = (0..m).map(|i| [0, (i + m - 1) % m + 1, i + 1]).collect();
        Triangulation::from_parts(vertices, triangles).expect("patch of a valid mesh is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalKind {
    InteriorCrisscross,
    BoundaryOfPatchCollinear,
}

/// Maximal run of consecutive critical rim vertices (rim indices, ccw) with
/// the non-critical rim vertices that flank it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub rim: Vec<usize>,
    pub before: usize,
    pub after: usize,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.rim.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rim.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalSet {
    /// Global vertex indices; the center first when it is critical, then
    /// rim vertices in patch order.
    pub points: Vec<usize>,
    pub kinds: Vec<CriticalKind>,
    pub sigma_z: usize,
    pub center_critical: bool,
    pub rim_critical: Vec<bool>,
    /// `|angle pair sum - π|` per rim vertex.
    pub rim_defects: Vec<f64>,
    /// For `m = 4`: straightness defects of the two spoke pairs.
    pub center_defects: Option<[f64; 2]>,
    pub chains: Vec<Chain>,
    /// Vertices where the general two-lines test disagrees with the
    /// angle rule. Empty on every valid mesh; reported, never classified.
    pub two_lines_disagreements: Vec<usize>,
}

/// Number of distinct directions modulo π among `dirs`, up to `eps`.
fn line_count(dirs: &[Point], eps: f64) -> usize {
    let mut a: Vec<f64> = dirs.iter().map(|d| d[1].atan2(d[0]).rem_euclid(PI)).collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut count = 0;
    for (k, &x) in a.iter().enumerate() {
        if k == 0 || x - a[k - 1] > eps {
            count += 1;
        }
    }
    if count > 1 && a[0] + PI - a[a.len() - 1] <= eps {
        count -= 1;
    }
    count
}

pub fn detect_critical_points(patch: &NodalPatch, eps_angle: f64) -> CriticalSet {
    let m = patch.m();
    let theta = patch.center_angles();
    let center_defects = (m == 4).then(|| {
        [(theta[0] + theta[1] - PI).abs(), (theta[1] + theta[2] - PI).abs()]
    });
    let center_critical = center_defects.is_some_and(|d| d[0] <= eps_angle && d[1] <= eps_angle);
    let rim_defects: Vec<f64> = patch.rim_angle_pairs().iter().map(|(a, b)| (a + b - PI).abs()).collect();
    let rim_critical: Vec<bool> = rim_defects.iter().map(|&d| d <= eps_angle).collect();

    let mut points = Vec::new();
    let mut kinds = Vec::new();
    if center_critical {
        points.push(patch.center);
        kinds.push(CriticalKind::InteriorCrisscross);
    }
    for i in (0..m).filter(|&i| rim_critical[i]) {
        points.push(patch.rim[i]);
        kinds.push(CriticalKind::BoundaryOfPatchCollinear);
    }

    let mut disagreements = Vec::new();
    let spokes: Vec<Point> = patch.rim_points.iter().map(|&r| sub(r, patch.center_point)).collect();
    if (line_count(&spokes, eps_angle) <= 2) != center_critical {
        disagreements.push(patch.center);
    }
    for i in 0..m {
        let x = patch.rim_points[i];
        let dirs = [
            sub(patch.center_point, x),
            sub(patch.rim_points[(i + m - 1) % m], x),
            sub(patch.rim_points[(i + 1) % m], x),
        ];
        if (line_count(&dirs, eps_angle) <= 2) != rim_critical[i] {
            disagreements.push(patch.rim[i]);
        }
    }
    if !disagreements.is_empty() {
        log::warn!("two-lines criticality test disagrees at vertices {disagreements:?}");
    }

    CriticalSet {
        sigma_z: points.len(),
        points,
        kinds,
        center_critical,
        chains: chains(&rim_critical),
        rim_critical,
        rim_defects,
        center_defects,
        two_lines_disagreements: disagreements,
    }
}

fn chains(critical: &[bool]) -> Vec<Chain> {
    let m = critical.len();
    let Some(start) = (0..m).find(|&i| !critical[i]) else {
        // a closed polygon cannot have all interior angles equal to π
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut run: Vec<usize> = Vec::new();
    for k in 1..=m {
        let i = (start + k) % m;
        if critical[i] {
            run.push(i);
        } else if !run.is_empty() {
            let before = (run[0] + m - 1) % m;
            out.push(Chain { rim: std::mem::take(&mut run), before, after: i });
        }
    }
    out.sort_by_key(|c| c.rim[0]);
    out
}
