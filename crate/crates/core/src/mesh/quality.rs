use serde::Serialize;

use super::triangulation::Triangulation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshQuality {
    /// `max_K h_K / ρ_K` with `ρ_K` the inscribed-circle diameter.
    pub gamma: f64,
    /// Number of triangles with no interior vertex.
    pub d_t: usize,
    pub h_max: f64,
}

pub fn mesh_quality(mesh: &Triangulation) -> MeshQuality {
    let mut gamma: f64 = 0.0;
    let mut h_max: f64 = 0.0;
    let mut d_t = 0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let f = mesh.frame(t);
        gamma = gamma.max(f.diameter() / f.inscribed_diameter());
        h_max = h_max.max(f.diameter());
        if tri.iter().all(|&v| mesh.boundary_vertex[v]) {
            d_t += 1;
        }
    }
    MeshQuality { gamma, d_t, h_max }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilateral() {
        let s = 2.0;
        let m = Triangulation::from_parts(
            vec![[0.0, 0.0], [s, 0.0], [s / 2.0, s * 3f64.sqrt() / 2.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let q = mesh_quality(&m);
        // inradius s/(2√3), so h/ρ = s / (s/√3)
        assert!((q.gamma - 3f64.sqrt()).abs() < 1e-13);
        assert_eq!(q.d_t, 1);
        assert!(q.gamma >= 2.0 / 3f64.sqrt());
    }

    #[test]
    fn right_reference_triangle() {
        let m = Triangulation::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]])
            .unwrap();
        let r = (2.0 - 2f64.sqrt()) / 2.0;
        let q = mesh_quality(&m);
        assert!((q.gamma - 2f64.sqrt() / (2.0 * r)).abs() < 1e-13);
        assert!((q.gamma - 2.414213562373095).abs() < 1e-12);
        assert!((q.h_max - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn crisscross_has_no_detached_triangles() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let t = vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
        let q = mesh_quality(&Triangulation::from_parts(v, t).unwrap());
        assert_eq!(q.d_t, 0);
    }
}
