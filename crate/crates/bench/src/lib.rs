//! Fixtures shared by the benchmarks.

use crlab_core::mesh::{generate_mesh, nodal_patch, MeshSpec, NodalPatch, Triangulation};

/// Meshes the benchmarks run on, by generator spec.
pub const MESHES: [&str; 3] = ["crisscross:s=1", "chain:n=2,seed=7", "grid:n=4,amp=0.1,seed=0"];

pub fn mesh(spec: &str) -> Triangulation {
    let spec: MeshSpec = spec.parse().expect("bad generator spec");
    generate_mesh(&spec).expect("generator failed")
}

/// Patch of the first interior vertex.
pub fn patch(spec: &str) -> NodalPatch {
    let m = mesh(spec);
    let z = m.interior_vertices().next().expect("mesh has no interior vertex");
    nodal_patch(&m, z).expect("patch construction failed")
}
