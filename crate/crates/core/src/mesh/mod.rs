//! Triangulations: ingestion, validation, quality, nodal patches and
//! critical-point detection.

pub mod generate;
pub mod io;
pub mod patch;
pub mod quality;
pub mod triangulation;

pub use generate::{generate_mesh, MeshSpec};
pub use io::{load_mesh, mesh_to_string, parse_mesh, save_mesh, MeshFormat};
pub use patch::{
    detect_critical_points, nodal_patch, Chain, CriticalKind, CriticalSet, NodalPatch,
    DEFAULT_EPS_ANGLE,
};
pub use quality::{mesh_quality, MeshQuality};
pub use triangulation::{Edge, Triangulation};
