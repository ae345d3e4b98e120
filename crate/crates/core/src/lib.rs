pub mod basis;
pub mod error;
pub mod kernel;
pub mod mesh;
pub mod polytools;
pub mod report;
pub mod stokes;
pub mod verify;

pub use error::{Error, Result};
