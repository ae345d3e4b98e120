use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("triangle {tri} is degenerate (area {area:e})")]
    DegenerateTriangle { tri: usize, area: f64 },

    #[error("mesh is not regular: {0}")]
    Regularity(String),

    #[error("vertex {0} lies on the boundary; a nodal patch needs an interior vertex")]
    BoundaryVertex(usize),

    #[error("index {index} out of range ({what}, len {len})")]
    OutOfRange { what: &'static str, index: usize, len: usize },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("order p = {p} has the wrong parity: {msg}")]
    Parity { p: usize, msg: &'static str },

    #[error("unsupported quadrature degree {0} (supported: 0..=40)")]
    UnsupportedDegree(usize),

    #[error("unknown Lagrange node {0}")]
    UnknownNode(usize),

    #[error("piecewise polynomials have mismatched support or degree")]
    MismatchedSupport,

    #[error("closed patch with {0} triangles admits no alternating sign assignment")]
    OddCycle(usize),

    #[error("vertex {0} is not a critical point of the patch")]
    NotCritical(usize),

    #[error("patch has no chain of critical rim points")]
    NoChain,

    #[error("velocity stiffness matrix is singular (discrete Friedrichs inequality fails)")]
    SingularStiffness,

    #[error("pressure mass matrix is not positive definite")]
    SingularMass,

    #[error("saddle-point system is singular: {0}")]
    SingularSystem(String),

    #[error("invalid generator spec: {0}")]
    GeneratorSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
