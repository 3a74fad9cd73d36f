use thiserror::Error;

/// Errors raised by the geometry kernels.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambient dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("normal vector is zero")]
    ZeroNormal,

    #[error("point at infinity: the first {0} homogeneous coordinates vanish")]
    PointAtInfinity(usize),

    #[error("angle {theta} outside the admissible range (|theta| < {bound})")]
    AngleOutOfRange { theta: f64, bound: f64 },

    #[error("argument {0} outside [-1, 1]")]
    ArccosDomain(f64),

    #[error("antipodal normals (n0 . n1 = {dot})")]
    AntipodalNormals { dot: f64 },

    #[error("antipodal normals at parameter {u:?} (theta = {theta})")]
    AntipodalAt { u: Vec<f64>, theta: f64 },

    #[error("plane through infinity: interpolated angle {0} reaches +-pi/2")]
    PlaneThroughInfinity(f64),

    #[error("invalid Poincare element: {0}")]
    InvalidPoincare(String),

    #[error("frame is not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),

    #[error("frame vector {index} is not in the hyperplane (|e . n| = {defect:e})")]
    NotInPlane { index: usize, defect: f64 },

    #[error("section leaves the hyperplanes at sample {index} (|e . n| = {defect:e})")]
    SectionNotInPlane { index: usize, defect: f64 },

    #[error("orientation mismatch between frames (det = {0})")]
    OrientationMismatch(f64),

    #[error("ambiguous twist direction: rotation angle {0} is too close to pi")]
    AmbiguousTwist(f64),

    #[error("Frenet frame undefined: curvature {kappa:e} at s = {s}")]
    FrenetUndefined { s: f64, kappa: f64 },

    #[error("not enough samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("envelope point undefined at {u:?} (normalized det {det:e})")]
    EnvelopeUndefined { u: Vec<f64>, det: f64 },

    #[error("surface is not immersed at {0:?}")]
    NotImmersed(Vec<f64>),

    #[error("correspondence is not injective on the grid: samples {0} and {1} collide")]
    NotInjective(usize, usize),

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
