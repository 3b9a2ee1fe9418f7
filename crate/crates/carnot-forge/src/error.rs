use thiserror::Error;

/// Errors produced by the symbolic and numeric pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("weight sequence is invalid: {0}")]
    InvalidWeights(String),

    #[error("Carnot type is invalid: {0}")]
    InvalidType(String),

    #[error("frame matrix B(0) is singular")]
    SingularFrame,

    #[error("linear part of the coordinate change is singular")]
    SingularLinearPart,

    #[error("coordinate change must fix the origin (component {k} has a nonzero constant term)")]
    NotCentered { k: usize },

    #[error("frame is not linearly adapted at the base point")]
    NotLinearlyAdapted,

    #[error("frame does not pass the privileged-coordinate check")]
    NotPrivileged,

    #[error("frame fields fail the weight check (field {field} has weight {found:?}, expected {expected})")]
    WeightCheck {
        field: usize,
        expected: i64,
        found: Option<i64>,
    },

    #[error("bracket condition violated for pair ({i},{j}): component {k} is nonzero to jet order {order}")]
    BracketCondition {
        i: usize,
        j: usize,
        k: usize,
        order: u32,
    },

    #[error("structure constants violate antisymmetry at ({i},{j},{k})")]
    Antisymmetry { i: usize, j: usize, k: usize },

    #[error("structure constants violate the grading at ({i},{j},{k})")]
    Grading { i: usize, j: usize, k: usize },

    #[error("Jacobi identity fails on quadruple ({i},{j},{k} -> {l})")]
    Jacobi { i: usize, j: usize, k: usize, l: usize },

    #[error("canonical basis does not match the structure constants: {0}")]
    BasisMismatch(String),

    #[error("basis field {field} is not homogeneous of degree {expected}")]
    NotHomogeneousBasis { field: usize, expected: i64 },

    #[error("matrix b must be symmetric (b[{i}][{j}] != b[{j}][{i}])")]
    AsymmetricMatrix { i: usize, j: usize },

    #[error("matrix must be antisymmetric (entry ({i},{j}))")]
    NotAntisymmetric { i: usize, j: usize },

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("flow escaped the guard radius {radius} at step {step}")]
    GuardRadius { radius: f64, step: usize },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("frame document error at {path}: {message}")]
    Document { path: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
