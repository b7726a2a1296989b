use thiserror::Error;

/// Errors raised by the geometric-mechanics layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not antisymmetric (defect {defect:e})")]
    NotAntisymmetric { defect: f64 },
    #[error("matrix is not a rotation (orthogonality defect {orthogonality:e}, det {det})")]
    NotRotation { orthogonality: f64, det: f64 },
    #[error("matrix too far from SO(3) to repair (orthogonality defect {defect:e})")]
    TooFarFromSO3 { defect: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction vector is not unit length (|nu|^2 = {norm_sq})")]
    NotUnit { norm_sq: f64 },
    #[error("vector is not tangent to the sphere (<u, nu> = {dot:e})")]
    NotTangent { dot: f64 },
    #[error("points lie on different Casimir levels ({first:?} vs {second:?})")]
    NotSameLevel {
        first: (f64, f64),
        second: (f64, f64),
    },
    #[error("nu is zero; orbit is not over a sphere")]
    ZeroNu,
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
