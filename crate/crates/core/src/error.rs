use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("invalid ellipse: {0}")]
    InvalidEllipse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {z} lies on (or within {tol:e} of) the focal segment; the exterior branch is ambiguous there")]
    BranchCut { z: Complex64, tol: f64 },

    #[error("point {0} lies outside the curve")]
    OutsideDomain(Complex64),

    #[error("point {0} lies inside the curve")]
    InsideDomain(Complex64),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("circular inner interface: every angular velocity is admissible for the concentric family")]
    CircularInner,

    #[error("alpha = 0 with a non-circular inner ellipse admits no rotation")]
    NoRotation,

    #[error("alpha = {alpha} outside the admissible interval ({lower}, 0)")]
    Inadmissible { alpha: f64, lower: f64 },

    #[error("containment violated: {0}")]
    Containment(String),

    #[error("integration aborted at t = {time}: {reason}")]
    IntegrationAborted { time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
