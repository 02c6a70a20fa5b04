use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or out-of-range input.
    Input,
    /// Input is well formed but describes an impossible or degenerate scene.
    Geometry,
    /// An iterative procedure failed to make progress.
    Optimization,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("degenerate latitude at boundary point {index}: ray is parallel to the plane")]
    DegenerateLatitude { index: usize },

    #[error("degenerate wall {index}: consecutive boundary points coincide")]
    DegenerateWall { index: usize },

    #[error("open layout: no wall covers the ray at longitude {theta}")]
    OpenLayout { theta: f64 },

    #[error("render trace does not match the inputs it is used with")]
    StaleTrace,

    #[error("fit failed after {iterations} iterations: {reason}")]
    FitFailure {
        reason: String,
        iterations: usize,
        trajectory: Vec<f64>,
    },

    #[error("manhattan snap failed: {0}")]
    SnapFailure(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) | Error::Format(_) | Error::Shape { .. } | Error::StaleTrace => {
                ErrorKind::Input
            }
            Error::Geometry(_)
            | Error::Degenerate(_)
            | Error::DegenerateLatitude { .. }
            | Error::DegenerateWall { .. }
            | Error::OpenLayout { .. }
            | Error::SnapFailure(_) => ErrorKind::Geometry,
            Error::FitFailure { .. } => ErrorKind::Optimization,
        }
    }
}
