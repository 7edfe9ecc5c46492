use thiserror::Error;

/// Errors raised by the library. Each variant maps onto a distinct CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry document is invalid: {0}")]
    Schema(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("face {face} is not planar (deviation {deviation:.3e})")]
    NonPlanarFace { face: usize, deviation: f64 },

    #[error("opening {0} is outside (0, 2pi]")]
    OpeningOutOfRange(f64),

    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: usize },

    #[error("operation requires a {expected}D geometry, got {actual}D")]
    WrongDimension { expected: usize, actual: usize },

    #[error("edge {edge}: incident faces have inconsistent orientation")]
    InconsistentNormals { edge: usize },

    #[error("neighborhood parameter too large: {0}")]
    EpsilonTooLarge(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spectral window too small: no positive exponent within [-{window}, {window}], increase the window")]
    WindowTooSmall { window: f64 },

    #[error("critical case: {0}")]
    CriticalCase(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("field provides derivatives up to order {available}, order {requested} requested")]
    InsufficientOrder { requested: usize, available: usize },

    #[error("order m = {m} is below kappa_beta = {kappa} (step-weighted norms need m >= -beta)")]
    BelowKappa { m: usize, kappa: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("divergent input: {0}")]
    Divergent(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    EigenNonConvergence { iterations: usize, residual: f64 },

    #[error("linear solver failure: {0}")]
    Solver(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("mesh generation failed: {0}")]
    Mesh(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable numeric code, shared by the CLI exit status and the C interface.
    pub fn code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Json(_) => 3,
            Error::Degenerate(_)
            | Error::NonPlanarFace { .. }
            | Error::OpeningOutOfRange(_)
            | Error::InconsistentNormals { .. }
            | Error::EpsilonTooLarge(_) => 4,
            Error::UnknownId { .. } | Error::MissingData(_) => 5,
            Error::InvalidParameter(_)
            | Error::WrongDimension { .. }
            | Error::WindowTooSmall { .. }
            | Error::CriticalCase(_)
            | Error::InsufficientOrder { .. }
            | Error::BelowKappa { .. } => 6,
            Error::Quadrature(_) | Error::Divergent(_) => 7,
            Error::EigenNonConvergence { .. } | Error::Solver(_) => 8,
            Error::Unsupported(_) => 9,
            Error::Mesh(_) => 10,
            Error::Io(_) => 11,
        }
    }

    /// Short machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self.code() {
            3 => "schema",
            4 => "geometry",
            5 => "missing_data",
            6 => "invalid_parameter",
            7 => "quadrature",
            8 => "solver",
            9 => "unsupported",
            10 => "mesh",
            _ => "io",
        }
    }
}
