use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("profile evaluated outside its domain: t = {0} (requires t < 0)")]
    Domain(f64),

    #[error("non-integrable tail: {0}")]
    NonIntegrable(String),

    #[error("no admissible k for N = {dim}, alpha = {alpha}: {reason}")]
    NoAdmissibleK { dim: u32, alpha: f64, reason: String },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("invalid solver configuration: {0}")]
    SolveConfig(String),

    #[error("pointwise blow-up reached in nonlinear substep (forward step of {dt} too long)")]
    PointwiseBlowup { dt: f64 },

    #[error("non-finite field at t = {0}")]
    NonFinite(f64),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("fit failure: {0}")]
    Fit(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
