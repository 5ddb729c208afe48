use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bilinear recursion has no stationary solution: lambda >= 1.
    #[error("no stationary solution: lambda = {lambda} >= 1")]
    Stationarity { lambda: f64 },

    /// A `Fixed` innovation sequence ran out of values.
    #[error("fixed innovation sequence exhausted after {consumed} draws")]
    InnovationsExhausted { consumed: usize },

    /// Stride function produced an index outside the path.
    #[error("sample index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// Covariance tuple enumeration would exceed the feasibility cap.
    #[error("tuple enumeration infeasible: {count} tuples exceeds cap {cap}")]
    EnumerationInfeasible { count: u64, cap: u64 },

    /// Rate formula hypotheses are not met by the supplied parameters.
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    /// Slope fitting needs at least four positive points.
    #[error("slope fit error: {0}")]
    SlopeFit(String),

    /// Config file parse failure, with 1-based line number.
    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    #[error(
        "metric requires a density oracle and the process declares none \
             (enable the pilot oracle or pick a process with a known marginal)"
    )]
    MissingDensity,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}
