use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variant names double as the stable tokens written into the `error`
/// column of sweep tables (see [`Error::token`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("band initial state requires a nonzero coupling V (phase undefined)")]
    ZeroCouplingPhase,
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("eigenvectors degenerate at exceptional point (|Omega| = {omega_abs:e})")]
    DegenerateAtEp {
        omega_abs: f64,
        /// Self-overlaps of the unit-normalized raw left/right eigenvectors.
        raw_overlaps: [f64; 2],
    },
    #[error("no root of the overlap criterion in [0, {gamma_max}]")]
    NoRootInRange { gamma_max: f64 },
    #[error("subradiant width has no interior maximum on the grid")]
    MonotoneNoMax,
    #[error("asymptotic regime violated: {0}")]
    RegimeViolation(String),
    #[error("singular denominator in closed-form coefficients: {0}")]
    SingularDenominator(String),
    #[error("trace budget error {error:e} exceeds limit {limit:e} at t = {t}")]
    ToleranceFailure { t: f64, error: f64, limit: f64 },
    #[error("adaptive step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("a seed is required in reproducible mode")]
    SeedRequired,
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("unknown figure {0}")]
    UnknownFigure(u32),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short stable name of the error case.
    pub fn token(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::ZeroCouplingPhase => "ZeroCouplingPhase",
            Error::InvalidDensity(_) => "InvalidDensity",
            Error::DegenerateAtEp { .. } => "DegenerateAtEP",
            Error::NoRootInRange { .. } => "NoRootInRange",
            Error::MonotoneNoMax => "MonotoneNoMax",
            Error::RegimeViolation(_) => "RegimeViolation",
            Error::SingularDenominator(_) => "SingularDenominator",
            Error::ToleranceFailure { .. } => "ToleranceFailure",
            Error::StepUnderflow { .. } => "StepUnderflow",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::SeedRequired => "SeedRequired",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::UnknownFigure(_) => "UnknownFigure",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
