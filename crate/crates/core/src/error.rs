use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no bistable structure on [{lo}, {hi}]: {reason}")]
    NoBistableStructure { lo: f64, hi: f64, reason: String },
    #[error("could not bracket a root of f(s) = {level} {side}")]
    RootBracketFailure { level: f64, side: &'static str },
    #[error("no invariant envelope containing [{lo}, {hi}] within |s| <= {bound}")]
    EnvelopeNotFound { lo: f64, hi: f64, bound: f64 },
    #[error("fields have different cell structure")]
    CellMismatch,
    #[error("profiles have different total measure ({left} vs {right})")]
    MeasureMismatch { left: f64, right: f64 },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("blow-up detected at t = {t}: |u| = {value} exceeds {limit}")]
    BlowupDetected { t: f64, value: f64, limit: f64 },
    #[error("requested time {requested} exceeds recorded span {available}")]
    SpanExceeded { requested: f64, available: f64 },
    #[error("barrier solutions did not enter the funnel by t = {max_time}")]
    BarrierStalls { max_time: f64 },
    #[error("snapshot times of the two trajectories do not align")]
    SnapshotMisaligned,
    #[error("final state is not stationary: residual {residual} > {limit}")]
    NotStationary { residual: f64, limit: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no snapshots inside the fitting window")]
    WindowEmpty,
    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
