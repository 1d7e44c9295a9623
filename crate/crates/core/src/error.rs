use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid range [{a}, {b}]")]
    InvalidRange { a: f64, b: f64 },
    #[error("invalid moments: {0}")]
    InvalidMoments(String),
    #[error("series truncation infeasible for |x| = {modulus}")]
    TruncationInfeasible { modulus: f64 },
    #[error("separation violated: |1 - conj(zeta) z| = {gap} < c |z - z0| = {needed}")]
    SeparationViolated { gap: f64, needed: f64 },
    #[error("arc of length {0} is longer than 1/4")]
    ArcTooLong(f64),
    #[error("cell budget exceeded: {cells} cells (limit {limit})")]
    BudgetExceeded { cells: usize, limit: usize },
    #[error("field and operator live on different quadratures")]
    QuadratureMismatch,
    #[error("empty sample")]
    EmptySample,
    #[error("no admissible square pair at level {0}")]
    NoAdmissiblePair(u32),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("tail vanished at x = {0}")]
    TailVanished(f64),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unresolvable reference `{0}`")]
    UnresolvedReference(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
