use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad flags, unparsable numbers.
    #[error("{0}")]
    Usage(String),
    /// Well-formed input outside an operation's domain.
    #[error("{0}")]
    Domain(String),
    /// Two characteristic roots are closer than the distinctness threshold.
    #[error("degenerate spectrum: roots {first} and {second} are {distance:e} apart")]
    DegenerateSpectrum { first: String, second: String, distance: f64 },
    /// Recurrence whose last coefficient vanishes.
    #[error("recurrence order error: {0}")]
    Order(String),
    /// Series reversion needs a non-zero linear coefficient.
    #[error("series has zero linear coefficient and cannot be reverted")]
    NotInvertible,
    /// An internal cross-check between two computations failed.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    /// Life-table file rejected at load time.
    #[error("life table line {line}: {message}")]
    Table { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }
}
