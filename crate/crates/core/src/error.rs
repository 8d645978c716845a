use thiserror::Error;

/// Errors raised by the analysis library.
///
/// Every variant describes bad input or a violated precondition; none of
/// them signal a bug in the library itself, except
/// [`MfxError::UnsortedAfterSort`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MfxError {
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("sampling interval must be positive, got {0}")]
    NonPositiveDt(f64),
    #[error("series too short: length {len}, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },
    #[error("invalid scale grid: {0}")]
    InvalidScaleGrid(String),
    #[error("invalid q grid: {0}")]
    InvalidQGrid(String),
    #[error("polynomial order {0} outside supported range 1..=5")]
    InvalidOrder(usize),

    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("non-positive price at {0}")]
    NonPositivePrice(u64),
    #[error("trade records still unsorted after sorting")]
    UnsortedAfterSort,
    #[error("no trades inside the requested window")]
    NoTradesInWindow,
    #[error("trades are not sorted by timestamp")]
    UnsortedInput,
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("price series of length one has no returns")]
    LengthOne,
    #[error("sampling intervals differ: {0} s vs {1} s")]
    DtMismatch(f64, f64),
    #[error("overlap of {got} samples is shorter than the required {min}")]
    InsufficientOverlap { got: usize, min: usize },
    #[error("series sample clocks are offset by a non-integer number of samples")]
    GridMisaligned,

    #[error("scale {scale} exceeds series length {len}")]
    ScaleExceedsLength { scale: usize, len: usize },
    #[error("segment of length {scale} too short for polynomial order {order}")]
    SegmentTooShortForOrder { scale: usize, order: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("negative detrended variance {value} at scale {scale}")]
    NegativeVariance { scale: usize, value: f64 },

    #[error("fewer than {min} grid scales inside fit range ({got} found)")]
    TooFewScales { got: usize, min: usize },
    #[error("fit range bound {0} is not a grid scale")]
    ScaleNotInGrid(usize),
    #[error("grids do not match")]
    GridMismatch,
    #[error("surface kind is not {0}")]
    WrongSurfaceKind(&'static str),

    #[error("lag of {tau} samples too large for series of length {len}")]
    TauTooLarge { tau: usize, len: usize },
    #[error("{value} s is not a multiple of the sampling interval {dt} s")]
    NotMultipleOfDt { value: f64, dt: f64 },

    #[error("Hurst exponent must lie in (0, 1), got {0}")]
    BadH(f64),
    #[error("bad length {0}: {1}")]
    BadLength(usize, &'static str),
    #[error("cascade multiplier must lie in (0.5, 1), got {0}")]
    BadMultiplier(f64),
    #[error("coupling must lie in [0, 1], got {0}")]
    BadCoupling(f64),
    #[error("circulant embedding has negative eigenvalue {0}")]
    EmbeddingFailed(f64),

    #[error("series has zero variance")]
    ZeroVariance,
    #[error("window of {window} samples exceeds series length {len}")]
    WindowTooLarge { window: usize, len: usize },

    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MfxError {
    fn from(e: std::io::Error) -> Self {
        MfxError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MfxError>;
