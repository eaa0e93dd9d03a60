use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("channel variance must be positive and finite, got {0}")]
    InvalidVariance(f64),
    #[error("at least one receiver is required")]
    NoReceivers,
    #[error("channel gain must be positive and finite, got {0}")]
    InvalidGain(f64),
    #[error("transmit power must be positive and finite, got {0}")]
    InvalidPower(f64),
    #[error("strong-receiver gain {strong} is below weak-receiver gain {weak}")]
    Unordered { strong: f64, weak: f64 },
    #[error("gains must be sorted in descending order")]
    UnsortedGains,
    #[error("receiver index {index} out of range for {count} receivers")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("power coefficients are infeasible: {0}")]
    InfeasibleAllocation(&'static str),
    #[error("rate must be nonnegative and finite, got {0}")]
    InvalidRate(f64),
    #[error("bisection tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("bisection did not converge within {0} iterations")]
    NoConvergence(u32),
    #[error("bin size must be positive and finite, got {0}")]
    InvalidBinSize(f64),
    #[error("bin size {0} must lie in (0, 1) for the default bin-count rule")]
    BinSizeOutOfRange(f64),
    #[error("bin count must be at least 1")]
    InvalidBinCount,
    #[error("gain to quantize is out of domain: {0}")]
    InvalidQuantizerInput(f64),
    #[error("quantizer flavor does not match the requested operation")]
    WrongFlavor,
    #[error("invalid feedback codeword: {0}")]
    InvalidCodeword(&'static str),
    #[error("target rate must be positive and finite, got {0}")]
    InvalidTargetRate(f64),
    #[error("need at least {needed} usable points for a slope, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("outage probability at {p_db} dB is {value}; a positive value is required")]
    NonPositiveProbability { p_db: f64, value: f64 },
}
