use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("negative weight {weight} on edge ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, weight: f64 },
    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },
    #[error("vertex {0} has no incident edges")]
    IsolatedVertex(usize),
    #[error("graph is disconnected (zero eigenvalue has multiplicity {0})")]
    Disconnected(usize),
    #[error("dense eigendecomposition of {n} vertices exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("B-spline degree {0} is too large")]
    DegreeTooLarge(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid warp: {0}")]
    InvalidWarp(String),
    #[error("spectrum reaches {spectrum}, beyond the kernel domain {domain}")]
    DomainMismatch { spectrum: f64, domain: f64 },
    #[error("invalid Chebyshev order {0}")]
    InvalidOrder(usize),
    #[error("{lambda} lies outside the Chebyshev domain [0, {lambda_max}]")]
    OutOfDomain { lambda: f64, lambda_max: f64 },
    #[error("signal {0} has no energy outside the removed components")]
    DegenerateSignal(usize),
    #[error("abscissas must be increasing (index {0})")]
    NonMonotoneInput(usize),
    #[error("repeated abscissa at index {0}")]
    DuplicateAbscissa(usize),
    #[error("energy spectral density is not a nonnegative distribution (index {0})")]
    NonMonotoneEsd(usize),
    #[error("invalid pivot: {0}")]
    InvalidPivot(String),
    #[error("kernel system is not a Parseval frame")]
    NotParseval,
    #[error("signal has zero energy")]
    ZeroSignal,
    #[error("density {0} is outside (0, 1]")]
    InvalidDensity(f64),
}
