use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is outside the supported range 1..=64")]
    UnsupportedDimension(usize),
    #[error("factor dimensions multiply to {product}, state has dimension {dim}")]
    InvalidFactors { product: usize, dim: usize },
    #[error("non-finite amplitude or matrix entry")]
    NonFinite,
    #[error("cannot normalize a zero vector")]
    ZeroNorm,
    #[error("site {0} listed more than once in Pauli string")]
    DuplicateSite(usize),
    #[error("site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("operator is not a Hermitian idempotent (residual {residual:e})")]
    NotProjector { residual: f64 },
    #[error("invalid spectrum for `{name}`: {reason}")]
    InvalidSpectrum { name: String, reason: &'static str },
    #[error("pre/post overlap {overlap:e} is below threshold {threshold:e}")]
    OverlapTooSmall { overlap: f64, threshold: f64 },
    #[error("inconsistent PPS/observable: no intermediate outcome is compatible with the post-selection")]
    InconsistentObservable,
    #[error("inconsistent PPS/chain: every outcome sequence has zero weight")]
    InconsistentChain,
    #[error("measurement chain is empty")]
    EmptyChain,
    #[error("observables do not commute (commutator norm {residual:e})")]
    NonCommuting { residual: f64 },
    #[error("basis is not orthonormal and complete (residual {residual:e})")]
    IncompleteBasis { residual: f64 },
    #[error("invalid pointer configuration: {0}")]
    InvalidPointerConfig(&'static str),
    #[error("pointer shift range {required} exceeds grid half-width {half_width}")]
    GridRange { required: f64, half_width: f64 },
    #[error("coupling strength must be nonzero")]
    ZeroCoupling,
    #[error("at least one sample is required")]
    NoSamples,
    #[error("{count} observables exceed the exhaustive search limit of {limit}")]
    TooManyObservables { count: usize, limit: usize },
    #[error("context {context} (`{label}`): members `{first}` and `{second}` do not commute (residual {residual:e})")]
    ContextNotCommuting {
        context: usize,
        label: String,
        first: String,
        second: String,
        residual: f64,
    },
    #[error("context {context} (`{label}`): product does not equal the required sign (residual {residual:e})")]
    ContextProduct {
        context: usize,
        label: String,
        residual: f64,
    },
    #[error("observable `{0}` has eigenvalues other than +1 and -1")]
    NotSignValued(String),
    #[error("unknown observable `{0}`")]
    UnknownObservable(String),
    #[error("invalid context table: {0}")]
    InvalidTable(String),
    #[error("scenario `{scenario}`, check `{target}`: {source}")]
    InScenario {
        scenario: String,
        target: String,
        source: Box<Error>,
    },
}
