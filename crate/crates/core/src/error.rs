use thiserror::Error;

/// Errors raised by the physics and quadrature layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A pointwise kernel was requested for a region whose kernel is a distribution.
    #[error(
        "distributional kernel: the all-space localization kernel is a Dirac delta; \
         use the sharp-momentum (no-localization) code path instead"
    )]
    DistributionalKernel,
    /// The quadrature cannot meet its resolution requirements.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// The normalization of the correlation function vanishes.
    #[error("degenerate state: {0}")]
    DegenerateState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
