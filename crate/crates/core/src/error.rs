use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalcError {
    #[error("infinite convolution: {0}")]
    InfiniteConvolution(String),
    #[error("variable {0} carries fractional exponents or logarithms; residue undefined")]
    NonMeromorphicVariable(String),
    #[error("operator is not nilpotent within {0} steps")]
    NotNilpotent(usize),
    #[error("phase {0} is not a dyadic multiple of pi i")]
    NonCyclotomicPhase(String),
    #[error("phase {0} is outside cyclotomic level {1}")]
    PhaseOutsideLevel(String, u32),
    #[error("log-power bound {0} exceeded")]
    LogBoundExceeded(u32),
    #[error("eigenvalue is not a supported root of unity: {0}")]
    NonCyclotomicSpectrum(String),
    #[error("matrix does not preserve the bilinear form: {0}")]
    NotIsometry(String),
    #[error("twisted extension inconsistent: {0}")]
    ExtensionInconsistent(String),
    #[error("scalar not invertible: {0}")]
    NotInvertible(String),
    #[error("degenerate bilinear form")]
    DegenerateForm,
    #[error("model description error: {0}")]
    Model(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, CalcError>;
