use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("closure variant not available: {0}")]
    VariantUnavailable(String),
    #[error("flow index {0} is not supported")]
    FlowUnsupported(u32),
    #[error("spectral pole: the operator is undefined at z = 0")]
    SpectralPole,
    #[error("non-finite state at step {step}")]
    BlowUp { step: usize },
    #[error("dressing data inconsistent with the state: residual {residual:.3e}")]
    InconsistentDressing { residual: f64 },
    #[error("singular dressing denominator at site {site}")]
    SingularDressing { site: i64 },
    #[error("charge extraction needs a scalar upper block, got dimension {0}")]
    NotNormalized(usize),
    #[error("charge order {0} has no validated closed form")]
    UnvalidatedOrder(usize),
    #[error("degenerate mode: {0}")]
    DegenerateMode(String),
    #[error("soliton denominator vanishes at site {site}")]
    SingularSoliton { site: i64 },
    #[error("boundary term is not constant under the flow: |d/dt| = {rate:.3e}")]
    InconsistentBoundaryTerm { rate: f64 },
    #[error("degenerate Bianchi superposition: {0}")]
    DegenerateBianchi(String),
    #[error("mode data overflow on the window: {0}")]
    ModeOverflow(String),
    #[error("GLM row {row} is singular")]
    SingularGlm { row: i64 },
    #[error("logarithm branch failure at site {site}")]
    LogBranch { site: i64 },
    #[error("continuum formula is singular at t = {0}")]
    SingularTime(f64),
    #[error("parameter breaks periodicity: |xi^N - 1| = {defect:.3e}")]
    PeriodicityViolation { defect: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
