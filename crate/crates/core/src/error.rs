use thiserror::Error;

/// Errors raised by the operator algebra, sequence compiler and simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operands carry different precisions ({0} vs {1} bits)")]
    PrecisionMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("operator is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("eigenphase {phase:.6} lies on the logarithm branch cut")]
    BranchAmbiguity { phase: f64 },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("pulse width {delta:e} s does not fit into a free period of {available:e} s")]
    WidthTooLarge { delta: f64, available: f64 },
    #[error("product-formula order {order} requires a negative free interval ({coefficient:.6})")]
    NegativeInterval { order: u32, coefficient: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid state: {0}")]
    BadState(String),
    #[error("precision escalation failed at {bits} bits: {reason}")]
    PrecisionEscalationFailed { bits: u32, reason: String },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
