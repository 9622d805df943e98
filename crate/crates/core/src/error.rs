use thiserror::Error;

/// Error type shared by every module of the toolkit.
#[derive(Debug, Error)]
pub enum FtccError {
    #[error("malformed Pauli string {text:?}: unexpected character at position {position}")]
    PauliParse { position: usize, text: String },

    #[error("operator length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },

    #[error("unknown base code {0:?} (expected five_qubit, steane or rm15)")]
    UnknownCode(String),

    #[error("code validation failed: {0}")]
    InvalidCode(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("circuit parse error at line {line}: {message}")]
    CircuitParse { line: usize, message: String },

    #[error("state-vector budget exceeded: {qubits} qubits over budget of {budget}")]
    SvBudget { qubits: usize, budget: usize },

    #[error("gadget construction failed: {0}")]
    Gadget(String),

    #[error("logical action check failed: {0}")]
    LogicalAction(String),

    #[error("concatenation error: {0}")]
    Concat(String),

    #[error("verification error: {0}")]
    Verify(String),

    #[error("gate {gate} is not applicable to code {code}: {reason}")]
    Inapplicable { gate: String, code: String, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("usage error: {0}")]
    Usage(String),
}
