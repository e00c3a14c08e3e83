use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit-count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("Majorana index {index} out of range 1..={max}")]
    MajoranaIndex { index: usize, max: usize },

    #[error("invalid Pauli string {text:?}: {reason}")]
    PauliParse { text: String, reason: String },

    #[error("Pauli operator {0} is not Hermitian")]
    NonHermitian(String),

    #[error("invalid SYK parameters: {0}")]
    InvalidParams(String),

    #[error("product of Majorana operators {indices:?} has imaginary phase")]
    ImaginaryTerm { indices: Vec<usize> },

    #[error("register of {0} qubits exceeds the engine limit")]
    TooManyQubits(usize),

    #[error("dimension 2^{0} too large for dense evaluation")]
    DimensionTooLarge(usize),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid qubit selection: {0}")]
    InvalidSubsystem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bitstring length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("circuit must be decomposed to one- and two-qubit basis gates: found {0}")]
    NotDecomposed(String),

    #[error("degenerate extrapolation fit: {0}")]
    DegenerateFit(String),

    #[error("confusion matrix for bit {0} is singular")]
    SingularConfusion(usize),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("io error at {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
