use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("system of {n} qubits exceeds the dense limit of {limit} for {what}")]
    SizeCap { what: &'static str, n: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitIndex { index: usize, n: usize },
    #[error("Majorana index {index} out of range 1..={max}")]
    MajoranaIndex { index: usize, max: usize },
    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("generator is not antisymmetric (deviation {0:.3e})")]
    NotAntisymmetric(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
