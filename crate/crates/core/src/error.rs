use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("register size mismatch: expected {expected} qubits, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("register of {0} qubits exceeds the simulator limit of {1}")]
    RegisterTooLarge(usize, usize),
    #[error("gate is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("operator is not Hermitian (imaginary residue {0:.3e})")]
    NotHermitian(f64),
    #[error("constraint set admits no state")]
    EmptySubspace,
    #[error("no constrained state with {0} fermions")]
    EmptySector(usize),
    #[error("Krylov propagation did not converge: {0}")]
    KrylovNotConverged(String),
    #[error("eigensolver did not converge after {0} iterations")]
    EigenNotConverged(usize),
    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("wrong edge direction for {0}")]
    WrongEdge(&'static str),
    #[error("sector dimension {0} exceeds the limit {1}")]
    SectorTooLarge(usize, usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
