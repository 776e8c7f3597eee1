//! Local fermion-to-qubit encodings of the 2D t-V model on a torus.
//!
//! Each lattice site carries a physical qubit (the occupation) and an
//! auxiliary qubit. Gauss-law and Wilson-loop stabilizers carve the
//! fermionic Hilbert space out of the enlarged register; every circuit in
//! [`circuits`] preserves them exactly. [`oracle`] is an independent
//! Jordan-Wigner exact diagonalization used as ground truth.

pub mod circuits;
pub mod cli;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod pauli;
pub mod statevec;
pub mod vqe;

pub use error::{Error, Result};
pub use lattice::{Direction, Edge, LatticeSpec, QubitRef, Site, System};
pub use pauli::{ConstraintSet, Pauli, PauliString, PauliSum};
pub use statevec::{QuantumState, SparseState, StateVector};
