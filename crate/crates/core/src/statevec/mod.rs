//! Statevector simulation: dense and sparse amplitude stores, Pauli
//! expectations, the constraint-satisfying subspace, sector ground states
//! and exact propagation.
//!
//! Bit convention: qubit `q` is bit `q` of a basis index. A `k`-qubit gate
//! matrix acting on `targets = [t0, .., t(k-1)]` uses `t0` as its most
//! significant local bit, so `kron(A, B)` applies `A` to `t0`.

mod dense;
mod eigen;
mod krylov;
mod sparse;
mod subspace;

pub use dense::StateVector;
pub use eigen::{hermitian_eigen, lanczos_ground, EigenStrategy, LANCZOS_MAX_ITER, LANCZOS_TOL};
pub use krylov::{exact_propagate, KrylovConfig};
pub use sparse::SparseState;
pub use subspace::{constrained_basis, ground_in_sector, SectorGround, SubspaceBasis};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::{PauliString, PauliSum, PRUNE_TOL};

/// Largest register a dense state may allocate.
pub const MAX_QUBITS: usize = 24;
/// Tolerance for gate unitarity checks.
pub const UNITARY_TOL: f64 = 1e-10;
/// Largest imaginary residue accepted from an expectation of a Hermitian operator.
pub const EXPVAL_IMAG_TOL: f64 = 1e-10;

/// Operations shared by the dense and sparse amplitude stores.
pub trait QuantumState {
    fn n_qubits(&self) -> usize;

    /// Applies `u` to `targets` without validation.
    fn apply_matrix_unchecked(&mut self, u: &CMatrix, targets: &[usize]);

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()>;

    /// `<psi|P|psi>` for a single string (complex in general).
    fn expval_string(&self, p: &PauliString) -> Result<Complex64>;

    fn norm_sqr(&self) -> f64;

    /// `<psi|O|psi>` for a Hermitian Pauli sum.
    fn expval(&self, op: &PauliSum) -> Result<f64> {
        let residue = op.hermiticity_residue();
        if residue >= PRUNE_TOL {
            return Err(Error::NotHermitian(residue));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, s) in op.terms() {
            acc += c * self.expval_string(s)?;
        }
        if acc.im.abs() > EXPVAL_IMAG_TOL * (1.0 + acc.re.abs()) {
            return Err(Error::NotHermitian(acc.im.abs()));
        }
        Ok(acc.re)
    }
}

/// Precomputed action of a Pauli string on computational basis states:
/// `P|i> = coef * (-1)^{|i & z|} |i ^ x>`.
#[derive(Clone, Copy, Debug)]
pub struct PauliMask {
    pub x: u64,
    pub z: u64,
    pub coef: Complex64,
}

impl PauliMask {
    pub fn new(p: &PauliString) -> Self {
        let (x, z) = p.masks();
        let coef = p.phase().value() * Complex64::new(0.0, 1.0).powu(p.y_count());
        Self { x, z, coef }
    }

    #[inline]
    pub fn phase_on(&self, i: u64) -> Complex64 {
        if (i & self.z).count_ones().is_multiple_of(2) {
            self.coef
        } else {
            -self.coef
        }
    }

    #[inline]
    pub fn act(&self, i: u64) -> (u64, Complex64) {
        (i ^ self.x, self.phase_on(i))
    }
}

/// Offsets of the `2^k` amplitudes of a gate block relative to its base index.
pub(crate) fn block_offsets(targets: &[usize]) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|l| {
            targets.iter().enumerate().filter(|(j, _)| (l >> (k - 1 - j)) & 1 == 1).map(|(_, &t)| 1usize << t).sum()
        })
        .collect()
}

pub(crate) fn check_targets(targets: &[usize], n_qubits: usize, u: &CMatrix) -> Result<()> {
    let k = targets.len();
    if !(1..=4).contains(&k) {
        return Err(Error::InvalidGate(format!("gates act on 1 to 4 qubits, got {k}")));
    }
    if u.nrows() != 1 << k || u.ncols() != 1 << k {
        return Err(Error::InvalidGate(format!(
            "matrix of shape {}x{} does not match {k} targets",
            u.nrows(),
            u.ncols()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::InvalidGate(format!("target {t} outside register of {n_qubits}")));
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidGate(format!("duplicate target {t}")));
        }
    }
    Ok(())
}

/// Expectations of every stabilizer, paired with its target.
pub fn constraint_expectations<S: QuantumState>(
    state: &S,
    cs: &crate::pauli::ConstraintSet,
) -> Result<Vec<(crate::pauli::ConstraintKind, f64, i8)>> {
    cs.stabilizers.iter().map(|st| Ok((st.kind, state.expval_string(&st.string)?.re, st.target))).collect()
}

/// Largest deviation of any stabilizer expectation from its target.
pub fn max_constraint_violation<S: QuantumState>(state: &S, cs: &crate::pauli::ConstraintSet) -> Result<f64> {
    Ok(constraint_expectations(state, cs)?.into_iter().map(|(_, v, t)| (v - t as f64).abs()).fold(0.0, f64::max))
}
