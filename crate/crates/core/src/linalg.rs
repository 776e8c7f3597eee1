//! Small dense complex linear-algebra helpers shared by the simulator, the
//! circuit builders and the oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::pauli::{Pauli, PauliString, PauliSum};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Single-qubit Pauli matrix in the `|0>, |1>` basis.
pub fn pauli_matrix(p: Pauli) -> CMatrix {
    match p {
        Pauli::I => identity(2),
        Pauli::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Pauli::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        Pauli::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    }
}

/// Kronecker matrix of a Pauli string in the simulator's bit order: qubit
/// `q` is bit `q` of the basis index, so qubit 0 is the rightmost factor.
pub fn pauli_string_matrix(p: &PauliString) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, p.phase().value());
    for &letter in p.letters().iter().rev() {
        m = kron(&m, &pauli_matrix(letter));
    }
    m
}

pub fn pauli_sum_matrix(sum: &PauliSum) -> CMatrix {
    let dim = 1usize << sum.n_qubits();
    let mut m = CMatrix::zeros(dim, dim);
    for (coef, s) in sum.terms() {
        m += pauli_string_matrix(s) * *coef;
    }
    m
}

/// `max |U†U - 1|` entrywise.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let n = u.nrows();
    if u.ncols() != n {
        return f64::INFINITY;
    }
    let prod = u.adjoint() * u;
    (prod - identity(n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Distance between two unitaries modulo a global phase.
pub fn phase_insensitive_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    if overlap.norm() < 1e-300 {
        return max_abs_diff(a, b);
    }
    let phase = overlap / overlap.norm();
    max_abs_diff(&(a * phase), b)
}

/// `exp(-i * tau * H)` for Hermitian `H` via its eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, tau: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let phases = CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -tau * e)),
    );
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&phases) * v.adjoint()
}
