use rustc_hash::FxHashMap as HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ZERO};
use crate::pauli::PauliString;

use super::{block_offsets, PauliMask, QuantumState, StateVector};

/// Amplitudes of magnitude at most this are dropped after each gate.
const DROP_TOL: f64 = 1e-15;

/// Hash-map amplitude store for registers beyond the dense limit (up to 64
/// qubits). Efficient whenever the state has few nonzero amplitudes, as is
/// the case for constrained states at low filling.
#[derive(Clone, Debug, Default)]
pub struct SparseState {
    n_qubits: usize,
    amps: HashMap<u64, Complex64>,
}

impl SparseState {
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits > 64 {
            return Err(Error::RegisterTooLarge(n_qubits, 64));
        }
        let mut amps = HashMap::default();
        amps.insert(0, Complex64::new(1.0, 0.0));
        Ok(Self { n_qubits, amps })
    }

    pub fn from_entries(n_qubits: usize, entries: impl IntoIterator<Item = (u64, Complex64)>) -> Result<Self> {
        if n_qubits > 64 {
            return Err(Error::RegisterTooLarge(n_qubits, 64));
        }
        let mut amps = HashMap::default();
        for (i, a) in entries {
            *amps.entry(i).or_insert(ZERO) += a;
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn from_dense(state: &StateVector) -> Self {
        let amps = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > DROP_TOL)
            .map(|(i, a)| (i as u64, *a))
            .collect();
        Self { n_qubits: state.n_qubits(), amps }
    }

    pub fn to_dense(&self) -> Result<StateVector> {
        let mut s = StateVector::zero_state(self.n_qubits)?;
        let a = s.amplitudes_mut();
        a[0] = ZERO;
        for (&i, &v) in &self.amps {
            a[i as usize] = v;
        }
        Ok(s)
    }

    pub fn amplitude(&self, i: u64) -> Complex64 {
        self.amps.get(&i).copied().unwrap_or(ZERO)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.amps.iter().map(|(&i, &a)| (i, a))
    }

    pub fn support_size(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &SparseState) -> Complex64 {
        self.amps.iter().map(|(i, a)| a.conj() * other.amplitude(*i)).sum()
    }
}

impl QuantumState for SparseState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_matrix_unchecked(&mut self, u: &CMatrix, targets: &[usize]) {
        let mask: u64 = targets.iter().map(|&t| 1u64 << t).sum();
        let offsets: Vec<u64> = block_offsets(targets).into_iter().map(|o| o as u64).collect();
        let dim = offsets.len();
        let local = |i: u64| offsets.iter().position(|&o| o == i & mask).expect("offsets cover the mask");
        // Nonzero entries of each column, as (row offset, value).
        let cols: Vec<Vec<(u64, Complex64)>> = (0..dim)
            .map(|c| (0..dim).filter(|&r| u[(r, c)] != ZERO).map(|r| (offsets[r], u[(r, c)])).collect())
            .collect();
        let diagonal = cols.iter().enumerate().all(|(c, col)| col.len() == 1 && col[0].0 == offsets[c]);
        if diagonal {
            for (&i, a) in self.amps.iter_mut() {
                *a *= cols[local(i)][0].1;
            }
            return;
        }
        let mut out: HashMap<u64, Complex64> = HashMap::with_capacity_and_hasher(self.amps.len(), Default::default());
        for (&i, &a) in &self.amps {
            let base = i & !mask;
            for &(off, x) in &cols[local(i)] {
                *out.entry(base | off).or_insert(ZERO) += x * a;
            }
        }
        out.retain(|_, a| a.norm() > DROP_TOL);
        self.amps = out;
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: p.n_qubits() });
        }
        let m = PauliMask::new(p);
        self.amps = self
            .amps
            .iter()
            .map(|(&i, &a)| {
                let (j, ph) = m.act(i);
                (j, ph * a)
            })
            .collect();
        Ok(())
    }

    fn expval_string(&self, p: &PauliString) -> Result<Complex64> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: p.n_qubits() });
        }
        let m = PauliMask::new(p);
        Ok(self
            .amps
            .iter()
            .map(|(&i, &a)| {
                let (j, ph) = m.act(i);
                self.amplitude(j).conj() * ph * a
            })
            .sum())
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }
}
