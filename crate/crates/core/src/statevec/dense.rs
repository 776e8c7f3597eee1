use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{unitarity_error, CMatrix, ONE, ZERO};
use crate::pauli::{PauliString, PauliSum};

use super::{block_offsets, check_targets, PauliMask, QuantumState, MAX_QUBITS, UNITARY_TOL};

/// Dense amplitude vector. Qubit `q` is bit `q` of the amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(n_qubits, MAX_QUBITS));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Self { n_qubits, amps })
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero_state(n_qubits)?;
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len();
        if !n.is_power_of_two() {
            return Err(Error::InvalidGate(format!("amplitude count {n} is not a power of two")));
        }
        let n_qubits = n.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(n_qubits, MAX_QUBITS));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm. Only ever called explicitly.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `O|psi>` for a Pauli sum, without normalization.
    pub fn apply_sum(&self, op: &PauliSum) -> Result<StateVector> {
        self.check_size(op.n_qubits())?;
        let masks: Vec<_> = op.terms().iter().map(|(c, s)| (*c, PauliMask::new(s))).collect();
        let amps: Vec<Complex64> = (0..self.amps.len())
            .into_par_iter()
            .map(|out| {
                let mut acc = ZERO;
                for (coef, m) in &masks {
                    // P is an involution up to phase, so P|src> lands on `out`.
                    let src = out as u64 ^ m.x;
                    let a = self.amps[src as usize];
                    if a != ZERO {
                        acc += coef * m.phase_on(src) * a;
                    }
                }
                acc
            })
            .collect();
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }

    /// Little-endian dump: `u32` register size, then interleaved `re, im` doubles.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.n_qubits as u32).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 4];
        r.read_exact(&mut head)?;
        let n_qubits = u32::from_le_bytes(head) as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(n_qubits, MAX_QUBITS));
        }
        let mut amps = Vec::with_capacity(1 << n_qubits);
        let mut buf = [0u8; 16];
        for _ in 0..(1usize << n_qubits) {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            amps.push(Complex64::new(re, im));
        }
        Ok(Self { n_qubits, amps })
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: n });
        }
        Ok(())
    }
}

impl QuantumState for StateVector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_matrix_unchecked(&mut self, u: &CMatrix, targets: &[usize]) {
        let k = targets.len();
        let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let offsets = block_offsets(targets);
        let dim = 1usize << k;
        let mut buf = vec![ZERO; dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                buf[l] = self.amps[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (col, b) in buf.iter().enumerate() {
                    acc += u[(row, col)] * b;
                }
                self.amps[base | off] = acc;
            }
        }
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_size(p.n_qubits())?;
        let m = PauliMask::new(p);
        let mut out = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let (j, ph) = m.act(i as u64);
            out[j as usize] = ph * a;
        }
        self.amps = out;
        Ok(())
    }

    fn expval_string(&self, p: &PauliString) -> Result<Complex64> {
        self.check_size(p.n_qubits())?;
        let m = PauliMask::new(p);
        let acc = self
            .amps
            .par_iter()
            .enumerate()
            .map(|(i, a)| {
                if *a == ZERO {
                    return ZERO;
                }
                let (j, ph) = m.act(i as u64);
                self.amps[j as usize].conj() * ph * a
            })
            .sum();
        Ok(acc)
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

impl StateVector {
    /// Applies a `k`-qubit unitary after validating targets and unitarity.
    pub fn apply_matrix_gate(&mut self, u: &CMatrix, targets: &[usize]) -> Result<()> {
        check_targets(targets, self.n_qubits, u)?;
        let err = unitarity_error(u);
        if err > UNITARY_TOL {
            return Err(Error::NotUnitary(err));
        }
        self.apply_matrix_unchecked(u, targets);
        Ok(())
    }
}
