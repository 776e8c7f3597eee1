use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CVector, ZERO};
use crate::pauli::PauliSum;

use super::StateVector;

#[derive(Clone, Copy, Debug)]
pub struct KrylovConfig {
    /// Krylov subspace dimension per substep.
    pub dim: usize,
    /// Error budget per unit of evolution time.
    pub tol: f64,
    /// Maximum number of substeps before giving up.
    pub max_substeps: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self { dim: 30, tol: 1e-13, max_substeps: 100_000 }
    }
}

/// `exp(-i tau H)|psi>` by adaptive Lanczos substeps.
pub fn exact_propagate(state: &StateVector, h: &PauliSum, tau: f64, config: KrylovConfig) -> Result<StateVector> {
    let v = CVector::from_column_slice(state.amplitudes());
    let out = krylov_expm(
        &v,
        |x| {
            let s = StateVector::from_amplitudes(x.as_slice().to_vec()).expect("power-of-two length");
            let hs = s.apply_sum(h).expect("operator matches register");
            CVector::from_vec(hs.into_amplitudes())
        },
        tau,
        config,
    )?;
    StateVector::from_amplitudes(out.as_slice().to_vec())
}

/// `exp(-i tau A) v` for Hermitian `A` given through `apply`.
pub fn krylov_expm<F>(v: &CVector, apply: F, tau: f64, config: KrylovConfig) -> Result<CVector>
where
    F: Fn(&CVector) -> CVector,
{
    if tau == 0.0 {
        return Ok(v.clone());
    }
    let mut current = v.clone();
    let mut remaining = tau.abs();
    let sign = tau.signum();
    let mut step = remaining;
    let mut substeps = 0;

    while remaining > 0.0 {
        let norm = current.norm();
        if norm == 0.0 {
            return Ok(current);
        }
        let (basis, alphas, betas, beta_last) = lanczos_basis(&current, &apply, config.dim);
        let m = alphas.len();
        let t = tridiagonal(&alphas, &betas);
        let eig = t.symmetric_eigen();

        loop {
            substeps += 1;
            if substeps > config.max_substeps {
                return Err(Error::KrylovNotConverged(format!("{} substeps exceeded", config.max_substeps)));
            }
            let dt = step.min(remaining);
            // c = exp(-i dt T) e1 in the Lanczos basis.
            let coeffs: Vec<Complex64> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|k| {
                            let lam = eig.eigenvalues[k];
                            eig.eigenvectors[(i, k)]
                                * eig.eigenvectors[(0, k)]
                                * Complex64::from_polar(1.0, -sign * dt * lam)
                        })
                        .sum()
                })
                .collect();
            let err = beta_last * coeffs[m - 1].norm() * norm;
            if err <= config.tol * dt || beta_last < 1e-14 {
                let mut next = CVector::from_element(current.len(), ZERO);
                for (b, c) in basis.iter().zip(&coeffs) {
                    next += b * (*c * norm);
                }
                current = next;
                remaining -= dt;
                if err < 0.1 * config.tol * dt {
                    step = dt * 1.5;
                }
                break;
            }
            step = dt * 0.5;
            if step < 1e-14 * tau.abs() {
                return Err(Error::KrylovNotConverged("substep underflow".into()));
            }
        }
    }
    Ok(current)
}

fn lanczos_basis<F>(v: &CVector, apply: &F, max_dim: usize) -> (Vec<CVector>, Vec<f64>, Vec<f64>, f64)
where
    F: Fn(&CVector) -> CVector,
{
    let mut basis = vec![v / Complex64::new(v.norm(), 0.0)];
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let dim = max_dim.min(v.len());
    loop {
        let k = basis.len() - 1;
        let mut w = apply(&basis[k]);
        let alpha = basis[k].dotc(&w).re;
        alphas.push(alpha);
        for _ in 0..2 {
            for b in &basis {
                let p = b.dotc(&w);
                w -= b * p;
            }
        }
        let beta = w.norm();
        if basis.len() == dim || beta < 1e-14 {
            return (basis, alphas, betas, beta);
        }
        betas.push(beta);
        basis.push(w / Complex64::new(beta, 0.0));
    }
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> DMatrix<f64> {
    let m = alphas.len();
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;
    use crate::linalg::{expm_hermitian, pauli_sum_matrix};
    use crate::pauli::tv_hamiltonian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps =
            (0..1usize << n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        s.normalize();
        s
    }

    #[test]
    fn zero_time_is_identity() {
        let spec = LatticeSpec::new(2, 2).unwrap();
        let h = tv_hamiltonian(&spec, 1.0, 2.0, &[]);
        let psi = random_state(8, 1);
        let out = exact_propagate(&psi, &h, 0.0, KrylovConfig::default()).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn matches_dense_expm_on_2x2() {
        let spec = LatticeSpec::new(2, 2).unwrap();
        let h = tv_hamiltonian(&spec, 1.0, 2.0, &[]);
        let psi = random_state(8, 2);
        let tau = 1.7;
        let out = exact_propagate(&psi, &h, tau, KrylovConfig::default()).unwrap();
        let u = expm_hermitian(&pauli_sum_matrix(&h), tau);
        let expect = u * CVector::from_column_slice(psi.amplitudes());
        let diff = out.amplitudes().iter().zip(expect.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "diff {diff}");
        assert!((out.norm() - 1.0).abs() < 1e-10);
    }
}
