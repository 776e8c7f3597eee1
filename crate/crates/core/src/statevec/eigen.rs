use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, ZERO};

pub const LANCZOS_TOL: f64 = 1e-10;
pub const LANCZOS_MAX_ITER: usize = 500;
/// Sector dimension above which the Lanczos path is taken.
pub const DENSE_LIMIT: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenStrategy {
    Dense,
    Lanczos,
}

impl EigenStrategy {
    pub fn for_dim(dim: usize) -> Self {
        if dim <= DENSE_LIMIT {
            EigenStrategy::Dense
        } else {
            EigenStrategy::Lanczos
        }
    }
}

/// Ascending eigenvalues and matching eigenvector columns of a Hermitian matrix.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_columns(&order.iter().map(|&k| eig.eigenvectors.column(k)).collect::<Vec<_>>());
    (values, vectors)
}

/// Lowest eigenpair of a Hermitian operator given as a matrix-vector product,
/// by Lanczos iteration with full reorthogonalization.
pub fn lanczos_ground<F>(dim: usize, apply: F, seed: u64) -> Result<(f64, CVector)>
where
    F: Fn(&CVector) -> CVector,
{
    if dim == 0 {
        return Err(Error::EigenNotConverged(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = CVector::from_iterator(dim, (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, 0.0)));
    v /= Complex64::new(v.norm(), 0.0);

    let mut basis: Vec<CVector> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let max_iter = LANCZOS_MAX_ITER.min(dim);

    for it in 0..max_iter {
        let q = &basis[it];
        let mut w = apply(q);
        let alpha = q.dotc(&w).re;
        alphas.push(alpha);
        // Full reorthogonalization, twice for stability.
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let beta = w.norm();

        let (theta, s) = tridiagonal_ground(&alphas, &betas);
        let residual = beta * s[it].abs();
        if residual < LANCZOS_TOL || beta < 1e-14 || it + 1 == max_iter {
            if residual >= LANCZOS_TOL && beta >= 1e-14 && max_iter < dim {
                return Err(Error::EigenNotConverged(max_iter));
            }
            let mut y = CVector::from_element(dim, ZERO);
            for (k, b) in basis.iter().enumerate() {
                y += b * Complex64::new(s[k], 0.0);
            }
            let n = y.norm();
            y /= Complex64::new(n, 0.0);
            return Ok((theta, y));
        }
        betas.push(beta);
        basis.push(w / Complex64::new(beta, 0.0));
    }
    Err(Error::EigenNotConverged(max_iter))
}

fn tridiagonal_ground(alphas: &[f64], betas: &[f64]) -> (f64, DVector<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let (k, &val) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    (val, eig.eigenvectors.column(k).into_owned())
}
