use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::{CMatrix, CVector, ZERO};
use crate::pauli::{number_sum, ConstraintSet, PauliSum};

use super::eigen::{hermitian_eigen, lanczos_ground, EigenStrategy};
use super::{PauliMask, QuantumState, SparseState, MAX_QUBITS};

const AMP_TOL: f64 = 1e-14;

/// Orthonormal basis of the joint `+target` eigenspace of a constraint set.
///
/// Every basis vector is `prod_k (1 + t_k S_k)/2 |b>` for some computational
/// state `|b>`, normalized. Such projections have support on the orbit of
/// `b` under the X-parts of the stabilizer group, and distinct orbits are
/// disjoint, so the vectors are orthogonal by construction.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    n_qubits: usize,
    vectors: Vec<Vec<(u64, Complex64)>>,
    lookup: HashMap<u64, (usize, Complex64)>,
}

pub fn constrained_basis(cs: &ConstraintSet) -> Result<SubspaceBasis> {
    let n = cs.n_qubits();
    if n > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(n, MAX_QUBITS));
    }
    let stabs: Vec<(PauliMask, f64)> =
        cs.stabilizers.iter().map(|s| (PauliMask::new(&s.string), s.target as f64)).collect();
    let size = 1usize << n;
    let mut covered = vec![0u64; size.div_ceil(64)];
    let mut vectors = Vec::new();

    for b in 0..size {
        if covered[b / 64] >> (b % 64) & 1 == 1 {
            continue;
        }
        let mut v: HashMap<u64, Complex64> = HashMap::new();
        v.insert(b as u64, Complex64::new(1.0, 0.0));
        for (m, t) in &stabs {
            let mut next: HashMap<u64, Complex64> = HashMap::with_capacity(2 * v.len());
            for (&i, &a) in &v {
                *next.entry(i).or_insert(ZERO) += a * 0.5;
                let (j, ph) = m.act(i);
                *next.entry(j).or_insert(ZERO) += a * ph * (0.5 * t);
            }
            v = next;
        }
        for &i in v.keys() {
            covered[i as usize / 64] |= 1 << (i % 64);
        }
        let mut entries: Vec<(u64, Complex64)> = v.into_iter().filter(|(_, a)| a.norm() > AMP_TOL).collect();
        let norm = entries.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            continue;
        }
        entries.sort_by_key(|e| e.0);
        // Fix the gauge so the first entry is real positive.
        let phase = entries[0].1 / entries[0].1.norm();
        for e in entries.iter_mut() {
            e.1 /= phase * norm;
        }
        vectors.push(entries);
    }
    if vectors.is_empty() {
        return Err(Error::EmptySubspace);
    }
    let mut lookup = HashMap::new();
    for (k, v) in vectors.iter().enumerate() {
        for &(i, a) in v {
            lookup.insert(i, (k, a));
        }
    }
    Ok(SubspaceBasis { n_qubits: n, vectors, lookup })
}

/// Sparse Hermitian matrix as `(row, col, value)` triplets.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseMatrix {
    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn matvec(&self, x: &CVector) -> CVector {
        let mut y = CVector::from_element(self.dim, ZERO);
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    /// Restriction to a subset of basis indices.
    pub fn restrict(&self, keep: &[usize]) -> SparseMatrix {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        let entries = self
            .entries
            .iter()
            .filter(|(r, c, _)| pos[*r] != usize::MAX && pos[*c] != usize::MAX)
            .map(|&(r, c, v)| (pos[r], pos[c], v))
            .collect();
        SparseMatrix { dim: keep.len(), entries }
    }
}

/// Lowest eigenpair found inside a fixed-number sector of the constrained space.
#[derive(Clone, Debug)]
pub struct SectorGround {
    pub energy: f64,
    /// `||Hv - Ev||` evaluated inside the subspace.
    pub residual: f64,
    pub state: SparseState,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn vector(&self, k: usize) -> &[(u64, Complex64)] {
        &self.vectors[k]
    }

    pub fn vector_state(&self, k: usize) -> SparseState {
        SparseState::from_entries(self.n_qubits, self.vectors[k].iter().copied()).expect("register fits")
    }

    /// `<v_i|O|v_j>` for all pairs, exploiting disjoint supports.
    pub fn project_operator(&self, op: &PauliSum) -> Result<SparseMatrix> {
        if op.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: op.n_qubits() });
        }
        let masks: Vec<_> = op.terms().iter().map(|(c, s)| (*c, PauliMask::new(s))).collect();
        let mut acc: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (j, v) in self.vectors.iter().enumerate() {
            for &(b, a) in v {
                for (c, m) in &masks {
                    let (img, ph) = m.act(b);
                    if let Some(&(i, w)) = self.lookup.get(&img) {
                        *acc.entry((i, j)).or_insert(ZERO) += w.conj() * c * ph * a;
                    }
                }
            }
        }
        let entries = acc.into_iter().filter(|(_, v)| v.norm() > 1e-14).map(|((i, j), v)| (i, j, v)).collect();
        Ok(SparseMatrix { dim: self.dim(), entries })
    }

    /// Indices of basis vectors grouped by fermion number, when the number
    /// operator is diagonal in this basis (it is for the lattice constraint
    /// sets, whose X-parts act on auxiliary qubits only).
    pub fn number_sectors(&self, spec: &LatticeSpec) -> Result<BTreeMap<usize, Vec<usize>>> {
        let n_op = self.project_operator(&number_sum(spec))?;
        let mut diag = vec![0.0; self.dim()];
        for &(r, c, v) in &n_op.entries {
            if r != c {
                if v.norm() > 1e-10 {
                    return Err(Error::InvalidGate("number operator is not diagonal in the constrained basis".into()));
                }
            } else {
                diag[r] = v.re;
            }
        }
        let mut sectors: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, d) in diag.into_iter().enumerate() {
            let nf = d.round();
            if (d - nf).abs() > 1e-10 {
                return Err(Error::InvalidGate(format!("non-integer fermion number {d}")));
            }
            sectors.entry(nf as usize).or_default().push(k);
        }
        Ok(sectors)
    }

    /// Embeds coefficients over a subset of basis vectors into the full register.
    pub fn embed(&self, indices: &[usize], coeffs: &CVector) -> SparseState {
        let entries = indices
            .iter()
            .zip(coeffs.iter())
            .flat_map(|(&k, &c)| self.vectors[k].iter().map(move |&(i, a)| (i, a * c)));
        SparseState::from_entries(self.n_qubits, entries).expect("register fits")
    }

    /// Coordinates `<v_k|psi>` of a register state over the given basis
    /// indices. Components outside the span are dropped.
    pub fn coefficients(&self, indices: &[usize], psi: &SparseState) -> CVector {
        let mut pos = HashMap::with_capacity(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            pos.insert(i, k);
        }
        let mut out = CVector::from_element(indices.len(), ZERO);
        for (i, a) in psi.entries() {
            if let Some(&(k, w)) = self.lookup.get(&i) {
                if let Some(&slot) = pos.get(&k) {
                    out[slot] += w.conj() * a;
                }
            }
        }
        out
    }

    /// Matrix of a (not necessarily unitary) local operator between the
    /// given basis vectors, `<v_i|M|v_j>`.
    pub fn restrict_local(&self, indices: &[usize], m: &CMatrix, targets: &[usize]) -> CMatrix {
        let mut out = CMatrix::zeros(indices.len(), indices.len());
        for (j, &k) in indices.iter().enumerate() {
            let mut v = self.vector_state(k);
            v.apply_matrix_unchecked(m, targets);
            out.set_column(j, &self.coefficients(indices, &v));
        }
        out
    }

    /// Full sorted spectrum of `op` restricted to the given basis indices.
    pub fn spectrum(&self, op: &PauliSum, indices: &[usize]) -> Result<Vec<f64>> {
        let m = self.project_operator(op)?.restrict(indices);
        Ok(hermitian_eigen(&m.to_dense()).0)
    }

    pub fn ground_in_sector(&self, h: &PauliSum, spec: &LatticeSpec, n_f: usize) -> Result<SectorGround> {
        let sectors = self.number_sectors(spec)?;
        let indices = sectors.get(&n_f).ok_or(Error::EmptySector(n_f))?;
        let hm = self.project_operator(h)?.restrict(indices);
        let (energy, v) = match EigenStrategy::for_dim(indices.len()) {
            EigenStrategy::Dense => {
                let (vals, vecs) = hermitian_eigen(&hm.to_dense());
                (vals[0], vecs.column(0).into_owned())
            }
            EigenStrategy::Lanczos => lanczos_ground(hm.dim, |x| hm.matvec(x), 0x5eed)?,
        };
        let r = hm.matvec(&v) - &v * Complex64::new(energy, 0.0);
        let state = self.embed(indices, &v);
        debug_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
        Ok(SectorGround { energy, residual: r.norm(), state })
    }
}

/// Lowest eigenpair of `h` in the constrained space with `n_f` fermions.
pub fn ground_in_sector(h: &PauliSum, spec: &LatticeSpec, cs: &ConstraintSet, n_f: usize) -> Result<SectorGround> {
    constrained_basis(cs)?.ground_in_sector(h, spec, n_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_string_matrix, pauli_sum_matrix};
    use crate::pauli::{constraint_set, tv_hamiltonian};

    fn spec(lx: usize, ly: usize) -> LatticeSpec {
        LatticeSpec::new(lx, ly).unwrap()
    }

    #[test]
    fn dimension_2x2_matches_projector_rank() {
        // Oracle: rank of the dense projector product on 8 qubits.
        let s = spec(2, 2);
        let cs = constraint_set(&s);
        let dim = 1 << 8;
        let mut p = CMatrix::identity(dim, dim);
        for st in &cs.stabilizers {
            let m = pauli_string_matrix(&st.string);
            p = &p
                * (CMatrix::identity(dim, dim) + m * Complex64::new(st.target as f64, 0.0))
                * Complex64::new(0.5, 0.0);
        }
        let trace: f64 = (0..dim).map(|i| p[(i, i)].re).sum();
        // The loop targets fix the fermion parity, so only half of the 2^N
        // Fock states survive.
        assert!((trace - 8.0).abs() < 1e-9, "trace {trace}");
        let basis = constrained_basis(&cs).unwrap();
        assert_eq!(basis.dim(), 8);
    }

    #[test]
    fn basis_vectors_are_orthonormal_and_satisfy_constraints() {
        let s = spec(2, 4);
        let cs = constraint_set(&s);
        let basis = constrained_basis(&cs).unwrap();
        assert_eq!(basis.dim(), 128);
        for k in (0..basis.dim()).step_by(17) {
            let v = basis.vector_state(k);
            assert!((v.norm() - 1.0).abs() < 1e-10);
            for st in &cs.stabilizers {
                let e = v.expval_string(&st.string).unwrap();
                assert!((e.re - st.target as f64).abs() < 1e-10);
            }
            let w = basis.vector_state((k + 5) % basis.dim());
            assert!(v.inner(&w).norm() < 1e-12);
        }
    }

    #[test]
    fn inconsistent_targets_give_empty_subspace() {
        let s = spec(2, 2);
        let mut cs = constraint_set(&s);
        // The same loop demanded at both eigenvalues.
        let extra = cs.stabilizers.last().unwrap().clone();
        let mut flipped = extra.clone();
        flipped.target = -extra.target;
        cs.stabilizers.push(flipped);
        assert!(matches!(constrained_basis(&cs), Err(Error::EmptySubspace)));
    }

    #[test]
    fn projected_hamiltonian_matches_dense_on_2x2() {
        let s = spec(2, 2);
        let cs = constraint_set(&s);
        let basis = constrained_basis(&cs).unwrap();
        let h = tv_hamiltonian(&s, 1.0, 2.0, &[]);
        let hp = basis.project_operator(&h).unwrap().to_dense();
        let hd = pauli_sum_matrix(&h);
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                let vi = basis.vector_state(i).to_dense().unwrap();
                let vj = basis.vector_state(j).to_dense().unwrap();
                let e: Complex64 = CVector::from_column_slice(vi.amplitudes())
                    .dotc(&(&hd * CVector::from_column_slice(vj.amplitudes())));
                assert!((e - hp[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn vacuum_sector_energy_is_zero() {
        let s = spec(2, 4);
        let cs = constraint_set(&s);
        let g = ground_in_sector(&tv_hamiltonian(&s, 0.7, 2.0, &[]), &s, &cs, 0).unwrap();
        assert!(g.energy.abs() < 1e-12);
    }

    #[test]
    fn classical_limit_two_fermions() {
        let s = spec(2, 4);
        let cs = constraint_set(&s);
        let g = ground_in_sector(&tv_hamiltonian(&s, 0.0, 1.5, &[]), &s, &cs, 2).unwrap();
        // Two non-adjacent sites exist on 2x4, so the classical minimum is zero.
        assert!(g.energy.abs() < 1e-12);
        assert!(g.residual < 1e-8);
    }
}
