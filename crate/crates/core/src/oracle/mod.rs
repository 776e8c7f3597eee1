//! Exact diagonalization of the spinless t-V model directly in the fermionic
//! Fock space. Shares only the lattice geometry with the encoded side.

mod matching;

pub use matching::{closest_sector, encoded_sector_spectrum, match_sector, SectorMatch};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Direction, LatticeSpec, Site};

/// Largest lattice the oracle accepts.
pub const MAX_SITES: usize = 12;
/// Largest sector handed to the dense eigensolver.
pub const MAX_SECTOR_DIM: usize = 4096;

/// Occupation bitmask over sites in row-major order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState {
    pub bits: u64,
}

impl FockState {
    pub fn count(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn occupied(self, site: usize) -> bool {
        self.bits >> site & 1 == 1
    }
}

/// Signs multiplying hops across the x and y boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BCSector {
    pub sx: i8,
    pub sy: i8,
}

impl BCSector {
    pub const PERIODIC: BCSector = BCSector { sx: 1, sy: 1 };

    pub fn all() -> [BCSector; 4] {
        [BCSector { sx: 1, sy: 1 }, BCSector { sx: 1, sy: -1 }, BCSector { sx: -1, sy: 1 }, BCSector { sx: -1, sy: -1 }]
    }
}

impl std::fmt::Display for BCSector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = |v: i8| if v > 0 { '+' } else { '-' };
        write!(f, "({},{})", s(self.sx), s(self.sy))
    }
}

/// Fixed-number Fock basis, sorted by bitmask.
#[derive(Clone, Debug)]
pub struct FockBasis {
    pub n_sites: usize,
    pub n_f: usize,
    pub states: Vec<FockState>,
}

impl FockBasis {
    pub fn new(n_sites: usize, n_f: usize) -> Result<Self> {
        if n_sites > MAX_SITES {
            return Err(Error::SectorTooLarge(n_sites, MAX_SITES));
        }
        if n_f > n_sites {
            return Err(Error::EmptySector(n_f));
        }
        let states: Vec<FockState> =
            (0u64..1 << n_sites).filter(|b| b.count_ones() as usize == n_f).map(|bits| FockState { bits }).collect();
        if states.len() > MAX_SECTOR_DIM {
            return Err(Error::SectorTooLarge(states.len(), MAX_SECTOR_DIM));
        }
        Ok(Self { n_sites, n_f, states })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index(&self, s: FockState) -> Option<usize> {
        self.states.binary_search(&s).ok()
    }
}

/// Real symmetric sector Hamiltonian in sparse row form.
#[derive(Clone, Debug)]
pub struct FockHamiltonian {
    pub basis: FockBasis,
    /// `rows[i]` lists `(j, H_ij)`; duplicates already summed.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl FockHamiltonian {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] += v;
            }
        }
        m
    }

    pub fn matvec(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(
            self.dim(),
            self.rows.iter().map(|row| row.iter().map(|&(j, v)| x[j] * v).sum::<Complex64>()),
        )
    }

    /// `<psi| n_site |psi>` for every site.
    pub fn occupations(&self, psi: &DVector<Complex64>) -> Vec<f64> {
        (0..self.basis.n_sites)
            .map(|r| {
                self.basis.states.iter().zip(psi.iter()).filter(|(s, _)| s.occupied(r)).map(|(_, a)| a.norm_sqr()).sum()
            })
            .collect()
    }
}

/// `c†_to c_from` on `s`: the new state and the fermionic sign from the
/// occupied sites strictly between the two in row-major order.
fn hop(s: FockState, from: usize, to: usize) -> Option<(FockState, f64)> {
    if !s.occupied(from) || (from != to && s.occupied(to)) {
        return None;
    }
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    let between = if hi > lo + 1 { (s.bits >> (lo + 1)) & ((1u64 << (hi - lo - 1)) - 1) } else { 0 };
    let sign = if between.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((FockState { bits: s.bits & !(1 << from) | 1 << to }, sign))
}

/// `H = -t sum_edges s_e (c†_r c_r' + h.c.) + V sum_edges n_r n_r' + sum mu_r n_r`
/// with `s_e` the sector sign on boundary-crossing edges.
pub fn ed_hamiltonian(
    spec: &LatticeSpec,
    t: f64,
    v: f64,
    potentials: &[(Site, f64)],
    sector: BCSector,
    n_f: usize,
) -> Result<FockHamiltonian> {
    let basis = FockBasis::new(spec.n_sites(), n_f)?;
    let mut mu = vec![0.0; spec.n_sites()];
    for &(s, m) in potentials {
        mu[spec.site_index(spec.site(s.rx as i64, s.ry as i64))] += m;
    }
    let edges: Vec<(usize, usize, f64)> = spec
        .edges()
        .into_iter()
        .map(|e| {
            let sign = match (spec.is_wraparound(e), e.direction) {
                (false, _) => 1.0,
                (true, Direction::X) => sector.sx as f64,
                (true, Direction::Y) => sector.sy as f64,
            };
            (spec.site_index(e.origin), spec.site_index(spec.edge_target(e)), sign)
        })
        .collect();

    let mut rows = Vec::with_capacity(basis.dim());
    for &s in &basis.states {
        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut diag = 0.0;
        for &(a, b, sign) in &edges {
            if s.occupied(a) && s.occupied(b) {
                diag += v;
            }
            for (from, to) in [(a, b), (b, a)] {
                if let Some((s2, fs)) = hop(s, from, to) {
                    row.push((basis.index(s2).expect("hop conserves number"), -t * sign * fs));
                }
            }
        }
        diag += (0..spec.n_sites()).filter(|&r| s.occupied(r)).map(|r| mu[r]).sum::<f64>();
        row.push((basis.index(s).unwrap(), diag));
        row.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for (j, x) in row {
            match merged.last_mut() {
                Some((k, y)) if *k == j => *y += x,
                _ => merged.push((j, x)),
            }
        }
        merged.retain(|&(_, x)| x != 0.0);
        rows.push(merged);
    }
    Ok(FockHamiltonian { basis, rows })
}

/// Sorted eigenvalues, optional eigenvectors (columns) and an optional
/// occupation trajectory `occupations[k][site]` on `times`.
#[derive(Clone, Debug, Default)]
pub struct EDResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<DMatrix<f64>>,
    pub times: Vec<f64>,
    pub occupations: Vec<Vec<f64>>,
}

fn sorted_eigen(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(h.nrows(), h.nrows(), |i, k| eig.eigenvectors[(i, order[k])]);
    (vals, vecs)
}

/// Full spectrum and eigenvectors of one sector.
pub fn ed_spectrum(
    spec: &LatticeSpec,
    t: f64,
    v: f64,
    potentials: &[(Site, f64)],
    sector: BCSector,
    n_f: usize,
) -> Result<EDResult> {
    let h = ed_hamiltonian(spec, t, v, potentials, sector, n_f)?;
    let (eigenvalues, vecs) = sorted_eigen(&h.to_dense());
    Ok(EDResult { eigenvalues, eigenvectors: Some(vecs), ..Default::default() })
}

/// Lowest eigenpair of the sector.
pub fn ed_ground(
    spec: &LatticeSpec,
    t: f64,
    v: f64,
    potentials: &[(Site, f64)],
    sector: BCSector,
    n_f: usize,
) -> Result<(f64, DVector<Complex64>)> {
    let r = ed_spectrum(spec, t, v, potentials, sector, n_f)?;
    let vecs = r.eigenvectors.expect("requested");
    let psi = vecs.column(0).map(|x| Complex64::new(x, 0.0));
    Ok((r.eigenvalues[0], psi))
}

/// Evolves `initial` under the sector Hamiltonian and records `<n_r(t)>`.
/// Uses the exact eigendecomposition, so every time point is independent.
#[allow(clippy::too_many_arguments)]
pub fn ed_propagate(
    spec: &LatticeSpec,
    t: f64,
    v: f64,
    potentials: &[(Site, f64)],
    initial: &DVector<Complex64>,
    sector: BCSector,
    n_f: usize,
    times: &[f64],
) -> Result<EDResult> {
    let h = ed_hamiltonian(spec, t, v, potentials, sector, n_f)?;
    if initial.len() != h.dim() {
        return Err(Error::SizeMismatch { expected: h.dim(), got: initial.len() });
    }
    let (vals, vecs) = sorted_eigen(&h.to_dense());
    let vc = vecs.map(|x| Complex64::new(x, 0.0));
    let coeffs = vc.transpose() * initial;
    let mut occupations = Vec::with_capacity(times.len());
    for &time in times {
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(&vals).map(|(c, e)| c * Complex64::from_polar(1.0, -e * time)),
        );
        let psi = &vc * phased;
        let drift = (psi.norm() - initial.norm()).abs();
        if drift > 1e-10 {
            return Err(Error::KrylovNotConverged(format!("norm drift {drift:.3e} at t = {time}")));
        }
        occupations.push(h.occupations(&psi));
    }
    Ok(EDResult { eigenvalues: vals, eigenvectors: None, times: times.to_vec(), occupations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(lx: usize, ly: usize) -> LatticeSpec {
        LatticeSpec::new(lx, ly).unwrap()
    }

    /// Single-particle hopping matrix with the same boundary signs.
    fn hopping_matrix(spec: &LatticeSpec, t: f64, sector: BCSector) -> DMatrix<f64> {
        let n = spec.n_sites();
        let mut m = DMatrix::zeros(n, n);
        for e in spec.edges() {
            let (a, b) = (spec.site_index(e.origin), spec.site_index(spec.edge_target(e)));
            let s = if !spec.is_wraparound(e) {
                1.0
            } else if e.direction == Direction::X {
                sector.sx as f64
            } else {
                sector.sy as f64
            };
            m[(a, b)] -= t * s;
            m[(b, a)] -= t * s;
        }
        m
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(ed_hamiltonian(&spec(2, 2), 1.0, 0.0, &[], BCSector::PERIODIC, 2).unwrap().dim(), 6);
        assert_eq!(FockBasis::new(8, 2).unwrap().dim(), 28);
        assert_eq!(FockBasis::new(9, 2).unwrap().dim(), 36);
        assert!(FockBasis::new(4, 5).is_err());
        assert!(FockBasis::new(16, 2).is_err());
    }

    #[test]
    fn hamiltonian_is_exactly_symmetric() {
        for sector in BCSector::all() {
            let h = ed_hamiltonian(&spec(2, 4), 1.0, 2.5, &[(Site::new(0, 0), -1.0)], sector, 3).unwrap().to_dense();
            assert_eq!((&h - h.transpose()).amax(), 0.0);
        }
    }

    #[test]
    fn free_fermions_fill_the_lowest_orbitals() {
        for (lx, ly) in [(2, 2), (2, 4), (3, 3), (4, 2)] {
            let s = spec(lx, ly);
            for sector in BCSector::all() {
                let (sp, _) = sorted_eigen(&hopping_matrix(&s, 1.0, sector));
                for n_f in 0..=3 {
                    let (e, _) = ed_ground(&s, 1.0, 0.0, &[], sector, n_f).unwrap();
                    let expect: f64 = sp[..n_f].iter().sum();
                    assert!((e - expect).abs() < 1e-10, "{lx}x{ly} {sector} n_f={n_f}: {e} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn empty_sector_has_zero_energy() {
        let (e, psi) = ed_ground(&spec(2, 4), 1.0, 3.0, &[], BCSector::PERIODIC, 0).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(psi.len(), 1);
    }

    #[test]
    fn classical_limit() {
        // t = 0: diagonal, spectrum = V times the adjacent-pair counts.
        let s = spec(2, 4);
        let h = ed_hamiltonian(&s, 0.0, 2.0, &[], BCSector::PERIODIC, 2).unwrap();
        let d = h.to_dense();
        assert_eq!((&d - DMatrix::from_diagonal(&d.diagonal())).amax(), 0.0);
        let mut expected: Vec<f64> = h
            .basis
            .states
            .iter()
            .map(|st| {
                s.edges()
                    .iter()
                    .filter(|e| st.occupied(s.site_index(e.origin)) && st.occupied(s.site_index(s.edge_target(**e))))
                    .count() as f64
                    * 2.0
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        let r = ed_spectrum(&s, 0.0, 2.0, &[], BCSector::PERIODIC, 2).unwrap();
        assert_eq!(r.eigenvalues, expected);
        assert_eq!(r.eigenvalues[0], 0.0);
    }

    #[test]
    fn spectrum_is_symmetric_under_t_sign_on_bipartite_lattices() {
        let s = spec(2, 2);
        for sector in BCSector::all() {
            for n_f in 0..=4 {
                let a = ed_spectrum(&s, 1.0, 1.5, &[], sector, n_f).unwrap().eigenvalues;
                let b = ed_spectrum(&s, -1.0, 1.5, &[], sector, n_f).unwrap().eigenvalues;
                assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn jordan_wigner_sign_counts_sites_in_between() {
        let s = FockState { bits: 0b10110 };
        assert_eq!(hop(s, 1, 4), None);
        let (s2, sign) = hop(s, 1, 3).unwrap();
        assert_eq!(s2.bits, 0b11100);
        assert_eq!(sign, -1.0);
        let (_, sign) = hop(s, 4, 0).unwrap();
        assert_eq!(sign, 1.0);
    }

    #[test]
    fn propagation_conserves_number_and_starts_at_initial() {
        let s = spec(2, 4);
        let pots = [(Site::new(0, 0), -1.0), (Site::new(0, 1), -1.0)];
        let (_, psi0) = ed_ground(&s, 1.0, 0.0, &pots, BCSector::PERIODIC, 2).unwrap();
        let h0 = ed_hamiltonian(&s, 1.0, 0.0, &pots, BCSector::PERIODIC, 2).unwrap();
        let times: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
        let r = ed_propagate(&s, 1.0, 3.0, &[], &psi0, BCSector::PERIODIC, 2, &times).unwrap();
        let init = h0.occupations(&psi0);
        assert!(r.occupations[0].iter().zip(&init).all(|(a, b)| (a - b).abs() < 1e-12));
        for occ in &r.occupations {
            assert!((occ.iter().sum::<f64>() - 2.0).abs() < 1e-10);
        }
        // Energy under the quench Hamiltonian is constant.
        let h = ed_hamiltonian(&s, 1.0, 3.0, &[], BCSector::PERIODIC, 2).unwrap();
        let e0 = psi0.dotc(&h.matvec(&psi0)).re;
        let (vals, vecs) = sorted_eigen(&h.to_dense());
        let vc = vecs.map(|x| Complex64::new(x, 0.0));
        let c = vc.transpose() * &psi0;
        let psi = &vc
            * DVector::from_iterator(
                c.len(),
                c.iter().zip(&vals).map(|(a, e)| a * Complex64::from_polar(1.0, -e * 1.7)),
            );
        assert!((psi.dotc(&h.matvec(&psi)).re - e0).abs() < 1e-10);
    }
}
