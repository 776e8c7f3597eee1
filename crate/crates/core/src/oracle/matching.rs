use std::collections::BTreeMap;

use crate::error::Result;
use crate::lattice::{LatticeSpec, Site};
use crate::pauli::{constraint_set, tv_hamiltonian};
use crate::statevec::constrained_basis;

use super::{ed_spectrum, BCSector};

/// Per-sector spectral deviations and the best sector.
#[derive(Clone, Debug)]
pub struct SectorMatch {
    /// Fermion numbers compared.
    pub n_fs: Vec<usize>,
    /// Max elementwise deviation per boundary sector; infinite when the
    /// sector sizes differ.
    pub deviations: Vec<(BCSector, f64)>,
}

impl SectorMatch {
    pub fn best(&self) -> (BCSector, f64) {
        *self.deviations.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("four sectors")
    }

    /// The best sector, if its deviation is within `tol`.
    pub fn matched(&self, tol: f64) -> Option<BCSector> {
        let (s, d) = self.best();
        (d < tol).then_some(s)
    }
}

/// Spectra of the encoded Hamiltonian in the constrained space, keyed by
/// fermion number. `only` restricts to one sector.
pub fn encoded_sector_spectrum(
    spec: &LatticeSpec,
    t: f64,
    v: f64,
    potentials: &[(Site, f64)],
    only: Option<usize>,
) -> Result<BTreeMap<usize, Vec<f64>>> {
    let basis = constrained_basis(&constraint_set(spec))?;
    let h = tv_hamiltonian(spec, t, v, potentials);
    let mut out = BTreeMap::new();
    for (n_f, idx) in basis.number_sectors(spec)? {
        if only.is_none_or(|k| k == n_f) {
            out.insert(n_f, basis.spectrum(&h, &idx)?);
        }
    }
    Ok(out)
}

/// The boundary sector whose `n_f` spectrum is closest to `encoded`
/// (sorted), with its deviation. Sectors of a different size are skipped.
pub fn closest_sector(
    spec: &LatticeSpec,
    t: f64,
    v: f64,
    potentials: &[(Site, f64)],
    n_f: usize,
    encoded: &[f64],
) -> Result<Option<(BCSector, f64, Vec<f64>)>> {
    let mut best: Option<(BCSector, f64, Vec<f64>)> = None;
    for sector in BCSector::all() {
        let ed = ed_spectrum(spec, t, v, potentials, sector, n_f)?.eigenvalues;
        if ed.len() != encoded.len() {
            continue;
        }
        let dev = ed.iter().zip(encoded).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| dev < b.1) {
            best = Some((sector, dev, ed));
        }
    }
    Ok(best)
}

/// Compares the encoded spectrum against the fermionic one in all four
/// boundary sectors. With `only = None` every fermion number present in
/// the constrained space is compared.
pub fn match_sector(
    spec: &LatticeSpec,
    t: f64,
    v: f64,
    potentials: &[(Site, f64)],
    only: Option<usize>,
) -> Result<SectorMatch> {
    let encoded = encoded_sector_spectrum(spec, t, v, potentials, only)?;
    let mut deviations = Vec::new();
    // A requested sector absent from the constrained space matches nothing.
    let missing = only.is_some_and(|k| !encoded.contains_key(&k));
    for sector in BCSector::all() {
        let mut worst: f64 = if missing { f64::INFINITY } else { 0.0 };
        for (&n_f, enc) in &encoded {
            let ed = ed_spectrum(spec, t, v, potentials, sector, n_f)?.eigenvalues;
            if ed.len() != enc.len() {
                worst = f64::INFINITY;
                break;
            }
            worst = enc.iter().zip(&ed).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
        }
        deviations.push((sector, worst));
    }
    Ok(SectorMatch { n_fs: encoded.keys().copied().collect(), deviations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_matches_one_sector() {
        let s = LatticeSpec::new(2, 2).unwrap();
        for v in [0.0, 2.0] {
            let m = match_sector(&s, 1.0, v, &[], None).unwrap();
            assert!(m.matched(1e-8).is_some(), "{:?}", m.deviations);
            assert_eq!(m.n_fs, vec![0, 2, 4]);
        }
    }

    #[test]
    fn wrong_rho_on_odd_lattice_matches_nothing() {
        let s = LatticeSpec::with_rho(3, 3, 1).unwrap();
        let m = match_sector(&s, 1.0, 2.0, &[], Some(2)).unwrap();
        assert!(m.matched(1e-8).is_none(), "{:?}", m.deviations);
    }
}
