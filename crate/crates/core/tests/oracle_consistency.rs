//! The encoded model against closed-form references.

use f2q::oracle::{ed_ground, ed_spectrum, BCSector};
use f2q::pauli::{constraint_set, tv_hamiltonian};
use f2q::statevec::constrained_basis;
use f2q::{LatticeSpec, Site};

/// Free-fermion many-body ground energy: fill the lowest single-particle
/// levels `-2t (cos kx + cos ky)` with momenta twisted by the boundary signs.
fn free_ground(lx: usize, ly: usize, t: f64, n_f: usize, sector: BCSector) -> f64 {
    let shift = |s: i8| if s > 0 { 0.0 } else { 0.5 };
    let mut levels = Vec::new();
    for mx in 0..lx {
        for my in 0..ly {
            let kx = 2.0 * std::f64::consts::PI * (mx as f64 + shift(sector.sx)) / lx as f64;
            let ky = 2.0 * std::f64::consts::PI * (my as f64 + shift(sector.sy)) / ly as f64;
            // Also right for length 2, where both bonds join the same pair.
            levels.push(-2.0 * t * (kx.cos() + ky.cos()));
        }
    }
    levels.sort_by(f64::total_cmp);
    levels[..n_f].iter().sum()
}

#[test]
fn oracle_reproduces_free_fermions() {
    for (lx, ly) in [(2, 2), (3, 3), (4, 2), (2, 4)] {
        let spec = LatticeSpec::new(lx, ly).unwrap();
        for sector in BCSector::all() {
            for n_f in [1, 2, 3] {
                let (e, _) = ed_ground(&spec, 1.0, 0.0, &[], sector, n_f).unwrap();
                let free = free_ground(lx, ly, 1.0, n_f, sector);
                assert!((e - free).abs() < 1e-10, "{lx}x{ly} {sector} n_f={n_f}: {e} vs {free}");
            }
        }
    }
}

#[test]
fn atomic_limit_counts_bonds() {
    // t = 0: two fermions cost V only when adjacent, so the spectrum is a
    // count of neighbouring and non-neighbouring placements.
    let spec = LatticeSpec::new(3, 3).unwrap();
    let v = 1.7;
    let spectrum = ed_spectrum(&spec, 0.0, v, &[], BCSector::PERIODIC, 2).unwrap().eigenvalues;
    let bonds = spectrum.iter().filter(|&&e| (e - v).abs() < 1e-12).count();
    let free = spectrum.iter().filter(|&&e| e.abs() < 1e-12).count();
    assert_eq!(bonds, spec.edges().len());
    assert_eq!(bonds + free, 9 * 8 / 2);
}

#[test]
fn encoded_ground_energy_matches_oracle_with_potentials() {
    let spec = LatticeSpec::new(2, 4).unwrap();
    let pots = [(Site::new(0, 0), -1.0), (Site::new(0, 1), -1.0)];
    let basis = constrained_basis(&constraint_set(&spec)).unwrap();
    for v in [0.0, 1.5] {
        let h = tv_hamiltonian(&spec, 1.0, v, &pots);
        let g = basis.ground_in_sector(&h, &spec, 2).unwrap();
        let (e, _) = ed_ground(&spec, 1.0, v, &pots, BCSector::PERIODIC, 2).unwrap();
        assert!((g.energy - e).abs() < 1e-9, "V={v}: {} vs {e}", g.energy);
    }
}
