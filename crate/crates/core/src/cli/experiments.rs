//! Experiment drivers shared by the CLI and the test suites.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::circuits::{schedule, trotter_step, vacuum_circuit};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Site};
use crate::oracle::{closest_sector, ed_ground, ed_propagate, BCSector};
use crate::pauli::{constraint_set, tv_hamiltonian};
use crate::statevec::{constrained_basis, exact_propagate, KrylovConfig, StateVector};

/// Quench: prepare the ground state of `t` with `V = 0` and a potential
/// `-k` on the origin and its upper neighbour, then evolve under `(t, v)`.
#[derive(Clone, Debug)]
pub struct QuenchParams {
    pub spec: LatticeSpec,
    pub t: f64,
    pub v: f64,
    pub k: f64,
    pub n_f: usize,
    pub dt: f64,
    pub tmax: f64,
}

impl QuenchParams {
    pub fn initial_potentials(&self) -> Vec<(Site, f64)> {
        vec![(Site::new(0, 0), -self.k), (self.spec.shift(Site::new(0, 0), 0, 1), -self.k)]
    }

    pub fn times(&self) -> Vec<f64> {
        let n = (self.tmax / self.dt).round() as usize;
        (0..=n).map(|k| k as f64 * self.dt).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuenchRow {
    pub time: f64,
    pub rx: usize,
    pub ry: usize,
    pub occ_trotter: f64,
    pub occ_exact_encoded: f64,
    pub occ_exact_fermionic: f64,
}

#[derive(Clone, Debug)]
pub struct QuenchResult {
    pub rows: Vec<QuenchRow>,
    pub sector: BCSector,
    /// Largest disagreement between the two exact references.
    pub reference_gap: f64,
    /// Largest Trotter error against the encoded exact reference.
    pub trotter_error: f64,
}

fn occupations(spec: &LatticeSpec, st: &StateVector) -> Vec<f64> {
    let mut occ = vec![0.0; spec.n_sites()];
    for (i, a) in st.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (r, o) in occ.iter_mut().enumerate() {
            if i >> r & 1 == 1 {
                *o += p;
            }
        }
    }
    occ
}

pub fn run_quench(p: &QuenchParams) -> Result<QuenchResult> {
    if !(p.dt > 0.0 && p.tmax > 0.0) {
        return Err(Error::Config("dt and tmax must be positive".into()));
    }
    let spec = &p.spec;
    let pots = p.initial_potentials();
    let h0 = tv_hamiltonian(spec, p.t, 0.0, &pots);
    let h1 = tv_hamiltonian(spec, p.t, p.v, &[]);

    let basis = constrained_basis(&constraint_set(spec))?;
    let sectors = basis.number_sectors(spec)?;
    let idx = sectors.get(&p.n_f).ok_or(Error::EmptySector(p.n_f))?;
    let encoded_spectrum = basis.spectrum(&h0, idx)?;
    let sector = match closest_sector(spec, p.t, 0.0, &pots, p.n_f, &encoded_spectrum)? {
        Some((s, dev, _)) if dev < 1e-8 => s,
        _ => return Err(Error::Config("no boundary sector reproduces the encoded spectrum".into())),
    };
    if encoded_spectrum.len() > 1 && encoded_spectrum[1] - encoded_spectrum[0] < 1e-8 {
        return Err(Error::Config("initial ground state is degenerate".into()));
    }

    let ground = basis.ground_in_sector(&h0, spec, p.n_f)?;
    let initial = ground.state.to_dense()?;
    let times = p.times();

    let (_, psi0) = ed_ground(spec, p.t, 0.0, &pots, sector, p.n_f)?;
    let fermionic = ed_propagate(spec, p.t, p.v, &[], &psi0, sector, p.n_f, &times)?;

    let step = trotter_step(spec, p.t, p.v, p.dt);
    let mut exact = initial.clone();
    let mut trotter = initial;
    let mut rows = Vec::with_capacity(times.len() * spec.n_sites());
    let (mut gap, mut terr): (f64, f64) = (0.0, 0.0);
    for (k, &time) in times.iter().enumerate() {
        if k > 0 {
            exact = exact_propagate(&exact, &h1, p.dt, KrylovConfig::default())?;
            step.apply(&mut trotter)?;
        }
        let (oe, ot) = (occupations(spec, &exact), occupations(spec, &trotter));
        for (r, site) in spec.sites().enumerate() {
            let of = fermionic.occupations[k][r];
            gap = gap.max((oe[r] - of).abs());
            terr = terr.max((ot[r] - oe[r]).abs());
            rows.push(QuenchRow {
                time,
                rx: site.rx,
                ry: site.ry,
                occ_trotter: ot[r],
                occ_exact_encoded: oe[r],
                occ_exact_fermionic: of,
            });
        }
    }
    Ok(QuenchResult { rows, sector, reference_gap: gap, trotter_error: terr })
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthRow {
    pub l: usize,
    pub trotter_two_qubit_depth: usize,
    pub trotter_counts: BTreeMap<usize, usize>,
    pub trotter_total_gates: usize,
    pub vacuum_two_qubit_gates: usize,
}

/// Trotter-step and vacuum resources on `L x L` lattices.
pub fn depth_table(sizes: &[usize]) -> Result<Vec<DepthRow>> {
    sizes
        .iter()
        .map(|&l| {
            let spec = LatticeSpec::new(l, l)?;
            let r = schedule(&trotter_step(&spec, 1.0, 1.0, 0.1));
            let vac = schedule(&vacuum_circuit(&spec));
            Ok(DepthRow {
                l,
                trotter_two_qubit_depth: r.two_qubit_depth,
                trotter_total_gates: r.n_gates,
                trotter_counts: r.counts_by_arity,
                vacuum_two_qubit_gates: vac.multi_qubit_gates(),
            })
        })
        .collect()
}

/// Least-squares `c` in `gates = c L^2` and the largest relative residual.
pub fn fit_quadratic(points: &[(usize, usize)]) -> (f64, f64) {
    let (num, den) = points.iter().fold((0.0, 0.0), |(n, d), &(l, g)| {
        let l2 = (l * l) as f64;
        (n + g as f64 * l2, d + l2 * l2)
    });
    let c = num / den;
    let worst = points.iter().map(|&(l, g)| (g as f64 - c * (l * l) as f64).abs() / g as f64).fold(0.0, f64::max);
    (c, worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_rows_are_consistent() {
        let rows = depth_table(&[4, 6]).unwrap();
        assert_eq!(rows[0].trotter_two_qubit_depth, rows[1].trotter_two_qubit_depth);
        assert_eq!(rows[0].vacuum_two_qubit_gates, 27);
        assert_eq!(rows[1].vacuum_two_qubit_gates, 75);
        let total: usize = rows[0].trotter_counts.values().sum();
        assert_eq!(total, rows[0].trotter_total_gates);
    }

    #[test]
    fn quadratic_fit_is_exact_on_a_parabola() {
        let (c, r) = fit_quadratic(&[(2, 12), (4, 48), (10, 300)]);
        assert!((c - 3.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn short_quench_references_agree() {
        let p =
            QuenchParams { spec: LatticeSpec::new(2, 4).unwrap(), t: 1.0, v: 3.0, k: 1.0, n_f: 2, dt: 0.1, tmax: 0.5 };
        let r = run_quench(&p).unwrap();
        assert!(r.reference_gap < 1e-8, "{}", r.reference_gap);
        assert_eq!(r.rows.len(), 6 * 8);
        for k in 0..6 {
            let sum: f64 = r.rows[k * 8..(k + 1) * 8].iter().map(|row| row.occ_trotter).sum();
            assert!((sum - 2.0).abs() < 1e-10);
        }
        for row in &r.rows[..8] {
            assert!((row.occ_trotter - row.occ_exact_fermionic).abs() < 1e-10);
        }
    }
}
