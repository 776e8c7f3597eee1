//! Variational ground-state search with the A-gate and Hamiltonian
//! variational ansatzes, optimized by Adam on finite-difference gradients.

mod compiled;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{
    agate_parameter_count, ansatz_agate, ansatz_hv, hv_parameter_count, pair_creation, vacuum_circuit, Circuit,
    HvGranularity,
};
use crate::error::{Error, Result};
use crate::lattice::{Edge, LatticeSpec, Site};
use crate::linalg::{CMatrix, CVector};
use crate::oracle::{closest_sector, BCSector};
use crate::pauli::{constraint_set, number_sum, tv_hamiltonian, PauliSum};
use crate::statevec::{
    constrained_basis, hermitian_eigen, max_constraint_violation, QuantumState, SparseState, StateVector,
};

use compiled::{agate_ops, hv_ops, SectorProgram};

/// Relative errors below this are reported as zero.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-6;
/// Spectral agreement required to accept a boundary sector as the reference.
pub const SECTOR_MATCH_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzKind {
    Agate,
    Hv,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "scheme")]
pub enum InitScheme {
    /// Independent uniform draws from `[-half_width, half_width]`.
    Uniform {
        half_width: f64,
    },
    Zeros,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VqeConfig {
    pub spec: LatticeSpec,
    pub t: f64,
    pub v: f64,
    pub n_f: usize,
    pub ansatz: AnsatzKind,
    pub layers: usize,
    pub granularity: HvGranularity,
    /// Edges receiving a fermion pair on top of the vacuum (A-gate ansatz).
    pub pair_edges: Vec<Edge>,
    pub init: InitScheme,
}

impl VqeConfig {
    /// Defaults: two fermions on the x-edge at the origin, per-edge HV
    /// angles, uniform initialization in `[-0.1, 0.1]`.
    pub fn new(spec: LatticeSpec, t: f64, v: f64, ansatz: AnsatzKind, layers: usize) -> Self {
        Self {
            spec,
            t,
            v,
            n_f: 2,
            ansatz,
            layers,
            granularity: HvGranularity::PerEdge,
            pair_edges: vec![Edge::x(Site::new(0, 0))],
            init: InitScheme::Uniform { half_width: 0.1 },
        }
    }

    pub fn n_params(&self) -> usize {
        match self.ansatz {
            AnsatzKind::Agate => agate_parameter_count(&self.spec, self.layers),
            AnsatzKind::Hv => hv_parameter_count(&self.spec, self.layers, self.granularity),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ansatz == AnsatzKind::Agate && self.n_f != 2 * self.pair_edges.len() {
            return Err(Error::Config(format!(
                "n_f = {} does not match {} pair-creation edges",
                self.n_f,
                self.pair_edges.len()
            )));
        }
        if self.n_f % 2 == 1 {
            return Err(Error::Config(format!("n_f must be even, got {}", self.n_f)));
        }
        if self.n_f > self.spec.n_sites() {
            return Err(Error::EmptySector(self.n_f));
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> PauliSum {
        tv_hamiltonian(&self.spec, self.t, self.v, &[])
    }

    /// The ansatz as a gate circuit.
    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        match self.ansatz {
            AnsatzKind::Agate => ansatz_agate(&self.spec, self.layers, params),
            AnsatzKind::Hv => ansatz_hv(&self.spec, self.layers, params, self.granularity),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Step size at step `k` is `learning_rate / (1 + decay * k)`.
    pub decay: f64,
    pub max_steps: usize,
    pub seed: u64,
    /// Stop once the energy moved less than `tolerance` over `window` steps.
    pub window: usize,
    pub tolerance: f64,
    /// Independent initializations; the best run is kept.
    pub restarts: usize,
    pub fd_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-2,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            decay: 1e-3,
            max_steps: 5000,
            seed: 7,
            window: 100,
            tolerance: 1e-11,
            restarts: 1,
            fd_step: 1e-4,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && self.beta1 > 0.0
            && (0.0..1.0).contains(&self.beta2)
            && self.beta2 > 0.0
            && self.epsilon > 0.0
            && self.decay >= 0.0
            && self.fd_step > 0.0
            && self.restarts >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Config("optimizer settings out of range".into()))
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunTrace {
    /// Energy at every optimizer step of the kept run.
    pub energies: Vec<f64>,
    pub best_params: Vec<f64>,
    pub final_energy: f64,
    pub exact_energy: f64,
    pub relative_error: f64,
    /// `relative_error` with values below the floor set to zero.
    pub reported_relative_error: f64,
    pub steps: usize,
    pub converged: bool,
    pub sector: BCSector,
    pub seed: u64,
    /// Worst constraint deviation of the gate-level circuit state at the
    /// initial and final parameters.
    pub max_constraint_violation: f64,
    pub max_number_deviation: f64,
    /// Largest gap between the compiled and gate-level energies.
    pub circuit_energy_mismatch: f64,
    pub wall_seconds: f64,
}

impl RunTrace {
    pub fn respects_variational_bound(&self) -> bool {
        self.final_energy >= self.exact_energy - 1e-9 && self.energies.iter().all(|&e| e >= self.exact_energy - 1e-9)
    }
}

pub fn relative_error(energy: f64, exact: f64) -> f64 {
    if exact.abs() < 1e-12 {
        (energy - exact).abs()
    } else {
        (energy - exact).abs() / exact.abs()
    }
}

pub fn floored(rel: f64) -> f64 {
    if rel < RELATIVE_ERROR_FLOOR {
        0.0
    } else {
        rel
    }
}

/// `(energies, best params, best energy, converged, seed)` of one restart.
type Restart = (Vec<f64>, Vec<f64>, f64, bool, u64);

/// A VQE configuration compiled onto its constrained fixed-number sector.
pub struct VqeProblem {
    pub config: VqeConfig,
    program: SectorProgram,
    /// Initial state on the full register.
    initial_state: SparseState,
    /// Sorted spectrum of the Hamiltonian inside the sector.
    pub sector_spectrum: Vec<f64>,
}

impl VqeProblem {
    pub fn new(config: &VqeConfig) -> Result<Self> {
        config.validate()?;
        let spec = &config.spec;
        let basis = constrained_basis(&constraint_set(spec))?;
        let sectors = basis.number_sectors(spec)?;
        let idx = sectors.get(&config.n_f).ok_or(Error::EmptySector(config.n_f))?.clone();
        let h = basis.project_operator(&config.hamiltonian())?.restrict(&idx).to_dense();
        let (sector_spectrum, _) = hermitian_eigen(&h);

        let (init, initial_state) = match config.ansatz {
            AnsatzKind::Agate => {
                let mut st = SparseState::zero_state(spec.n_qubits())?;
                vacuum_circuit(spec).apply(&mut st)?;
                for &e in &config.pair_edges {
                    pair_creation(spec, e).apply(&mut st)?;
                }
                let coeffs = basis.coefficients(&idx, &st);
                let captured = coeffs.norm_squared();
                if (captured - 1.0).abs() > 1e-10 {
                    return Err(Error::Config(format!(
                        "pair placement leaves the {}-fermion sector (overlap {captured:.6})",
                        config.n_f
                    )));
                }
                (coeffs, st)
            }
            AnsatzKind::Hv => {
                let h0 = basis.project_operator(&tv_hamiltonian(spec, config.t, 0.0, &[]))?.restrict(&idx).to_dense();
                let (_, vecs) = hermitian_eigen(&h0);
                let v0: CVector = vecs.column(0).into_owned();
                let st = basis.embed(&idx, &v0);
                (v0, st)
            }
        };

        let ops = match config.ansatz {
            AnsatzKind::Agate => agate_ops(spec, &basis, &idx, config.layers),
            AnsatzKind::Hv => hv_ops(spec, &basis, &idx, config.layers, config.granularity)?,
        };
        let program = SectorProgram::new(init, h, ops, config.n_params());
        Ok(Self { config: config.clone(), program, initial_state, sector_spectrum })
    }

    pub fn n_params(&self) -> usize {
        self.program.n_params
    }

    pub fn energy(&self, params: &[f64]) -> Result<f64> {
        self.program.energy(params)
    }

    /// Central differences with step `h` on exact energies.
    pub fn gradient(&self, params: &[f64], h: f64) -> Result<Vec<f64>> {
        Ok(self.program.energy_and_gradient(params, h)?.1)
    }

    pub fn energy_and_gradient(&self, params: &[f64], h: f64) -> Result<(f64, Vec<f64>)> {
        self.program.energy_and_gradient(params, h)
    }

    /// Coordinates of the ansatz state in the sector basis.
    pub fn sector_state(&self, params: &[f64]) -> Result<CVector> {
        self.program.state(params)
    }

    pub fn sector_hamiltonian(&self) -> &CMatrix {
        &self.program.hamiltonian
    }

    /// Runs the gate-level circuit on the full register.
    pub fn circuit_state(&self, params: &[f64]) -> Result<StateVector> {
        let mut st = self.initial_state.to_dense()?;
        self.config.circuit(params)?.apply(&mut st)?;
        Ok(st)
    }

    /// `(constraint violation, number deviation, energy gap to the
    /// compiled evaluation)` for the gate-level state.
    pub fn spot_check(&self, params: &[f64]) -> Result<(f64, f64, f64)> {
        let st = self.circuit_state(params)?;
        let viol = max_constraint_violation(&st, &constraint_set(&self.config.spec))?;
        let nf = st.expval(&number_sum(&self.config.spec))?;
        let e = st.expval(&self.config.hamiltonian())?;
        Ok((viol, (nf - self.config.n_f as f64).abs(), (e - self.energy(params)?).abs()))
    }

    /// Ground energy from the fermionic oracle in the boundary sector whose
    /// spectrum reproduces the encoded one.
    pub fn exact_reference(&self) -> Result<(BCSector, f64)> {
        let c = &self.config;
        match closest_sector(&c.spec, c.t, c.v, &[], c.n_f, &self.sector_spectrum)? {
            Some((s, dev, ed)) if dev < SECTOR_MATCH_TOL => Ok((s, ed[0])),
            _ => Err(Error::Config("no boundary sector reproduces the encoded spectrum".into())),
        }
    }

    pub fn initial_params(&self, scheme: InitScheme, seed: u64) -> Vec<f64> {
        match scheme {
            InitScheme::Zeros => vec![0.0; self.n_params()],
            InitScheme::Uniform { half_width } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..self.n_params()).map(|_| rng.random_range(-half_width..=half_width)).collect()
            }
        }
    }

    /// Adam from one initialization; returns `(energies, best params,
    /// best energy, converged)`.
    fn adam(&self, mut params: Vec<f64>, opt: &OptimizerConfig) -> Result<(Vec<f64>, Vec<f64>, f64, bool)> {
        let n = params.len();
        let (mut m, mut v) = (vec![0.0; n], vec![0.0; n]);
        let mut energies = Vec::new();
        let mut best = (f64::INFINITY, params.clone());
        let mut converged = false;
        for step in 0..opt.max_steps {
            let (e, g) = self.energy_and_gradient(&params, opt.fd_step)?;
            energies.push(e);
            if e < best.0 {
                best = (e, params.clone());
            }
            if step >= opt.window && (energies[step - opt.window] - e).abs() < opt.tolerance {
                converged = true;
                break;
            }
            let lr = opt.learning_rate / (1.0 + opt.decay * step as f64);
            let k = (step + 1) as i32;
            let (c1, c2) = (1.0 - opt.beta1.powi(k), 1.0 - opt.beta2.powi(k));
            for i in 0..n {
                m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
                v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
                params[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + opt.epsilon);
            }
        }
        let final_e = self.energy(&best.1)?;
        Ok((energies, best.1, final_e, converged))
    }

    pub fn run(&self, opt: &OptimizerConfig) -> Result<RunTrace> {
        opt.validate()?;
        let start = Instant::now();
        let (sector, exact) = self.exact_reference()?;
        let mut kept: Option<Restart> = None;
        for r in 0..opt.restarts {
            let seed = opt.seed.wrapping_add(r as u64);
            let p0 = self.initial_params(self.config.init, seed);
            let (energies, best, e, conv) = self.adam(p0, opt)?;
            if kept.as_ref().is_none_or(|k| e < k.2) {
                kept = Some((energies, best, e, conv, seed));
            }
        }
        let (energies, best_params, final_energy, converged, seed) = kept.expect("at least one restart");

        let mut checks = vec![self.spot_check(&self.initial_params(self.config.init, seed))?];
        checks.push(self.spot_check(&best_params)?);
        let worst = |f: fn(&(f64, f64, f64)) -> f64| checks.iter().map(f).fold(0.0, f64::max);

        let rel = relative_error(final_energy, exact);
        Ok(RunTrace {
            steps: energies.len(),
            energies,
            best_params,
            final_energy,
            exact_energy: exact,
            relative_error: rel,
            reported_relative_error: floored(rel),
            converged,
            sector,
            seed,
            max_constraint_violation: worst(|c| c.0),
            max_number_deviation: worst(|c| c.1),
            circuit_energy_mismatch: worst(|c| c.2),
            wall_seconds: start.elapsed().as_secs_f64(),
        })
    }
}

/// Energy of the ansatz state at `params`.
pub fn energy(config: &VqeConfig, params: &[f64]) -> Result<f64> {
    VqeProblem::new(config)?.energy(params)
}

/// Central-difference gradient with step `1e-4`.
pub fn gradient(config: &VqeConfig, params: &[f64]) -> Result<Vec<f64>> {
    VqeProblem::new(config)?.gradient(params, OptimizerConfig::default().fd_step)
}

pub fn run(config: &VqeConfig, opt: &OptimizerConfig) -> Result<RunTrace> {
    VqeProblem::new(config)?.run(opt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(lx: usize, ly: usize) -> LatticeSpec {
        LatticeSpec::new(lx, ly).unwrap()
    }

    fn random_params(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn compiled_energy_matches_the_circuit() {
        for (ansatz, granularity) in [
            (AnsatzKind::Agate, HvGranularity::PerEdge),
            (AnsatzKind::Hv, HvGranularity::PerEdge),
            (AnsatzKind::Hv, HvGranularity::PerGroup),
        ] {
            let mut cfg = VqeConfig::new(spec(2, 4), 1.0, 3.0, ansatz, 2);
            cfg.granularity = granularity;
            let p = VqeProblem::new(&cfg).unwrap();
            let params = random_params(p.n_params(), 3);
            let (viol, dn, de) = p.spot_check(&params).unwrap();
            assert!(viol < 1e-10 && dn < 1e-10 && de < 1e-10, "{ansatz:?} {granularity:?}: {viol} {dn} {de}");
        }
    }

    #[test]
    fn agate_zero_params_give_the_classical_energy() {
        // One pair on a horizontal bond: energy V times the bonds between
        // the two sites, which is 2 on a width-2 torus.
        let mut cfg = VqeConfig::new(spec(2, 4), 1.0, 3.0, AnsatzKind::Agate, 1);
        cfg.init = InitScheme::Zeros;
        let p = VqeProblem::new(&cfg).unwrap();
        assert!((p.energy(&vec![0.0; p.n_params()]).unwrap() - 6.0).abs() < 1e-10);
    }

    #[test]
    fn hv_zero_params_give_the_free_state_energy() {
        let cfg = VqeConfig::new(spec(2, 4), 1.0, 2.0, AnsatzKind::Hv, 1);
        let p = VqeProblem::new(&cfg).unwrap();
        let direct = p.initial_state.to_dense().unwrap().expval(&cfg.hamiltonian()).unwrap();
        assert!((p.energy(&vec![0.0; p.n_params()]).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn energies_respect_the_variational_bound() {
        let cfg = VqeConfig::new(spec(2, 4), 1.0, 3.0, AnsatzKind::Agate, 2);
        let p = VqeProblem::new(&cfg).unwrap();
        let (_, exact) = p.exact_reference().unwrap();
        for seed in 0..10 {
            assert!(p.energy(&random_params(p.n_params(), seed)).unwrap() >= exact - 1e-9);
        }
    }

    #[test]
    fn gradient_checks() {
        let cfg = VqeConfig::new(spec(2, 4), 1.0, 3.0, AnsatzKind::Agate, 2);
        let p = VqeProblem::new(&cfg).unwrap();
        let x = random_params(p.n_params(), 11);
        let g4 = p.gradient(&x, 1e-4).unwrap();
        let g5 = p.gradient(&x, 1e-5).unwrap();
        for (a, b) in g4.iter().zip(&g5) {
            assert!((a - b).abs() <= 1e-5 * a.abs().max(1.0), "{a} vs {b}");
        }
        // Directional derivative.
        let d = random_params(p.n_params(), 12);
        let eps = 1e-4;
        let shift = |s: f64| x.iter().zip(&d).map(|(a, b)| a + s * eps * b).collect::<Vec<_>>();
        let fd = (p.energy(&shift(1.0)).unwrap() - p.energy(&shift(-1.0)).unwrap()) / (2.0 * eps);
        let dot: f64 = g4.iter().zip(&d).map(|(a, b)| a * b).sum();
        assert!((fd - dot).abs() < 1e-6, "{fd} vs {dot}");
        // Slow path agrees with the cached one.
        let mut q = x.clone();
        for k in [0, 7, 30] {
            q[k] += 1e-4;
            let plus = p.energy(&q).unwrap();
            q[k] -= 2e-4;
            let minus = p.energy(&q).unwrap();
            q[k] = x[k];
            assert!(((plus - minus) / 2e-4 - g4[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn flat_direction_has_zero_gradient() {
        // With theta = 0 the phase of a hopping gate does nothing.
        let mut cfg = VqeConfig::new(spec(2, 4), 1.0, 3.0, AnsatzKind::Agate, 1);
        cfg.init = InitScheme::Zeros;
        let p = VqeProblem::new(&cfg).unwrap();
        let mut x = random_params(p.n_params(), 5);
        x[0] = 0.0;
        assert!(p.gradient(&x, 1e-4).unwrap()[1].abs() < 1e-6);
    }

    #[test]
    fn short_run_improves_and_is_deterministic() {
        let cfg = VqeConfig::new(spec(2, 2), 1.0, 2.0, AnsatzKind::Agate, 1);
        let opt = OptimizerConfig { max_steps: 200, ..Default::default() };
        let a = run(&cfg, &opt).unwrap();
        let b = run(&cfg, &opt).unwrap();
        assert_eq!(a.energies, b.energies);
        assert!(a.final_energy < a.energies[0]);
        assert!(a.respects_variational_bound());
        assert!(a.max_constraint_violation < 1e-10 && a.max_number_deviation < 1e-10);
    }

    #[test]
    fn config_validation() {
        let mut cfg = VqeConfig::new(spec(2, 4), 1.0, 3.0, AnsatzKind::Agate, 1);
        cfg.n_f = 4;
        assert!(VqeProblem::new(&cfg).is_err());
        let opt = OptimizerConfig { beta1: 1.0, ..Default::default() };
        assert!(opt.validate().is_err());
    }

    #[test]
    fn floor_convention() {
        assert_eq!(floored(5e-7), 0.0);
        assert_eq!(floored(2e-6), 2e-6);
    }
}
