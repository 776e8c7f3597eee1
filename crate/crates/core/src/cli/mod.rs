//! Command-line front end. Exit codes: 0 pass, 1 scientific failure,
//! 2 usage or configuration error.

pub mod config;
pub mod experiments;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuits::{
    ansatz_agate, ansatz_hv, export_text, pair_creation, trotter_step, vacuum_circuit, Circuit, HvGranularity,
};
use crate::error::{Error, Result};
use crate::lattice::{Edge, LatticeSpec};
use crate::oracle::match_sector;
use crate::pauli::constraint_set;
use crate::statevec::{constraint_expectations, SparseState};
use crate::vqe::{AnsatzKind, InitScheme, OptimizerConfig, RunTrace, VqeConfig, VqeProblem};

pub use config::{parse_edge, parse_edges, parse_list, parse_potentials, RunConfigFile};
pub use experiments::{depth_table, fit_quadratic, run_quench, DepthRow, QuenchParams, QuenchResult, QuenchRow};

/// Tolerance on stabilizer expectations and spectral matches.
pub const CHECK_TOL: f64 = 1e-10;
pub const MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "f2q", version, about = "Local fermion-to-qubit circuits for the 2D t-V model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prepare the vacuum (and optional pairs) and check every stabilizer.
    CheckConstraints(CheckArgs),
    /// Occupation trajectories after a potential quench.
    Quench(QuenchArgs),
    /// Variational ground-state search.
    Vqe(VqeArgs),
    /// Trotter-step depth and gate counts on L x L lattices.
    DepthReport(DepthArgs),
    /// Write a circuit in the text format.
    ExportCircuit(ExportArgs),
    /// Compare encoded and fermionic spectra in every boundary sector.
    SpectrumMatch(MatchArgs),
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// INI run configuration; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub lx: Option<usize>,
    #[arg(long)]
    pub ly: Option<usize>,
    /// Boundary factor; defaults to -1 on odd x odd lattices.
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<i8>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Pair-creation edges, e.g. "0,0,x;1,1,y".
    #[arg(long)]
    pub pairs: Option<String>,
}

#[derive(Debug, Args)]
pub struct QuenchArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub n_f: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VqeArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(long)]
    pub n_f: Option<usize>,
    /// `agate` or `hv`.
    #[arg(long)]
    pub ansatz: Option<String>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// `per-edge` or `per-group` (HV ansatz only).
    #[arg(long)]
    pub granularity: Option<String>,
    #[arg(long)]
    pub pairs: Option<String>,
    /// Half-width of the uniform initialization; 0 starts from zeros.
    #[arg(long)]
    pub init_width: Option<f64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub decay: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated side lengths.
    #[arg(long)]
    pub sizes: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the fitted `c L^2` coefficient as JSON.
    #[arg(long)]
    pub fit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// `vacuum`, `trotter` or `ansatz`.
    #[arg(long)]
    pub kind: String,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long)]
    pub ansatz: Option<String>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub granularity: Option<String>,
    /// Comma-separated ansatz parameters; drawn uniformly from the seed
    /// when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    /// Compare one fermion number only. Defaults to all of them up to
    /// eight sites and to two fermions beyond.
    #[arg(long)]
    pub n_f: Option<usize>,
    /// Site potentials, e.g. "0,0:-1;0,1:-1".
    #[arg(long, allow_hyphen_values = true)]
    pub potentials: Option<String>,
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

/// Exit code for an error: usage problems give 2, numerical ones 1.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::InvalidLattice(_)
        | Error::Parse { .. }
        | Error::RegisterTooLarge(..)
        | Error::SectorTooLarge(..)
        | Error::EmptySector(_)
        | Error::ParameterCount { .. }
        | Error::WrongEdge(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return 2;
    }
    match execute(&cli.command, out, err) {
        Ok(o) => o.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    }
}

/// Sizes the global worker pool from `F2Q_THREADS`.
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("F2Q_THREADS") else { return Ok(()) };
    let n: usize =
        v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Error::Config(format!("F2Q_THREADS = '{v}'")))?;
    // A pool built earlier in the process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match cmd {
        Command::CheckConstraints(a) => cmd_check_constraints(a, out),
        Command::Quench(a) => cmd_quench(a, out, err),
        Command::Vqe(a) => cmd_vqe(a, out),
        Command::DepthReport(a) => cmd_depth_report(a, out),
        Command::ExportCircuit(a) => cmd_export_circuit(a, out),
        Command::SpectrumMatch(a) => cmd_spectrum_match(a, out),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfigFile> {
    path.as_deref().map_or_else(|| Ok(RunConfigFile::default()), RunConfigFile::load)
}

fn lattice(a: &LatticeArgs, cfg: &RunConfigFile) -> Result<LatticeSpec> {
    let lx = cfg.pick(a.lx, "lattice", "lx", 2)?;
    let ly = cfg.pick(a.ly, "lattice", "ly", 2)?;
    match a.rho.map_or_else(|| cfg.get::<i8>("lattice", "rho"), |r| Ok(Some(r)))? {
        Some(rho) => LatticeSpec::with_rho(lx, ly, rho),
        None => LatticeSpec::new(lx, ly),
    }
}

fn edges(flag: &Option<String>, cfg: &RunConfigFile, section: &str) -> Result<Option<Vec<Edge>>> {
    flag.as_deref().or(cfg.raw(section, "pairs")).map(parse_edges).transpose()
}

/// Runs `body` against the output file, or `out` when no path is set.
fn with_output<F>(flag: &Option<PathBuf>, cfg: &RunConfigFile, out: &mut dyn Write, body: F) -> Result<Outcome>
where
    F: FnOnce(&mut dyn Write) -> Result<Outcome>,
{
    let path = flag.clone().or_else(|| cfg.raw("output", "path").map(PathBuf::from));
    match path {
        Some(p) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(p)?);
            let o = body(&mut f)?;
            f.flush()?;
            Ok(o)
        }
        None => body(out),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn ansatz_kind(s: &str) -> Result<AnsatzKind> {
    match s {
        "agate" => Ok(AnsatzKind::Agate),
        "hv" => Ok(AnsatzKind::Hv),
        _ => Err(Error::Config(format!("unknown ansatz '{s}', expected agate or hv"))),
    }
}

fn granularity(s: &str) -> Result<HvGranularity> {
    match s {
        "per-edge" => Ok(HvGranularity::PerEdge),
        "per-group" => Ok(HvGranularity::PerGroup),
        _ => Err(Error::Config(format!("unknown granularity '{s}', expected per-edge or per-group"))),
    }
}

/// Vacuum plus pair creation on disjoint edges.
pub fn prepare_vacuum_with_pairs(spec: &LatticeSpec, pairs: &[Edge]) -> Result<Circuit> {
    let mut c = vacuum_circuit(spec);
    let mut used = Vec::new();
    for &e in pairs {
        if e.origin.rx >= spec.lx() || e.origin.ry >= spec.ly() {
            return Err(Error::Config(format!("pair edge at {} lies outside the lattice", e.origin)));
        }
        for s in [e.origin, spec.edge_target(e)] {
            if used.contains(&s) {
                return Err(Error::Config(format!("site {s} receives two fermions")));
            }
            used.push(s);
        }
        c.extend(pair_creation(spec, e));
    }
    Ok(c)
}

fn cmd_check_constraints(a: &CheckArgs, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = load_config(&a.lattice.config)?;
    let spec = lattice(&a.lattice, &cfg)?;
    let pairs = edges(&a.pairs, &cfg, "vqe")?.unwrap_or_default();
    let circuit = prepare_vacuum_with_pairs(&spec, &pairs)?;
    let mut st = SparseState::zero_state(spec.n_qubits())?;
    circuit.apply(&mut st)?;
    let cs = constraint_set(&spec);
    with_output(&a.lattice.output, &cfg, out, |w| {
        writeln!(w, "lattice {}x{} rho {} pairs {}", spec.lx(), spec.ly(), spec.rho(), pairs.len())?;
        let mut all = true;
        for (kind, value, target) in constraint_expectations(&st, &cs)? {
            let ok = (value - target as f64).abs() < CHECK_TOL;
            all &= ok;
            writeln!(w, "{kind} {} target {target:+} {}", num(value), if ok { "PASS" } else { "FAIL" })?;
        }
        writeln!(w, "{}", if all { "all constraints satisfied" } else { "constraint violation" })?;
        Ok(Outcome::from_ok(all))
    })
}

fn cmd_quench(a: &QuenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let cfg = load_config(&a.lattice.config)?;
    let p = QuenchParams {
        spec: lattice(&a.lattice, &cfg)?,
        t: cfg.pick(a.t, "model", "t", 1.0)?,
        v: cfg.pick(a.v, "model", "v", 3.0)?,
        k: cfg.pick(a.k, "model", "k", 1.0)?,
        n_f: cfg.pick(a.n_f, "model", "n_f", 2)?,
        dt: cfg.pick(a.dt, "trotter", "dt", 0.1)?,
        tmax: cfg.pick(a.tmax, "trotter", "tmax", 2.0)?,
    };
    let r = run_quench(&p)?;
    writeln!(err, "sector {} reference gap {} trotter error {}", r.sector, num(r.reference_gap), num(r.trotter_error))?;
    with_output(&a.lattice.output, &cfg, out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["time", "rx", "ry", "occ_trotter", "occ_exact_encoded", "occ_exact_fermionic"])
            .map_err(csv_err)?;
        for row in &r.rows {
            csv.write_record([
                num(row.time),
                row.rx.to_string(),
                row.ry.to_string(),
                num(row.occ_trotter),
                num(row.occ_exact_encoded),
                num(row.occ_exact_fermionic),
            ])
            .map_err(csv_err)?;
        }
        csv.flush()?;
        Ok(Outcome::from_ok(r.reference_gap <= MATCH_TOL))
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// JSON document written by the `vqe` command.
#[derive(Debug, Serialize)]
pub struct VqeReport<'a> {
    pub config: &'a VqeConfig,
    pub optimizer: &'a OptimizerConfig,
    pub n_params: usize,
    pub sector: String,
    pub seed: u64,
    pub steps: usize,
    pub converged: bool,
    pub energies: &'a [f64],
    pub final_energy: f64,
    pub exact_energy: f64,
    /// Floored to zero below 1e-6.
    pub relative_error: f64,
    pub raw_relative_error: f64,
    pub best_params: &'a [f64],
    pub max_constraint_violation: f64,
    pub max_number_deviation: f64,
    pub circuit_energy_mismatch: f64,
    pub wall_seconds: f64,
}

impl<'a> VqeReport<'a> {
    pub fn new(config: &'a VqeConfig, optimizer: &'a OptimizerConfig, trace: &'a RunTrace) -> Self {
        Self {
            config,
            optimizer,
            n_params: config.n_params(),
            sector: trace.sector.to_string(),
            seed: trace.seed,
            steps: trace.steps,
            converged: trace.converged,
            energies: &trace.energies,
            final_energy: trace.final_energy,
            exact_energy: trace.exact_energy,
            relative_error: trace.reported_relative_error,
            raw_relative_error: trace.relative_error,
            best_params: &trace.best_params,
            max_constraint_violation: trace.max_constraint_violation,
            max_number_deviation: trace.max_number_deviation,
            circuit_energy_mismatch: trace.circuit_energy_mismatch,
            wall_seconds: trace.wall_seconds,
        }
    }
}

pub fn vqe_settings(a: &VqeArgs, cfg: &RunConfigFile) -> Result<(VqeConfig, OptimizerConfig)> {
    let spec = lattice(&a.lattice, cfg)?;
    let kind = ansatz_kind(&cfg.pick(a.ansatz.clone(), "vqe", "ansatz", "agate".into())?)?;
    let mut c = VqeConfig::new(
        spec,
        cfg.pick(a.t, "model", "t", 1.0)?,
        cfg.pick(a.v, "model", "v", 3.0)?,
        kind,
        cfg.pick(a.layers, "vqe", "layers", 2)?,
    );
    c.n_f = cfg.pick(a.n_f, "model", "n_f", 2)?;
    c.granularity = granularity(&cfg.pick(a.granularity.clone(), "vqe", "granularity", "per-edge".into())?)?;
    if let Some(p) = edges(&a.pairs, cfg, "vqe")? {
        c.pair_edges = p;
    }
    let width = cfg.pick(a.init_width, "vqe", "init_width", 0.1)?;
    c.init = if width > 0.0 { InitScheme::Uniform { half_width: width } } else { InitScheme::Zeros };
    c.validate()?;

    let d = OptimizerConfig::default();
    let o = OptimizerConfig {
        learning_rate: cfg.pick(a.learning_rate, "optimizer", "learning_rate", d.learning_rate)?,
        beta1: cfg.pick(None, "optimizer", "beta1", d.beta1)?,
        beta2: cfg.pick(None, "optimizer", "beta2", d.beta2)?,
        epsilon: cfg.pick(None, "optimizer", "epsilon", d.epsilon)?,
        decay: cfg.pick(a.decay, "optimizer", "decay", d.decay)?,
        max_steps: cfg.pick(a.max_steps, "optimizer", "max_steps", d.max_steps)?,
        seed: cfg.pick(a.seed, "optimizer", "seed", d.seed)?,
        window: cfg.pick(a.window, "optimizer", "window", d.window)?,
        tolerance: cfg.pick(a.tolerance, "optimizer", "tolerance", d.tolerance)?,
        restarts: cfg.pick(a.restarts, "optimizer", "restarts", d.restarts)?,
        fd_step: d.fd_step,
    };
    o.validate()?;
    Ok((c, o))
}

fn cmd_vqe(a: &VqeArgs, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = load_config(&a.lattice.config)?;
    let (c, o) = vqe_settings(a, &cfg)?;
    let trace = VqeProblem::new(&c)?.run(&o)?;
    let ok = trace.respects_variational_bound()
        && trace.max_constraint_violation < CHECK_TOL
        && trace.max_number_deviation < CHECK_TOL;
    with_output(&a.lattice.output, &cfg, out, |w| {
        serde_json::to_writer_pretty(&mut *w, &VqeReport::new(&c, &o, &trace)).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        Ok(Outcome::from_ok(ok))
    })
}

/// Arity buckets written by `depth-report`.
pub const DEPTH_COLUMNS: [&str; 8] = [
    "l",
    "trotter_two_qubit_depth",
    "trotter_gates_1q",
    "trotter_gates_2q",
    "trotter_gates_3q",
    "trotter_gates_4q_plus",
    "trotter_total_gates",
    "vacuum_two_qubit_gates",
];

fn cmd_depth_report(a: &DepthArgs, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = load_config(&a.config)?;
    let sizes: Vec<usize> = parse_list(&cfg.pick(a.sizes.clone(), "depth", "sizes", "4,6,8,10".into())?)?;
    if sizes.is_empty() {
        return Err(Error::Config("no lattice sizes given".into()));
    }
    let rows = depth_table(&sizes)?;
    if let Some(path) = &a.fit {
        let points: Vec<(usize, usize)> = rows.iter().map(|r| (r.l, r.trotter_total_gates)).collect();
        let (c, residual) = fit_quadratic(&points);
        let doc = serde_json::json!({
            "model": "trotter_total_gates = c * L^2",
            "coefficient": c,
            "max_relative_residual": residual,
            "points": points,
        });
        std::fs::write(path, serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.into()))? + "\n")?;
    }
    with_output(&a.output, &cfg, out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(DEPTH_COLUMNS).map_err(csv_err)?;
        for r in &rows {
            let by = |k: usize| r.trotter_counts.get(&k).copied().unwrap_or(0);
            let plus: usize = r.trotter_counts.range(4..).map(|(_, n)| n).sum();
            csv.write_record(
                [
                    r.l,
                    r.trotter_two_qubit_depth,
                    by(1),
                    by(2),
                    by(3),
                    plus,
                    r.trotter_total_gates,
                    r.vacuum_two_qubit_gates,
                ]
                .map(|x| x.to_string()),
            )
            .map_err(csv_err)?;
        }
        csv.flush()?;
        Ok(Outcome::Pass)
    })
}

fn cmd_export_circuit(a: &ExportArgs, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = load_config(&a.lattice.config)?;
    let spec = lattice(&a.lattice, &cfg)?;
    let circuit = match a.kind.as_str() {
        "vacuum" => prepare_vacuum_with_pairs(&spec, &edges(&a.pairs, &cfg, "vqe")?.unwrap_or_default())?,
        "trotter" => trotter_step(
            &spec,
            cfg.pick(a.t, "model", "t", 1.0)?,
            cfg.pick(a.v, "model", "v", 3.0)?,
            cfg.pick(a.dt, "trotter", "dt", 0.1)?,
        ),
        "ansatz" => {
            let kind = ansatz_kind(&cfg.pick(a.ansatz.clone(), "vqe", "ansatz", "agate".into())?)?;
            let layers = cfg.pick(a.layers, "vqe", "layers", 1)?;
            let gran = granularity(&cfg.pick(a.granularity.clone(), "vqe", "granularity", "per-edge".into())?)?;
            let n = match kind {
                AnsatzKind::Agate => crate::circuits::agate_parameter_count(&spec, layers),
                AnsatzKind::Hv => crate::circuits::hv_parameter_count(&spec, layers, gran),
            };
            let params: Vec<f64> = match &a.params {
                Some(p) => parse_list(p)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.pick(a.seed, "optimizer", "seed", 7)?);
                    (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
                }
            };
            match kind {
                AnsatzKind::Agate => ansatz_agate(&spec, layers, &params)?,
                AnsatzKind::Hv => ansatz_hv(&spec, layers, &params, gran)?,
            }
        }
        k => return Err(Error::Config(format!("unknown circuit kind '{k}', expected vacuum, trotter or ansatz"))),
    };
    with_output(&a.lattice.output, &cfg, out, |w| {
        w.write_all(export_text(&circuit).as_bytes())?;
        Ok(Outcome::Pass)
    })
}

fn cmd_spectrum_match(a: &MatchArgs, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = load_config(&a.lattice.config)?;
    let spec = lattice(&a.lattice, &cfg)?;
    let t = cfg.pick(a.t, "model", "t", 1.0)?;
    let v = cfg.pick(a.v, "model", "v", 0.0)?;
    let pots = a
        .potentials
        .as_deref()
        .or(cfg.raw("model", "potentials"))
        .map(parse_potentials)
        .transpose()?
        .unwrap_or_default();
    let only = match a.n_f.map_or_else(|| cfg.get::<usize>("model", "n_f"), |n| Ok(Some(n)))? {
        Some(n) => Some(n),
        None if spec.n_sites() > 8 => Some(2),
        None => None,
    };
    let m = match_sector(&spec, t, v, &pots, only)?;
    with_output(&a.lattice.output, &cfg, out, |w| {
        let n_fs: Vec<String> = m.n_fs.iter().map(usize::to_string).collect();
        writeln!(w, "lattice {}x{} rho {} n_f {}", spec.lx(), spec.ly(), spec.rho(), n_fs.join(","))?;
        for (s, d) in &m.deviations {
            writeln!(w, "sector {s} deviation {}", num(*d))?;
        }
        let (best, dev) = m.best();
        let ok = dev < MATCH_TOL;
        if ok {
            writeln!(w, "matched sector {best} deviation {}", num(dev))?;
        } else {
            writeln!(w, "no sector matches (closest {best} deviation {})", num(dev))?;
        }
        Ok(Outcome::from_ok(ok))
    })
}
