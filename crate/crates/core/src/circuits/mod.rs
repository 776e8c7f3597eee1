//! Circuit IR and the circuit constructions: periodicity and vacuum
//! preparation, pair creation, Trotterized evolution, the variational
//! hopping gates and both ansatzes, plus scheduling and text export.

mod builders;
mod evolution;
mod schedule;
mod text;
mod variational;

pub use builders::{pair_creation, periodicity_circuit, vacuum_circuit};
pub(crate) use evolution::grouped_edge_order;
pub use evolution::{
    hop_x_evolution, hop_y_evolution, interaction_evolution, trotter_step, trotter_step_with_angles, w_circuit,
    zz_rotation, EdgeAngles,
};
pub use schedule::{schedule, schedule_with, DepthReport, MatrixCosting};
pub use text::{export_text, parse_text};
pub(crate) use variational::hv_layer_angles;
pub use variational::{
    a_matrix, agate_parameter_count, ansatz_agate, ansatz_hv, hv_parameter_count, vx_components, vx_decomposition,
    vx_gate, vx_targets, vx_unitary, vy_components, vy_decomposition, vy_gate, vy_targets, vy_unitary, GateComponents,
    HvGranularity, VX_DECOMPOSITION_COST, VY_DECOMPOSITION_COST,
};

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, unitarity_error, CMatrix, I, ONE, ZERO};
use crate::statevec::{QuantumState, StateVector, UNITARY_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    RX,
    RY,
    RZ,
    CNOT,
    CY,
    CZ,
    CH,
    CCZ,
    CPHASE,
    MATRIX,
}

impl GateKind {
    pub const ALL: [GateKind; 16] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::CNOT,
        GateKind::CY,
        GateKind::CZ,
        GateKind::CH,
        GateKind::CCZ,
        GateKind::CPHASE,
        GateKind::MATRIX,
    ];

    /// Number of qubits, or `None` for MATRIX gates.
    pub fn arity(self) -> Option<usize> {
        use GateKind::*;
        match self {
            X | Y | Z | H | S | Sdg | RX | RY | RZ => Some(1),
            CNOT | CY | CZ | CH | CPHASE => Some(2),
            CCZ => Some(3),
            MATRIX => None,
        }
    }

    pub fn n_params(self) -> usize {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CPHASE) as usize
    }

    pub fn name(self) -> &'static str {
        use GateKind::*;
        match self {
            X => "x",
            Y => "y",
            Z => "z",
            H => "h",
            S => "s",
            Sdg => "sdg",
            RX => "rx",
            RY => "ry",
            RZ => "rz",
            CNOT => "cnot",
            CY => "cy",
            CZ => "cz",
            CH => "ch",
            CCZ => "ccz",
            CPHASE => "cphase",
            MATRIX => "matrix",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate on flat qubit indices. Controlled kinds list controls first.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub params: Vec<f64>,
    pub matrix: Option<CMatrix>,
    /// Declared two-qubit-gate cost of a native decomposition (MATRIX only).
    pub decomposition_cost: Option<u32>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: &[usize], params: &[f64]) -> Self {
        debug_assert_ne!(kind, GateKind::MATRIX);
        debug_assert_eq!(kind.arity(), Some(targets.len()));
        debug_assert_eq!(kind.n_params(), params.len());
        Self { kind, targets: targets.to_vec(), params: params.to_vec(), matrix: None, decomposition_cost: None }
    }

    pub fn matrix_gate(u: CMatrix, targets: &[usize], decomposition_cost: Option<u32>) -> Result<Self> {
        let err = unitarity_error(&u);
        if err > UNITARY_TOL {
            return Err(Error::NotUnitary(err));
        }
        if u.nrows() != 1 << targets.len() {
            return Err(Error::InvalidGate(format!("{}x{} matrix on {} targets", u.nrows(), u.ncols(), targets.len())));
        }
        Ok(Self {
            kind: GateKind::MATRIX,
            targets: targets.to_vec(),
            params: vec![],
            matrix: Some(u),
            decomposition_cost,
        })
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, &[q], &[])
    }
    pub fn y(q: usize) -> Self {
        Self::new(GateKind::Y, &[q], &[])
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, &[q], &[])
    }
    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, &[q], &[])
    }
    pub fn s(q: usize) -> Self {
        Self::new(GateKind::S, &[q], &[])
    }
    pub fn sdg(q: usize) -> Self {
        Self::new(GateKind::Sdg, &[q], &[])
    }
    pub fn rx(q: usize, a: f64) -> Self {
        Self::new(GateKind::RX, &[q], &[a])
    }
    pub fn ry(q: usize, a: f64) -> Self {
        Self::new(GateKind::RY, &[q], &[a])
    }
    pub fn rz(q: usize, a: f64) -> Self {
        Self::new(GateKind::RZ, &[q], &[a])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::CNOT, &[control, target], &[])
    }
    pub fn cy(control: usize, target: usize) -> Self {
        Self::new(GateKind::CY, &[control, target], &[])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::CZ, &[a, b], &[])
    }
    pub fn ch(control: usize, target: usize) -> Self {
        Self::new(GateKind::CH, &[control, target], &[])
    }
    pub fn ccz(a: usize, b: usize, t: usize) -> Self {
        Self::new(GateKind::CCZ, &[a, b, t], &[])
    }
    pub fn cphase(a: usize, b: usize, phi: f64) -> Self {
        Self::new(GateKind::CPHASE, &[a, b], &[phi])
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    /// Unitary in the local basis (first target most significant).
    /// Rotations follow `R_P(a) = exp(-i a P / 2)`.
    pub fn unitary(&self) -> CMatrix {
        use GateKind::*;
        let h = FRAC_1_SQRT_2;
        let m2 = |v: [Complex64; 4]| CMatrix::from_row_slice(2, 2, &v);
        let controlled = |u: CMatrix| {
            let mut m = CMatrix::identity(4, 4);
            m.view_mut((2, 2), (2, 2)).copy_from(&u);
            m
        };
        let theta = self.params.first().copied().unwrap_or(0.0);
        let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match self.kind {
            X => m2([ZERO, ONE, ONE, ZERO]),
            Y => m2([ZERO, -I, I, ZERO]),
            Z => m2([ONE, ZERO, ZERO, -ONE]),
            H => m2([c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
            S => m2([ONE, ZERO, ZERO, I]),
            Sdg => m2([ONE, ZERO, ZERO, -I]),
            RX => m2([c(cs, 0.0), c(0.0, -sn), c(0.0, -sn), c(cs, 0.0)]),
            RY => m2([c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)]),
            RZ => m2([Complex64::from_polar(1.0, -theta / 2.0), ZERO, ZERO, Complex64::from_polar(1.0, theta / 2.0)]),
            CNOT => controlled(m2([ZERO, ONE, ONE, ZERO])),
            CY => controlled(m2([ZERO, -I, I, ZERO])),
            CZ => controlled(m2([ONE, ZERO, ZERO, -ONE])),
            CH => controlled(m2([c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])),
            CPHASE => controlled(m2([ONE, ZERO, ZERO, Complex64::from_polar(1.0, theta)])),
            CCZ => {
                let mut m = CMatrix::identity(8, 8);
                m[(7, 7)] = -ONE;
                m
            }
            MATRIX => self.matrix.clone().expect("MATRIX gate carries its unitary"),
        }
    }

    pub fn adjoint(&self) -> Gate {
        use GateKind::*;
        let mut g = self.clone();
        match self.kind {
            S => g.kind = Sdg,
            Sdg => g.kind = S,
            RX | RY | RZ | CPHASE => g.params = vec![-self.params[0]],
            MATRIX => g.matrix = self.matrix.as_ref().map(|m| m.adjoint()),
            _ => {}
        }
        g
    }

    /// Single-qubit gates are free in depth accounting.
    pub fn is_multi_qubit(&self) -> bool {
        self.targets.len() >= 2
    }
}

/// Ordered gate list over a register, with a tracked global phase and an
/// optional table binding variational parameter indices to gates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    /// The circuit implements `exp(i * global_phase) * prod(gates)`.
    pub global_phase: f64,
    /// `(parameter index, gate index)` pairs.
    pub slots: Vec<(usize, usize)>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, ..Default::default() }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn push_slot(&mut self, param: usize, gate: Gate) {
        self.slots.push((param, self.gates.len()));
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: Circuit) {
        let offset = self.gates.len();
        self.slots.extend(other.slots.into_iter().map(|(p, g)| (p, g + offset)));
        self.gates.extend(other.gates);
        self.global_phase += other.global_phase;
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    pub fn multi_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_multi_qubit()).count()
    }

    pub fn adjoint(&self) -> Circuit {
        let n = self.gates.len();
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
            global_phase: -self.global_phase,
            slots: self.slots.iter().map(|&(p, g)| (p, n - 1 - g)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            if let Some(a) = g.kind.arity() {
                if a != g.targets.len() {
                    return Err(Error::InvalidGate(format!("{} expects {a} targets", g.kind)));
                }
            }
            if g.params.len() != g.kind.n_params() {
                return Err(Error::InvalidGate(format!("{} expects {} parameters", g.kind, g.kind.n_params())));
            }
            for (i, &t) in g.targets.iter().enumerate() {
                if t >= self.n_qubits {
                    return Err(Error::InvalidGate(format!("target {t} outside register of {}", self.n_qubits)));
                }
                if g.targets[..i].contains(&t) {
                    return Err(Error::InvalidGate(format!("duplicate target {t} in {}", g.kind)));
                }
            }
            if g.kind == GateKind::MATRIX {
                let u = g.matrix.as_ref().ok_or_else(|| Error::InvalidGate("matrix gate without matrix".into()))?;
                let err = unitarity_error(u);
                if err > UNITARY_TOL {
                    return Err(Error::NotUnitary(err));
                }
            }
        }
        if let Some(&(_, g)) = self.slots.iter().find(|(_, g)| *g >= self.gates.len()) {
            return Err(Error::InvalidGate(format!("parameter slot bound to missing gate {g}")));
        }
        Ok(())
    }

    /// Applies every gate (the global phase is bookkeeping only and is not
    /// multiplied into the state).
    pub fn apply<S: QuantumState>(&self, state: &mut S) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: state.n_qubits() });
        }
        for g in &self.gates {
            state.apply_matrix_unchecked(&g.unitary(), &g.targets);
        }
        Ok(())
    }

    /// Dense unitary including the global phase. Small registers only.
    pub fn unitary(&self) -> Result<CMatrix> {
        let dim = 1usize << self.n_qubits;
        let mut u = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut s = StateVector::basis_state(self.n_qubits, col)?;
            self.apply(&mut s)?;
            for (row, a) in s.amplitudes().iter().enumerate() {
                u[(row, col)] = a * Complex64::from_polar(1.0, self.global_phase);
            }
        }
        Ok(u)
    }
}
