use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::lattice::{Direction, Edge, LatticeSpec};

use super::{Circuit, Gate, GateKind};

/// `W = CNOT(b->a) CH(a->b) CNOT(b->a)`, with
/// `W (Z_b - Z_a) W^dag = X_a X_b + Y_a Y_b`. `W` is its own inverse.
pub fn w_circuit(n_qubits: usize, a: usize, b: usize) -> Circuit {
    let mut c = Circuit::new(n_qubits);
    c.push(Gate::cnot(b, a));
    c.push(Gate::ch(a, b));
    c.push(Gate::cnot(b, a));
    c
}

/// `exp(-i angle/2 Z_a Z_b)` as CNOT, RZ, CNOT.
pub fn zz_rotation(n_qubits: usize, a: usize, b: usize, angle: f64) -> Circuit {
    let mut c = Circuit::new(n_qubits);
    c.push(Gate::cnot(a, b));
    c.push(Gate::rz(b, angle));
    c.push(Gate::cnot(a, b));
    c
}

/// `exp(+i theta (XX + YY)_phys Z(2)_{r+x})` on the x-edge `e`.
pub fn hop_x_evolution(spec: &LatticeSpec, e: Edge, theta: f64) -> Result<Circuit> {
    if e.direction != Direction::X {
        return Err(Error::WrongEdge("hop_x_evolution"));
    }
    let n = spec.n_qubits();
    let r2 = spec.edge_target(e);
    let (p1, p2, aux) = (spec.phys(e.origin), spec.phys(r2), spec.aux(r2));
    let w = w_circuit(n, p2, p1);
    let mut c = w.clone();
    c.extend(zz_rotation(n, p1, aux, -2.0 * theta));
    c.extend(zz_rotation(n, p2, aux, 2.0 * theta));
    c.extend(w);
    Ok(c)
}

/// `exp(+i theta (-XY + YX)_phys Y(2)_r X(2)_{r+y})` on the y-edge `e`.
///
/// Both physical factors share one auxiliary parity: after the basis change
/// `CNOT(aux r+y -> aux r)` leaves `Z_r Z_{r+y}` on `aux r`, and each factor
/// costs one CNOT-RZ-CNOT sandwich onto its physical qubit.
pub fn hop_y_evolution(spec: &LatticeSpec, e: Edge, theta: f64) -> Result<Circuit> {
    if e.direction != Direction::Y {
        return Err(Error::WrongEdge("hop_y_evolution"));
    }
    let n = spec.n_qubits();
    let r2 = spec.edge_target(e);
    let (p1, p2) = (spec.phys(e.origin), spec.phys(r2));
    let (a1, a2) = (spec.aux(e.origin), spec.aux(r2));

    let mut basis = Circuit::new(n);
    basis.push(Gate::rx(a1, -FRAC_PI_2));
    basis.push(Gate::ry(a2, FRAC_PI_2));
    basis.push(Gate::s(p2));
    basis.extend(w_circuit(n, p2, p1));
    basis.push(Gate::cnot(a2, a1));

    let mut c = basis.clone();
    c.push(Gate::cnot(a1, p1));
    c.push(Gate::rz(p1, -2.0 * theta));
    c.push(Gate::cnot(a1, p1));
    c.push(Gate::cnot(a1, p2));
    c.push(Gate::rz(p2, 2.0 * theta));
    c.push(Gate::cnot(a1, p2));
    c.extend(basis.adjoint());
    Ok(c)
}

/// `exp(-i lambda n_r n_r')` on the physical qubits of `e`: a single
/// `CPHASE(-lambda)`, exact with no global phase.
pub fn interaction_evolution(spec: &LatticeSpec, e: Edge, lambda: f64) -> Circuit {
    let mut c = Circuit::new(spec.n_qubits());
    c.push(Gate::cphase(spec.phys(e.origin), spec.phys(spec.edge_target(e)), -lambda));
    c
}

/// Per-edge angles of one Trotter-like layer, indexed like `spec.edges()`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeAngles {
    /// `lambda` of each interaction slice.
    pub interaction: Vec<f64>,
    /// `theta` of each hopping slice.
    pub hopping: Vec<f64>,
}

impl EdgeAngles {
    /// Angles of a first-order Trotter step of length `dt`.
    pub fn trotter(spec: &LatticeSpec, t: f64, v: f64, dt: f64) -> Self {
        let edges = spec.edges();
        let rho = spec.rho() as f64;
        let hopping = edges
            .iter()
            .map(|e| match e.direction {
                Direction::X => rho * t * dt / 2.0,
                Direction::Y => t * dt / 2.0,
            })
            .collect();
        Self { interaction: vec![v * dt; edges.len()], hopping }
    }
}

/// Slice group of an edge: alternating columns (x) or rows (y), with the
/// boundary edge of an odd extent in a third group. Edges in one group
/// touch disjoint qubits.
pub(crate) fn edge_group(spec: &LatticeSpec, e: Edge) -> usize {
    let (coord, extent) = match e.direction {
        Direction::X => (e.origin.rx, spec.lx()),
        Direction::Y => (e.origin.ry, spec.ly()),
    };
    if extent % 2 == 1 && coord == extent - 1 {
        2
    } else {
        coord % 2
    }
}

/// Edge indices (into `spec.edges()`) of one direction, grouped by slice.
pub(crate) fn grouped_edges(spec: &LatticeSpec, direction: Direction) -> Vec<usize> {
    let edges = spec.edges();
    let mut idx: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].direction == direction).collect();
    idx.sort_by_key(|&i| edge_group(spec, edges[i]));
    idx
}

/// All edge indices in layer order: x-edges then y-edges, each by slice.
pub(crate) fn grouped_edge_order(spec: &LatticeSpec) -> Vec<usize> {
    grouped_edges(spec, Direction::X).into_iter().chain(grouped_edges(spec, Direction::Y)).collect()
}

/// One layer with explicit angles: interactions, then x-hops, then y-hops,
/// each grouped into parallel slices.
pub fn trotter_step_with_angles(spec: &LatticeSpec, angles: &EdgeAngles) -> Result<Circuit> {
    layer(spec, angles, None)
}

/// Builds a layer; with `slots`, every angle-carrying gate of the slice for
/// edge `i` is bound to parameter `slots.0[i]` (interaction) or `slots.1[i]`
/// (hopping).
pub(crate) fn layer(spec: &LatticeSpec, angles: &EdgeAngles, slots: Option<(&[usize], &[usize])>) -> Result<Circuit> {
    let edges = spec.edges();
    if angles.interaction.len() != edges.len() || angles.hopping.len() != edges.len() {
        return Err(Error::ParameterCount {
            expected: 2 * edges.len(),
            got: angles.interaction.len() + angles.hopping.len(),
        });
    }
    let mut c = Circuit::new(spec.n_qubits());
    let append = |c: &mut Circuit, slice: Circuit, slot: Option<usize>| {
        for g in slice.gates {
            match slot {
                Some(p) if matches!(g.kind, GateKind::RZ | GateKind::CPHASE) => c.push_slot(p, g),
                _ => {
                    c.push(g);
                }
            }
        }
    };
    let order = grouped_edge_order(spec);
    for &i in &order {
        let slice = interaction_evolution(spec, edges[i], angles.interaction[i]);
        append(&mut c, slice, slots.map(|s| s.0[i]));
    }
    for &i in &order {
        let e = edges[i];
        let slice = match e.direction {
            Direction::X => hop_x_evolution(spec, e, angles.hopping[i])?,
            Direction::Y => hop_y_evolution(spec, e, angles.hopping[i])?,
        };
        append(&mut c, slice, slots.map(|s| s.1[i]));
    }
    Ok(c)
}

/// First-order Trotter step `e^{-i H_C dt} e^{-i H_x dt} e^{-i H_y dt}`.
pub fn trotter_step(spec: &LatticeSpec, t: f64, v: f64, dt: f64) -> Circuit {
    trotter_step_with_angles(spec, &EdgeAngles::trotter(spec, t, v, dt)).expect("angles sized from the lattice")
}
