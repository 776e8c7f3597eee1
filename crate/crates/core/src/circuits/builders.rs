use crate::lattice::{Direction, Edge, LatticeSpec, Site};

use super::{Circuit, Gate};

/// Auxiliary sites receiving an X so that every loop string starts at its
/// target eigenvalue on `|0...0>`.
fn periodicity_sites(spec: &LatticeSpec) -> Vec<Site> {
    // On |0> with the physical register empty, a loop's eigenvalue is the
    // parity of X gates along it.
    let column_odd = spec.ly().is_multiple_of(2);
    let row_odd = !(spec.rho() == -1 && spec.lx() % 2 == 1);
    let cols: Vec<usize> = if column_odd { (0..spec.lx()).collect() } else { vec![] };
    let rows: Vec<usize> = if row_odd { (0..spec.ly()).collect() } else { vec![] };

    let paired = cols.len().min(rows.len());
    let mut sites: Vec<Site> = (0..paired).map(|m| Site::new(cols[m], rows[m])).collect();
    // Leftovers come in even numbers when the lattice shape is consistent;
    // they are stacked on the last paired line so its parity is unchanged.
    let last_col = if paired > 0 { cols[paired - 1] } else { 0 };
    let last_row = if paired > 0 { rows[paired - 1] } else { 0 };
    sites.extend(rows[paired..].iter().map(|&ry| Site::new(last_col, ry)));
    sites.extend(cols[paired..].iter().map(|&rx| Site::new(rx, last_row)));
    sites
}

/// `V_P`: X gates on auxiliary qubits fixing the loop eigenvalues. On
/// `L x L` even lattices these sit on the diagonal; odd lattices with
/// `rho = -1` need none.
pub fn periodicity_circuit(spec: &LatticeSpec) -> Circuit {
    let mut c = Circuit::new(spec.n_qubits());
    for s in periodicity_sites(spec) {
        c.push(Gate::x(spec.aux(s)));
    }
    c
}

/// Order in which the plaquette blocks are applied: rows bottom to top,
/// each row right to left. The control `aux(r+y)` of every block is then
/// untouched by the blocks before it.
fn vacuum_block_order(spec: &LatticeSpec) -> Vec<Site> {
    let mut anchors = spec.vacuum_plaquette_set();
    anchors.sort_by_key(|s| (s.ry, std::cmp::Reverse(s.rx)));
    anchors
}

/// `V_G V_P`: prepares the vacuum `|Omega_G>` from `|0...0>`.
///
/// Each block is H on `aux(r+y)` followed by CY, CNOT, CY from that control
/// onto `aux(r)`, `aux(r+x)`, `aux(r+x+y)`. An X of `V_P` landing on a
/// control qubit is applied right after that qubit's block.
pub fn vacuum_circuit(spec: &LatticeSpec) -> Circuit {
    let order = vacuum_block_order(spec);
    let controls: Vec<usize> = order.iter().map(|&r| spec.aux(spec.shift(r, 0, 1))).collect();
    let flips: Vec<usize> = periodicity_sites(spec).into_iter().map(|s| spec.aux(s)).collect();

    let mut c = Circuit::new(spec.n_qubits());
    for &q in flips.iter().filter(|q| !controls.contains(q)) {
        c.push(Gate::x(q));
    }
    for (&r, &ctrl) in order.iter().zip(&controls) {
        let (a, b, cc, _) = spec.plaquette_sites(r);
        c.push(Gate::h(ctrl));
        c.push(Gate::cy(ctrl, spec.aux(a)));
        c.push(Gate::cnot(ctrl, spec.aux(b)));
        c.push(Gate::cy(ctrl, spec.aux(cc)));
        if flips.contains(&ctrl) {
            c.push(Gate::x(ctrl));
        }
    }
    c
}

/// Creates a fermion pair on the two sites of `e`. Valid when both sites are
/// empty: the creation operator then reduces to a Pauli string.
pub fn pair_creation(spec: &LatticeSpec, e: Edge) -> Circuit {
    let r = e.origin;
    let r2 = spec.edge_target(e);
    let mut c = Circuit::new(spec.n_qubits());
    c.push(Gate::x(spec.phys(r)));
    c.push(Gate::x(spec.phys(r2)));
    match e.direction {
        Direction::X => {
            c.push(Gate::z(spec.aux(r2)));
        }
        Direction::Y => {
            c.push(Gate::y(spec.aux(r)));
            c.push(Gate::x(spec.aux(r2)));
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::GateKind;
    use crate::pauli::{constraint_set, number_sum};
    use crate::statevec::{max_constraint_violation, QuantumState, SparseState, StateVector};

    fn spec(lx: usize, ly: usize) -> LatticeSpec {
        LatticeSpec::new(lx, ly).unwrap()
    }

    fn loop_violation(spec: &LatticeSpec, c: &Circuit) -> f64 {
        let mut s = SparseState::zero_state(spec.n_qubits()).unwrap();
        c.apply(&mut s).unwrap();
        constraint_set(spec)
            .loops()
            .map(|st| (s.expval_string(&st.string).unwrap().re - st.target as f64).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn periodicity_on_even_square_is_diagonal() {
        let s = spec(4, 4);
        let c = periodicity_circuit(&s);
        assert_eq!(c.len(), 4);
        for (m, g) in c.gates.iter().enumerate() {
            assert_eq!(g.targets, vec![s.aux(Site::new(m, m))]);
        }
        assert!(loop_violation(&s, &c) < 1e-12);
    }

    #[test]
    fn periodicity_on_odd_lattice_is_empty() {
        let s = spec(3, 3);
        let c = periodicity_circuit(&s);
        assert!(c.is_empty());
        assert!(loop_violation(&s, &c) < 1e-12);
    }

    #[test]
    fn periodicity_meets_loop_targets_on_rectangles() {
        for (lx, ly) in [(2, 4), (4, 2), (2, 6), (6, 4), (3, 5)] {
            let s = spec(lx, ly);
            assert!(loop_violation(&s, &periodicity_circuit(&s)) < 1e-12, "{lx}x{ly}");
        }
    }

    #[test]
    fn vacuum_satisfies_every_constraint() {
        for (lx, ly) in [(2, 2), (2, 4), (4, 2), (3, 3), (4, 4)] {
            let s = spec(lx, ly);
            let mut st = SparseState::zero_state(s.n_qubits()).unwrap();
            vacuum_circuit(&s).apply(&mut st).unwrap();
            let v = max_constraint_violation(&st, &constraint_set(&s)).unwrap();
            assert!(v < 1e-10, "{lx}x{ly}: {v}");
        }
    }

    #[test]
    fn row_major_block_order_breaks_the_plaquettes() {
        // Negative control for the block order: with row-major anchors the
        // control of a block was already entangled by its left neighbour.
        let s = spec(3, 3);
        let mut c = Circuit::new(s.n_qubits());
        for r in s.vacuum_plaquette_set() {
            let (a, b, cc, d) = s.plaquette_sites(r);
            let ctrl = s.aux(d);
            c.push(Gate::h(ctrl));
            c.push(Gate::cy(ctrl, s.aux(a)));
            c.push(Gate::cnot(ctrl, s.aux(b)));
            c.push(Gate::cy(ctrl, s.aux(cc)));
        }
        let mut st = SparseState::zero_state(s.n_qubits()).unwrap();
        c.apply(&mut st).unwrap();
        assert!(max_constraint_violation(&st, &constraint_set(&s)).unwrap() > 0.5);
    }

    #[test]
    fn vacuum_gate_count() {
        for (lx, ly) in [(2, 2), (2, 4), (3, 3), (4, 4), (6, 6)] {
            let s = spec(lx, ly);
            let c = vacuum_circuit(&s);
            assert_eq!(c.multi_qubit_count(), 3 * (lx - 1) * (ly - 1));
            assert_eq!(c.count(GateKind::H), (lx - 1) * (ly - 1));
        }
    }

    #[test]
    fn pair_creation_keeps_constraints() {
        let s = spec(2, 4);
        let cs = constraint_set(&s);
        let nf = number_sum(&s);
        for e in [Edge::x(Site::new(0, 0)), Edge::y(Site::new(1, 2)), Edge::x(Site::new(1, 3))] {
            let mut st = StateVector::zero_state(s.n_qubits()).unwrap();
            vacuum_circuit(&s).apply(&mut st).unwrap();
            pair_creation(&s, e).apply(&mut st).unwrap();
            assert!((st.expval(&nf).unwrap() - 2.0).abs() < 1e-10);
            assert!(max_constraint_violation(&st, &cs).unwrap() < 1e-10);
            pair_creation(&s, e).apply(&mut st).unwrap();
            assert!(st.expval(&nf).unwrap().abs() < 1e-10);
        }
    }
}
