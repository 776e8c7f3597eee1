use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Direction, Edge, LatticeSpec};
use crate::linalg::{c, CMatrix, I, ONE, ZERO};

use super::evolution::{layer, EdgeAngles};
use super::{Circuit, Gate};

/// Two-qubit-gate cost of [`vx_decomposition`] with the A-gate counted as
/// its three CNOTs.
pub const VX_DECOMPOSITION_COST: u32 = 5;
/// Two-qubit-gate cost of [`vy_decomposition`], counted the same way.
pub const VY_DECOMPOSITION_COST: u32 = 7;
/// CNOTs in the native circuit of the A-gate.
const A_GATE_COST: u32 = 3;

/// Particle-conserving rotation on two qubits, basis `|00>, |01>, |10>, |11>`
/// (first qubit most significant):
///
/// ```text
/// [1  0               0               0]
/// [0  cos t           e^{i p} sin t   0]
/// [0  e^{-i p} sin t  -cos t          0]
/// [0  0               0               1]
/// ```
pub fn a_matrix(theta: f64, phi: f64) -> CMatrix {
    let (ct, st) = (theta.cos(), theta.sin());
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(3, 3)] = ONE;
    m[(1, 1)] = c(ct, 0.0);
    m[(2, 2)] = c(-ct, 0.0);
    m[(1, 2)] = Complex64::from_polar(st, phi);
    m[(2, 1)] = Complex64::from_polar(st, -phi);
    m
}

/// Fixed matrices spanning a variational hopping gate:
/// `U(theta, phi) = fixed + cos(theta) cos_part + sin(theta) (e^{i phi} raise + h.c.)`.
#[derive(Clone, Debug)]
pub struct GateComponents {
    pub fixed: CMatrix,
    pub cos_part: CMatrix,
    pub raise: CMatrix,
}

impl GateComponents {
    pub fn assemble(&self, theta: f64, phi: f64) -> CMatrix {
        let e = Complex64::from_polar(theta.sin(), phi);
        &self.fixed + &self.cos_part * c(theta.cos(), 0.0) + &self.raise * e + self.raise.adjoint() * e.conj()
    }
}

/// Builds the components for a gate whose first two targets are the
/// physical pair and whose remaining `aux_bits` targets carry the
/// auxiliary operator `aux_op` inside the single-excitation block.
fn components(aux_bits: usize, aux_op: &CMatrix, raise_factor: Complex64) -> GateComponents {
    let da = 1 << aux_bits;
    let dim = 4 * da;
    let mut fixed = CMatrix::zeros(dim, dim);
    let mut cos_part = CMatrix::zeros(dim, dim);
    let mut raise = CMatrix::zeros(dim, dim);
    let block = |phys: usize| phys * da;
    for a in 0..da {
        fixed[(block(0b00) + a, block(0b00) + a)] = ONE;
        fixed[(block(0b11) + a, block(0b11) + a)] = ONE;
        cos_part[(block(0b01) + a, block(0b01) + a)] = ONE;
        cos_part[(block(0b10) + a, block(0b10) + a)] = -ONE;
        for b in 0..da {
            raise[(block(0b01) + a, block(0b10) + b)] = aux_op[(a, b)] * raise_factor;
        }
    }
    GateComponents { fixed, cos_part, raise }
}

/// Components of [`vx_unitary`]: within the single-excitation block the
/// off-diagonal entries carry `Z` on the auxiliary qubit.
pub fn vx_components() -> GateComponents {
    let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    components(1, &z, ONE)
}

/// Components of [`vy_unitary`]: the off-diagonal blocks are
/// `+i e^{-i phi} sin(theta) P` (upper) and `-i e^{i phi} sin(theta) P`
/// (lower) with `P = Y(aux r) X(aux r+y)`.
pub fn vy_components() -> GateComponents {
    let y = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let p = y.kronecker(&x);
    // The e^{i phi} coefficient multiplies the lower block -i P; its
    // adjoint (the upper block) is stored as `raise`.
    let comps = components(2, &p, ONE);
    GateComponents { raise: comps.raise.adjoint() * c(0.0, -1.0), ..comps }
}

/// 8x8 gate on `(phys r, phys r+x, aux r+x)`.
pub fn vx_unitary(theta: f64, phi: f64) -> CMatrix {
    vx_components().assemble(theta, phi)
}

/// 16x16 gate on `(phys r, phys r+y, aux r, aux r+y)`.
pub fn vy_unitary(theta: f64, phi: f64) -> CMatrix {
    vy_components().assemble(theta, phi)
}

pub fn vx_targets(spec: &LatticeSpec, e: Edge) -> Vec<usize> {
    let r2 = spec.edge_target(e);
    vec![spec.phys(e.origin), spec.phys(r2), spec.aux(r2)]
}

pub fn vy_targets(spec: &LatticeSpec, e: Edge) -> Vec<usize> {
    let r2 = spec.edge_target(e);
    vec![spec.phys(e.origin), spec.phys(r2), spec.aux(e.origin), spec.aux(r2)]
}

pub fn vx_gate(spec: &LatticeSpec, e: Edge, theta: f64, phi: f64) -> Result<Gate> {
    if e.direction != Direction::X {
        return Err(Error::WrongEdge("vx_gate"));
    }
    Gate::matrix_gate(vx_unitary(theta, phi), &vx_targets(spec, e), Some(VX_DECOMPOSITION_COST))
}

pub fn vy_gate(spec: &LatticeSpec, e: Edge, theta: f64, phi: f64) -> Result<Gate> {
    if e.direction != Direction::Y {
        return Err(Error::WrongEdge("vy_gate"));
    }
    Gate::matrix_gate(vy_unitary(theta, phi), &vy_targets(spec, e), Some(VY_DECOMPOSITION_COST))
}

fn a_gate(p1: usize, p2: usize, theta: f64, phi: f64) -> Gate {
    Gate::matrix_gate(a_matrix(theta, phi), &[p1, p2], Some(A_GATE_COST)).expect("A is unitary")
}

/// `V_x` from the A-gate: the sign of the hopping amplitude follows the
/// auxiliary qubit, which is a conjugation of A by `CZ(aux, phys r)`.
pub fn vx_decomposition(spec: &LatticeSpec, e: Edge, theta: f64, phi: f64) -> Result<Circuit> {
    if e.direction != Direction::X {
        return Err(Error::WrongEdge("vx_decomposition"));
    }
    let t = vx_targets(spec, e);
    let mut c = Circuit::new(spec.n_qubits());
    c.push(Gate::cz(t[2], t[0]));
    c.push(a_gate(t[0], t[1], theta, phi));
    c.push(Gate::cz(t[2], t[0]));
    Ok(c)
}

/// `V_y` from the A-gate: `Y X` on the auxiliary pair is rotated to `Z Z`,
/// its parity collected on `aux r` and used as in [`vx_decomposition`].
pub fn vy_decomposition(spec: &LatticeSpec, e: Edge, theta: f64, phi: f64) -> Result<Circuit> {
    if e.direction != Direction::Y {
        return Err(Error::WrongEdge("vy_decomposition"));
    }
    let t = vy_targets(spec, e);
    let mut basis = Circuit::new(spec.n_qubits());
    basis.push(Gate::rx(t[2], -FRAC_PI_2));
    basis.push(Gate::ry(t[3], FRAC_PI_2));
    basis.push(Gate::cnot(t[3], t[2]));
    let mut c = basis.clone();
    c.push(Gate::cz(t[2], t[0]));
    c.push(a_gate(t[0], t[1], theta, FRAC_PI_2 - phi));
    c.push(Gate::cz(t[2], t[0]));
    c.extend(basis.adjoint());
    Ok(c)
}

pub fn agate_parameter_count(spec: &LatticeSpec, layers: usize) -> usize {
    layers * spec.edges().len() * 2
}

/// A-gate ansatz. Each layer applies `V_y` on every y-edge, then `V_x` on
/// every x-edge (row-major), each with its own `(theta, phi)` pair taken
/// from `params` in application order.
pub fn ansatz_agate(spec: &LatticeSpec, layers: usize, params: &[f64]) -> Result<Circuit> {
    let expected = agate_parameter_count(spec, layers);
    if params.len() != expected {
        return Err(Error::ParameterCount { expected, got: params.len() });
    }
    let mut c = Circuit::new(spec.n_qubits());
    let mut k = 0;
    for _ in 0..layers {
        for e in spec.y_edges().into_iter().chain(spec.x_edges()) {
            let (theta, phi) = (params[k], params[k + 1]);
            let g = match e.direction {
                Direction::X => vx_gate(spec, e, theta, phi)?,
                Direction::Y => vy_gate(spec, e, theta, phi)?,
            };
            c.slots.push((k, c.gates.len()));
            c.slots.push((k + 1, c.gates.len()));
            c.push(g);
            k += 2;
        }
    }
    Ok(c)
}

/// How the Hamiltonian-variational ansatz shares its angles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum HvGranularity {
    /// Three angles per layer: interaction, x-hopping, y-hopping.
    PerGroup,
    /// One interaction and one hopping angle per edge and layer.
    PerEdge,
}

pub fn hv_parameter_count(spec: &LatticeSpec, layers: usize, granularity: HvGranularity) -> usize {
    match granularity {
        HvGranularity::PerGroup => 3 * layers,
        HvGranularity::PerEdge => 2 * spec.edges().len() * layers,
    }
}

/// Per-layer angles and their parameter indices. For `PerEdge` the first
/// `|E|` parameters of a layer are interaction angles, the next `|E|`
/// hopping angles, both in `spec.edges()` order.
pub(crate) fn hv_layer_angles(
    spec: &LatticeSpec,
    layer_index: usize,
    params: &[f64],
    granularity: HvGranularity,
) -> (EdgeAngles, Vec<usize>, Vec<usize>) {
    let edges = spec.edges();
    let ne = edges.len();
    match granularity {
        HvGranularity::PerGroup => {
            let base = 3 * layer_index;
            let inter = vec![base; ne];
            let hop: Vec<usize> = edges
                .iter()
                .map(|e| match e.direction {
                    Direction::X => base + 1,
                    Direction::Y => base + 2,
                })
                .collect();
            let angles = EdgeAngles {
                interaction: inter.iter().map(|&p| params[p]).collect(),
                hopping: hop.iter().map(|&p| params[p]).collect(),
            };
            (angles, inter, hop)
        }
        HvGranularity::PerEdge => {
            let base = 2 * ne * layer_index;
            let inter: Vec<usize> = (base..base + ne).collect();
            let hop: Vec<usize> = (base + ne..base + 2 * ne).collect();
            let angles = EdgeAngles {
                interaction: inter.iter().map(|&p| params[p]).collect(),
                hopping: hop.iter().map(|&p| params[p]).collect(),
            };
            (angles, inter, hop)
        }
    }
}

/// Hamiltonian-variational ansatz: Trotter-structured layers with free
/// angles. The hopping angle `theta` enters as `exp(+i theta T)` with `T`
/// the bosonized hopping generator, the interaction angle as
/// `exp(-i lambda n n)`.
pub fn ansatz_hv(spec: &LatticeSpec, layers: usize, params: &[f64], granularity: HvGranularity) -> Result<Circuit> {
    let expected = hv_parameter_count(spec, layers, granularity);
    if params.len() != expected {
        return Err(Error::ParameterCount { expected, got: params.len() });
    }
    let mut c = Circuit::new(spec.n_qubits());
    for l in 0..layers {
        let (angles, inter, hop) = hv_layer_angles(spec, l, params, granularity);
        c.extend(layer(spec, &angles, Some((&inter, &hop)))?);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Site;
    use crate::linalg::{max_abs_diff, pauli_string_matrix, phase_insensitive_diff, unitarity_error};
    use crate::pauli::{constraint_set, number_sum, Pauli, PauliString};
    use crate::statevec::QuantumState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(lx: usize, ly: usize) -> LatticeSpec {
        LatticeSpec::new(lx, ly).unwrap()
    }

    /// Local matrix of a Pauli string on `targets`, first target most
    /// significant as for gate matrices.
    fn local_string(targets: &[usize], f: &[(usize, Pauli)]) -> CMatrix {
        let k = targets.len();
        let local: Vec<(usize, Pauli)> =
            f.iter().map(|&(q, p)| (k - 1 - targets.iter().position(|&t| t == q).unwrap(), p)).collect();
        pauli_string_matrix(&PauliString::from_factors(k, &local))
    }

    #[test]
    fn vx_at_zero_angle_is_a_sign_on_10() {
        let u = vx_unitary(0.0, 0.7);
        for i in 0..8 {
            let expect = if i >> 1 == 0b10 { -1.0 } else { 1.0 };
            assert!((u[(i, i)].re - expect).abs() < 1e-15);
        }
        assert!(max_abs_diff(&u, &CMatrix::from_diagonal(&u.diagonal())) < 1e-15);
    }

    #[test]
    fn vx_with_aux_zero_is_the_a_gate() {
        let (theta, phi) = (0.4, -1.3);
        let u = vx_unitary(theta, phi);
        let a = a_matrix(theta, phi);
        for i in 0..4 {
            for j in 0..4 {
                assert!((u[(2 * i, 2 * j)] - a[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn vy_at_zero_angle_flips_the_10_block() {
        let u = vy_unitary(0.0, 0.2);
        for i in 0..16 {
            let expect = if i >> 2 == 0b10 { -1.0 } else { 1.0 };
            assert!((u[(i, i)].re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn variational_gates_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (t, p) = (rng.random::<f64>() * 6.0, rng.random::<f64>() * 6.0);
            assert!(unitarity_error(&vx_unitary(t, p)) < 1e-12);
            assert!(unitarity_error(&vy_unitary(t, p)) < 1e-12);
        }
    }

    #[test]
    fn vy_block_structure() {
        let (theta, phi) = (0.3, 0.9);
        let u = vy_unitary(theta, phi);
        let p = local_string(&[0, 1], &[(0, Pauli::Y), (1, Pauli::X)]);
        for a in 0..4 {
            for b in 0..4 {
                let upper = u[((0b01 << 2) | a, (0b10 << 2) | b)];
                let lower = u[((0b10 << 2) | a, (0b01 << 2) | b)];
                let up = c(0.0, 1.0) * Complex64::from_polar(theta.sin(), -phi) * p[(a, b)];
                let lo = c(0.0, -1.0) * Complex64::from_polar(theta.sin(), phi) * p[(a, b)];
                assert!((upper - up).norm() < 1e-14 && (lower - lo).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn gates_commute_with_constraints_and_number() {
        let s = spec(2, 4);
        let cs = constraint_set(&s);
        let mut checks: Vec<(Vec<usize>, CMatrix)> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for e in s.edges() {
            let (t, p) = (rng.random::<f64>() * 3.0, rng.random::<f64>() * 3.0);
            let g = match e.direction {
                Direction::X => vx_gate(&s, e, t, p).unwrap(),
                Direction::Y => vy_gate(&s, e, t, p).unwrap(),
            };
            checks.push((g.targets.clone(), g.unitary()));
        }
        for (targets, u) in &checks {
            let restrict = |string: &PauliString| {
                let f: Vec<(usize, Pauli)> =
                    targets.iter().map(|&q| (q, string.letter(q))).filter(|(_, l)| *l != Pauli::I).collect();
                local_string(targets, &f)
            };
            for st in &cs.stabilizers {
                let m = restrict(&st.string);
                assert!(max_abs_diff(&(u * &m), &(&m * u)) < 1e-12, "{}", st.kind);
            }
            let nloc: CMatrix = (0..2)
                .map(|j| local_string(targets, &[(targets[j], Pauli::Z)]))
                .fold(CMatrix::zeros(u.nrows(), u.ncols()), |acc, m| acc + m);
            assert!(max_abs_diff(&(u * &nloc), &(&nloc * u)) < 1e-12);
        }
    }

    #[test]
    fn decompositions_reproduce_the_gates() {
        let s = spec(2, 2);
        for (theta, phi) in [(0.3, 1.1), (-0.8, 0.25)] {
            let e = Edge::x(Site::new(0, 1));
            let c = vx_decomposition(&s, e, theta, phi).unwrap();
            let mut g = Circuit::new(8);
            g.push(vx_gate(&s, e, theta, phi).unwrap());
            assert!(max_abs_diff(&c.unitary().unwrap(), &g.unitary().unwrap()) < 1e-12);

            let e = Edge::y(Site::new(1, 0));
            let c = vy_decomposition(&s, e, theta, phi).unwrap();
            let mut g = Circuit::new(8);
            g.push(vy_gate(&s, e, theta, phi).unwrap());
            assert!(phase_insensitive_diff(&c.unitary().unwrap(), &g.unitary().unwrap()) < 1e-12);
        }
        assert_eq!(
            vx_decomposition(&s, Edge::x(Site::new(0, 0)), 0.1, 0.2).unwrap().multi_qubit_count() as u32 + A_GATE_COST
                - 1,
            VX_DECOMPOSITION_COST
        );
        assert_eq!(
            vy_decomposition(&s, Edge::y(Site::new(0, 0)), 0.1, 0.2).unwrap().multi_qubit_count() as u32 + A_GATE_COST
                - 1,
            VY_DECOMPOSITION_COST
        );
    }

    #[test]
    fn parameter_counts() {
        let s = spec(2, 4);
        assert_eq!(agate_parameter_count(&s, 3), 96);
        assert_eq!(hv_parameter_count(&s, 3, HvGranularity::PerGroup), 9);
        assert_eq!(hv_parameter_count(&s, 1, HvGranularity::PerEdge), 32);
        assert!(matches!(ansatz_agate(&s, 3, &[0.0; 95]), Err(Error::ParameterCount { expected: 96, got: 95 })));
        assert!(ansatz_hv(&s, 3, &[0.0; 8], HvGranularity::PerGroup).is_err());
    }

    #[test]
    fn hv_with_zero_angles_is_identity() {
        let s = spec(2, 2);
        let c = ansatz_hv(&s, 2, &vec![0.0; hv_parameter_count(&s, 2, HvGranularity::PerEdge)], HvGranularity::PerEdge)
            .unwrap();
        let u = c.unitary().unwrap();
        assert!(phase_insensitive_diff(&u, &CMatrix::identity(256, 256)) < 1e-12);
    }

    #[test]
    fn slots_bind_each_gate_once() {
        let s = spec(2, 4);
        let c = ansatz_hv(&s, 2, &[0.1; 6], HvGranularity::PerGroup).unwrap();
        let mut gates: Vec<usize> = c.slots.iter().map(|&(_, g)| g).collect();
        gates.sort_unstable();
        let before = gates.len();
        gates.dedup();
        assert_eq!(before, gates.len());
        assert!(c.slots.iter().all(|&(p, _)| p < 6));
        c.validate().unwrap();
    }

    #[test]
    fn agate_ansatz_preserves_number_and_constraints() {
        let s = spec(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let params: Vec<f64> = (0..agate_parameter_count(&s, 2)).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let mut st = crate::statevec::StateVector::zero_state(8).unwrap();
        super::super::vacuum_circuit(&s).apply(&mut st).unwrap();
        super::super::pair_creation(&s, Edge::x(Site::new(0, 0))).apply(&mut st).unwrap();
        ansatz_agate(&s, 2, &params).unwrap().apply(&mut st).unwrap();
        assert!((st.expval(&number_sum(&s)).unwrap() - 2.0).abs() < 1e-10);
        assert!(crate::statevec::max_constraint_violation(&st, &constraint_set(&s)).unwrap() < 1e-10);
    }
}
