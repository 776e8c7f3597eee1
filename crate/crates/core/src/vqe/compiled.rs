//! Ansatz states evaluated inside the fixed-number constrained sector.
//!
//! Every ansatz gate commutes with the constraints and the fermion number,
//! so its action is captured exactly by its matrix between the sector's
//! basis vectors. Those matrices are built once; an energy evaluation is
//! then a chain of small matrix-vector products.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuits::{vx_components, vx_targets, vy_components, vy_targets, GateComponents};
use crate::error::{Error, Result};
use crate::lattice::{Direction, LatticeSpec};
use crate::linalg::{c, CMatrix, CVector};
use crate::pauli::{hopping_terms, interaction_terms_on, PauliSum};
use crate::statevec::{hermitian_eigen, SubspaceBasis};

#[derive(Clone, Debug)]
enum Kernel {
    /// `fixed + cos t * cos_part + sin t (e^{i p} raise + h.c.)`, params `[t, p]`.
    Rotation { fixed: CMatrix, cos_part: CMatrix, raise: CMatrix, raise_adj: CMatrix },
    /// `exp(i sign a G)` from the eigendecomposition of `G`, param `[a]`.
    Exponential { vecs: CMatrix, vecs_adj: CMatrix, vals: Vec<f64>, sign: f64 },
}

#[derive(Clone, Debug)]
pub(crate) struct Op {
    kernel: Kernel,
    pub params: Vec<usize>,
}

impl Op {
    pub fn rotation(
        basis: &SubspaceBasis,
        idx: &[usize],
        comps: &GateComponents,
        targets: &[usize],
        params: [usize; 2],
    ) -> Self {
        let r = |m: &CMatrix| basis.restrict_local(idx, m, targets);
        let raise = r(&comps.raise);
        let kernel = Kernel::Rotation {
            fixed: r(&comps.fixed),
            cos_part: r(&comps.cos_part),
            raise_adj: raise.adjoint(),
            raise,
        };
        Self { kernel, params: params.to_vec() }
    }

    pub fn exponential(
        basis: &SubspaceBasis,
        idx: &[usize],
        generator: &PauliSum,
        sign: f64,
        param: usize,
    ) -> Result<Self> {
        let g = basis.project_operator(generator)?.restrict(idx).to_dense();
        let (vals, vecs) = hermitian_eigen(&g);
        Ok(Self { kernel: Kernel::Exponential { vecs_adj: vecs.adjoint(), vecs, vals, sign }, params: vec![param] })
    }

    pub fn unitary(&self, p: &[f64]) -> CMatrix {
        match &self.kernel {
            Kernel::Rotation { fixed, cos_part, raise, raise_adj } => {
                let (t, ph) = (p[self.params[0]], p[self.params[1]]);
                let e = Complex64::from_polar(t.sin(), ph);
                fixed + cos_part * c(t.cos(), 0.0) + raise * e + raise_adj * e.conj()
            }
            Kernel::Exponential { vecs, vecs_adj, vals, sign } => {
                let a = p[self.params[0]];
                let mut scaled = vecs.clone();
                for (k, &l) in vals.iter().enumerate() {
                    let ph = Complex64::from_polar(1.0, sign * a * l);
                    scaled.column_mut(k).iter_mut().for_each(|x| *x *= ph);
                }
                scaled * vecs_adj
            }
        }
    }

    pub fn apply(&self, p: &[f64], x: &CVector) -> CVector {
        match &self.kernel {
            Kernel::Rotation { .. } => self.unitary(p) * x,
            Kernel::Exponential { vecs, vecs_adj, vals, sign } => {
                let a = p[self.params[0]];
                let mut y = vecs_adj * x;
                for (k, &l) in vals.iter().enumerate() {
                    y[k] *= Complex64::from_polar(1.0, sign * a * l);
                }
                vecs * y
            }
        }
    }
}

/// Compiled ansatz over one sector: initial vector, Hamiltonian and ops.
#[derive(Clone, Debug)]
pub(crate) struct SectorProgram {
    pub init: CVector,
    pub hamiltonian: CMatrix,
    pub ops: Vec<Op>,
    pub n_params: usize,
    /// True when every parameter drives exactly one op.
    single_binding: bool,
}

impl SectorProgram {
    pub fn new(init: CVector, hamiltonian: CMatrix, ops: Vec<Op>, n_params: usize) -> Self {
        let mut uses = vec![0usize; n_params];
        for op in &ops {
            for &p in &op.params {
                uses[p] += 1;
            }
        }
        let single_binding = uses.iter().all(|&u| u == 1);
        Self { init, hamiltonian, ops, n_params, single_binding }
    }

    fn check(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.n_params {
            return Err(Error::ParameterCount { expected: self.n_params, got: p.len() });
        }
        Ok(())
    }

    pub fn state(&self, p: &[f64]) -> Result<CVector> {
        self.check(p)?;
        Ok(self.ops.iter().fold(self.init.clone(), |x, op| op.apply(p, &x)))
    }

    fn expval(&self, x: &CVector) -> f64 {
        x.dotc(&(&self.hamiltonian * x)).re
    }

    pub fn energy(&self, p: &[f64]) -> Result<f64> {
        Ok(self.expval(&self.state(p)?))
    }

    /// Energy and central-difference gradient with step `h`.
    ///
    /// When each parameter touches a single op, the states before each op
    /// and the Hamiltonian pulled back through the ops after it are cached,
    /// so a shifted energy costs one op application and one quadratic form.
    pub fn energy_and_gradient(&self, p: &[f64], h: f64) -> Result<(f64, Vec<f64>)> {
        self.check(p)?;
        if !self.single_binding {
            let e = self.energy(p)?;
            let grad = (0..self.n_params)
                .into_par_iter()
                .map(|k| {
                    let mut q = p.to_vec();
                    q[k] = p[k] + h;
                    let plus = self.energy(&q).expect("sized");
                    q[k] = p[k] - h;
                    let minus = self.energy(&q).expect("sized");
                    (plus - minus) / (2.0 * h)
                })
                .collect();
            return Ok((e, grad));
        }

        let mut prefix = Vec::with_capacity(self.ops.len() + 1);
        prefix.push(self.init.clone());
        for op in &self.ops {
            let next = op.apply(p, prefix.last().unwrap());
            prefix.push(next);
        }
        let energy = self.expval(prefix.last().unwrap());

        // pulled[g] is the Hamiltonian seen right after op g.
        let mut pulled = vec![self.hamiltonian.clone(); self.ops.len()];
        for g in (0..self.ops.len().saturating_sub(1)).rev() {
            let u = self.ops[g + 1].unitary(p);
            pulled[g] = u.adjoint() * &pulled[g + 1] * u;
        }

        let per_op: Vec<Vec<(usize, f64)>> = self
            .ops
            .par_iter()
            .enumerate()
            .map(|(g, op)| {
                op.params
                    .iter()
                    .map(|&k| {
                        let mut q = p.to_vec();
                        let mut shifted = |delta: f64| {
                            q[k] = p[k] + delta;
                            let x = op.apply(&q, &prefix[g]);
                            x.dotc(&(&pulled[g] * &x)).re
                        };
                        let plus = shifted(h);
                        let minus = shifted(-h);
                        (k, (plus - minus) / (2.0 * h))
                    })
                    .collect()
            })
            .collect();
        let mut grad = vec![0.0; self.n_params];
        for (k, d) in per_op.into_iter().flatten() {
            grad[k] = d;
        }
        Ok((energy, grad))
    }
}

/// A-gate ops in the same order and parameter layout as `ansatz_agate`.
pub(crate) fn agate_ops(spec: &LatticeSpec, basis: &SubspaceBasis, idx: &[usize], layers: usize) -> Vec<Op> {
    let (cx, cy) = (vx_components(), vy_components());
    let mut ops = Vec::new();
    let mut k = 0;
    for _ in 0..layers {
        for e in spec.y_edges().into_iter().chain(spec.x_edges()) {
            let op = match e.direction {
                Direction::X => Op::rotation(basis, idx, &cx, &vx_targets(spec, e), [k, k + 1]),
                Direction::Y => Op::rotation(basis, idx, &cy, &vy_targets(spec, e), [k, k + 1]),
            };
            ops.push(op);
            k += 2;
        }
    }
    ops
}

/// HV ops matching `ansatz_hv`: interaction slices `exp(-i a n n)`, then
/// hopping slices `exp(+i a G)` with `G` the generator the hop circuits
/// implement.
pub(crate) fn hv_ops(
    spec: &LatticeSpec,
    basis: &SubspaceBasis,
    idx: &[usize],
    layers: usize,
    granularity: crate::circuits::HvGranularity,
) -> Result<Vec<Op>> {
    let edges = spec.edges();
    let order = crate::circuits::grouped_edge_order(spec);
    let mut inter_ops = Vec::with_capacity(edges.len());
    let mut hop_ops = Vec::with_capacity(edges.len());
    for e in &edges {
        inter_ops.push(Op::exponential(basis, idx, &interaction_terms_on(spec, *e, 1.0), -1.0, 0)?);
        let scale = match e.direction {
            Direction::X => 2.0 * spec.rho() as f64,
            Direction::Y => 2.0,
        };
        let mut g = PauliSum::new(spec.n_qubits());
        g.add_sum(&hopping_terms(spec, *e), c(scale, 0.0))?;
        hop_ops.push(Op::exponential(basis, idx, &g, 1.0, 0)?);
    }
    let mut ops = Vec::new();
    let zeros = vec![0.0; crate::circuits::hv_parameter_count(spec, layers, granularity)];
    for l in 0..layers {
        let (_, inter, hop) = crate::circuits::hv_layer_angles(spec, l, &zeros, granularity);
        for &i in &order {
            let mut op = inter_ops[i].clone();
            op.params = vec![inter[i]];
            ops.push(op);
        }
        for &i in &order {
            let mut op = hop_ops[i].clone();
            op.params = vec![hop[i]];
            ops.push(op);
        }
    }
    Ok(ops)
}
