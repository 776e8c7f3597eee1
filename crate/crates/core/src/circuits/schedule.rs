use std::collections::BTreeMap;

use serde::Serialize;

use super::{Circuit, GateKind};

/// How MATRIX gates enter the depth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MatrixCosting {
    /// Every multi-qubit gate costs one layer.
    #[default]
    Unit,
    /// MATRIX gates cost their declared decomposition count when present.
    Declared,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DepthReport {
    pub two_qubit_depth: usize,
    /// Gate counts keyed by number of qubits acted on.
    pub counts_by_arity: BTreeMap<usize, usize>,
    pub parameterized: usize,
    pub n_gates: usize,
}

impl DepthReport {
    pub fn count(&self, arity: usize) -> usize {
        self.counts_by_arity.get(&arity).copied().unwrap_or(0)
    }

    pub fn multi_qubit_gates(&self) -> usize {
        self.counts_by_arity.iter().filter(|(&k, _)| k >= 2).map(|(_, &v)| v).sum()
    }
}

pub fn schedule(c: &Circuit) -> DepthReport {
    schedule_with(c, MatrixCosting::Unit)
}

/// ASAP layering: each multi-qubit gate starts once all its qubits are free.
/// Single-qubit gates take no time.
pub fn schedule_with(c: &Circuit, costing: MatrixCosting) -> DepthReport {
    let mut free_at = vec![0usize; c.n_qubits];
    let mut report = DepthReport { n_gates: c.len(), ..Default::default() };
    for g in &c.gates {
        *report.counts_by_arity.entry(g.arity()).or_insert(0) += 1;
        if g.kind.n_params() > 0 {
            report.parameterized += 1;
        }
        if !g.is_multi_qubit() {
            continue;
        }
        let cost = match (costing, g.kind, g.decomposition_cost) {
            (MatrixCosting::Declared, GateKind::MATRIX, Some(k)) => k as usize,
            _ => 1,
        };
        let start = g.targets.iter().map(|&q| free_at[q]).max().unwrap_or(0);
        for &q in &g.targets {
            free_at[q] = start + cost;
        }
    }
    report.two_qubit_depth = free_at.into_iter().max().unwrap_or(0);
    // Variational MATRIX gates count as parameterized through their slots.
    let mut slotted: Vec<usize> =
        c.slots.iter().map(|&(_, g)| g).filter(|&g| c.gates[g].kind == GateKind::MATRIX).collect();
    slotted.sort_unstable();
    slotted.dedup();
    report.parameterized += slotted.len();
    report
}
