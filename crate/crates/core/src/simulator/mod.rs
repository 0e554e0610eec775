//! Statevector simulation with mid-circuit measurement.
//!
//! A run keeps one branch per distinct live measurement record. Once a
//! record has no further readers it is dropped, and branches that then agree
//! on every remaining record and on their state (up to global phase) are
//! merged. Measurement-based uncomputation therefore collapses back to a
//! single branch, which is what [`run_deterministic`] checks.

mod dense;
mod sparse;

pub use dense::{unitarity_defect, unitary_of, StateVector, MAX_STATE_QUBITS, MAX_UNITARY_QUBITS};
pub use sparse::{SparseState, MAX_SPARSE_QUBITS};

use crate::circuit::{Circuit, Gate, MeasId, Qubit};
use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

pub trait QuantumState: Clone {
    fn n_qubits(&self) -> usize;
    /// Applies a unitary gate. Panics on measurements.
    fn apply(&mut self, gate: &Gate);
    fn probability_one(&self, q: Qubit) -> f64;
    fn norm_sqr(&self) -> f64;
    /// Projects qubit `q` onto `value` and renormalizes by `prob`.
    fn collapse(&mut self, q: Qubit, value: bool, prob: f64);
    fn inner(&self, other: &Self) -> C64;
}

/// `|<a|b>|^2` for normalized states.
pub fn fidelity<S: QuantumState>(a: &S, b: &S) -> f64 {
    a.inner(b).norm_sqr()
}

#[derive(Clone, Debug)]
pub struct Branch<S> {
    pub state: S,
    /// Outcome per measurement id; `None` when not yet taken or already dropped.
    pub outcomes: Vec<Option<bool>>,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Branches below this probability are discarded.
    pub prune: f64,
    /// Fidelity above which two branches count as the same state.
    pub merge_fidelity: f64,
    pub max_branches: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { prune: 1e-14, merge_fidelity: 1.0 - 1e-10, max_branches: 4096 }
    }
}

/// Index of the last op reading each measurement record.
fn last_uses(circuit: &Circuit) -> Vec<usize> {
    let mut last = vec![0; circuit.n_measurements];
    for (i, op) in circuit.ops.iter().enumerate() {
        if let Gate::MeasureX(_, MeasId(m)) | Gate::MeasureZ(_, MeasId(m)) = op.gate {
            last[m] = last[m].max(i);
        }
        if let Some(MeasId(m)) = op.cond {
            last[m] = last[m].max(i);
        }
    }
    last
}

fn measure<S: QuantumState>(branches: Vec<Branch<S>>, q: Qubit, m: usize, prune: f64) -> Vec<Branch<S>> {
    let mut out = Vec::with_capacity(branches.len() * 2);
    for b in branches {
        // Probabilities come from the actual masses so rounding never compounds.
        let total = b.state.norm_sqr();
        let m1 = b.state.probability_one(q).clamp(0.0, total);
        for (value, mass) in [(false, total - m1), (true, m1)] {
            let p = mass / total;
            if p * b.weight < prune || mass <= 0.0 {
                continue;
            }
            let mut state = b.state.clone();
            state.collapse(q, value, mass);
            let mut outcomes = b.outcomes.clone();
            outcomes[m] = Some(value);
            out.push(Branch { state, outcomes, weight: b.weight * p });
        }
    }
    out
}

fn merge<S: QuantumState>(branches: Vec<Branch<S>>, min_fidelity: f64) -> Vec<Branch<S>> {
    let mut out: Vec<Branch<S>> = Vec::with_capacity(branches.len());
    for b in branches {
        match out.iter_mut().find(|o| o.outcomes == b.outcomes && fidelity(&o.state, &b.state) >= min_fidelity) {
            Some(o) => o.weight += b.weight,
            None => out.push(b),
        }
    }
    out
}

/// Runs `circuit` from `initial`, returning every surviving branch.
pub fn run<S: QuantumState>(circuit: &Circuit, initial: S, opts: &RunOptions) -> Result<Vec<Branch<S>>> {
    if initial.n_qubits() != circuit.n_qubits {
        return Err(Error::Invalid(format!(
            "state has {} qubits but circuit has {}",
            initial.n_qubits(),
            circuit.n_qubits
        )));
    }
    let last = last_uses(circuit);
    let mut branches =
        vec![Branch { state: initial, outcomes: vec![None; circuit.n_measurements], weight: 1.0 }];
    for (i, op) in circuit.ops.iter().enumerate() {
        match op.gate {
            Gate::MeasureZ(q, MeasId(m)) => branches = measure(branches, q, m, opts.prune),
            Gate::MeasureX(q, MeasId(m)) => {
                branches.iter_mut().for_each(|b| b.state.apply(&Gate::H(q)));
                branches = measure(branches, q, m, opts.prune);
                branches.iter_mut().for_each(|b| b.state.apply(&Gate::H(q)));
            }
            g => {
                for b in branches.iter_mut() {
                    let fire = match op.cond {
                        None => true,
                        Some(MeasId(m)) => b.outcomes[m] == Some(true),
                    };
                    if fire {
                        b.state.apply(&g);
                    }
                }
            }
        }
        let mut dropped = false;
        for (m, &l) in last.iter().enumerate() {
            if l == i {
                branches.iter_mut().for_each(|b| b.outcomes[m] = None);
                dropped = true;
            }
        }
        if dropped && branches.len() > 1 {
            branches = merge(branches, opts.merge_fidelity);
        }
        if branches.len() > opts.max_branches {
            return Err(Error::Limit(format!("more than {} live branches after op {i}", opts.max_branches)));
        }
    }
    Ok(branches)
}

/// Runs `circuit` and requires the result to be one pure state.
pub fn run_deterministic<S: QuantumState>(circuit: &Circuit, initial: S) -> Result<S> {
    let mut branches = run(circuit, initial, &RunOptions::default())?;
    if branches.len() != 1 {
        return Err(Error::Invalid(format!(
            "circuit left {} distinguishable branches; measurement outcomes were not fully corrected",
            branches.len()
        )));
    }
    Ok(branches.pop().expect("one branch").state)
}

/// Runs `circuit` with every measurement forced to the given outcome.
///
/// Returns the renormalized final state and the probability of that
/// outcome sequence. Used when enumerating all branches is too costly.
pub fn run_postselected<S: QuantumState>(circuit: &Circuit, initial: S, outcomes: &[bool]) -> Result<(S, f64)> {
    if outcomes.len() != circuit.n_measurements {
        return Err(Error::Invalid(format!(
            "{} outcomes given for {} measurements",
            outcomes.len(),
            circuit.n_measurements
        )));
    }
    let mut state = initial;
    let mut prob = 1.0;
    for op in &circuit.ops {
        match op.gate {
            Gate::MeasureZ(q, MeasId(m)) | Gate::MeasureX(q, MeasId(m)) => {
                let is_x = matches!(op.gate, Gate::MeasureX(..));
                if is_x {
                    state.apply(&Gate::H(q));
                }
                let total = state.norm_sqr();
                let m1 = state.probability_one(q).clamp(0.0, total);
                let mass = if outcomes[m] { m1 } else { total - m1 };
                if mass <= 0.0 {
                    return Err(Error::Invalid(format!("outcome of measurement m{m} has zero probability")));
                }
                state.collapse(q, outcomes[m], mass);
                prob *= mass / total;
                if is_x {
                    state.apply(&Gate::H(q));
                }
            }
            g => {
                if op.cond.is_none_or(|MeasId(m)| outcomes[m]) {
                    state.apply(&g);
                }
            }
        }
    }
    Ok((state, prob))
}

/// Basis index with each register set to the given value (little-endian).
pub fn encode(assignments: &[(&[Qubit], u128)]) -> u128 {
    let mut k = 0u128;
    for (qubits, value) in assignments {
        for (i, &q) in qubits.iter().enumerate() {
            if (value >> i) & 1 == 1 {
                k |= 1u128 << q;
            }
        }
    }
    k
}

/// Value of a register within a basis index.
pub fn decode(index: u128, qubits: &[Qubit]) -> u128 {
    qubits.iter().enumerate().fold(0u128, |acc, (i, &q)| acc | (((index >> q) & 1) << i))
}
