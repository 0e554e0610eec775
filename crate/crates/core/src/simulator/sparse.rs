use std::collections::HashMap;
use std::hash::BuildHasherDefault;
use std::collections::hash_map::DefaultHasher;

use super::{QuantumState, C64};
use crate::circuit::Gate;
use crate::error::{Error, Result};

pub const MAX_SPARSE_QUBITS: usize = 128;
const PRUNE: f64 = 1e-30;

type Map = HashMap<u128, C64, BuildHasherDefault<DefaultHasher>>;

/// Sparse state keyed by basis index. Suited to the mostly classical
/// circuits built by the kernels, where only a few basis states are live.
#[derive(Clone, Debug)]
pub struct SparseState {
    n_qubits: usize,
    amps: Map,
}

impl SparseState {
    pub fn basis(n_qubits: usize, index: u128) -> Result<Self> {
        Self::from_terms(n_qubits, [(index, C64::new(1.0, 0.0))])
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (u128, C64)>) -> Result<Self> {
        if n_qubits > MAX_SPARSE_QUBITS {
            return Err(Error::Limit(format!("{n_qubits} qubits exceeds sparse limit {MAX_SPARSE_QUBITS}")));
        }
        let mut amps = Map::default();
        for (k, a) in terms {
            if n_qubits < 128 && k >> n_qubits != 0 {
                return Err(Error::Invalid(format!("basis index {k} out of range for {n_qubits} qubits")));
            }
            *amps.entry(k).or_default() += a;
        }
        Ok(SparseState { n_qubits, amps })
    }

    pub fn get(&self, index: u128) -> C64 {
        self.amps.get(&index).copied().unwrap_or_default()
    }

    /// Nonzero terms sorted by basis index.
    pub fn terms(&self) -> Vec<(u128, C64)> {
        let mut v: Vec<_> = self.amps.iter().map(|(&k, &a)| (k, a)).collect();
        v.sort_by_key(|t| t.0);
        v
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    fn remap(&mut self, f: impl Fn(u128) -> u128) {
        let old = std::mem::take(&mut self.amps);
        self.amps.reserve(old.len());
        for (k, a) in old {
            self.amps.insert(f(k), a);
        }
    }

    fn phase(&mut self, pred: impl Fn(u128) -> bool, factor: C64) {
        for (k, a) in self.amps.iter_mut() {
            if pred(*k) {
                *a *= factor;
            }
        }
    }
}

fn bit(q: usize) -> u128 {
    1u128 << q
}

impl QuantumState for SparseState {
    fn norm_sqr(&self) -> f64 {
        SparseState::norm_sqr(self)
    }

    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply(&mut self, gate: &Gate) {
        let i = C64::new(0.0, 1.0);
        match *gate {
            Gate::X(q) => self.remap(|k| k ^ bit(q)),
            Gate::Y(q) => {
                self.phase(|k| k & bit(q) == 0, i);
                self.phase(|k| k & bit(q) != 0, -i);
                self.remap(|k| k ^ bit(q));
            }
            Gate::Z(q) => self.phase(|k| k & bit(q) != 0, C64::new(-1.0, 0.0)),
            Gate::S(q) => self.phase(|k| k & bit(q) != 0, i),
            Gate::Sdg(q) => self.phase(|k| k & bit(q) != 0, -i),
            Gate::Cz(p, q) => self.phase(|k| k & bit(p) != 0 && k & bit(q) != 0, C64::new(-1.0, 0.0)),
            Gate::Cnot(c, t) => self.remap(|k| if k & bit(c) != 0 { k ^ bit(t) } else { k }),
            Gate::Toffoli(a, b, t) => {
                self.remap(|k| if k & bit(a) != 0 && k & bit(b) != 0 { k ^ bit(t) } else { k })
            }
            Gate::Cswap(c, p, q) => self.remap(|k| {
                let (x, y) = (k & bit(p) != 0, k & bit(q) != 0);
                if k & bit(c) != 0 && x != y {
                    k ^ bit(p) ^ bit(q)
                } else {
                    k
                }
            }),
            Gate::H(q) => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                let old = std::mem::take(&mut self.amps);
                let mut keys: Vec<u128> = old.keys().copied().collect();
                keys.sort_unstable();
                for k in keys {
                    let a = old[&k];
                    let lo = k & !bit(q);
                    let sign = if k & bit(q) != 0 { -1.0 } else { 1.0 };
                    *self.amps.entry(lo).or_default() += a * r;
                    *self.amps.entry(lo | bit(q)).or_default() += a * (r * sign);
                }
                self.amps.retain(|_, a| a.norm_sqr() > PRUNE);
            }
            Gate::MeasureX(..) | Gate::MeasureZ(..) => panic!("measurement passed to unitary apply"),
        }
    }

    fn probability_one(&self, q: usize) -> f64 {
        self.amps.iter().filter(|(k, _)| *k & bit(q) != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    fn collapse(&mut self, q: usize, value: bool, prob: f64) {
        let scale = 1.0 / prob.sqrt();
        self.amps.retain(|k, _| (k & bit(q) != 0) == value);
        for a in self.amps.values_mut() {
            *a *= scale;
        }
    }

    fn inner(&self, other: &Self) -> C64 {
        let (small, large, conj_small) =
            if self.amps.len() <= other.amps.len() { (self, other, true) } else { (other, self, false) };
        let mut acc = C64::new(0.0, 0.0);
        let mut keys: Vec<&u128> = small.amps.keys().collect();
        keys.sort_unstable();
        for k in keys {
            if let Some(b) = large.amps.get(k) {
                let a = small.amps[k];
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        acc
    }
}
