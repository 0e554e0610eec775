use nalgebra::DMatrix;

use super::{QuantumState, C64};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

pub const MAX_STATE_QUBITS: usize = 22;
pub const MAX_UNITARY_QUBITS: usize = 12;

/// Dense statevector; basis index bit `q` is the value of qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_STATE_QUBITS {
            return Err(Error::Limit(format!("{n_qubits} qubits exceeds dense limit {MAX_STATE_QUBITS}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << n_qubits];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n > MAX_STATE_QUBITS {
            return Err(Error::Invalid("amplitude count must be a power of two within the dense limit".into()));
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

impl QuantumState for StateVector {
    fn norm_sqr(&self) -> f64 {
        StateVector::norm_sqr(self)
    }

    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply(&mut self, gate: &Gate) {
        let bit = |q: usize| 1usize << q;
        let a = &mut self.amps;
        match *gate {
            Gate::X(q) => {
                for i in 0..a.len() {
                    if i & bit(q) == 0 {
                        a.swap(i, i | bit(q));
                    }
                }
            }
            Gate::Y(q) => {
                for i in 0..a.len() {
                    if i & bit(q) == 0 {
                        let (a0, a1) = (a[i], a[i | bit(q)]);
                        a[i] = C64::new(0.0, -1.0) * a1;
                        a[i | bit(q)] = C64::new(0.0, 1.0) * a0;
                    }
                }
            }
            Gate::Z(q) => a.iter_mut().enumerate().filter(|(i, _)| i & bit(q) != 0).for_each(|(_, x)| *x = -*x),
            Gate::S(q) => a
                .iter_mut()
                .enumerate()
                .filter(|(i, _)| i & bit(q) != 0)
                .for_each(|(_, x)| *x *= C64::new(0.0, 1.0)),
            Gate::Sdg(q) => a
                .iter_mut()
                .enumerate()
                .filter(|(i, _)| i & bit(q) != 0)
                .for_each(|(_, x)| *x *= C64::new(0.0, -1.0)),
            Gate::H(q) => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..a.len() {
                    if i & bit(q) == 0 {
                        let (a0, a1) = (a[i], a[i | bit(q)]);
                        a[i] = (a0 + a1) * r;
                        a[i | bit(q)] = (a0 - a1) * r;
                    }
                }
            }
            Gate::Cnot(c, t) => {
                for i in 0..a.len() {
                    if i & bit(c) != 0 && i & bit(t) == 0 {
                        a.swap(i, i | bit(t));
                    }
                }
            }
            Gate::Cz(p, q) => a
                .iter_mut()
                .enumerate()
                .filter(|(i, _)| i & bit(p) != 0 && i & bit(q) != 0)
                .for_each(|(_, x)| *x = -*x),
            Gate::Toffoli(c1, c2, t) => {
                for i in 0..a.len() {
                    if i & bit(c1) != 0 && i & bit(c2) != 0 && i & bit(t) == 0 {
                        a.swap(i, i | bit(t));
                    }
                }
            }
            Gate::Cswap(c, p, q) => {
                for i in 0..a.len() {
                    if i & bit(c) != 0 && i & bit(p) != 0 && i & bit(q) == 0 {
                        a.swap(i, (i & !bit(p)) | bit(q));
                    }
                }
            }
            Gate::MeasureX(..) | Gate::MeasureZ(..) => panic!("measurement passed to unitary apply"),
        }
    }

    fn probability_one(&self, q: usize) -> f64 {
        self.amps.iter().enumerate().filter(|(i, _)| i & (1 << q) != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    fn collapse(&mut self, q: usize, value: bool, prob: f64) {
        let scale = 1.0 / prob.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i >> q) & 1 == 1) == value {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
    }

    fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Dense unitary of a measurement-free circuit, built column by column.
pub fn unitary_of(circuit: &Circuit) -> Result<DMatrix<C64>> {
    if circuit.has_measurements() {
        return Err(Error::Invalid("unitary extraction requires a measurement-free circuit".into()));
    }
    let n = circuit.n_qubits;
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::Limit(format!("{n} qubits exceeds unitary limit {MAX_UNITARY_QUBITS}")));
    }
    let dim = 1usize << n;
    let mut u = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for col in 0..dim {
        let mut s = StateVector::basis(n, col)?;
        for op in &circuit.ops {
            s.apply(&op.gate);
        }
        for (row, a) in s.amps.iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

/// `max |U†U − I|` over all entries.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let p = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}
