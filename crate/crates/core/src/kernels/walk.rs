//! Full selection over one- and two-body terms, and the qubitized walk
//! `W = (2|P><P| − 1) · SELECT` analysed on its invariant subspace.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::circuit::{Builder, Circuit, Qubit, Role};
use crate::error::{Error, Result};
use crate::integrals::IntegralSet;
use crate::simulator::{encode, run_deterministic, SparseState, C64};

use super::prepare::AliasTable;
use super::select::{check_orbitals, select_1_into, TermRegisters};

/// Indices of one factor `Q_pqσ`; `q1` picks `I` or `−Z` when `p = q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorIndex {
    pub p: usize,
    pub q: usize,
    pub spin: usize,
    pub q1: bool,
}

/// One unitary of the decomposition with its weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LcuTerm {
    pub a: FactorIndex,
    /// Second factor for two-body terms.
    pub b: Option<FactorIndex>,
    pub weight: f64,
    pub negative: bool,
}

fn factor_splits(p: usize, q: usize, spin: usize) -> Vec<(FactorIndex, f64)> {
    if p == q {
        [true, false].iter().map(|&q1| (FactorIndex { p, q, spin, q1 }, 0.5)).collect()
    } else {
        vec![(FactorIndex { p, q, spin, q1: p < q }, 1.0)]
    }
}

/// Terms of `Σ_σ Σ_pq T_pq Q_pqσ + Σ_αβ Σ_pqrs V_pqrs Q_pqα Q_rsβ`, where
/// `Q` is `X Z⃗ X` (`p<q`), `Y Z⃗ Y` (`p>q`) or `(1 − Z)/2` (`p=q`).
///
/// Returns the nonzero terms and `λ = 2Σ|T| + 4Σ|V|`.
pub fn lcu_terms(iset: &IntegralSet) -> (Vec<LcuTerm>, f64) {
    let n = iset.n_spatial;
    let mut terms = Vec::new();
    for spin in 0..2 {
        for p in 0..n {
            for q in 0..n {
                let t = iset.t(p, q);
                if t == 0.0 {
                    continue;
                }
                for (a, f) in factor_splits(p, q, spin) {
                    terms.push(LcuTerm { a, b: None, weight: f * t.abs(), negative: t < 0.0 });
                }
            }
        }
    }
    for alpha in 0..2 {
        for beta in 0..2 {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let v = iset.v(p, q, r, s);
                            if v == 0.0 {
                                continue;
                            }
                            for (a, fa) in factor_splits(p, q, alpha) {
                                for (b, fb) in factor_splits(r, s, beta) {
                                    terms.push(LcuTerm { a, b: Some(b), weight: fa * fb * v.abs(), negative: v < 0.0 });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let lambda = terms.iter().map(|t| t.weight).sum();
    (terms, lambda)
}

/// Qubits of the full selection circuit.
#[derive(Clone, Debug)]
pub struct SelectLayout {
    pub kind: Qubit,
    pub a: TermRegisters,
    pub b: TermRegisters,
    pub psi: Vec<Qubit>,
}

impl SelectLayout {
    fn factor_assignment<'a>(regs: &'a TermRegisters, f: &FactorIndex) -> Vec<(&'a [Qubit], u128)> {
        vec![
            (&regs.p[..], f.p as u128),
            (&regs.q[..], f.q as u128),
            (std::slice::from_ref(&regs.alpha), f.spin as u128),
            (std::slice::from_ref(&regs.q1), f.q1 as u128),
        ]
    }

    /// Basis index of the index registers for `term`.
    pub fn term_index(&self, term: &LcuTerm) -> u128 {
        let mut assign = Self::factor_assignment(&self.a, &term.a);
        assign.push((std::slice::from_ref(&self.a.theta), term.negative as u128));
        if let Some(b) = &term.b {
            assign.push((std::slice::from_ref(&self.kind), 1));
            assign.extend(Self::factor_assignment(&self.b, b));
        }
        encode(&assign)
    }
}

/// Hermitian involution `SELECT = Σ |j><j| ⊗ U_j` on `N` spin orbitals.
///
/// The first factor is applied unconditionally, the second under the
/// two-body flag, and a final flag-controlled swap exchanges the two
/// factor registers (the shared sign qubit stays put) so that
/// `SELECT² = 1` even when the factors anticommute.
pub fn build_full_select(n_spin: usize) -> Result<(Circuit, SelectLayout)> {
    let bits = check_orbitals(n_spin)?;
    let mut b = Builder::new();
    let kind = b.qubit("kind", Role::Control);
    let a = TermRegisters::allocate(&mut b, "_a", bits);
    let mut regs_b = TermRegisters::allocate(&mut b, "_b", bits);
    let psi = b.register("psi", Role::System, n_spin);
    let on = b.ancilla();
    b.x(on);
    select_1_into(&mut b, on, &a, &psi);
    b.x(on);
    b.release(on);
    // The sign lives only in the first factor's register.
    let sign_b = regs_b.theta;
    regs_b.theta = b.ancilla();
    select_1_into(&mut b, kind, &regs_b, &psi);
    b.release(regs_b.theta);
    regs_b.theta = sign_b;
    let swap_a: Vec<Qubit> = a.p.iter().chain(&a.q).copied().chain([a.alpha, a.q1]).collect();
    let swap_b: Vec<Qubit> = regs_b.p.iter().chain(&regs_b.q).copied().chain([regs_b.alpha, regs_b.q1]).collect();
    for (&x, &y) in swap_a.iter().zip(&swap_b) {
        b.cswap(kind, x, y);
    }
    Ok((b.finish(), SelectLayout { kind, a, b: regs_b, psi }))
}

/// Walk operator for a small Hamiltonian, described by its selection
/// circuit and the prepared state `|P> = Σ_j √p_j |j>`.
///
/// The probabilities are those implied by a `mu`-bit alias table, so the
/// walk encodes the discretized Hamiltonian.
#[derive(Clone, Debug)]
pub struct QubitizationWalk {
    pub select: Circuit,
    pub layout: SelectLayout,
    pub terms: Vec<LcuTerm>,
    pub probabilities: Vec<f64>,
    pub lambda: f64,
    pub n_spin: usize,
}

pub fn build_qubitization_walk(iset: &IntegralSet, mu: u32) -> Result<QubitizationWalk> {
    let n_spin = iset.n_spin_orbitals();
    let (select, layout) = build_full_select(n_spin)?;
    let (terms, lambda) = lcu_terms(iset);
    if terms.is_empty() {
        return Err(Error::Invalid("Hamiltonian has no nonzero terms".into()));
    }
    let weights: Vec<f64> = terms.iter().map(|t| t.weight).collect();
    let table = AliasTable::new(&weights, mu)?;
    let probabilities = table.implied_probabilities()[..terms.len()].to_vec();
    Ok(QubitizationWalk { select, layout, terms, probabilities, lambda, n_spin })
}

type Vector = BTreeMap<u128, C64>;

fn dot(a: &Vector, b: &Vector) -> C64 {
    a.iter().filter_map(|(k, x)| b.get(k).map(|y| x.conj() * y)).sum()
}

fn axpy(y: &mut Vector, alpha: C64, x: &Vector) {
    for (k, v) in x {
        *y.entry(*k).or_default() += alpha * v;
    }
}

fn norm(a: &Vector) -> f64 {
    a.values().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl QubitizationWalk {
    /// `|P> ⊗ |e_i>` for system basis state `i`.
    fn prepared(&self, i: usize) -> Vector {
        let sys = encode(&[(&self.layout.psi, i as u128)]);
        self.terms
            .iter()
            .zip(&self.probabilities)
            .filter(|(_, &p)| p > 0.0)
            .map(|(t, &p)| (self.layout.term_index(t) | sys, C64::new(p.sqrt(), 0.0)))
            .collect()
    }

    fn apply_select(&self, v: &Vector) -> Result<Vector> {
        // Measurements renormalize, so run on the unit vector and rescale.
        let scale = norm(v);
        if scale == 0.0 {
            return Ok(Vector::new());
        }
        let state = SparseState::from_terms(self.select.n_qubits, v.iter().map(|(&k, &a)| (k, a / scale)))?;
        let out = run_deterministic(&self.select, state)?;
        Ok(out.terms().into_iter().map(|(k, a)| (k, a * scale)).collect())
    }

    /// Eigenphases in `[0, π]` of the walk on its invariant subspace,
    /// sorted ascending. Each Hamiltonian eigenvalue `E` contributes the
    /// pair `±arccos(E/λ)`, reported here as `arccos` twice.
    pub fn eigenphases(&self) -> Result<Vec<f64>> {
        let dim = 1usize << self.n_spin;
        let vs: Vec<Vector> = (0..dim).map(|i| self.prepared(i)).collect();
        let mut basis: Vec<Vector> = Vec::new();
        let ws: Vec<Vector> = vs.iter().map(|v| self.apply_select(v)).collect::<Result<_>>()?;
        for cand in vs.iter().chain(&ws) {
            let mut r = cand.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &r);
                    axpy(&mut r, -c, b);
                }
            }
            let nr = norm(&r);
            if nr > 1e-9 {
                r.values_mut().for_each(|x| *x /= nr);
                r.retain(|_, x| x.norm() > 1e-15);
                basis.push(r);
            }
        }
        let k = basis.len();
        let mut m = DMatrix::<C64>::zeros(k, k);
        for (j, bj) in basis.iter().enumerate() {
            let y = self.apply_select(bj)?;
            // Reflection about the prepared subspace.
            let mut wy: Vector = y.iter().map(|(&key, &a)| (key, -a)).collect();
            for v in &vs {
                let c = dot(v, &y);
                axpy(&mut wy, C64::new(2.0, 0.0) * c, v);
            }
            let mut resid = wy.clone();
            for (i, bi) in basis.iter().enumerate() {
                m[(i, j)] = dot(bi, &wy);
                axpy(&mut resid, -m[(i, j)], bi);
            }
            if norm(&resid) > 1e-8 {
                return Err(Error::Invalid(format!(
                    "walk subspace is not invariant (residual {:e})",
                    norm(&resid)
                )));
            }
        }
        let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        let mut phases: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.clamp(-1.0, 1.0).acos()).collect();
        phases.sort_by(|a, b| a.partial_cmp(b).expect("finite phases"));
        Ok(phases)
    }
}
