//! Dense-matrix oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use qubitize::integrals::{idx4, IntegralSet, RawIntegrals};

/// Jordan-Wigner annihilation operators on `modes` fermionic modes.
pub fn annihilators(modes: usize) -> Vec<DMatrix<f64>> {
    let dim = 1usize << modes;
    (0..modes)
        .map(|j| {
            let mut a = DMatrix::zeros(dim, dim);
            for x in 0..dim {
                if (x >> j) & 1 == 1 {
                    let parity = (x & ((1 << j) - 1)).count_ones();
                    a[(x ^ (1 << j), x)] = if parity % 2 == 0 { 1.0 } else { -1.0 };
                }
            }
            a
        })
        .collect()
}

/// Fock-space matrices of `Σ h a†a + ½ Σ (pq|rs) a†_p a†_r a_s a_q` and of
/// `Σ T a†a + Σ V a†_p a_q a†_r a_s`, both spin summed.
pub fn fock_pair(raw: &RawIntegrals, iset: &IntegralSet) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = raw.n_spatial;
    let a = annihilators(2 * n);
    let ad: Vec<DMatrix<f64>> = a.iter().map(|m| m.transpose()).collect();
    let dim = 1usize << (2 * n);
    let mode = |p: usize, s: usize| p + s * n;
    let mut h_orig = DMatrix::zeros(dim, dim);
    let mut h_new = DMatrix::zeros(dim, dim);
    for p in 0..n {
        for q in 0..n {
            for s in 0..2 {
                let hop = &ad[mode(p, s)] * &a[mode(q, s)];
                h_orig += &hop * raw.h1[p * n + q];
                h_new += &hop * iset.t(p, q);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let (g, v) = (raw.h2[idx4(n, p, q, r, s)], iset.v(p, q, r, s));
                    for sig in 0..2 {
                        for tau in 0..2 {
                            let (pp, qq, rr, ss) = (mode(p, sig), mode(q, sig), mode(r, tau), mode(s, tau));
                            let normal = &ad[pp] * &ad[rr] * &a[ss] * &a[qq];
                            h_orig += normal * (0.5 * g);
                            let chem = &ad[pp] * &a[qq] * &ad[rr] * &a[ss];
                            h_new += chem * v;
                        }
                    }
                }
            }
        }
    }
    (h_orig, h_new)
}

/// Dense Pauli matrix on `n` qubits; `ops[j]` acts on qubit `j` (bit `j`).
pub fn pauli(n: usize, ops: &[char]) -> DMatrix<C64> {
    let dim = 1 << n;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut y = x;
        let mut amp = C64::new(1.0, 0.0);
        for (j, &op) in ops.iter().enumerate() {
            let bit = (x >> j) & 1;
            match op {
                'X' => y ^= 1 << j,
                'Y' => {
                    y ^= 1 << j;
                    amp *= if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
                }
                'Z' if bit == 1 => amp = -amp,
                _ => {}
            }
        }
        m[(y, x)] = amp;
    }
    m
}

/// `X Z⃗ X` for `p<q`, `Y Z⃗ Y` for `p>q`, `(1 − Z)/2` for `p=q`.
pub fn q_operator(n_spin: usize, p: usize, q: usize, spin: usize) -> DMatrix<C64> {
    let half = n_spin / 2;
    let (a, b) = (p + spin * half, q + spin * half);
    let mut ops = vec!['I'; n_spin];
    if p == q {
        ops[a] = 'Z';
        let id = DMatrix::identity(1 << n_spin, 1 << n_spin);
        return (id - pauli(n_spin, &ops)) * C64::new(0.5, 0.0);
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let end = if p < q { 'X' } else { 'Y' };
    ops[lo] = end;
    ops[hi] = end;
    for o in &mut ops[lo + 1..hi] {
        *o = 'Z';
    }
    pauli(n_spin, &ops)
}

pub fn dense_hamiltonian(iset: &IntegralSet) -> DMatrix<C64> {
    let n = iset.n_spatial;
    let ns = 2 * n;
    let dim = 1 << ns;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    let qs: Vec<Vec<Vec<DMatrix<C64>>>> = (0..2)
        .map(|s| (0..n).map(|p| (0..n).map(|q| q_operator(ns, p, q, s)).collect()).collect())
        .collect();
    for s in 0..2 {
        for p in 0..n {
            for q in 0..n {
                h += &qs[s][p][q] * C64::new(iset.t(p, q), 0.0);
            }
        }
    }
    for a in 0..2 {
        for b in 0..2 {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let v = iset.v(p, q, r, s);
                            if v != 0.0 {
                                h += &qs[a][p][q] * &qs[b][r][s] * C64::new(v, 0.0);
                            }
                        }
                    }
                }
            }
        }
    }
    h
}

pub fn oracle_phases(iset: &IntegralSet, lambda: f64) -> Vec<f64> {
    let h = dense_hamiltonian(iset);
    let herm_defect = (&h - h.adjoint()).norm();
    assert!(herm_defect < 1e-10, "oracle Hamiltonian not Hermitian: {herm_defect}");
    let mut out: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().map(|e| (e / lambda).clamp(-1.0, 1.0).acos()).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}
