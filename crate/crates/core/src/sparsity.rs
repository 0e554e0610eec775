//! Threshold truncation of the two-body tensor and the symmetry-weighted
//! amplitudes used by the sparse state preparation.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrals::{symmetry_images, IntegralSet};

/// One symmetry representative `p ≤ q`, `r ≤ s`, `(p,q) ≤ (r,s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SparseEntry {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseCoulomb {
    pub threshold: f64,
    pub n_spatial: usize,
    /// Sorted lexicographically by index.
    pub entries: Vec<SparseEntry>,
    /// Nonzero slots of the full truncated tensor.
    pub nonzero_full: usize,
    /// Number of representatives.
    pub unique_count: usize,
}

/// Canonical representative of `(p, q, r, s)` under the eightfold symmetry.
pub fn canonical(p: usize, q: usize, r: usize, s: usize) -> (usize, usize, usize, usize) {
    let a = (p.min(q), p.max(q));
    let b = (r.min(s), r.max(s));
    if a <= b {
        (a.0, a.1, b.0, b.1)
    } else {
        (b.0, b.1, a.0, a.1)
    }
}

/// Number of distinct index tuples in the symmetry orbit of `(p, q, r, s)`.
pub fn orbit_size(p: usize, q: usize, r: usize, s: usize) -> usize {
    let mut images = symmetry_images(p, q, r, s).to_vec();
    images.sort_unstable();
    images.dedup();
    images.len()
}

/// Keeps representatives with `|V| ≥ c` (ties kept) and `V ≠ 0`.
pub fn truncate_tensor(iset: &IntegralSet, c: f64) -> Result<SparseCoulomb> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Invalid(format!("threshold {c} must be finite and nonnegative")));
    }
    let n = iset.n_spatial;
    let mut entries = Vec::new();
    let mut nonzero_full = 0;
    for p in 0..n {
        for q in p..n {
            for r in 0..n {
                for s in r..n {
                    if (p, q) > (r, s) {
                        continue;
                    }
                    let value = iset.v(p, q, r, s);
                    if value != 0.0 && value.abs() >= c {
                        entries.push(SparseEntry { p, q, r, s, value });
                        nonzero_full += orbit_size(p, q, r, s);
                    }
                }
            }
        }
    }
    let unique_count = entries.len();
    Ok(SparseCoulomb { threshold: c, n_spatial: n, entries, nonzero_full, unique_count })
}

impl SparseCoulomb {
    /// Full tensor rebuilt from the representatives.
    pub fn to_tensor(&self) -> Vec<f64> {
        let n = self.n_spatial;
        let mut v = vec![0.0; n.pow(4)];
        for e in &self.entries {
            for (a, b, c, d) in symmetry_images(e.p, e.q, e.r, e.s) {
                v[crate::integrals::idx4(n, a, b, c, d)] = e.value;
            }
        }
        v
    }

    /// `IntegralSet` with the truncated two-body tensor.
    pub fn to_integral_set(&self, iset: &IntegralSet) -> Result<IntegralSet> {
        IntegralSet::new(iset.n_spatial, iset.t.clone(), self.to_tensor(), iset.core_energy)
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for e in &self.entries {
            out.serialize(e).map_err(|e| Error::Invalid(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Entries in the sparse lookup: representatives plus the `N²/8 + N/4`
/// one-body terms.
pub fn sparse_prepare_dimension(unique_count: u64, n_spin: u64) -> u64 {
    let h = n_spin / 2;
    unique_count + h * (h + 1) / 2
}

/// `√2` for `a < b`, 1 for `a = b`, 0 otherwise.
pub fn zeta<T: PartialOrd>(a: T, b: T) -> f64 {
    if a < b {
        std::f64::consts::SQRT_2
    } else if a == b {
        1.0
    } else {
        0.0
    }
}

/// Index of a prepared term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SparseTerm {
    OneBody { p: usize, q: usize },
    TwoBody { p: usize, q: usize, r: usize, s: usize },
}

impl SparseTerm {
    /// Spin configurations the term is replicated over.
    pub fn spin_states(&self) -> usize {
        match self {
            SparseTerm::OneBody { .. } => 2,
            SparseTerm::TwoBody { .. } => 4,
        }
    }
}

/// Amplitudes `√(|T|/λ) ζ_pq` and `√(|Ṽ|/λ) ζ_pq ζ_rs ζ_(pq,rs)` per spin
/// configuration, with `λ = 2Σ|T| + 4Σ|Ṽ|`. The returned values are summed
/// over the uniform spin register (a factor `√2` or `√4`), so their squares
/// sum to one.
pub fn target_amplitudes(sc: &SparseCoulomb, iset: &IntegralSet) -> Result<(Vec<(SparseTerm, f64)>, f64)> {
    let lambda = sparse_lambda(sc, iset);
    if lambda <= 0.0 {
        return Err(Error::Invalid("all coefficients vanish, so the norm is zero".into()));
    }
    let n = iset.n_spatial;
    let mut out = Vec::new();
    for p in 0..n {
        for q in p..n {
            let t = iset.t(p, q);
            if t != 0.0 {
                out.push((SparseTerm::OneBody { p, q }, (2.0 * t.abs() / lambda).sqrt() * zeta(p, q)));
            }
        }
    }
    for e in &sc.entries {
        let z = zeta(e.p, e.q) * zeta(e.r, e.s) * zeta((e.p, e.q), (e.r, e.s));
        out.push((SparseTerm::TwoBody { p: e.p, q: e.q, r: e.r, s: e.s }, (4.0 * e.value.abs() / lambda).sqrt() * z));
    }
    Ok((out, lambda))
}

/// `2Σ|T| + 4Σ|Ṽ|` over the full truncated tensor.
pub fn sparse_lambda(sc: &SparseCoulomb, iset: &IntegralSet) -> f64 {
    let lt: f64 = iset.t.iter().map(|x| x.abs()).sum();
    let lv: f64 = sc.entries.iter().map(|e| e.value.abs() * orbit_size(e.p, e.q, e.r, e.s) as f64).sum();
    2.0 * lt + 4.0 * lv
}

/// One row of a threshold sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdScanRow {
    pub threshold: f64,
    pub unique_count: usize,
    pub nonzero_full: usize,
    pub lambda: f64,
}

pub fn threshold_scan(iset: &IntegralSet, thresholds: &[f64]) -> Result<Vec<ThresholdScanRow>> {
    thresholds
        .iter()
        .map(|&c| {
            let sc = truncate_tensor(iset, c)?;
            Ok(ThresholdScanRow {
                threshold: c,
                unique_count: sc.unique_count,
                nonzero_full: sc.nonzero_full,
                lambda: sparse_lambda(&sc, iset),
            })
        })
        .collect()
}
