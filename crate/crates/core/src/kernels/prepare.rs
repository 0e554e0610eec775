//! Coherent alias sampling and the symmetry-expanding swaps used by the
//! sparse state preparation.

use serde::{Deserialize, Serialize};

use crate::circuit::{Builder, Circuit, Qubit, Role};
use crate::error::{Error, Result};
use crate::math::ceil_log2;

use super::arithmetic::less_than_into;
use super::lookup::qrom_into;

/// Alias table with `mu`-bit keep thresholds.
///
/// Entry `j` is output with probability `keep[j] / 2^mu` and otherwise
/// redirects to `alt[j]`. The table length is padded to a power of two.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasTable {
    pub mu: u32,
    pub keep: Vec<u64>,
    pub alt: Vec<usize>,
}

impl AliasTable {
    /// Two-stack (Vose) construction; keep values are rounded to the nearest
    /// `mu`-bit integer with ties rounded up.
    pub fn new(weights: &[f64], mu: u32) -> Result<AliasTable> {
        if weights.is_empty() {
            return Err(Error::Invalid("alias table needs at least one weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Invalid(format!("weight {w} is negative or not finite")));
        }
        if !(1..=40).contains(&mu) {
            return Err(Error::Invalid(format!("keep precision mu = {mu} outside 1..=40")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Invalid("all weights are zero".into()));
        }
        let n = weights.len().next_power_of_two();
        let mut q: Vec<f64> = (0..n).map(|i| weights.get(i).copied().unwrap_or(0.0) * n as f64 / total).collect();
        let mut keep_f = vec![1.0; n];
        let mut alt: Vec<usize> = (0..n).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| q[i] < 1.0);
        // Pop from the front so the pairing is fixed by index order.
        small.reverse();
        large.reverse();
        while let (Some(s), Some(l)) = (small.pop(), large.pop()) {
            keep_f[s] = q[s];
            alt[s] = l;
            q[l] -= 1.0 - q[s];
            if q[l] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        let scale = (1u64 << mu) as f64;
        let mut keep = vec![0u64; n];
        for i in 0..n {
            if alt[i] == i {
                keep[i] = (1 << mu) - 1;
                continue;
            }
            let k = (keep_f[i] * scale + 0.5).floor() as u64;
            if k >= 1 << mu {
                keep[i] = (1 << mu) - 1;
                alt[i] = i;
            } else {
                keep[i] = k;
            }
        }
        Ok(AliasTable { mu, keep, alt })
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    /// Exact output distribution as numerators over `len · 2^mu`.
    pub fn implied_counts(&self) -> (Vec<u128>, u128) {
        let full = 1u128 << self.mu;
        let mut num = vec![0u128; self.len()];
        for (j, (&k, &a)) in self.keep.iter().zip(&self.alt).enumerate() {
            num[j] += k as u128;
            num[a] += full - k as u128;
        }
        (num, full * self.len() as u128)
    }

    pub fn implied_probabilities(&self) -> Vec<f64> {
        let (num, den) = self.implied_counts();
        num.iter().map(|&n| n as f64 / den as f64).collect()
    }
}

/// Alias-sampling preparation over `weights.len()` entries (padded to a
/// power of two): Hadamards on `index` and `sigma`, a lookup of `(alt, keep)`,
/// the comparison `sigma < keep` and a swap of `index` with `alt` when it fails.
///
/// Registers: `ctrl` (must be set for the lookup), `index`, `alt`, `keep`,
/// `sigma`, `flag`. Costs `(D − 1) + mu + log2 D` Toffolis.
pub fn build_alias_prepare(weights: &[f64], mu: u32) -> Result<(Circuit, AliasTable)> {
    let table = AliasTable::new(weights, mu)?;
    let d = table.len();
    let bits = (ceil_log2(d as u64) as usize).max(1);
    let mu_us = mu as usize;
    let words: Vec<u64> = (0..d).map(|j| table.alt[j] as u64 | (table.keep[j] << bits)).collect();
    let mut b = Builder::new();
    let ctrl = b.qubit("ctrl", Role::Control);
    let index = b.register("index", Role::Output, bits);
    let alt = b.register("alt", Role::Data, bits);
    let keep = b.register("keep", Role::Data, mu_us);
    let sigma = b.register("sigma", Role::Workspace, mu_us);
    let flag = b.qubit("flag", Role::Flag);
    let out: Vec<Qubit> = alt.iter().chain(&keep).copied().collect();
    alias_body(&mut b, ctrl, &index, &words, &out, &sigma, &keep, flag, &index, &alt);
    Ok((b.finish(), table))
}

#[allow(clippy::too_many_arguments)]
fn alias_body(
    b: &mut Builder,
    ctrl: Qubit,
    index: &[Qubit],
    words: &[u64],
    out: &[Qubit],
    sigma: &[Qubit],
    keep: &[Qubit],
    flag: Qubit,
    swap_a: &[Qubit],
    swap_b: &[Qubit],
) {
    index.iter().chain(sigma).for_each(|&q| b.h(q));
    qrom_into(b, ctrl, index, words, out);
    less_than_into(b, sigma, keep, flag);
    b.x(flag);
    for (&x, &y) in swap_a.iter().zip(swap_b) {
        b.cswap(flag, x, y);
    }
    b.x(flag);
}

/// Alias sampling over an arbitrary index set: the lookup outputs the
/// stored index, its alternate and the keep value; the swap acts on the
/// index registers.
///
/// Registers: `ctrl`, `entry`, `ind`, `alt`, `keep`, `sigma`, `flag`. Costs
/// `(D − 1) + mu + b` Toffolis with `b` the index width.
pub fn build_sparse_prepare(indexed_weights: &[(u64, f64)], mu: u32) -> Result<(Circuit, AliasTable)> {
    let weights: Vec<f64> = indexed_weights.iter().map(|&(_, w)| w).collect();
    let table = AliasTable::new(&weights, mu)?;
    let d = table.len();
    let entry_bits = (ceil_log2(d as u64) as usize).max(1);
    let max_index = indexed_weights.iter().map(|&(i, _)| i).max().unwrap_or(0);
    let ind_bits = (crate::math::bit_length(max_index) as usize).max(1);
    if 2 * ind_bits + mu as usize > 64 {
        return Err(Error::Invalid("index and keep widths exceed a 64-bit table word".into()));
    }
    let index_of = |j: usize| indexed_weights.get(j).map_or(0, |&(i, _)| i);
    let words: Vec<u64> = (0..d)
        .map(|j| index_of(j) | (index_of(table.alt[j]) << ind_bits) | (table.keep[j] << (2 * ind_bits)))
        .collect();
    let mut b = Builder::new();
    let ctrl = b.qubit("ctrl", Role::Control);
    let entry = b.register("entry", Role::Address, entry_bits);
    let ind = b.register("ind", Role::Output, ind_bits);
    let alt = b.register("alt", Role::Data, ind_bits);
    let keep = b.register("keep", Role::Data, mu as usize);
    let sigma = b.register("sigma", Role::Workspace, mu as usize);
    let flag = b.qubit("flag", Role::Flag);
    let out: Vec<Qubit> = ind.iter().chain(&alt).chain(&keep).copied().collect();
    alias_body(&mut b, ctrl, &entry, &words, &out, &sigma, &keep, flag, &ind, &alt);
    Ok((b.finish(), table))
}

/// Expands a symmetry representative `(p, q, r, s)` over its eight images
/// with three controlled swaps driven by `|+>` controls: `pq ↔ rs`, then
/// `p ↔ q` and `r ↔ s`. Costs `4 · bits` Toffolis.
///
/// Registers: `p`, `q`, `r`, `s` (each `bits` wide), `swap` (3 controls).
pub fn build_symmetry_swaps(bits: usize) -> Result<Circuit> {
    if bits == 0 {
        return Err(Error::Invalid("index width must be at least 1".into()));
    }
    let mut b = Builder::new();
    let p = b.register("p", Role::Data, bits);
    let q = b.register("q", Role::Data, bits);
    let r = b.register("r", Role::Data, bits);
    let s = b.register("s", Role::Data, bits);
    let c = b.register("swap", Role::Control, 3);
    c.iter().for_each(|&x| b.h(x));
    symmetry_swaps_into(&mut b, &c, &p, &q, &r, &s);
    Ok(b.finish())
}

pub fn symmetry_swaps_into(b: &mut Builder, c: &[Qubit], p: &[Qubit], q: &[Qubit], r: &[Qubit], s: &[Qubit]) {
    for i in 0..p.len() {
        b.cswap(c[0], p[i], r[i]);
        b.cswap(c[0], q[i], s[i]);
    }
    for i in 0..p.len() {
        b.cswap(c[1], p[i], q[i]);
    }
    for i in 0..r.len() {
        b.cswap(c[2], r[i], s[i]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alias_table_for_three_one_one_three() {
        let t = AliasTable::new(&[3.0, 1.0, 1.0, 3.0], 3).unwrap();
        let (num, den) = t.implied_counts();
        assert_eq!(den, 32);
        assert_eq!(num, vec![12, 4, 4, 12]);
    }

    #[test]
    fn uniform_weights_saturate() {
        let t = AliasTable::new(&[1.0; 8], 4).unwrap();
        assert!(t.keep.iter().all(|&k| k == 15));
        assert!(t.alt.iter().enumerate().all(|(i, &a)| a == i));
    }

    #[test]
    fn rejects_zero_weights() {
        assert!(AliasTable::new(&[0.0, 0.0], 4).is_err());
    }
}
