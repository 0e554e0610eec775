//! Step plan for the contiguous lookup index `s = ℓC + p(p+1)/2 + q` with
//! `C = N²/8 + N/4`, shared by the cost formula and the circuit builder.
//!
//! The triangle number is assembled bitwise:
//! `p(p+1)/2 = ⌊p/2⌋ + p₀·p + Σ_{j≥1} 2^(2j−1) (p_j + Σ_{i>j} 2^(i−j+1) p_j p_i)`.
//! Each bracket is copied into a work register under control of `p_j`
//! (`n − 1 − j` Toffolis, as `p_j` controls its own copy with a CNOT) and
//! added at its shift. `q` is added after the `p₀` term, then `ℓC` as a
//! signed sum of shifted copies of `ℓ`. Every addition acts on bits
//! `shift..w` where `w` holds the running maximum, costing `w − 1 − shift`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{bit_length, ceil_log2};

use super::arith::{arithmetic_cost, ArithKind, OperandKind};
use super::superposition::triangle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum IndexOp {
    /// `out ← ⌊p/2⌋` by CNOTs.
    CopyHalfP,
    /// Work register `← p_j · (bracket j)`.
    CopyTerm { j: u32 },
    /// `out += work · 2^shift`, then erase the work register.
    AddTerm { j: u32 },
    AddQ,
    /// `out += coefficient · ℓ` with `coefficient = ±2^shift`.
    AddRank { coefficient: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndexStep {
    pub op: IndexOp,
    pub shift: u32,
    /// Accumulator bits acted on (additions only).
    pub width: u32,
    /// Largest value the accumulator can hold after the step.
    pub max_after: u64,
    pub toffoli: u64,
}

/// Forces the accumulator width of one rank step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthPin {
    /// Position in the rank schedule.
    pub step: usize,
    pub width: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexPlan {
    pub n_spin: u64,
    pub rank: u64,
    /// Width of `p` and `q`.
    pub orbital_bits: u32,
    pub schedule: Vec<i64>,
    pub steps: Vec<IndexStep>,
    pub toffoli: u64,
    /// Width of `s`.
    pub output_bits: u32,
}

/// Binary expansion of `c`, least significant first.
pub fn binary_schedule(c: u64) -> Vec<i64> {
    (0..64).filter(|e| c >> e & 1 == 1).map(|e| 1i64 << e).collect()
}

/// Value of bracket `j` for orbital `p` on `n` bits (zero unless `p_j = 1`).
pub fn term_value(p: u64, j: u32, n: u32) -> u64 {
    if p >> j & 1 == 0 {
        return 0;
    }
    if j == 0 {
        return p;
    }
    1 + ((j + 1)..n).filter(|&i| p >> i & 1 == 1).map(|i| 1u64 << (i - j + 1)).sum::<u64>()
}

/// Shift at which bracket `j` is added.
pub fn term_shift(j: u32) -> u32 {
    if j == 0 {
        0
    } else {
        2 * j - 1
    }
}

pub fn index_plan(n_spin: u64, rank: u64, schedule: &[i64], pins: &[WidthPin]) -> Result<IndexPlan> {
    if n_spin < 4 || n_spin % 2 != 0 {
        return Err(Error::Invalid(format!("need an even N ≥ 4, got {n_spin}")));
    }
    let c = triangle(n_spin);
    let sum: i128 = schedule.iter().map(|&x| x as i128).sum();
    if sum != c as i128 {
        return Err(Error::Invalid(format!("schedule sums to {sum}, expected N²/8 + N/4 = {c}")));
    }
    if let Some(bad) = schedule.iter().find(|x| x.unsigned_abs().count_ones() != 1) {
        return Err(Error::Invalid(format!("schedule entry {bad} is not a signed power of two")));
    }
    if let Some(p) = pins.iter().find(|p| p.step >= schedule.len()) {
        return Err(Error::Invalid(format!("width pin refers to step {} of {}", p.step, schedule.len())));
    }
    let h = n_spin / 2;
    let n = ceil_log2(h);
    let pairs: Vec<(u64, u64)> = (0..h).flat_map(|p| (0..=p).map(move |q| (p, q))).collect();
    let mut vals: Vec<u64> = pairs.iter().map(|&(p, _)| p >> 1).collect();
    let mut running_max = vals.iter().copied().max().unwrap_or(0);
    let mut steps = vec![IndexStep { op: IndexOp::CopyHalfP, shift: 0, width: 0, max_after: running_max, toffoli: 0 }];

    let add_step = |vals: &mut Vec<u64>, running_max: &mut u64, op: IndexOp, shift: u32, f: &dyn Fn(u64, u64) -> u64| {
        for (v, &(p, q)) in vals.iter_mut().zip(&pairs) {
            *v += f(p, q);
        }
        let new_max = vals.iter().copied().max().unwrap_or(0);
        let width = bit_length(new_max.max(*running_max));
        *running_max = new_max;
        let toffoli = arithmetic_cost(ArithKind::Add, width, OperandKind::Variable, shift);
        IndexStep { op, shift, width, max_after: new_max, toffoli }
    };

    for j in 0..n {
        let copy = (n - 1 - j) as u64;
        steps.push(IndexStep { op: IndexOp::CopyTerm { j }, shift: 0, width: 0, max_after: running_max, toffoli: copy });
        let shift = term_shift(j);
        let step = add_step(&mut vals, &mut running_max, IndexOp::AddTerm { j }, shift, &|p, _| term_value(p, j, n) << shift);
        steps.push(step);
        if j == 0 {
            let step = add_step(&mut vals, &mut running_max, IndexOp::AddQ, 0, &|_, q| q);
            steps.push(step);
        }
    }
    debug_assert!(pairs.iter().zip(&vals).all(|(&(p, q), &v)| v == p * (p + 1) / 2 + q));

    // The rank steps shift the whole range by `coef · ℓ`, ℓ ∈ [0, L].
    let (pq_min, pq_max) = (0u64, running_max);
    let mut coef: i128 = 0;
    let mut prev_max = pq_max as i128;
    for (pos, &x) in schedule.iter().enumerate() {
        coef += x as i128;
        let hi = pq_max as i128 + coef.max(0) * rank as i128;
        let lo = pq_min as i128 + coef.min(0) * rank as i128;
        if lo < 0 {
            return Err(Error::Invalid(format!("schedule step {pos} can make the index negative")));
        }
        let shift = x.unsigned_abs().trailing_zeros();
        let natural = bit_length(hi.max(prev_max) as u64);
        let width = pins.iter().find(|p| p.step == pos).map_or(natural, |p| p.width);
        let kind = if x < 0 { ArithKind::Subtract } else { ArithKind::Add };
        let toffoli = arithmetic_cost(kind, width, OperandKind::Variable, shift);
        steps.push(IndexStep { op: IndexOp::AddRank { coefficient: x }, shift, width, max_after: hi as u64, toffoli });
        prev_max = hi;
    }
    let output_bits = bit_length(prev_max as u64);
    Ok(IndexPlan {
        n_spin,
        rank,
        orbital_bits: n,
        schedule: schedule.to_vec(),
        toffoli: steps.iter().map(|s| s.toffoli).sum(),
        steps,
        output_bits,
    })
}

pub fn contiguous_index_cost(n_spin: u64, rank: u64, schedule: &[i64], pins: &[WidthPin]) -> Result<u64> {
    Ok(index_plan(n_spin, rank, schedule, pins)?.toffoli)
}
