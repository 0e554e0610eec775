//! Exact Toffoli counts of the gate-level constructions in
//! [`kernels`](crate::kernels).
//!
//! These sit slightly below the published bounds in [`super::qroam`]: a
//! unary iteration over `n` values needs `n − 1` Toffolis rather than `n`,
//! and a lookup fed a constant-one control spends nothing on its first
//! branch. Both sets are kept so a report can show the bound beside the
//! count.

use crate::math::{bit_length, ceil_div, ceil_log2};

use super::arith::constant_inequality_cost;

pub fn unary_iteration(d: u64) -> u64 {
    d.saturating_sub(1)
}

pub fn qrom(d: u64) -> u64 {
    d.saturating_sub(1)
}

pub fn nested_unary_iteration(p_range: u64, q_range: u64) -> u64 {
    (p_range * q_range).saturating_sub(1)
}

/// `⌈d/k⌉ − 1 + M(k − 1)`.
pub fn qroam_clean(d: u64, m_bits: u64, k: u64) -> u64 {
    ceil_div(d, k) - 1 + m_bits * (k - 1)
}

/// `2(⌈d/k⌉ − 1) + 4M(k − 1)`.
pub fn qroam_dirty(d: u64, m_bits: u64, k: u64) -> u64 {
    2 * (ceil_div(d, k) - 1) + 4 * m_bits * (k - 1)
}

/// `(⌈d/k⌉ − 1) + (k − 1)`.
pub fn unlookup_clean(d: u64, k: u64) -> u64 {
    ceil_div(d, k) - 1 + (k - 1)
}

/// `2(⌈d/k⌉ − 1) + 4(k − 1)`.
pub fn unlookup_dirty(d: u64, k: u64) -> u64 {
    2 * (ceil_div(d, k) - 1) + 4 * (k - 1)
}

/// `⌈d/2⌉ − 1`.
pub fn unlookup_halved(d: u64) -> u64 {
    ceil_div(d, 2).saturating_sub(1)
}

pub fn adder(n: u64, modular: bool) -> u64 {
    if modular {
        n.saturating_sub(1)
    } else {
        n
    }
}

pub fn subtractor(n: u64) -> u64 {
    n.saturating_sub(1)
}

pub fn inequality_variable(n: u64) -> u64 {
    n
}

pub fn inequality_constant(n: u64, c: u64) -> u64 {
    if c == 0 {
        0
    } else {
        constant_inequality_cost(n as u32, c)
    }
}

/// Controlled selection on `N` spin orbitals: `2(N − 1) + log2 N`.
pub fn select_ranged(n_spin: u64) -> u64 {
    2 * (n_spin - 1) + ceil_log2(n_spin) as u64
}

/// Alias preparation over `D` padded entries: `(D − 1) + μ + log2 D`.
pub fn alias_prepare(entries: u64, mu: u64) -> u64 {
    let d = entries.next_power_of_two();
    d - 1 + mu + (ceil_log2(d) as u64).max(1)
}

/// Sparse alias preparation: `(D − 1) + μ + b` with `b` the stored index width.
pub fn sparse_prepare(entries: u64, mu: u64, max_index: u64) -> u64 {
    let d = entries.next_power_of_two();
    d - 1 + mu + (bit_length(max_index) as u64).max(1)
}

/// Three swaps over four `bits`-wide registers.
pub fn symmetry_swaps(bits: u64) -> u64 {
    4 * bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costing::qroam::{qroam_cost, QroamConfig, QroamMode};

    #[test]
    fn exact_never_exceeds_bound() {
        for d in 2..40u64 {
            for m in 1..4 {
                for e in 0..=ceil_log2(d) {
                    let k = 1u64 << e;
                    let cfg = |mode| QroamConfig { d, m_bits: m, k_compute: k, k_uncompute: k, mode, dirty_budget: Some(u64::MAX) };
                    let clean = qroam_cost(&cfg(QroamMode::Clean)).unwrap();
                    let dirty = qroam_cost(&cfg(QroamMode::Dirty)).unwrap();
                    assert!(qroam_clean(d, m, k) < clean.compute);
                    assert!(unlookup_clean(d, k) < clean.uncompute);
                    if k > 1 {
                        assert!(qroam_dirty(d, m, k) < dirty.compute);
                        assert!(unlookup_dirty(d, k) < dirty.uncompute);
                    }
                }
            }
        }
    }

    #[test]
    fn small_cases() {
        assert_eq!(qroam_dirty(8, 2, 2), 14);
        assert_eq!(unlookup_clean(8, 2), 4);
        assert_eq!(unlookup_dirty(8, 2), 10);
        assert_eq!(unlookup_halved(8), 3);
        assert_eq!(select_ranged(8), 17);
        assert_eq!(alias_prepare(4, 3), 3 + 3 + 2);
    }
}
