//! Published Toffoli bounds for table lookup with a block size `k`
//! (select-swap lookup) and its measurement-based uncomputation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{ceil_div, ceil_log2, is_power_of_two};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QroamMode {
    Clean,
    Dirty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QroamConfig {
    /// Table entries.
    pub d: u64,
    /// Output bits per entry.
    pub m_bits: u64,
    pub k_compute: u64,
    pub k_uncompute: u64,
    pub mode: QroamMode,
    /// Borrowable qubits for dirty mode.
    pub dirty_budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QroamCost {
    pub compute: u64,
    pub uncompute: u64,
    pub compute_clean_ancillas: u64,
    pub compute_dirty_ancillas: u64,
    pub uncompute_clean_ancillas: u64,
    pub uncompute_dirty_ancillas: u64,
}

impl QroamCost {
    pub fn total(&self) -> u64 {
        self.compute + self.uncompute
    }
}

/// Plain unary-iteration lookup over `d` entries: `d − 1` Toffolis.
pub fn qrom_cost(d: u64) -> u64 {
    d.saturating_sub(1)
}

fn address_bits(d: u64, k: u64) -> u64 {
    ceil_log2(ceil_div(d, k)) as u64
}

fn compute_cost(d: u64, m_bits: u64, k: u64, mode: QroamMode) -> u64 {
    match mode {
        _ if k == 1 => d,
        QroamMode::Clean => ceil_div(d, k) + m_bits * (k - 1),
        QroamMode::Dirty => 2 * ceil_div(d, k) + 4 * m_bits * (k - 1),
    }
}

fn uncompute_cost(d: u64, k: u64, mode: QroamMode) -> u64 {
    match mode {
        QroamMode::Dirty if k > 1 => 2 * ceil_div(d, k) + 4 * k,
        _ => ceil_div(d, k) + k,
    }
}

fn compute_ancillas(d: u64, m_bits: u64, k: u64, mode: QroamMode) -> (u64, u64) {
    match mode {
        QroamMode::Clean => ((k - 1) * m_bits + address_bits(d, k), 0),
        QroamMode::Dirty => (address_bits(d, k), (k - 1) * m_bits),
    }
}

fn uncompute_ancillas(d: u64, k: u64, mode: QroamMode) -> (u64, u64) {
    match mode {
        QroamMode::Clean => (k + address_bits(d, k), 0),
        QroamMode::Dirty => (address_bits(d, k) + 1, k - 1),
    }
}

fn check_k(k: u64) -> Result<()> {
    if !is_power_of_two(k) {
        return Err(Error::Invalid(format!("block size k = {k} must be a power of two")));
    }
    Ok(())
}

/// Clean: compute `⌈d/k⌉ + M(k−1)`, uncompute `⌈d/k⌉ + k`.
/// Dirty: compute `2⌈d/k⌉ + 4M(k−1)`, uncompute `2⌈d/k⌉ + 4k`.
/// `k = 1` falls back to a plain lookup of cost `d`.
pub fn qroam_cost(cfg: &QroamConfig) -> Result<QroamCost> {
    check_k(cfg.k_compute)?;
    check_k(cfg.k_uncompute)?;
    if cfg.d == 0 {
        return Err(Error::Invalid("table must have at least one entry".into()));
    }
    let (cc, cd) = compute_ancillas(cfg.d, cfg.m_bits, cfg.k_compute, cfg.mode);
    let (uc, ud) = uncompute_ancillas(cfg.d, cfg.k_uncompute, cfg.mode);
    if cfg.mode == QroamMode::Dirty {
        let budget = cfg.dirty_budget.ok_or_else(|| Error::Missing("dirty_budget for dirty lookup".into()))?;
        if cd > budget || ud > budget {
            return Err(Error::Invalid(format!(
                "dirty lookup needs {} borrowed qubits but only {budget} are available",
                cd.max(ud)
            )));
        }
    }
    Ok(QroamCost {
        compute: compute_cost(cfg.d, cfg.m_bits, cfg.k_compute, cfg.mode),
        uncompute: uncompute_cost(cfg.d, cfg.k_uncompute, cfg.mode),
        compute_clean_ancillas: cc,
        compute_dirty_ancillas: cd,
        uncompute_clean_ancillas: uc,
        uncompute_dirty_ancillas: ud,
    })
}

/// Exhaustive search over powers of two `k ≤ 2^⌈log2 d⌉` for the cheapest
/// compute and uncompute block sizes, ties to the smaller `k`.
///
/// `budget` bounds the borrowed qubits in dirty mode and the clean ancillas
/// in clean mode; `None` means unconstrained (clean) and is rejected for
/// dirty mode.
pub fn optimal_k(d: u64, m_bits: u64, mode: QroamMode, budget: Option<u64>) -> Result<(u64, u64)> {
    if d == 0 {
        return Err(Error::Invalid("table must have at least one entry".into()));
    }
    if mode == QroamMode::Dirty && budget.is_none() {
        return Err(Error::Missing("dirty_budget for dirty lookup".into()));
    }
    let limit = budget.unwrap_or(u64::MAX);
    let ks: Vec<u64> = (0..=ceil_log2(d)).map(|e| 1u64 << e).collect();
    let pick = |cost: &dyn Fn(u64) -> u64, used: &dyn Fn(u64) -> u64| {
        ks.iter()
            .copied()
            .filter(|&k| k == 1 || used(k) <= limit)
            .min_by_key(|&k| (cost(k), k))
            .expect("k = 1 is always feasible")
    };
    let pick_used = |k: u64, compute: bool| {
        let (c, dd) = if compute { compute_ancillas(d, m_bits, k, mode) } else { uncompute_ancillas(d, k, mode) };
        if mode == QroamMode::Dirty {
            dd
        } else {
            c
        }
    };
    let kc = pick(&|k| compute_cost(d, m_bits, k, mode), &|k| pick_used(k, true));
    let ku = pick(&|k| uncompute_cost(d, k, mode), &|k| pick_used(k, false));
    Ok((kc, ku))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(d: u64, m: u64, kc: u64, ku: u64, mode: QroamMode, budget: Option<u64>) -> QroamCost {
        qroam_cost(&QroamConfig { d, m_bits: m, k_compute: kc, k_uncompute: ku, mode, dirty_budget: budget }).unwrap()
    }

    #[test]
    fn published_line_items() {
        let c = cost(298_485, 49, 4, 128, QroamMode::Dirty, Some(149));
        assert_eq!((c.compute, c.uncompute), (149_832, 5_176));
        assert_eq!(c.compute_clean_ancillas, 17);
        let c = cost(298_485, 42, 64, 512, QroamMode::Clean, None);
        assert_eq!((c.compute, c.uncompute), (7_310, 1_095));
        assert_eq!(cost(8, 1, 1, 1, QroamMode::Clean, None).compute, 8);
    }

    #[test]
    fn optimal_block_sizes() {
        assert_eq!(optimal_k(436_508, 77, QroamMode::Clean, None).unwrap(), (64, 512));
        assert_eq!(optimal_k(298_485, 49, QroamMode::Dirty, Some(108 + 41)).unwrap(), (4, 128));
        assert_eq!(optimal_k(4, 3, QroamMode::Clean, None).unwrap().0, 1);
        // A clean-ancilla budget pulls the compute block size down.
        assert_eq!(optimal_k(179_498, 84, QroamMode::Clean, Some(3_000)).unwrap().0, 32);
    }

    #[test]
    fn dirty_budget_enforced() {
        let cfg = QroamConfig { d: 100, m_bits: 10, k_compute: 8, k_uncompute: 4, mode: QroamMode::Dirty, dirty_budget: Some(20) };
        assert!(qroam_cost(&cfg).is_err());
        assert!(qroam_cost(&QroamConfig { dirty_budget: None, ..cfg }).is_err());
        assert!(qroam_cost(&QroamConfig { k_compute: 3, ..cfg }).is_err());
    }
}
