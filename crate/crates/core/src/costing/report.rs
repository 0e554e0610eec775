//! Per-step Toffoli and logical-qubit totals for the three walk variants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{bit_length, ceil_log2};

use super::arith::{select_cost, symmetry_swap_cost};
use super::fixtures::{Adjustment, Dataset, PublishedCell, SuperpositionChoice, VariantChoice};
use super::index::{binary_schedule, index_plan, IndexPlan};
use super::params::PhaseEstimationParams;
use super::qroam::{optimal_k, qroam_cost, qrom_cost, QroamConfig, QroamCost, QroamMode};
use super::superposition::{
    equal_superposition_cost, lowrank_first, lowrank_joint, lowrank_second, single_register, triangle,
    SuperpositionSpec,
};

/// Qubit-seconds of one distillation factory per Toffoli.
pub const FACTORY_QUBIT_SECONDS: f64 = 24.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    LowrankDirty,
    LowrankClean,
    Sparse,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::LowrankDirty, Variant::LowrankClean, Variant::Sparse];

    pub fn name(self) -> &'static str {
        match self {
            Variant::LowrankDirty => "lowrank_dirty",
            Variant::LowrankClean => "lowrank_clean",
            Variant::Sparse => "sparse",
        }
    }

    pub fn is_lowrank(self) -> bool {
        self != Variant::Sparse
    }

    /// Whether an adjustment tagged `tag` applies to this variant.
    fn matches(self, tag: &str) -> bool {
        tag == self.name() || (tag == "lowrank" && self.is_lowrank())
    }

    fn choice(self, ds: &Dataset) -> VariantChoice {
        match self {
            Variant::LowrankDirty => ds.variants.lowrank_dirty,
            Variant::LowrankClean => ds.variants.lowrank_clean,
            Variant::Sparse => ds.variants.sparse,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == norm)
            .ok_or_else(|| Error::Invalid(format!("unknown variant `{s}` (expected lowrank-dirty, lowrank-clean or sparse)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimateOptions {
    /// Overrides the dataset's choice when set.
    pub reallocate_error: Option<bool>,
    /// Replace rule values by the dataset's applied published values.
    pub published_adjustments: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions { reallocate_error: None, published_adjustments: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLine {
    pub name: String,
    pub toffoli: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLine {
    pub name: String,
    pub count: u64,
}

/// One equal-superposition preparation within a step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionLine {
    pub name: String,
    /// Toffolis for one preparation.
    pub toffoli: u64,
    pub steps: u32,
    pub initial_amplitude: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedAdjustment {
    pub line: String,
    pub rule: u64,
    pub published: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub dataset: String,
    pub variant: Variant,
    pub lambda: f64,
    pub delta_e: f64,
    pub mu: u32,
    pub m: u32,
    pub reallocate_error: bool,
    pub per_step_toffoli: u64,
    pub total_toffoli: u64,
    /// Table lookups, the dominant part of each step.
    pub lookup_costs: Vec<CostLine>,
    pub minor_costs: Vec<CostLine>,
    pub qubits: Vec<QubitLine>,
    pub qubit_total: u64,
    pub superpositions: Vec<SuperpositionLine>,
    /// Toffoli count times the qubit-seconds of one distillation factory.
    pub distillation_qubit_seconds: f64,
    pub adjustments: Vec<AppliedAdjustment>,
    pub notes: Vec<String>,
}

impl CostReport {
    pub fn lookup_total(&self) -> u64 {
        self.lookup_costs.iter().map(|l| l.toffoli).sum()
    }

    pub fn minor_total(&self) -> u64 {
        self.minor_costs.iter().map(|l| l.toffoli).sum()
    }

    pub fn qubit(&self, name: &str) -> Option<u64> {
        self.qubits.iter().find(|q| q.name == name).map(|q| q.count)
    }

    pub fn cost(&self, name: &str) -> Option<u64> {
        self.lookup_costs.iter().chain(&self.minor_costs).find(|l| l.name == name).map(|l| l.toffoli)
    }
}

struct Builder<'a> {
    ds: &'a Dataset,
    variant: Variant,
    apply: bool,
    lookups: Vec<CostLine>,
    minor: Vec<CostLine>,
    qubits: Vec<QubitLine>,
    superpositions: Vec<SuperpositionLine>,
    adjustments: Vec<AppliedAdjustment>,
    notes: Vec<String>,
}

impl<'a> Builder<'a> {
    fn find(&self, key: &str) -> Option<&'a Adjustment> {
        self.ds.adjustments.iter().find(|a| a.line == key && self.variant.matches(&a.variant))
    }

    /// Rule value, or the published one when an applied adjustment exists.
    fn resolve(&mut self, key: &str, rule: u64) -> Result<u64> {
        let Some(adj) = self.find(key) else { return Ok(rule) };
        if adj.rule != rule {
            return Err(Error::Invalid(format!(
                "adjustment `{key}` for {} expects a rule value of {}, the model gives {rule}",
                self.ds.name, adj.rule
            )));
        }
        if adj.applied && self.apply {
            self.notes.push(format!("{key}: published {} used in place of {rule}; {}", adj.published, adj.reason));
            self.adjustments.push(AppliedAdjustment { line: key.into(), rule, published: adj.published });
            Ok(adj.published)
        } else {
            self.notes.push(format!("{key}: computed {rule}, published {}; {}", adj.published, adj.reason));
            Ok(rule)
        }
    }

    fn lookup(&mut self, name: &str, toffoli: u64) -> Result<()> {
        let t = self.resolve(name, toffoli)?;
        self.lookups.push(CostLine { name: name.into(), toffoli: t });
        Ok(())
    }

    fn minor(&mut self, name: &str, toffoli: u64) -> Result<()> {
        let t = self.resolve(name, toffoli)?;
        self.minor.push(CostLine { name: name.into(), toffoli: t });
        Ok(())
    }

    fn qubit(&mut self, name: &str, count: u64) -> Result<()> {
        let c = self.resolve(&format!("qubits.{name}"), count)?;
        self.qubits.push(QubitLine { name: name.into(), count: c });
        Ok(())
    }

    /// Cost of all superposition parts (preparation and inverse).
    fn superposition(&mut self, specs: &[SuperpositionSpec]) -> Result<u64> {
        let mut total = 0;
        for spec in specs {
            let c = equal_superposition_cost(spec)?;
            let single = self.resolve(&format!("equal_superposition.{}", spec.name), c.single)?;
            total += 2 * single;
            self.superpositions.push(SuperpositionLine {
                name: spec.name.clone(),
                toffoli: single,
                steps: spec.steps,
                initial_amplitude: c.sin_phi,
                amplitude: c.amplitude,
            });
        }
        Ok(total)
    }

    /// Uses the dataset's block sizes when given and notes any gap to the
    /// Toffoli-optimal choice.
    fn qroam(&mut self, label: &str, d: u64, m_bits: u64, mode: QroamMode, budget: Option<u64>, choice: VariantChoice) -> Result<QroamCost> {
        let (opt_c, opt_u) = optimal_k(d, m_bits, mode, budget)?;
        let kc = choice.k_compute.unwrap_or(opt_c);
        let ku = choice.k_uncompute.unwrap_or(opt_u);
        let cfg = QroamConfig { d, m_bits, k_compute: kc, k_uncompute: ku, mode, dirty_budget: budget };
        let cost = qroam_cost(&cfg)?;
        if kc != opt_c {
            let best = qroam_cost(&QroamConfig { k_compute: opt_c, ..cfg })?;
            self.notes.push(format!(
                "{label}: compute block size {kc} costs {}; {opt_c} would cost {}",
                cost.compute, best.compute
            ));
        }
        if ku != opt_u {
            let best = qroam_cost(&QroamConfig { k_uncompute: opt_u, ..cfg })?;
            self.notes.push(format!(
                "{label}: uncompute block size {ku} costs {}; {opt_u} would cost {}",
                cost.uncompute, best.uncompute
            ));
        }
        self.notes.push(format!("{label}: d = {d}, M = {m_bits}, k = {kc}/{ku}"));
        Ok(cost)
    }

    /// Contiguous index plan, with width pins only when applying published
    /// values.
    fn index(&mut self, n_spin: u64, rank: u64) -> Result<IndexPlan> {
        let schedule = self.ds.index_schedule.clone().unwrap_or_else(|| binary_schedule(triangle(n_spin)));
        let natural = index_plan(n_spin, rank, &schedule, &[])?;
        let cost = self.resolve("contiguous_index", natural.toffoli)?;
        if cost == natural.toffoli {
            return Ok(natural);
        }
        let pinned = index_plan(n_spin, rank, &schedule, &self.ds.index_width_pins)?;
        if pinned.toffoli != cost {
            return Err(Error::Invalid(format!(
                "index width pins for {} give {} Toffolis, published {cost}",
                self.ds.name, pinned.toffoli
            )));
        }
        Ok(pinned)
    }
}

fn need<T: Copy>(v: Option<T>, what: &str, ds: &Dataset) -> Result<T> {
    v.ok_or_else(|| Error::Missing(format!("{what} for dataset {}", ds.name)))
}

fn lowrank_specs(ds: &Dataset, n_spin: u64, rank: u64) -> Result<Vec<SuperpositionSpec>> {
    let parts: Vec<SuperpositionChoice> = ds
        .lowrank_superposition
        .clone()
        .unwrap_or_else(|| vec![SuperpositionChoice { ancilla: None, steps: 1 }]);
    match parts.as_slice() {
        [joint] => Ok(vec![lowrank_joint(n_spin, rank, joint.ancilla, joint.steps)]),
        [first, second] => Ok(vec![
            lowrank_first(n_spin, rank, first.ancilla, first.steps),
            lowrank_second(n_spin, second.ancilla, second.steps),
        ]),
        _ => Err(Error::Invalid(format!("dataset {}: lowrank_superposition needs one or two entries", ds.name))),
    }
}

fn ancilla_bits(specs: &[SuperpositionSpec]) -> u64 {
    specs.iter().map(|s| s.ancilla.map_or(0, |a| a.bits as u64)).sum()
}

pub fn estimate_variant(ds: &Dataset, delta_e: f64, variant: Variant, opts: EstimateOptions) -> Result<CostReport> {
    let n_spin = ds.n_spin;
    if n_spin < 4 || n_spin % 2 != 0 {
        return Err(Error::Invalid(format!("dataset {}: need an even N ≥ 4, got {n_spin}", ds.name)));
    }
    let choice = variant.choice(ds);
    let reallocate = opts.reallocate_error.unwrap_or(choice.reallocate_error);
    let b = ceil_log2(n_spin / 2) as u64;
    let c = triangle(n_spin);
    let mut bl = Builder {
        ds,
        variant,
        apply: opts.published_adjustments,
        lookups: vec![],
        minor: vec![],
        qubits: vec![],
        superpositions: vec![],
        adjustments: vec![],
        notes: vec![],
    };

    let (lambda, stages) = match variant {
        Variant::LowrankDirty => (need(ds.lambda_lowrank, "lambda_lowrank", ds)?, 2),
        Variant::LowrankClean => (need(ds.lambda_lowrank, "lambda_lowrank", ds)?, 3),
        Variant::Sparse => (need(ds.lambda_sparse, "lambda_sparse", ds)?, 1),
    };
    let params = PhaseEstimationParams::new(lambda, delta_e, stages, reallocate)?;
    let mu = params.mu as u64;

    bl.qubit("system", n_spin)?;
    match variant {
        Variant::LowrankDirty | Variant::LowrankClean => {
            let rank = need(ds.rank, "rank", ds)?;
            if rank == 0 {
                return Err(Error::Invalid(format!("dataset {}: rank must be positive", ds.name)));
            }
            let lbits = bit_length(rank) as u64;
            let pair = 2 * b + 2 + mu;
            let (d1, d2) = ((rank + 1) * c, rank * c);
            let specs = lowrank_specs(ds, n_spin, rank)?;

            let lookup_outputs;
            if variant == Variant::LowrankDirty {
                let m1 = lbits + pair;
                let s1 = bl.qroam("first lookup", d1, m1, QroamMode::Dirty, Some(n_spin + pair), choice)?;
                let s2 = bl.qroam("second lookup", d2, pair, QroamMode::Dirty, Some(n_spin + m1), choice)?;
                bl.lookup("qroam_stage_1", s1.total())?;
                bl.lookup("qroam_stage_2", s2.total())?;
                lookup_outputs = m1 + pair;
                let clean = [s1, s2]
                    .iter()
                    .map(|s| s.compute_clean_ancillas.max(s.uncompute_clean_ancillas))
                    .max()
                    .unwrap_or(0);
                bl.minor("select", select_cost(n_spin))?;
                let sup = bl.superposition(&specs)?;
                bl.minor("equal_superposition", sup)?;
                bl.minor("inequality_and_swaps", 2 * (2 * mu + (lbits + 2 * b + 1) + (2 * b + 1)))?;
                bl.minor("symmetry_swaps", symmetry_swap_cost(n_spin))?;
                let plan = bl.index(n_spin, rank)?;
                bl.minor.push(CostLine { name: "contiguous_index".into(), toffoli: 4 * plan.toffoli });
                bl.qubit("prepared_state", lbits + 6 + 4 * b)?;
                bl.qubit("superposition_ancillas", ancilla_bits(&specs) + 1)?;
                bl.qubit("index_outputs", 2 * plan.output_bits as u64)?;
                bl.qubit("lookup_outputs", lookup_outputs)?;
                bl.qubit("qroam_clean", clean)?;
            } else {
                bl.lookup("qrom_rank", qrom_cost(rank + 1))?;
                let s3 = bl.qroam("step 3 lookup", d1, pair, QroamMode::Clean, None, choice)?;
                let s4 = bl.qroam("step 4 lookup", d2, pair, QroamMode::Clean, None, choice)?;
                bl.lookup("qroam_step_3", s3.total())?;
                bl.lookup("qroam_step_4", s4.total())?;
                lookup_outputs = lbits + 2 * pair;
                let work = [s3, s4]
                    .iter()
                    .map(|s| s.compute_clean_ancillas.max(s.uncompute_clean_ancillas))
                    .max()
                    .unwrap_or(0);
                bl.minor("select", select_cost(n_spin))?;
                let sup = bl.superposition(&specs)?;
                bl.minor("equal_superposition", sup)?;
                bl.minor("inequality_and_swaps", 6 * mu + 2 * (lbits + 2 * (2 * b + 1)))?;
                bl.minor("symmetry_swaps", symmetry_swap_cost(n_spin))?;
                let plan = bl.index(n_spin, rank)?;
                bl.minor.push(CostLine { name: "contiguous_index".into(), toffoli: 4 * plan.toffoli });
                bl.qubit("prepared_state", lbits + 6 + 4 * b)?;
                bl.qubit("superposition_ancillas", ancilla_bits(&specs) + 1)?;
                bl.qubit("index_outputs", 2 * plan.output_bits as u64)?;
                bl.qubit("lookup_outputs", lookup_outputs)?;
                bl.qubit("qroam_workspace", work)?;
            }
            bl.qubit("keep_registers", 2 * (mu + 1))?;
        }
        Variant::Sparse => {
            let unique = need(ds.unique_count, "unique_count", ds)?;
            let d = unique + c;
            let m_bits = mu + 8 * b + 4;
            let s = bl.qroam("sparse lookup", d, m_bits, QroamMode::Clean, None, choice)?;
            bl.lookup("qroam_prepare", s.compute)?;
            bl.lookup("qroam_unprepare", s.uncompute)?;
            let sc = ds.sparse_superposition.unwrap_or(SuperpositionChoice { ancilla: None, steps: 1 });
            let spec = single_register(d, sc.ancilla, sc.steps);
            bl.minor("select", select_cost(n_spin))?;
            let sup = bl.superposition(std::slice::from_ref(&spec))?;
            bl.minor("equal_superposition", sup)?;
            bl.minor("inequality_and_swaps", 2 * (mu + 2 + 4 * b))?;
            bl.minor("symmetry_swaps", symmetry_swap_cost(n_spin))?;
            let kc = choice.k_compute.unwrap_or(optimal_k(d, m_bits, QroamMode::Clean, None)?.0);
            bl.qubit("prepared_state", 7 + 4 * b)?;
            bl.qubit("superposition_ancillas", ancilla_bits(std::slice::from_ref(&spec)) + 1)?;
            bl.qubit("qroam_address", ceil_log2(d) as u64)?;
            bl.qubit("qroam_outputs", kc * m_bits - (2 + 4 * b))?;
            bl.qubit("qroam_clean", ceil_log2(d.div_ceil(kc)) as u64)?;
        }
    }
    bl.qubit("phase_estimation", params.m as u64)?;

    bl.notes.insert(
        0,
        format!(
            "m = {} ({}), phase error {:.3e} Ha, μ = {} keep bits over {} preparation stage(s)",
            params.m,
            if reallocate { "error budget reallocated to phase estimation" } else { "error budget split evenly" },
            params.phase_error(),
            params.mu,
            stages
        ),
    );

    let per_step: u64 = bl.lookups.iter().chain(&bl.minor).map(|l| l.toffoli).sum();
    let total = per_step
        .checked_mul(1u64 << params.m)
        .ok_or_else(|| Error::Limit(format!("total Toffoli count 2^{} × {per_step} overflows", params.m)))?;
    let qubit_total = bl.qubits.iter().map(|q| q.count).sum();
    Ok(CostReport {
        dataset: ds.name.clone(),
        variant,
        lambda,
        delta_e,
        mu: params.mu,
        m: params.m,
        reallocate_error: reallocate,
        per_step_toffoli: per_step,
        total_toffoli: total,
        lookup_costs: bl.lookups,
        minor_costs: bl.minor,
        qubits: bl.qubits,
        qubit_total,
        superpositions: bl.superpositions,
        distillation_qubit_seconds: total as f64 * FACTORY_QUBIT_SECONDS,
        adjustments: bl.adjustments,
        notes: bl.notes,
    })
}

/// `x` rounded to two significant figures.
pub fn two_significant(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let e = x.abs().log10().floor() as i32 - 1;
    let scale = 10f64.powi(e);
    (x / scale).round() * scale
}

/// A computed report set against one published cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub dataset: String,
    pub cell: PublishedCell,
    pub report: CostReport,
    pub m_ok: bool,
    pub mu_ok: bool,
    pub per_step_ok: bool,
    pub total_ok: bool,
    pub qubits_ok: bool,
}

impl Comparison {
    pub fn pass(&self) -> bool {
        self.m_ok && self.mu_ok && self.per_step_ok && self.total_ok && self.qubits_ok
    }
}

pub fn compare(ds: &Dataset, delta_e: f64, cell: &PublishedCell) -> Result<Comparison> {
    let variant: Variant = cell.variant.parse()?;
    let opts = EstimateOptions { reallocate_error: Some(cell.reallocate_error), published_adjustments: true };
    let report = estimate_variant(ds, delta_e, variant, opts)?;
    let total = two_significant(report.total_toffoli as f64);
    Ok(Comparison {
        dataset: ds.name.clone(),
        m_ok: report.m == cell.m,
        mu_ok: report.mu == cell.mu,
        per_step_ok: report.per_step_toffoli.abs_diff(cell.per_step_toffoli) <= cell.per_step_tolerance,
        total_ok: (total - cell.total_toffoli).abs() <= 1e-9 * cell.total_toffoli,
        qubits_ok: report.qubit_total == cell.qubits,
        cell: cell.clone(),
        report,
    })
}

/// Every published cell of every dataset.
pub fn reproduce(datasets: &[Dataset], delta_e: f64) -> Result<Vec<Comparison>> {
    datasets
        .iter()
        .flat_map(|ds| ds.published.iter().map(move |cell| compare(ds, delta_e, cell)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costing::fixtures::Fixtures;

    fn report(name: &str, v: Variant) -> CostReport {
        let f = Fixtures::bundled();
        estimate_variant(f.dataset(name).unwrap(), f.delta_e, v, EstimateOptions::default()).unwrap()
    }

    #[test]
    fn lowrank_dirty_totals() {
        let r = report("rwswt", Variant::LowrankDirty);
        assert_eq!((r.m, r.mu), (26, 27));
        assert_eq!(r.minor_total(), 1534);
        assert_eq!(r.per_step_toffoli, 310_688);
        assert_eq!(r.qubit_total, 378);
        let r = report("llduc", Variant::LowrankDirty);
        assert_eq!(r.minor_total(), 1818);
        assert_eq!(r.per_step_toffoli, 608_968);
        assert_eq!(r.qubit_total, 437);
    }

    #[test]
    fn lowrank_clean_totals() {
        let r = report("rwswt", Variant::LowrankClean);
        assert_eq!(r.per_step_toffoli, 18_579);
        assert_eq!(r.qubit_total, 3024);
        let r = report("llduc", Variant::LowrankClean);
        assert_eq!(r.per_step_toffoli, 29_140);
        assert_eq!(r.qubit_total, 3143);
        assert_eq!(r.m, 25);
    }

    #[test]
    fn sparse_totals() {
        let r = report("rwswt", Variant::Sparse);
        assert_eq!(r.per_step_toffoli, 13_783);
        assert_eq!(r.qubit_total, 5103);
        let r = report("llduc", Variant::Sparse);
        assert_eq!(r.per_step_toffoli, 9_995);
        assert_eq!(r.qubit_total, 2904);
    }

    #[test]
    fn published_cells_reproduce() {
        let f = Fixtures::bundled();
        for c in reproduce(&f.datasets, f.delta_e).unwrap() {
            assert!(c.pass(), "{} {:?}", c.dataset, c.cell);
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(two_significant(20_850_000_000_000.0), 2.1e13);
        assert_eq!(two_significant(9_778_000_000.0), 9.8e9);
    }

    #[test]
    fn variant_names() {
        assert_eq!("lowrank-dirty".parse::<Variant>().unwrap(), Variant::LowrankDirty);
        assert_eq!("SPARSE".parse::<Variant>().unwrap(), Variant::Sparse);
        assert!("dense".parse::<Variant>().is_err());
    }
}
