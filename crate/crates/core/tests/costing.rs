use proptest::prelude::*;
use qubitize::costing::fixtures::{Dataset, Fixtures};
use qubitize::costing::params::{keep_bits, repetitions, CHEMICAL_ACCURACY};
use qubitize::costing::qroam::{optimal_k, qroam_cost, QroamConfig, QroamMode};
use qubitize::costing::report::{estimate_variant, reproduce, two_significant, CostReport, EstimateOptions, Variant};
use qubitize::costing::superposition::{equal_superposition_cost, lowrank_first, lowrank_joint, lowrank_second, single_register};
use qubitize::costing::superposition::AncillaChoice;

fn dataset(name: &str) -> Dataset {
    Fixtures::bundled().dataset(name).unwrap().clone()
}

fn est(name: &str, v: Variant) -> CostReport {
    estimate_variant(&dataset(name), CHEMICAL_ACCURACY, v, EstimateOptions::default()).unwrap()
}

fn raw(name: &str, v: Variant) -> CostReport {
    let opts = EstimateOptions { reallocate_error: None, published_adjustments: false };
    estimate_variant(&dataset(name), CHEMICAL_ACCURACY, v, opts).unwrap()
}

#[test]
fn lookup_items() {
    let r = est("rwswt", Variant::LowrankDirty);
    assert_eq!(r.cost("qroam_stage_1"), Some(155_008));
    assert_eq!(r.cost("qroam_stage_2"), Some(154_146));
    let r = est("llduc", Variant::LowrankDirty);
    assert_eq!(r.cost("qroam_stage_1"), Some(304_378));
    assert_eq!(r.cost("qroam_stage_2"), Some(302_772));
    let r = est("rwswt", Variant::LowrankClean);
    assert_eq!(r.cost("qrom_rank"), Some(200));
    assert_eq!(r.cost("qroam_step_3"), Some(8405));
    assert_eq!(r.cost("qroam_step_4"), Some(8380));
    let r = est("llduc", Variant::LowrankClean);
    assert_eq!(r.cost("qroam_step_3"), Some(13_560));
    assert_eq!(r.cost("qroam_step_4"), Some(13_508));
    let r = est("rwswt", Variant::Sparse);
    assert_eq!((r.cost("qroam_prepare"), r.cost("qroam_unprepare")), (Some(11_672), Some(1365)));
    let r = est("llduc", Variant::Sparse);
    assert_eq!((r.cost("qroam_prepare"), r.cost("qroam_unprepare")), (Some(8214), Some(863)));
}

#[test]
fn minor_items() {
    let r = est("rwswt", Variant::LowrankDirty);
    let lines: Vec<(&str, u64)> = r.minor_costs.iter().map(|l| (l.name.as_str(), l.toffoli)).collect();
    assert_eq!(
        lines,
        [("select", 460), ("equal_superposition", 454), ("inequality_and_swaps", 176), ("symmetry_swaps", 24), ("contiguous_index", 420)]
    );
    let r = est("llduc", Variant::LowrankDirty);
    assert_eq!(r.cost("equal_superposition"), Some(534));
    assert_eq!(r.cost("contiguous_index"), Some(432));
    assert_eq!(r.minor_total(), 1818);
    assert_eq!(est("rwswt", Variant::LowrankClean).minor_total(), 1594);
    assert_eq!(est("llduc", Variant::LowrankClean).minor_total(), 1872);
    assert_eq!(est("rwswt", Variant::Sparse).minor_total(), 746);
    let r = est("llduc", Variant::Sparse);
    assert_eq!(r.cost("equal_superposition"), Some(142));
    assert_eq!(r.minor_total(), 918);
}

#[test]
fn totals_and_parameters() {
    let cases = [
        ("rwswt", Variant::LowrankDirty, 26, 27, 310_688, 378),
        ("rwswt", Variant::LowrankClean, 26, 28, 18_579, 3024),
        ("rwswt", Variant::Sparse, 24, 25, 13_783, 5103),
        ("llduc", Variant::LowrankDirty, 25, 27, 608_968, 437),
        ("llduc", Variant::LowrankClean, 25, 27, 29_140, 3143),
        ("llduc", Variant::Sparse, 24, 24, 9_995, 2904),
    ];
    for (name, v, m, mu, step, qubits) in cases {
        let r = est(name, v);
        assert_eq!((r.m, r.mu, r.per_step_toffoli, r.qubit_total), (m, mu, step, qubits), "{name} {v}");
        assert_eq!(r.total_toffoli, step << m);
        assert_eq!(r.lookup_total() + r.minor_total(), r.per_step_toffoli);
        assert_eq!(r.qubits.iter().map(|q| q.count).sum::<u64>(), r.qubit_total);
        assert_eq!(r.distillation_qubit_seconds, r.total_toffoli as f64 * 24.0);
    }
    let opts = EstimateOptions { reallocate_error: Some(true), published_adjustments: true };
    let r = estimate_variant(&dataset("llduc"), CHEMICAL_ACCURACY, Variant::Sparse, opts).unwrap();
    assert_eq!((r.m, r.qubit_total), (23, 2903));
    assert_eq!(two_significant(r.total_toffoli as f64), 8.4e10);
}

#[test]
fn every_published_cell_reproduces() {
    let f = Fixtures::bundled();
    let cells = reproduce(&f.datasets, f.delta_e).unwrap();
    assert_eq!(cells.len(), 7);
    for c in cells {
        assert!(c.pass(), "{} {:?}", c.dataset, c.cell);
    }
}

#[test]
fn qubit_lines() {
    let r = est("rwswt", Variant::LowrankDirty);
    let lines: Vec<u64> = r.qubits.iter().map(|q| q.count).collect();
    assert_eq!(lines, [108, 38, 5, 38, 90, 17, 56, 26]);
    let r = est("llduc", Variant::LowrankClean);
    assert_eq!(r.qubit("qroam_workspace"), Some(2723));
    assert_eq!(r.qubit("phase_estimation"), Some(26));
    let r = est("rwswt", Variant::Sparse);
    assert_eq!(r.qubit("qroam_outputs"), Some(4902));
    assert_eq!(r.qubit("qroam_clean"), Some(12));
}

#[test]
fn adjustments_are_explicit() {
    let applied = |name, v| -> Vec<String> { est(name, v).adjustments.into_iter().map(|a| a.line).collect() };
    assert!(applied("rwswt", Variant::LowrankDirty).is_empty());
    assert!(applied("rwswt", Variant::LowrankClean).is_empty());
    assert_eq!(applied("rwswt", Variant::Sparse), ["equal_superposition.sparse index", "qubits.qroam_clean"]);
    assert_eq!(
        applied("llduc", Variant::LowrankDirty),
        ["equal_superposition.l,p,q", "equal_superposition.r,s", "contiguous_index"]
    );
    assert_eq!(
        applied("llduc", Variant::LowrankClean),
        ["equal_superposition.l,p,q", "equal_superposition.r,s", "contiguous_index", "qubits.phase_estimation"]
    );
    let notes = est("rwswt", Variant::LowrankClean).notes;
    assert!(notes.iter().any(|n| n.starts_with("qroam_step_4: computed 8380, published 8379")));

    // Rule values alone.
    let r = raw("llduc", Variant::LowrankDirty);
    assert_eq!(r.cost("contiguous_index"), Some(440));
    assert_eq!(r.cost("equal_superposition"), Some(528));
    assert_eq!(r.per_step_toffoli, 608_970);
    assert!(r.adjustments.is_empty());
    let r = raw("rwswt", Variant::Sparse);
    assert_eq!((r.per_step_toffoli, r.qubit_total), (13_785, 5104));
    assert_eq!(raw("llduc", Variant::LowrankClean).qubit_total, 3142);
}

#[test]
fn mismatched_adjustment_is_rejected() {
    let mut ds = dataset("rwswt");
    ds.adjustments[0].rule += 1;
    assert!(estimate_variant(&ds, CHEMICAL_ACCURACY, Variant::LowrankClean, EstimateOptions::default()).is_err());
}

#[test]
fn block_size_notes() {
    let notes = est("llduc", Variant::LowrankClean).notes.join("\n");
    assert!(notes.contains("compute block size 64 costs 11899; 128 would cost 10056"), "{notes}");
    let notes = est("llduc", Variant::Sparse).notes.join("\n");
    assert!(notes.contains("compute block size 32"), "{notes}");
    let notes = est("rwswt", Variant::Sparse).notes.join("\n");
    assert!(!notes.contains("block size 64 costs"), "{notes}");
    let r = est("rwswt", Variant::LowrankDirty);
    assert!(r.notes.iter().any(|n| n.contains("k = 4/128")));
}

#[test]
fn superposition_amplitudes() {
    let anc = |count, bits| Some(AncillaChoice { count, bits });
    let specs = [
        (lowrank_joint(108, 200, anc(15, 4), 2), 227, 0.999943),
        (lowrank_first(152, 200, anc(11, 4), 2), 156, 0.999970),
        (lowrank_second(152, anc(17, 5), 2), 108, 0.999986),
        (single_register(436_508, anc(19, 6), 1), 81, 0.999952),
        (single_register(179_498, anc(3, 3), 1), 71, 0.999727),
    ];
    for (spec, single, amp) in specs {
        let c = equal_superposition_cost(&spec).unwrap();
        assert_eq!(c.single, single, "{}", spec.name);
        assert!((c.amplitude - amp).abs() < 1e-6, "{} {}", spec.name, c.amplitude);
        assert!(c.amplitude >= 0.9997);
        assert!(c.printed_formula_value < 0.96);
    }
}

proptest! {
    #[test]
    fn clean_never_costs_more_than_dirty(d in 2u64..100_000, m in 1u64..200, e in 1u32..12) {
        let k = 1u64 << e;
        let cfg = |mode| QroamConfig { d, m_bits: m, k_compute: k, k_uncompute: k, mode, dirty_budget: Some(u64::MAX) };
        let clean = qroam_cost(&cfg(QroamMode::Clean)).unwrap();
        let dirty = qroam_cost(&cfg(QroamMode::Dirty)).unwrap();
        prop_assert!(clean.compute <= dirty.compute);
        prop_assert!(clean.uncompute <= dirty.uncompute);
    }

    #[test]
    fn optimal_block_beats_plain_lookup(d in 1u64..200_000, m in 1u64..120) {
        let (kc, ku) = optimal_k(d, m, QroamMode::Clean, None).unwrap();
        let cfg = |kc, ku| QroamConfig { d, m_bits: m, k_compute: kc, k_uncompute: ku, mode: QroamMode::Clean, dirty_budget: None };
        let best = qroam_cost(&cfg(kc, ku)).unwrap();
        let plain = qroam_cost(&cfg(1, 1)).unwrap();
        prop_assert!(best.compute <= plain.compute);
        prop_assert!(best.uncompute <= plain.uncompute);
        if d >= 2 {
            let two = qroam_cost(&cfg(2, 2)).unwrap();
            prop_assert_eq!(two.compute, d.div_ceil(2) + m);
            prop_assert!(best.compute <= two.compute);
        }
    }

    #[test]
    fn lookup_cost_grows_with_table(d in 1u64..100_000, extra in 1u64..1000, m in 1u64..60, e in 0u32..10) {
        let k = 1u64 << e;
        let cfg = |d| QroamConfig { d, m_bits: m, k_compute: k, k_uncompute: k, mode: QroamMode::Clean, dirty_budget: None };
        prop_assert!(qroam_cost(&cfg(d)).unwrap().total() <= qroam_cost(&cfg(d + extra)).unwrap().total());
    }

    #[test]
    fn precision_parameters_monotone(lambda in 1.0f64..1e6, factor in 1.0f64..8.0, stages in 1u32..4) {
        let de = CHEMICAL_ACCURACY;
        prop_assert!(keep_bits(lambda, de, stages).unwrap() <= keep_bits(lambda * factor, de, stages).unwrap());
        prop_assert!(keep_bits(lambda, de, stages).unwrap() <= keep_bits(lambda, de, stages + 1).unwrap());
        prop_assert!(repetitions(lambda, de, false).unwrap() <= repetitions(lambda * factor, de, false).unwrap());
        prop_assert!(repetitions(lambda, de, true).unwrap() <= repetitions(lambda, de, false).unwrap());
    }

    #[test]
    fn estimates_grow_with_lambda(scale in 0.1f64..4.0, bump in 1.0f64..3.0) {
        for v in Variant::ALL {
            let mut a = dataset("rwswt");
            a.lambda_lowrank = a.lambda_lowrank.map(|l| l * scale);
            a.lambda_sparse = a.lambda_sparse.map(|l| l * scale);
            a.adjustments.clear();
            let mut b = a.clone();
            b.lambda_lowrank = b.lambda_lowrank.map(|l| l * bump);
            b.lambda_sparse = b.lambda_sparse.map(|l| l * bump);
            let ra = estimate_variant(&a, CHEMICAL_ACCURACY, v, EstimateOptions::default()).unwrap();
            let rb = estimate_variant(&b, CHEMICAL_ACCURACY, v, EstimateOptions::default()).unwrap();
            prop_assert!(ra.per_step_toffoli <= rb.per_step_toffoli);
            prop_assert!(ra.total_toffoli <= rb.total_toffoli);
            prop_assert_eq!(ra.lookup_total() + ra.minor_total(), ra.per_step_toffoli);
        }
    }

    #[test]
    fn amplification_stays_a_probability(d in 2u64..1_000_000, steps in 0u32..3) {
        let c = equal_superposition_cost(&single_register(d, None, steps)).unwrap();
        prop_assert!(c.sin_phi > 0.5 && c.sin_phi <= 1.0);
        prop_assert!((-1.0..=1.0).contains(&c.amplitude));
        let more = equal_superposition_cost(&single_register(d, None, steps + 1)).unwrap();
        prop_assert!(more.single > c.single);
    }
}
