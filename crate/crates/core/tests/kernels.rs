use num_complex::Complex64 as C64;
use qubitize::circuit::{Circuit, Qubit};
use qubitize::kernels::*;
use qubitize::simulator::{decode, encode, fidelity, run, run_deterministic, run_postselected, RunOptions, SparseState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reg(c: &Circuit, name: &str) -> Vec<Qubit> {
    c.reg(name).unwrap().qubits.clone()
}

/// Runs from a basis state and returns each branch's (basis index, weight),
/// asserting every branch is itself a basis state.
fn classical_run(c: &Circuit, input: u128) -> Vec<(u128, f64)> {
    let init = SparseState::basis(c.n_qubits, input).unwrap();
    let branches = run(c, init, &RunOptions::default()).unwrap();
    let total: f64 = branches.iter().map(|b| b.weight).sum();
    assert!((total - 1.0).abs() < 1e-10);
    branches
        .into_iter()
        .map(|b| {
            let terms = b.state.terms();
            assert_eq!(terms.len(), 1, "branch is not a basis state");
            (terms[0].0, b.weight)
        })
        .collect()
}

fn assert_classical(c: &Circuit, input: u128, expected: u128) {
    for (out, _) in classical_run(c, input) {
        assert_eq!(out, expected, "input {input:#b}");
    }
}

#[test]
fn adder_exhaustive() {
    for n in 1..=4usize {
        for modular in [true, false] {
            let c = build_adder(n, modular).unwrap();
            assert_eq!(c.toffoli_count(), if modular { n - 1 } else { n });
            let (i, t) = (reg(&c, "i"), reg(&c, "t"));
            for a in 0..1u128 << n {
                for x in 0..1u128 << n {
                    let sum = a + x;
                    let mut want = encode(&[(&i, a), (&t, sum % (1 << n))]);
                    if !modular {
                        want |= encode(&[(&reg(&c, "carry"), sum >> n)]);
                    }
                    assert_classical(&c, encode(&[(&i, a), (&t, x)]), want);
                }
            }
        }
    }
}

#[test]
fn adder_five_bits_costs_four() {
    assert_eq!(build_adder(5, true).unwrap().toffoli_count(), 4);
}

#[test]
fn adder_with_carry_three_plus_five() {
    let c = build_adder(4, false).unwrap();
    let (i, t, carry) = (reg(&c, "i"), reg(&c, "t"), reg(&c, "carry"));
    for (out, _) in classical_run(&c, encode(&[(&i, 5), (&t, 3)])) {
        assert_eq!(decode(out, &t), 8);
        assert_eq!(decode(out, &carry), 0);
    }
}

#[test]
fn subtractor_exhaustive() {
    for n in 1..=4usize {
        let c = build_subtractor(n).unwrap();
        assert_eq!(c.toffoli_count(), n - 1);
        let (i, t) = (reg(&c, "i"), reg(&c, "t"));
        for a in 0..1u128 << n {
            for x in 0..1u128 << n {
                let want = encode(&[(&i, a), (&t, (x + (1 << n) - a) % (1 << n))]);
                assert_classical(&c, encode(&[(&i, a), (&t, x)]), want);
            }
        }
    }
}

#[test]
fn inequality_exhaustive() {
    for n in 1..=4usize {
        let c = build_inequality(n, Operand::Variable).unwrap();
        assert_eq!(c.toffoli_count(), n);
        let (t, i, flag) = (reg(&c, "t"), reg(&c, "i"), reg(&c, "flag"));
        for a in 0..1u128 << n {
            for x in 0..1u128 << n {
                for f in 0..2 {
                    let input = encode(&[(&t, x), (&i, a), (&flag, f)]);
                    let want = encode(&[(&t, x), (&i, a), (&flag, f ^ (x < a) as u128)]);
                    assert_classical(&c, input, want);
                }
            }
        }
        for k in 0..1u64 << n {
            let c = build_inequality(n, Operand::Constant(k)).unwrap();
            let expected_cost = if k == 0 { 0 } else { n - 1 - k.trailing_zeros() as usize };
            assert_eq!(c.toffoli_count(), expected_cost, "n={n} k={k}");
            let (t, flag) = (reg(&c, "t"), reg(&c, "flag"));
            for x in 0..1u128 << n {
                for f in 0..2 {
                    let want = encode(&[(&t, x), (&flag, f ^ (x < k as u128) as u128)]);
                    assert_classical(&c, encode(&[(&t, x), (&flag, f)]), want);
                }
            }
        }
    }
}

#[test]
fn inequality_against_54_costs_four() {
    assert_eq!(build_inequality(6, Operand::Constant(54)).unwrap().toffoli_count(), 4);
}

#[test]
fn unary_iteration_counts() {
    assert_eq!(build_unary_iteration(2).unwrap().toffoli_count(), 1);
    for d in 1..=9 {
        let c = build_unary_iteration(d).unwrap();
        assert_eq!(c.toffoli_count(), d - 1);
        let (ctrl, addr, onehot) = (reg(&c, "ctrl"), reg(&c, "addr"), reg(&c, "onehot"));
        for j in 0..d as u128 {
            let input = encode(&[(&ctrl, 1), (&addr, j)]);
            assert_classical(&c, input, input | encode(&[(&onehot, 1 << j)]));
            let off = encode(&[(&addr, j)]);
            assert_classical(&c, off, off);
        }
    }
    let c = build_nested_unary_iteration(4, 4).unwrap();
    assert_eq!(c.toffoli_count(), 15);
    let (ctrl, p, q, onehot) = (reg(&c, "ctrl"), reg(&c, "p"), reg(&c, "q"), reg(&c, "onehot"));
    for a in 0..4u128 {
        for b in 0..4u128 {
            let input = encode(&[(&ctrl, 1), (&p, a), (&q, b)]);
            assert_classical(&c, input, input | encode(&[(&onehot, 1 << (4 * a + b))]));
        }
    }
}

fn random_table(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Vec<u64> {
    (0..d).map(|_| rng.gen_range(0..1u64 << m)).collect()
}

/// Uniform superposition over addresses `< d` with varied phases, `ctrl` set,
/// plus a fixed basis assignment of the remaining named registers.
fn superposed_input(n: usize, ctrl: &[Qubit], addr: &[Qubit], d: usize, fixed: u128) -> SparseState {
    let amp = 1.0 / (d as f64).sqrt();
    SparseState::from_terms(
        n,
        (0..d).map(|x| {
            let phase = C64::from_polar(amp, 0.7 * x as f64);
            (encode(&[(ctrl, 1), (addr, x as u128)]) | fixed, phase)
        }),
    )
    .unwrap()
}

#[test]
fn qrom_lookup_matches_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 2..=8 {
        for m in 1..=4 {
            let table = random_table(&mut rng, d, m);
            let c = build_qrom(&table, m).unwrap();
            assert_eq!(c.toffoli_count(), d - 1);
            let (ctrl, addr, out) = (reg(&c, "ctrl"), reg(&c, "addr"), reg(&c, "out"));
            for x in 0..d {
                let input = encode(&[(&ctrl, 1), (&addr, x as u128)]);
                assert_classical(&c, input, input | encode(&[(&out, table[x] as u128)]));
            }
            let got = run_deterministic(&c, superposed_input(c.n_qubits, &ctrl, &addr, d, 0)).unwrap();
            let amp = 1.0 / (d as f64).sqrt();
            let want = SparseState::from_terms(
                c.n_qubits,
                (0..d).map(|x| {
                    (encode(&[(&ctrl, 1), (&addr, x as u128), (&out, table[x] as u128)]), C64::from_polar(amp, 0.7 * x as f64))
                }),
            )
            .unwrap();
            assert!(fidelity(&got, &want) > 1.0 - 1e-10);
        }
    }
}

fn block_sizes(d: usize) -> Vec<usize> {
    (1..).map(|e| 1usize << e).take_while(|&k| k <= d.next_power_of_two()).collect()
}

#[test]
fn qroam_clean_lookup_and_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in 2..=8 {
        for m in 1..=3 {
            for k in block_sizes(d) {
                let table = random_table(&mut rng, d, m);
                let c = build_qroam_clean(&table, m, k, Garbage::Keep).unwrap();
                let blocks = d.div_ceil(k);
                assert_eq!(c.toffoli_count(), blocks - 1 + m * (k - 1), "d={d} m={m} k={k}");
                let (ctrl, addr, out) = (reg(&c, "ctrl"), reg(&c, "addr"), reg(&c, "out"));
                for x in 0..d {
                    let input = encode(&[(&ctrl, 1), (&addr, x as u128)]);
                    for (res, _) in classical_run(&c, input) {
                        assert_eq!(decode(res, &out), table[x] as u128, "d={d} m={m} k={k} x={x}");
                        assert_eq!(decode(res, &addr), x as u128);
                    }
                }
            }
        }
    }
}

#[test]
fn qroam_dirty_restores_borrowed_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in 2..=8 {
        for m in 1..=3 {
            for k in block_sizes(d) {
                let table = random_table(&mut rng, d, m);
                let c = build_qroam_dirty(&table, m, k).unwrap();
                let blocks = d.div_ceil(k);
                assert_eq!(c.toffoli_count(), 2 * (blocks - 1) + 4 * m * (k - 1), "d={d} m={m} k={k}");
                let (ctrl, addr, out, dirty) = (reg(&c, "ctrl"), reg(&c, "addr"), reg(&c, "out"), reg(&c, "dirty"));
                for seed in 0..20 {
                    let junk: u128 = if dirty.is_empty() { 0 } else { rng.gen_range(0..1u128 << dirty.len()) };
                    let x = (seed % d) as u128;
                    let input = encode(&[(&ctrl, 1), (&addr, x), (&dirty, junk)]);
                    assert_classical(&c, input, input | encode(&[(&out, table[x as usize] as u128)]));
                }
                // Superposed address with fixed junk.
                let junk: u128 = if dirty.is_empty() { 0 } else { rng.gen_range(0..1u128 << dirty.len()) };
                let fixed = encode(&[(&dirty, junk)]);
                let got = run_deterministic(&c, superposed_input(c.n_qubits, &ctrl, &addr, d, fixed)).unwrap();
                let amp = 1.0 / (d as f64).sqrt();
                let want = SparseState::from_terms(
                    c.n_qubits,
                    (0..d).map(|x| {
                        let idx = encode(&[(&ctrl, 1), (&addr, x as u128), (&out, table[x] as u128)]) | fixed;
                        (idx, C64::from_polar(amp, 0.7 * x as f64))
                    }),
                )
                .unwrap();
                assert!(fidelity(&got, &want) > 1.0 - 1e-10, "d={d} m={m} k={k}");
            }
        }
    }
}

#[test]
fn qroam_dirty_example_count() {
    let table = vec![0u64; 8];
    let c = build_qroam_dirty(&table, 2, 2).unwrap();
    // Exact construction; the closed-form bound is 2⌈d/k⌉ + 4M(k−1) = 16.
    assert_eq!(c.toffoli_count(), 14);
}

#[test]
fn qroam_dirty_with_superposed_borrowed_qubits() {
    let table = vec![3u64, 1, 0, 2, 2, 1, 3, 0];
    let c = build_qroam_dirty(&table, 2, 4).unwrap();
    let (ctrl, addr, out, dirty) = (reg(&c, "ctrl"), reg(&c, "addr"), reg(&c, "out"), reg(&c, "dirty"));
    // Address 5 and the borrowed qubits in an entangled-looking product of |+>'s.
    let terms: Vec<(u128, C64)> = (0..1u128 << dirty.len())
        .map(|j| (encode(&[(&ctrl, 1), (&addr, 5), (&dirty, j)]), C64::new(1.0, 0.0)))
        .collect();
    let norm = (terms.len() as f64).sqrt();
    let init = SparseState::from_terms(c.n_qubits, terms.iter().map(|&(i, a)| (i, a / norm))).unwrap();
    let got = run_deterministic(&c, init).unwrap();
    let want = SparseState::from_terms(
        c.n_qubits,
        terms.iter().map(|&(i, a)| (i | encode(&[(&out, table[5] as u128)]), a / norm)),
    )
    .unwrap();
    assert!(fidelity(&got, &want) > 1.0 - 1e-10);
}

#[test]
fn unlookup_counts() {
    let table = vec![1u64; 8];
    assert_eq!(build_unlookup(&table, 2, 2, UnlookupMode::Clean).unwrap().toffoli_count(), 4);
    assert_eq!(build_unlookup(&table, 2, 2, UnlookupMode::Dirty).unwrap().toffoli_count(), 2 * 3 + 4);
    assert_eq!(build_unlookup(&table, 2, 2, UnlookupMode::Halved).unwrap().toffoli_count(), 3);
    for k in [2usize, 4, 8] {
        assert_eq!(build_unary_erasure(k).unwrap().toffoli_count(), 0);
    }
}

#[test]
fn unary_erasure_clears_one_hot() {
    for k in [2usize, 4, 8] {
        let c = build_unary_erasure(k).unwrap();
        assert_eq!(c.toffoli_count(), 0);
        let (sel, onehot) = (reg(&c, "sel"), reg(&c, "onehot"));
        for j in 0..k as u128 {
            let input = encode(&[(&sel, j), (&onehot, 1 << j)]);
            assert_classical(&c, input, encode(&[(&sel, j)]));
        }
        // Superposed selector: phases must survive.
        let amp = 1.0 / (k as f64).sqrt();
        let init = SparseState::from_terms(
            c.n_qubits,
            (0..k as u128).map(|j| (encode(&[(&sel, j), (&onehot, 1 << j)]), C64::from_polar(amp, j as f64))),
        )
        .unwrap();
        let want = SparseState::from_terms(
            c.n_qubits,
            (0..k as u128).map(|j| (encode(&[(&sel, j)]), C64::from_polar(amp, j as f64))),
        )
        .unwrap();
        let got = run_deterministic(&c, init).unwrap();
        assert!(fidelity(&got, &want) > 1.0 - 1e-10);
    }
}

#[test]
fn lookup_round_trip_restores_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let modes = [
        (LookupMode::Clean, UnlookupMode::Clean),
        (LookupMode::Clean, UnlookupMode::Halved),
        (LookupMode::Clean, UnlookupMode::Dirty),
        (LookupMode::Dirty, UnlookupMode::Clean),
        (LookupMode::Dirty, UnlookupMode::Dirty),
        (LookupMode::Dirty, UnlookupMode::Halved),
    ];
    for d in 2..=8 {
        for m in 1..=3 {
            for kc in block_sizes(d) {
                for ku in block_sizes(d) {
                    for &(lm, um) in &modes {
                        let table = random_table(&mut rng, d, m);
                        let c = build_lookup_round_trip(&table, m, kc, ku, lm, um).unwrap();
                        let (ctrl, addr, dirty) = (reg(&c, "ctrl"), reg(&c, "addr"), reg(&c, "dirty"));
                        let junk = if dirty.is_empty() { 0 } else { rng.gen_range(0..1u128 << dirty.len()) };
                        let init = superposed_input(c.n_qubits, &ctrl, &addr, d, encode(&[(&dirty, junk)]));
                        let ctx = format!("d={d} m={m} kc={kc} ku={ku} {lm:?}/{um:?}");
                        for (state, _) in round_trip_outcomes(&c, &init, &mut rng) {
                            assert!(fidelity(&state, &init) > 1.0 - 1e-10, "{ctx}");
                        }
                    }
                }
            }
        }
    }
}

/// Final states of a circuit over its measurement outcomes: every branch when
/// there are at most 12 measurements, otherwise the all-zero and all-one
/// records, every single-one record and 32 random records.
fn round_trip_outcomes(c: &Circuit, init: &SparseState, rng: &mut ChaCha8Rng) -> Vec<(SparseState, f64)> {
    let b = c.n_measurements;
    if b <= 12 {
        return run(c, init.clone(), &RunOptions::default()).unwrap().into_iter().map(|br| (br.state, br.weight)).collect();
    }
    let mut records = vec![vec![false; b], vec![true; b]];
    for j in 0..b {
        let mut r = vec![false; b];
        r[j] = true;
        records.push(r);
    }
    for _ in 0..32 {
        records.push((0..b).map(|_| rng.gen_bool(0.5)).collect());
    }
    records.into_iter().map(|r| run_postselected(c, init.clone(), &r).unwrap()).collect()
}

fn marginal(state: &SparseState, qubits: &[Qubit]) -> std::collections::BTreeMap<u128, f64> {
    let mut out = std::collections::BTreeMap::new();
    for (idx, amp) in state.terms() {
        *out.entry(decode(idx, qubits)).or_insert(0.0) += amp.norm_sqr();
    }
    out
}

fn run_mixture(c: &Circuit, input: u128) -> Vec<(SparseState, f64)> {
    let init = SparseState::basis(c.n_qubits, input).unwrap();
    run(c, init, &RunOptions::default()).unwrap().into_iter().map(|b| (b.state, b.weight)).collect()
}

#[test]
fn alias_prepare_matches_discretized_target() {
    let (c, table) = build_alias_prepare(&[3.0, 1.0, 1.0, 3.0], 3).unwrap();
    assert_eq!(c.toffoli_count(), 3 + 3 + 2);
    let (num, den) = table.implied_counts();
    let (ctrl, index) = (reg(&c, "ctrl"), reg(&c, "index"));
    let mut probs = vec![0.0; 4];
    for (s, w) in run_mixture(&c, encode(&[(&ctrl, 1)])) {
        for (j, p) in marginal(&s, &index) {
            probs[j as usize] += w * p;
        }
    }
    for j in 0..4 {
        assert!((probs[j] - num[j] as f64 / den as f64).abs() < 1e-12);
    }
    assert_eq!(probs.iter().map(|p| (p * 32.0).round() as u32).collect::<Vec<_>>(), vec![12, 4, 4, 12]);
}

#[test]
fn alias_prepare_uniform_never_swaps() {
    let (c, table) = build_alias_prepare(&[1.0; 8], 5).unwrap();
    assert!(table.keep.iter().all(|&k| k == 31));
    let (ctrl, index) = (reg(&c, "ctrl"), reg(&c, "index"));
    let mix = run_mixture(&c, encode(&[(&ctrl, 1)]));
    let mut probs = [0.0; 8];
    for (s, w) in mix {
        for (j, p) in marginal(&s, &index) {
            probs[j as usize] += w * p;
        }
    }
    assert!(probs.iter().all(|p| (p - 0.125).abs() < 1e-12));
}

#[test]
fn sparse_prepare_supports_only_listed_indices() {
    let entries = [(5u64, 0.5), (9, 0.3), (12, 0.2)];
    let (c, table) = build_sparse_prepare(&entries, 6).unwrap();
    let (num, den) = table.implied_counts();
    let (ctrl, ind) = (reg(&c, "ctrl"), reg(&c, "ind"));
    let mut probs = std::collections::BTreeMap::new();
    for (s, w) in run_mixture(&c, encode(&[(&ctrl, 1)])) {
        for (j, p) in marginal(&s, &ind) {
            *probs.entry(j).or_insert(0.0) += w * p;
        }
    }
    // Padding entry 3 carries zero weight and redirects entirely.
    let expected: Vec<(u128, f64)> =
        entries.iter().enumerate().map(|(j, &(i, _))| (i as u128, num[j] as f64 / den as f64)).collect();
    let got: Vec<(u128, f64)> = probs.into_iter().filter(|&(_, p)| p > 1e-12).collect();
    assert_eq!(got.len(), 3);
    for ((gi, gp), (ei, ep)) in got.iter().zip(&expected) {
        assert_eq!(gi, ei);
        assert!((gp - ep).abs() < 1e-12);
    }
}

#[test]
fn symmetry_swaps_cover_all_images() {
    for bits in 1..=3usize {
        let c = build_symmetry_swaps(bits).unwrap();
        assert_eq!(c.toffoli_count(), 4 * bits);
    }
    let c = build_symmetry_swaps(2).unwrap();
    let (p, q, r, s) = (reg(&c, "p"), reg(&c, "q"), reg(&c, "r"), reg(&c, "s"));
    let (a, b, cc, d) = (3u128, 1, 2, 0);
    let init = SparseState::basis(c.n_qubits, encode(&[(&p, a), (&q, b), (&r, cc), (&s, d)])).unwrap();
    let out = run_deterministic(&c, init).unwrap();
    let mut images: Vec<[u128; 4]> = out
        .terms()
        .iter()
        .map(|&(i, _)| [decode(i, &p), decode(i, &q), decode(i, &r), decode(i, &s)])
        .collect();
    images.sort();
    images.dedup();
    let mut want = vec![
        [a, b, cc, d],
        [b, a, cc, d],
        [a, b, d, cc],
        [b, a, d, cc],
        [cc, d, a, b],
        [d, cc, a, b],
        [cc, d, b, a],
        [d, cc, b, a],
    ];
    want.sort();
    assert_eq!(images, want);
}

#[test]
fn circuits_round_trip_through_text() {
    let table = vec![1u64, 3, 0, 2, 1];
    let c = build_lookup_round_trip(&table, 2, 2, 2, LookupMode::Clean, UnlookupMode::Clean).unwrap();
    let text = c.to_text();
    let back = Circuit::from_text(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.to_text(), text);
}
