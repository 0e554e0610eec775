//! Kernel verification grid: each check builds a circuit, simulates it and
//! compares its Toffoli count with the exact count and the published bound.

use std::fmt;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{Circuit, Qubit};
use crate::costing::arith::{arithmetic_cost, constant_inequality_cost, ArithKind, OperandKind};
use crate::costing::exact;
use crate::costing::index::{binary_schedule, index_plan};
use crate::costing::qroam::{qroam_cost, qrom_cost, QroamConfig, QroamMode};
use crate::costing::superposition::triangle;
use crate::error::{Error, Result};
use crate::kernels::{
    build_adder, build_contiguous_index, build_inequality, build_lookup_round_trip, build_qrom, build_qroam_clean,
    build_qroam_dirty, build_subtractor, build_unary_erasure, build_unary_iteration, Garbage, LookupMode, Operand,
    UnlookupMode,
};
use crate::math::ceil_log2;
use crate::simulator::{decode, encode, fidelity, run, run_postselected, RunOptions, SparseState};

/// Above this many measurements a round trip is checked on sampled outcome
/// records instead of every branch.
const EXHAUSTIVE_MEASUREMENTS: usize = 12;
const FIDELITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    /// Adder with carry-out.
    Adder { n: usize },
    Subtractor { n: usize },
    Inequality { n: usize },
    /// Every classical constant `1 ≤ c < 2^n`.
    InequalityConst { n: usize },
    Unary { d: usize },
    Qrom { d: usize, m: usize },
    QroamClean { d: usize, m: usize, k: usize },
    QroamDirty { d: usize, m: usize, k: usize },
    RoundTrip { d: usize, m: usize, k: usize, lookup: LookupMode, unlookup: UnlookupMode },
    Erasure { k: usize },
    /// Contiguous index with `n` orbital bits (`N = 2^(n+1)`, `L = 3`).
    Index { n: usize },
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Check::Adder { n } => write!(f, "adder n={n}"),
            Check::Subtractor { n } => write!(f, "subtractor n={n}"),
            Check::Inequality { n } => write!(f, "inequality n={n}"),
            Check::InequalityConst { n } => write!(f, "inequality-const n={n}"),
            Check::Unary { d } => write!(f, "unary d={d}"),
            Check::Qrom { d, m } => write!(f, "qrom d={d} m={m}"),
            Check::QroamClean { d, m, k } => write!(f, "qroam-clean d={d} m={m} k={k}"),
            Check::QroamDirty { d, m, k } => write!(f, "qroam-dirty d={d} m={m} k={k}"),
            Check::RoundTrip { d, m, k, lookup, unlookup } => {
                let l = if lookup == LookupMode::Clean { "clean" } else { "dirty" };
                let u = match unlookup {
                    UnlookupMode::Clean => "clean",
                    UnlookupMode::Dirty => "dirty",
                    UnlookupMode::Halved => "halved",
                };
                write!(f, "round-trip {l}/{u} d={d} m={m} k={k}")
            }
            Check::Erasure { k } => write!(f, "erasure k={k}"),
            Check::Index { n } => write!(f, "index n={n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    /// Published closed-form Toffoli bound.
    pub bound: u64,
    /// Toffolis in the built circuit.
    pub counted: u64,
    /// Exact count predicted for the construction.
    pub exact: u64,
    /// Inputs or outcome records simulated.
    pub cases: u64,
    pub behavior_ok: bool,
}

impl CheckRow {
    pub fn pass(&self) -> bool {
        self.behavior_ok && self.counted == self.exact && self.counted <= self.bound
    }
}

fn reg(c: &Circuit, name: &str) -> Result<Vec<Qubit>> {
    Ok(c.reg(name)?.qubits.clone())
}

/// Basis-state outputs of every branch, or `None` if a branch is not a
/// basis state.
fn classical_outputs(c: &Circuit, input: u128) -> Result<Option<Vec<u128>>> {
    let init = SparseState::basis(c.n_qubits, input)?;
    let mut outs = Vec::new();
    for b in run(c, init, &RunOptions::default())? {
        let terms = b.state.terms();
        if terms.len() != 1 {
            return Ok(None);
        }
        outs.push(terms[0].0);
    }
    Ok(Some(outs))
}

fn classical_ok(c: &Circuit, input: u128, expected: impl Fn(u128) -> bool) -> Result<bool> {
    Ok(classical_outputs(c, input)?.is_some_and(|o| o.iter().all(|&x| expected(x))))
}

fn random_table(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Vec<u64> {
    (0..d).map(|_| rng.gen_range(0..1u64 << m)).collect()
}

fn lookup_bounds(d: usize, m: usize, k: usize, mode: QroamMode) -> Result<(u64, u64)> {
    let cfg = QroamConfig {
        d: d as u64,
        m_bits: m as u64,
        k_compute: k as u64,
        k_uncompute: k as u64,
        mode,
        dirty_budget: Some(u64::MAX),
    };
    let c = qroam_cost(&cfg)?;
    Ok((c.compute, c.uncompute))
}

/// Uniform superposition over addresses `< d` with distinct phases.
fn superposed(n: usize, ctrl: &[Qubit], addr: &[Qubit], d: usize, fixed: u128) -> Result<SparseState> {
    let amp = 1.0 / (d as f64).sqrt();
    SparseState::from_terms(
        n,
        (0..d).map(|x| (encode(&[(ctrl, 1), (addr, x as u128)]) | fixed, C64::from_polar(amp, 0.7 * x as f64))),
    )
}

pub fn run_check(check: Check, seed: u64) -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let row = |bound, counted: usize, exact, cases, ok| CheckRow {
        check: check.to_string(),
        bound,
        counted: counted as u64,
        exact,
        cases,
        behavior_ok: ok,
    };
    match check {
        Check::Adder { n } => {
            let c = build_adder(n, false)?;
            let (i, t, carry) = (reg(&c, "i")?, reg(&c, "t")?, reg(&c, "carry")?);
            let mut ok = true;
            for x in 0..1u128 << n {
                for y in 0..1u128 << n {
                    let s = x + y;
                    let want = encode(&[(&i, x), (&t, s & ((1 << n) - 1)), (&carry, s >> n)]);
                    ok &= classical_ok(&c, encode(&[(&i, x), (&t, y)]), |o| o == want)?;
                }
            }
            let bound = arithmetic_cost(ArithKind::AddCarry, n as u32, OperandKind::Variable, 0);
            Ok(row(bound, c.toffoli_count(), exact::adder(n as u64, false), 1 << (2 * n), ok))
        }
        Check::Subtractor { n } => {
            let c = build_subtractor(n)?;
            let (i, t) = (reg(&c, "i")?, reg(&c, "t")?);
            let mut ok = true;
            for x in 0..1u128 << n {
                for y in 0..1u128 << n {
                    let want = encode(&[(&i, x), (&t, y.wrapping_sub(x) & ((1 << n) - 1))]);
                    ok &= classical_ok(&c, encode(&[(&i, x), (&t, y)]), |o| o == want)?;
                }
            }
            let bound = arithmetic_cost(ArithKind::Subtract, n as u32, OperandKind::Variable, 0);
            Ok(row(bound, c.toffoli_count(), exact::subtractor(n as u64), 1 << (2 * n), ok))
        }
        Check::Inequality { n } => {
            let c = build_inequality(n, Operand::Variable)?;
            let (t, i, flag) = (reg(&c, "t")?, reg(&c, "i")?, reg(&c, "flag")?);
            let mut ok = true;
            for x in 0..1u128 << n {
                for y in 0..1u128 << n {
                    let input = encode(&[(&t, x), (&i, y)]);
                    let want = input | encode(&[(&flag, (x < y) as u128)]);
                    ok &= classical_ok(&c, input, |o| o == want)?;
                }
            }
            let bound = arithmetic_cost(ArithKind::Inequality, n as u32, OperandKind::Variable, 0);
            Ok(row(bound, c.toffoli_count(), exact::inequality_variable(n as u64), 1 << (2 * n), ok))
        }
        Check::InequalityConst { n } => {
            let (mut bound, mut counted, mut ex, mut ok) = (0, 0, 0, true);
            for k in 1..1u64 << n {
                let c = build_inequality(n, Operand::Constant(k))?;
                let (t, flag) = (reg(&c, "t")?, reg(&c, "flag")?);
                for x in 0..1u128 << n {
                    let input = encode(&[(&t, x)]);
                    let want = input | encode(&[(&flag, (x < k as u128) as u128)]);
                    ok &= classical_ok(&c, input, |o| o == want)?;
                }
                bound += constant_inequality_cost(n as u32, k);
                counted += c.toffoli_count();
                ex += exact::inequality_constant(n as u64, k);
            }
            let cases = ((1u64 << n) - 1) << n;
            Ok(row(bound, counted, ex, cases, ok))
        }
        Check::Unary { d } => {
            let c = build_unary_iteration(d)?;
            let (ctrl, addr, onehot) = (reg(&c, "ctrl")?, reg(&c, "addr")?, reg(&c, "onehot")?);
            let mut ok = true;
            for x in 0..d as u128 {
                let input = encode(&[(&ctrl, 1), (&addr, x)]);
                ok &= classical_ok(&c, input, |o| o == input | encode(&[(&onehot, 1 << x)]))?;
                let off = encode(&[(&addr, x)]);
                ok &= classical_ok(&c, off, |o| o == off)?;
            }
            Ok(row(qrom_cost(d as u64), c.toffoli_count(), exact::unary_iteration(d as u64), 2 * d as u64, ok))
        }
        Check::Qrom { d, m } => {
            let table = random_table(&mut rng, d, m);
            let c = build_qrom(&table, m)?;
            let (ctrl, addr, out) = (reg(&c, "ctrl")?, reg(&c, "addr")?, reg(&c, "out")?);
            let mut ok = true;
            for x in 0..d {
                let input = encode(&[(&ctrl, 1), (&addr, x as u128)]);
                ok &= classical_ok(&c, input, |o| o == input | encode(&[(&out, table[x] as u128)]))?;
            }
            Ok(row(qrom_cost(d as u64), c.toffoli_count(), exact::qrom(d as u64), d as u64, ok))
        }
        Check::QroamClean { d, m, k } => {
            let table = random_table(&mut rng, d, m);
            let c = build_qroam_clean(&table, m, k, Garbage::Keep)?;
            let (ctrl, addr, out) = (reg(&c, "ctrl")?, reg(&c, "addr")?, reg(&c, "out")?);
            let mut ok = true;
            for x in 0..d {
                let input = encode(&[(&ctrl, 1), (&addr, x as u128)]);
                ok &= classical_ok(&c, input, |o| decode(o, &out) == table[x] as u128 && decode(o, &addr) == x as u128)?;
            }
            let bound = lookup_bounds(d, m, k, QroamMode::Clean)?.0;
            Ok(row(bound, c.toffoli_count(), exact::qroam_clean(d as u64, m as u64, k as u64), d as u64, ok))
        }
        Check::QroamDirty { d, m, k } => {
            let table = random_table(&mut rng, d, m);
            let c = build_qroam_dirty(&table, m, k)?;
            let (ctrl, addr, out, dirty) = (reg(&c, "ctrl")?, reg(&c, "addr")?, reg(&c, "out")?, reg(&c, "dirty")?);
            let mut ok = true;
            let mut cases = 0;
            for x in 0..d {
                for _ in 0..4 {
                    let junk = if dirty.is_empty() { 0 } else { rng.gen_range(0..1u128 << dirty.len()) };
                    let input = encode(&[(&ctrl, 1), (&addr, x as u128), (&dirty, junk)]);
                    ok &= classical_ok(&c, input, |o| o == input | encode(&[(&out, table[x] as u128)]))?;
                    cases += 1;
                }
            }
            let bound = lookup_bounds(d, m, k, QroamMode::Dirty)?.0;
            Ok(row(bound, c.toffoli_count(), exact::qroam_dirty(d as u64, m as u64, k as u64), cases, ok))
        }
        Check::RoundTrip { d, m, k, lookup, unlookup } => {
            let table = random_table(&mut rng, d, m);
            let c = build_lookup_round_trip(&table, m, k, k, lookup, unlookup)?;
            let (ctrl, addr, dirty) = (reg(&c, "ctrl")?, reg(&c, "addr")?, reg(&c, "dirty")?);
            let junk = if dirty.is_empty() { 0 } else { rng.gen_range(0..1u128 << dirty.len()) };
            let init = superposed(c.n_qubits, &ctrl, &addr, d, encode(&[(&dirty, junk)]))?;
            let finals = round_trip_outcomes(&c, &init, &mut rng)?;
            let ok = finals.iter().all(|s| fidelity(s, &init) > 1.0 - FIDELITY_TOL);
            let (du, mu, ku) = (d as u64, m as u64, k as u64);
            let (bc, ec) = match lookup {
                LookupMode::Clean => (lookup_bounds(d, m, k, QroamMode::Clean)?.0, exact::qroam_clean(du, mu, ku)),
                LookupMode::Dirty => (lookup_bounds(d, m, k, QroamMode::Dirty)?.0, exact::qroam_dirty(du, mu, ku)),
            };
            let (bu, eu) = match unlookup {
                UnlookupMode::Clean => (lookup_bounds(d, m, k, QroamMode::Clean)?.1, exact::unlookup_clean(du, ku)),
                UnlookupMode::Dirty => (lookup_bounds(d, m, k, QroamMode::Dirty)?.1, exact::unlookup_dirty(du, ku)),
                UnlookupMode::Halved => (lookup_bounds(d, m, 2, QroamMode::Clean)?.1, exact::unlookup_halved(du)),
            };
            Ok(row(bc + bu, c.toffoli_count(), ec + eu, finals.len() as u64, ok))
        }
        Check::Erasure { k } => {
            let c = build_unary_erasure(k)?;
            let (sel, onehot) = (reg(&c, "sel")?, reg(&c, "onehot")?);
            let mut ok = true;
            for j in 0..k as u128 {
                let want = encode(&[(&sel, j)]);
                ok &= classical_ok(&c, encode(&[(&sel, j), (&onehot, 1 << j)]), |o| o == want)?;
            }
            Ok(row(0, c.toffoli_count(), 0, k as u64, ok))
        }
        Check::Index { n } => {
            if !(1..=6).contains(&n) {
                return Err(Error::Limit(format!("index check supports 1 to 6 orbital bits, got {n}")));
            }
            let n_spin = 1u64 << (n + 1);
            let rank = 3;
            let plan = index_plan(n_spin, rank, &binary_schedule(triangle(n_spin)), &[])?;
            let c = build_contiguous_index(&plan)?;
            let (p, q, l, s) = (reg(&c, "p")?, reg(&c, "q")?, reg(&c, "l")?, reg(&c, "s")?);
            let big_c = triangle(n_spin) as u128;
            let mut ok = true;
            let mut cases = 0;
            for pv in 0..n_spin as u128 / 2 {
                for qv in 0..=pv {
                    for lv in 0..=rank as u128 {
                        let input = encode(&[(&p, pv), (&q, qv), (&l, lv)]);
                        let want = input | encode(&[(&s, lv * big_c + pv * (pv + 1) / 2 + qv)]);
                        ok &= classical_ok(&c, input, |o| o == want)?;
                        cases += 1;
                    }
                }
            }
            Ok(row(plan.toffoli, c.toffoli_count(), plan.toffoli, cases, ok))
        }
    }
}

/// Final states over measurement outcomes: every branch for at most
/// [`EXHAUSTIVE_MEASUREMENTS`] measurements, otherwise the all-zero and
/// all-one records, every single-one record and 32 random ones.
fn round_trip_outcomes(c: &Circuit, init: &SparseState, rng: &mut ChaCha8Rng) -> Result<Vec<SparseState>> {
    let b = c.n_measurements;
    if b <= EXHAUSTIVE_MEASUREMENTS {
        return Ok(run(c, init.clone(), &RunOptions::default())?.into_iter().map(|br| br.state).collect());
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
    records.into_iter().map(|r| Ok(run_postselected(c, init.clone(), &r)?.0)).collect()
}

fn block_sizes(d: usize) -> impl Iterator<Item = usize> {
    (1..=ceil_log2(d as u64)).map(|e| 1usize << e)
}

/// The full default grid, in a fixed order.
pub fn default_grid() -> Vec<Check> {
    let mut g = Vec::new();
    for n in 1..=4 {
        g.extend([Check::Adder { n }, Check::Subtractor { n }, Check::Inequality { n }, Check::InequalityConst { n }]);
    }
    g.extend((1..=8).map(|d| Check::Unary { d }));
    for d in 2..=8 {
        for m in 1..=3 {
            g.push(Check::Qrom { d, m });
            for k in block_sizes(d) {
                g.push(Check::QroamClean { d, m, k });
                g.push(Check::QroamDirty { d, m, k });
            }
        }
    }
    let modes = [
        (LookupMode::Clean, UnlookupMode::Clean),
        (LookupMode::Clean, UnlookupMode::Halved),
        (LookupMode::Dirty, UnlookupMode::Dirty),
        (LookupMode::Dirty, UnlookupMode::Clean),
    ];
    for d in 2..=8 {
        for m in 1..=3 {
            for k in block_sizes(d) {
                for (lookup, unlookup) in modes {
                    g.push(Check::RoundTrip { d, m, k, lookup, unlookup });
                }
            }
        }
    }
    g.extend([2, 4, 8].map(|k| Check::Erasure { k }));
    g.extend((2..=5).map(|n| Check::Index { n }));
    g
}

/// Runs `checks` with per-check seeds derived from `seed`.
pub fn run_grid(checks: &[Check], seed: u64) -> Result<Vec<CheckRow>> {
    checks.iter().enumerate().map(|(i, &c)| run_check(c, seed.wrapping_add(i as u64))).collect()
}
