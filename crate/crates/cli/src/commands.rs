use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::ValueEnum;
use serde::Serialize;

use qubitize::costing::fixtures::{Dataset, Fixtures};
use qubitize::costing::report::{estimate_variant, reproduce, two_significant, Comparison, EstimateOptions, Variant};
use qubitize::costing::CHEMICAL_ACCURACY;
use qubitize::factorization::{factorize as factorize_tensor, lambdas, rank_scan, reconstruction_error, unique_coefficient_count};
use qubitize::integrals::{load_fcidump, to_chemist_form, IntegralSet};
use qubitize::kernels::{LookupMode, UnlookupMode};
use qubitize::sparsity::{sparse_lambda, sparse_prepare_dimension, threshold_scan, truncate_tensor};
use qubitize::verify::{default_grid, run_check, run_grid, Check, CheckRow};

use crate::{EstimateArgs, FactorizeArgs, ReproduceArgs, SparsifyArgs, VerifyArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qubitize::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Core(qubitize::Error::Io(_)) => ExitCode::from(3),
            CliError::Core(_) => ExitCode::from(4),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => io.into(),
            other => CliError::Core(qubitize::Error::Invalid(format!("csv: {other:?}"))),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    LowrankDirty,
    LowrankClean,
    Sparse,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::LowrankDirty => Variant::LowrankDirty,
            VariantArg::LowrankClean => Variant::LowrankClean,
            VariantArg::Sparse => Variant::Sparse,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KernelArg {
    Adder,
    Subtractor,
    Inequality,
    InequalityConst,
    Unary,
    Qrom,
    QroamClean,
    QroamDirty,
    RoundTripClean,
    RoundTripHalved,
    RoundTripDirty,
    Erasure,
    Index,
}

/// Writes to a file, or to stdout for `-`.
fn emit(out: &str, text: &str) -> Result<()> {
    if out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
    } else {
        std::fs::write(out, text)?;
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn load_integrals(path: &Path) -> Result<IntegralSet> {
    let raw = load_fcidump(BufReader::new(File::open(path)?))?;
    Ok(to_chemist_form(&raw)?)
}

#[derive(Serialize)]
struct FactorizeReport {
    n_spin_orbitals: usize,
    rank: usize,
    full_rank: bool,
    lambda_t: f64,
    lambda_v: f64,
    lambda_w: f64,
    lambda_total: f64,
    reconstruction_error: f64,
    /// Lookup entries for the rank, including the one-body block.
    lookup_entries: u64,
}

pub fn factorize(a: &FactorizeArgs) -> Result<ExitCode> {
    let iset = load_integrals(&a.input)?;
    let full = factorize_tensor(&iset)?;
    let fac = match (a.rank, a.cutoff) {
        (Some(l), _) => full.truncate(l)?,
        (None, Some(c)) => full.truncate(full.rank_for_threshold(c))?,
        (None, None) => full.clone(),
    };
    if let Some(path) = &a.scan {
        let mut w = csv::Writer::from_path(path)?;
        for row in rank_scan(&iset, &full)? {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    if let Some(out) = &a.out {
        emit(out, &(fac.to_json()? + "\n"))?;
    }
    let lam = lambdas(&iset, &fac);
    let n_spin = iset.n_spin_orbitals();
    let report = FactorizeReport {
        n_spin_orbitals: n_spin,
        rank: fac.rank(),
        full_rank: fac.full_rank,
        lambda_t: lam.lambda_t,
        lambda_v: lam.lambda_v,
        lambda_w: lam.lambda_w,
        lambda_total: lam.lambda_total,
        reconstruction_error: reconstruction_error(&iset, &fac),
        lookup_entries: unique_coefficient_count(fac.rank() as u64, n_spin as u64, true)?,
    };
    emit(&a.report, &json(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SparsifyReport {
    threshold: f64,
    unique_count: usize,
    nonzero_full: usize,
    lambda: f64,
    /// Lookup entries: unique two-body plus one-body representatives.
    lookup_entries: u64,
}

pub fn sparsify(a: &SparsifyArgs) -> Result<ExitCode> {
    if !(a.threshold >= 0.0) {
        return Err(CliError::Usage(format!("threshold must be nonnegative, got {}", a.threshold)));
    }
    let iset = load_integrals(&a.input)?;
    let sc = truncate_tensor(&iset, a.threshold)?;
    if let Some(path) = &a.csv {
        sc.write_csv(File::create(path)?)?;
    }
    if let Some(path) = &a.scan {
        let mut w = csv::Writer::from_path(path)?;
        for row in threshold_scan(&iset, &a.thresholds)? {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    let report = SparsifyReport {
        threshold: a.threshold,
        unique_count: sc.unique_count,
        nonzero_full: sc.nonzero_full,
        lambda: sparse_lambda(&sc, &iset),
        lookup_entries: sparse_prepare_dimension(sc.unique_count as u64, iset.n_spin_orbitals() as u64),
    };
    emit(&a.report, &json(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

/// Dataset built from integrals: full-rank factorization unless `rank`
/// is given, and a sparse truncation when `threshold` is given.
fn dataset_from_fcidump(path: &Path, rank: Option<u64>, threshold: Option<f64>) -> Result<Dataset> {
    let iset = load_integrals(path)?;
    let full = factorize_tensor(&iset)?;
    let fac = match rank {
        Some(l) => full.truncate(l as usize)?,
        None => full,
    };
    let lam = lambdas(&iset, &fac);
    let sparse = threshold.map(|c| truncate_tensor(&iset, c)).transpose()?;
    Ok(Dataset {
        name: path.file_stem().map_or("fcidump".into(), |s| s.to_string_lossy().into_owned()),
        n_spin: iset.n_spin_orbitals() as u64,
        rank: Some(fac.rank() as u64),
        lambda_lowrank: Some(lam.lambda_total),
        lambda_sparse: sparse.as_ref().map(|sc| sparse_lambda(sc, &iset)),
        sparse_threshold: threshold,
        unique_count: sparse.as_ref().map(|sc| sc.unique_count as u64),
        nonzero_count: sparse.as_ref().map(|sc| sc.nonzero_full as u64),
        index_schedule: None,
        index_width_pins: vec![],
        lowrank_superposition: None,
        sparse_superposition: None,
        variants: Default::default(),
        published: vec![],
        adjustments: vec![],
    })
}

pub fn estimate(a: &EstimateArgs) -> Result<ExitCode> {
    if a.threshold.is_some() && a.fcidump.is_none() {
        return Err(CliError::Usage("--threshold needs --fcidump".into()));
    }
    let (mut ds, fixture_delta) = if let Some(name) = &a.paper {
        let f = Fixtures::from_env()?;
        (f.dataset(name)?.clone(), f.delta_e)
    } else if let Some(path) = &a.params {
        let ds: Dataset = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        (ds, CHEMICAL_ACCURACY)
    } else {
        let path = a.fcidump.as_ref().expect("source group is required");
        (dataset_from_fcidump(path, a.rank, a.threshold)?, CHEMICAL_ACCURACY)
    };
    if let Some(l) = a.rank {
        ds.rank = Some(l);
    }
    if let Some(u) = a.unique_count {
        ds.unique_count = Some(u);
    }
    let variant = Variant::from(a.variant);
    let choice = match variant {
        Variant::LowrankDirty => &mut ds.variants.lowrank_dirty,
        Variant::LowrankClean => &mut ds.variants.lowrank_clean,
        Variant::Sparse => &mut ds.variants.sparse,
    };
    if a.k_compute.is_some() {
        choice.k_compute = a.k_compute;
    }
    if a.k_uncompute.is_some() {
        choice.k_uncompute = a.k_uncompute;
    }
    let reallocate_error = match (a.reallocate_error, a.no_reallocate_error) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    };
    let opts = EstimateOptions { reallocate_error, published_adjustments: !a.rule_values };
    let report = estimate_variant(&ds, a.delta_e.unwrap_or(fixture_delta), variant, opts)?;
    emit(&a.out, &json(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn single_check(a: &VerifyArgs, kernel: KernelArg) -> Result<Check> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("--kernel {kernel:?} needs --{flag}")));
    let (m, k) = (a.m, a.k);
    let round_trip = |lookup, unlookup| -> Result<Check> { Ok(Check::RoundTrip { d: need(a.d, "d")?, m, k, lookup, unlookup }) };
    Ok(match kernel {
        KernelArg::Adder => Check::Adder { n: need(a.n, "n")? },
        KernelArg::Subtractor => Check::Subtractor { n: need(a.n, "n")? },
        KernelArg::Inequality => Check::Inequality { n: need(a.n, "n")? },
        KernelArg::InequalityConst => Check::InequalityConst { n: need(a.n, "n")? },
        KernelArg::Unary => Check::Unary { d: need(a.d, "d")? },
        KernelArg::Qrom => Check::Qrom { d: need(a.d, "d")?, m },
        KernelArg::QroamClean => Check::QroamClean { d: need(a.d, "d")?, m, k },
        KernelArg::QroamDirty => Check::QroamDirty { d: need(a.d, "d")?, m, k },
        KernelArg::RoundTripClean => round_trip(LookupMode::Clean, UnlookupMode::Clean)?,
        KernelArg::RoundTripHalved => round_trip(LookupMode::Clean, UnlookupMode::Halved)?,
        KernelArg::RoundTripDirty => round_trip(LookupMode::Dirty, UnlookupMode::Dirty)?,
        KernelArg::Erasure => Check::Erasure { k },
        KernelArg::Index => Check::Index { n: need(a.n, "n")? },
    })
}

/// Exhaustive arithmetic checks are capped to keep `2^(2n)` simulations small.
const MAX_ARITH_BITS: usize = 8;
const MAX_TABLE: usize = 64;

fn check_limits(check: &Check) -> Result<()> {
    let too_big = match *check {
        Check::Adder { n } | Check::Subtractor { n } | Check::Inequality { n } | Check::InequalityConst { n } => {
            n == 0 || n > MAX_ARITH_BITS
        }
        Check::Unary { d } | Check::Qrom { d, .. } | Check::QroamClean { d, .. } | Check::QroamDirty { d, .. } | Check::RoundTrip { d, .. } => {
            d == 0 || d > MAX_TABLE
        }
        Check::Erasure { k } => k > MAX_TABLE,
        Check::Index { .. } => false,
    };
    if too_big {
        return Err(CliError::Core(qubitize::Error::Limit(format!("{check} is outside the simulable range"))));
    }
    Ok(())
}

fn check_table(rows: &[CheckRow]) -> String {
    let mut s = format!("{:<40} {:>7} {:>8} {:>7} {:>7}  result\n", "check", "bound", "counted", "exact", "cases");
    for r in rows {
        let result = if r.pass() { "PASS" } else { "FAIL" };
        s += &format!("{:<40} {:>7} {:>8} {:>7} {:>7}  {result}\n", r.check, r.bound, r.counted, r.exact, r.cases);
    }
    let failed = rows.iter().filter(|r| !r.pass()).count();
    s += &format!("{} checks, {} failed\n", rows.len(), failed);
    s
}

pub fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let rows = match a.kernel {
        Some(kernel) => {
            let check = single_check(a, kernel)?;
            check_limits(&check)?;
            vec![run_check(check, a.seed)?]
        }
        None => run_grid(&default_grid(), a.seed)?,
    };
    let text = if a.json { json(&rows)? } else { check_table(&rows) };
    emit(&a.out, &text)?;
    Ok(if rows.iter().all(CheckRow::pass) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct CellSummary {
    dataset: String,
    variant: String,
    reallocate_error: bool,
    m: u32,
    mu: u32,
    per_step_toffoli: u64,
    published_per_step_toffoli: u64,
    total_toffoli: u64,
    published_total_toffoli: f64,
    qubits: u64,
    published_qubits: u64,
    adjustments: Vec<String>,
    pass: bool,
}

fn summarize(c: &Comparison) -> CellSummary {
    CellSummary {
        dataset: c.dataset.clone(),
        variant: c.cell.variant.clone(),
        reallocate_error: c.cell.reallocate_error,
        m: c.report.m,
        mu: c.report.mu,
        per_step_toffoli: c.report.per_step_toffoli,
        published_per_step_toffoli: c.cell.per_step_toffoli,
        total_toffoli: c.report.total_toffoli,
        published_total_toffoli: c.cell.total_toffoli,
        qubits: c.report.qubit_total,
        published_qubits: c.cell.qubits,
        adjustments: c.report.adjustments.iter().map(|a| a.line.clone()).collect(),
        pass: c.pass(),
    }
}

pub fn reproduce_paper(a: &ReproduceArgs) -> Result<ExitCode> {
    let f = Fixtures::from_env()?;
    let cells = reproduce(&f.datasets, f.delta_e)?;
    let rows: Vec<CellSummary> = cells.iter().map(summarize).collect();
    let text = if a.json {
        json(&rows)?
    } else {
        let mut s = format!(
            "{:<7} {:<14} {:<7} {:>3} {:>3} {:>9} {:>9} {:>9} {:>9} {:>6} {:>9}  result\n",
            "dataset", "variant", "realloc", "m", "mu", "per_step", "step_pub", "total", "total_pub", "qubits", "qubit_pub"
        );
        for r in &rows {
            s += &format!(
                "{:<7} {:<14} {:<7} {:>3} {:>3} {:>9} {:>9} {:>9.1e} {:>9.1e} {:>6} {:>9}  {}\n",
                r.dataset,
                r.variant,
                r.reallocate_error,
                r.m,
                r.mu,
                r.per_step_toffoli,
                r.published_per_step_toffoli,
                two_significant(r.total_toffoli as f64),
                r.published_total_toffoli,
                r.qubits,
                r.published_qubits,
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        let failed = rows.iter().filter(|r| !r.pass).count();
        s += &format!("{} cells, {} failed\n", rows.len(), failed);
        s
    };
    emit(&a.out, &text)?;
    Ok(if cells.iter().all(Comparison::pass) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
