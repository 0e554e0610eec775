mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

/// Resource estimates and verified circuit kernels for qubitized chemistry.
#[derive(Parser, Debug)]
#[command(name = "qubitize", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factorize the two-body tensor of an FCIDUMP file and report its 1-norms.
    Factorize(FactorizeArgs),
    /// Truncate the two-body tensor at a threshold and count what survives.
    Sparsify(SparsifyArgs),
    /// Toffoli and qubit budget for one walk variant.
    Estimate(EstimateArgs),
    /// Build, count and simulate circuit kernels.
    Verify(VerifyArgs),
    /// Recompute every published FeMoco cell and compare.
    ReproducePaper(ReproduceArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("cut").args(["rank", "cutoff"])))]
pub struct FactorizeArgs {
    /// FCIDUMP input.
    pub input: PathBuf,
    /// Keep the leading `L` eigenpairs.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Keep eigenpairs with eigenvalue above this value.
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Factorization JSON output.
    #[arg(long)]
    pub out: Option<String>,
    /// Lambda report output (`-` for stdout).
    #[arg(long, default_value = "-")]
    pub report: String,
    /// CSV of λ_W and reconstruction error against rank.
    #[arg(long)]
    pub scan: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SparsifyArgs {
    /// FCIDUMP input.
    pub input: PathBuf,
    /// Keep two-body entries with |V| at or above this value.
    #[arg(long)]
    pub threshold: f64,
    /// CSV of surviving representatives `p,q,r,s,value`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary output (`-` for stdout).
    #[arg(long, default_value = "-")]
    pub report: String,
    /// CSV of counts and λ against threshold.
    #[arg(long)]
    pub scan: Option<PathBuf>,
    /// Thresholds for `--scan`.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1])]
    pub thresholds: Vec<f64>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["paper", "params", "fcidump"])))]
#[command(group(ArgGroup::new("realloc").args(["reallocate_error", "no_reallocate_error"])))]
pub struct EstimateArgs {
    /// Published dataset from the fixtures (rwswt or llduc).
    #[arg(long)]
    pub paper: Option<String>,
    /// Dataset JSON with the same fields as a fixture dataset.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Derive the dataset from an FCIDUMP file.
    #[arg(long)]
    pub fcidump: Option<PathBuf>,
    /// lowrank-dirty, lowrank-clean or sparse.
    #[arg(long)]
    pub variant: commands::VariantArg,
    /// Spend the whole error budget on phase estimation.
    #[arg(long)]
    pub reallocate_error: bool,
    #[arg(long)]
    pub no_reallocate_error: bool,
    /// Report rule values without published adjustments.
    #[arg(long)]
    pub rule_values: bool,
    /// Target precision in Hartree.
    #[arg(long)]
    pub delta_e: Option<f64>,
    /// Factorization rank override.
    #[arg(long)]
    pub rank: Option<u64>,
    /// Sparse truncation threshold (with `--fcidump`).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Unique two-body count override for the sparse variant.
    #[arg(long)]
    pub unique_count: Option<u64>,
    #[arg(long)]
    pub k_compute: Option<u64>,
    #[arg(long)]
    pub k_uncompute: Option<u64>,
    /// Report output (`-` for stdout).
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Single kernel instead of the default grid.
    #[arg(long)]
    pub kernel: Option<commands::KernelArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit JSON rows instead of a table.
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Emit JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value = "-")]
    pub out: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Factorize(a) => commands::factorize(&a),
        Command::Sparsify(a) => commands::sparsify(&a),
        Command::Estimate(a) => commands::estimate(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::ReproducePaper(a) => commands::reproduce_paper(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
