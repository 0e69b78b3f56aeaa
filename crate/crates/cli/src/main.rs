mod commands;
mod memory;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coium::{BoundsMode, DensityProfile, KulcMode};

#[global_allocator]
static ALLOC: memory::CountingAlloc = memory::CountingAlloc;

/// Mine correlated high-utility itemsets from SPMF utility databases.
#[derive(Parser)]
#[command(name = "coium", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine a database and print the patterns.
    Mine(MineArgs),
    /// Compare the miner against exhaustive enumeration.
    Verify(VerifyArgs),
    /// Time the miner over a grid of thresholds and bounds modes.
    Bench(BenchArgs),
    /// Write a synthetic database.
    Gen(GenArgs),
}

#[derive(Args)]
struct Thresholds {
    #[arg(long)]
    input: PathBuf,
    /// Fraction of total utility, or an absolute amount with --absolute.
    #[arg(long, allow_negative_numbers = true)]
    min_util: f64,
    #[arg(long, allow_negative_numbers = true)]
    min_cor: f64,
    /// Read --min-util as an absolute utility.
    #[arg(long)]
    absolute: bool,
}

#[derive(Args)]
pub struct MineArgs {
    #[command(flatten)]
    t: Thresholds,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write run statistics as key=value lines.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, default_value_t = KulcMode::Prune)]
    kulc_mode: KulcMode,
    #[arg(long, default_value_t = BoundsMode::LuSu)]
    bounds: BoundsMode,
    #[arg(long)]
    max_len: Option<usize>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    t: Thresholds,
    /// Refuse when the lattice exceeds 2^N - 1 itemsets.
    #[arg(long, default_value_t = 20)]
    max_items: usize,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long, default_value_t = KulcMode::Prune)]
    kulc_mode: KulcMode,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    min_util_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    min_cor_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "lu-su,twu-only")]
    modes: Vec<BoundsMode>,
    #[arg(long, default_value_t = KulcMode::Prune)]
    kulc_mode: KulcMode,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    repeat: u32,
    /// Write one key=value line per row.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    trans: usize,
    #[arg(long)]
    items: usize,
    #[arg(long)]
    avg_len: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "dense", value_parser = parse_profile)]
    profile: DensityProfile,
    /// Largest utility of a single item occurrence.
    #[arg(long, default_value_t = 50)]
    max_item_utility: u64,
}

fn parse_profile(s: &str) -> Result<DensityProfile, String> {
    s.parse().map_err(|e: coium::synth::SynthError| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mine(a) => commands::mine(a),
        Command::Verify(a) => commands::verify(a),
        Command::Bench(a) => commands::bench(a),
        Command::Gen(a) => commands::gen(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
