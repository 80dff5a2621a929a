mod commands;
mod report;
mod table1;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::report::{Report, Status};

#[derive(Parser, Debug)]
#[command(name = "loopshort", version, about = "Finite-radius experiments on loop shortening, fellow traveling and almost convexity")]
struct Cli {
    /// Preset name or path to a presentation file.
    #[arg(long, global = true)]
    group: Option<String>,

    /// Write the JSON report here (it is always printed to stdout).
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    /// Write a CSV summary here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Ball index memory cap in bytes; accepts K, M and G suffixes.
    #[arg(long, global = true, env = "LOOPSHORT_MEMORY_BUDGET", value_parser = parse_bytes)]
    memory_budget: Option<usize>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    seed: u64,

    /// Cap on inner search steps; exceeding it is an error.
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Do not print the report to stdout.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sphere sizes of the ball B(radius).
    Ball(BallArgs),
    /// All geodesic words to the element a word represents.
    Geodesics(GeodesicsArgs),
    /// Falsification by fellow traveler property, up to a word length.
    CheckFftp(FftpArgs),
    /// Loop shortening property (free basepoint).
    CheckLsp(LspArgs),
    /// Basepoint loop shortening property.
    CheckBlsp(LspArgs),
    /// Almost convexity of B(N) with constant C.
    CheckAc(AcArgs),
    /// Quadratic filling certificate for one loop, or a sweep of all loops.
    Fill(FillArgs),
    /// Asynchronous to synchronous fellow traveling, one pair or a suite.
    Synchronize(SyncArgs),
    /// Construct a member of a witness family.
    Witness(WitnessArgs),
    /// HNN hypotheses (strip equidistance, totally geodesic subgroups) and
    /// pinch-driven shortening.
    HnnVerify(HnnArgs),
    /// Desk-scale slice of the examples table.
    Table1(Table1Args),
}

#[derive(Args, Debug, Serialize)]
pub struct BallArgs {
    #[arg(long)]
    pub radius: usize,
    /// List every element with its distance.
    #[arg(long)]
    pub elements: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct GeodesicsArgs {
    #[arg(long)]
    pub word: String,
    #[arg(long)]
    pub radius: usize,
    /// List at most this many geodesics.
    #[arg(long, default_value_t = 100)]
    pub limit: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FftpModeArg {
    AllWords,
    GeodesicPrefix,
}

#[derive(Args, Debug, Serialize)]
pub struct FftpArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub max_len: usize,
    #[arg(long, value_enum, default_value_t = FftpModeArg::AllWords)]
    pub mode: FftpModeArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopFamilyArg {
    All,
    /// gersten_loop(n) for n > k.
    GerstenLoop,
}

#[derive(Args, Debug, Serialize)]
pub struct LspArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub max_loop_len: usize,
    #[arg(long, value_enum, default_value_t = LoopFamilyArg::All)]
    pub family: LoopFamilyArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairFamilyArg {
    All,
    /// (alpha(n), beta(n)) with 3n - 1 <= N.
    StallingsAlphaBeta,
}

#[derive(Args, Debug, Serialize)]
pub struct AcArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long = "C")]
    pub c: usize,
    /// Only pairs on the sphere S(N).
    #[arg(long, alias = "sphere-only")]
    pub sphere: bool,
    #[arg(long, value_enum, default_value_t = PairFamilyArg::All)]
    pub family: PairFamilyArg,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("target").required(true).args(["word", "max_len"])))]
pub struct FillArgs {
    #[arg(long)]
    pub word: Option<String>,
    /// Certify every identity word up to this length.
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub k: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SyncArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, requires = "u", conflicts_with = "suite")]
    pub w: Option<String>,
    #[arg(long, requires = "w")]
    pub u: Option<String>,
    /// Comma-separated values phi(0), ..., phi(|w|); found by search if omitted.
    #[arg(long, requires = "w")]
    pub phi: Option<String>,
    /// Generate this many pairs from the seed instead.
    #[arg(long)]
    pub suite: Option<usize>,
    /// Longest generated loop.
    #[arg(long, default_value_t = 10)]
    pub max_len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessFamily {
    GerstenLoop,
    GerstenAsPrinted,
    StallingsAlpha,
    StallingsBeta,
    StallingsGamma,
    /// Minimal length of a Stallings word with the first length lemma's image.
    LemmaBb,
}

#[derive(Args, Debug, Serialize)]
pub struct WitnessArgs {
    #[arg(long, value_enum)]
    pub family: WitnessFamily,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// The letter z of the length lemma.
    #[arg(long, default_value_t = 'c')]
    pub z: char,
    /// Node expansions allowed for the length lemma search.
    #[arg(long, default_value_t = 2_000_000)]
    pub search_budget: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct HnnArgs {
    /// Base-ball radius for the hypotheses.
    #[arg(long)]
    pub radius: usize,
    /// Shorten this loop step by step to the empty word.
    #[arg(long)]
    pub shorten: Option<String>,
    /// Fellow traveler constant of the base group.
    #[arg(long, default_value_t = 2)]
    pub k_base: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct Table1Args {
    /// Largest constant tried for FFTP, BLSP and LSP.
    #[arg(long, default_value_t = 2)]
    pub max_k: usize,
    #[arg(long, default_value_t = 5)]
    pub fftp_len: usize,
    #[arg(long, default_value_t = 8)]
    pub loop_len: usize,
    /// Length bound for the gersten-loop family (default: long enough for
    /// gersten_loop(k + 1) at every k tried).
    #[arg(long)]
    pub family_loop_len: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub ac_radius: usize,
    /// Largest almost convexity constant tried.
    #[arg(long, default_value_t = 4)]
    pub ac_max_c: usize,
    /// Subset of bridson, wise, gersten, stallings.
    #[arg(long, value_delimiter = ',', default_value = "bridson,wise,gersten,stallings")]
    pub groups: Vec<String>,
}

fn parse_bytes(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let (num, mult) = match s.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&s[..s.len() - 1], 1usize << 10),
        Some('M') => (&s[..s.len() - 1], 1 << 20),
        Some('G') => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    let n: usize = num.trim().parse().map_err(|_| format!("not a byte count: {s:?}"))?;
    n.checked_mul(mult).ok_or_else(|| format!("byte count {s:?} overflows"))
}

fn main() -> ExitCode {
    // Usage errors exit 1 like every other error; 2 means counterexample.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            });
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let ctx = commands::Ctx::new(cli.memory_budget, cli.budget, cli.seed);
    let started = std::time::SystemTime::now();
    let clock = Instant::now();
    let (name, params, run) = match &cli.command {
        Command::Ball(a) => ("ball", report::params(a), commands::ball(&ctx, cli.group.as_deref(), a)),
        Command::Geodesics(a) => ("geodesics", report::params(a), commands::geodesics(&ctx, cli.group.as_deref(), a)),
        Command::CheckFftp(a) => ("check-fftp", report::params(a), commands::check_fftp(&ctx, cli.group.as_deref(), a)),
        Command::CheckLsp(a) => ("check-lsp", report::params(a), commands::check_lsp(&ctx, cli.group.as_deref(), a, false)),
        Command::CheckBlsp(a) => ("check-blsp", report::params(a), commands::check_lsp(&ctx, cli.group.as_deref(), a, true)),
        Command::CheckAc(a) => ("check-ac", report::params(a), commands::check_ac(&ctx, cli.group.as_deref(), a)),
        Command::Fill(a) => ("fill", report::params(a), commands::fill(&ctx, cli.group.as_deref(), a)),
        Command::Synchronize(a) => ("synchronize", report::params(a), commands::synchronize(&ctx, cli.group.as_deref(), a)),
        Command::Witness(a) => ("witness", report::params(a), commands::witness(&ctx, a)),
        Command::HnnVerify(a) => ("hnn-verify", report::params(a), commands::hnn_verify(&ctx, cli.group.as_deref(), a)),
        Command::Table1(a) => ("table1", report::params(a), table1::run(&ctx, a)),
    };
    let elapsed = clock.elapsed();
    let report = match run {
        Ok(r) => Report::new(name, params, &ctx, r, started, elapsed),
        Err(e) => {
            eprintln!("error: {e}");
            Report::error(name, cli.group.clone(), params, &ctx, &e.to_string(), started, elapsed)
        }
    };
    if let Err(e) = report.emit(!cli.quiet, cli.json.as_deref(), cli.csv.as_deref()) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(match report.outcome {
        Status::Ok | Status::HoldsUpToBound => 0,
        Status::Counterexample => 2,
        Status::Error => 1,
    })
}
