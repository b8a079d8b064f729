use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Fit, sample and check reverse-major-index ranking models.
#[derive(Parser, Debug)]
#[command(name = "rmj", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a choice log from a model.
    Generate(GenerateArgs),
    /// Estimate a model (or a mixture) from a choice log.
    Fit(FitArgs),
    /// Log-likelihood of a choice log under a model.
    Eval(EvalArgs),
    /// Compare every closed form against brute-force enumeration.
    Verify(VerifyArgs),
    /// Reproduce the pairwise-aggregation counterexample for Mallows data.
    DemoInconsistency(DemoArgs),
    /// Convert sushi-survey ranking rows into a choice log.
    ConvertSushi(SushiArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Model file; otherwise a single model from --n, --q and --center.
    #[arg(long, conflicts_with_all = ["n", "q", "center"])]
    model: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    q: Option<f64>,
    /// Comma-separated centre, most preferred first (default: identity).
    #[arg(long, value_delimiter = ',')]
    center: Option<Vec<usize>>,
    /// Number of records.
    #[arg(long)]
    t: usize,
    /// full, all-pairs, all-subsets-ge:M or list:PATH
    #[arg(long, default_value = "full")]
    policy: String,
    /// Response length.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    seed: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Choice log to fit.
    #[arg(long)]
    log: PathBuf,
    /// Number of mixture components.
    #[arg(long, default_value_t = 1)]
    mixture: usize,
    #[arg(long)]
    seed: u64,
    /// Largest n solved exactly.
    #[arg(long, default_value_t = rmj::estimation::DEFAULT_EXACT_CAP)]
    exact_cap: usize,
    /// Restarts of the heuristic centre solver.
    #[arg(long, default_value_t = rmj::estimation::DEFAULT_RESTARTS)]
    solver_restarts: usize,
    /// EM restarts (mixtures only).
    #[arg(long, default_value_t = 20)]
    em_restarts: usize,
    /// EM iteration cap (mixtures only).
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    /// Where to write the fitted model.
    #[arg(long)]
    out: PathBuf,
    /// Where to write the JSON report (default: stdout).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    log: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,0.9")]
    q_grid: Vec<f64>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct DemoArgs {
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    q: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SushiArgs {
    /// Sushi ranking file (`N 1` header, then `0 L i1 .. iL` rows).
    #[arg(long)]
    input: PathBuf,
    /// Response length taken from the top of each ranking.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    VerificationFailed,
}

pub fn open(path: &Path) -> rmj::Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| rmj::Error::Io(format!("{}: {e}", path.display())))
}

pub fn create(path: Option<&Path>) -> rmj::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| rmj::Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Fit(a) => commands::fit(a),
        Command::Eval(a) => commands::eval(a),
        Command::Verify(a) => commands::verify(a),
        Command::DemoInconsistency(a) => commands::demo(a),
        Command::ConvertSushi(a) => commands::convert_sushi(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
