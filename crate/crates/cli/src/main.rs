mod analyze;
mod config;
mod data;
mod eval;
mod gen;
mod opts;
mod sweep;
mod table;
mod train;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            msg: msg.into(),
        }
    }
}

impl From<botnet_gnn::Error> for CliError {
    fn from(e: botnet_gnn::Error) -> Self {
        use botnet_gnn::Error as E;
        let code = match e {
            E::Input(_) | E::Config(_) => EXIT_CONFIG,
            E::Io { .. } | E::Parse { .. } => EXIT_IO,
            E::Numerical(_) => EXIT_NUMERICAL,
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Synthetic botnet overlays and a topology-only GNN detector.
#[derive(Parser, Debug)]
#[command(name = "botgnn", version, args_override_self = true)]
struct Cli {
    /// key=value file of flags for the subcommand; explicit flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a dataset of labeled overlay graphs.
    Gen(gen::GenArgs),
    /// Train the GNN (or the LR baseline) on a dataset.
    Train(train::TrainArgs),
    /// Evaluate a trained model on a dataset split.
    Eval(eval::EvalArgs),
    /// Per-node bot probabilities for one graph file.
    Predict(eval::PredictArgs),
    /// Second eigenvalue and average path length of topologies or a graph file.
    Analyze(analyze::AnalyzeArgs),
    /// Test F1 as a function of depth, over topologies and seeds.
    Sweep(sweep::SweepArgs),
}

fn run() -> CliResult {
    let args = config::expand_config_args(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            std::process::exit(code.into());
        }
    };
    match cli.command {
        Command::Gen(a) => gen::run(a),
        Command::Train(a) => train::run(a),
        Command::Eval(a) => eval::run(a),
        Command::Predict(a) => eval::run_predict(a),
        Command::Analyze(a) => analyze::run(a),
        Command::Sweep(a) => sweep::run(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
