use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Wigner-function witnesses of quantum non-Gaussianity.
#[derive(Parser, Debug)]
#[command(name = "wigwitness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the witness for one state, printing a JSON report.
    ///
    /// Exit code 0 means quantum non-Gaussian, 1 inconclusive, 2 error.
    Witness(WitnessArgs),
    /// Write the table behind a figure, or a custom sweep, as CSV.
    Sweep(SweepArgs),
    /// Run a brute-force cross-check campaign, printing a JSON report.
    Oracle(OracleArgs),
    /// Export states.
    State {
        #[command(subcommand)]
        action: StateAction,
    },
}

#[derive(Args, Debug, Clone)]
pub struct TolArgs {
    /// Truncation dimension (defaults to a per-state estimate).
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_norm: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_herm: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_trace: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_psd: f64,
    /// Probability allowed to leak past the truncation.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_truncation: f64,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    /// `fock:m`, `pac:alpha`, `pss:r` or `json:PATH` (a dumped state).
    pub state: String,
    /// Leading `loss:eps` stages prepare the state; the rest form the
    /// Gaussian map (`id`, `disp:re[,im]`, `sq:s`, `then(...)`, or
    /// `disp:auto` / `sq:auto` to optimize).
    pub stages: Vec<String>,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Figure tag (`fig2-left` ... `fig9`) or `custom`.
    pub target: String,
    /// Family for a custom sweep: fock, pac or pss.
    #[arg(long)]
    pub family: Option<String>,
    /// Parameter values, `start:stop:step` or `a,b,c`.
    #[arg(long, visible_aliases = ["r", "alpha", "m"])]
    pub values: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub criterion: u8,
    /// Map family for the second criterion: identity, displacement or squeezing.
    #[arg(long)]
    pub maps: Option<String>,
    /// Loss values; gives `Δ` rows instead of `ε_max` rows.
    #[arg(long)]
    pub eps: Option<String>,
    /// `ε` spacing for the figure curves.
    #[arg(long, default_value_t = 0.005)]
    pub eps_step: f64,
    /// Coarse `ε` grid of the `ε_max` search.
    #[arg(long, default_value_t = 1e-3)]
    pub eps_grid: f64,
    /// Bisection tolerance of the `ε_max` search.
    #[arg(long, default_value_t = 1e-6)]
    pub eps_tol: f64,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub campaign: Campaign,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Campaign {
    /// Random Gaussian-hull states must never violate the bound.
    Hull {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 4.0)]
        max_energy: f64,
        /// Random Gaussian maps per sample.
        #[arg(long, default_value_t = 10)]
        maps: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Also recompute this many samples in the Fock basis.
        #[arg(long, default_value_t = 0)]
        fock_check: usize,
    },
    /// Closed forms against Fock-basis numerics.
    ClosedForms {
        /// Points per formula.
        #[arg(long, default_value_t = 60)]
        points: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
enum StateAction {
    /// Print a state as `{dim, mat: [[re, im], ...]}` (row-major).
    Dump {
        /// `fock:m`, `pac:alpha` or `pss:r`.
        state: String,
        /// Loss applied before export.
        #[arg(long)]
        loss: Option<f64>,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("WIGWITNESS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("WIGWITNESS_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("WIGWITNESS_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

pub fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Witness(a) => commands::witness(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::State {
            action: StateAction::Dump { state, loss, tol, out },
        } => commands::dump(&state, loss, &tol, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
