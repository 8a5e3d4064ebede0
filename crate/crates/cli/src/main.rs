//! dtdd: interference, SINR and coverage sweeps for dynamic-TDD hexagonal
//! networks, with analytic-vs-oracle validation.
//!
//! Exit codes: 0 success, 1 configuration error, 2 validation failure,
//! 3 numeric non-convergence.

// Domain guards use the negated form `!(v > 0.0)` on purpose: it rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod preset;
mod scenario;
mod sweep;
mod validate;

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Validation(String),
    NonConvergence(String),
}

impl CliError {
    pub fn config(msg: impl std::fmt::Display) -> Self {
        CliError::Config(msg.to_string())
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Validation(m) | CliError::NonConvergence(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dtdd",
    version,
    about = "Dynamic-TDD interference-to-signal ratios, SINR and coverage on hexagonal networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the oracle seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the oracle lattice truncation radius (absolute units).
    #[arg(long, global = true)]
    oracle_radius: Option<f64>,
    /// Override the Monte-Carlo draw count.
    #[arg(long, global = true)]
    mc_draws: Option<usize>,
    /// Override the series block cap.
    #[arg(long, global = true)]
    h_max: Option<usize>,
    /// Output format (only csv is supported).
    #[arg(long, global = true, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the quantities of a scenario file over its grids.
    Sweep {
        scenario: PathBuf,
        /// Output CSV path (overrides the scenario's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare every closed form of a scenario against its oracle.
    Validate {
        scenario: PathBuf,
        /// Report CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the single-shell DL→UL constant instead of the six-fold one;
        /// the report then shows the oracle rejecting it.
        #[arg(long, hide = true)]
        debug_paper_a2: bool,
    },
    /// Run a built-in sweep: fig2, fig3, fig5 or coverage.
    Preset {
        name: String,
        /// Output CSV path (overrides the preset default).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => {
                eprintln!("{e}");
                std::process::exit(1);
            }
        },
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.format != "csv" {
        return Err(CliError::config(format!(
            "unsupported format '{}'; only csv is available",
            cli.format
        )));
    }
    match &cli.command {
        Command::Sweep { scenario, out } => {
            let mut sc = scenario::load(scenario)?;
            apply_overrides(&mut sc, &cli);
            let rows = sweep::run_sweep(&sc)?;
            let path = output_path(out.as_deref(), sc.output.as_deref(), "sweep.csv");
            scenario::write_rows(&path, &rows)?;
            println!("{} rows -> {}", rows.len(), path.display());
            Ok(())
        }
        Command::Validate {
            scenario,
            out,
            debug_paper_a2,
        } => {
            let mut sc = scenario::load(scenario)?;
            apply_overrides(&mut sc, &cli);
            let report = validate::run_validate(&sc, *debug_paper_a2)?;
            let path = output_path(out.as_deref(), sc.output.as_deref(), "validate.csv");
            report.write_csv(&path)?;
            print!("{}", report.summary());
            println!("report -> {}", path.display());
            if report.all_pass() {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "validation failed; worst rel_err = {:.3e}",
                    report.worst_rel_err()
                )))
            }
        }
        Command::Preset { name, out } => {
            let mut sc = preset::by_name(name)?;
            apply_overrides(&mut sc, &cli);
            let rows = sweep::run_sweep(&sc)?;
            let default_name = format!("{name}.csv");
            let path = output_path(out.as_deref(), sc.output.as_deref(), &default_name);
            scenario::write_rows(&path, &rows)?;
            println!("{} rows -> {}", rows.len(), path.display());
            Ok(())
        }
    }
}

fn apply_overrides(sc: &mut scenario::Scenario, cli: &Cli) {
    if let Some(oc) = sc.oracle.as_mut() {
        if let Some(seed) = cli.seed {
            oc.seed = seed;
        }
        if let Some(radius) = cli.oracle_radius {
            oc.lattice_max_norm = radius;
        }
        if let Some(draws) = cli.mc_draws {
            oc.mc_draws = draws;
        }
    }
    if let Some(h_max) = cli.h_max {
        sc.series.h_max = h_max;
    }
}

fn output_path(flag: Option<&Path>, scenario: Option<&str>, fallback: &str) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| scenario.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(fallback))
}
