use std::path::PathBuf;
use std::process::ExitCode;

use bohmpair_cli::{load_config, run_scenario, validate_config, ExitStatus, Overrides, Scenario};
use bohmpair_core::SpinStatistics;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Two-particle Bohmian trajectories through double slits.
#[derive(Parser)]
#[command(name = "bohmpair", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Narrow packets (hbar kx / m = 2e7 m/s): 25 nearly straight pairs.
    Fig3a(RunArgs),
    /// Spread packets (2e6 m/s): 25 pairs, some detected on the same side.
    Fig3b(RunArgs),
    /// Three symmetric pairs, which stay symmetric.
    Fig4a(RunArgs),
    /// Three asymmetric pairs; the first lower particle crosses the axis.
    Fig4b(RunArgs),
    /// Property checks of the two-double-slit reduction.
    FourSlitCheck(RunArgs),
    /// Born-distributed batch compared with |Psi(t)|^2 at two times.
    Equivariance(RunArgs),
    /// Everything taken from the configuration file.
    Custom(RunArgs),
    /// Check a configuration file and print it fully resolved.
    Validate {
        path: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Statistics {
    Boson,
    Fermion,
}

impl From<Statistics> for SpinStatistics {
    fn from(s: Statistics) -> Self {
        match s {
            Statistics::Boson => SpinStatistics::Boson,
            Statistics::Fermion => SpinStatistics::Fermion,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    seed: Option<u64>,
    #[arg(long)]
    n_pairs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative and absolute integrator tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum)]
    statistics: Option<Statistics>,
}

fn run(scenario: Scenario, args: RunArgs) -> ExitStatus {
    let overrides = Overrides {
        scenario: Some(scenario),
        statistics: args.statistics.map(Into::into),
        seed: args.seed,
        n_pairs: args.n_pairs,
        output_dir: args.out,
        tolerance: args.tolerance,
    };
    let cfg = match load_config(args.config.as_deref(), &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::ConfigError;
        }
    };
    println!(
        "{}: {} pairs, {}, t_end = {:.4e} s",
        cfg.scenario,
        cfg.pair_count(),
        cfg.statistics.name(),
        cfg.t_end()
    );
    let outcome = match run_scenario(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::RuntimeFailure;
        }
    };
    let s = &outcome.summary;
    if let Some(r) = &s.result {
        println!(
            "completed {} / {}, same-side fraction {:.4}",
            r.endpoints.len(),
            r.n_pairs,
            r.same_side_fraction
        );
    }
    for c in &s.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {:.4e} (bound {:.4e}) {}", c.name, c.worst, c.bound, c.detail);
    }
    println!("wrote {}", cfg.output_dir.display());
    outcome.exit_status()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Fig3a(a) => run(Scenario::Fig3a, a),
        Command::Fig3b(a) => run(Scenario::Fig3b, a),
        Command::Fig4a(a) => run(Scenario::Fig4a, a),
        Command::Fig4b(a) => run(Scenario::Fig4b, a),
        Command::FourSlitCheck(a) => run(Scenario::FourSlitCheck, a),
        Command::Equivariance(a) => run(Scenario::Equivariance, a),
        Command::Custom(a) => run(Scenario::Custom, a),
        Command::Validate { path } => match validate_config(&path) {
            Ok(cfg) => {
                print!("{}", cfg.to_toml());
                ExitStatus::Success
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitStatus::ConfigError
            }
        },
    };
    ExitCode::from(status.code() as u8)
}
