//! `wavelab`: runs the decay experiments and writes CSV, JSON and SVG reports.
//!
//! Exit status is 0 when every structural check passes, 2 when one fails and
//! 1 on usage or configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use periodic_shocks::wavelab::{
    emit, oracle_diff, run_periodic_decay, run_rarefaction, run_shock_stability, DecayReport, ExperimentConfig, Format,
    ProfileSpec, Solver, TimeSweep,
};
use periodic_shocks::Error;

#[derive(Parser)]
#[command(name = "wavelab", version, about = "Decay experiments for periodically perturbed Riemann data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shock location and one-sided decay, merge time, coincidence times.
    Shock(Common),
    /// Decay towards the rarefaction fan, divide sandwich, fan identity.
    Rarefaction(Common),
    /// Periodic decay against the optimal envelope.
    Periodic(Common),
    /// L¹ distance per period between front tracking and the oracle.
    OracleDiff(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; built-in defaults otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// oracle, fronttrack or both.
    #[arg(long)]
    solver: Option<Solver>,
    /// Front-tracking mesh size.
    #[arg(long)]
    delta: Option<f64>,
}

fn square() -> ProfileSpec {
    ProfileSpec::Square {
        first: 0.3,
        second: -0.3,
    }
}

fn default_config(command: &Command) -> ExperimentConfig {
    match command {
        Command::Shock(_) => {
            let mut cfg = ExperimentConfig::riemann(1.0, -1.0, square());
            cfg.times = TimeSweep::geometric(0.25, 200.0, 48);
            cfg
        }
        Command::Rarefaction(_) => ExperimentConfig::riemann(-1.0, 1.0, square()),
        Command::Periodic(_) => ExperimentConfig::periodic(0.0, ProfileSpec::TwoConstant { m1: 1.0, m2: 1.0 }),
        Command::OracleDiff(_) => {
            let mut cfg = ExperimentConfig::riemann(1.0, -1.0, square());
            cfg.times = TimeSweep::explicit(&[1.0, 5.0, 10.0]);
            cfg
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Internal(_) => 2,
        _ => 1,
    }
}

fn load(command: &Command) -> Result<ExperimentConfig, Error> {
    let (Command::Shock(c) | Command::Rarefaction(c) | Command::Periodic(c) | Command::OracleDiff(c)) = command;
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => default_config(command),
    };
    if let Some(out) = &c.out {
        cfg.output = out.clone();
    }
    if let Some(solver) = c.solver {
        cfg.solver = solver;
    }
    if let Some(delta) = c.delta {
        cfg.delta = delta;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(command: &Command, cfg: &ExperimentConfig) -> Result<DecayReport, Error> {
    match command {
        Command::Shock(_) => run_shock_stability(cfg),
        Command::Rarefaction(_) => run_rarefaction(cfg),
        Command::Periodic(_) => run_periodic_decay(cfg),
        Command::OracleDiff(_) => oracle_diff(cfg, &[cfg.delta, cfg.delta / 2.0]),
    }
}

fn summarize(report: &DecayReport) {
    println!("{}: {} samples on [{}, {}]", report.experiment, report.times.len(), report.times[0], report.times[report.times.len() - 1]);
    if let Some(t) = report.detected_t {
        println!("  detected T = {t}");
    }
    if let (Some(name), Some(fit)) = (&report.fitted_series, report.fit) {
        println!("  fit {name}: exponent {:.4}, constant {:.4e}", fit.exponent, fit.constant);
    }
    for (name, c) in &report.constants {
        println!("  sup t*{name} = {c:.4e}");
    }
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("  {verdict} {:<32} worst {:.3e} tol {:.3e}", c.name, c.worst, c.tolerance);
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = match load(&cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("wavelab: {e}");
            return ExitCode::from(1);
        }
    };
    let report = match run(&cli.command, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("wavelab: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    summarize(&report);
    for format in Format::ALL {
        match emit(&report, format, &cfg.output) {
            Ok(path) => println!("  wrote {}", path.display()),
            Err(e) => {
                eprintln!("wavelab: {e}");
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::from(if report.all_passed() { 0 } else { 2 })
}
