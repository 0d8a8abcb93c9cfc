use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use uplink_access::simulator::PowerModel;
use uplink_access::Point;
use uplink_access_cli::parse::{parse_point, parse_sweep, Sweep};
use uplink_access_cli::{run, CliError, Command, LevelArg, ModeArg, RunManifest};

/// Uplink outage of macro and femto UEs under open and closed femtocell
/// access: analytic sweeps, Monte Carlo, closed-form bounds.
#[derive(Parser)]
#[command(name = "uplink-access", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analytic outage per sweep value (CSV).
    Analyze(Common),
    /// Simulated outage per sweep value and access mode (CSV).
    Simulate(Common),
    /// Closed-form sufficient conditions and break-even bounds (JSON).
    Bounds(Common),
    /// Run the acceptance criteria at reduced scale.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration; the reference scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sweep one parameter: NAME=v1,v2,...
    #[arg(long, value_parser = sweep_arg)]
    sweep: Option<Sweep>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; a random one is drawn and reported when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per point.
    #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, value_enum, default_value_t = ModeOpt::Both)]
    mode: ModeOpt,
    #[arg(long, value_enum, default_value_t = LevelOpt::Macro)]
    level: LevelOpt,
    /// Femto base station position "x,y", in configuration length units.
    #[arg(long = "x-b", value_parser = point_arg, allow_hyphen_values = true)]
    x_b: Option<Point>,
    #[arg(long = "power-model", value_enum, default_value_t = PowerOpt::Fixed)]
    power_model: PowerOpt,
    /// Relative quadrature tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    abs_tol: Option<f64>,
    /// With `bounds`: also locate the break-even point by quadrature.
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeOpt {
    Open,
    Closed,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelOpt {
    Macro,
    Femto,
    FemtoAvg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PowerOpt {
    Fixed,
    Random4,
}

fn sweep_arg(s: &str) -> Result<Sweep, String> {
    parse_sweep(s).map_err(|e| e.to_string())
}

fn point_arg(s: &str) -> Result<Point, String> {
    parse_point(s).map_err(|e| e.to_string())
}

fn manifest(command: Command, c: Common) -> RunManifest {
    RunManifest {
        config: c.config,
        command,
        sweep: c.sweep,
        out: c.out,
        seed: c.seed,
        trials: c.trials,
        mode: match c.mode {
            ModeOpt::Open => ModeArg::Open,
            ModeOpt::Closed => ModeArg::Closed,
            ModeOpt::Both => ModeArg::Both,
        },
        level: match c.level {
            LevelOpt::Macro => LevelArg::Macro,
            LevelOpt::Femto => LevelArg::Femto,
            LevelOpt::FemtoAvg => LevelArg::FemtoAvg,
        },
        x_b: c.x_b,
        power_model: match c.power_model {
            PowerOpt::Fixed => PowerModel::Fixed,
            PowerOpt::Random4 => PowerModel::Random4,
        },
        rel_tol: c.rel_tol,
        abs_tol: c.abs_tol,
        exact: c.exact,
    }
}

fn execute(m: &RunManifest) -> Result<bool, CliError> {
    let out = run(m)?;
    if let Some(seed) = out.seed {
        eprintln!("seed: {seed}");
    }
    match &m.out {
        Some(path) => std::fs::write(path, &out.text)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => {
            let _ = std::io::stdout().write_all(out.text.as_bytes());
        }
    }
    Ok(out.success)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let m = match cli.command {
        Cmd::Analyze(c) => manifest(Command::Analyze, c),
        Cmd::Simulate(c) => manifest(Command::Simulate, c),
        Cmd::Bounds(c) => manifest(Command::Bounds, c),
        Cmd::Validate(c) => manifest(Command::Validate, c),
    };
    match execute(&m) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
