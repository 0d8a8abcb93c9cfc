//! Subcommand implementations. Each returns the text to write; `main`
//! decides where it goes.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use uplink_access::analytic::{self, Access, AccessPair, QuadratureSpec};
use uplink_access::bounds::{self, FemtoBoundsReport, MacroBoundsReport};
use uplink_access::simulator::{self, OutageEstimate, PowerModel, SimLevel, SimSpec};
use uplink_access::{NetworkConfig, Point};

use crate::error::{CliError, CliResult};
use crate::parse::{parse_config, ConfigDocument, Sweep, SweepTarget, REFERENCE_CONFIG};
use crate::validation::{self, Scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Simulate,
    Bounds,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeArg {
    Open,
    Closed,
    #[default]
    Both,
}

impl ModeArg {
    fn modes(self) -> &'static [Access] {
        match self {
            ModeArg::Open => &[Access::Open],
            ModeArg::Closed => &[Access::Closed],
            ModeArg::Both => &[Access::Open, Access::Closed],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelArg {
    #[default]
    Macro,
    Femto,
    FemtoAvg,
}

/// Everything a run needs, as collected from the command line.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config: Option<PathBuf>,
    pub command: Command,
    pub sweep: Option<Sweep>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: u64,
    pub mode: ModeArg,
    pub level: LevelArg,
    /// Femto base station, in the configuration's length unit.
    pub x_b: Option<Point>,
    pub power_model: PowerModel,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    /// Also compute the quadrature break-even points in `bounds`.
    pub exact: bool,
}

impl RunManifest {
    pub fn new(command: Command) -> Self {
        RunManifest {
            config: None,
            command,
            sweep: None,
            out: None,
            seed: None,
            trials: SimSpec::default().trials,
            mode: ModeArg::Both,
            level: LevelArg::Macro,
            x_b: None,
            power_model: PowerModel::Fixed,
            rel_tol: None,
            abs_tol: None,
            exact: false,
        }
    }

    fn quadrature_spec(&self) -> QuadratureSpec {
        let d = QuadratureSpec::default();
        QuadratureSpec { rel_tol: self.rel_tol.unwrap_or(d.rel_tol), abs_tol: self.abs_tol.unwrap_or(d.abs_tol), ..d }
    }
}

/// The result of a command.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    /// The seed actually used, when the command draws random numbers.
    pub seed: Option<u64>,
    /// False when the command ran but its verdict is a failure (`validate`).
    pub success: bool,
}

pub fn load_config(path: Option<&PathBuf>) -> CliResult<ConfigDocument> {
    match path {
        None => parse_config(REFERENCE_CONFIG),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
            parse_config(&text)
        }
    }
}

/// One sweep value resolved to a configuration and femto position.
struct SweepPoint {
    value: Option<f64>,
    config: NetworkConfig,
    x_b: Option<Point>,
}

fn sweep_points(doc: &ConfigDocument, m: &RunManifest) -> CliResult<Vec<SweepPoint>> {
    let Some(sweep) = &m.sweep else {
        return Ok(vec![SweepPoint { value: None, config: doc.config().clone(), x_b: m.x_b }]);
    };
    if sweep.values.is_empty() {
        return Err(CliError::Usage("sweep has no values".into()));
    }
    sweep
        .values
        .iter()
        .map(|&v| match sweep.target {
            SweepTarget::Config(key) => Ok(SweepPoint { value: Some(v), config: doc.with(key, v)?, x_b: m.x_b }),
            SweepTarget::FemtoX | SweepTarget::FemtoY => {
                if m.level != LevelArg::Femto {
                    return Err(CliError::Usage("sweeping x_b needs --level femto".into()));
                }
                let base = m.x_b.unwrap_or(Point::ORIGIN);
                let x_b = if sweep.target == SweepTarget::FemtoX { Point::new(v, base.y) } else { Point::new(base.x, v) };
                Ok(SweepPoint { value: Some(v), config: doc.config().clone(), x_b: Some(x_b) })
            }
        })
        .collect()
}

fn femto_position(p: &SweepPoint) -> CliResult<Point> {
    p.x_b.ok_or_else(|| CliError::Usage("--level femto needs --x-b".into()))
}

/// Runs `f` on every sweep point in parallel, keeping sweep order.
fn map_points<T: Send>(points: &[SweepPoint], f: impl Fn(&SweepPoint) -> CliResult<T> + Sync + Send) -> CliResult<Vec<T>> {
    points.par_iter().map(f).collect::<Vec<_>>().into_iter().collect()
}

fn sweep_name(m: &RunManifest) -> &str {
    m.sweep.as_ref().map_or("-", |s| s.name.as_str())
}

/// Floats in CSV output: 17 significant digits, round-trip exact.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn value_cell(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn level_name(l: LevelArg) -> &'static str {
    match l {
        LevelArg::Macro => "macro",
        LevelArg::Femto => "femto",
        LevelArg::FemtoAvg => "femto-avg",
    }
}

fn mode_name(a: Access) -> &'static str {
    match a {
        Access::Open => "open",
        Access::Closed => "closed",
    }
}

pub fn run(m: &RunManifest) -> CliResult<Output> {
    match m.command {
        Command::Analyze => cmd_analyze(m),
        Command::Simulate => cmd_simulate(m),
        Command::Bounds => cmd_bounds(m),
        Command::Validate => cmd_validate(m),
    }
}

/// Analytic outage of both access modes per sweep value. CSV columns:
/// `param, value, level, outage_open, outage_closed, quad_error`.
pub fn cmd_analyze(m: &RunManifest) -> CliResult<Output> {
    let doc = load_config(m.config.as_ref())?;
    let points = sweep_points(&doc, m)?;
    let spec = m.quadrature_spec();
    let rows = map_points(&points, |p| -> CliResult<AccessPair> {
        Ok(match m.level {
            LevelArg::Macro => analytic::macro_outages(&p.config, &spec)?,
            LevelArg::Femto => analytic::femto_outages(femto_position(p)?, &p.config, &spec)?,
            LevelArg::FemtoAvg => analytic::femto_outages_avg(&p.config, &spec)?,
        })
    })?;
    let mut text = String::from("param,value,level,outage_open,outage_closed,quad_error\n");
    for (p, pair) in points.iter().zip(rows) {
        let err = pair.open.quad_error.max(pair.closed.quad_error);
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            sweep_name(m),
            value_cell(p.value),
            level_name(m.level),
            num(pair.open.probability),
            num(pair.closed.probability),
            num(err)
        );
    }
    Ok(Output { text, seed: None, success: true })
}

fn sim_level(m: &RunManifest, p: &SweepPoint) -> CliResult<SimLevel> {
    Ok(match m.level {
        LevelArg::Macro => SimLevel::Macro,
        LevelArg::Femto => SimLevel::Femto(femto_position(p)?),
        LevelArg::FemtoAvg => SimLevel::FemtoAveraged,
    })
}

fn resolve_seed(m: &RunManifest) -> u64 {
    m.seed.unwrap_or_else(rand::random)
}

/// Simulated outage per sweep value and access mode, with both modes
/// sharing the same trials. CSV columns:
/// `param, value, mode, p_hat, ci95, trials, seed`.
pub fn cmd_simulate(m: &RunManifest) -> CliResult<Output> {
    let doc = load_config(m.config.as_ref())?;
    let points = sweep_points(&doc, m)?;
    let seed = resolve_seed(m);
    let rows = map_points(&points, |p| -> CliResult<Vec<OutageEstimate>> {
        let spec = SimSpec { trials: m.trials, seed, level: sim_level(m, p)?, power_model: m.power_model, ..SimSpec::default() };
        let s = simulator::simulate_summaries(&p.config, &spec)?;
        Ok(m.mode
            .modes()
            .iter()
            .map(|&mode| simulator::outage_from_summaries(&s, mode, p.config.rho, p.config.threshold, seed))
            .collect())
    })?;
    let mut text = String::from("param,value,mode,p_hat,ci95,trials,seed\n");
    for (p, estimates) in points.iter().zip(rows) {
        for (mode, e) in m.mode.modes().iter().zip(estimates) {
            let _ = writeln!(
                text,
                "{},{},{},{},{},{},{}",
                sweep_name(m),
                value_cell(p.value),
                mode_name(*mode),
                num(e.p_hat),
                num(e.ci95_halfwidth),
                e.trials,
                e.seed
            );
        }
    }
    Ok(Output { text, seed: Some(seed), success: true })
}

#[derive(Serialize)]
#[serde(untagged)]
enum BoundsReport {
    Macro(MacroBoundsReport),
    Femto(FemtoBoundsReport),
}

/// Closed-form bounds per sweep value as a JSON document.
pub fn cmd_bounds(m: &RunManifest) -> CliResult<Output> {
    let doc = load_config(m.config.as_ref())?;
    let points = sweep_points(&doc, m)?;
    let spec = m.quadrature_spec();
    let exact = m.exact.then_some(&spec);
    let reports = map_points(&points, |p| -> CliResult<BoundsReport> {
        Ok(match m.level {
            LevelArg::Macro => BoundsReport::Macro(bounds::macro_bounds(&p.config, exact)?),
            LevelArg::Femto => BoundsReport::Femto(bounds::femto_bounds(femto_position(p)?, &p.config, exact)?),
            LevelArg::FemtoAvg => return Err(CliError::Usage("bounds are per femtocell; use --level femto".into())),
        })
    })?;
    let entries: Vec<_> = points
        .iter()
        .zip(reports)
        .map(|(p, r)| json!({ "value": p.value, "report": r }))
        .collect();
    let doc = json!({
        "param": m.sweep.as_ref().map(|s| s.name.clone()),
        "level": level_name(m.level),
        "reports": entries,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    text.push('\n');
    Ok(Output { text, seed: None, success: true })
}

/// Runs the acceptance criteria at reduced scale around the configuration.
pub fn cmd_validate(m: &RunManifest) -> CliResult<Output> {
    let doc = load_config(m.config.as_ref())?;
    let seed = resolve_seed(m);
    let results = validation::run_all(doc.config(), &Scale::reduced(seed));
    let mut text = String::new();
    for r in &results {
        let _ = writeln!(text, "{r}");
    }
    let success = results.iter().all(|r| r.passed);
    let _ = writeln!(text, "{}", if success { "all criteria passed" } else { "FAILED" });
    Ok(Output { text, seed: Some(seed), success })
}
