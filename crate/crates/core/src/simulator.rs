//! Seeded Monte Carlo estimation of uplink outage under open and closed
//! access.
//!
//! Each trial samples one realization of the network in a disk window
//! around the victim base station and reduces it to a [`TrialSummary`]:
//! the typical UE's received signal, the closed-access interference, and
//! the open-access interference split into a `ρ`-independent part and a
//! part proportional to `ρ`. Which macro UEs are handed off does not depend
//! on `ρ`, so one summary answers the outage question for both access modes
//! and every `ρ` with the same random numbers (common random numbers).
//! Trial `i` always draws from stream `i` of the run seed, which makes every
//! estimate independent of how trials are scheduled across threads.
//!
//! Interferers beyond the window are replaced by their mean contribution
//! (see [`SimSpec::far_field_compensation`]).

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{hex_moment, Access};
use crate::bounds::{DEFAULT_BRACKET, ROOT_REL_TOL};
use crate::error::{Error, Result};
use crate::geometry::{
    sample_ppp_profile, sample_ppp_window, sample_uniform_hexagon, stream_rng, DiskRegion, HexGrid, Point,
};
use crate::model::{draw_fading, NetworkConfig};

/// Targeted received power of each UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerModel {
    /// Every UE hits its nominal target exactly.
    #[default]
    Fixed,
    /// Each UE independently picks `{0.5, 1, 1.5, 2}×` its nominal target;
    /// handed-off UEs multiply their pick by `ρ`.
    Random4,
}

const RANDOM4_LEVELS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

impl PowerModel {
    fn factor<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            PowerModel::Fixed => 1.0,
            PowerModel::Random4 => RANDOM4_LEVELS[rng.random_range(0..4)],
        }
    }
}

/// Whose outage is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimLevel {
    /// A macro UE of the cell at the origin.
    Macro,
    /// A femto UE of the femtocell whose base station is at the given point.
    Femto(Point),
    /// A femto UE of a femtocell placed uniformly in the home macrocell,
    /// redrawn every trial.
    FemtoAveraged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub trials: u64,
    pub seed: u64,
    /// Window radius in cell radii.
    pub window_radius: f64,
    pub mode: Access,
    pub level: SimLevel,
    pub power_model: PowerModel,
    /// Add the mean interference of the UEs beyond the window. Without it
    /// the truncated tail biases outage low by more than a typical
    /// confidence interval at `γ = 3`.
    pub far_field_compensation: bool,
    /// Under open access, redraw the typical macro UE while it falls inside
    /// a femtocell (it would otherwise be handed off).
    pub redraw_typical: bool,
}

impl Default for SimSpec {
    fn default() -> Self {
        SimSpec {
            trials: 20_000,
            seed: 0,
            window_radius: 6.0,
            mode: Access::Closed,
            level: SimLevel::Macro,
            power_model: PowerModel::Fixed,
            far_field_compensation: true,
            redraw_typical: true,
        }
    }
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidConfig("at least one trial is required".into()));
        }
        if !(self.window_radius.is_finite() && self.window_radius >= 3.0) {
            return Err(Error::InvalidConfig(format!(
                "window radius must be at least 3 cell radii, got {}",
                self.window_radius
            )));
        }
        Ok(())
    }
}

/// A binomial outage estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub ci95_halfwidth: f64,
    pub trials: u64,
    pub seed: u64,
}

impl OutageEstimate {
    pub fn from_count(outages: u64, trials: u64, seed: u64) -> Self {
        let n = trials as f64;
        let p = outages as f64 / n;
        OutageEstimate { p_hat: p, ci95_halfwidth: 1.96 * (p * (1.0 - p) / n).sqrt(), trials, seed }
    }

    /// Whether `p` lies in the 95% confidence interval.
    pub fn covers(&self, p: f64) -> bool {
        (p - self.p_hat).abs() <= self.ci95_halfwidth
    }
}

/// One realization reduced to what decides outage.
///
/// Open-access interference at power enhancement `ρ` is
/// `open_fixed + ρ·open_per_rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    /// The typical UE's targeted received power (before fading).
    pub target: f64,
    /// The typical UE's received power.
    pub signal: f64,
    pub closed: f64,
    pub open_fixed: f64,
    pub open_per_rho: f64,
}

impl TrialSummary {
    pub fn interference(&self, mode: Access, rho: f64) -> f64 {
        match mode {
            Access::Closed => self.closed,
            Access::Open => self.open_fixed + rho * self.open_per_rho,
        }
    }

    /// SIR outage at threshold `t`.
    pub fn outage(&self, mode: Access, rho: f64, t: f64) -> bool {
        self.signal < t * self.interference(mode, rho)
    }

    /// Outage probability given everything but the typical UE's own fading:
    /// `P(h < T·I/P_target) = 1 − e^{−T·I/P_target}`.
    pub fn conditional_outage(&self, mode: Access, rho: f64, t: f64) -> f64 {
        -(-t * self.interference(mode, rho) / self.target).exp_m1()
    }
}

/// Trial options beyond the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOptions {
    pub window_radius: f64,
    pub power_model: PowerModel,
    pub far_field_compensation: bool,
    pub redraw_typical: bool,
}

impl Default for TrialOptions {
    fn default() -> Self {
        let s = SimSpec::default();
        TrialOptions::from(&s)
    }
}

impl From<&SimSpec> for TrialOptions {
    fn from(s: &SimSpec) -> Self {
        TrialOptions {
            window_radius: s.window_radius,
            power_model: s.power_model,
            far_field_compensation: s.far_field_compensation,
            redraw_typical: s.redraw_typical,
        }
    }
}

/// Mean interference at a victim from UEs farther than `w` from it:
/// macro-served UEs at `P`, and femto UEs at `Q` around femto base stations
/// farther than `w`. Only the first-order, lattice-averaged term is kept.
fn far_field_mean(cfg: &NetworkConfig, grid: &HexGrid, w: f64) -> f64 {
    let g = cfg.gamma;
    let shell = 2.0 * PI * w.powf(2.0 - g) / (g - 2.0);
    let macro_part = cfg.lambda * cfg.p * hex_moment(grid, g) / grid.hex_area() * shell;
    let femto_part = cfg.mu * cfg.q * cfg.nu.moment(g) * shell;
    macro_part + femto_part
}

/// Samples one realization with the victim base station at `victim`; a
/// femto victim (`femto_victim = true`) is an extra femto base station at
/// `victim` on top of the femto PPP.
pub fn sample_trial<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    victim: Point,
    femto_victim: bool,
    opts: &TrialOptions,
) -> TrialSummary {
    let grid = cfg.grid();
    let gamma = cfg.gamma;
    let hg = 0.5 * gamma;
    let r2 = cfg.femto_radius * cfg.femto_radius;
    let window = DiskRegion { center: victim, radius: opts.window_radius * cfg.cell_radius };
    let pm = opts.power_model;

    let mut femto_bs = sample_ppp_window(rng, cfg.mu, &window);
    if femto_victim {
        femto_bs.push(victim);
    }
    let macro_ues = sample_ppp_window(rng, cfg.lambda, &window);

    let mut closed = 0.0;
    let mut open_fixed = 0.0;
    let mut open_per_rho = 0.0;

    // Power-controlled received power ratio (d_serve/d_victim)^γ.
    let gain = |x: Point, server: Point| -> Option<f64> {
        let dv = x.dist2(victim);
        (dv > 0.0).then(|| (x.dist2(server) / dv).powf(hg))
    };

    for &x in &macro_ues {
        let f = pm.factor(rng);
        let h = draw_fading(rng);
        let served = gain(x, grid.nearest_bs(x)).map_or(0.0, |g| cfg.p * f * h * g);
        closed += served;
        let femto = femto_bs
            .iter()
            .map(|&c| (c.dist2(x), c))
            .filter(|&(d2, _)| d2 <= r2)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match femto {
            Some((_, c)) => open_per_rho += gain(x, c).map_or(0.0, |g| cfg.p * f * h * g),
            None => open_fixed += served,
        }
    }

    // Local femto UEs; a femto victim's own UEs reach it at exactly their
    // target. The typical femto UE is not among them.
    let mut local = 0.0;
    for &c in &femto_bs {
        for x in sample_ppp_profile(rng, &cfg.nu, c) {
            let f = pm.factor(rng);
            let h = draw_fading(rng);
            local += gain(x, c).map_or(0.0, |g| cfg.q * f * h * g);
        }
    }
    closed += local;
    open_fixed += local;

    if opts.far_field_compensation {
        let m = far_field_mean(cfg, &grid, window.radius);
        closed += m;
        open_fixed += m;
    }

    // The typical UE: power control makes its signal independent of its
    // position, but a macro UE is drawn (and redrawn) for the record.
    let target = if femto_victim {
        cfg.q * pm.factor(rng)
    } else {
        if opts.redraw_typical && !femto_bs.is_empty() {
            for _ in 0..1000 {
                let u = sample_uniform_hexagon(rng, &grid);
                if femto_bs.iter().all(|c| c.dist2(u) > r2) {
                    break;
                }
            }
        }
        cfg.p * pm.factor(rng)
    };
    let signal = target * draw_fading(rng);

    TrialSummary { target, signal, closed, open_fixed, open_per_rho }
}

fn level_victim<R: Rng + ?Sized>(rng: &mut R, cfg: &NetworkConfig, level: SimLevel) -> (Point, bool) {
    match level {
        SimLevel::Macro => (Point::ORIGIN, false),
        SimLevel::Femto(x) => (x, true),
        SimLevel::FemtoAveraged => (sample_uniform_hexagon(rng, &cfg.grid()), true),
    }
}

/// One macro-level trial: whether the typical macro UE is in outage.
pub fn run_macro_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &NetworkConfig, mode: Access, power_model: PowerModel) -> bool {
    let opts = TrialOptions { power_model, ..TrialOptions::default() };
    sample_trial(rng, cfg, Point::ORIGIN, false, &opts).outage(mode, cfg.rho, cfg.threshold)
}

/// One femto-level trial: whether the typical femto UE of the femtocell at
/// `x_b` is in outage.
pub fn run_femto_trial<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    mode: Access,
    x_b: Point,
    power_model: PowerModel,
) -> bool {
    let opts = TrialOptions { power_model, ..TrialOptions::default() };
    sample_trial(rng, cfg, x_b, true, &opts).outage(mode, cfg.rho, cfg.threshold)
}

fn check_level(cfg: &NetworkConfig, level: SimLevel) -> Result<()> {
    if let SimLevel::Femto(x) = level {
        if !(x.is_finite() && cfg.grid().nearest_index(x) == (0, 0)) {
            return Err(Error::Domain(format!("femto base station ({}, {}) is not inside the home macrocell", x.x, x.y)));
        }
    }
    Ok(())
}

/// Per-trial summaries for `spec` (its `mode` is irrelevant here), in trial
/// order. Trial `i` uses stream `i` of `spec.seed`.
pub fn simulate_summaries(cfg: &NetworkConfig, spec: &SimSpec) -> Result<Vec<TrialSummary>> {
    cfg.validate()?;
    spec.validate()?;
    check_level(cfg, spec.level)?;
    let opts = TrialOptions::from(spec);
    Ok((0..spec.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(spec.seed, i);
            let (victim, femto) = level_victim(&mut rng, cfg, spec.level);
            sample_trial(&mut rng, cfg, victim, femto, &opts)
        })
        .collect())
}

/// Fraction of `summaries` in outage under `mode` at `rho`.
pub fn outage_from_summaries(summaries: &[TrialSummary], mode: Access, rho: f64, t: f64, seed: u64) -> OutageEstimate {
    let count = summaries.iter().filter(|s| s.outage(mode, rho, t)).count() as u64;
    OutageEstimate::from_count(count, summaries.len() as u64, seed)
}

/// Outage of `spec.mode` at the configuration's `ρ`.
pub fn estimate_outage(cfg: &NetworkConfig, spec: &SimSpec) -> Result<OutageEstimate> {
    let s = simulate_summaries(cfg, spec)?;
    Ok(outage_from_summaries(&s, spec.mode, cfg.rho, cfg.threshold, spec.seed))
}

/// Paired open-minus-closed outage difference at `rho` and the 95% half
/// width of its estimate.
///
/// Each trial contributes the difference of its conditional outage
/// probabilities rather than of its outage indicators: the expectation is
/// the same, the typical UE's fading no longer adds noise, and the
/// estimate becomes a smooth increasing function of `ρ`.
pub fn paired_difference(summaries: &[TrialSummary], rho: f64, t: f64) -> (f64, f64) {
    let n = summaries.len() as f64;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for s in summaries {
        let d = s.conditional_outage(Access::Open, rho, t) - s.conditional_outage(Access::Closed, rho, t);
        sum += d;
        sum2 += d * d;
    }
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    (mean, 1.96 * (var / n).sqrt())
}

/// A simulated break-even power enhancement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoCrossing {
    /// Where the simulated open and closed outages cross.
    pub rho: f64,
    /// Range of `ρ` over which the paired difference is within its 95%
    /// confidence half width of zero.
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Bisection on `ln ρ` for the point where `f` (non-decreasing) turns
/// positive.
fn bisect_up<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    while b - a > ROOT_REL_TOL {
        let m = 0.5 * (a + b);
        if f(m.exp()) > 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    (0.5 * (a + b)).exp()
}

/// The `ρ` at which simulated open- and closed-access outage agree, for the
/// level in `spec`, using the same trials at every `ρ`.
///
/// Open-access outage never decreases with `ρ` and closed-access outage
/// does not depend on it, so the paired difference crosses zero at most
/// once; its absence on the bracket is reported as an error.
pub fn estimate_rho_star_sim(cfg: &NetworkConfig, spec: &SimSpec) -> Result<RhoCrossing> {
    let s = simulate_summaries(cfg, spec)?;
    rho_crossing(&s, cfg.threshold, spec)
}

/// [`estimate_rho_star_sim`] on precomputed summaries.
pub fn rho_crossing(summaries: &[TrialSummary], t: f64, spec: &SimSpec) -> Result<RhoCrossing> {
    let (lo, hi) = DEFAULT_BRACKET;
    let diff = |rho: f64| paired_difference(summaries, rho, t);
    let (d_lo, _) = diff(lo);
    let (d_hi, _) = diff(hi);
    if !(d_lo < 0.0 && d_hi > 0.0) {
        return Err(Error::NoSignChange { what: "simulated outage difference", lo, hi });
    }
    let rho = bisect_up(|r| diff(r).0, lo, hi);
    let rho_lo = bisect_up(
        |r| {
            let (m, h) = diff(r);
            m + h
        },
        lo,
        hi,
    );
    let rho_hi = bisect_up(
        |r| {
            let (m, h) = diff(r);
            m - h
        },
        lo,
        hi,
    );
    Ok(RhoCrossing { rho, rho_lo: rho_lo.min(rho), rho_hi: rho_hi.max(rho), trials: spec.trials, seed: spec.seed })
}
