//! The acceptance criteria, each as a function returning a pass/fail
//! verdict with a one-line explanation.
//!
//! Every criterion takes the base scenario and a [`Scale`]. The `validate`
//! subcommand runs them at [`Scale::reduced`]; the acceptance test target
//! runs them at [`Scale::full`].

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uplink_access::analytic::{self, Access, QuadratureSpec};
use uplink_access::bounds;
use uplink_access::model::normalize;
use uplink_access::quadrature::{integrate, Tolerance};
use uplink_access::simulator::{self, PowerModel, SimLevel, SimSpec};
use uplink_access::{IntensityProfile, NetworkConfig, Point};

/// How hard each criterion works.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub seed: u64,
    /// Monte Carlo trials per simulated outage point.
    pub trials: u64,
    /// Monte Carlo trials behind each simulated break-even point. The
    /// open/closed gap near the crossing is tiny, so this does not shrink
    /// with the rest of a reduced run.
    pub crossing_trials: u64,
    /// Realizations for the conditioning-identity check.
    pub realizations: u64,
    /// Randomized configurations in the soundness scan.
    pub soundness_configs: usize,
    /// Accuracy of analytic values compared against simulation or bounds.
    pub spec: QuadratureSpec,
    /// Accuracy used in the soundness scan, where only signs matter.
    pub scan_spec: QuadratureSpec,
}

impl Scale {
    pub fn full(seed: u64) -> Self {
        Scale {
            seed,
            trials: 20_000,
            crossing_trials: 20_000,
            realizations: 100_000,
            soundness_configs: 50,
            spec: QuadratureSpec::default(),
            scan_spec: QuadratureSpec { rel_tol: 1e-4, abs_tol: 1e-7, truncation_radius: None },
        }
    }

    pub fn reduced(seed: u64) -> Self {
        Scale {
            seed,
            trials: 5_000,
            crossing_trials: 20_000,
            realizations: 20_000,
            soundness_configs: 10,
            spec: QuadratureSpec { rel_tol: 1e-5, abs_tol: 1e-8, truncation_radius: None },
            scan_spec: QuadratureSpec { rel_tol: 1e-4, abs_tol: 1e-7, truncation_radius: None },
        }
    }
}

/// The verdict on one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict} {}: {}", self.id, self.name, self.detail)
    }
}

type Check = Result<(bool, String), String>;

fn verdict(id: u8, name: &'static str, check: Check) -> CriterionResult {
    match check {
        Ok((passed, detail)) => CriterionResult { id, name, passed, detail },
        Err(e) => CriterionResult { id, name, passed: false, detail: format!("error: {e}") },
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The base scenario with femtocell radius `r` and a constant local
/// intensity `nu` up to it.
fn with_radius(base: &NetworkConfig, r: f64, nu: f64) -> Result<NetworkConfig, String> {
    let mut cfg = base.clone();
    cfg.femto_radius = r;
    cfg.nu = IntensityProfile::constant(nu, r).map_err(err)?;
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// A point given in reference-scenario metres (`R_c = 500`), rescaled to
/// the base scenario's cell.
fn at(base: &NetworkConfig, x: f64, y: f64) -> Point {
    Point::new(x, y) * (base.cell_radius / 500.0)
}

/// Analytic outage inside the simulated 95% confidence intervals, both
/// modes, macro and femto level, along the `λ` and `μ` sweeps.
pub fn analytic_simulation_agreement(base: &NetworkConfig, scale: &Scale) -> CriterionResult {
    let check = || -> Check {
        let mut configs = Vec::new();
        for k in [2.0, 4.0, 8.0] {
            let mut c = base.clone();
            c.lambda = k * 1e-6 * (base.cell_radius / 500.0).powi(-2);
            configs.push(c);
        }
        for k in [2.0, 8.0] {
            let mut c = base.clone();
            c.mu = k * 1e-6 * (base.cell_radius / 500.0).powi(-2);
            configs.push(c);
        }
        let x_b = at(base, 0.0, 100.0);
        let (mut total, mut inside, mut worst) = (0, 0, 0.0f64);
        let mut misses = Vec::new();
        for cfg in &configs {
            for level in [SimLevel::Macro, SimLevel::Femto(x_b)] {
                let pair = match level {
                    SimLevel::Femto(x) => analytic::femto_outages(x, cfg, &scale.spec),
                    _ => analytic::macro_outages(cfg, &scale.spec),
                }
                .map_err(err)?;
                let spec = SimSpec { trials: scale.trials, seed: scale.seed, level, ..SimSpec::default() };
                let s = simulator::simulate_summaries(cfg, &spec).map_err(err)?;
                for (mode, p) in [(Access::Open, pair.open.probability), (Access::Closed, pair.closed.probability)] {
                    let e = simulator::outage_from_summaries(&s, mode, cfg.rho, cfg.threshold, scale.seed);
                    total += 1;
                    let z = (p - e.p_hat).abs() / e.ci95_halfwidth;
                    worst = worst.max(z);
                    if e.covers(p) {
                        inside += 1;
                    } else {
                        misses.push(format!(
                            "λ={:.0e} μ={:.0e} {level:?} {mode:?}: analytic {p:.5} vs {:.5}±{:.5}",
                            cfg.lambda, cfg.mu, e.p_hat, e.ci95_halfwidth
                        ));
                    }
                }
            }
        }
        let mut detail = format!(
            "{inside}/{total} analytic values inside the {}-trial 95% CI (largest |Δ|/CI = {worst:.2})",
            scale.trials
        );
        if !misses.is_empty() {
            detail.push_str("; outside: ");
            detail.push_str(&misses.join("; "));
        }
        Ok((inside == total, detail))
    };
    verdict(1, "analytic-simulation agreement", check())
}

/// Without femtocells (macro level) or macro UEs (femto level) the access
/// modes coincide.
pub fn degenerate_equivalence(base: &NetworkConfig, scale: &Scale) -> CriterionResult {
    let check = || -> Check {
        let mut no_femto = base.clone();
        no_femto.mu = 0.0;
        let m = analytic::macro_outages(&no_femto, &scale.spec).map_err(err)?;
        let mut no_macro = base.clone();
        no_macro.lambda = 0.0;
        let f = analytic::femto_outages(at(base, 0.0, 100.0), &no_macro, &scale.spec).map_err(err)?;
        let dm = (m.open.probability - m.closed.probability).abs();
        let df = (f.open.probability - f.closed.probability).abs();
        Ok((dm < 1e-9 && df < 1e-9, format!("μ=0 macro |Δ| = {dm:.2e}, λ=0 femto |Δ| = {df:.2e}")))
    };
    verdict(2, "degenerate equivalence", check())
}

/// Every Laplace evaluator is 1 at `s = 0` and non-increasing in `s`.
pub fn laplace_sanity(base: &NetworkConfig, scale: &Scale) -> CriterionResult {
    let check = || -> Check {
        let spec = &scale.spec;
        let s1 = base.threshold / base.p;
        let grid = [0.0, 0.5 * s1, s1, 2.0 * s1];
        let x0 = at(base, 150.0, 80.0);
        let x_b = at(base, 0.0, 100.0);
        type Eval<'a> = Box<dyn Fn(f64) -> uplink_access::Result<f64> + 'a>;
        let evaluators: Vec<(&str, Eval)> = vec![
            ("L0", Box::new(|s| analytic::eval_l0(s, base, spec))),
            ("W", Box::new(|s| analytic::eval_w(s, x0, base, spec))),
            ("V", Box::new(|s| analytic::eval_v(s, x0, base, spec))),
            ("U", Box::new(|s| analytic::eval_u(s, x0, base, spec))),
            ("macro open", Box::new(|s| analytic::macro_laplace(s, base, Access::Open, spec))),
            ("macro closed", Box::new(|s| analytic::macro_laplace(s, base, Access::Closed, spec))),
            ("femto open", Box::new(|s| analytic::femto_laplace(s, x_b, base, Access::Open, spec))),
            ("femto closed", Box::new(|s| analytic::femto_laplace(s, x_b, base, Access::Closed, spec))),
        ];
        let mut bad = Vec::new();
        for (name, f) in &evaluators {
            let values = grid.iter().map(|&s| f(s)).collect::<uplink_access::Result<Vec<_>>>().map_err(err)?;
            if (values[0] - 1.0).abs() > 1e-12 {
                bad.push(format!("{name}(0) = {}", values[0]));
            }
            if values.windows(2).any(|w| w[1] > w[0]) {
                bad.push(format!("{name} increases: {values:?}"));
            }
        }
        let detail = if bad.is_empty() {
            format!("{} evaluators equal 1 at s=0 and are non-increasing on the s grid", evaluators.len())
        } else {
            bad.join("; ")
        };
        Ok((bad.is_empty(), detail))
    };
    verdict(3, "Laplace sanity", check())
}

/// `∫_0^∞ u·a/(u^γ + a) du` by quadrature: `[0, 1]` directly and `[1, ∞)`
/// through `u = z^{−2}`, which leaves a bounded integrand.
fn radial_kernel_integral(a: f64, gamma: f64) -> f64 {
    let tol = Tolerance { abs: 1e-15, rel: 1e-11, max_subdivisions: 2000 };
    let head = integrate(|u| u * a / (u.powf(gamma) + a), 0.0, 1.0, &[], tol).scalar();
    let tail = integrate(
        |z| 2.0 * a * z.powf(2.0 * gamma - 5.0) / (1.0 + a * z.powf(2.0 * gamma)),
        0.0,
        1.0,
        &[],
        tol,
    )
    .scalar();
    head + tail
}

/// `𝐕` by brute-force double quadrature. With `y = x − x0` the integrand
/// depends only on `|x|` and `|y|`, leaving a radial integral over the
/// femtocell offset and another over the distance to the victim.
pub fn brute_force_v(t_rho: f64, gamma: f64, r: f64) -> f64 {
    let tol = Tolerance { abs: 1e-18, rel: 1e-10, max_subdivisions: 2000 };
    integrate(
        |y| {
            if y == 0.0 {
                return 0.0;
            }
            // Inner: 2π∫ r·k dr with X = tρ·y^γ/r^γ; scale r by y.
            let a = t_rho;
            2.0 * PI * y * (2.0 * PI * y * y * radial_kernel_integral(a, gamma))
        },
        0.0,
        r,
        &[],
        tol,
    )
    .scalar()
}

/// Brute-force `𝐕` lies between the closed-form bounds.
pub fn v_sandwich(_base: &NetworkConfig, _scale: &Scale) -> CriterionResult {
    let check = || -> Check {
        let mut grid = Vec::new();
        for gamma in [2.5, 3.0, 4.0] {
            for a in [0.1, 1.0, 10.0] {
                grid.push((gamma, a, 0.1));
            }
        }
        for a in [0.1, 1.0, 10.0] {
            grid.push((3.0, a, 0.05));
        }
        let mut bad = Vec::new();
        let mut tightest = f64::INFINITY;
        for &(gamma, a, r) in &grid {
            let v = bounds::v_bounds(1.0, a, gamma, r).map_err(err)?;
            let brute = brute_force_v(a, gamma, r);
            tightest = tightest.min((brute - v.v_min) / v.v_min).min((v.v_max - brute) / v.v_max);
            if !(v.v_min <= brute && brute <= v.v_max) || v.v_max != 2.0 * v.v_min {
                bad.push(format!("γ={gamma} Tρ={a} R={r}: {} ∉ [{}, {}]", brute, v.v_min, v.v_max));
            }
        }
        let detail = if bad.is_empty() {
            format!("{} grid points inside [V_min, V_max] (closest relative margin {tightest:.3}); V_max = 2·V_min", grid.len())
        } else {
            bad.join("; ")
        };
        Ok((bad.is_empty(), detail))
    };
    verdict(4, "V sandwich", check())
}

/// The threshold-study scenario at femtocell radius `r` (reference units).
fn threshold_study(base: &NetworkConfig, r: f64) -> Result<NetworkConfig, String> {
    let k = base.cell_radius / 500.0;
    let mut cfg = with_radius(base, r * k, 20e-6 / (k * k))?;
    cfg.lambda = 4e-6 / (k * k);
    cfg.mu = 4e-6 / (k * k);
    Ok(cfg)
}

fn rho_star_sandwich(base: &NetworkConfig, scale: &Scale, power_model: PowerModel, with_exact: bool) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [25.0, 50.0, 75.0] {
        let cfg = threshold_study(base, r)?;
        let (lo, hi) = bounds::rho_star_bounds(&cfg).map_err(err)?;
        let mut part = format!("R={r}: [{lo:.1}, {hi:.1}]");
        if with_exact {
            let exact = bounds::rho_star_exact(&cfg, &scale.spec).map_err(err)?;
            ok &= lo <= exact && exact <= hi;
            part.push_str(&format!(" exact {exact:.1}"));
        }
        let spec = SimSpec { trials: scale.crossing_trials, seed: scale.seed, power_model, ..SimSpec::default() };
        match simulator::estimate_rho_star_sim(&cfg, &spec) {
            Ok(x) => {
                ok &= lo <= x.rho && x.rho <= hi;
                part.push_str(&format!(" sim {:.1} ({:.1}–{:.1})", x.rho, x.rho_lo, x.rho_hi));
            }
            Err(e) => {
                ok = false;
                part.push_str(&format!(" sim: {e}"));
            }
        }
        parts.push(part);
    }
    Ok((ok, parts.join("; ")))
}

/// Analytic and simulated `ρ*` inside the closed-form bracket.
pub fn rho_star_sandwich_fixed(base: &NetworkConfig, scale: &Scale) -> CriterionResult {
    verdict(5, "ρ* sandwich", rho_star_sandwich(base, scale, PowerModel::Fixed, true))
}

/// Simulated `ρ*` with randomized target powers inside the bracket.
pub fn rho_star_sandwich_random(base: &NetworkConfig, scale: &Scale) -> CriterionResult {
    verdict(6, "ρ* sandwich, randomized power", rho_star_sandwich(base, scale, PowerModel::Random4, false))
}

/// `ρ**` inside its bracket along `R` and `x_B` sweeps, and increasing in
/// `|x_B|` up to saturation.
pub fn rho_star2_sandwich(base: &NetworkConfig, scale: &Scale) -> CriterionResult {
    let check = || -> Check {
        let k = base.cell_radius / 500.0;
        let nu = base.nu.total() / (PI * base.femto_radius.powi(2));
        let mut cases = Vec::new();
        for r in [25.0, 50.0, 75.0] {
            cases.push((r, at(base, 0.0, 100.0)));
        }
        for x in [50.0, 150.0, 250.0, 350.0] {
            cases.push((50.0, at(base, x, 0.0)));
        }
        let mut ok = true;
        let mut parts = Vec::new();
        let mut sweep = Vec::new();
        for (i, &(r, x_b)) in cases.iter().enumerate() {
            let cfg = with_radius(base, r * k, nu)?;
            let (lo, hi) = bounds::rho_star2_bounds(x_b, &cfg).map_err(err)?;
            let exact = bounds::rho_star2_exact(x_b, &cfg, &scale.spec).map_err(err)?;
            let inside = lo.value <= exact && exact <= hi.value;
            ok &= inside && lo.bracketed && hi.bracketed;
            parts.push(format!(
                "R={r} x_B=({:.0},{:.0}): {:.2}{} ≤ {exact:.2} ≤ {:.2}{}",
                x_b.x,
                x_b.y,
                lo.value,
                if lo.bracketed { "" } else { "*" },
                hi.value,
                if hi.bracketed { "" } else { "*" }
            ));
            if i >= 3 {
                sweep.push(exact);
            }
        }
        // A decrease beyond the root tolerance counts as a violation.
        let violations = sweep.windows(2).filter(|w| w[1] < w[0] * (1.0 - 2.0 * bounds::ROOT_REL_TOL)).count();
        ok &= violations <= 1;
        parts.push(format!("x_B sweep decreases {violations} time(s)"));
        Ok((ok, parts.join("; ")))
    };
    verdict(7, "ρ** sandwich", check())
}

/// `ρ*_min·R^γ` and `ρ*_max·R^γ` do not depend on `R` at fixed `ν̄`, `λ̄`.
pub fn bound_radius_scaling(base: &NetworkConfig, _scale: &Scale) -> CriterionResult {
    let check = || -> Check {
        let n = normalize(base).config;
        let d = n.derived();
        let mut products = Vec::new();
        for r in [0.02, 0.05, 0.1] {
            let area = PI * r * r;
            let mut cfg = with_radius(&n, r, d.nu_bar / area)?;
            cfg.lambda = d.lambda_bar / area;
            let (lo, hi) = bounds::rho_star_bounds(&cfg).map_err(err)?;
            products.push((lo * r.powf(n.gamma), hi * r.powf(n.gamma)));
        }
        let spread = |f: fn(&(f64, f64)) -> f64| {
            let v: Vec<f64> = products.iter().map(f).collect();
            let max = v.iter().cloned().fold(f64::MIN, f64::max);
            let min = v.iter().cloned().fold(f64::MAX, f64::min);
            (max - min) / max
        };
        let (s_lo, s_hi) = (spread(|p| p.0), spread(|p| p.1));
        Ok((s_lo < 1e-9 && s_hi < 1e-9, format!("relative spread {s_lo:.1e} (min), {s_hi:.1e} (max)")))
    };
    verdict(8, "bound scaling in R", check())
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// A randomized normalized scenario and a femtocell fully inside the home
/// cell.
fn random_scenario<R: Rng>(rng: &mut R) -> Result<(NetworkConfig, Point), String> {
    let r = rng.random_range(0.03..0.15);
    let area = PI * r * r;
    let cfg = NetworkConfig {
        cell_radius: 1.0,
        femto_radius: r,
        lambda: log_uniform(rng, 0.005, 0.5) / area,
        mu: log_uniform(rng, 0.2, 5.0),
        nu: IntensityProfile::constant(log_uniform(rng, 0.1, 3.0) / area, r).map_err(err)?,
        p: 1.0,
        q: log_uniform(rng, 1.0, 10.0),
        rho: log_uniform(rng, 0.1, 1e4),
        gamma: rng.random_range(2.5..4.5),
        threshold: log_uniform(rng, 0.03, 1.0),
        pathloss_constant: None,
    };
    let reach = 3f64.sqrt() / 2.0 - r;
    let d = reach * rng.random::<f64>().sqrt();
    let x_b = Point::polar(d, 2.0 * PI * rng.random::<f64>());
    Ok((cfg, x_b))
}

/// Every positive sufficient condition agrees with the analytic outage
/// comparison.
pub fn soundness_scan(_base: &NetworkConfig, scale: &Scale) -> CriterionResult {
    let check = || -> Check {
        let mut rng = ChaCha8Rng::seed_from_u64(scale.seed);
        let spec = &scale.scan_spec;
        let (mut macro_certs, mut femto_certs) = (0, 0);
        let mut counterexamples = Vec::new();
        for i in 0..scale.soundness_configs {
            let (cfg, x_b) = random_scenario(&mut rng)?;
            let (open_better, closed_better) = bounds::macro_sufficient_conditions(&cfg).map_err(err)?;
            if open_better > 0.0 || closed_better > 0.0 {
                macro_certs += 1;
                let gap = analytic::AccessComparison::new(&cfg, cfg.s_macro(), analytic::Level::Macro, spec)
                    .and_then(|c| c.log_gap(cfg.rho))
                    .map_err(err)?
                    .scalar();
                if (open_better > 0.0 && gap <= 0.0) || (closed_better > 0.0 && gap >= 0.0) {
                    counterexamples.push(format!("config {i} macro: certificates ({open_better:.3e}, {closed_better:.3e}), gap {gap:.3e}"));
                }
            }
            let (k1, k2) = bounds::femto_sufficient_conditions(x_b, &cfg).map_err(err)?;
            if k1 > 0.0 || k2 > 0.0 {
                femto_certs += 1;
                let gap = analytic::AccessComparison::new(&cfg, cfg.s_femto(), analytic::Level::Femto(x_b), spec)
                    .and_then(|c| c.log_gap(cfg.rho))
                    .map_err(err)?
                    .scalar();
                if (k1 > 0.0 && gap <= 0.0) || (k2 > 0.0 && gap >= 0.0) {
                    counterexamples.push(format!("config {i} femto: K = ({k1:.3e}, {k2:.3e}), gap {gap:.3e}"));
                }
            }
        }
        let mut detail = format!(
            "{} configs, {macro_certs} macro and {femto_certs} femto certificates, {} counterexamples",
            scale.soundness_configs,
            counterexamples.len()
        );
        if !counterexamples.is_empty() {
            detail.push_str(": ");
            detail.push_str(&counterexamples.join("; "));
        }
        // A scan without certificates would pass vacuously.
        let ok = counterexamples.is_empty() && macro_certs > 0 && femto_certs > 0;
        Ok((ok, detail))
    };
    verdict(9, "sufficient-condition soundness", check())
}

/// The factored macro-level Laplace transform against a direct Monte Carlo
/// average of `exp(−sI)`.
pub fn conditioning_identity(base: &NetworkConfig, scale: &Scale) -> CriterionResult {
    let check = || -> Check {
        let s = base.s_macro();
        let spec = SimSpec { trials: scale.realizations, seed: scale.seed ^ 0x5eed, ..SimSpec::default() };
        let summaries = simulator::simulate_summaries(base, &spec).map_err(err)?;
        let n = summaries.len() as f64;
        let mut ok = true;
        let mut parts = Vec::new();
        for mode in [Access::Open, Access::Closed] {
            let analytic = analytic::macro_laplace(s, base, mode, &scale.spec).map_err(err)?;
            let (sum, sum2) = summaries.iter().fold((0.0, 0.0), |(a, b), t| {
                let v = (-s * t.interference(mode, base.rho)).exp();
                (a + v, b + v * v)
            });
            let mean = sum / n;
            let se = ((sum2 / n - mean * mean).max(0.0) / n).sqrt();
            let z = (analytic - mean).abs() / se;
            ok &= z <= 3.0;
            parts.push(format!("{mode:?}: analytic {analytic:.5}, Monte Carlo {mean:.5} ± {se:.5} ({z:.2} SE)"));
        }
        Ok((ok, format!("{} realizations; {}", scale.realizations, parts.join("; "))))
    };
    verdict(10, "conditioning identity", check())
}

/// Outage is unchanged by normalizing the configuration.
pub fn normalization_invariance(base: &NetworkConfig, scale: &Scale) -> CriterionResult {
    let check = || -> Check {
        let spec = &scale.spec;
        let n = normalize(base);
        let x_b = at(base, 0.0, 100.0);
        let x_n = x_b * (1.0 / n.length_scale);
        let phys = [
            analytic::macro_outages(base, spec).map_err(err)?,
            analytic::femto_outages(x_b, base, spec).map_err(err)?,
        ];
        let norm = [
            analytic::macro_outages(&n.config, spec).map_err(err)?,
            analytic::femto_outages(x_n, &n.config, spec).map_err(err)?,
        ];
        let mut worst = 0.0f64;
        let mut ok = true;
        for (a, b) in phys.iter().zip(&norm) {
            for (p, q) in [(a.open.probability, b.open.probability), (a.closed.probability, b.closed.probability)] {
                let tol = 10.0 * spec.abs_tol.max(spec.rel_tol * p.abs());
                worst = worst.max((p - q).abs() / tol);
                ok &= (p - q).abs() <= tol;
            }
        }
        Ok((ok, format!("largest difference is {worst:.3} of the allowed 10× tolerance")))
    };
    verdict(11, "normalization invariance", check())
}

/// All criteria in order.
pub fn run_all(base: &NetworkConfig, scale: &Scale) -> Vec<CriterionResult> {
    let criteria: [fn(&NetworkConfig, &Scale) -> CriterionResult; 11] = [
        analytic_simulation_agreement,
        degenerate_equivalence,
        laplace_sanity,
        v_sandwich,
        rho_star_sandwich_fixed,
        rho_star_sandwich_random,
        rho_star2_sandwich,
        bound_radius_scaling,
        soundness_scan,
        conditioning_identity,
        normalization_invariance,
    ];
    if let Err(e) = base.validate() {
        return vec![CriterionResult { id: 0, name: "configuration", passed: false, detail: e.to_string() }];
    }
    criteria.iter().map(|c| c(base, scale)).collect()
}
