//! Laplace transforms of the aggregate uplink interference and the outage
//! probabilities derived from them.
//!
//! Under unit-mean exponential fading the outage probability of a UE whose
//! signal is power-controlled to `P_T` is `1 − ℒ_I(T/P_T)`. At the macro
//! level the victim is the macro base station at the origin and
//!
//! ```text
//! ℒ_I = ℒ₀ · exp(−μ∫(1 − 𝒥))        (open access,   𝒥 = 𝒲𝒱/𝒰)
//! ℒ_I = ℒ₀ · exp(−μ∫(1 − 𝒲))        (closed access)
//! ```
//!
//! At the femto level the victim is a femto base station at `x_B` and the
//! in-cell factors `𝒲″ = e^{−sQν̄/(sQ+1)}`, `𝒱″ = e^{−sρPλ̄/(sρP+1)}` and `𝒰″`
//! multiply in (only `𝒲″` under closed access).

mod field;
mod kernel;
mod lattice;

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use field::FieldEvaluator;
pub(crate) use lattice::hex_moment;

use crate::error::{Error, Result};
use crate::geometry::{HexGrid, Point};
use crate::model::NetworkConfig;
use crate::quadrature::{integrate_triangles, Quad, Tolerance, Triangle};

/// Accuracy controls of the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Radius, in cell radii, beyond which femtocells are treated to first
    /// order in the removed macro interference. `None` picks it from the
    /// kernel strength.
    pub truncation_radius: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-6, abs_tol: 1e-9, truncation_radius: None }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("quadrature tolerances must be positive".into()));
        }
        if let Some(k) = self.truncation_radius {
            if !(k >= 4.0 && k.is_finite()) {
                return Err(Error::InvalidConfig(format!("truncation radius must be at least 4 cell radii, got {k}")));
            }
        }
        Ok(())
    }

    /// Near-field radius in cell radii: the point beyond which the
    /// macro-served kernel `a·d_BS^γ/r^γ` is below 10⁻³.
    pub(crate) fn near_radius(&self, a_p: f64, gamma: f64) -> f64 {
        self.truncation_radius.unwrap_or_else(|| (1.0 + (1e3 * a_p).powf(1.0 / gamma)).max(4.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Access {
    Open,
    Closed,
}

/// Which base station is the victim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// The macro base station at the origin.
    Macro,
    /// A femto base station at the given location in `ℋ(0)`.
    Femto(Point),
}

impl Level {
    pub fn victim(&self) -> Point {
        match *self {
            Level::Macro => Point::ORIGIN,
            Level::Femto(x) => x,
        }
    }

    /// The Laplace variable at which outage is evaluated.
    pub fn outage_s(&self, cfg: &NetworkConfig) -> f64 {
        match self {
            Level::Macro => cfg.s_macro(),
            Level::Femto(_) => cfg.s_femto(),
        }
    }
}

/// An outage probability with its estimated quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageValue {
    pub probability: f64,
    pub quad_error: f64,
}

/// Open- and closed-access outage for the same scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessPair {
    pub open: OutageValue,
    pub closed: OutageValue,
}

/// A fully specified Laplace-transform evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceContext {
    pub config: NetworkConfig,
    pub s: f64,
    pub level: Level,
    pub access: Access,
}

impl LaplaceContext {
    pub fn evaluate(&self, spec: &QuadratureSpec) -> Result<f64> {
        let cmp = AccessComparison::new(&self.config, self.s, self.level, spec)?;
        let q = cmp.log_laplace(self.access, self.config.rho)?;
        Ok(q.scalar().exp())
    }
}

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Laplace variable must be finite and non-negative, got {s}")))
    }
}

fn check_in_home_cell(cfg: &NetworkConfig, x: Point) -> Result<()> {
    if x.is_finite() && cfg.grid().nearest_index(x) == (0, 0) {
        Ok(())
    } else {
        Err(Error::Domain(format!("femto base station ({}, {}) is not inside the home macrocell", x.x, x.y)))
    }
}

fn converged(q: Quad, spec: &QuadratureSpec) -> Result<Quad> {
    let requested = spec.abs_tol.max(spec.rel_tol * q.scalar().abs());
    if q.converged || q.error <= 10.0 * requested {
        Ok(q)
    } else {
        Err(Error::Quadrature { achieved: q.error, requested })
    }
}

/// Shared-cache evaluation of open and closed access for one victim and
/// Laplace variable. Inner integrals are reused across access modes and
/// across values of `ρ`.
pub struct AccessComparison<'a> {
    field: FieldEvaluator<'a>,
    level: Level,
    s: f64,
    spec: QuadratureSpec,
}

impl<'a> AccessComparison<'a> {
    pub fn new(cfg: &'a NetworkConfig, s: f64, level: Level, spec: &QuadratureSpec) -> Result<Self> {
        cfg.validate()?;
        spec.validate()?;
        check_s(s)?;
        if let Level::Femto(x) = level {
            check_in_home_cell(cfg, x)?;
        }
        Ok(AccessComparison { field: FieldEvaluator::new(cfg, s, level.victim(), spec), level, s, spec: *spec })
    }

    pub fn field(&self) -> &FieldEvaluator<'a> {
        &self.field
    }

    fn cfg(&self) -> &NetworkConfig {
        self.field.config()
    }

    /// `log ℒ` under closed access.
    pub fn log_closed(&self) -> Result<Quad> {
        let l0 = converged(self.field.macro_exponent(), &self.spec)?;
        let femto = converged(self.field.closed_exponent(), &self.spec)?;
        let mut q = field::scale(field::add(l0, femto), -1.0);
        if let Level::Femto(_) = self.level {
            let a = self.s * self.cfg().q;
            q.value[0] -= self.cfg().nu.total() * a / (a + 1.0);
        }
        Ok(q)
    }

    /// `log ℒ_open − log ℒ_closed` at power enhancement `rho`; positive
    /// means open access has the lower outage.
    pub fn log_gap(&self, rho: f64) -> Result<Quad> {
        let mut q = converged(self.field.open_gain(rho), &self.spec)?;
        if let Level::Femto(x) = self.level {
            let a = self.s * self.cfg().p * rho;
            let lambda_bar = PI * self.cfg().femto_radius.powi(2) * self.cfg().lambda;
            q.value[0] += self.field.upsilon(x) - lambda_bar * a / (a + 1.0);
        }
        Ok(q)
    }

    pub fn log_laplace(&self, access: Access, rho: f64) -> Result<Quad> {
        let closed = self.log_closed()?;
        match access {
            Access::Closed => Ok(closed),
            Access::Open => Ok(field::add(closed, self.log_gap(rho)?)),
        }
    }

    pub fn outage(&self, access: Access, rho: f64) -> Result<OutageValue> {
        let q = self.log_laplace(access, rho)?;
        Ok(to_outage(q))
    }

    pub fn outages(&self, rho: f64) -> Result<AccessPair> {
        let closed = self.log_closed()?;
        let open = field::add(closed, self.log_gap(rho)?);
        Ok(AccessPair { open: to_outage(open), closed: to_outage(closed) })
    }
}

fn to_outage(log_l: Quad) -> OutageValue {
    let l = log_l.scalar().exp();
    OutageValue { probability: -log_l.scalar().exp_m1(), quad_error: l * log_l.error }
}

/// `∫_{ℝ²} X/(1+X) dx` with `X = a·d_BS(x)^γ/|x − victim|^γ`, the plane
/// integral behind `ℒ₀` and the constants `C_u`, `C_u′`. The result is in
/// squared length units of `grid`.
pub fn plane_kernel_integral(grid: &HexGrid, victim: Point, a: f64, gamma: f64, spec: &QuadratureSpec) -> Result<Quad> {
    spec.validate()?;
    if !(gamma.is_finite() && gamma > 2.0) {
        return Err(Error::Domain(format!("pathloss exponent must exceed 2, got {gamma}")));
    }
    check_s(a)?;
    let rc2 = grid.cell_radius().powi(2);
    let q = lattice::plane_macro_integral(grid, victim, a, gamma, spec.abs_tol * rc2, spec.rel_tol);
    converged(q, spec)
}

/// `ℒ₀(s)` with the victim at the origin.
pub fn eval_l0(s: f64, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<f64> {
    eval_l0_at(s, Point::ORIGIN, cfg, spec)
}

/// `ℒ₀` with the victim at `victim` (`ℒ₀′(x_B)` at the femto level).
pub fn eval_l0_at(s: f64, victim: Point, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<f64> {
    let level = if victim == Point::ORIGIN { Level::Macro } else { Level::Femto(victim) };
    let cmp = AccessComparison::new(cfg, s, level, spec)?;
    let q = converged(cmp.field.macro_exponent(), spec)?;
    Ok((-q.scalar()).exp())
}

/// `𝒲(x0)` for the macro victim at the origin.
pub fn eval_w(s: f64, x0: Point, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<f64> {
    let cmp = AccessComparison::new(cfg, s, Level::Macro, spec)?;
    Ok((-cmp.field.omega(x0.norm())).exp())
}

/// `𝒱(x0)` for the macro victim at the origin.
pub fn eval_v(s: f64, x0: Point, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<f64> {
    let cmp = AccessComparison::new(cfg, s, Level::Macro, spec)?;
    Ok((-cmp.field.psi(x0.norm(), cfg.rho)).exp())
}

/// `𝒰(x0)` for the macro victim at the origin.
pub fn eval_u(s: f64, x0: Point, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<f64> {
    let cmp = AccessComparison::new(cfg, s, Level::Macro, spec)?;
    Ok((-cmp.field.upsilon(x0)).exp())
}

pub fn macro_laplace(s: f64, cfg: &NetworkConfig, access: Access, spec: &QuadratureSpec) -> Result<f64> {
    let cmp = AccessComparison::new(cfg, s, Level::Macro, spec)?;
    Ok(cmp.log_laplace(access, cfg.rho)?.scalar().exp())
}

pub fn macro_outage(cfg: &NetworkConfig, access: Access, spec: &QuadratureSpec) -> Result<OutageValue> {
    AccessComparison::new(cfg, cfg.s_macro(), Level::Macro, spec)?.outage(access, cfg.rho)
}

/// Macro-level outage under both access modes.
pub fn macro_outages(cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<AccessPair> {
    AccessComparison::new(cfg, cfg.s_macro(), Level::Macro, spec)?.outages(cfg.rho)
}

pub fn femto_laplace(s: f64, x_b: Point, cfg: &NetworkConfig, access: Access, spec: &QuadratureSpec) -> Result<f64> {
    let cmp = AccessComparison::new(cfg, s, Level::Femto(x_b), spec)?;
    Ok(cmp.log_laplace(access, cfg.rho)?.scalar().exp())
}

/// Outage of a femto UE served by the femto base station at `x_b`. The
/// typical UE's position does not matter: its signal is `Q·h` wherever it
/// is.
pub fn femto_outage(x_b: Point, cfg: &NetworkConfig, access: Access, spec: &QuadratureSpec) -> Result<OutageValue> {
    AccessComparison::new(cfg, cfg.s_femto(), Level::Femto(x_b), spec)?.outage(access, cfg.rho)
}

pub fn femto_outages(x_b: Point, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<AccessPair> {
    AccessComparison::new(cfg, cfg.s_femto(), Level::Femto(x_b), spec)?.outages(cfg.rho)
}

/// Accuracy of the hexagon average (the averaged function is itself a
/// quadrature result, so a modest tolerance is appropriate).
const AVERAGE_TOL: Tolerance = Tolerance { abs: 2e-5, rel: 1e-3, max_subdivisions: 3 };

/// The mean of `f` over `ℋ(0)`, assuming `f` shares the lattice's D6
/// symmetry, computed on the fundamental triangle (one twelfth of the
/// hexagon).
pub fn hexagon_average<F>(grid: &HexGrid, mut f: F, tol: Tolerance) -> Result<Quad>
where
    F: FnMut(Point) -> Result<f64>,
{
    let rc = grid.cell_radius();
    let tri = Triangle {
        v: [Point::ORIGIN, Point::new(rc, 0.0), Point::new(0.75 * rc, 0.25 * 3f64.sqrt() * rc)],
        tag: (),
    };
    let area = tri.area();
    let failure: Cell<Option<Error>> = Cell::new(None);
    let q = integrate_triangles(
        |_, p| match f(p) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        &[tri],
        3,
        Tolerance { abs: tol.abs * area, ..tol },
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(Quad { value: [q.scalar() / area], error: q.error / area, ..q })
}

fn average_pair(cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<(Quad, Quad)> {
    let grid = cfg.grid();
    // Both averages visit the same nodes; evaluate each node once.
    let memo: RefCell<HashMap<(u64, u64), AccessPair>> = RefCell::new(HashMap::new());
    let pair_at = |x: Point| -> Result<AccessPair> {
        let key = (x.x.to_bits(), x.y.to_bits());
        if let Some(p) = memo.borrow().get(&key) {
            return Ok(*p);
        }
        let p = femto_outages(x, cfg, spec)?;
        memo.borrow_mut().insert(key, p);
        Ok(p)
    };
    let closed = hexagon_average(&grid, |x| Ok(pair_at(x)?.closed.probability), AVERAGE_TOL)?;
    let open = hexagon_average(&grid, |x| Ok(pair_at(x)?.open.probability), AVERAGE_TOL)?;
    Ok((open, closed))
}

/// Femto-level outage averaged over femto base station positions in
/// `ℋ(0)`.
pub fn femto_outage_avg(cfg: &NetworkConfig, access: Access, spec: &QuadratureSpec) -> Result<OutageValue> {
    cfg.validate()?;
    let grid = cfg.grid();
    let q = hexagon_average(
        &grid,
        |x| Ok(femto_outage(x, cfg, access, spec)?.probability),
        AVERAGE_TOL,
    )?;
    Ok(OutageValue { probability: q.scalar(), quad_error: q.error })
}

pub fn femto_outages_avg(cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<AccessPair> {
    cfg.validate()?;
    let (open, closed) = average_pair(cfg, spec)?;
    Ok(AccessPair {
        open: OutageValue { probability: open.scalar(), quad_error: open.error },
        closed: OutageValue { probability: closed.scalar(), quad_error: closed.error },
    })
}
