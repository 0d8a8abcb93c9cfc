//! Closed-form sufficient conditions for one access mode to beat the other,
//! and the break-even power enhancement factors `ρ*` (macro level) and
//! `ρ**` (femto level).
//!
//! Everything here works on the normalized configuration (`R_c = 1`,
//! `P = 1`); physical configurations are normalized on entry and femto base
//! station positions are given in the configuration's own length unit.
//!
//! The bounds rest on three ingredients:
//!
//! * the sandwich `V_min ≤ 𝐕 ≤ V_max` with `V_max = 2·V_min`
//!   `= 4π²R⁴(Tρ)^{2/γ}·B(γ)`, `B(γ) = 1/8 + 1/(4(γ+2)) + 1/((γ+2)(γ−2))`,
//!   for the plane integral of the handed-off UEs' femto-served kernel;
//! * the plane integrals `C_u` (victim at the macro base station) and
//!   `C_u′` (victim at the femto base station `x_B`) of the macro-served
//!   kernel;
//! * `ℛ_min(x_B) ≤ ℛ(x_B) ≤ ℛ_max(x_B)` for the in-cell removed-macro term,
//!   from bounds on the server distance inside the victim's femtocell.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::analytic::{plane_kernel_integral, AccessComparison, Level, QuadratureSpec};
use crate::error::{Error, Result};
use crate::geometry::{HexGrid, Point};
use crate::model::{normalize, NetworkConfig};
use crate::quadrature::{integrate, Tolerance};

/// Default root-search bracket on `ρ`, widened as needed.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-2, 1e6);
/// Relative accuracy of every root search on `ρ`.
pub const ROOT_REL_TOL: f64 = 1e-3;

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("pathloss exponent must exceed 2, got {gamma}")))
    }
}

/// `B(γ) = 1/8 + 1/(4(γ+2)) + 1/((γ+2)(γ−2))`, which simplifies to
/// `γ/(8(γ−2))`.
pub fn shape_factor(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(0.125 + 1.0 / (4.0 * (gamma + 2.0)) + 1.0 / ((gamma + 2.0) * (gamma - 2.0)))
}

/// Bounds on `𝐕 = ∫∫_{|x−x0|≤R} X/(1+X) dx dx0` with
/// `X = T_eff·ρ·|x − x0|^γ/|x|^γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VBounds {
    pub v_min: f64,
    pub v_max: f64,
}

pub fn v_bounds(t_eff: f64, rho: f64, gamma: f64, r_norm: f64) -> Result<VBounds> {
    let b = shape_factor(gamma)?;
    for (name, v) in [("T_eff", t_eff), ("rho", rho), ("R", r_norm)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let v_min = 2.0 * PI * PI * r_norm.powi(4) * (t_eff * rho).powf(2.0 / gamma) * b;
    Ok(VBounds { v_min, v_max: 2.0 * v_min })
}

/// Accuracy used for the plane-integral constants.
const CONSTANT_SPEC: QuadratureSpec = QuadratureSpec { rel_tol: 1e-8, abs_tol: 1e-10, truncation_radius: None };

type CacheKey = [u64; 4];

fn cu_cache() -> &'static RwLock<HashMap<CacheKey, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The plane integral of the macro-served kernel at threshold `t` on the
/// unit grid, with the victim at `victim` (in cell radii). Cached.
pub fn compute_cu_at(t: f64, gamma: f64, victim: Point) -> Result<f64> {
    check_gamma(gamma)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("threshold must be non-negative, got {t}")));
    }
    let key = [t.to_bits(), gamma.to_bits(), victim.x.to_bits(), victim.y.to_bits()];
    if let Some(&v) = cu_cache().read().expect("cache lock").get(&key) {
        return Ok(v);
    }
    let grid = HexGrid::new(1.0)?;
    let v = plane_kernel_integral(&grid, victim, t, gamma, &CONSTANT_SPEC)?.scalar();
    cu_cache().write().expect("cache lock").insert(key, v);
    Ok(v)
}

/// `C_u`: the plane integral of the macro-served kernel seen from the macro
/// base station.
pub fn compute_cu(t: f64, gamma: f64) -> Result<f64> {
    compute_cu_at(t, gamma, Point::ORIGIN)
}

/// `C_u′` at `T′`, seen from the macro base station like [`compute_cu`].
/// The femto-level conditions use [`compute_cu_at`] at the femto base
/// station instead, which is what their derivation integrates.
pub fn compute_cu_prime(t_prime: f64, gamma: f64) -> Result<f64> {
    compute_cu(t_prime, gamma)
}

/// What a pair of sufficient conditions certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    OpenBetter,
    ClosedBetter,
    /// Neither condition holds (e.g. near the break-even point, or with
    /// very few femtocells at the femto level).
    Inconclusive,
}

impl Verdict {
    /// From the open-better and closed-better conditions; positive values
    /// certify.
    pub fn from_conditions(open_better: f64, closed_better: f64) -> Self {
        match (open_better > 0.0, closed_better > 0.0) {
            (true, false) => Verdict::OpenBetter,
            (false, true) => Verdict::ClosedBetter,
            // Both positive cannot happen for valid inputs; refuse to pick.
            _ => Verdict::Inconclusive,
        }
    }
}

/// Macro-level constants and bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroBoundsReport {
    pub v_min: f64,
    pub v_max: f64,
    pub c_u: f64,
    /// Positive certifies that open access has the lower macro outage.
    pub sufficient_open_better: f64,
    /// Positive certifies that closed access has the lower macro outage.
    pub sufficient_closed_better: f64,
    pub verdict: Verdict,
    pub rho_star_min: f64,
    pub rho_star_max: f64,
    /// The break-even point from the quadrature engine, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_star_exact: Option<f64>,
}

/// The two sufficient conditions at the configuration's `ρ`: the first is
/// positive only if open access is certainly better, the second only if
/// closed access is.
pub fn macro_sufficient_conditions(cfg: &NetworkConfig) -> Result<(f64, f64)> {
    let r = macro_report(cfg)?;
    Ok((r.sufficient_open_better, r.sufficient_closed_better))
}

fn macro_report(cfg: &NetworkConfig) -> Result<MacroBoundsReport> {
    cfg.validate()?;
    let n = normalize(cfg).config;
    let d = n.derived();
    let r = n.femto_radius;
    let v = v_bounds(n.threshold, n.rho, n.gamma, r)?;
    let c_u = compute_cu(n.threshold, n.gamma)?;
    let (rho_star_min, rho_star_max) = rho_star_bounds(cfg)?;
    let open = -v.v_max + PI * r * r * c_u * (-d.nu_bar).exp();
    let closed = -PI * r * r * c_u * d.lambda_bar.exp() + v.v_min * (-d.lambda_bar - d.nu_bar).exp();
    Ok(MacroBoundsReport {
        v_min: v.v_min,
        v_max: v.v_max,
        c_u,
        sufficient_open_better: open,
        sufficient_closed_better: closed,
        verdict: Verdict::from_conditions(open, closed),
        rho_star_min,
        rho_star_max,
        rho_star_exact: None,
    })
}

/// The closed-form bracket `(ρ*_min, ρ*_max)`.
pub fn rho_star_bounds(cfg: &NetworkConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let n = normalize(cfg).config;
    let d = n.derived();
    let b = shape_factor(n.gamma)?;
    let c_u = compute_cu(n.threshold, n.gamma)?;
    let area = PI * n.femto_radius.powi(2);
    let e = 0.5 * n.gamma;
    let lo = (c_u * (-d.nu_bar).exp() / (4.0 * area * b)).powf(e) / n.threshold;
    let hi = (c_u * (d.nu_bar + 2.0 * d.lambda_bar).exp() / (2.0 * area * b)).powf(e) / n.threshold;
    Ok((lo, hi))
}

/// Macro-level report including the quadrature break-even point.
pub fn macro_bounds(cfg: &NetworkConfig, spec: Option<&QuadratureSpec>) -> Result<MacroBoundsReport> {
    let mut r = macro_report(cfg)?;
    if let Some(spec) = spec {
        r.rho_star_exact = Some(rho_star_exact(cfg, spec)?);
    }
    Ok(r)
}

/// Bisection on `ln ρ` for a sign change of `f` (assumed to be decreasing
/// through its root) on `[lo, hi]`, to relative accuracy `ROOT_REL_TOL`.
fn bisect_log<F>(mut f: F, lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let sign_lo = f_lo > 0.0;
    debug_assert!(sign_lo != (f_hi > 0.0));
    while b - a > ROOT_REL_TOL {
        let m = 0.5 * (a + b);
        let fm = f(m.exp())?;
        if fm == 0.0 {
            return Ok(m.exp());
        }
        if (fm > 0.0) == sign_lo {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// The root of `f` on a bracket containing `[DEFAULT_BRACKET]` and
/// `[must_lo, must_hi]`, or a no-sign-change error.
fn search_root<F>(what: &'static str, mut f: F, must_lo: f64, must_hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let lo = DEFAULT_BRACKET.0.min(must_lo);
    let hi = DEFAULT_BRACKET.1.max(must_hi);
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NoSignChange { what, lo, hi });
    }
    bisect_log(f, lo, hi, f_lo, f_hi)
}

/// `ρ*`: the power enhancement at which open and closed access give the
/// same macro-level outage.
///
/// Without femtocells the two modes coincide for every `ρ`, which is
/// reported as a degenerate case.
pub fn rho_star_exact(cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<f64> {
    cfg.validate()?;
    if cfg.mu == 0.0 || cfg.lambda == 0.0 {
        return Err(Error::Degenerate("open and closed access coincide for every rho"));
    }
    let (bmin, bmax) = rho_star_bounds(cfg)?;
    let cmp = AccessComparison::new(cfg, cfg.s_macro(), Level::Macro, spec)?;
    search_root("macro outage difference", |rho| Ok(cmp.log_gap(rho)?.scalar()), bmin / 10.0, bmax * 10.0)
}

/// `(ℛ_min(x_B), ℛ_max(x_B))` on the unit grid.
///
/// Both bound `ℛ(x_B) = ∫_{|x−x_B|≤R} X/(1+X) dx`, `X = T′·d_BS(x)^γ/|x−x_B|^γ`,
/// by replacing the server distance with constants on half-disks. The lower
/// bound presumes the femtocell lies inside the home macrocell (so that
/// `d_BS(x) = |x|` there).
pub fn r_min_max(x_b: Point, t_prime: f64, gamma: f64, r_norm: f64) -> Result<(f64, f64)> {
    check_gamma(gamma)?;
    if !(r_norm.is_finite() && r_norm > 0.0 && t_prime.is_finite() && t_prime >= 0.0 && x_b.is_finite()) {
        return Err(Error::Domain("r_min_max needs R > 0, T′ ≥ 0 and a finite x_B".into()));
    }
    // π∫_0^R B·r/(r^γ + B) dr with B = T′·dist^γ: the kernel integrated over
    // a half-disk with the server distance frozen at `dist`.
    let half = |dist: f64| -> f64 {
        let b = t_prime * dist.powf(gamma);
        if b == 0.0 {
            return 0.0;
        }
        let q = integrate(
            |r| if r == 0.0 { 0.0 } else { b * r / (r.powf(gamma) + b) },
            0.0,
            r_norm,
            &[],
            Tolerance::new(1e-300, 1e-8),
        );
        PI * q.scalar()
    };
    let d = x_b.norm();
    let r_min = if d <= r_norm { half(d) } else { half(d - r_norm) + half(d) };
    let r_max = half(d + r_norm) + half((d * d + r_norm * r_norm).sqrt());
    Ok((r_min, r_max))
}

/// A root of a sufficient condition, or the bracket edge when the
/// condition does not change sign there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRoot {
    pub value: f64,
    /// False when `value` is a bracket edge rather than a root.
    pub bracketed: bool,
}

/// Femto-level constants, conditions and bounds at one `x_B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemtoBoundsReport {
    /// Femto base station position, in the configuration's length unit.
    pub x_b: Point,
    pub v_min: f64,
    pub v_max: f64,
    pub c_u_prime: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// Positive certifies that open access has the lower femto outage.
    pub k1: f64,
    /// Positive certifies that closed access has the lower femto outage.
    pub k2: f64,
    pub verdict: Verdict,
    pub rho_star2_min: BoundRoot,
    pub rho_star2_max: BoundRoot,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_star2_exact: Option<f64>,
}

/// The ρ-independent ingredients of `K1`, `K2`.
struct FemtoTerms {
    t_prime: f64,
    gamma: f64,
    r: f64,
    mu: f64,
    nu_bar: f64,
    lambda_bar: f64,
    c_u_prime: f64,
    r_min: f64,
    r_max: f64,
}

impl FemtoTerms {
    fn new(x_b: Point, cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        if !(x_b.is_finite() && cfg.grid().nearest_index(x_b) == (0, 0)) {
            return Err(Error::Domain(format!("femto base station ({}, {}) is not inside the home macrocell", x_b.x, x_b.y)));
        }
        let n = normalize(cfg).config;
        let xb = x_b * (1.0 / cfg.cell_radius);
        let t_prime = n.threshold / n.q;
        let d = n.derived();
        let (r_min, r_max) = r_min_max(xb, t_prime, n.gamma, n.femto_radius)?;
        Ok(FemtoTerms {
            t_prime,
            gamma: n.gamma,
            r: n.femto_radius,
            mu: n.mu,
            nu_bar: d.nu_bar,
            lambda_bar: d.lambda_bar,
            c_u_prime: compute_cu_at(t_prime, n.gamma, xb)?,
            r_min,
            r_max,
        })
    }

    fn k(&self, rho: f64) -> Result<(f64, f64, VBounds)> {
        let v = v_bounds(self.t_prime, rho, self.gamma, self.r)?;
        let area = PI * self.r * self.r;
        let a = self.t_prime * rho;
        let own = area * a / (a + 1.0);
        let k1 = -self.mu * v.v_max + self.mu * area * self.c_u_prime * (-self.nu_bar).exp() - own + self.r_min;
        let k2 = -self.mu * area * self.c_u_prime * self.lambda_bar.exp()
            + self.mu * v.v_min * (-self.nu_bar - self.lambda_bar).exp()
            + own
            - self.r_max;
        Ok((k1, k2, v))
    }
}

/// `(K1, K2)` at the configuration's `ρ` for the femto base station at
/// `x_b`.
pub fn femto_sufficient_conditions(x_b: Point, cfg: &NetworkConfig) -> Result<(f64, f64)> {
    let t = FemtoTerms::new(x_b, cfg)?;
    let (k1, k2, _) = t.k(cfg.rho)?;
    Ok((k1, k2))
}

/// Root of a monotone sufficient condition over `ρ` on the default bracket,
/// reported one-sided (at the edge, flagged) when it does not change sign.
fn one_sided_root<F>(mut f: F) -> Result<BoundRoot>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (lo, hi) = DEFAULT_BRACKET;
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if (f_lo > 0.0) == (f_hi > 0.0) {
        // K1 falls and K2 rises with ρ: the side that the values sit on
        // tells which edge the root lies beyond.
        let rising = f_hi > f_lo;
        let positive = f_lo > 0.0;
        let edge = if positive != rising { hi } else { lo };
        return Ok(BoundRoot { value: edge, bracketed: false });
    }
    Ok(BoundRoot { value: bisect_log(f, lo, hi, f_lo, f_hi)?, bracketed: true })
}

/// `(ρ**_min, ρ**_max)`: the roots of `K1 = 0` and `K2 = 0`.
pub fn rho_star2_bounds(x_b: Point, cfg: &NetworkConfig) -> Result<(BoundRoot, BoundRoot)> {
    let t = FemtoTerms::new(x_b, cfg)?;
    let lo = one_sided_root(|rho| Ok(t.k(rho)?.0))?;
    let hi = one_sided_root(|rho| Ok(t.k(rho)?.1))?;
    Ok((lo, hi))
}

/// `ρ**(x_B)`: the power enhancement at which open and closed access give
/// the same outage for a femto UE of the femtocell at `x_b`.
///
/// Without macro UEs nothing is handed off and the two modes coincide for
/// every `ρ`, which is reported as a degenerate case.
pub fn rho_star2_exact(x_b: Point, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<f64> {
    cfg.validate()?;
    if cfg.lambda == 0.0 {
        return Err(Error::Degenerate("open and closed access coincide for every rho"));
    }
    let cmp = AccessComparison::new(cfg, cfg.s_femto(), Level::Femto(x_b), spec)?;
    search_root(
        "femto outage difference",
        |rho| Ok(cmp.log_gap(rho)?.scalar()),
        DEFAULT_BRACKET.0,
        DEFAULT_BRACKET.1,
    )
}

/// Femto-level report at `x_b`, including the quadrature break-even point
/// when `spec` is given.
pub fn femto_bounds(x_b: Point, cfg: &NetworkConfig, spec: Option<&QuadratureSpec>) -> Result<FemtoBoundsReport> {
    let t = FemtoTerms::new(x_b, cfg)?;
    let (k1, k2, v) = t.k(cfg.rho)?;
    let (lo, hi) = rho_star2_bounds(x_b, cfg)?;
    let exact = match spec {
        Some(spec) => Some(rho_star2_exact(x_b, cfg, spec)?),
        None => None,
    };
    Ok(FemtoBoundsReport {
        x_b,
        v_min: v.v_min,
        v_max: v.v_max,
        c_u_prime: t.c_u_prime,
        r_min: t.r_min,
        r_max: t.r_max,
        k1,
        k2,
        verdict: Verdict::from_conditions(k1, k2),
        rho_star2_min: lo,
        rho_star2_max: hi,
        rho_star2_exact: exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_factor_simplifies() {
        for g in [2.5, 3.0, 4.0, 6.0] {
            assert!((shape_factor(g).unwrap() - g / (8.0 * (g - 2.0))).abs() < 1e-15);
        }
        assert!(shape_factor(2.0).is_err());
    }

    #[test]
    fn v_bounds_reference_values() {
        let v = v_bounds(1.0, 1.0, 4.0, 1.0).unwrap();
        assert!((v.v_max - PI * PI).abs() < 1e-12);
        assert!((v.v_min - PI * PI / 2.0).abs() < 1e-12);
        let v2 = v_bounds(0.3, 2.0, 3.0, 0.2).unwrap();
        let v1 = v_bounds(0.3, 2.0, 3.0, 0.1).unwrap();
        assert!((v2.v_max / v1.v_max - 16.0).abs() < 1e-12);
    }

    #[test]
    fn r_bounds_at_the_origin_and_ordering() {
        let (lo, hi) = r_min_max(Point::ORIGIN, 0.1, 3.0, 0.1).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
        for x in [0.05, 0.1, 0.2, 0.5] {
            let (lo, hi) = r_min_max(Point::new(0.0, x), 0.025, 3.0, 0.1).unwrap();
            assert!(lo <= hi, "x = {x}");
        }
    }

    #[test]
    fn bisection_hits_a_known_root() {
        let r = search_root("test", |x| Ok(3.0 - x), 1.0, 1.0).unwrap();
        assert!((r / 3.0 - 1.0).abs() < 1e-3);
    }
}
