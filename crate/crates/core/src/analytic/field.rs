//! The femtocell field: Laplace exponents contributed by femtocells,
//! reduced to radial integrals about the victim.
//!
//! For a femto base station at `x0`, with `d = |x0 − v|`:
//!
//! * `ω(d) = ∫ ν·k_femto(sQ)` over its disk (local UEs, `𝒲 = e^{−ω}`),
//! * `ψ(d) = λ∫ k_femto(sρP)` (handed-off UEs at `ρP`, `𝒱 = e^{−ψ}`),
//! * `υ(x0) = λ∫ k_macro(sP)` (the same UEs had they stayed macro-served,
//!   `𝒰 = e^{−υ}`).
//!
//! `ω` and `ψ` depend on `x0` only through `d`; `υ` does not, but enters the
//! open-access integrand only through its angular mean at each `d`. With
//! `J = e^{−ω−ψ+υ}`:
//!
//! ```text
//! ∫(1 − W) = 2π∫ d·(1 − e^{−ω}) dd
//! ∫(J − W) = 2π∫_0^K d·[e^{−ω}(e^{−ψ} − 1) + e^{−ω−ψ}(⟨e^υ⟩ − 1)] dd
//!          + 2π∫_K^∞ d·e^{−ω}(e^{−ψ} − 1) dd + ∫_{|x0−v|>K} υ
//! ```
//!
//! where the last term uses `e^υ − 1 ≈ υ` (υ is tiny that far out) and the
//! exact identity `∫_{ℝ²} υ = λπR²·C(v, sP)`.
//!
//! The angular mean `⟨υ⟩(d)` needs no nested quadrature: averaging the disk
//! over rotations about the victim is the same as integrating the circular
//! mean of the kernel, so `⟨υ⟩(d) = λ∫ r·Θ(r)·w(r, d) dr` where `Θ(r)` is the
//! kernel integrated around the circle of radius `r` and `w` is the fraction
//! of that circle lying inside the disk. Only the small remainder
//! `⟨e^υ − 1 − υ⟩` is averaged directly, at a coarse tolerance.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use super::kernel::{femto_disk, macro_circle, macro_disk, COARSE, FINE};
use super::lattice::plane_macro_integral;
use super::QuadratureSpec;
use crate::geometry::{HexGrid, Point};
use crate::model::NetworkConfig;
use crate::quadrature::{integrate, Quad, Tolerance};

/// Angular means of `e^υ − 1` and `υ` on the circle of radius `d`.
#[derive(Debug, Clone, Copy)]
struct NearSample {
    e_minus_1: f64,
    upsilon: f64,
}

/// Evaluates Laplace exponents for one victim location and Laplace
/// variable. Inner integrals are memoised by radius so repeated
/// evaluations (e.g. across `ρ` during a root search) are cheap.
pub struct FieldEvaluator<'a> {
    cfg: &'a NetworkConfig,
    grid: HexGrid,
    victim: Point,
    /// `sP`, `sQ`.
    a_p: f64,
    a_q: f64,
    gamma: f64,
    near_radius: f64,
    tol: Tolerance,
    /// The D6 symmetry of the lattice about the victim can be used.
    symmetric: bool,
    /// Radii about the victim where `Θ` has kinks: distances to hexagon
    /// vertices and to the feet of perpendiculars on hexagon edges.
    critical_radii: Vec<f64>,
    omega_memo: RefCell<HashMap<u64, f64>>,
    circle_memo: RefCell<HashMap<u64, f64>>,
    near_memo: RefCell<HashMap<u64, NearSample>>,
    plane: RefCell<Option<Quad>>,
    near_upsilon: RefCell<Option<Quad>>,
    closed: RefCell<Option<Quad>>,
}

impl<'a> FieldEvaluator<'a> {
    /// `cfg` must already be validated; `s` is in reciprocal power units.
    pub fn new(cfg: &'a NetworkConfig, s: f64, victim: Point, spec: &QuadratureSpec) -> Self {
        let grid = cfg.grid();
        let a_p = s * cfg.p;
        let near_radius = spec.near_radius(a_p, cfg.gamma) * cfg.cell_radius;
        FieldEvaluator {
            cfg,
            victim,
            a_p,
            a_q: s * cfg.q,
            gamma: cfg.gamma,
            near_radius,
            tol: Tolerance { abs: spec.abs_tol, rel: spec.rel_tol, max_subdivisions: 600 },
            symmetric: victim == Point::ORIGIN,
            critical_radii: critical_radii(&grid, victim, near_radius + 2.0 * cfg.femto_radius),
            grid,
            omega_memo: RefCell::new(HashMap::new()),
            circle_memo: RefCell::new(HashMap::new()),
            near_memo: RefCell::new(HashMap::new()),
            plane: RefCell::new(None),
            near_upsilon: RefCell::new(None),
            closed: RefCell::new(None),
        }
    }

    pub fn victim(&self) -> Point {
        self.victim
    }

    pub fn config(&self) -> &NetworkConfig {
        self.cfg
    }

    /// `C(v, sP) = ∫_{ℝ²} k_macro(sP)` (squared length units).
    pub fn plane_integral(&self) -> Quad {
        if let Some(q) = *self.plane.borrow() {
            return q;
        }
        let rc2 = self.cfg.cell_radius * self.cfg.cell_radius;
        let q = plane_macro_integral(&self.grid, self.victim, self.a_p, self.gamma, 1e-3 * self.tol.abs * rc2, 1e-2 * self.tol.rel);
        *self.plane.borrow_mut() = Some(q);
        q
    }

    /// Exponent of `ℒ₀`: `λ·C(v, sP)`.
    pub fn macro_exponent(&self) -> Quad {
        let q = self.plane_integral();
        scale(q, self.cfg.lambda)
    }

    fn x0_at(&self, d: f64) -> Point {
        self.victim + Point::new(d, 0.0)
    }

    /// `ω(d)`.
    pub fn omega(&self, d: f64) -> f64 {
        if let Some(&w) = self.omega_memo.borrow().get(&d.to_bits()) {
            return w;
        }
        let x0 = self.x0_at(d);
        let mut total = 0.0;
        let mut inner_disk = 0.0;
        for (_, r1, nu) in self.cfg.nu.annuli() {
            let outer_disk = femto_disk(self.a_q, self.gamma, self.victim, x0, r1);
            total += nu * (outer_disk - inner_disk);
            inner_disk = outer_disk;
        }
        self.omega_memo.borrow_mut().insert(d.to_bits(), total);
        total
    }

    /// `ψ(d)` at power enhancement `rho`.
    pub fn psi(&self, d: f64, rho: f64) -> f64 {
        self.cfg.lambda * femto_disk(self.a_p * rho, self.gamma, self.victim, self.x0_at(d), self.cfg.femto_radius)
    }

    /// `υ(x0)`.
    pub fn upsilon(&self, x0: Point) -> f64 {
        self.cfg.lambda * macro_disk(&self.grid, self.a_p, self.gamma, self.victim, x0, self.cfg.femto_radius, FINE)
    }

    /// `Θ(r)`: the macro kernel integrated around the circle of radius `r`
    /// about the victim.
    fn circle(&self, r: f64) -> f64 {
        if let Some(&v) = self.circle_memo.borrow().get(&r.to_bits()) {
            return v;
        }
        let v = macro_circle(&self.grid, self.a_p, self.gamma, self.victim, r, self.symmetric);
        self.circle_memo.borrow_mut().insert(r.to_bits(), v);
        v
    }

    fn critical_in(&self, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
        let start = self.critical_radii.partition_point(|&r| r <= lo);
        self.critical_radii[start..].iter().copied().take_while(move |&r| r < hi)
    }

    /// `⟨υ⟩(d)` from the circle integrals `Θ`.
    fn mean_upsilon(&self, d: f64) -> f64 {
        let r = self.cfg.femto_radius;
        let tol = Tolerance { abs: 1e-300, rel: 1e-10, max_subdivisions: 100 };
        let mut total = 0.0;
        if d < r {
            // Circles that lie entirely inside the disk.
            let breaks: Vec<f64> = self.critical_in(0.0, r - d).collect();
            total += integrate(|x| x * self.circle(x), 0.0, r - d, &breaks, tol).scalar();
        }
        if d > 0.0 {
            // Circles that cross the disk boundary, with x = m + h·cos t
            // absorbing the square-root behaviour of the arc fraction at
            // both ends.
            let (m, h) = (d.max(r), d.min(r));
            let breaks: Vec<f64> = self.critical_in(m - h, m + h).map(|x| ((x - m) / h).clamp(-1.0, 1.0).acos()).collect();
            total += integrate(
                |t| {
                    let (st, ct) = t.sin_cos();
                    let x = m + h * ct;
                    if x <= 0.0 {
                        return 0.0;
                    }
                    let cos_half = ((x * x + d * d - r * r) / (2.0 * x * d)).clamp(-1.0, 1.0);
                    x * self.circle(x) * cos_half.acos() / PI * h * st
                },
                0.0,
                PI,
                &breaks,
                tol,
            )
            .scalar();
        }
        self.cfg.lambda * total
    }

    fn near_sample(&self, d: f64) -> NearSample {
        if let Some(&s) = self.near_memo.borrow().get(&d.to_bits()) {
            return s;
        }
        let sample = if self.cfg.lambda == 0.0 || self.a_p == 0.0 {
            NearSample { e_minus_1: 0.0, upsilon: 0.0 }
        } else if d == 0.0 {
            let u = self.upsilon(self.victim);
            NearSample { e_minus_1: u.exp_m1(), upsilon: u }
        } else {
            let upsilon = self.mean_upsilon(d);
            // `e^υ − 1 − υ ≈ υ²/2` is about υ times smaller than `υ`, so a
            // coarse υ suffices. One twelfth of the circle suffices when the
            // lattice is symmetric about the victim.
            let span = if self.symmetric { PI / 6.0 } else { 2.0 * PI };
            let r = self.cfg.femto_radius;
            let k2 = self.near_radius * self.near_radius;
            let q = integrate(
                |t| {
                    let x0 = self.victim + Point::polar(d, t);
                    let u = self.cfg.lambda * macro_disk(&self.grid, self.a_p, self.gamma, self.victim, x0, r, COARSE);
                    u.exp_m1() - u
                },
                0.0,
                span,
                &[],
                // An error δ in this mean moves the open-access exponent by
                // at most μπK²·δ; keep that at a tenth of its tolerance.
                Tolerance { abs: 0.1 * self.exponent_target() / (self.cfg.mu * PI * k2) * span, rel: 1e-4, max_subdivisions: 50 },
            );
            NearSample { e_minus_1: upsilon + q.scalar() / span, upsilon }
        };
        self.near_memo.borrow_mut().insert(d.to_bits(), sample);
        sample
    }

    fn radial_breaks(&self) -> Vec<f64> {
        let r = self.cfg.femto_radius;
        let mut b: Vec<f64> = self.cfg.nu.steps().iter().map(|s| s.0).collect();
        b.extend([0.5 * r, r, 2.0 * r, 4.0 * r]);
        b.extend((1..=(self.near_radius / self.cfg.cell_radius).ceil() as usize).map(|k| k as f64 * self.cfg.cell_radius));
        b
    }

    /// `∫_K^∞ g(d) dd` through the map `d = K·t^{−1/(γ−2)}`, which turns the
    /// `d^{1−γ}` decay of `2πd·g` into a bounded integrand on `(0, 1]`.
    fn tail<F: FnMut(f64) -> f64>(&self, mut g: F, tol: Tolerance) -> Quad {
        let k = self.near_radius;
        let e = 1.0 / (self.gamma - 2.0);
        integrate(
            |t| {
                if t <= 0.0 {
                    return 0.0;
                }
                let d = k * t.powf(-e);
                g(d) * k * e * t.powf(-e - 1.0)
            },
            0.0,
            1.0,
            &[],
            tol,
        )
    }

    /// `μ∫(1 − 𝒲(x0)) dx0`, the closed-access femto-field exponent.
    pub fn closed_exponent(&self) -> Quad {
        if let Some(q) = *self.closed.borrow() {
            return q;
        }
        let mu = self.cfg.mu;
        let q = if mu == 0.0 || self.a_q == 0.0 || self.cfg.nu.is_zero() {
            zero()
        } else {
            let g = |d: f64| 2.0 * PI * d * -(-self.omega(d)).exp_m1();
            let tol = self.tol_scaled(1.0 / mu);
            let near = integrate(g, 0.0, self.near_radius, &self.radial_breaks(), tol);
            let far = self.tail(g, tol);
            scale(add(near, far), mu)
        };
        *self.closed.borrow_mut() = Some(q);
        q
    }

    /// `∫_{|x0−v|≤K} υ(x0) dx0`.
    fn near_upsilon_integral(&self) -> Quad {
        if let Some(q) = *self.near_upsilon.borrow() {
            return q;
        }
        let tol = self.tol_scaled(1.0 / self.cfg.mu.max(1e-300));
        let q = integrate(
            |d| 2.0 * PI * d * self.near_sample(d).upsilon,
            0.0,
            self.near_radius,
            &self.radial_breaks(),
            tol,
        );
        *self.near_upsilon.borrow_mut() = Some(q);
        q
    }

    /// `μ∫(𝒥 − 𝒲) dx0`: the closed-minus-open difference of the femto-field
    /// exponent at power enhancement `rho`.
    pub fn open_gain(&self, rho: f64) -> Quad {
        let (mu, lambda) = (self.cfg.mu, self.cfg.lambda);
        if mu == 0.0 || lambda == 0.0 || self.a_p == 0.0 {
            return zero();
        }
        let tol = self.tol_scaled(1.0 / mu);
        let near = integrate(
            |d| {
                let om = self.omega(d);
                let ps = self.psi(d, rho);
                let s = self.near_sample(d);
                2.0 * PI * d * ((-om).exp() * (-ps).exp_m1() + (-om - ps).exp() * s.e_minus_1)
            },
            0.0,
            self.near_radius,
            &self.radial_breaks(),
            tol,
        );
        let far = self.tail(|d| 2.0 * PI * d * (-self.omega(d)).exp() * (-self.psi(d, rho)).exp_m1(), tol);
        let plane = self.plane_integral();
        let r = self.cfg.femto_radius;
        let total_upsilon = scale(plane, lambda * PI * r * r);
        let far_upsilon = sub(total_upsilon, self.near_upsilon_integral());
        scale(add(add(near, far), far_upsilon), mu)
    }

    /// Error target for a Laplace exponent, with the macro exponent as the
    /// scale for the relative part.
    fn exponent_target(&self) -> f64 {
        self.tol.abs.max(self.tol.rel * self.macro_exponent().scalar().abs())
    }

    /// Tolerance for an integral whose result is later multiplied by
    /// `factor_inv⁻¹`.
    fn tol_scaled(&self, factor_inv: f64) -> Tolerance {
        Tolerance { abs: 0.25 * self.tol.abs * factor_inv, ..self.tol }
    }
}

/// Sorted distances from `victim` (up to `reach`) at which a circle about
/// it passes through a hexagon vertex or touches a hexagon edge.
fn critical_radii(grid: &HexGrid, victim: Point, reach: f64) -> Vec<f64> {
    let rc = grid.cell_radius();
    let mut out = Vec::new();
    for c in grid.lattice_points_within(victim, reach + rc) {
        let verts: [Point; 6] = std::array::from_fn(|k| c + Point::polar(rc, k as f64 * PI / 3.0));
        for k in 0..6 {
            let (p, q) = (verts[k], verts[(k + 1) % 6]);
            out.push(p.dist(victim));
            let pq = q - p;
            let t = (victim - p).dot(pq) / pq.norm2();
            if t > 0.0 && t < 1.0 {
                out.push((p + pq * t).dist(victim));
            }
        }
    }
    out.retain(|&r| r <= reach);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * rc);
    out
}

fn zero() -> Quad {
    Quad { value: [0.0], error: 0.0, evals: 0, converged: true }
}

pub(crate) fn scale(q: Quad, k: f64) -> Quad {
    Quad { value: [q.value[0] * k], error: q.error * k.abs(), ..q }
}

pub(crate) fn add(a: Quad, b: Quad) -> Quad {
    Quad {
        value: [a.value[0] + b.value[0]],
        error: a.error + b.error,
        evals: a.evals + b.evals,
        converged: a.converged && b.converged,
    }
}

pub(crate) fn sub(a: Quad, b: Quad) -> Quad {
    add(a, scale(b, -1.0))
}
