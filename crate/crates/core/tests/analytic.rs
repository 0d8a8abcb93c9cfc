//! Laplace transforms against independent oracles: a Monte Carlo average
//! over sampled macro UE configurations, fixed-grid quadrature of the
//! single-femtocell factors, and the degenerate cases where the answer is
//! known exactly.

use std::f64::consts::PI;

use uplink_access::analytic::{
    self, eval_l0, eval_u, eval_v, eval_w, Access, QuadratureSpec,
};
use uplink_access::geometry::{sample_ppp_window, stream_rng};
use uplink_access::model::normalize;
use uplink_access::quadrature::{integrate, Tolerance};
use uplink_access::{DiskRegion, HexGrid, IntensityProfile, NetworkConfig, Point};

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Mean of `|x|^γ` over a hexagon, from the polar form of one twelfth of it:
/// the inner radial integral is closed-form.
fn hexagon_moment(grid: &HexGrid, gamma: f64) -> f64 {
    let a = grid.apothem();
    let q = integrate(
        |phi| (a / phi.cos()).powf(gamma + 2.0) / (gamma + 2.0),
        0.0,
        PI / 6.0,
        &[],
        Tolerance::new(0.0, 1e-12),
    );
    12.0 * q.scalar() / grid.hex_area()
}

#[test]
fn hexagon_moment_oracle_matches_the_area() {
    let grid = HexGrid::new(1.0).unwrap();
    assert!((hexagon_moment(&grid, 0.0) - 1.0).abs() < 1e-12);
}

/// `ℒ₀(s)` for the macro victim, by averaging `E[e^{−sI} | positions]` over
/// sampled macro UE configurations. Fading is integrated out exactly per UE
/// (a product of `1/(1 + X)`), and UEs beyond the window contribute their
/// first-order mean.
#[test]
fn macro_laplace_matches_monte_carlo() {
    let cfg = normalize(&NetworkConfig::reference()).config;
    let s = cfg.s_macro();
    let want = eval_l0(s, &cfg, &spec()).unwrap();

    let grid = cfg.grid();
    let w = 10.0;
    let window = DiskRegion::new(Point::ORIGIN, w).unwrap();
    let sp = s * cfg.p;
    let g = cfg.gamma;
    let tail = cfg.lambda * sp * hexagon_moment(&grid, g) * 2.0 * PI * w.powf(2.0 - g) / (g - 2.0);

    let n = 100_000u64;
    let mut rng = stream_rng(20_24, 0);
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let ues = sample_ppp_window(&mut rng, cfg.lambda, &window);
        let mut prod = 1.0;
        for x in ues {
            let d = x.dist(grid.nearest_bs(x));
            prod /= 1.0 + sp * (d / x.norm()).powf(g);
        }
        sum += prod;
        sum2 += prod * prod;
    }
    let mean = sum / n as f64 * (-tail).exp();
    let se = ((sum2 / n as f64 - (sum / n as f64).powi(2)) / n as f64).sqrt();
    assert!(se < 1e-3, "standard error {se}");
    assert!((mean - want).abs() < 2e-3, "Monte Carlo {mean} vs quadrature {want}");
}

/// Composite Simpson in the radius and the trapezoid rule in angle (which is
/// spectrally accurate for the periodic angular integrand) over the disk of
/// radius `radius` about `x0`.
fn disk_grid(x0: Point, radius: f64, n_r: usize, n_theta: usize, f: impl Fn(Point) -> f64) -> f64 {
    let h = radius / n_r as f64;
    let dtheta = 2.0 * PI / n_theta as f64;
    let mut total = 0.0;
    for i in 0..=n_r {
        let r = i as f64 * h;
        let wr = if i == 0 || i == n_r { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        if r == 0.0 {
            continue;
        }
        let ring: f64 = (0..n_theta).map(|j| f(x0 + Point::polar(r, j as f64 * dtheta))).sum();
        total += wr * r * ring * dtheta;
    }
    total * h / 3.0
}

fn k(x: f64) -> f64 {
    x / (1.0 + x)
}

#[test]
fn single_femtocell_factors_match_a_fixed_grid() {
    let mut cfg = NetworkConfig::reference();
    cfg.nu = IntensityProfile::new(vec![(20.0, 2e-4), (50.0, 5e-5)]).unwrap();
    let s = cfg.s_macro();
    let x0 = Point::new(150.0, 100.0);
    let g = cfg.gamma;
    let grid = cfg.grid();

    // The step profile is integrated disk by disk so that no grid cell
    // straddles the step at 20 m.
    let inner = disk_grid(x0, 20.0, 400, 256, |x| k(s * cfg.q * (x.dist(x0) / x.norm()).powf(g)));
    let outer = disk_grid(x0, 50.0, 400, 256, |x| k(s * cfg.q * (x.dist(x0) / x.norm()).powf(g)));
    let w_want = (-(2e-4 * inner + 5e-5 * (outer - inner))).exp();
    let w_got = eval_w(s, x0, &cfg, &spec()).unwrap();
    assert!((w_got - w_want).abs() < 1e-6, "W: {w_got} vs {w_want}");

    let psi = cfg.lambda
        * disk_grid(x0, cfg.femto_radius, 400, 256, |x| k(s * cfg.rho * cfg.p * (x.dist(x0) / x.norm()).powf(g)));
    let v_got = eval_v(s, x0, &cfg, &spec()).unwrap();
    assert!((v_got - (-psi).exp()).abs() < 1e-6, "V: {v_got} vs {}", (-psi).exp());

    let ups = cfg.lambda
        * disk_grid(x0, cfg.femto_radius, 400, 256, |x| {
            k(s * cfg.p * (x.dist(grid.nearest_bs(x)) / x.norm()).powf(g))
        });
    let u_got = eval_u(s, x0, &cfg, &spec()).unwrap();
    assert!((u_got - (-ups).exp()).abs() < 1e-6, "U: {u_got} vs {}", (-ups).exp());
    // The disk lies inside the victim's own cell, where every macro UE is
    // exactly as far from its server as from the victim.
    let closed_form = (-cfg.lambda * PI * 50f64.powi(2) * k(s * cfg.p)).exp();
    assert!((u_got - closed_form).abs() < 1e-9);
}

#[test]
fn femtocell_straddling_a_cell_edge() {
    let cfg = NetworkConfig::reference();
    let s = cfg.s_macro();
    let grid = cfg.grid();
    // 30 m inside the right-hand vertex: the disk covers three cells.
    let x0 = Point::new(470.0, 0.0);
    let ups = cfg.lambda
        * disk_grid(x0, cfg.femto_radius, 2000, 2048, |x| {
            k(s * cfg.p * (x.dist(grid.nearest_bs(x)) / x.norm()).powf(cfg.gamma))
        });
    let got = eval_u(s, x0, &cfg, &spec()).unwrap();
    // The kinks along cell edges limit the grid to low order.
    assert!((got.ln() + ups).abs() < 1e-4 * ups, "{} vs {ups}", -got.ln());
}

#[test]
fn transforms_at_zero_are_one() {
    let cfg = NetworkConfig::reference();
    let x0 = Point::new(120.0, -40.0);
    assert_eq!(eval_l0(0.0, &cfg, &spec()).unwrap(), 1.0);
    assert_eq!(eval_w(0.0, x0, &cfg, &spec()).unwrap(), 1.0);
    assert_eq!(eval_v(0.0, x0, &cfg, &spec()).unwrap(), 1.0);
    assert_eq!(eval_u(0.0, x0, &cfg, &spec()).unwrap(), 1.0);
    for access in [Access::Open, Access::Closed] {
        assert_eq!(analytic::macro_laplace(0.0, &cfg, access, &spec()).unwrap(), 1.0);
    }
}

#[test]
fn no_macro_ues_means_no_macro_interference() {
    let mut cfg = NetworkConfig::reference();
    cfg.lambda = 0.0;
    let s = cfg.s_macro();
    let x0 = Point::new(120.0, -40.0);
    assert_eq!(eval_l0(s, &cfg, &spec()).unwrap(), 1.0);
    assert_eq!(eval_v(s, x0, &cfg, &spec()).unwrap(), 1.0);
    assert_eq!(eval_u(s, x0, &cfg, &spec()).unwrap(), 1.0);
    // Only femto UEs remain, and access control does not affect them.
    let pair = analytic::macro_outages(&cfg, &spec()).unwrap();
    assert!((pair.open.probability - pair.closed.probability).abs() < 1e-9);
}

#[test]
fn empty_femtocells_have_no_effect() {
    let mut cfg = NetworkConfig::reference();
    cfg.nu = IntensityProfile::constant(0.0, cfg.femto_radius).unwrap();
    assert_eq!(eval_w(cfg.s_macro(), Point::new(100.0, 0.0), &cfg, &spec()).unwrap(), 1.0);
}

#[test]
fn without_femtocells_both_modes_reduce_to_the_macro_field() {
    let mut cfg = NetworkConfig::reference();
    cfg.mu = 0.0;
    let l0 = eval_l0(cfg.s_macro(), &cfg, &spec()).unwrap();
    let pair = analytic::macro_outages(&cfg, &spec()).unwrap();
    for p in [pair.open.probability, pair.closed.probability] {
        assert!((p - (1.0 - l0)).abs() < 1e-9, "{p} vs {}", 1.0 - l0);
    }
}

#[test]
fn without_other_cells_only_cochannel_femto_ues_remain() {
    let mut cfg = NetworkConfig::reference();
    cfg.lambda = 0.0;
    cfg.mu = 0.0;
    let x_b = Point::new(0.0, 100.0);
    // The victim femtocell's own Poisson(ν̄) UEs each interfere with
    // X = T·h, since all of them reach the femto BS at power Q.
    let nu_bar = cfg.nu.total();
    let t = cfg.threshold;
    let want = -(-nu_bar * t / (1.0 + t)).exp_m1();
    for access in [Access::Open, Access::Closed] {
        assert_eq!(analytic::macro_outage(&cfg, access, &spec()).unwrap().probability, 0.0);
        let got = analytic::femto_outage(x_b, &cfg, access, &spec()).unwrap().probability;
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    let avg = analytic::femto_outages_avg(&cfg, &spec()).unwrap();
    assert!((avg.open.probability - want).abs() < 1e-9);
    assert!((avg.closed.probability - want).abs() < 1e-9);

    cfg.nu = IntensityProfile::constant(0.0, cfg.femto_radius).unwrap();
    for access in [Access::Open, Access::Closed] {
        assert_eq!(analytic::femto_outage(x_b, &cfg, access, &spec()).unwrap().probability, 0.0);
    }
}

#[test]
fn outage_grows_with_interferer_density() {
    let base = NetworkConfig::reference();
    let p0 = analytic::macro_outages(&base, &spec()).unwrap();
    let mut more_macro = base.clone();
    more_macro.lambda *= 2.0;
    let p = analytic::macro_outages(&more_macro, &spec()).unwrap();
    assert!(p.open.probability > p0.open.probability);
    assert!(p.closed.probability > p0.closed.probability);
    // More femtocells add interference under closed access; under open
    // access they also hand off nearby macro UEs, so no direction is implied.
    let mut more_femto = base.clone();
    more_femto.mu *= 2.0;
    let p = analytic::macro_outages(&more_femto, &spec()).unwrap();
    assert!(p.closed.probability > p0.closed.probability);
}

#[test]
fn invalid_inputs_are_rejected() {
    let cfg = NetworkConfig::reference();
    let bad = QuadratureSpec { rel_tol: -1.0, ..spec() };
    assert!(analytic::macro_outages(&cfg, &bad).is_err());
    let mut cfg2 = cfg.clone();
    cfg2.gamma = 1.5;
    assert!(analytic::macro_outages(&cfg2, &spec()).is_err());
    // A femto base station outside the victim's cell is rejected.
    assert!(analytic::femto_outages(Point::new(900.0, 0.0), &cfg, &spec()).is_err());
}
