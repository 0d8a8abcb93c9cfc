//! Configuration arithmetic: normalization, the interference term, fading
//! and derived per-femtocell means.

use std::f64::consts::{LN_2, PI};

use uplink_access::geometry::stream_rng;
use uplink_access::model::{
    dbm_to_mw, denormalize, derived_quantities, draw_fading, interference_term, normalize,
};
use uplink_access::quadrature::{integrate, Tolerance};
use uplink_access::{Error, IntensityProfile, NetworkConfig, Point};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[test]
fn normalization_round_trips() {
    let mut cfg = NetworkConfig::reference();
    cfg.nu = IntensityProfile::new(vec![(20.0, 1e-4), (50.0, 3e-5)]).unwrap();
    let n = normalize(&cfg);
    assert!(close(n.config.femto_radius, 0.1, 1e-15));
    assert!(close(n.config.q, 10f64.powf(0.6), 1e-12));
    assert_eq!(n.config.p, 1.0);
    let back = denormalize(&n);
    for (a, b) in [
        (back.cell_radius, cfg.cell_radius),
        (back.femto_radius, cfg.femto_radius),
        (back.lambda, cfg.lambda),
        (back.mu, cfg.mu),
        (back.p, cfg.p),
        (back.q, cfg.q),
        (back.nu.total(), cfg.nu.total()),
    ] {
        assert!(close(a, b, 1e-14), "{a} vs {b}");
    }
    // Normalizing a normalized configuration changes nothing.
    let again = normalize(&n.config);
    assert_eq!(again.config, n.config);
}

#[test]
fn interference_term_cases() {
    let v = Point::new(0.0, 0.0);
    let c = Point::new(3.0, 1.0);
    assert_eq!(interference_term(v, c, c, 2.0, 1.0, 3.0).unwrap(), 0.0);
    // Equal serving and victim distances give the target power.
    let tx = Point::new(1.0, 0.0);
    let served = Point::new(1.0, 1.0);
    let vic = Point::new(1.0, -1.0);
    assert!(close(interference_term(vic, tx, served, 2.5, 1.0, 3.7).unwrap(), 2.5, 1e-15));
    // Homogeneous of degree zero and linear in power and fading.
    let a = interference_term(v, tx, c, 1.0, 0.7, 3.0).unwrap();
    let b = interference_term(v * 2.0, tx * 2.0, c * 2.0, 1.0, 0.7, 3.0).unwrap();
    assert!(close(a, b, 1e-14));
    let d = interference_term(v, tx, c, 3.0, 1.4, 3.0).unwrap();
    assert!(close(d, 6.0 * a, 1e-14));
    assert!(matches!(interference_term(tx, tx, c, 1.0, 1.0, 3.0), Err(Error::DegenerateGeometry)));
}

#[test]
fn fading_is_unit_exponential() {
    let mut rng = stream_rng(11, 0);
    let n = 1_000_000;
    let mut draws: Vec<f64> = (0..n).map(|_| draw_fading(&mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "{mean}");
    let above = draws.iter().filter(|&&h| h > LN_2).count() as f64 / n as f64;
    assert!((above - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());

    // Kolmogorov–Smirnov distance on the first 10⁵ draws.
    draws.truncate(100_000);
    draws.sort_by(f64::total_cmp);
    let m = draws.len() as f64;
    let ks = draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = -(-x).exp_m1();
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS distance {ks}");
}

#[test]
fn derived_means() {
    let r = NetworkConfig::reference();
    let d = derived_quantities(&r);
    assert!(close(d.nu_bar, 80e-6 * PI * 50.0 * 50.0, 1e-12));
    assert!((d.nu_bar - 0.6283).abs() < 1e-4);

    let mut cfg = r.clone();
    cfg.lambda = 0.0;
    assert_eq!(cfg.derived().lambda_bar, 0.0);

    // Two steps against a 1-D radial integral of the density.
    cfg.nu = IntensityProfile::new(vec![(20.0, 1e-4), (50.0, 3e-5)]).unwrap();
    let numeric = integrate(
        |r| 2.0 * PI * r * cfg.nu.density_at(r),
        0.0,
        50.0,
        &[20.0],
        Tolerance::new(1e-14, 1e-12),
    )
    .scalar();
    assert!(close(cfg.derived().nu_bar, numeric, 1e-10));
}

#[test]
fn unit_conversions() {
    assert!(close(dbm_to_mw(-60.0), 1e-6, 1e-12));
    assert!(close(dbm_to_mw(0.0), 1.0, 1e-15));
}

#[test]
fn invalid_configurations_are_rejected() {
    let mut cfg = NetworkConfig::reference();
    cfg.femto_radius = 600.0;
    assert!(cfg.validate().is_err());
    let mut cfg = NetworkConfig::reference();
    cfg.lambda = -1.0;
    assert!(cfg.validate().is_err());
    let mut cfg = NetworkConfig::reference();
    cfg.nu = IntensityProfile::constant(1e-5, 40.0).unwrap();
    assert!(cfg.validate().is_err());
}
