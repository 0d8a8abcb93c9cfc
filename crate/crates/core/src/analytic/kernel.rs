//! Interference kernels and disk integrals.
//!
//! Every Laplace exponent in the model integrates a kernel of the form
//! `X/(1 + X)` with `X = a·|x − server|^γ / |x − victim|^γ`. Disk integrals
//! are done in polar coordinates: about the victim when it is inside or
//! near the disk (so the kernel's peak sits at the polar origin), about the
//! disk centre otherwise. Rays are split where they cross hexagon edges so
//! each radial panel sees a single serving macro base station.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::geometry::{HexGrid, Point};
use crate::quadrature::{integrate, Tolerance};

/// `X/(1 + X)` for `X = a·(ds2/dv2)^{γ/2}`, given squared distances to the
/// server (`ds2`) and to the victim (`dv2`).
#[inline]
pub(crate) fn kernel(a: f64, ds2: f64, dv2: f64, half_gamma: f64) -> f64 {
    if a == 0.0 || ds2 == 0.0 {
        return 0.0;
    }
    if dv2 == 0.0 {
        return 1.0;
    }
    let x = a * (ds2 / dv2).powf(half_gamma);
    if x.is_finite() {
        x / (1.0 + x)
    } else {
        1.0
    }
}

/// Tolerances of the two nested levels of a disk integral.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DiskTol {
    pub radial: Tolerance,
    pub angular: Tolerance,
}

/// Disk integrals that feed the result directly.
pub(crate) const FINE: DiskTol = DiskTol {
    radial: Tolerance { abs: 1e-300, rel: 1e-10, max_subdivisions: 60 },
    angular: Tolerance { abs: 1e-300, rel: 1e-9, max_subdivisions: 100 },
};

/// Disk integrals that only feed small second-order corrections.
pub(crate) const COARSE: DiskTol = DiskTol {
    radial: Tolerance { abs: 1e-300, rel: 1e-8, max_subdivisions: 30 },
    angular: Tolerance { abs: 1e-300, rel: 1e-6, max_subdivisions: 50 },
};

/// Integrates `∫_{B(x0, radius)} g` where `radial(o, e, r0, r1)` must return
/// `∫_{r0}^{r1} g(o + r·e)·r dr`. The polar angles (seen from the polar
/// origin) of the points in `kinks` become panel breakpoints of the angular
/// integral.
pub(crate) fn disk_integral<F>(
    victim: Point,
    x0: Point,
    radius: f64,
    kinks: &[Point],
    tol: Tolerance,
    mut radial: F,
) -> f64
where
    F: FnMut(Point, Point, f64, f64) -> f64,
{
    let rel = x0 - victim;
    let d = rel.norm();
    let angle_from = |o: Point, p: Point| {
        let q = p - o;
        q.y.atan2(q.x)
    };
    if d > 2.0 * radius {
        // The victim is well outside: the integrand is smooth over the disk.
        let mut breaks = vec![FRAC_PI_2, PI, 1.5 * PI];
        breaks.extend(kinks.iter().map(|&p| angle_from(x0, p).rem_euclid(2.0 * PI)));
        return integrate(|t| radial(x0, Point::polar(1.0, t), 0.0, radius), 0.0, 2.0 * PI, &breaks, tol)
            .scalar();
    }
    let theta0 = if d > 0.0 { rel.y.atan2(rel.x) } else { 0.0 };
    let rel_angle = |p: Point| {
        let phi = angle_from(victim, p) - theta0;
        (phi + PI).rem_euclid(2.0 * PI) - PI
    };
    if d <= radius {
        // Victim inside: every ray from it leaves the disk exactly once.
        let mut breaks = vec![-FRAC_PI_2, 0.0, FRAC_PI_2];
        breaks.extend(kinks.iter().filter(|&&p| p != victim).map(|&p| rel_angle(p)));
        integrate(
            |phi| {
                let (s, c) = phi.sin_cos();
                let r1 = d * c + (radius * radius - d * d * s * s).max(0.0).sqrt();
                radial(victim, Point::polar(1.0, theta0 + phi), 0.0, r1)
            },
            -PI,
            PI,
            &breaks,
            tol,
        )
        .scalar()
    } else {
        // Victim just outside: integrate over the cone of rays that hit
        // the disk, with φ = α·sin t to soften the tangent rays.
        let alpha = (radius / d).asin();
        let mut breaks = vec![0.0];
        breaks.extend(
            kinks
                .iter()
                .map(|&p| rel_angle(p) / alpha)
                .filter(|u| u.abs() < 1.0)
                .map(f64::asin),
        );
        integrate(
            |t| {
                let (st, ct) = t.sin_cos();
                let phi = alpha * st;
                let (s, c) = phi.sin_cos();
                let half = (radius * radius - d * d * s * s).max(0.0).sqrt();
                let (r0, r1) = ((d * c - half).max(0.0), d * c + half);
                alpha * ct * radial(victim, Point::polar(1.0, theta0 + phi), r0, r1)
            },
            -FRAC_PI_2,
            FRAC_PI_2,
            &breaks,
            tol,
        )
        .scalar()
    }
}

/// Points where the macro-served kernel restricted to `B(x0, radius)` has
/// angular kinks: hexagon vertices inside the disk and the intersections of
/// hexagon edges with its boundary circle.
pub(crate) fn lattice_kinks(grid: &HexGrid, x0: Point, radius: f64) -> Vec<Point> {
    let mut out = circle_crossings(grid, x0, radius);
    let rc = grid.cell_radius();
    let r2 = radius * radius;
    for c in grid.lattice_points_within(x0, rc + radius) {
        for k in 0..6 {
            let p = c + Point::polar(rc, k as f64 * PI / 3.0);
            if p.dist2(x0) <= r2 {
                out.push(p);
            }
        }
    }
    out
}

/// Points where hexagon edges cross the circle `|x − x0| = radius`.
pub(crate) fn circle_crossings(grid: &HexGrid, x0: Point, radius: f64) -> Vec<Point> {
    let rc = grid.cell_radius();
    let mut out = Vec::new();
    let r2 = radius * radius;
    for c in grid.lattice_points_within(x0, rc + radius) {
        let verts: [Point; 6] = std::array::from_fn(|k| c + Point::polar(rc, k as f64 * PI / 3.0));
        for k in 0..6 {
            let (p, q) = (verts[k], verts[(k + 1) % 6]);
            // Solve |p + t(q − p) − x0|² = R² for t ∈ [0, 1].
            let dpq = q - p;
            let w = p - x0;
            let a = dpq.norm2();
            let b = 2.0 * w.dot(dpq);
            let cc = w.norm2() - r2;
            let disc = b * b - 4.0 * a * cc;
            if disc > 0.0 {
                let sq = disc.sqrt();
                for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                    if (0.0..=1.0).contains(&t) {
                        out.push(p + dpq * t);
                    }
                }
            }
        }
    }
    out
}

/// Walks the ray `o + t·e` for `t ∈ [t0, t1]` through the hexagonal cells,
/// calling `visit(t_start, t_end, server)` once per cell traversed.
pub(crate) fn walk_ray<F: FnMut(f64, f64, Point)>(
    grid: &HexGrid,
    o: Point,
    e: Point,
    t0: f64,
    t1: f64,
    mut visit: F,
) {
    let h = grid.apothem();
    let nudge = 1e-12 * grid.cell_radius();
    let mut t = t0;
    let mut guard = 0;
    while t < t1 {
        let tp = t + nudge.min(0.5 * (t1 - t));
        let c = grid.nearest_bs(o + e * tp);
        let oc = o - c;
        // The probe is in cell `c`, so an exit at or before it can only be
        // rounding noise from a ray grazing an edge; skip such edges.
        let mut exit = f64::INFINITY;
        for n in grid.edge_normals() {
            let en = e.dot(*n);
            if en > 0.0 {
                let cand = (h - oc.dot(*n)) / en;
                if cand > tp {
                    exit = exit.min(cand);
                }
            }
        }
        let end = exit.max(t + nudge).min(t1);
        visit(t, end, c);
        t = end;
        guard += 1;
        if guard > 100_000 {
            break;
        }
    }
}

/// Radial panel integral of the femto-served kernel: UEs at `x` served by
/// a femto base station at `x0` (server distance `|x − x0|`).
#[allow(clippy::too_many_arguments)]
pub(crate) fn femto_radial(
    a: f64,
    half_gamma: f64,
    victim: Point,
    x0: Point,
    o: Point,
    e: Point,
    r0: f64,
    r1: f64,
    tol: Tolerance,
) -> f64 {
    if a == 0.0 || r1 <= r0 {
        return 0.0;
    }
    integrate(
        |r| {
            let x = o + e * r;
            r * kernel(a, x.dist2(x0), x.dist2(victim), half_gamma)
        },
        r0,
        r1,
        &[],
        tol,
    )
    .scalar()
}

/// Radial panel integral of the macro-served kernel (server distance to
/// the nearest lattice point), split at hexagon crossings.
#[allow(clippy::too_many_arguments)]
pub(crate) fn macro_radial(
    grid: &HexGrid,
    a: f64,
    half_gamma: f64,
    victim: Point,
    o: Point,
    e: Point,
    r0: f64,
    r1: f64,
    tol: Tolerance,
) -> f64 {
    if a == 0.0 || r1 <= r0 {
        return 0.0;
    }
    let mut total = 0.0;
    walk_ray(grid, o, e, r0, r1, |t0, t1, c| {
        total += integrate(
            |r| {
                let x = o + e * r;
                r * kernel(a, x.dist2(c), x.dist2(victim), half_gamma)
            },
            t0,
            t1,
            &[],
            tol,
        )
        .scalar();
    });
    total
}

/// `∫_{B(x0, radius)} X/(1+X)` with `X = a·|x − x0|^γ/|x − victim|^γ`.
pub(crate) fn femto_disk(a: f64, gamma: f64, victim: Point, x0: Point, radius: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let hg = 0.5 * gamma;
    disk_integral(victim, x0, radius, &[], FINE.angular, |o, e, r0, r1| {
        femto_radial(a, hg, victim, x0, o, e, r0, r1, FINE.radial)
    })
}

/// `∫_{B(x0, radius)} X/(1+X)` with `X = a·d_BS(x)^γ/|x − victim|^γ`.
pub(crate) fn macro_disk(
    grid: &HexGrid,
    a: f64,
    gamma: f64,
    victim: Point,
    x0: Point,
    radius: f64,
    tol: DiskTol,
) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let hg = 0.5 * gamma;
    let kinks = lattice_kinks(grid, x0, radius);
    disk_integral(victim, x0, radius, &kinks, tol.angular, |o, e, r0, r1| {
        macro_radial(grid, a, hg, victim, o, e, r0, r1, tol.radial)
    })
}

/// `∫_0^{2π} X/(1+X) dφ` on the circle `x = victim + r·e^{iφ}`, with
/// `X = a·d_BS(x)^γ/r^γ`. With `sixfold`, the lattice is assumed symmetric
/// about the victim and one twelfth of the circle is integrated.
pub(crate) fn macro_circle(grid: &HexGrid, a: f64, gamma: f64, victim: Point, r: f64, sixfold: bool) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let hg = 0.5 * gamma;
    let r2 = r * r;
    if r == 0.0 {
        return 2.0 * PI * kernel(a, victim.dist2(grid.nearest_bs(victim)), 0.0, hg);
    }
    let span = if sixfold { PI / 6.0 } else { 2.0 * PI };
    let breaks: Vec<f64> = circle_crossings(grid, victim, r)
        .into_iter()
        .map(|p| {
            let q = p - victim;
            q.y.atan2(q.x).rem_euclid(2.0 * PI)
        })
        .collect();
    let q = integrate(
        |t| {
            let x = victim + Point::polar(r, t);
            kernel(a, x.dist2(grid.nearest_bs(x)), r2, hg)
        },
        0.0,
        span,
        &breaks,
        FINE.angular,
    );
    q.scalar() * (2.0 * PI / span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_area_in_every_regime() {
        let area = |victim: Point, x0: Point| {
            disk_integral(victim, x0, 0.3, &[], FINE.angular, |_, _, r0, r1| 0.5 * (r1 * r1 - r0 * r0))
        };
        let exact = PI * 0.09;
        for v in [Point::new(0.0, 0.0), Point::new(0.1, 0.05), Point::new(0.3, 0.0), Point::new(0.5, 0.1), Point::new(3.0, -1.0)] {
            let got = area(v, Point::ORIGIN);
            assert!((got - exact).abs() < 1e-9, "victim {v:?}: {got} vs {exact}");
        }
    }

    #[test]
    fn constant_server_ratio_kernel_is_constant() {
        // With x0 = victim the kernel is a/(a+1) everywhere.
        let v = Point::new(0.2, 0.1);
        let got = femto_disk(0.5, 3.0, v, v, 0.1);
        assert!((got - PI * 0.01 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ray_walk_covers_interval_with_correct_servers() {
        let g = HexGrid::new(1.0).unwrap();
        let o = Point::new(0.1, 0.2);
        let e = Point::polar(1.0, 0.7);
        let mut covered = 0.0;
        let mut last = 0.0;
        walk_ray(&g, o, e, 0.0, 6.0, |t0, t1, c| {
            assert!((t0 - last).abs() < 1e-9);
            let mid = o + e * (0.5 * (t0 + t1));
            assert_eq!(g.nearest_bs(mid), c);
            covered += t1 - t0;
            last = t1;
        });
        assert!((covered - 6.0).abs() < 1e-12);
    }

    #[test]
    fn ray_grazing_a_cell_edge_takes_few_segments() {
        // A ray along the y = 0 edge between two neighbouring cells used to
        // creep forward by the nudge length alone.
        let g = HexGrid::new(500.0).unwrap();
        let o = Point::new(480.0, 0.0);
        let e = Point::polar(1.0, 1.01e-15);
        let mut segments = 0;
        let mut covered = 0.0;
        walk_ray(&g, o, e, 0.0, 50.0, |t0, t1, _| {
            segments += 1;
            covered += t1 - t0;
        });
        assert!(segments <= 3, "{segments} segments");
        assert!((covered - 50.0).abs() < 1e-9);
    }
}
