//! Plane integrals of the macro-served kernel, decomposed cell by cell.
//!
//! Inside the cell of base station `c` the server distance is simply
//! `|x − c|`, so the plane splits into smooth per-cell pieces:
//!
//! * cells near the victim: adaptive collapsed-product cubature on the six
//!   fan triangles (fanned from the victim in its own cell, from the
//!   centre elsewhere);
//! * intermediate cells: a fixed high-order rule per fan triangle;
//! * distant cells: a two-term multipole expansion of the first-order
//!   kernel `a·|y|^γ/|c − v + y|^γ`;
//! * beyond the last enumerated shell: the continuum limit of that series.

use std::f64::consts::PI;

use super::kernel::kernel;
use crate::geometry::{HexGrid, Point};
use crate::quadrature::{integrate, integrate_triangles, triangle_rule, Quad, Tolerance, Triangle};

/// Radius (in cell radii) within which cells are integrated adaptively.
const ADAPTIVE_RADIUS: f64 = 3.5;
/// Radius (in cell radii) within which cells use the fixed rule.
const FIXED_RADIUS: f64 = 25.0;
/// Radius (in cell radii) of the multipole shell.
const MULTIPOLE_RADIUS: f64 = 400.0;
const FIXED_ORDER: usize = 7;

/// `∫_{ℋ(0)} |y|^p dy` for the hexagon of the grid.
pub(crate) fn hex_moment(grid: &HexGrid, p: f64) -> f64 {
    // Twelve right triangles between an apothem and a vertex direction.
    let h = grid.apothem();
    let angular = integrate(
        |t: f64| t.cos().powf(-(p + 2.0)),
        0.0,
        PI / 6.0,
        &[],
        Tolerance::new(1e-300, 1e-14),
    )
    .scalar();
    12.0 * h.powf(p + 2.0) / (p + 2.0) * angular
}

fn hexagon_vertices(grid: &HexGrid, c: Point) -> [Point; 6] {
    let rc = grid.cell_radius();
    std::array::from_fn(|k| c + Point::polar(rc, k as f64 * PI / 3.0))
}

fn fan(grid: &HexGrid, c: Point, apex: Point) -> impl Iterator<Item = Triangle<Point>> {
    let v = hexagon_vertices(grid, c);
    (0..6).map(move |k| Triangle { v: [apex, v[k], v[(k + 1) % 6]], tag: c })
}

/// `C(v, a) = ∫_{ℝ²} X/(1 + X) dx` with `X = a·d_BS(x)^γ/|x − v|^γ`.
///
/// `abs_tol` is in squared length units.
pub(crate) fn plane_macro_integral(grid: &HexGrid, victim: Point, a: f64, gamma: f64, abs_tol: f64, rel_tol: f64) -> Quad {
    if a == 0.0 {
        return Quad { value: [0.0], error: 0.0, evals: 0, converged: true };
    }
    let rc = grid.cell_radius();
    let hg = 0.5 * gamma;
    let home = grid.nearest_bs(victim);
    let mut f = |c: Point, x: Point| kernel(a, x.dist2(c), x.dist2(victim), hg);

    let mut near = Vec::new();
    let mut fixed = 0.0;
    let mut far = 0.0;
    let area = grid.hex_area();
    let m0 = hex_moment(grid, gamma);
    let m2 = hex_moment(grid, gamma + 2.0) * gamma * gamma / 4.0;
    let mut counted = 0usize;
    for c in grid.lattice_points_within(victim, MULTIPOLE_RADIUS * rc) {
        counted += 1;
        let dist = c.dist(victim);
        if c == home {
            near.extend(fan(grid, c, victim));
        } else if dist <= ADAPTIVE_RADIUS * rc {
            near.extend(fan(grid, c, c));
        } else if dist <= FIXED_RADIUS * rc {
            for t in fan(grid, c, c) {
                fixed += triangle_rule(&mut f, &t, FIXED_ORDER);
            }
        } else {
            let r2 = dist * dist;
            far += a * r2.powf(-hg) * (m0 + m2 / r2);
        }
    }
    // Continuum tail beyond the enumerated cells, with the radius matched
    // to the enumerated area so the shell boundary carries no bias.
    let k_eff = (counted as f64 * area / PI).sqrt();
    let tail = a / area
        * 2.0
        * PI
        * (m0 * k_eff.powf(2.0 - gamma) / (gamma - 2.0) + m2 * k_eff.powf(-gamma) / gamma);

    let near_q = integrate_triangles(f, &near, 4, Tolerance { abs: abs_tol, rel: rel_tol, max_subdivisions: 4000 });
    let value = near_q.scalar() + fixed + far + tail;
    // The neglected multipole and second-order terms are a small fraction
    // of the shell contributions.
    let model_err = 1e-4 * tail + 1e-6 * far;
    Quad {
        value: [value],
        error: near_q.error + model_err,
        evals: near_q.evals,
        converged: near_q.converged,
    }
}
