//! Hexagonal macrocell lattice, disk regions, radial intensity profiles and
//! the point-process samplers that drive every random quantity in the model.
//!
//! Lattice points are `(3/2·a·R_c, √3/2·a·R_c + √3·b·R_c)` for integer
//! `(a, b)`; every macro base station sits on one, and its cell is the
//! Voronoi hexagon with a vertex at `(R_c, 0)` relative to its centre.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// A location in the plane, in the length unit of the owning configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point { x: r * c, y: r * s }
    }

    pub fn norm2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dist2(self, other: Point) -> f64 {
        (self - other).norm2()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// The infinite hexagonal grid of macrocell base stations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexGrid {
    cell_radius: f64,
}

/// Unit normals of the six hexagon edges, pointing at the six nearest
/// neighbours (at distance `√3·R_c`).
const EDGE_NORMALS: [Point; 6] = [
    Point { x: 0.0, y: 1.0 },
    Point { x: 0.866_025_403_784_438_6, y: 0.5 },
    Point { x: 0.866_025_403_784_438_6, y: -0.5 },
    Point { x: 0.0, y: -1.0 },
    Point { x: -0.866_025_403_784_438_6, y: -0.5 },
    Point { x: -0.866_025_403_784_438_6, y: 0.5 },
];

impl HexGrid {
    pub fn new(cell_radius: f64) -> Result<Self> {
        if !(cell_radius > 0.0 && cell_radius.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "cell radius must be positive and finite, got {cell_radius}"
            )));
        }
        Ok(HexGrid { cell_radius })
    }

    pub fn cell_radius(&self) -> f64 {
        self.cell_radius
    }

    /// Distance from a cell centre to the midpoint of an edge.
    pub fn apothem(&self) -> f64 {
        0.5 * SQRT3 * self.cell_radius
    }

    pub fn hex_area(&self) -> f64 {
        1.5 * SQRT3 * self.cell_radius * self.cell_radius
    }

    /// The lattice point with integer coordinates `(a, b)`.
    pub fn lattice_point(&self, a: i64, b: i64) -> Point {
        let (a, b) = (a as f64, b as f64);
        Point::new(
            1.5 * a * self.cell_radius,
            (0.5 * SQRT3 * a + SQRT3 * b) * self.cell_radius,
        )
    }

    /// Integer lattice coordinates of the base station nearest to `p`.
    ///
    /// Ties (points on hexagon edges) go to the lexicographically smallest
    /// `(a, b)`, which keeps the cells a partition of the plane.
    pub fn nearest_index(&self, p: Point) -> (i64, i64) {
        let fa = p.x / (1.5 * self.cell_radius);
        let fb = (p.y / self.cell_radius - 0.5 * SQRT3 * fa) / SQRT3;
        let (a0, b0) = (fa.round() as i64, fb.round() as i64);
        let mut best = (a0, b0);
        let mut best_d2 = f64::INFINITY;
        // Candidates are visited in lexicographic order and only a strictly
        // smaller distance replaces the incumbent.
        for a in a0 - 1..=a0 + 1 {
            for b in b0 - 1..=b0 + 1 {
                let d2 = self.lattice_point(a, b).dist2(p);
                if d2 < best_d2 {
                    best_d2 = d2;
                    best = (a, b);
                }
            }
        }
        best
    }

    pub fn nearest_bs(&self, p: Point) -> Point {
        let (a, b) = self.nearest_index(p);
        self.lattice_point(a, b)
    }

    /// Whether `p` belongs to the cell of the lattice point `center`.
    pub fn in_hexagon(&self, p: Point, center: Point) -> bool {
        self.nearest_bs(p) == center
    }

    /// Distance from `p` to its serving macro base station.
    pub fn dist_to_bs(&self, p: Point) -> f64 {
        p.dist(self.nearest_bs(p))
    }

    /// The six outward edge normals of a cell.
    pub fn edge_normals(&self) -> &'static [Point; 6] {
        &EDGE_NORMALS
    }

    /// All lattice points within distance `radius` of `center`.
    pub fn lattice_points_within(&self, center: Point, radius: f64) -> Vec<Point> {
        let rc = self.cell_radius;
        let a_lo = ((center.x - radius) / (1.5 * rc)).floor() as i64 - 1;
        let a_hi = ((center.x + radius) / (1.5 * rc)).ceil() as i64 + 1;
        let r2 = radius * radius;
        let mut out = Vec::new();
        for a in a_lo..=a_hi {
            let y_shift = 0.5 * SQRT3 * a as f64 * rc;
            let b_lo = ((center.y - radius - y_shift) / (SQRT3 * rc)).floor() as i64 - 1;
            let b_hi = ((center.y + radius - y_shift) / (SQRT3 * rc)).ceil() as i64 + 1;
            for b in b_lo..=b_hi {
                let c = self.lattice_point(a, b);
                if c.dist2(center) <= r2 {
                    out.push(c);
                }
            }
        }
        out
    }
}

/// A closed disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskRegion {
    pub center: Point,
    pub radius: f64,
}

impl DiskRegion {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "disk radius must be positive and finite, got {radius}"
            )));
        }
        Ok(DiskRegion { center, radius })
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: Point) -> bool {
        p.dist2(self.center) <= self.radius * self.radius
    }
}

/// Radially symmetric step intensity of a femtocell's local UEs.
///
/// `steps[k] = (r_k, ν_k)` means density `ν_k` on the annulus
/// `r_{k-1} < r ≤ r_k` (with `r_{-1} = 0`); the last break radius is the
/// femtocell radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityProfile {
    steps: Vec<(f64, f64)>,
}

impl IntensityProfile {
    pub fn new(steps: Vec<(f64, f64)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidConfig("intensity profile has no steps".into()));
        }
        let mut prev = 0.0;
        for &(r, nu) in &steps {
            if !(r.is_finite() && r > prev) {
                return Err(Error::InvalidConfig(format!(
                    "profile break radii must be finite and strictly increasing (got {r} after {prev})"
                )));
            }
            if !(nu.is_finite() && nu >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "profile densities must be finite and non-negative (got {nu})"
                )));
            }
            prev = r;
        }
        Ok(IntensityProfile { steps })
    }

    /// Constant density `nu` on the disk of radius `radius`.
    pub fn constant(nu: f64, radius: f64) -> Result<Self> {
        Self::new(vec![(radius, nu)])
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn outer_radius(&self) -> f64 {
        self.steps.last().map(|s| s.0).unwrap_or(0.0)
    }

    /// `(inner radius, outer radius, density)` for every annulus.
    pub fn annuli(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let inner = std::iter::once(0.0).chain(self.steps.iter().map(|s| s.0));
        inner.zip(self.steps.iter()).map(|(r0, &(r1, nu))| (r0, r1, nu))
    }

    pub fn density_at(&self, r: f64) -> f64 {
        self.annuli()
            .find(|&(r0, r1, _)| r <= r1 && (r > r0 || r0 == 0.0))
            .map(|a| a.2)
            .unwrap_or(0.0)
    }

    /// Mean number of points, `∫ ν` over the disk.
    pub fn total(&self) -> f64 {
        self.moment(0.0)
    }

    /// Radial moment `∫ ν(x)·|x|^p dx`.
    pub fn moment(&self, p: f64) -> f64 {
        self.annuli()
            .map(|(r0, r1, nu)| nu * 2.0 * PI * (r1.powf(p + 2.0) - r0.powf(p + 2.0)) / (p + 2.0))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.steps.iter().all(|s| s.1 == 0.0)
    }

    /// The same profile with all radii multiplied by `k` and densities
    /// divided by `k²` (so the mean count is unchanged).
    pub fn rescaled(&self, k: f64) -> Self {
        IntensityProfile {
            steps: self.steps.iter().map(|&(r, nu)| (r * k, nu / (k * k))).collect(),
        }
    }
}

/// A reproducible generator for stream `stream` of the run seeded by `seed`.
///
/// Streams are independent ChaCha8 sequences, so trial `i` of a run always
/// sees the same randomness no matter how trials are scheduled.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mean).expect("finite positive mean").sample(rng);
    draw as u64
}

/// A point uniformly distributed on the disk.
pub fn sample_uniform_disk<R: Rng + ?Sized>(rng: &mut R, disk: &DiskRegion) -> Point {
    let r = disk.radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    disk.center + Point::polar(r, theta)
}

/// A point uniformly distributed on the cell of the origin, `ℋ(0)`.
pub fn sample_uniform_hexagon<R: Rng + ?Sized>(rng: &mut R, grid: &HexGrid) -> Point {
    let rc = grid.cell_radius();
    let half_h = grid.apothem();
    loop {
        let p = Point::new(
            rc * (2.0 * rng.random::<f64>() - 1.0),
            half_h * (2.0 * rng.random::<f64>() - 1.0),
        );
        if grid.nearest_index(p) == (0, 0) {
            return p;
        }
    }
}

/// A homogeneous PPP of intensity `density` restricted to `window`.
pub fn sample_ppp_window<R: Rng + ?Sized>(
    rng: &mut R,
    density: f64,
    window: &DiskRegion,
) -> Vec<Point> {
    let n = sample_poisson(rng, density * window.area());
    (0..n).map(|_| sample_uniform_disk(rng, window)).collect()
}

/// A PPP with the radial step intensity `profile` centred at `center`.
pub fn sample_ppp_profile<R: Rng + ?Sized>(
    rng: &mut R,
    profile: &IntensityProfile,
    center: Point,
) -> Vec<Point> {
    let total = profile.total();
    let n = sample_poisson(rng, total);
    if n == 0 {
        return Vec::new();
    }
    let masses: Vec<(f64, f64, f64)> = profile
        .annuli()
        .map(|(r0, r1, nu)| (r0, r1, nu * PI * (r1 * r1 - r0 * r0)))
        .collect();
    (0..n)
        .map(|_| {
            // Inverse CDF of the radial law: pick the annulus by mass, then
            // the radius within it uniformly in r².
            let mut u = rng.random::<f64>() * total;
            let mut chosen = *masses.iter().rev().find(|m| m.2 > 0.0).expect("positive mass");
            for m in &masses {
                if u < m.2 {
                    chosen = *m;
                    break;
                }
                u -= m.2;
            }
            let (r0, r1, _) = chosen;
            let w = rng.random::<f64>();
            let r = (r0 * r0 + w * (r1 * r1 - r0 * r0)).sqrt();
            center + Point::polar(r, 2.0 * PI * rng.random::<f64>())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_of_lattice_points_is_identity() {
        let g = HexGrid::new(500.0).unwrap();
        for a in -3..=3 {
            for b in -3..=3 {
                let c = g.lattice_point(a, b);
                assert_eq!(g.nearest_bs(c), c);
            }
        }
    }

    #[test]
    fn hexagon_vertex_lies_on_positive_x_axis() {
        let g = HexGrid::new(1.0).unwrap();
        assert!(g.in_hexagon(Point::new(0.999, 0.0), Point::ORIGIN));
        assert!(!g.in_hexagon(Point::new(1.001, 0.0), Point::ORIGIN));
        assert!(g.in_hexagon(Point::new(0.0, 0.866), Point::ORIGIN));
        assert!(!g.in_hexagon(Point::new(0.0, 0.867), Point::ORIGIN));
    }

    #[test]
    fn profile_moments() {
        let p = IntensityProfile::new(vec![(1.0, 2.0), (2.0, 1.0)]).unwrap();
        let expect = 2.0 * PI + 1.0 * PI * 3.0;
        assert!((p.total() - expect).abs() < 1e-12);
        assert_eq!(p.density_at(0.5), 2.0);
        assert_eq!(p.density_at(1.5), 1.0);
        assert_eq!(p.density_at(2.5), 0.0);
    }

    #[test]
    fn lattice_enumeration_counts() {
        let g = HexGrid::new(1.0).unwrap();
        assert_eq!(g.lattice_points_within(Point::ORIGIN, 1.8).len(), 7);
        assert_eq!(g.lattice_points_within(Point::ORIGIN, 3.5).len(), 19);
    }
}
