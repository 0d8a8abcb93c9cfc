//! Numerical integration building blocks: globally adaptive Gauss–Kronrod
//! (7/15) on intervals, Gauss–Legendre rules, and an adaptive cubature on
//! triangles using the collapsed (Duffy) product rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::geometry::Point;

/// Stopping rule for the adaptive integrators: stop once the error
/// estimate is below `max(abs, rel·|value|)`, or after `max_subdivisions`
/// refinements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_subdivisions: 400 }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<const N: usize> {
    pub value: [f64; N],
    /// Error estimate of the first component.
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

pub type Quad = QuadResult<1>;

impl Quad {
    pub fn scalar(&self) -> f64 {
        self.value[0]
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Segment<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Segment<N> {}
impl<const N: usize> PartialOrd for Segment<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Segment<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel with the QUADPACK error heuristic applied to
/// the first component.
fn gk15<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, a: f64, b: f64) -> Segment<N> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [[0.0; N]; 15];
    fv[7] = f(c);
    for j in 0..7 {
        let dx = h * XGK[j];
        fv[j] = f(c - dx);
        fv[14 - j] = f(c + dx);
    }
    let weight = |i: usize| if i <= 7 { WGK[i] } else { WGK[14 - i] };
    let mut resk = [0.0; N];
    for (i, row) in fv.iter().enumerate() {
        for k in 0..N {
            resk[k] += weight(i) * row[k];
        }
    }
    let mut resg = WG[3] * fv[7][0];
    for (gi, j) in [1usize, 3, 5].into_iter().enumerate() {
        resg += WG[gi] * (fv[j][0] + fv[14 - j][0]);
    }
    let mean = 0.5 * resk[0];
    let (mut resabs, mut resasc) = (0.0, 0.0);
    for (i, row) in fv.iter().enumerate() {
        resabs += weight(i) * row[0].abs();
        resasc += weight(i) * (row[0] - mean).abs();
    }
    let scale = h.abs();
    let mut err = ((resk[0] - resg) * h).abs();
    let resasc = resasc * scale;
    let resabs = resabs * scale;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    let mut value = resk;
    for v in value.iter_mut() {
        *v *= h;
    }
    Segment { a, b, value, error: err }
}

/// Globally adaptive Gauss–Kronrod integration of a vector-valued function
/// over `[a, b]`, starting from the panels delimited by `breaks`.
/// Refinement is driven by the first component.
pub fn integrate_vec<const N: usize, F: FnMut(f64) -> [f64; N]>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> QuadResult<N> {
    if a == b {
        return QuadResult { value: [0.0; N], error: 0.0, evals: 0, converged: true };
    }
    let mut pts = vec![a];
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(f64::total_cmp);
    if a > b {
        inner.reverse();
    }
    pts.extend(inner);
    pts.push(b);
    pts.dedup();

    let mut heap = BinaryHeap::new();
    let mut done: Vec<Segment<N>> = Vec::new();
    let mut evals = 0;
    for w in pts.windows(2) {
        heap.push(gk15(&mut f, w[0], w[1]));
        evals += 15;
    }
    let totals = |heap: &BinaryHeap<Segment<N>>, done: &[Segment<N>]| {
        let mut v = [0.0; N];
        let mut e = 0.0;
        for s in heap.iter().chain(done.iter()) {
            for (acc, x) in v.iter_mut().zip(s.value) {
                *acc += x;
            }
            e += s.error;
        }
        (v, e)
    };
    let (mut value, mut error) = totals(&heap, &done);
    let mut subdivisions = 0;
    while error > tol.target(value[0]) && subdivisions < tol.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a).abs() <= 64.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            done.push(worst);
            continue;
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        evals += 30;
        subdivisions += 1;
        for (k, acc) in value.iter_mut().enumerate() {
            *acc += left.value[k] + right.value[k] - worst.value[k];
        }
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if subdivisions % 32 == 0 {
            (value, error) = totals(&heap, &done);
        }
    }
    (value, error) = totals(&heap, &done);
    QuadResult { value, error, evals, converged: error <= tol.target(value[0]) }
}

/// Scalar adaptive integration; see [`integrate_vec`].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> Quad {
    integrate_vec(|x| [f(x)], a, b, breaks, tol)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (0..=32).map(compute_gauss_legendre).collect());
    &rules[n.clamp(1, 32)]
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map from [-1, 1] to [0, 1].
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// A triangle whose first vertex is the collapse point of the Duffy map,
/// tagged with caller data (e.g. the serving cell).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle<T: Copy> {
    pub v: [Point; 3],
    pub tag: T,
}

impl<T: Copy> Triangle<T> {
    pub fn area(&self) -> f64 {
        let [a, b, c] = self.v;
        0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)).abs()
    }

    /// The four midpoint children; the first keeps vertex 0 as its apex.
    pub fn split(&self) -> [Triangle<T>; 4] {
        let [a, b, c] = self.v;
        let ab = (a + b) * 0.5;
        let bc = (b + c) * 0.5;
        let ca = (c + a) * 0.5;
        let t = |v| Triangle { v, tag: self.tag };
        [t([a, ab, ca]), t([ab, b, bc]), t([ca, bc, c]), t([bc, ca, ab])]
    }
}

/// Collapsed Gauss–Legendre product rule with `n × n` points; the
/// collapsed edge sits at vertex 0, which tolerates point singularities
/// and kinks there.
pub fn triangle_rule<T: Copy, F: FnMut(T, Point) -> f64>(f: &mut F, tri: &Triangle<T>, n: usize) -> f64 {
    let area = tri.area();
    if area == 0.0 {
        return 0.0;
    }
    let (x, w) = gauss_legendre(n);
    let [a, b, c] = tri.v;
    let ab = b - a;
    let bc = c - b;
    let mut sum = 0.0;
    for (&u, &wu) in x.iter().zip(w) {
        let mut inner = 0.0;
        for (&t, &wt) in x.iter().zip(w) {
            inner += wt * f(tri.tag, a + (ab + bc * t) * u);
        }
        sum += wu * u * inner;
    }
    2.0 * area * sum
}

struct TriRegion<T: Copy> {
    children: [Triangle<T>; 4],
    child_values: [f64; 4],
    fine: f64,
    error: f64,
}

impl<T: Copy> PartialEq for TriRegion<T> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<T: Copy> Eq for TriRegion<T> {}
impl<T: Copy> PartialOrd for TriRegion<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T: Copy> Ord for TriRegion<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn tri_region<T: Copy, F: FnMut(T, Point) -> f64>(
    f: &mut F,
    tri: &Triangle<T>,
    coarse: f64,
    n: usize,
) -> TriRegion<T> {
    let children = tri.split();
    let child_values = [
        triangle_rule(f, &children[0], n),
        triangle_rule(f, &children[1], n),
        triangle_rule(f, &children[2], n),
        triangle_rule(f, &children[3], n),
    ];
    let fine: f64 = child_values.iter().sum();
    TriRegion { children, child_values, fine, error: (fine - coarse).abs() }
}

/// Globally adaptive cubature over a set of triangles. Each region is
/// estimated by the rule applied to its four children and its error by the
/// difference to the rule on the parent.
pub fn integrate_triangles<T: Copy, F: FnMut(T, Point) -> f64>(
    mut f: F,
    triangles: &[Triangle<T>],
    order: usize,
    tol: Tolerance,
) -> Quad {
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    let per_rule = order * order;
    for t in triangles {
        if t.area() == 0.0 {
            continue;
        }
        let coarse = triangle_rule(&mut f, t, order);
        heap.push(tri_region(&mut f, t, coarse, order));
        evals += 5 * per_rule;
    }
    let totals = |heap: &BinaryHeap<TriRegion<T>>| {
        heap.iter().fold((0.0, 0.0), |(v, e), r| (v + r.fine, e + r.error))
    };
    let (mut value, mut error) = totals(&heap);
    let mut subdivisions = 0;
    while error > tol.target(value) && subdivisions < tol.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        subdivisions += 1;
        for (child, &coarse) in worst.children.iter().zip(&worst.child_values) {
            let region = tri_region(&mut f, child, coarse, order);
            value += region.fine - coarse;
            error += region.error;
            heap.push(region);
        }
        value += worst.child_values.iter().sum::<f64>() - worst.fine;
        error -= worst.error;
        evals += 16 * per_rule;
        if subdivisions % 32 == 0 {
            (value, error) = totals(&heap);
        }
    }
    (value, error) = totals(&heap);
    QuadResult { value: [value], error, evals, converged: error <= tol.target(value) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let s: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((s - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn gk_handles_endpoint_singularity() {
        let r = integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, &[], Tolerance::new(1e-10, 1e-10));
        assert!(r.converged);
        assert!((r.scalar() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn gk_respects_breakpoints_on_kinks() {
        let r = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], Tolerance::new(1e-14, 1e-14));
        assert!((r.scalar() - (0.045 + 0.245)).abs() < 1e-14);
        assert!(r.evals <= 30);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate(|x: f64| x * x, 1.0, 0.0, &[], Tolerance::new(1e-14, 1e-14));
        assert!((r.scalar() + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_cubature_of_radial_power() {
        // ∫ |x| over the unit right triangle with apex at the origin.
        let tri = Triangle { v: [Point::ORIGIN, Point::new(1.0, 0.0), Point::new(0.0, 1.0)], tag: () };
        let r = integrate_triangles(|_, p: Point| p.norm(), &[tri], 4, Tolerance::new(1e-12, 1e-12));
        // Closed form (√2 + ln(1 + √2))/(6√2), from the polar integral
        // ∫_0^{π/2} (cos t + sin t)^{-3}/3 dt.
        let exact = (2f64.sqrt() + (1.0 + 2f64.sqrt()).ln()) / (6.0 * 2f64.sqrt());
        assert!((r.scalar() - exact).abs() < 1e-11);
    }
}
