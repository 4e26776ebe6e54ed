//! Analytic models for the set geometry outside the computational box and
//! their kernel integrals.
//!
//! Every model answers exact ray queries: for a base point `q` and a unit
//! direction, the intervals of `r >= 0` with `q + r d` inside the model.
//! Kernel integrals over `tail \ exclusion` then reduce to a 1D angular
//! integral of `sum_k (r_in^{-s} - r_out^{-s}) / s` per ray, evaluated with
//! adaptive panels. The contribution from infinity `alpha` is the angular
//! measure of directions whose final ray interval is unbounded.

use crate::error::{Error, Result};
use crate::omega;

const ANGULAR_BASE_PANELS: usize = 512;
const SIMPSON_MAX_DEPTH: usize = 42;

/// Far-field geometry descriptor.
#[derive(Debug, Clone, PartialEq)]
pub enum TailModel {
    Empty,
    Full,
    /// `normal . x < offset`.
    HalfSpace { normal: [f64; 2], offset: f64 },
    /// Wedge with apex `vertex`, bisector at angle `direction`, total
    /// `opening` in (0, 2*pi).
    Cone { vertex: [f64; 2], direction: f64, opening: f64 },
    /// `|x2| < halfwidth`.
    Slab { halfwidth: f64 },
    /// Everything outside the slab.
    SlabComplement { halfwidth: f64 },
    /// `x2 > P(x1)` with `P` of degree <= 3 (coefficients low to high).
    SupgraphPolynomial { coeffs: Vec<f64> },
    /// `x2 < P(x1)`.
    SubgraphPolynomial { coeffs: Vec<f64> },
    /// `x2 > bound * x1 / sqrt(1 + x1^2)`, a smooth bounded profile.
    SupgraphBounded { bound: f64 },
    SubgraphBounded { bound: f64 },
    Ball { center: [f64; 2], radius: f64 },
    ComplementOfBall { center: [f64; 2], radius: f64 },
}

/// Region removed from a tail integral; must contain the base point.
#[derive(Debug, Clone, Copy)]
pub enum Exclusion {
    /// Everything outside the ball `B_radius(q)` counts.
    Ball(f64),
    /// Everything outside the grid box counts.
    Box { lower: [f64; 2], upper: [f64; 2] },
    /// Everything outside both counts.
    BoxAndBall { lower: [f64; 2], upper: [f64; 2], radius: f64 },
}

type Intervals = Vec<(f64, f64)>;

impl TailModel {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            TailModel::Cone { opening, .. } => {
                if !(*opening > 0.0 && *opening < 2.0 * std::f64::consts::PI) {
                    return Err(Error::Parameter(format!(
                        "cone opening must lie in (0, 2pi), got {opening}"
                    )));
                }
                if n != 2 {
                    return Err(Error::Usage("cone tails are 2D only".into()));
                }
            }
            TailModel::Slab { halfwidth } | TailModel::SlabComplement { halfwidth } => {
                if *halfwidth <= 0.0 {
                    return Err(Error::Parameter("slab halfwidth must be > 0".into()));
                }
                if n != 2 {
                    return Err(Error::Usage("slab tails are 2D only".into()));
                }
            }
            TailModel::SupgraphPolynomial { coeffs } | TailModel::SubgraphPolynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.len() > 4 {
                    return Err(Error::Parameter(format!(
                        "polynomial tails take 1..=4 coefficients, got {}",
                        coeffs.len()
                    )));
                }
                if n != 2 {
                    return Err(Error::Usage("graph tails are 2D only".into()));
                }
            }
            TailModel::SupgraphBounded { .. } | TailModel::SubgraphBounded { .. } => {
                if n != 2 {
                    return Err(Error::Usage("graph tails are 2D only".into()));
                }
            }
            TailModel::Ball { radius, .. } | TailModel::ComplementOfBall { radius, .. } => {
                if *radius <= 0.0 {
                    return Err(Error::Parameter("ball radius must be > 0".into()));
                }
            }
            TailModel::HalfSpace { normal, .. } => {
                if normal[..n].iter().all(|&v| v == 0.0) {
                    return Err(Error::Parameter("half-space normal must be nonzero".into()));
                }
            }
            TailModel::Empty | TailModel::Full => {}
        }
        Ok(())
    }

    /// Pointwise membership.
    pub fn contains(&self, p: [f64; 2], n: usize) -> bool {
        match self {
            TailModel::Empty => false,
            TailModel::Full => true,
            TailModel::HalfSpace { normal, offset } => {
                (0..n).map(|k| normal[k] * p[k]).sum::<f64>() < *offset
            }
            TailModel::Cone { vertex, direction, opening } => {
                let u = [p[0] - vertex[0], p[1] - vertex[1]];
                if u[0] == 0.0 && u[1] == 0.0 {
                    return true;
                }
                let ang = u[1].atan2(u[0]);
                let rel = (ang - (direction - opening / 2.0)).rem_euclid(2.0 * std::f64::consts::PI);
                rel <= *opening
            }
            TailModel::Slab { halfwidth } => p[1].abs() < *halfwidth,
            TailModel::SlabComplement { halfwidth } => p[1].abs() >= *halfwidth,
            TailModel::SupgraphPolynomial { coeffs } => p[1] > eval_poly(coeffs, p[0]),
            TailModel::SubgraphPolynomial { coeffs } => p[1] < eval_poly(coeffs, p[0]),
            TailModel::SupgraphBounded { bound } => p[1] > bounded_profile(*bound, p[0]),
            TailModel::SubgraphBounded { bound } => p[1] < bounded_profile(*bound, p[0]),
            TailModel::Ball { center, radius } => dist2(p, *center, n) < radius * radius,
            TailModel::ComplementOfBall { center, radius } => {
                dist2(p, *center, n) >= radius * radius
            }
        }
    }

    /// The complementary geometry.
    pub fn complement(&self) -> TailModel {
        match self {
            TailModel::Empty => TailModel::Full,
            TailModel::Full => TailModel::Empty,
            TailModel::HalfSpace { normal, offset } => TailModel::HalfSpace {
                normal: [-normal[0], -normal[1]],
                offset: -offset,
            },
            TailModel::Cone { vertex, direction, opening } => TailModel::Cone {
                vertex: *vertex,
                direction: direction + std::f64::consts::PI,
                opening: 2.0 * std::f64::consts::PI - opening,
            },
            TailModel::Slab { halfwidth } => TailModel::SlabComplement { halfwidth: *halfwidth },
            TailModel::SlabComplement { halfwidth } => TailModel::Slab { halfwidth: *halfwidth },
            TailModel::SupgraphPolynomial { coeffs } => {
                TailModel::SubgraphPolynomial { coeffs: coeffs.clone() }
            }
            TailModel::SubgraphPolynomial { coeffs } => {
                TailModel::SupgraphPolynomial { coeffs: coeffs.clone() }
            }
            TailModel::SupgraphBounded { bound } => TailModel::SubgraphBounded { bound: *bound },
            TailModel::SubgraphBounded { bound } => TailModel::SupgraphBounded { bound: *bound },
            TailModel::Ball { center, radius } => {
                TailModel::ComplementOfBall { center: *center, radius: *radius }
            }
            TailModel::ComplementOfBall { center, radius } => {
                TailModel::Ball { center: *center, radius: *radius }
            }
        }
    }

    /// The analytic contribution from infinity, where the catalogue gives one.
    pub fn analytic_alpha(&self, n: usize) -> Option<f64> {
        let w = omega(n);
        match self {
            TailModel::Empty | TailModel::Ball { .. } | TailModel::Slab { .. } => Some(0.0),
            TailModel::Full
            | TailModel::ComplementOfBall { .. }
            | TailModel::SlabComplement { .. } => Some(w),
            TailModel::HalfSpace { .. } => Some(w / 2.0),
            TailModel::Cone { opening, .. } => Some(*opening),
            TailModel::SupgraphPolynomial { coeffs } => Some(supgraph_poly_alpha(coeffs)),
            TailModel::SubgraphPolynomial { coeffs } => {
                Some(2.0 * std::f64::consts::PI - supgraph_poly_alpha(coeffs))
            }
            TailModel::SupgraphBounded { .. } | TailModel::SubgraphBounded { .. } => {
                Some(std::f64::consts::PI)
            }
        }
    }

    /// Intervals of `r >= 0` with `q + r dir` inside the model.
    pub fn ray_intervals(&self, q: [f64; 2], dir: [f64; 2], n: usize) -> Intervals {
        match self {
            TailModel::Empty => vec![],
            TailModel::Full => vec![(0.0, f64::INFINITY)],
            TailModel::HalfSpace { normal, offset } => {
                let a: f64 = (0..n).map(|k| normal[k] * q[k]).sum::<f64>() - offset;
                let b: f64 = (0..n).map(|k| normal[k] * dir[k]).sum();
                halfline_interval(a, b)
            }
            TailModel::Cone { vertex, direction, opening } => {
                let u0 = [q[0] - vertex[0], q[1] - vertex[1]];
                if *opening <= std::f64::consts::PI {
                    wedge_intervals(u0, dir, *direction, *opening)
                } else {
                    let anti = direction + std::f64::consts::PI;
                    let co = 2.0 * std::f64::consts::PI - opening;
                    complement_intervals(&wedge_intervals(u0, dir, anti, co))
                }
            }
            TailModel::Slab { halfwidth } => slab_intervals(q, dir, *halfwidth),
            TailModel::SlabComplement { halfwidth } => {
                complement_intervals(&slab_intervals(q, dir, *halfwidth))
            }
            TailModel::SupgraphPolynomial { coeffs } => {
                cubic_side_intervals(poly_in_r(coeffs, q, dir), true)
            }
            TailModel::SubgraphPolynomial { coeffs } => {
                cubic_side_intervals(poly_in_r(coeffs, q, dir), false)
            }
            TailModel::SupgraphBounded { bound } => bounded_graph_intervals(q, dir, *bound, true),
            TailModel::SubgraphBounded { bound } => bounded_graph_intervals(q, dir, *bound, false),
            TailModel::Ball { center, radius } => ball_intervals(q, dir, *center, *radius, n),
            TailModel::ComplementOfBall { center, radius } => {
                complement_intervals(&ball_intervals(q, dir, *center, *radius, n))
            }
        }
    }

    /// True when the ray eventually stays inside the model.
    pub fn eventually_inside(&self, q: [f64; 2], dir: [f64; 2], n: usize) -> bool {
        self.ray_intervals(q, dir, n)
            .last()
            .is_some_and(|&(_, hi)| hi.is_infinite())
    }
}

fn dist2(p: [f64; 2], c: [f64; 2], n: usize) -> f64 {
    (0..n).map(|k| (p[k] - c[k]) * (p[k] - c[k])).sum()
}

fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    let mut v = 0.0;
    for &c in coeffs.iter().rev() {
        v = v * x + c;
    }
    v
}

/// `bound * x / sqrt(1 + x^2)`: the canonical bounded profile.
fn bounded_profile(bound: f64, x: f64) -> f64 {
    bound * x / (1.0 + x * x).sqrt()
}

fn supgraph_poly_alpha(coeffs: &[f64]) -> f64 {
    let pi = std::f64::consts::PI;
    let deg = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    match deg {
        0 | 1 => pi,
        2 => {
            if coeffs[2] > 0.0 {
                0.0
            } else {
                2.0 * pi
            }
        }
        _ => pi,
    }
}

/// `{r >= 0 : a + r b < 0}`.
fn halfline_interval(a: f64, b: f64) -> Intervals {
    if b.abs() < 1e-300 {
        return if a < 0.0 { vec![(0.0, f64::INFINITY)] } else { vec![] };
    }
    let root = -a / b;
    if b > 0.0 {
        if root > 0.0 {
            vec![(0.0, root)]
        } else {
            vec![]
        }
    } else if root > 0.0 {
        vec![(root, f64::INFINITY)]
    } else {
        vec![(0.0, f64::INFINITY)]
    }
}

fn slab_intervals(q: [f64; 2], dir: [f64; 2], halfwidth: f64) -> Intervals {
    let upper = halfline_interval(q[1] - halfwidth, dir[1]);
    let lower = halfline_interval(-q[1] - halfwidth, -dir[1]);
    intersect_intervals(&upper, &lower)
}

/// Ray against a wedge of opening <= pi: intersection of the two boundary
/// half-planes through the apex.
fn wedge_intervals(u0: [f64; 2], dir: [f64; 2], bisector: f64, opening: f64) -> Intervals {
    let from = bisector - opening / 2.0;
    let to = bisector + opening / 2.0;
    let e0 = [from.cos(), from.sin()];
    let e1 = [to.cos(), to.sin()];
    // inside: cross(e0, u) >= 0 and cross(u, e1) >= 0
    let a0 = -(e0[0] * u0[1] - e0[1] * u0[0]);
    let b0 = -(e0[0] * dir[1] - e0[1] * dir[0]);
    let a1 = -(u0[0] * e1[1] - u0[1] * e1[0]);
    let b1 = -(dir[0] * e1[1] - dir[1] * e1[0]);
    intersect_intervals(&halfline_interval(a0, b0), &halfline_interval(a1, b1))
}

fn ball_intervals(q: [f64; 2], dir: [f64; 2], c: [f64; 2], radius: f64, n: usize) -> Intervals {
    let mut b = 0.0;
    let mut d2 = 0.0;
    for k in 0..n {
        let u = q[k] - c[k];
        b += dir[k] * u;
        d2 += u * u;
    }
    let disc = b * b - (d2 - radius * radius);
    if disc <= 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    let (r1, r2) = (-b - sq, -b + sq);
    if r2 <= 0.0 {
        vec![]
    } else {
        vec![(r1.max(0.0), r2)]
    }
}

/// Coefficients in `r` of `q2 + r d2 - P(q1 + r d1)`.
fn poly_in_r(coeffs: &[f64], q: [f64; 2], dir: [f64; 2]) -> [f64; 4] {
    let mut c = [0.0f64; 4];
    c[0] = q[1];
    c[1] = dir[1];
    let (x, d) = (q[0], dir[0]);
    let powers = [
        [1.0, 0.0, 0.0, 0.0],
        [x, d, 0.0, 0.0],
        [x * x, 2.0 * x * d, d * d, 0.0],
        [x * x * x, 3.0 * x * x * d, 3.0 * x * d * d, d * d * d],
    ];
    for (k, &a) in coeffs.iter().enumerate() {
        for j in 0..4 {
            c[j] -= a * powers[k][j];
        }
    }
    c
}

/// Intervals where the cubic `c0 + c1 r + c2 r^2 + c3 r^3` is positive
/// (`above = true`) or negative along `r >= 0`.
fn cubic_side_intervals(c: [f64; 4], above: bool) -> Intervals {
    let mut roots = cubic_roots_nonneg(c);
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (1.0 + a.abs()));
    let eval = move |r: f64| c[0] + r * (c[1] + r * (c[2] + r * c[3]));
    let sign_at = |r: f64| eval(r) > 0.0;
    sign_intervals_from_roots(&roots, &sign_at, above)
}

/// Real nonnegative roots of a cubic by bisection on monotone segments.
fn cubic_roots_nonneg(c: [f64; 4]) -> Vec<f64> {
    let eval = |r: f64| c[0] + r * (c[1] + r * (c[2] + r * c[3]));
    let lead_idx = if c[3] != 0.0 {
        3
    } else if c[2] != 0.0 {
        2
    } else if c[1] != 0.0 {
        1
    } else {
        return vec![];
    };
    let lead = c[lead_idx].abs();
    // Cauchy bound on root magnitudes
    let bound = 1.0 + c[..lead_idx].iter().map(|v| v.abs()).fold(0.0f64, f64::max) / lead;

    let mut marks = vec![0.0, bound];
    if lead_idx == 3 {
        let (a, b2, c1) = (3.0 * c[3], 2.0 * c[2], c[1]);
        let disc = b2 * b2 - 4.0 * a * c1;
        if disc > 0.0 {
            let sq = disc.sqrt();
            for r in [(-b2 - sq) / (2.0 * a), (-b2 + sq) / (2.0 * a)] {
                if r > 0.0 && r < bound {
                    marks.push(r);
                }
            }
        }
    } else if lead_idx == 2 {
        let r = -c[1] / (2.0 * c[2]);
        if r > 0.0 && r < bound {
            marks.push(r);
        }
    }
    marks.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut roots = Vec::new();
    for w in marks.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let flo = eval(lo);
        let fhi = eval(hi);
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo * fhi > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if eval(mid) * flo <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 * (1.0 + hi.abs()) {
                break;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

fn sign_intervals_from_roots(
    roots: &[f64],
    positive_at: &dyn Fn(f64) -> bool,
    want_positive: bool,
) -> Intervals {
    let mut pts = vec![0.0];
    pts.extend_from_slice(roots);
    pts.push(f64::INFINITY);
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let probe = if hi.is_infinite() { lo * 2.0 + 1.0e3 } else { 0.5 * (lo + hi) };
        if positive_at(probe) == want_positive {
            out.push((lo, hi));
        }
    }
    merge_adjacent(out)
}

/// Ray against the bounded smooth profile: analytic outside the window where
/// crossings are possible, sample-and-bisect inside it.
fn bounded_graph_intervals(q: [f64; 2], dir: [f64; 2], bound: f64, above: bool) -> Intervals {
    let phi = |r: f64| q[1] + r * dir[1] - bounded_profile(bound, q[0] + r * dir[0]);
    let m = bound.abs();
    if dir[1].abs() < 1e-300 {
        // horizontal ray
        if q[1].abs() >= m {
            let inside = (q[1] > 0.0) == above;
            return if inside { vec![(0.0, f64::INFINITY)] } else { vec![] };
        }
        if dir[0].abs() < 1e-300 || bound == 0.0 {
            let inside = (q[1] > 0.0) == above;
            return if inside { vec![(0.0, f64::INFINITY)] } else { vec![] };
        }
        // monotone profile: single crossing at g(y) = q2/bound
        let target = q[1] / bound;
        if target.abs() >= 1.0 {
            let inside = (phi(0.0) > 0.0) == above;
            return if inside { vec![(0.0, f64::INFINITY)] } else { vec![] };
        }
        let y = target / (1.0 - target * target).sqrt();
        let r = (y - q[0]) / dir[0];
        if r <= 0.0 {
            let inside = (phi(1.0 + r.abs()) > 0.0) == above;
            return if inside { vec![(0.0, f64::INFINITY)] } else { vec![] };
        }
        let near_inside = (phi(0.5 * r) > 0.0) == above;
        let far_inside = (phi(2.0 * r + 1.0) > 0.0) == above;
        let mut out = Vec::new();
        if near_inside {
            out.push((0.0, r));
        }
        if far_inside {
            out.push((r, f64::INFINITY));
        }
        return merge_adjacent(out);
    }
    // crossings require |q2 + r d2| <= m
    let a = (-m - q[1]) / dir[1];
    let b = (m - q[1]) / dir[1];
    let r_hi = a.max(b).max(0.0).min(1.0e9) + 1.0;
    let samples = 1024;
    let mut roots = Vec::new();
    let mut prev_r = 0.0;
    let mut prev_v = phi(0.0);
    for k in 1..=samples {
        let r = r_hi * k as f64 / samples as f64;
        let v = phi(r);
        if prev_v == 0.0 {
            roots.push(prev_r);
        } else if prev_v * v < 0.0 {
            let (mut lo, mut hi) = (prev_r, r);
            let flo = prev_v;
            for _ in 0..120 {
                let mid = 0.5 * (lo + hi);
                if phi(mid) * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_r = r;
        prev_v = v;
    }
    let sign_at = |r: f64| phi(r) > 0.0;
    sign_intervals_from_roots(&roots, &sign_at, above)
}

fn merge_adjacent(mut iv: Intervals) -> Intervals {
    iv.retain(|&(a, b)| b > a);
    iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Intervals = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        if let Some(last) = out.last_mut() {
            if a <= last.1 + 1e-14 * (1.0 + last.1.abs()) {
                last.1 = last.1.max(b);
                continue;
            }
        }
        out.push((a, b));
    }
    out
}

fn intersect_intervals(a: &Intervals, b: &Intervals) -> Intervals {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    merge_adjacent(out)
}

/// Complement within `[0, inf)`.
fn complement_intervals(iv: &Intervals) -> Intervals {
    let mut out = Vec::new();
    let mut cursor = 0.0;
    for &(a, b) in iv {
        if a > cursor {
            out.push((cursor, a));
        }
        cursor = cursor.max(b);
        if cursor.is_infinite() {
            return out;
        }
    }
    out.push((cursor, f64::INFINITY));
    out
}

impl Exclusion {
    /// Exclusion radius along one direction from `q`.
    fn radius_along(&self, q: [f64; 2], dir: [f64; 2], n: usize) -> f64 {
        match self {
            Exclusion::Ball(r) => *r,
            Exclusion::Box { lower, upper } => box_exit(q, dir, *lower, *upper, n),
            Exclusion::BoxAndBall { lower, upper, radius } => {
                box_exit(q, dir, *lower, *upper, n).max(*radius)
            }
        }
    }
}

/// Distance from an interior point to the box boundary along `dir`.
fn box_exit(q: [f64; 2], dir: [f64; 2], lower: [f64; 2], upper: [f64; 2], n: usize) -> f64 {
    let mut exit = f64::INFINITY;
    for k in 0..n {
        if dir[k].abs() < 1e-300 {
            continue;
        }
        let t = if dir[k] > 0.0 {
            (upper[k] - q[k]) / dir[k]
        } else {
            (lower[k] - q[k]) / dir[k]
        };
        exit = exit.min(t);
    }
    exit.max(0.0)
}

/// Kernel mass of one ray: `sum (r_in^{-s} - r_out^{-s}) / s` over the tail
/// intervals clipped to `[r0, inf)`.
fn ray_mass(tail: &TailModel, q: [f64; 2], dir: [f64; 2], s: f64, n: usize, r0: f64) -> f64 {
    let mut acc = 0.0;
    for &(a, b) in &tail.ray_intervals(q, dir, n) {
        let lo = a.max(r0);
        if b <= lo {
            continue;
        }
        let head = lo.powf(-s);
        let tv = if b.is_infinite() { 0.0 } else { b.powf(-s) };
        acc += (head - tv) / s;
    }
    acc
}

/// `int_{tail \ exclusion} |x - q|^{-(n+s)} dx` by exact polar reduction per
/// ray and adaptive angular quadrature.
pub fn tail_kernel_integral(
    tail: &TailModel,
    q: [f64; 2],
    s: f64,
    n: usize,
    excl: &Exclusion,
) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter(format!("s must lie in (0,1), got {s}")));
    }
    tail.validate(n)?;
    if let Exclusion::Ball(r) = excl {
        if !(*r > 0.0) {
            return Err(Error::Parameter("exclusion radius must be > 0".into()));
        }
        match tail {
            TailModel::Empty => return Ok(0.0),
            TailModel::Full => return Ok(omega(n) * r.powf(-s) / s),
            _ => {}
        }
    }
    if matches!(tail, TailModel::Empty) {
        return Ok(0.0);
    }
    if n == 1 {
        let mut total = 0.0;
        for dir in [[1.0, 0.0], [-1.0, 0.0]] {
            let r0 = excl.radius_along(q, dir, 1);
            total += ray_mass(tail, q, dir, s, 1, r0);
        }
        return Ok(total);
    }
    let f = |theta: f64| {
        let dir = [theta.cos(), theta.sin()];
        let r0 = excl.radius_along(q, dir, 2);
        ray_mass(tail, q, dir, s, 2, r0)
    };
    Ok(integrate_angular(&f))
}

/// Angular measure of directions along which the tail extends to infinity;
/// the exact `s -> 0` limit of `s` times the tail kernel integral.
pub fn alpha_ray(tail: &TailModel, q: [f64; 2], n: usize) -> Result<f64> {
    tail.validate(n)?;
    match tail {
        TailModel::Empty => return Ok(0.0),
        TailModel::Full => return Ok(omega(n)),
        _ => {}
    }
    if n == 1 {
        let mut total = 0.0;
        for dir in [[1.0, 0.0], [-1.0, 0.0]] {
            if tail.eventually_inside(q, dir, 1) {
                total += 1.0;
            }
        }
        return Ok(total);
    }
    let f = |theta: f64| {
        if tail.eventually_inside(q, [theta.cos(), theta.sin()], 2) {
            1.0
        } else {
            0.0
        }
    };
    Ok(integrate_angular(&f))
}

/// Adaptive Simpson over `[0, 2pi)` seeded with a fixed panel count.
pub(crate) fn integrate_angular(f: &dyn Fn(f64) -> f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let w = two_pi / ANGULAR_BASE_PANELS as f64;
    let mut total = 0.0;
    for k in 0..ANGULAR_BASE_PANELS {
        let a = k as f64 * w;
        let b = a + w;
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        total += adaptive_simpson(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), 0);
    }
    total
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if depth >= SIMPSON_MAX_DEPTH || err.abs() <= 1e-12 * (left + right).abs().max(1e-10) {
        return left + right + err / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, depth + 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, depth + 1)
}
