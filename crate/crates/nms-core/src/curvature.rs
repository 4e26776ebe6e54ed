//! Fractional mean curvature of rasterized sets, the numeric contribution
//! from infinity, and their small-`s` limits.
//!
//! The principal value at an interface point `q` pairs every cell inside the
//! exclusion ball with its point reflection through `q`; on the uniform grid
//! face midpoints reflect the center lattice onto itself, so the pairing is
//! exact and only the antisymmetric remainder survives. Cells outside the
//! exclusion ball and the analytic far field are summed directly.

use crate::error::{Error, Result};
use crate::extrapolate::{linear_fit, neville_at_zero, two_point_intercept};
use crate::graph::{GraphProblem, GraphSystem, GraphTail};
use crate::grid::IndicatorField;
use crate::kernel::gauss_legendre_16;
use crate::omega;
use crate::tail::{alpha_ray, tail_kernel_integral, Exclusion, TailModel};

/// The four diagnostic contributions: reflection-paired core, the collar
/// just outside it, box cells up to the far radius, and everything beyond.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureParts {
    pub core: f64,
    pub collar: f64,
    pub midrange: f64,
    pub far: f64,
}

#[derive(Debug, Clone)]
pub struct CurvatureSample {
    pub q: [f64; 2],
    pub value: f64,
    pub pv_radius: f64,
    pub parts: Option<CurvatureParts>,
    /// Weight mass of the outermost paired ring; bounds the sliver left by
    /// approximating the exclusion ball with whole cells.
    pub unmatched_residue: f64,
}

/// An interface face between two cells of opposite label.
#[derive(Debug, Clone, Copy)]
struct Face {
    /// Axis of the face normal.
    axis: usize,
    /// Face plane index along `axis` and cell index along the other axis.
    plane: usize,
    along: usize,
}

fn locate_face(field: &IndicatorField, q: [f64; 2]) -> Result<Face> {
    let g = &field.grid;
    let h = g.h;
    let tol = 1e-6;
    let fx = (q[0] - g.lower[0]) / h;
    if g.n == 1 {
        let plane = fx.round() as usize;
        if (fx - fx.round()).abs() > tol || plane == 0 || plane >= g.cells[0] {
            return Err(Error::Usage(format!("q = {q:?} is not an interior cell face")));
        }
        return Ok(Face { axis: 0, plane, along: 0 });
    }
    let fy = (q[1] - g.lower[1]) / h;
    let x_on_plane = (fx - fx.round()).abs() <= tol;
    let y_on_plane = (fy - fy.round()).abs() <= tol;
    let x_on_center = (fx - fx.floor() - 0.5).abs() <= tol;
    let y_on_center = (fy - fy.floor() - 0.5).abs() <= tol;
    if x_on_plane && y_on_center {
        let plane = fx.round() as usize;
        let along = fy.floor() as usize;
        if plane == 0 || plane >= g.cells[0] || along >= g.cells[1] {
            return Err(Error::Usage(format!("q = {q:?} is not an interior cell face")));
        }
        Ok(Face { axis: 0, plane, along })
    } else if y_on_plane && x_on_center {
        let plane = fy.round() as usize;
        let along = fx.floor() as usize;
        if plane == 0 || plane >= g.cells[1] || along >= g.cells[0] {
            return Err(Error::Usage(format!("q = {q:?} is not an interior cell face")));
        }
        Ok(Face { axis: 1, plane, along })
    } else {
        Err(Error::Usage(format!("q = {q:?} is not a cell-face midpoint")))
    }
}

/// Index of the reflection of cell `(a, b)` through the face midpoint.
fn reflect(face: &Face, a: i64, b: i64) -> (i64, i64) {
    match face.axis {
        0 => (2 * face.plane as i64 - 1 - a, 2 * face.along as i64 - b),
        _ => (2 * face.along as i64 - a, 2 * face.plane as i64 - 1 - b),
    }
}

fn face_cells(face: &Face) -> ((i64, i64), (i64, i64)) {
    match face.axis {
        0 => (
            (face.plane as i64 - 1, face.along as i64),
            (face.plane as i64, face.along as i64),
        ),
        _ => (
            (face.along as i64, face.plane as i64 - 1),
            (face.along as i64, face.plane as i64),
        ),
    }
}

fn check_binary(field: &IndicatorField) -> Result<()> {
    if !field.is_binary() {
        return Err(Error::Usage("set curvature needs a binary field".into()));
    }
    Ok(())
}

/// Fractional mean curvature of the set at an interface face midpoint.
pub fn curvature_set(
    field: &IndicatorField,
    tail: &TailModel,
    q: [f64; 2],
    s: f64,
    pv_radius: f64,
) -> Result<CurvatureSample> {
    curvature_set_impl(field, tail, q, s, pv_radius, None)
}

/// Diagnostic variant carrying the four-part breakdown with far radius
/// `far_radius`.
pub fn curvature_set_diagnostic(
    field: &IndicatorField,
    tail: &TailModel,
    q: [f64; 2],
    s: f64,
    pv_radius: f64,
    far_radius: f64,
) -> Result<CurvatureSample> {
    curvature_set_impl(field, tail, q, s, pv_radius, Some(far_radius))
}

fn curvature_set_impl(
    field: &IndicatorField,
    tail: &TailModel,
    q: [f64; 2],
    s: f64,
    pv_radius: f64,
    far_radius: Option<f64>,
) -> Result<CurvatureSample> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter(format!("s must lie in (0,1), got {s}")));
    }
    check_binary(field)?;
    tail.validate(field.grid.n)?;
    let g = &field.grid;
    let h = g.h;
    if pv_radius < 2.0 * h {
        return Err(Error::Usage(format!("pv_radius must be at least 2h = {}", 2.0 * h)));
    }
    for k in 0..g.n {
        if q[k] - pv_radius < g.lower[k] || q[k] + pv_radius > g.upper[k] {
            return Err(Error::Usage("exclusion ball must stay inside the box".into()));
        }
    }
    let face = locate_face(field, q)?;
    let ((la, lb), (ra, rb)) = face_cells(&face);
    let lv = field.values[g.index(la as usize, lb as usize)];
    let rv = field.values[g.index(ra as usize, rb as usize)];
    if lv == rv {
        return Err(Error::Usage("q does not lie on the discrete interface".into()));
    }

    let sigma =
        |a: i64, b: i64| -> f64 { 1.0 - 2.0 * field.values[g.index(a as usize, b as usize)] };
    let mea = g.cell_measure();
    let pv2 = pv_radius * pv_radius;
    let exp = -(g.n as f64 + s);

    let mut core = 0.0;
    let mut collar = 0.0;
    let mut cells_mid = 0.0;
    let mut cells_beyond = 0.0;
    let mut residue = 0.0;
    let far_r = far_radius.unwrap_or(f64::INFINITY);
    let ring_lo = (pv_radius - h).max(0.0);
    for idx in 0..g.cell_count() {
        let (a, b) = g.coords(idx);
        let c = g.center(idx);
        let dx = c[0] - q[0];
        let dy = if g.n == 2 { c[1] - q[1] } else { 0.0 };
        let d2 = dx * dx + dy * dy;
        let d = d2.sqrt();
        let w = mea * d.powf(exp);
        if d2 <= pv2 {
            // reflections of in-ball centers stay in the ball, hence in the
            // box; each unordered pair is visited twice, hence the half
            let (a2, b2) = reflect(&face, a as i64, b as i64);
            core += 0.5 * (sigma(a as i64, b as i64) + sigma(a2, b2)) * w;
            if d > ring_lo {
                residue += w;
            }
        } else {
            let contrib = sigma(a as i64, b as i64) * w;
            if d <= 2.0 * pv_radius {
                collar += contrib;
            } else if d <= far_r {
                cells_mid += contrib;
            } else {
                cells_beyond += contrib;
            }
        }
    }

    // far field: complement minus set, outside the box
    let comp = tail.complement();
    let box_excl = Exclusion::Box { lower: g.lower, upper: g.upper };
    let tail_all = tail_kernel_integral(&comp, q, s, g.n, &box_excl)?
        - tail_kernel_integral(tail, q, s, g.n, &box_excl)?;
    let parts = if let Some(rf) = far_radius {
        let both = Exclusion::BoxAndBall { lower: g.lower, upper: g.upper, radius: rf };
        let tail_beyond = tail_kernel_integral(&comp, q, s, g.n, &both)?
            - tail_kernel_integral(tail, q, s, g.n, &both)?;
        Some(CurvatureParts {
            core,
            collar,
            midrange: cells_mid + (tail_all - tail_beyond),
            far: cells_beyond + tail_beyond,
        })
    } else {
        None
    };
    let value = core + collar + cells_mid + cells_beyond + tail_all;
    Ok(CurvatureSample { q, value, pv_radius, parts, unmatched_residue: residue })
}

/// Fractional mean curvature of the subgraph of a 1D profile at the graph
/// point over cell `q_cell`, through the graph-local formula: the symmetric
/// principal value of `G` against the profile inside radius `r`, plus the
/// cellwise and tail contributions outside the matching cylinder.
pub fn curvature_graph_local(
    problem: &GraphProblem,
    u: &[f64],
    q_cell: usize,
    r: f64,
    h_cut: f64,
) -> Result<f64> {
    let system = GraphSystem::new(problem.clone())?;
    curvature_graph_local_with(&system, u, q_cell, r, h_cut)
}

pub fn curvature_graph_local_with(
    system: &GraphSystem,
    u: &[f64],
    q_cell: usize,
    r: f64,
    h_cut: f64,
) -> Result<f64> {
    let problem = &system.problem;
    let g = &problem.grid;
    let h = g.h;
    if u.len() != g.cell_count() {
        return Err(Error::Config("profile length does not match the grid".into()));
    }
    // snap the local radius to a cell boundary so the cellwise sum outside
    // meets the quadrature inside without overlap
    let m = ((r / h - 0.5).round().max(1.0)) as usize;
    let r = (m as f64 + 0.5) * h;
    let xq = g.center(q_cell)[0];
    let uq = u[q_cell];
    if xq - r < g.lower[0] || xq + r > g.upper[0] {
        return Err(Error::Usage("local radius must stay inside the box".into()));
    }
    // piecewise-linear interpolation of the cell values
    let interp = |x: f64| -> f64 {
        let t = (x - g.lower[0]) / h - 0.5;
        let k = t.floor().clamp(0.0, (g.cells[0] - 2) as f64);
        let frac = t - k;
        let k = k as usize;
        u[k] * (1.0 - frac) + u[k + 1] * frac
    };
    // the profile must stay inside the matching cylinder over the local ball
    let steps = 64;
    for k in 0..=steps {
        let x = xq - r + 2.0 * r * k as f64 / steps as f64;
        if (interp(x) - uq).abs() > h_cut {
            return Err(Error::Usage(
                "profile escapes the matching cylinder; increase h_cut".into(),
            ));
        }
    }

    if q_cell == 0 || q_cell + 1 >= g.cell_count() {
        return Err(Error::Usage("graph point must have neighbors on both sides".into()));
    }
    let s = problem.s;
    let gs = &system.gs;
    let (gn, gw) = gauss_legendre_16();

    // Below cell scale the data only supports a smooth local model; the
    // quadratic through the three nearest cells keeps the symmetric pair
    // cancellation exact (the difference quotients are +-slope + curv d/2).
    let slope_q = (u[q_cell + 1] - u[q_cell - 1]) / (2.0 * h);
    let curv_q = (u[q_cell + 1] - 2.0 * u[q_cell] + u[q_cell - 1]) / (h * h);
    let mut inner = 0.0;
    let mut hi = 0.5 * h;
    for _ in 0..30 {
        let lo = hi * 0.5;
        let mut acc = 0.0;
        for (t, w) in gn.iter().zip(gw.iter()) {
            let d = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
            let shift = 0.5 * curv_q * d;
            let pair = gs.g(slope_q + shift) + gs.g(-slope_q + shift);
            acc += w * pair * d.powf(-1.0 - s);
        }
        inner += acc * 0.5 * (hi - lo);
        hi = lo;
    }
    // analytic remainder of the graded stack: pair ~ G'(slope) curv d
    inner += gs.g_derivative(slope_q) * curv_q * hi.powf(1.0 - s) / (1.0 - s);

    // panels from the half-cell boundary out to r, split at the kinks of
    // the piecewise-linear interpolation (multiples of h/2 from q)
    let mut lo = 0.5 * h;
    while lo < r - 1e-12 * h {
        let hi_seg = (lo + 0.5 * h).min(r);
        let mut acc = 0.0;
        for (t, w) in gn.iter().zip(gw.iter()) {
            let d = 0.5 * (lo + hi_seg) + 0.5 * (hi_seg - lo) * t;
            let pair = gs.g((interp(xq + d) - uq) / d) + gs.g((interp(xq - d) - uq) / d);
            acc += w * pair * d.powf(-1.0 - s);
        }
        inner += acc * 0.5 * (hi_seg - lo);
        lo = hi_seg;
    }

    // cells beyond r, inside the box
    let mut outer = 0.0;
    for j in 0..g.cell_count() {
        let d = (j as i64 - q_cell as i64).unsigned_abs() as f64 * h;
        if d > r {
            outer += gs.g((u[j] - uq) / d) * h * d.powf(-1.0 - s);
        }
    }

    // tail beyond the box: graded panels plus the linear remainder of G
    let mut tail_term = 0.0;
    match &problem.tail {
        GraphTail::Level(level) => {
            for side in [-1.0f64, 1.0] {
                let d0 = if side > 0.0 { g.upper[0] - xq } else { xq - g.lower[0] };
                let mut lo = d0;
                for _ in 0..24 {
                    let hi_d = lo * 2.0;
                    let mut acc = 0.0;
                    for (t, w) in gn.iter().zip(gw.iter()) {
                        let d = 0.5 * (lo + hi_d) + 0.5 * (hi_d - lo) * t;
                        acc += w * gs.g((level - uq) / d) * d.powf(-1.0 - s);
                    }
                    tail_term += acc * 0.5 * (hi_d - lo);
                    lo = hi_d;
                }
                // G(t) ~ t once the argument has shrunk under the panels
                tail_term += (level - uq) * lo.powf(-1.0 - s) / (1.0 + s);
            }
        }
        GraphTail::Polynomial(coeffs) => {
            let deg = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
            for side in [-1.0f64, 1.0] {
                let edge = if side > 0.0 { g.upper[0] } else { g.lower[0] };
                let far = 1.0e4 * (1.0 + uq.abs());
                let mut lo = (edge - xq).abs();
                while lo < far {
                    let hi_d = lo * 2.0;
                    let mut acc = 0.0;
                    for (t, w) in gn.iter().zip(gw.iter()) {
                        let d = 0.5 * (lo + hi_d) + 0.5 * (hi_d - lo) * t;
                        let y = xq + side * d;
                        acc += w * gs.g((eval_poly(coeffs, y) - uq) / d) * d.powf(-1.0 - s);
                    }
                    tail_term += acc * 0.5 * (hi_d - lo);
                    lo = hi_d;
                }
                // remainder with the exact limit of the difference quotient:
                // constants and lines keep a finite argument, higher degrees
                // saturate G
                match deg {
                    0 => {
                        tail_term += (coeffs[0] - uq) * lo.powf(-1.0 - s) / (1.0 + s);
                    }
                    1 => {
                        let a_inf = coeffs[1] * side;
                        let k = eval_poly(coeffs, xq) - uq;
                        tail_term += gs.g(a_inf) * lo.powf(-s) / s
                            + gs.g_derivative(a_inf) * k * lo.powf(-1.0 - s) / (1.0 + s);
                    }
                    _ => {
                        let sign = asymptotic_sign(coeffs, side);
                        tail_term += sign * gs.g_infinity * lo.powf(-s) / s;
                    }
                }
            }
        }
    }

    Ok(-2.0 * (inner + outer + tail_term))
}

fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    let mut v = 0.0;
    for &c in coeffs.iter().rev() {
        v = v * x + c;
    }
    v
}

fn asymptotic_sign(coeffs: &[f64], side: f64) -> f64 {
    let deg = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    let lead = coeffs[deg];
    if lead == 0.0 {
        return 0.0;
    }
    if deg % 2 == 0 {
        lead.signum()
    } else {
        lead.signum() * side.signum()
    }
}

/// Numeric contribution from infinity.
#[derive(Debug, Clone)]
pub struct AlphaNumeric {
    /// `(s, s * alpha_s(E, R, q))` along the sweep.
    pub per_s: Vec<(f64, f64)>,
    /// Intercept of the line through the two smallest-`s` points.
    pub fit_two_point: f64,
    /// Least-squares line intercept over the whole sweep.
    pub fit_three_point: f64,
    /// Exact `s -> 0` limit from the ray geometry (analytic tails only).
    pub ray_limit: Option<f64>,
}

/// Evaluates `s alpha_s(E, R, q)` along a decreasing `s` sweep and fits
/// `s alpha_s = alpha + c s`.
///
/// With a rasterized field the box cells outside `B_R(q)` are summed
/// directly and the analytic tail covers the rest; with a pure tail the
/// radial integral is exact per ray.
pub fn alpha_numeric(
    field: Option<&IndicatorField>,
    tail: &TailModel,
    r_cut: f64,
    q: [f64; 2],
    s_list: &[f64],
) -> Result<AlphaNumeric> {
    if s_list.len() < 2 {
        return Err(Error::Parameter("alpha sweep needs at least two s values".into()));
    }
    let n = field.map_or(2, |f| f.grid.n);
    let mut per_s = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let mut alpha_s = 0.0;
        match field {
            None => {
                alpha_s += tail_kernel_integral(tail, q, s, n, &Exclusion::Ball(r_cut))?;
            }
            Some(f) => {
                check_binary(f)?;
                let g = &f.grid;
                let mea = g.cell_measure();
                let exp = -(g.n as f64 + s);
                for idx in 0..g.cell_count() {
                    if f.values[idx] == 1.0 {
                        let c = g.center(idx);
                        let dx = c[0] - q[0];
                        let dy = if g.n == 2 { c[1] - q[1] } else { 0.0 };
                        let d = (dx * dx + dy * dy).sqrt();
                        if d > r_cut {
                            alpha_s += mea * d.powf(exp);
                        }
                    }
                }
                alpha_s += tail_kernel_integral(
                    tail,
                    q,
                    s,
                    g.n,
                    &Exclusion::BoxAndBall { lower: g.lower, upper: g.upper, radius: r_cut },
                )?;
            }
        }
        per_s.push((s, s * alpha_s));
    }
    let xs: Vec<f64> = per_s.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = per_s.iter().map(|p| p.1).collect();
    let (fit3, _) = linear_fit(&xs, &ys);
    let fit2 = two_point_intercept(&xs, &ys);
    let ray_limit = if field.is_none() { Some(alpha_ray(tail, q, n)?) } else { None };
    Ok(AlphaNumeric { per_s, fit_two_point: fit2, fit_three_point: fit3, ray_limit })
}

/// Small-`s` limit of `s I_s[E](q)`, extrapolated over the sweep and
/// compared against `omega_n - 2 alpha(E)` when the tail supplies alpha.
#[derive(Debug, Clone)]
pub struct CurvatureLimit {
    pub per_s: Vec<(f64, f64)>,
    pub extrapolated: f64,
    pub target: Option<f64>,
}

pub fn curvature_s0_limit(
    field: &IndicatorField,
    tail: &TailModel,
    q: [f64; 2],
    s_list: &[f64],
    pv_radius: f64,
) -> Result<CurvatureLimit> {
    let mut per_s = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let sample = curvature_set(field, tail, q, s, pv_radius)?;
        per_s.push((s, s * sample.value));
    }
    let xs: Vec<f64> = per_s.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = per_s.iter().map(|p| p.1).collect();
    let extrapolated = neville_at_zero(&xs, &ys);
    let target = tail.analytic_alpha(field.grid.n).map(|a| omega(field.grid.n) - 2.0 * a);
    Ok(CurvatureLimit { per_s, extrapolated, target })
}

/// Exclusion radius below which positive curvature survives the small-`s`
/// barrier argument: `exp(-(1/s) log((8 w + C)/(8 w + C/2)))`.
pub fn delta_threshold(s: f64, c: f64, n: usize) -> f64 {
    let w = omega(n);
    (-(1.0 / s) * ((8.0 * w + c) / (8.0 * w + c / 2.0)).ln()).exp()
}

/// Tolerance band for the Euler-Lagrange residual at interface points of
/// discrete minimizers: `10 h^{1-s}` times the kernel scale `omega_n`.
pub fn el_tolerance(h: f64, s: f64, n: usize) -> f64 {
    10.0 * h.powf(1.0 - s) * omega(n)
}

/// Discretization band for flat interfaces: `5 h^{1-s} omega_n`.
pub fn flat_band(h: f64, s: f64, n: usize) -> f64 {
    5.0 * h.powf(1.0 - s) * omega(n)
}

/// First interface face midpoint of a binary field, scanning row-major.
pub fn find_interface_face(field: &IndicatorField) -> Option<[f64; 2]> {
    let g = &field.grid;
    for i1 in 0..g.cells[1] {
        for i0 in 1..g.cells[0] {
            let a = g.index(i0 - 1, i1);
            let b = g.index(i0, i1);
            if field.values[a] != field.values[b] {
                return Some([
                    g.lower[0] + i0 as f64 * g.h,
                    if g.n == 2 { g.lower[1] + (i1 as f64 + 0.5) * g.h } else { 0.0 },
                ]);
            }
        }
    }
    None
}

/// All interface face midpoints (both orientations) of a binary field.
pub fn interface_faces(field: &IndicatorField) -> Vec<[f64; 2]> {
    let g = &field.grid;
    let mut out = Vec::new();
    for i1 in 0..g.cells[1] {
        for i0 in 1..g.cells[0] {
            if field.values[g.index(i0 - 1, i1)] != field.values[g.index(i0, i1)] {
                out.push([
                    g.lower[0] + i0 as f64 * g.h,
                    if g.n == 2 { g.lower[1] + (i1 as f64 + 0.5) * g.h } else { 0.0 },
                ]);
            }
        }
    }
    if g.n == 2 {
        for i1 in 1..g.cells[1] {
            for i0 in 0..g.cells[0] {
                if field.values[g.index(i0, i1 - 1)] != field.values[g.index(i0, i1)] {
                    out.push([
                        g.lower[0] + (i0 as f64 + 0.5) * g.h,
                        g.lower[1] + i1 as f64 * g.h,
                    ]);
                }
            }
        }
    }
    out
}
