//! Fractional perimeter of indicator fields, split into local, box-nonlocal
//! and tail contributions, plus the two asymptotic regimes.
//!
//! The pairwise sums are organized per index offset: label aggregates are
//! accumulated once per (field, domain) pair and contracted against any
//! kernel table, so sweeping `s` reuses the expensive double loop.

use crate::error::{Error, Result};
use crate::extrapolate::neville_at_zero;
use crate::grid::{volume, IndicatorField, Shape};
use crate::kernel::{build_kernel_table, pair_weight, KernelTable};
use crate::tail::{tail_kernel_integral, Exclusion, TailModel};
use crate::omega;

/// The three nonnegative parts of `P_s(E, Omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerimeterBreakdown {
    /// Interactions inside the domain.
    pub local: f64,
    /// Domain against the rest of the box.
    pub nonlocal_box: f64,
    /// Domain against the analytic far field.
    pub nonlocal_tail: f64,
    pub total: f64,
}

/// Per-offset sums of the label interactions, reusable across `s`.
pub struct PairAggregates {
    n0: usize,
    n1: usize,
    /// `sum |u_i - u_j|` over domain-domain pairs at each offset.
    local: Vec<f64>,
    /// `sum u_i (1 - u_j) + (1 - u_i) u_j` over domain-exterior pairs.
    cross: Vec<f64>,
}

impl PairAggregates {
    fn index(&self, o0: i64, o1: i64) -> usize {
        (o1 as usize) * (2 * self.n0 - 1) + (o0 + self.n0 as i64 - 1) as usize
    }

    /// Contracts the aggregates against a kernel table, returning the local
    /// and box-nonlocal perimeter parts.
    pub fn contract(&self, table: &KernelTable) -> (f64, f64) {
        let mut local = 0.0;
        let mut cross = 0.0;
        for o1 in 0..self.n1 as i64 {
            let start = if o1 == 0 { 1 } else { -(self.n0 as i64 - 1) };
            for o0 in start..self.n0 as i64 {
                let k = self.index(o0, o1);
                let l = self.local[k];
                let c = self.cross[k];
                if l != 0.0 || c != 0.0 {
                    let w = table.weight(o0, o1);
                    local += w * l;
                    cross += w * c;
                }
            }
        }
        (local, cross)
    }
}

/// Accumulates the per-offset label sums for `field` with domain `mask`.
///
/// Offsets run over the upper half-plane (each unordered pair visited once).
pub fn pair_aggregates(field: &IndicatorField, mask: &[bool]) -> PairAggregates {
    let g = &field.grid;
    let (n0, n1) = (g.cells[0], g.cells[1]);
    let mut agg = PairAggregates {
        n0,
        n1,
        local: vec![0.0; (2 * n0 - 1) * n1],
        cross: vec![0.0; (2 * n0 - 1) * n1],
    };
    let u = &field.values;
    for o1 in 0..n1 as i64 {
        let start = if o1 == 0 { 1 } else { -(n0 as i64 - 1) };
        for o0 in start..n0 as i64 {
            let mut l = 0.0;
            let mut c = 0.0;
            let i0_lo = 0.max(-o0) as usize;
            let i0_hi = n0 - 0.max(o0) as usize;
            for i1 in 0..n1 - o1 as usize {
                let row_i = i1 * n0;
                let row_j = (i1 + o1 as usize) * n0;
                for i0 in i0_lo..i0_hi {
                    let i = row_i + i0;
                    let j = (row_j as i64 + i0 as i64 + o0) as usize;
                    match (mask[i], mask[j]) {
                        (true, true) => l += (u[i] - u[j]).abs(),
                        (true, false) => c += u[i] * (1.0 - u[j]) + (1.0 - u[i]) * u[j],
                        (false, true) => c += u[j] * (1.0 - u[i]) + (1.0 - u[j]) * u[i],
                        (false, false) => {}
                    }
                }
            }
            let k = agg.index(o0, o1);
            agg.local[k] = l;
            agg.cross[k] = c;
        }
    }
    agg
}

fn check_setup(
    field: &IndicatorField,
    mask: &[bool],
    table: &KernelTable,
    s: f64,
) -> Result<()> {
    let g = &field.grid;
    if mask.len() != g.cell_count() {
        return Err(Error::Config("domain mask does not match the grid".into()));
    }
    if table.n != g.n
        || (table.h - g.h).abs() > 1e-12 * g.h
        || table.dims() != [g.cells[0], g.cells[1]]
    {
        return Err(Error::Config("kernel table was built for a different grid".into()));
    }
    if (table.exponent - (g.n as f64 + s)).abs() > 1e-12 || (table.s - s).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "kernel table exponent {} does not match n + s = {}",
            table.exponent,
            g.n as f64 + s
        )));
    }
    for i in 0..mask.len() {
        if mask[i] && field.frozen[i] {
            return Err(Error::Config(format!("domain cell {i} is frozen exterior data")));
        }
    }
    Ok(())
}

/// Tail contribution of the domain cells: each cell interacts with the
/// analytic set (and its complement) outside the box.
pub fn tail_part(
    field: &IndicatorField,
    mask: &[bool],
    tail: &TailModel,
    s: f64,
) -> Result<f64> {
    if matches!(tail, TailModel::Empty | TailModel::Full) {
        // still well-defined, handled by the generic path below
    }
    let g = &field.grid;
    let excl = Exclusion::Box { lower: g.lower, upper: g.upper };
    let comp = tail.complement();
    let measure = g.cell_measure();
    let mut acc = 0.0;
    for i in 0..g.cell_count() {
        if !mask[i] {
            continue;
        }
        let u = field.values[i];
        let c = g.center(i);
        if u > 0.0 {
            acc += u * tail_kernel_integral(&comp, c, s, g.n, &excl)?;
        }
        if u < 1.0 {
            acc += (1.0 - u) * tail_kernel_integral(tail, c, s, g.n, &excl)?;
        }
    }
    Ok(acc * measure)
}

/// Evaluates `P_s(E, Omega)` for a (possibly relaxed) indicator field with
/// exterior data given by the frozen box cells and an analytic tail.
pub fn perimeter(
    field: &IndicatorField,
    mask: &[bool],
    tail: &TailModel,
    table: &KernelTable,
    s: f64,
) -> Result<PerimeterBreakdown> {
    check_setup(field, mask, table, s)?;
    tail.validate(field.grid.n)?;
    let agg = pair_aggregates(field, mask);
    let (local, nonlocal_box) = agg.contract(table);
    let nonlocal_tail = tail_part(field, mask, tail, s)?;
    Ok(PerimeterBreakdown {
        local,
        nonlocal_box,
        nonlocal_tail,
        total: local + nonlocal_box + nonlocal_tail,
    })
}

/// Same quantity by a direct double loop over cell pairs, without the
/// offset table. Oracle path for tests.
pub fn perimeter_direct(
    field: &IndicatorField,
    mask: &[bool],
    tail: &TailModel,
    s: f64,
) -> Result<PerimeterBreakdown> {
    let g = &field.grid;
    let u = &field.values;
    let count = g.cell_count();
    let mut local = 0.0;
    let mut cross = 0.0;
    for i in 0..count {
        let (i0, i1) = g.coords(i);
        for j in i + 1..count {
            let (j0, j1) = g.coords(j);
            let w = pair_weight([j0 as i64 - i0 as i64, j1 as i64 - i1 as i64], g, s)?;
            match (mask[i], mask[j]) {
                (true, true) => local += w * (u[i] - u[j]).abs(),
                (true, false) => cross += w * (u[i] * (1.0 - u[j]) + (1.0 - u[i]) * u[j]),
                (false, true) => cross += w * (u[j] * (1.0 - u[i]) + (1.0 - u[j]) * u[i]),
                (false, false) => {}
            }
        }
    }
    let nonlocal_tail = tail_part(field, mask, tail, s)?;
    Ok(PerimeterBreakdown {
        local,
        nonlocal_box: cross,
        nonlocal_tail,
        total: local + cross + nonlocal_tail,
    })
}

/// Outcome of an asymptotic sweep: the per-`s` renormalized values, their
/// extrapolated limit, and the analytic target when available.
#[derive(Debug, Clone)]
pub struct AsymptoticResult {
    pub per_s: Vec<(f64, f64)>,
    pub extrapolated: f64,
    pub target: Option<f64>,
}

/// Sweep of `(1 - s) P_s` toward `s = 1`, extrapolated in `1 - s`.
pub fn asymptotic_s_to_1(
    field: &IndicatorField,
    mask: &[bool],
    tail: &TailModel,
    s_list: &[f64],
    target: Option<f64>,
) -> Result<AsymptoticResult> {
    let agg = pair_aggregates(field, mask);
    let mut eps = Vec::with_capacity(s_list.len());
    let mut vals = Vec::with_capacity(s_list.len());
    let mut per_s = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let table = build_kernel_table(&field.grid, s)?;
        let (local, cross) = agg.contract(&table);
        let tail_term = tail_part(field, mask, tail, s)?;
        let v = (1.0 - s) * (local + cross + tail_term);
        eps.push(1.0 - s);
        vals.push(v);
        per_s.push((s, v));
    }
    Ok(AsymptoticResult { per_s, extrapolated: neville_at_zero(&eps, &vals), target })
}

/// Sweep of `s P_s` toward `s = 0`, extrapolated in `s`.
pub fn asymptotic_s_to_0(
    field: &IndicatorField,
    mask: &[bool],
    tail: &TailModel,
    s_list: &[f64],
) -> Result<AsymptoticResult> {
    let agg = pair_aggregates(field, mask);
    let mut xs = Vec::with_capacity(s_list.len());
    let mut vals = Vec::with_capacity(s_list.len());
    let mut per_s = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let table = build_kernel_table(&field.grid, s)?;
        let (local, cross) = agg.contract(&table);
        let tail_term = tail_part(field, mask, tail, s)?;
        let v = s * (local + cross + tail_term);
        xs.push(s);
        vals.push(v);
        per_s.push((s, v));
    }
    Ok(AsymptoticResult {
        per_s,
        extrapolated: neville_at_zero(&xs, &vals),
        target: s0_target(field, mask, tail),
    })
}

/// `alpha(CE) |E ∩ Omega| + alpha(E) |CE ∩ Omega|`, the limit of `s P_s`.
pub fn s0_target(field: &IndicatorField, mask: &[bool], tail: &TailModel) -> Option<f64> {
    let n = field.grid.n;
    let alpha_e = tail.analytic_alpha(n)?;
    let alpha_ce = omega(n) - alpha_e;
    let vol_e = volume(field, mask);
    let vol_omega = field.grid.cell_measure() * mask.iter().filter(|&&m| m).count() as f64;
    Some(alpha_ce * vol_e + alpha_e * (vol_omega - vol_e))
}

/// Classical interface length of a shape inside a domain, for the handful of
/// analytic cases the asymptotic targets need.
pub fn classical_interface_length(shape: &Shape, domain: &Shape) -> Option<f64> {
    match (shape, domain) {
        (Shape::Ball { radius, .. }, _) => Some(2.0 * std::f64::consts::PI * radius),
        (Shape::HalfSpace { normal, offset }, Shape::Ball { center, radius }) => {
            let norm = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
            let dist = (normal[0] * center[0] + normal[1] * center[1] - offset).abs() / norm;
            if dist >= *radius {
                Some(0.0)
            } else {
                Some(2.0 * (radius * radius - dist * dist).sqrt())
            }
        }
        _ => None,
    }
}
