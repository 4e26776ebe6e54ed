//! Uniform cell grids, analytic shapes and rasterization.
//!
//! Cells are squares of side `h`, ordered row-major with axis 0 fastest,
//! so CSV output and kernel tables are reproducible across runs.

use crate::error::{Error, Result};

/// Hard cap on the number of cells in a grid.
pub const MAX_CELLS: usize = 1 << 22;

/// Relative tolerance used when checking that cells are square.
const SQUARE_TOL: f64 = 1e-12;

/// Uniform decomposition of a bounded box in dimension 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Spatial dimension, 1 or 2.
    pub n: usize,
    /// Lower box corner per axis (axis 1 unused when `n == 1`).
    pub lower: [f64; 2],
    /// Upper box corner per axis.
    pub upper: [f64; 2],
    /// Cells per axis (axis 1 is 1 when `n == 1`).
    pub cells: [usize; 2],
    /// Side length of every cell.
    pub h: f64,
}

/// Builds a grid over `bounds` with the given cell counts.
///
/// `bounds` holds `(lower, upper)` per axis; pass one pair for 1D, two for 2D.
/// Cells must come out square and the total count must stay under [`MAX_CELLS`].
pub fn build_grid(bounds: &[(f64, f64)], cells_per_axis: &[usize]) -> Result<Grid> {
    let n = bounds.len();
    if n == 0 || n > 2 {
        return Err(Error::Config(format!("dimension must be 1 or 2, got {n}")));
    }
    if cells_per_axis.len() != n {
        return Err(Error::Config(format!(
            "got {} cell counts for {} axes",
            cells_per_axis.len(),
            n
        )));
    }
    let mut lower = [0.0; 2];
    let mut upper = [0.0; 2];
    let mut cells = [1usize; 2];
    for k in 0..n {
        let (lo, hi) = bounds[k];
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config(format!("degenerate bounds on axis {k}: [{lo}, {hi}]")));
        }
        if cells_per_axis[k] < 2 {
            return Err(Error::Config(format!(
                "need at least 2 cells per axis, got {} on axis {k}",
                cells_per_axis[k]
            )));
        }
        lower[k] = lo;
        upper[k] = hi;
        cells[k] = cells_per_axis[k];
    }
    let h0 = (upper[0] - lower[0]) / cells[0] as f64;
    if n == 2 {
        let h1 = (upper[1] - lower[1]) / cells[1] as f64;
        if (h1 - h0).abs() > SQUARE_TOL * h0.abs() {
            return Err(Error::Config(format!(
                "cells are not square: h0 = {h0}, h1 = {h1}"
            )));
        }
    }
    let count: usize = cells[..n].iter().product();
    if count > MAX_CELLS {
        return Err(Error::Capacity(format!(
            "{count} cells exceed the cap of {MAX_CELLS}"
        )));
    }
    Ok(Grid { n, lower, upper, cells, h: h0 })
}

impl Grid {
    /// Total number of cells.
    pub fn cell_count(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    /// Flat index of the cell with per-axis indices `(i0, i1)`; axis 0 fastest.
    #[inline]
    pub fn index(&self, i0: usize, i1: usize) -> usize {
        debug_assert!(i0 < self.cells[0] && i1 < self.cells[1]);
        i1 * self.cells[0] + i0
    }

    /// Per-axis indices of the cell with flat index `idx`.
    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.cells[0], idx / self.cells[0])
    }

    /// Center of the cell with flat index `idx`.
    #[inline]
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let (i0, i1) = self.coords(idx);
        [
            self.lower[0] + (i0 as f64 + 0.5) * self.h,
            if self.n == 2 {
                self.lower[1] + (i1 as f64 + 0.5) * self.h
            } else {
                0.0
            },
        ]
    }

    /// Cell measure `h^n`.
    #[inline]
    pub fn cell_measure(&self) -> f64 {
        self.h.powi(self.n as i32)
    }

    /// Measure of the whole box.
    pub fn box_measure(&self) -> f64 {
        self.cell_measure() * self.cell_count() as f64
    }

    /// True when `p` lies strictly inside the box (first `n` coordinates).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..self.n).all(|k| p[k] > self.lower[k] && p[k] < self.upper[k])
    }
}

/// Analytic shape used as rasterization input and as exterior datum geometry.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `|x - center| < radius`; an interval in 1D.
    Ball { center: [f64; 2], radius: f64 },
    /// `normal . x < offset`.
    HalfSpace { normal: [f64; 2], offset: f64 },
    /// `inner < |x| < outer`, centered at the origin.
    Annulus { inner: f64, outer: f64 },
    /// `x2 >= ((x1 - vertex) tan(angle))_+`: a half-plane bent upward at
    /// `x1 = vertex`. Requires `angle` in (0, pi/2) and `vertex >= 1`.
    Cone { vertex: f64, angle: f64 },
    /// `(B_{1+delta} \ B_1) ∩ {x2 < 0}`.
    HalfRing { delta: f64 },
    Union(Box<Shape>, Box<Shape>),
    Intersection(Box<Shape>, Box<Shape>),
    Complement(Box<Shape>),
}

impl Shape {
    /// Checks the shape parameters against their admissible ranges.
    pub fn validate(&self) -> Result<()> {
        match self {
            Shape::Ball { radius, .. } => {
                if *radius <= 0.0 {
                    return Err(Error::Parameter(format!("ball radius must be > 0, got {radius}")));
                }
            }
            Shape::HalfSpace { normal, .. } => {
                if normal[0] == 0.0 && normal[1] == 0.0 {
                    return Err(Error::Parameter("half-space normal must be nonzero".into()));
                }
            }
            Shape::Annulus { inner, outer } => {
                if !(0.0 < *inner && inner < outer) {
                    return Err(Error::Parameter(format!(
                        "annulus needs 0 < inner < outer, got {inner}, {outer}"
                    )));
                }
            }
            Shape::Cone { vertex, angle } => {
                if !(*angle > 0.0 && *angle < std::f64::consts::FRAC_PI_2) {
                    return Err(Error::Parameter(format!(
                        "cone angle must lie in (0, pi/2), got {angle}"
                    )));
                }
                if *vertex < 1.0 {
                    return Err(Error::Parameter(format!("cone vertex must be >= 1, got {vertex}")));
                }
            }
            Shape::HalfRing { delta } => {
                if *delta <= 0.0 {
                    return Err(Error::Parameter(format!("half-ring delta must be > 0, got {delta}")));
                }
            }
            Shape::Union(a, b) | Shape::Intersection(a, b) => {
                a.validate()?;
                b.validate()?;
            }
            Shape::Complement(a) => a.validate()?,
        }
        Ok(())
    }

    /// Membership test at a point. In 1D only `p[0]` is read.
    pub fn contains(&self, p: [f64; 2], n: usize) -> bool {
        match self {
            Shape::Ball { center, radius } => {
                let mut d2 = 0.0;
                for k in 0..n {
                    d2 += (p[k] - center[k]) * (p[k] - center[k]);
                }
                d2 < radius * radius
            }
            Shape::HalfSpace { normal, offset } => {
                let mut dot = 0.0;
                for k in 0..n {
                    dot += normal[k] * p[k];
                }
                dot < *offset
            }
            Shape::Annulus { inner, outer } => {
                let r2: f64 = (0..n).map(|k| p[k] * p[k]).sum();
                r2 > inner * inner && r2 < outer * outer
            }
            Shape::Cone { vertex, angle } => {
                let lift = ((p[0] - vertex) * angle.tan()).max(0.0);
                p[1] >= lift
            }
            Shape::HalfRing { delta } => {
                let r2 = p[0] * p[0] + p[1] * p[1];
                let outer = 1.0 + delta;
                r2 > 1.0 && r2 < outer * outer && p[1] < 0.0
            }
            Shape::Union(a, b) => a.contains(p, n) || b.contains(p, n),
            Shape::Intersection(a, b) => a.contains(p, n) && b.contains(p, n),
            Shape::Complement(a) => !a.contains(p, n),
        }
    }
}

/// Per-cell values in `[0, 1]` with a frozen mask marking immutable exterior data.
#[derive(Debug, Clone)]
pub struct IndicatorField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub frozen: Vec<bool>,
}

impl IndicatorField {
    /// A field of constant `value` with nothing frozen.
    pub fn constant(grid: Grid, value: f64) -> Self {
        assert!((0.0..=1.0).contains(&value));
        IndicatorField {
            grid,
            values: vec![value; grid.cell_count()],
            frozen: vec![false; grid.cell_count()],
        }
    }

    /// True when every value is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Cellwise complement `1 - u`; the frozen mask is kept.
    pub fn complement(&self) -> Self {
        IndicatorField {
            grid: self.grid,
            values: self.values.iter().map(|v| 1.0 - v).collect(),
            frozen: self.frozen.clone(),
        }
    }
}

/// Rasterization options.
#[derive(Debug, Clone, Copy, Default)]
pub struct RasterOptions {
    /// When set, each cell is sampled on a 4x4 subgrid and the field stores
    /// the covered fraction. Off by default: plain center sampling.
    pub antialias: bool,
}

/// Rasterizes `shape` on `grid`; `frozen` marks cells (by center) holding
/// immutable exterior data.
pub fn rasterize<F>(shape: &Shape, grid: &Grid, frozen: F, opts: RasterOptions) -> Result<IndicatorField>
where
    F: Fn([f64; 2]) -> bool,
{
    shape.validate()?;
    let count = grid.cell_count();
    let mut values = Vec::with_capacity(count);
    let mut frozen_mask = Vec::with_capacity(count);
    for idx in 0..count {
        let c = grid.center(idx);
        let v = if opts.antialias {
            subsample(shape, grid, c)
        } else if shape.contains(c, grid.n) {
            1.0
        } else {
            0.0
        };
        values.push(v);
        frozen_mask.push(frozen(c));
    }
    Ok(IndicatorField { grid: *grid, values, frozen: frozen_mask })
}

/// 16-point (4 per axis in 2D, 16 in 1D) subcell coverage estimate.
fn subsample(shape: &Shape, grid: &Grid, center: [f64; 2]) -> f64 {
    let m = if grid.n == 2 { 4 } else { 16 };
    let step = grid.h / m as f64;
    let mut hits = 0usize;
    let mut total = 0usize;
    if grid.n == 1 {
        for a in 0..m {
            let x = center[0] - grid.h / 2.0 + (a as f64 + 0.5) * step;
            total += 1;
            if shape.contains([x, 0.0], 1) {
                hits += 1;
            }
        }
    } else {
        for a in 0..m {
            for b in 0..m {
                let p = [
                    center[0] - grid.h / 2.0 + (a as f64 + 0.5) * step,
                    center[1] - grid.h / 2.0 + (b as f64 + 0.5) * step,
                ];
                total += 1;
                if shape.contains(p, 2) {
                    hits += 1;
                }
            }
        }
    }
    hits as f64 / total as f64
}

/// Builds a cell mask from a shape by center sampling.
pub fn mask_from_shape(shape: &Shape, grid: &Grid) -> Vec<bool> {
    (0..grid.cell_count())
        .map(|idx| shape.contains(grid.center(idx), grid.n))
        .collect()
}

/// `h^n` times the sum of values over masked cells.
pub fn volume(field: &IndicatorField, mask: &[bool]) -> f64 {
    assert_eq!(mask.len(), field.values.len(), "mask does not match grid");
    let mut sum = 0.0;
    for (v, &m) in field.values.iter().zip(mask) {
        if m {
            sum += v;
        }
    }
    sum * field.grid.cell_measure()
}

/// Volume over all cells.
pub fn total_volume(field: &IndicatorField) -> f64 {
    field.values.iter().sum::<f64>() * field.grid.cell_measure()
}
