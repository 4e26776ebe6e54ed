//! Binary minimization of the fractional perimeter with fixed exterior data:
//! exact min-cut, convex relaxation with thresholding, and exhaustive search
//! as the small-instance oracle.
//!
//! The binary objective has only nonnegative pairwise `|x_i - x_j|` terms
//! plus unary terms, so it is submodular and a two-terminal max-flow finds
//! the global optimum. The relaxation satisfies the discrete coarea formula
//! against binary exterior data, hence thresholding it recovers the same
//! minimum.

use crate::error::{Error, Result};
use crate::grid::IndicatorField;
use crate::kernel::{build_kernel_table, KernelTable};
use crate::perimeter::{perimeter, PerimeterBreakdown};
use crate::tail::{tail_kernel_integral, Exclusion, TailModel};

/// Fixed-point scale for flow capacities: energies are multiplied by `2^32`
/// and rounded, so cut values are reproducible bit for bit.
pub const CAPACITY_SCALE: f64 = 4294967296.0;

/// A set-minimization instance: domain mask, frozen exterior data in the
/// box, analytic tail, fractional parameter.
#[derive(Debug, Clone)]
pub struct SetProblem {
    pub exterior: IndicatorField,
    pub omega: Vec<bool>,
    pub tail: TailModel,
    pub s: f64,
}

impl SetProblem {
    /// Validates the masks: the domain must be nonempty and connected, the
    /// exterior binary, and frozen cells exactly the complement of the
    /// domain.
    pub fn new(
        exterior: IndicatorField,
        omega: Vec<bool>,
        tail: TailModel,
        s: f64,
    ) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Parameter(format!("s must lie in (0,1), got {s}")));
        }
        let g = &exterior.grid;
        if omega.len() != g.cell_count() {
            return Err(Error::Config("domain mask does not match the grid".into()));
        }
        if !exterior.is_binary() {
            return Err(Error::Config("exterior data must be binary".into()));
        }
        for i in 0..omega.len() {
            if omega[i] == exterior.frozen[i] {
                return Err(Error::Config(
                    "frozen cells must be exactly the complement of the domain".into(),
                ));
            }
        }
        tail.validate(g.n)?;
        let count = omega.iter().filter(|&&m| m).count();
        if count == 0 {
            return Err(Error::Config("domain is empty".into()));
        }
        if !connected(g, &omega) {
            return Err(Error::Config("domain is not connected".into()));
        }
        Ok(SetProblem { exterior, omega, tail, s })
    }

    pub fn unfrozen_cells(&self) -> Vec<usize> {
        (0..self.omega.len()).filter(|&i| self.omega[i]).collect()
    }
}

fn connected(g: &crate::grid::Grid, mask: &[bool]) -> bool {
    let Some(start) = mask.iter().position(|&m| m) else {
        return false;
    };
    let mut seen = vec![false; mask.len()];
    let mut queue = std::collections::VecDeque::new();
    seen[start] = true;
    queue.push_back(start);
    let mut reached = 1usize;
    while let Some(i) = queue.pop_front() {
        let (i0, i1) = g.coords(i);
        let mut push = |j: usize, seen: &mut Vec<bool>, queue: &mut std::collections::VecDeque<usize>, reached: &mut usize| {
            if mask[j] && !seen[j] {
                seen[j] = true;
                *reached += 1;
                queue.push_back(j);
            }
        };
        if i0 > 0 {
            push(g.index(i0 - 1, i1), &mut seen, &mut queue, &mut reached);
        }
        if i0 + 1 < g.cells[0] {
            push(g.index(i0 + 1, i1), &mut seen, &mut queue, &mut reached);
        }
        if g.n == 2 {
            if i1 > 0 {
                push(g.index(i0, i1 - 1), &mut seen, &mut queue, &mut reached);
            }
            if i1 + 1 < g.cells[1] {
                push(g.index(i0, i1 + 1), &mut seen, &mut queue, &mut reached);
            }
        }
    }
    reached == mask.iter().filter(|&&m| m).count()
}

/// The solver-facing objective: pairwise weights among domain cells plus the
/// unary label costs against the frozen data and the tail (the frozen-frozen
/// constant is dropped).
pub struct SetObjective {
    pub cells: Vec<usize>,
    /// Pairwise weight between domain cells `(a, b)`, `a < b` indices into
    /// `cells`, flattened upper triangle.
    pairwise: Vec<f64>,
    /// Unary cost of labeling cell `a` one / zero.
    pub cost_one: Vec<f64>,
    pub cost_zero: Vec<f64>,
}

impl SetObjective {
    pub fn build(problem: &SetProblem, table: &KernelTable) -> Result<SetObjective> {
        let g = &problem.exterior.grid;
        let cells = problem.unfrozen_cells();
        let m = cells.len();
        let mut pairwise = vec![0.0; m * (m - 1) / 2];
        for a in 0..m {
            for b in a + 1..m {
                pairwise[pair_index(a, b, m)] = table.weight_between(g, cells[a], cells[b]);
            }
        }
        let comp = problem.tail.complement();
        let excl = Exclusion::Box { lower: g.lower, upper: g.upper };
        let mea = g.cell_measure();
        let mut cost_one = vec![0.0; m];
        let mut cost_zero = vec![0.0; m];
        for (a, &i) in cells.iter().enumerate() {
            let mut one = 0.0;
            let mut zero = 0.0;
            for j in 0..g.cell_count() {
                if problem.omega[j] {
                    continue;
                }
                let w = table.weight_between(g, i, j);
                let v = problem.exterior.values[j];
                one += w * (1.0 - v);
                zero += w * v;
            }
            let c = g.center(i);
            one += mea * tail_kernel_integral(&comp, c, problem.s, g.n, &excl)?;
            zero += mea * tail_kernel_integral(&problem.tail, c, problem.s, g.n, &excl)?;
            cost_one[a] = one;
            cost_zero[a] = zero;
        }
        Ok(SetObjective { cells, pairwise, cost_one, cost_zero })
    }

    #[inline]
    pub fn pair(&self, a: usize, b: usize) -> f64 {
        let m = self.cells.len();
        if a < b {
            self.pairwise[pair_index(a, b, m)]
        } else {
            self.pairwise[pair_index(b, a, m)]
        }
    }

    /// Objective value of a binary labeling (constants dropped).
    pub fn value(&self, labels: &[bool]) -> f64 {
        let m = self.cells.len();
        let mut acc = 0.0;
        for a in 0..m {
            acc += if labels[a] { self.cost_one[a] } else { self.cost_zero[a] };
            for b in a + 1..m {
                if labels[a] != labels[b] {
                    acc += self.pairwise[pair_index(a, b, m)];
                }
            }
        }
        acc
    }

    /// Objective of a relaxed labeling in `[0, 1]`.
    pub fn relaxed_value(&self, x: &[f64]) -> f64 {
        let m = self.cells.len();
        let mut acc = 0.0;
        for a in 0..m {
            acc += x[a] * self.cost_one[a] + (1.0 - x[a]) * self.cost_zero[a];
            for b in a + 1..m {
                acc += self.pairwise[pair_index(a, b, m)] * (x[a] - x[b]).abs();
            }
        }
        acc
    }
}

#[inline]
fn pair_index(a: usize, b: usize, m: usize) -> usize {
    debug_assert!(a < b && b < m);
    a * m - a * (a + 1) / 2 + (b - a - 1)
}

/// How a solution was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    MinCut,
    RelaxedThreshold,
    Brute,
}

#[derive(Debug, Clone)]
pub struct SetSolution {
    pub field: IndicatorField,
    pub energy: PerimeterBreakdown,
    /// Fraction of the domain covered by the minimizer.
    pub occupancy: f64,
    pub method: SolveMethod,
    /// Max-flow value in energy units (min-cut only): equals the optimal
    /// objective up to the dropped constants and the fixed-point rounding.
    pub certificate: Option<f64>,
}

fn assemble_solution(
    problem: &SetProblem,
    table: &KernelTable,
    labels: &[bool],
    objective: &SetObjective,
    method: SolveMethod,
    certificate: Option<f64>,
) -> Result<SetSolution> {
    let mut field = problem.exterior.clone();
    for (a, &i) in objective.cells.iter().enumerate() {
        field.values[i] = if labels[a] { 1.0 } else { 0.0 };
    }
    let energy = perimeter(&field, &problem.omega, &problem.tail, table, problem.s)?;
    let inside = labels.iter().filter(|&&l| l).count();
    let occupancy = inside as f64 / objective.cells.len() as f64;
    Ok(SetSolution { field, energy, occupancy, method, certificate })
}

/// Exact global minimizer through the two-terminal cut encoding.
///
/// Ties are broken toward the empty label: the returned set is the minimal
/// source component of the residual graph.
pub fn mincut_minimize(problem: &SetProblem) -> Result<SetSolution> {
    let table = build_kernel_table(&problem.exterior.grid, problem.s)?;
    mincut_minimize_with(problem, &table)
}

pub fn mincut_minimize_with(problem: &SetProblem, table: &KernelTable) -> Result<SetSolution> {
    let objective = SetObjective::build(problem, table)?;
    let m = objective.cells.len();
    let scale = |v: f64| -> Result<i64> {
        let c = (v * CAPACITY_SCALE).round();
        if c < 0.0 || c > 9.0e18 {
            return Err(Error::Numeric(format!("capacity {v} out of fixed-point range")));
        }
        Ok(c as i64)
    };
    // nodes: 0 = source (label one side), 1 = sink, 2.. = cells
    let mut flow = MaxFlow::new(m + 2);
    for a in 0..m {
        // cut cost pays cost_zero when the cell falls on the sink side
        flow.add_edge(0, a + 2, scale(objective.cost_zero[a])?, 0);
        flow.add_edge(a + 2, 1, scale(objective.cost_one[a])?, 0);
        for b in a + 1..m {
            let w = scale(objective.pair(a, b))?;
            if w > 0 {
                flow.add_edge(a + 2, b + 2, w, w);
            }
        }
    }
    let value = flow.run(0, 1);
    let reachable = flow.source_side(0);
    let labels: Vec<bool> = (0..m).map(|a| reachable[a + 2]).collect();
    let certificate = Some(value as f64 / CAPACITY_SCALE);
    assemble_solution(problem, table, &labels, &objective, SolveMethod::MinCut, certificate)
}

/// Exhaustive minimizer for instances with at most 20 unfrozen cells,
/// enumerated in Gray-code order with O(m) updates per flip.
pub fn brute_force(problem: &SetProblem) -> Result<SetSolution> {
    let table = build_kernel_table(&problem.exterior.grid, problem.s)?;
    brute_force_with(problem, &table)
}

pub fn brute_force_with(problem: &SetProblem, table: &KernelTable) -> Result<SetSolution> {
    let objective = SetObjective::build(problem, table)?;
    let m = objective.cells.len();
    if m > 20 {
        return Err(Error::Capacity(format!("brute force capped at 20 cells, got {m}")));
    }
    let mut labels = vec![false; m];
    let mut energy = objective.value(&labels);
    let mut best = energy;
    let mut best_code = 0u64;
    let mut code = 0u64;
    for k in 1u64..(1 << m) {
        let flip = k.trailing_zeros() as usize;
        // energy delta for toggling one label
        let old = labels[flip];
        let mut delta = if old {
            objective.cost_zero[flip] - objective.cost_one[flip]
        } else {
            objective.cost_one[flip] - objective.cost_zero[flip]
        };
        for b in 0..m {
            if b == flip {
                continue;
            }
            let w = objective.pair(flip, b);
            // a pair starts or stops being cut
            if labels[b] == old {
                delta += w;
            } else {
                delta -= w;
            }
        }
        labels[flip] = !old;
        code ^= 1 << flip;
        energy += delta;
        if energy < best - 1e-15 {
            best = energy;
            best_code = code;
        }
    }
    let labels: Vec<bool> = (0..m).map(|a| best_code >> a & 1 == 1).collect();
    assemble_solution(problem, table, &labels, &objective, SolveMethod::Brute, None)
}

/// Relaxed minimizer in `[0, 1]` by a primal-dual proximal iteration, plus
/// the best-threshold binary recovery.
pub struct RelaxedSolution {
    pub relaxed: IndicatorField,
    pub relaxed_energy: f64,
    pub thresholded: SetSolution,
    pub threshold: f64,
    pub iterations: usize,
}

pub fn relaxed_minimize(problem: &SetProblem, tol: f64) -> Result<RelaxedSolution> {
    let table = build_kernel_table(&problem.exterior.grid, problem.s)?;
    relaxed_minimize_with(problem, &table, tol)
}

pub fn relaxed_minimize_with(
    problem: &SetProblem,
    table: &KernelTable,
    tol: f64,
) -> Result<RelaxedSolution> {
    if !(tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let objective = SetObjective::build(problem, table)?;
    let m = objective.cells.len();
    let pairs: Vec<(usize, usize, f64)> = {
        let mut v = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                let w = objective.pair(a, b);
                if w > 0.0 {
                    v.push((a, b, w));
                }
            }
        }
        v
    };
    let linear: Vec<f64> =
        (0..m).map(|a| objective.cost_one[a] - objective.cost_zero[a]).collect();

    // primal-dual steps sized by the unweighted difference operator norm
    let step = 1.0 / (2.0 * m as f64).sqrt().max(1.0);
    let mut x = vec![0.5; m];
    let mut x_bar = x.clone();
    let mut dual = vec![0.0; pairs.len()];
    let max_iter = 200_000usize;
    let mut iterations = 0;
    let mut gap;
    loop {
        iterations += 1;
        for (k, &(a, b, w)) in pairs.iter().enumerate() {
            let v = dual[k] + step * (x_bar[a] - x_bar[b]);
            dual[k] = v.clamp(-w, w);
        }
        let mut diff_inf = 0.0f64;
        for a in 0..m {
            x_bar[a] = x[a];
        }
        let mut grad = linear.clone();
        for (k, &(a, b, _)) in pairs.iter().enumerate() {
            grad[a] += dual[k];
            grad[b] -= dual[k];
        }
        for a in 0..m {
            let next = (x[a] - step * grad[a]).clamp(0.0, 1.0);
            diff_inf = diff_inf.max((next - x[a]).abs());
            x[a] = next;
        }
        for a in 0..m {
            x_bar[a] = 2.0 * x[a] - x_bar[a];
        }
        if iterations % 64 == 0 || diff_inf < tol * step {
            // duality gap: primal minus the dual bound
            let primal = objective.relaxed_value(&x) - objective.cost_zero.iter().sum::<f64>();
            let mut dual_obj = 0.0;
            let mut reduced = linear.clone();
            for (k, &(a, b, _)) in pairs.iter().enumerate() {
                reduced[a] += dual[k];
                reduced[b] -= dual[k];
            }
            for &r in &reduced {
                dual_obj += r.min(0.0);
            }
            gap = primal - dual_obj;
            if gap <= tol * (1.0 + primal.abs()) {
                break;
            }
        }
        if iterations >= max_iter {
            return Err(Error::IterationLimit { iterations, residual: f64::NAN });
        }
    }

    // best threshold over the percent grid
    let mut best_labels: Option<Vec<bool>> = None;
    let mut best_energy = f64::INFINITY;
    let mut best_level = 0.0;
    for k in 0..=100 {
        let level = k as f64 * 0.01;
        let labels: Vec<bool> = x.iter().map(|&v| v > level).collect();
        let e = objective.value(&labels);
        if e < best_energy {
            best_energy = e;
            best_labels = Some(labels);
            best_level = level;
        }
    }
    let labels = best_labels.unwrap();
    let thresholded = assemble_solution(
        problem,
        table,
        &labels,
        &objective,
        SolveMethod::RelaxedThreshold,
        None,
    )?;
    let mut relaxed = problem.exterior.clone();
    for (a, &i) in objective.cells.iter().enumerate() {
        relaxed.values[i] = x[a];
    }
    let relaxed_energy = objective.relaxed_value(&x);
    Ok(RelaxedSolution { relaxed, relaxed_energy, thresholded, threshold: best_level, iterations })
}

/// Dinic max-flow with integer capacities.
struct MaxFlow {
    // arcs stored pairwise: arc k and k ^ 1 are mutual reverses
    head: Vec<u32>,
    cap: Vec<i64>,
    adj: Vec<Vec<u32>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl MaxFlow {
    fn new(nodes: usize) -> Self {
        MaxFlow {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            iter: vec![0; nodes],
        }
    }

    fn add_edge(&mut self, a: usize, b: usize, cap_ab: i64, cap_ba: i64) {
        let k = self.head.len() as u32;
        self.head.push(b as u32);
        self.cap.push(cap_ab);
        self.head.push(a as u32);
        self.cap.push(cap_ba);
        self.adj[a].push(k);
        self.adj[b].push(k + 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|v| *v = -1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &k in &self.adj[v] {
                let to = self.head[k as usize] as usize;
                if self.cap[k as usize] > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[v] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, f: i64) -> i64 {
        if v == t {
            return f;
        }
        while self.iter[v] < self.adj[v].len() {
            let k = self.adj[v][self.iter[v]] as usize;
            let to = self.head[k] as usize;
            if self.cap[k] > 0 && self.level[v] < self.level[to] {
                let d = self.dfs(to, t, f.min(self.cap[k]));
                if d > 0 {
                    self.cap[k] -= d;
                    self.cap[k ^ 1] += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0i64;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|v| *v = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    /// Nodes reachable from the source in the residual graph.
    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = std::collections::VecDeque::new();
        seen[s] = true;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &k in &self.adj[v] {
                let to = self.head[k as usize] as usize;
                if self.cap[k as usize] > 0 && !seen[to] {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
        seen
    }
}

/// Exterior-exterior interaction constant dropped from the solver
/// objectives: pairwise among frozen box cells plus their tail terms.
pub fn exterior_constant(problem: &SetProblem, table: &KernelTable) -> Result<f64> {
    let g = &problem.exterior.grid;
    let u = &problem.exterior.values;
    let mut acc = 0.0;
    let frozen: Vec<usize> =
        (0..g.cell_count()).filter(|&i| !problem.omega[i]).collect();
    for (ai, &i) in frozen.iter().enumerate() {
        for &j in frozen.iter().skip(ai + 1) {
            acc += table.weight_between(g, i, j) * (u[i] - u[j]).abs();
        }
    }
    let comp = problem.tail.complement();
    let excl = Exclusion::Box { lower: g.lower, upper: g.upper };
    let mea = g.cell_measure();
    for &i in &frozen {
        let c = g.center(i);
        if u[i] == 1.0 {
            acc += mea * tail_kernel_integral(&comp, c, problem.s, g.n, &excl)?;
        } else {
            acc += mea * tail_kernel_integral(&problem.tail, c, problem.s, g.n, &excl)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, mask_from_shape, rasterize, RasterOptions, Shape};

    fn problem_from_shapes(
        cells: usize,
        half: f64,
        data: &Shape,
        domain: &Shape,
        tail: TailModel,
        s: f64,
    ) -> SetProblem {
        let g = build_grid(&[(-half, half), (-half, half)], &[cells, cells]).unwrap();
        let omega = mask_from_shape(domain, &g);
        let omega_clone = omega.clone();
        let mut field =
            rasterize(data, &g, move |_| false, RasterOptions::default()).unwrap();
        for i in 0..g.cell_count() {
            field.frozen[i] = !omega_clone[i];
            if omega_clone[i] {
                field.values[i] = 0.0;
            }
        }
        SetProblem::new(field, omega, tail, s).unwrap()
    }

    #[test]
    fn empty_exterior_gives_empty_minimizer() {
        let domain = Shape::Ball { center: [0.0, 0.0], radius: 0.6 };
        let p = problem_from_shapes(
            24,
            1.0,
            &Shape::Ball { center: [9.0, 9.0], radius: 0.1 },
            &domain,
            TailModel::Empty,
            0.4,
        );
        let sol = mincut_minimize(&p).unwrap();
        assert_eq!(sol.occupancy, 0.0);
        assert!(sol.energy.total.abs() < 1e-12);
    }

    #[test]
    fn halfspace_data_recovers_halfspace() {
        let hs = Shape::HalfSpace { normal: [0.0, 1.0], offset: 0.0 };
        let domain = Shape::Ball { center: [0.0, 0.0], radius: 0.75 };
        let p = problem_from_shapes(
            48,
            1.0,
            &hs,
            &domain,
            TailModel::HalfSpace { normal: [0.0, 1.0], offset: 0.0 },
            0.5,
        );
        let sol = mincut_minimize(&p).unwrap();
        let g = &sol.field.grid;
        let h = g.h;
        let mut wrong = 0usize;
        let mut band = 0usize;
        for i in 0..g.cell_count() {
            if !p.omega[i] {
                continue;
            }
            let c = g.center(i);
            let inside = sol.field.values[i] == 1.0;
            if c[1].abs() <= h {
                band += 1;
                continue;
            }
            if inside != (c[1] < 0.0) {
                wrong += 1;
            }
        }
        assert_eq!(wrong, 0, "cells off the half-space outside the one-cell band ({band} in band)");
    }

    #[test]
    fn halfspace_rigidity_occupancies() {
        let hs = Shape::HalfSpace { normal: [0.0, 1.0], offset: 0.0 };
        let domain = Shape::Ball { center: [0.0, 0.0], radius: 0.75 };
        let p = problem_from_shapes(
            64,
            1.0,
            &hs,
            &domain,
            TailModel::HalfSpace { normal: [0.0, 1.0], offset: 0.0 },
            0.3,
        );
        let sol = mincut_minimize(&p).unwrap();
        let g = &sol.field.grid;
        let mut below = (0usize, 0usize);
        let mut above = (0usize, 0usize);
        for i in 0..g.cell_count() {
            if !p.omega[i] {
                continue;
            }
            let inside = sol.field.values[i] == 1.0;
            if g.center(i)[1] < 0.0 {
                below.1 += 1;
                if inside {
                    below.0 += 1;
                }
            } else {
                above.1 += 1;
                if inside {
                    above.0 += 1;
                }
            }
        }
        let occ_below = below.0 as f64 / below.1 as f64;
        let occ_above = above.0 as f64 / above.1 as f64;
        assert!(occ_below >= 0.98, "below-interface occupancy {occ_below}");
        assert!(occ_above <= 0.02, "above-interface occupancy {occ_above}");
    }

    #[test]
    fn one_cell_problem_picks_cheaper_label() {
        let g = build_grid(&[(0.0, 1.0)], &[8]).unwrap();
        let mut field = IndicatorField::constant(g, 1.0);
        let mut omega = vec![false; 8];
        omega[4] = true;
        for i in 0..8 {
            field.frozen[i] = !omega[i];
        }
        field.values[4] = 0.0;
        let p = SetProblem::new(field, omega, TailModel::Full, 0.5).unwrap();
        // surrounded by ones and a full tail: label one is free, zero pays
        let sol = mincut_minimize(&p).unwrap();
        assert_eq!(sol.occupancy, 1.0);
    }

    #[test]
    fn brute_force_matches_mincut_on_random_1d() {
        let g = build_grid(&[(0.0, 1.0)], &[16]).unwrap();
        let mut state = 0x2545f4914f6cdd1du64;
        let mut rand01 = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..20 {
            let mut field = IndicatorField::constant(g, 0.0);
            let mut omega = vec![false; 16];
            for (i, m) in omega.iter_mut().enumerate() {
                *m = (2..14).contains(&i);
            }
            for i in 0..16 {
                field.frozen[i] = !omega[i];
                if !omega[i] {
                    field.values[i] = if rand01() > 0.5 { 1.0 } else { 0.0 };
                }
            }
            let s = 0.1 + 0.8 * rand01();
            let p = SetProblem::new(field, omega.clone(), TailModel::Empty, s).unwrap();
            let brute = brute_force(&p).unwrap();
            let cut = mincut_minimize(&p).unwrap();
            assert!(
                (brute.energy.total - cut.energy.total).abs()
                    <= 1e-9 * brute.energy.total.max(1.0),
                "trial {trial}: brute {} vs cut {}",
                brute.energy.total,
                cut.energy.total
            );
        }
    }

    #[test]
    fn relaxed_threshold_joins_the_exact_chain() {
        let g = build_grid(&[(0.0, 1.0)], &[18]).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rand01 = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..10 {
            let mut field = IndicatorField::constant(g, 0.0);
            let mut omega = vec![false; 18];
            for (i, m) in omega.iter_mut().enumerate() {
                *m = (3..15).contains(&i);
            }
            for i in 0..18 {
                field.frozen[i] = !omega[i];
                if !omega[i] {
                    field.values[i] = if rand01() > 0.5 { 1.0 } else { 0.0 };
                }
            }
            let s = 0.2 + 0.6 * rand01();
            let p = SetProblem::new(field, omega.clone(), TailModel::Empty, s).unwrap();
            let brute = brute_force(&p).unwrap();
            let relax = relaxed_minimize(&p, 1e-9).unwrap();
            let tol = 1e-6 * brute.energy.total.max(1.0);
            assert!(
                (relax.thresholded.energy.total - brute.energy.total).abs() <= tol,
                "trial {trial}: thresholded {} vs brute {}",
                relax.thresholded.energy.total,
                brute.energy.total
            );
            // lower-bound property of the relaxation
            let table = build_kernel_table(&g, s).unwrap();
            let objective = SetObjective::build(&p, &table).unwrap();
            let labels: Vec<bool> = objective
                .cells
                .iter()
                .map(|&i| relax.thresholded.field.values[i] == 1.0)
                .collect();
            assert!(objective.value(&labels) >= relax.relaxed_energy - 1e-6);
        }
    }

    #[test]
    fn complement_duality() {
        let hs = Shape::HalfSpace { normal: [1.0, 0.5], offset: 0.1 };
        let domain = Shape::Ball { center: [0.0, 0.0], radius: 0.7 };
        let tail = TailModel::HalfSpace { normal: [1.0, 0.5], offset: 0.1 };
        let p = problem_from_shapes(32, 1.0, &hs, &domain, tail.clone(), 0.45);
        let sol = mincut_minimize(&p).unwrap();

        let comp_data = Shape::Complement(Box::new(hs));
        let pc = problem_from_shapes(32, 1.0, &comp_data, &domain, tail.complement(), 0.45);
        let solc = mincut_minimize(&pc).unwrap();
        assert!(
            (sol.energy.total - solc.energy.total).abs() <= 1e-9 * sol.energy.total.max(1.0),
            "{} vs {}",
            sol.energy.total,
            solc.energy.total
        );
        assert!((sol.occupancy + solc.occupancy - 1.0).abs() < 0.02);
    }

    #[test]
    fn all_frozen_problem_rejected() {
        let g = build_grid(&[(0.0, 1.0)], &[8]).unwrap();
        let mut field = IndicatorField::constant(g, 0.0);
        field.frozen.iter_mut().for_each(|f| *f = true);
        let err = SetProblem::new(field, vec![false; 8], TailModel::Empty, 0.5);
        assert!(err.is_err());
    }

    #[test]
    fn brute_force_capacity_cap() {
        let g = build_grid(&[(0.0, 1.0), (0.0, 1.0)], &[8, 8]).unwrap();
        let mut field = IndicatorField::constant(g, 0.0);
        let mut omega = vec![false; 64];
        for (i, m) in omega.iter_mut().enumerate().take(40) {
            *m = i < 24;
        }
        // make the domain a connected block of 24 cells
        for i in 0..64 {
            field.frozen[i] = !omega[i];
        }
        let p = SetProblem::new(field, omega, TailModel::Empty, 0.5).unwrap();
        assert!(matches!(brute_force(&p), Err(Error::Capacity(_))));
    }
}
