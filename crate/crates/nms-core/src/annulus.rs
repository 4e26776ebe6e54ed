//! The classical minimal graph over an annulus: closed form and a
//! finite-difference cross-check.
//!
//! With boundary heights `M` on the inner circle and `0` outside, the radial
//! minimizer satisfies `r u' / sqrt(1 + u'^2) = -c`. The largest attainable
//! inner height is `M0 = rho log((sqrt(R^2 - rho^2) + R)/rho)`; data above it
//! makes the graph stick to the inner wall with the extremal profile.

use crate::error::{Error, Result};

/// Closed-form annulus solution.
#[derive(Debug, Clone)]
pub struct AnnulusSolution {
    pub rho: f64,
    pub r_outer: f64,
    pub m: f64,
    /// First-integral constant in `[0, rho]`.
    pub c: f64,
    /// Attainability threshold for the inner height.
    pub m0: f64,
    pub sticks: bool,
    /// `M - M0` when positive, else 0.
    pub gap: f64,
}

impl AnnulusSolution {
    /// Profile height at radius `r` in `[rho, R]`.
    pub fn height(&self, r: f64) -> f64 {
        profile(self.c, self.r_outer, r)
    }
}

fn profile(c: f64, r_outer: f64, r: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let top = (r_outer * r_outer - c * c).sqrt() + r_outer;
    let bot = (r * r - c * c).max(0.0).sqrt() + r;
    c * (top / bot).ln()
}

/// Inner-wall height of the profile with constant `c`.
fn attained_height(c: f64, rho: f64, r_outer: f64) -> f64 {
    profile(c, r_outer, rho)
}

/// Threshold `M0 = rho log((sqrt(R^2 - rho^2) + R) / rho)`.
pub fn annulus_threshold(rho: f64, r_outer: f64) -> f64 {
    rho * (((r_outer * r_outer - rho * rho).sqrt() + r_outer) / rho).ln()
}

/// Solves the classical annulus problem in closed form.
pub fn classical_annulus(rho: f64, r_outer: f64, m: f64) -> Result<AnnulusSolution> {
    if !(0.0 < rho && rho < r_outer) {
        return Err(Error::Parameter(format!(
            "need 0 < rho < R, got rho = {rho}, R = {r_outer}"
        )));
    }
    if !(m >= 0.0) {
        return Err(Error::Parameter(format!("inner height must be >= 0, got {m}")));
    }
    let m0 = annulus_threshold(rho, r_outer);
    if m > m0 {
        return Ok(AnnulusSolution {
            rho,
            r_outer,
            m,
            c: rho,
            m0,
            sticks: true,
            gap: m - m0,
        });
    }
    // attained_height is nondecreasing in c; bisection on [0, rho]
    let mut lo = 0.0f64;
    let mut hi = rho;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if attained_height(mid, rho, r_outer) < m {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * rho {
            break;
        }
    }
    let c = if m == 0.0 { 0.0 } else { 0.5 * (lo + hi) };
    Ok(AnnulusSolution { rho, r_outer, m, c, m0, sticks: false, gap: 0.0 })
}

/// Discrete minimizer of the radial area functional.
#[derive(Debug, Clone)]
pub struct NumericAnnulus {
    pub nodes: Vec<f64>,
    pub u: Vec<f64>,
    /// Inner-wall mismatch `M - u(rho)` when the wall is free (`M > M0`).
    pub wall_gap: f64,
    pub newton_iterations: usize,
}

/// Minimizes `int r sqrt(1 + u'^2) dr` by damped Newton on a wall-graded
/// mesh, with `u(R) = 0` and either `u(rho) = M` (attainable data) or a free
/// inner wall paying `rho (M - u(rho))` (the vertical-wall area, sticking
/// regime).
pub fn classical_annulus_numeric(
    rho: f64,
    r_outer: f64,
    m: f64,
    mesh: usize,
) -> Result<NumericAnnulus> {
    if !(0.0 < rho && rho < r_outer) {
        return Err(Error::Parameter(format!(
            "need 0 < rho < R, got rho = {rho}, R = {r_outer}"
        )));
    }
    if mesh < 64 {
        return Err(Error::Parameter(format!("mesh must be >= 64, got {mesh}")));
    }
    let m0 = annulus_threshold(rho, r_outer);
    let free_wall = m > m0;

    // cubic grading toward the inner wall resolves the sqrt cusp of the
    // extremal profile
    let nodes: Vec<f64> = (0..=mesh)
        .map(|k| {
            let t = k as f64 / mesh as f64;
            rho + (r_outer - rho) * t * t * t
        })
        .collect();

    // unknowns: u_0..u_{mesh-1} when the wall is free, else u_1..u_{mesh-1}
    let first = if free_wall { 0 } else { 1 };
    let mut u: Vec<f64> = nodes
        .iter()
        .map(|&r| m * (r_outer - r) / (r_outer - rho))
        .collect();
    u[mesh] = 0.0;
    if !free_wall {
        u[0] = m;
    }

    let energy = |u: &[f64]| -> f64 {
        let mut acc = 0.0;
        for k in 0..mesh {
            let dr = nodes[k + 1] - nodes[k];
            let rm = 0.5 * (nodes[k] + nodes[k + 1]);
            let p = (u[k + 1] - u[k]) / dr;
            acc += rm * (1.0 + p * p).sqrt() * dr;
        }
        if free_wall {
            acc += rho * (m - u[0]).abs();
        }
        acc
    };

    let unknowns = mesh - first;
    let mut grad = vec![0.0; unknowns];
    let mut diag = vec![0.0; unknowns];
    let mut off = vec![0.0; unknowns - 1];
    let mut iterations = 0;
    let mut gnorm = f64::INFINITY;

    for _ in 0..200 {
        iterations += 1;
        grad.iter_mut().for_each(|v| *v = 0.0);
        diag.iter_mut().for_each(|v| *v = 0.0);
        off.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..mesh {
            let dr = nodes[k + 1] - nodes[k];
            let rm = 0.5 * (nodes[k] + nodes[k + 1]);
            let p = (u[k + 1] - u[k]) / dr;
            let root = (1.0 + p * p).sqrt();
            let t = rm * p / root;
            let hseg = rm / (root * root * root) / dr;
            // segment energy differentiates to -t at u_k and +t at u_{k+1}
            if k >= first {
                let row = k - first;
                grad[row] -= t;
                diag[row] += hseg;
                if k + 1 < mesh {
                    off[row] = -hseg;
                }
            }
            if k + 1 < mesh {
                grad[k + 1 - first] += t;
                diag[k + 1 - first] += hseg;
            }
        }
        if free_wall {
            // wall term rho (m - u_0): the minimizer keeps u_0 < m
            grad[0] -= rho;
        }
        gnorm = grad.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if gnorm < 1e-11 {
            break;
        }
        // Newton direction from the tridiagonal Hessian (Thomas solve)
        let mut c_prime = vec![0.0; unknowns];
        let mut d_prime = vec![0.0; unknowns];
        c_prime[0] = if unknowns > 1 { off[0] / diag[0] } else { 0.0 };
        d_prime[0] = grad[0] / diag[0];
        for i in 1..unknowns {
            let denom = diag[i] - off[i - 1] * c_prime[i - 1];
            if i < unknowns - 1 {
                c_prime[i] = off[i] / denom;
            }
            d_prime[i] = (grad[i] - off[i - 1] * d_prime[i - 1]) / denom;
        }
        let mut step = vec![0.0; unknowns];
        step[unknowns - 1] = d_prime[unknowns - 1];
        for i in (0..unknowns - 1).rev() {
            step[i] = d_prime[i] - c_prime[i] * step[i + 1];
        }
        // damped update
        let e0 = energy(&u);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            let mut trial = u.clone();
            for i in 0..unknowns {
                trial[first + i] = u[first + i] - lambda * step[i];
            }
            if energy(&trial) <= e0 + 1e-14 * e0.abs() {
                u = trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if gnorm > 1e-9 {
        return Err(Error::Numeric(format!(
            "annulus Newton did not converge: residual {gnorm:.3e} after {iterations} iterations"
        )));
    }
    let wall_gap = if free_wall { m - u[0] } else { 0.0 };
    Ok(NumericAnnulus { nodes, u, wall_gap, newton_iterations: iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ln(2 + sqrt(3)), the threshold for rho = 1, R = 2, frozen.
    const M0_1_2: f64 = 1.3169578969248166;

    #[test]
    fn outer_boundary_condition() {
        for (rho, r_outer, m) in [(1.0, 2.0, 0.5), (0.5, 3.0, 1.0), (2.0, 2.5, 0.1)] {
            let sol = classical_annulus(rho, r_outer, m).unwrap();
            assert!(sol.height(r_outer).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_constant() {
        let sol = classical_annulus(1.0, 2.0, 0.0).unwrap();
        assert_eq!(sol.c, 0.0);
        assert_eq!(sol.height(1.5), 0.0);
        assert!(!sol.sticks);
        assert_eq!(attained_height(0.0, 1.0, 2.0), 0.0);
    }

    #[test]
    fn threshold_fixture() {
        let m0 = annulus_threshold(1.0, 2.0);
        assert!((m0 - M0_1_2).abs() < 1e-12, "M0 = {m0:.16}");
    }

    #[test]
    fn sticking_above_threshold() {
        let sol = classical_annulus(1.0, 2.0, 2.0 * M0_1_2).unwrap();
        assert!(sol.sticks);
        assert!((sol.gap - M0_1_2).abs() < 1e-12);
        assert_eq!(sol.c, 1.0);
        // extremal profile attains M0 at the inner wall
        assert!((sol.height(1.0) - M0_1_2).abs() < 1e-12);
    }

    #[test]
    fn attainable_data_is_attained() {
        let m = 0.6 * M0_1_2;
        let sol = classical_annulus(1.0, 2.0, m).unwrap();
        assert!(!sol.sticks);
        assert!((sol.height(1.0) - m).abs() < 1e-10);
        // profile nonincreasing in r
        let mut prev = f64::INFINITY;
        for k in 0..=100 {
            let r = 1.0 + k as f64 * 0.01;
            let v = sol.height(r);
            assert!(v <= prev + 1e-14);
            prev = v;
        }
    }

    #[test]
    fn invalid_geometry_rejected() {
        assert!(classical_annulus(2.0, 1.0, 0.5).is_err());
        assert!(classical_annulus(0.0, 1.0, 0.5).is_err());
        assert!(classical_annulus_numeric(2.0, 1.0, 0.5, 128).is_err());
        assert!(classical_annulus_numeric(1.0, 2.0, 0.5, 10).is_err());
    }

    #[test]
    fn numeric_zero_data() {
        let sol = classical_annulus_numeric(1.0, 2.0, 0.0, 128).unwrap();
        for &v in &sol.u {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn numeric_matches_closed_form_below_threshold() {
        let m = 0.5 * M0_1_2;
        let closed = classical_annulus(1.0, 2.0, m).unwrap();
        let num = classical_annulus_numeric(1.0, 2.0, m, 512).unwrap();
        let mut sup = 0.0f64;
        for (r, v) in num.nodes.iter().zip(num.u.iter()) {
            sup = sup.max((v - closed.height(*r)).abs());
        }
        assert!(sup <= 1e-3, "sup-difference {sup}");
    }

    #[test]
    fn numeric_sticking_matches_extremal() {
        let m = 2.0 * M0_1_2;
        let closed = classical_annulus(1.0, 2.0, m).unwrap();
        let num = classical_annulus_numeric(1.0, 2.0, m, 512).unwrap();
        let mut sup = 0.0f64;
        for (r, v) in num.nodes.iter().zip(num.u.iter()) {
            sup = sup.max((v - closed.height(*r)).abs());
        }
        assert!(sup <= 1e-3, "interior sup-difference {sup}");
        let exact_gap = m - M0_1_2;
        assert!(
            ((num.wall_gap - exact_gap) / exact_gap).abs() < 0.01,
            "wall gap {} vs {exact_gap}",
            num.wall_gap
        );
    }
}
