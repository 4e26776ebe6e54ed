//! Tabulated kernel profiles for the nonlocal graph-area functional.
//!
//! `G(t)` is the partial integral of `(1 + r^2)^{-(n+1+s)/2}` from 0 to `t`
//! and `GG(t)` its antiderivative with `GG(0) = 0`. `GG` is even and convex,
//! `G` odd, increasing and bounded by `G(inf)`; beyond the table range both
//! switch to asymptotic expansions, with the residual of `G`'s tail carried
//! into the linear growth of `GG`.

use crate::error::{Error, Result};
use crate::kernel::gauss_legendre_32;

#[derive(Debug, Clone)]
pub struct GsTable {
    pub n: usize,
    pub s: f64,
    pub t_max: f64,
    /// `G(inf)`, finite for every admissible `(n, s)`.
    pub g_infinity: f64,
    /// `lim_{t->inf} (G(inf) t - GG(t)) = 1/(n + s - 1)`.
    pub kappa: f64,
    beta: f64,
    dt: f64,
    g_values: Vec<f64>,
    gg_values: Vec<f64>,
}

/// Builds the table. `t_max >= 10`, `knot_count >= 256`.
pub fn build_gs_table(s: f64, n: usize, t_max: f64, knot_count: usize) -> Result<GsTable> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter(format!("s must lie in (0,1), got {s}")));
    }
    if n == 0 || n > 2 {
        return Err(Error::Parameter(format!("dimension must be 1 or 2, got {n}")));
    }
    if t_max < 10.0 {
        return Err(Error::Parameter(format!("t_max must be >= 10, got {t_max}")));
    }
    if knot_count < 256 {
        return Err(Error::Parameter(format!("knot_count must be >= 256, got {knot_count}")));
    }

    let beta = (n as f64 + 1.0 + s) / 2.0;
    let f = |r: f64| (1.0 + r * r).powf(-beta);
    let kappa = 1.0 / (n as f64 + s - 1.0);

    // cumulative panelwise quadrature of the smooth integrand, with a
    // coarser rule as convergence check; Kahan compensation keeps the
    // 8k-term running sum tight
    let dt = t_max / (knot_count - 1) as f64;
    let mut g_values = Vec::with_capacity(knot_count);
    let mut gg_values = Vec::with_capacity(knot_count);
    g_values.push(0.0);
    gg_values.push(0.0);
    let (mut acc, mut comp) = (0.0f64, 0.0f64);
    let mut acc_check = 0.0f64;
    for k in 1..knot_count {
        let a = (k - 1) as f64 * dt;
        let b = k as f64 * dt;
        let piece = gauss_on(a, b, f);
        acc_check += gauss_on_16(a, b, f);
        // Kahan step
        let y = piece - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;

        let tk = b;
        g_values.push(acc);
        // GG(t) = t G(t) - ((1+t^2)^{1-beta} - 1) / (2(1-beta)), exact given G
        let gg = tk * acc - ((1.0 + tk * tk).powf(1.0 - beta) - 1.0) / (2.0 * (1.0 - beta));
        gg_values.push(gg);
    }
    if (acc - acc_check).abs() > 1e-11 * acc.max(1.0) {
        return Err(Error::Numeric(format!(
            "G quadrature did not converge: {acc:.15e} vs {acc_check:.15e} at n={n}, s={s}"
        )));
    }
    let g_infinity = acc + tail1(t_max, beta);
    Ok(GsTable { n, s, t_max, g_infinity, kappa, beta, dt, g_values, gg_values })
}

impl GsTable {
    /// Pointwise kernel under `G`: `(1 + t^2)^{-(n+1+s)/2}`, the exact `G'`.
    #[inline]
    pub fn g_derivative(&self, t: f64) -> f64 {
        (1.0 + t * t).powf(-self.beta)
    }

    /// `G(t)`, odd in `t`.
    pub fn g(&self, t: f64) -> f64 {
        let a = t.abs();
        let v = if a >= self.t_max { self.g_infinity - self.g_tail(a) } else { self.hermite_g(a) };
        if t < 0.0 {
            -v
        } else {
            v
        }
    }

    /// `GG(t)`, even in `t`.
    pub fn gg(&self, t: f64) -> f64 {
        let a = t.abs();
        if a >= self.t_max {
            // linear asymptote plus the integrated tail residual of G
            self.g_infinity * a - self.kappa + self.gg_tail(a)
        } else {
            self.hermite_gg(a)
        }
    }

    /// Derivative of the tabulated `GG`; coincides with `G` up to the
    /// interpolation error.
    pub fn gg_prime(&self, t: f64) -> f64 {
        let a = t.abs();
        let v = if a >= self.t_max {
            self.g_infinity - self.g_tail(a)
        } else {
            self.hermite_gg_derivative(a)
        };
        if t < 0.0 {
            -v
        } else {
            v
        }
    }

    /// Tail integral `int_t^inf (1+r^2)^{-beta} dr` by asymptotic expansion.
    fn g_tail(&self, t: f64) -> f64 {
        tail1(t, self.beta)
    }

    /// `int_t^inf g_tail`, the residual between `GG` and its linear asymptote.
    fn gg_tail(&self, t: f64) -> f64 {
        let b = self.beta;
        let e = 2.0 * b - 1.0;
        t.powf(1.0 - e) / (e * (e - 1.0)) - b * t.powf(-e - 1.0) / ((e + 2.0) * (e + 1.0))
            + 0.5 * b * (b + 1.0) * t.powf(-e - 3.0) / ((e + 4.0) * (e + 3.0))
    }

    #[inline]
    fn knot_piece(&self, a: f64) -> (usize, f64) {
        let x = a / self.dt;
        let i = (x as usize).min(self.g_values.len() - 2);
        (i, a - i as f64 * self.dt)
    }

    /// Cubic Hermite with exact slopes `G' = (1+t^2)^{-beta}`.
    fn hermite_g(&self, a: f64) -> f64 {
        let (i, x) = self.knot_piece(a);
        let t0 = i as f64 * self.dt;
        let (y0, y1) = (self.g_values[i], self.g_values[i + 1]);
        let (d0, d1) = (self.g_derivative(t0), self.g_derivative(t0 + self.dt));
        hermite(x, self.dt, y0, y1, d0, d1)
    }

    /// Cubic Hermite for `GG` with slopes given by the tabulated `G`.
    fn hermite_gg(&self, a: f64) -> f64 {
        let (i, x) = self.knot_piece(a);
        let (y0, y1) = (self.gg_values[i], self.gg_values[i + 1]);
        let (d0, d1) = (self.g_values[i], self.g_values[i + 1]);
        hermite(x, self.dt, y0, y1, d0, d1)
    }

    fn hermite_gg_derivative(&self, a: f64) -> f64 {
        let (i, x) = self.knot_piece(a);
        let (y0, y1) = (self.gg_values[i], self.gg_values[i + 1]);
        let (d0, d1) = (self.g_values[i], self.g_values[i + 1]);
        hermite_derivative(x, self.dt, y0, y1, d0, d1)
    }

    /// Second differences of `GG` at the knots; all must be nonnegative up
    /// to rounding (convexity).
    pub fn gg_second_differences(&self) -> Vec<f64> {
        self.gg_values
            .windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .collect()
    }

    pub fn knot_count(&self) -> usize {
        self.g_values.len()
    }
}

/// Asymptotic tail `int_t^inf (1+r^2)^{-beta} dr`, three terms.
fn tail1(t: f64, beta: f64) -> f64 {
    let e = 2.0 * beta - 1.0;
    t.powf(-e) / e - beta * t.powf(-e - 2.0) / (e + 2.0)
        + 0.5 * beta * (beta + 1.0) * t.powf(-e - 4.0) / (e + 4.0)
}

#[inline]
fn hermite(x: f64, dx: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let t = x / dx;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * dx * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * dx * d1
}

#[inline]
fn hermite_derivative(x: f64, dx: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let t = x / dx;
    let t2 = t * t;
    ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * dx * d0
        + (-6.0 * t2 + 6.0 * t) * y1
        + (3.0 * t2 - 2.0 * t) * dx * d1)
        / dx
}

fn gauss_on(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (nodes, wts) = gauss_legendre_32();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (t, w) in nodes.iter().zip(wts.iter()) {
        acc += w * f(mid + half * t);
    }
    acc * half
}

fn gauss_on_16(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (nodes, wts) = crate::kernel::gauss_legendre_16();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (t, w) in nodes.iter().zip(wts.iter()) {
        acc += w * f(mid + half * t);
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_values() {
        for (n, s) in [(1, 0.3), (1, 0.7), (2, 0.5)] {
            let t = build_gs_table(s, n, 50.0, 1024).unwrap();
            assert_eq!(t.g(0.0), 0.0);
            assert_eq!(t.gg(0.0), 0.0);
        }
    }

    #[test]
    fn g_infinity_n1_half() {
        // independent oracle: adaptive Simpson of (1+r^2)^{-1.25} on [0, inf)
        // computed once and frozen
        let frozen = 1.1981402347355923;
        let t = build_gs_table(0.5, 1, 50.0, 1024).unwrap();
        assert!(
            (t.g_infinity - frozen).abs() < 1e-12,
            "G(inf) = {:.16}",
            t.g_infinity
        );
    }

    #[test]
    fn gg_prime_matches_g_at_random_points() {
        let t = build_gs_table(0.42, 1, 50.0, 8192).unwrap();
        // deterministic pseudo-random points in [0, t_max]
        let mut x = 0.123456789f64;
        for _ in 0..100 {
            x = (x * 9301.0 + 49297.0) % 233280.0 / 233280.0;
            let arg = x * 50.0;
            let diff = (t.gg_prime(arg) - t.g(arg)).abs();
            assert!(diff < 1e-8, "gg'({arg}) - g({arg}) = {diff:e}");
        }
    }

    #[test]
    fn odd_even_extension() {
        let t = build_gs_table(0.6, 1, 50.0, 1024).unwrap();
        for arg in [0.1, 1.0, 7.3, 80.0] {
            assert_eq!(t.g(-arg), -t.g(arg));
            assert_eq!(t.gg(-arg), t.gg(arg));
        }
    }

    #[test]
    fn g_monotone_and_bounded() {
        let t = build_gs_table(0.25, 2, 50.0, 2048).unwrap();
        let mut prev = 0.0;
        for k in 1..400 {
            let arg = k as f64 * 0.3;
            let v = t.g(arg);
            assert!(v > prev, "G not increasing at {arg}");
            assert!(v <= t.g_infinity + 1e-14);
            prev = v;
        }
    }

    #[test]
    fn gg_convex_at_knots() {
        for (n, s) in [(1, 0.1), (1, 0.9), (2, 0.5)] {
            let t = build_gs_table(s, n, 50.0, 1024).unwrap();
            for (k, d2) in t.gg_second_differences().iter().enumerate() {
                assert!(*d2 >= -1e-12, "GG second difference {d2:e} at knot {k}");
            }
        }
    }

    #[test]
    fn asymptotic_seam_is_tight() {
        let t = build_gs_table(0.35, 1, 50.0, 8192).unwrap();
        // first-order Taylor step across the seam: the interpolated branch
        // just below t_max must continue into the asymptotic branch
        let d = 1e-6;
        let below = t.gg(50.0 - d);
        let at = t.gg(50.0);
        let step = (at - below) / d;
        assert!((step - t.g(50.0)).abs() < 1e-5, "GG slope through seam {step} vs {}", t.g(50.0));
        assert!((below + t.g(50.0) * d - at).abs() < 1e-10);
        let gb = t.g(50.0 - d);
        let ga = t.g(50.0);
        assert!((gb - ga).abs() < 1e-6, "G seam jump {:e}", gb - ga);
    }

    #[test]
    fn kappa_matches_linear_asymptote() {
        let t = build_gs_table(0.5, 1, 50.0, 2048).unwrap();
        assert!((t.kappa - 2.0).abs() < 1e-15);
        // G_inf * t - GG(t) climbs toward kappa as t grows
        let r1 = t.g_infinity * 1.0e3 - t.gg(1.0e3);
        let r2 = t.g_infinity * 1.0e5 - t.gg(1.0e5);
        let r3 = t.g_infinity * 1.0e7 - t.gg(1.0e7);
        assert!(r1 < r2 && r2 < r3 && r3 < t.kappa + 1e-9, "{r1} {r2} {r3}");
        assert!((r3 - t.kappa).abs() < 1e-3, "residual at 1e7: {r3}");
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(build_gs_table(0.5, 1, 5.0, 1024).is_err());
        assert!(build_gs_table(0.5, 1, 50.0, 100).is_err());
        assert!(build_gs_table(1.5, 1, 50.0, 1024).is_err());
        assert!(build_gs_table(0.5, 3, 50.0, 1024).is_err());
    }
}
