//! Extrapolation of parameter-indexed sequences to their limits.

/// Neville polynomial extrapolation of `(x_i, y_i)` to `x = 0`.
///
/// With three geometrically spaced nodes this is the usual two-stage
/// Richardson step.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut tab = ys.to_vec();
    let n = tab.len();
    for level in 1..n {
        for i in 0..n - level {
            let (x0, x1) = (xs[i], xs[i + level]);
            tab[i] = (x1 * tab[i] - x0 * tab[i + 1]) / (x1 - x0);
        }
    }
    tab[0]
}

/// Least-squares line `y = a + b x`; returns `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    let slope = num / den;
    (my - slope * mx, slope)
}

/// Intercept of the line through the two smallest-`x` points.
pub fn two_point_intercept(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() >= 2);
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let (i, j) = (idx[0], idx[1]);
    let slope = (ys[j] - ys[i]) / (xs[j] - xs[i]);
    ys[i] - slope * xs[i]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neville_recovers_polynomial_limits() {
        // f(x) = 3 - 2x + x^2 sampled at a geometric sequence
        let xs = [0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + x * x).collect();
        let lim = neville_at_zero(&xs, &ys);
        assert!((lim - 3.0).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_exact_on_lines() {
        let xs = [0.1, 0.2, 0.4];
        let ys: Vec<f64> = xs.iter().map(|x| 5.0 + 7.0 * x).collect();
        let (a, b) = linear_fit(&xs, &ys);
        assert!((a - 5.0).abs() < 1e-12 && (b - 7.0).abs() < 1e-12);
    }

    #[test]
    fn two_point_uses_smallest_nodes() {
        let xs = [0.4, 0.1, 0.2];
        let ys = [100.0, 1.1, 1.2]; // line 1 + x through the two smallest
        let a = two_point_intercept(&xs, &ys);
        assert!((a - 1.0).abs() < 1e-12);
    }
}
