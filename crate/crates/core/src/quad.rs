//! Composite Simpson quadrature.
//!
//! Used for kernel normalization checks and density-oracle integrals.
//! Integrands here are smooth (or piecewise constant), so Simpson with a
//! fixed panel count is accurate far beyond the 1e-6 tolerances we assert.

/// Integrate `f` over `[a, b]` with `panels` Simpson panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels >= 1 && b >= a);
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Trapezoid rule over explicit `(x, y)` nodes; `xs` must be increasing.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut acc = 0.0;
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_cubic_is_exact() {
        // Simpson integrates cubics exactly.
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn simpson_gaussian_density_mass() {
        let v = simpson(
            |x| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            -8.0,
            8.0,
            10_000,
        );
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let xs = [0.0, 0.5, 2.0];
        let ys = [1.0, 2.0, 5.0];
        assert!((trapezoid(&xs, &ys) - 6.0).abs() < 1e-14);
    }
}
