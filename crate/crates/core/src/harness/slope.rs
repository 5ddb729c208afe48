//! Log-log slope fitting and error metrics.

use crate::error::{Error, Result};

/// OLS fit of `ln value` on `ln n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% interval for the slope (t-quantile approximated by 1.96).
    pub ci: (f64, f64),
}

/// Least-squares slope of `ln value` against `ln n`.
///
/// Needs at least four points so the residual variance is meaningful; all
/// values must be strictly positive.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 4 {
        return Err(Error::SlopeFit(format!(
            "need at least 4 points for a slope fit, got {}",
            points.len()
        )));
    }
    for &(n, v) in points {
        if !(n > 0.0) || !(v > 0.0) {
            return Err(Error::SlopeFit(format!("nonpositive point ({n}, {v})")));
        }
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / k;
    let y_mean = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::SlopeFit("all sample sizes coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - (intercept + slope * x)).powi(2)).sum();
    let se = (rss / (k - 2.0) / sxx).sqrt();
    Ok(SlopeFit { slope, intercept, ci: (slope - 1.96 * se, slope + 1.96 * se) })
}

/// `(mean |e|^q)^(1/q)` over a replicate error sample.
pub fn metric_pointwise_lq(errors: &[f64], q: f64) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::domain("empty error sample"));
    }
    if !(q >= 1.0) {
        return Err(Error::domain(format!("norm order q = {q} must be >= 1")));
    }
    let mean = errors.iter().map(|e| e.abs().powf(q)).sum::<f64>() / errors.len() as f64;
    Ok(mean.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law_recovered_with_zero_width_ci() {
        let points: Vec<(f64, f64)> = (1..=8)
            .map(|k| {
                let n = (1usize << k) as f64;
                (n, 3.0 * n.powf(-0.5))
            })
            .collect();
        let fit = fit_loglog_slope(&points).unwrap();
        assert_abs_diff_eq!(fit.slope, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 3.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(fit.ci.0, fit.ci.1, epsilon = 1e-9);
    }

    #[test]
    fn constant_values_have_zero_slope() {
        let points: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64 * 10.0, 2.5)).collect();
        let fit = fit_loglog_slope(&points).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn small_or_degenerate_inputs_error() {
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]).is_err());
        let with_zero = [(1.0, 1.0), (2.0, 0.5), (4.0, 0.0), (8.0, 0.1)];
        assert!(fit_loglog_slope(&with_zero).is_err());
    }

    #[test]
    fn noisy_power_law_slope_is_close() {
        // 1% alternating multiplicative noise barely moves the slope.
        let points: Vec<(f64, f64)> = (0..8)
            .map(|k| {
                let n = (512usize << k) as f64;
                let noise = if k % 2 == 0 { 1.01 } else { 0.99 };
                (n, n.powf(-0.4) * noise)
            })
            .collect();
        let fit = fit_loglog_slope(&points).unwrap();
        assert!((fit.slope + 0.4).abs() < 0.02, "slope = {}", fit.slope);
    }

    proptest! {
        #[test]
        fn planted_exponents_recovered(exp in 0.1f64..0.9) {
            let points: Vec<(f64, f64)> = (0..8)
                .map(|k| {
                    let n = (256usize << k) as f64;
                    (n, 1.7 * n.powf(-exp))
                })
                .collect();
            let fit = fit_loglog_slope(&points).unwrap();
            prop_assert!((fit.slope + exp).abs() < 1e-9);
        }
    }

    #[test]
    fn pointwise_lq_examples() {
        assert_abs_diff_eq!(
            metric_pointwise_lq(&[0.1, 0.3], 2.0).unwrap(),
            0.05f64.sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(metric_pointwise_lq(&[0.7, 0.7, 0.7], 3.0).unwrap(), 0.7);
        assert_abs_diff_eq!(metric_pointwise_lq(&[1.0, 2.0, 3.0], 1.0).unwrap(), 2.0);
        assert!(metric_pointwise_lq(&[], 2.0).is_err());
    }
}
