//! Closed-form convergence-rate exponents, optimal bandwidth schedules, and
//! admissibility checks for the dependence-decay hypotheses.
//!
//! Rates are reported per unit norm: an `exponent` e and `log_power` g mean
//! the error decays like `n^-e * (log n)^g`. Bandwidth schedules are
//! materialized as the pair `(delta, gamma)` with `m*_n = n^delta log^gamma n`,
//! rounded to an integer index and clamped at 1. Log factors are clamped
//! below at 1 so that a sub-unit `log^gamma n` cannot inflate the bandwidth
//! at tiny n, which keeps every schedule nondecreasing.

use crate::dependence::{Coefficient, Decay, DependenceBound};
use crate::error::{Error, Result};

/// Which rate statement a parameter set targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Pointwise L^q rate (the i.i.d.-optimal exponent).
    T1,
    /// Uniform rates under geometric decay (logarithmic loss).
    T2,
    /// Uniform L^q rate under Riemannian decay (polynomial loss).
    T3Mean,
    /// Almost-sure uniform rate under Riemannian decay.
    T3AlmostSure,
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Theorem::T1 => write!(f, "t1"),
            Theorem::T2 => write!(f, "t2"),
            Theorem::T3Mean => write!(f, "t3mean"),
            Theorem::T3AlmostSure => write!(f, "t3as"),
        }
    }
}

/// Inputs of a rate computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateParams {
    /// Regularity of the marginal density.
    pub rho: f64,
    /// Observation dimension.
    pub d: u32,
    pub decay: DependenceBound,
    /// Moment order of the target norm.
    pub q: f64,
    pub theorem: Theorem,
}

/// A rate statement in computable form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateResult {
    /// Error decays like n^-exponent (up to logs); in (0, 1).
    pub exponent: f64,
    /// Power of log n multiplying the rate.
    pub log_power: f64,
    /// Bandwidth schedule m*_n = n^delta log^gamma n.
    pub delta: f64,
    pub gamma: f64,
}

impl RateResult {
    /// Integer bandwidth index at sample size n: `max(1, round(n^delta *
    /// max(1, ln n)^gamma))`.
    pub fn bandwidth(&self, n: usize) -> u32 {
        let nf = n as f64;
        let log = nf.ln().max(1.0);
        let raw = nf.powf(self.delta) * log.powf(self.gamma);
        (raw.round() as i64).max(1) as u32
    }
}

/// Largest even moment order served by Riemannian decay r^-a:
/// `q0 = 2 ceil((a-1)/2)`, the even integer with a-1 <= q0 < a+1.
pub fn q0_of(a: f64) -> Result<u32> {
    if !(a > 1.0) {
        return Err(Error::domain(format!("q0 needs a > 1, got a = {a}")));
    }
    Ok(2 * ((a - 1.0) / 2.0).ceil() as u32)
}

fn riemannian_a(decay: &DependenceBound) -> Option<f64> {
    match decay.decay {
        Decay::Riemannian { a } => Some(a),
        Decay::Geometric { .. } => None,
    }
}

/// Threshold on `a` for the pointwise theorem under Riemannian decay.
fn pointwise_threshold(coefficient: Coefficient, rho: f64, d: f64) -> f64 {
    match coefficient {
        Coefficient::Eta => (1.0 + 2.0 / d + (d + 1.0) / rho).max(2.0 + 1.0 / d),
        Coefficient::PhiTilde => 1.0 + 2.0 / d + 1.0 / rho,
    }
}

/// Threshold on `a` from the moment-inequality lemma, given the bandwidth
/// exponent delta of the chosen schedule and the moment order q.
fn moment_lemma_threshold(coefficient: Coefficient, q: f64, delta: f64, d: f64) -> f64 {
    // Denominator q - 2 + delta (4 - q) is positive for q >= 2, 0 < delta < 1.
    let denom = q - 2.0 + delta * (4.0 - q);
    match coefficient {
        Coefficient::Eta => {
            let mid = (q - 1.0) * delta * (4.0 + 2.0 / d) / denom;
            (q - 1.0).max(mid).max(2.0 + 1.0 / d)
        }
        Coefficient::PhiTilde => {
            let mid = (q - 1.0) * delta * (2.0 + 2.0 / d) / denom;
            (q - 1.0).max(mid).max(1.0 + 1.0 / d)
        }
    }
}

fn validate_common(p: &RateParams) -> Result<()> {
    if !(p.rho > 0.0) {
        return Err(Error::hypothesis(format!("regularity rho = {} must be > 0", p.rho)));
    }
    if p.d < 1 {
        return Err(Error::hypothesis("dimension d must be >= 1"));
    }
    if !(p.q > 0.0) {
        return Err(Error::hypothesis(format!("moment order q = {} must be > 0", p.q)));
    }
    Ok(())
}

/// Rate exponent, log power, and bandwidth schedule for the chosen theorem.
pub fn rate_exponent(params: &RateParams) -> Result<RateResult> {
    validate_common(params)?;
    let rho = params.rho;
    let d = params.d as f64;
    match params.theorem {
        Theorem::T1 => {
            if let Some(a) = riemannian_a(&params.decay) {
                let threshold = pointwise_threshold(params.decay.coefficient, rho, d);
                if a <= threshold {
                    return Err(Error::hypothesis(format!(
                        "pointwise rate under riemannian decay needs a > {threshold}, got a = {a}"
                    )));
                }
                let q0 = q0_of(a)?;
                if params.q > q0 as f64 {
                    return Err(Error::hypothesis(format!(
                        "riemannian decay a = {a} serves moments up to q0 = {q0}, requested q = {}",
                        params.q
                    )));
                }
            }
            let e = rho / (2.0 * rho + d);
            Ok(RateResult { exponent: e, log_power: 0.0, delta: d / (2.0 * rho + d), gamma: 0.0 })
        }
        Theorem::T2 => {
            let Decay::Geometric { b, .. } = params.decay.decay else {
                return Err(Error::hypothesis(
                    "uniform geometric-decay rate requires a geometric bound",
                ));
            };
            let e = rho / (2.0 * rho + d);
            let loss = 2.0 * (b + 1.0) / b;
            let delta = d / (2.0 * rho + d);
            Ok(RateResult { exponent: e, log_power: loss * e, delta, gamma: -loss * delta })
        }
        Theorem::T3Mean | Theorem::T3AlmostSure => {
            let Some(a) = riemannian_a(&params.decay) else {
                return Err(Error::hypothesis(
                    "uniform riemannian-decay rates require a riemannian bound",
                ));
            };
            if a < 4.0 {
                return Err(Error::hypothesis(format!("uniform rates need a >= 4, got a = {a}")));
            }
            if rho <= 2.0 * d {
                return Err(Error::hypothesis(format!(
                    "uniform rates need rho > 2d, got rho = {rho}, d = {d}"
                )));
            }
            let q0 = q0_of(a)? as f64;
            if params.q > q0 {
                return Err(Error::hypothesis(format!(
                    "riemannian decay a = {a} serves moments up to q0 = {q0}, requested q = {}",
                    params.q
                )));
            }
            if params.theorem == Theorem::T3Mean {
                let denom = d + 2.0 * rho + 2.0 * d / (q0 + d);
                Ok(RateResult {
                    exponent: rho / denom,
                    log_power: 0.0,
                    delta: d / denom,
                    gamma: 0.0,
                })
            } else {
                let denom = d * (q0 + 2.0) + rho * (q0 + d);
                Ok(RateResult {
                    exponent: (q0 - 2.0) * rho / denom,
                    log_power: (q0 + d) * rho / denom,
                    delta: (q0 - 2.0) * d / denom,
                    gamma: -(q0 + d) * d / denom,
                })
            }
        }
    }
}

/// Optimal integer bandwidth for sample size n under the chosen theorem.
pub fn optimal_bandwidth(params: &RateParams, n: usize) -> Result<u32> {
    if n < 2 {
        return Err(Error::domain(format!("bandwidth schedule needs n >= 2, got {n}")));
    }
    Ok(rate_exponent(params)?.bandwidth(n))
}

/// One line of an admissibility report.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisCheck {
    pub name: String,
    /// Constraint is `value > threshold` (or `>=` where stated in `name`).
    pub threshold: f64,
    pub value: f64,
    pub satisfied: bool,
}

/// Every hypothesis relevant to the parameter set, with numeric thresholds.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub checks: Vec<HypothesisCheck>,
    pub satisfied: bool,
}

impl std::fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {:<55} value {:.4} vs threshold {:.4}",
                if c.satisfied { "ok" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            )?;
        }
        write!(f, "overall: {}", if self.satisfied { "admissible" } else { "not admissible" })
    }
}

/// List each hypothesis with its numeric threshold and the supplied value.
///
/// This is a reporting operation: it never errors, it enumerates what holds
/// and what fails for the given parameters.
pub fn check_admissibility(params: &RateParams) -> AdmissibilityReport {
    let mut checks = Vec::new();
    let d = params.d as f64;
    let rho = params.rho;
    let coeff = params.decay.coefficient;

    checks.push(HypothesisCheck {
        name: "regularity rho > 0".into(),
        threshold: 0.0,
        value: rho,
        satisfied: rho > 0.0,
    });

    match params.decay.decay {
        Decay::Geometric { a, b } => {
            // No constraint on the rate beyond positivity: vacuous pass.
            checks.push(HypothesisCheck {
                name: "geometric decay rate a > 0".into(),
                threshold: 0.0,
                value: a,
                satisfied: a > 0.0,
            });
            checks.push(HypothesisCheck {
                name: "geometric decay shape b > 0".into(),
                threshold: 0.0,
                value: b,
                satisfied: b > 0.0,
            });
        }
        Decay::Riemannian { a } => {
            checks.push(HypothesisCheck {
                name: "riemannian decay a > 1".into(),
                threshold: 1.0,
                value: a,
                satisfied: a > 1.0,
            });
            match params.theorem {
                Theorem::T1 => {
                    let threshold = pointwise_threshold(coeff, rho, d);
                    checks.push(HypothesisCheck {
                        name: format!("pointwise rate ({coeff}): a > threshold"),
                        threshold,
                        value: a,
                        satisfied: a > threshold,
                    });
                }
                Theorem::T2 => {
                    checks.push(HypothesisCheck {
                        name: "uniform geometric rate requires geometric decay".into(),
                        threshold: f64::INFINITY,
                        value: a,
                        satisfied: false,
                    });
                }
                Theorem::T3Mean | Theorem::T3AlmostSure => {
                    checks.push(HypothesisCheck {
                        name: "uniform riemannian rate: a >= 4".into(),
                        threshold: 4.0,
                        value: a,
                        satisfied: a >= 4.0,
                    });
                    checks.push(HypothesisCheck {
                        name: "uniform riemannian rate: rho > 2d".into(),
                        threshold: 2.0 * d,
                        value: rho,
                        satisfied: rho > 2.0 * d,
                    });
                }
            }
            if a > 1.0 {
                let q0 = q0_of(a).expect("a > 1 checked") as f64;
                checks.push(HypothesisCheck {
                    name: format!("moment order q <= q0 = {q0}"),
                    threshold: q0,
                    value: params.q,
                    satisfied: params.q <= q0,
                });
                // Moment-inequality condition at this theorem's bandwidth
                // exponent, evaluated at the requested q (rounded up to the
                // next even integer as the inequality is applied).
                if let Ok(rr) = rate_exponent(&RateParams { q: 2.0, ..*params }) {
                    let q_even = 2.0 * (params.q / 2.0).ceil();
                    let threshold = moment_lemma_threshold(coeff, q_even, rr.delta, d);
                    checks.push(HypothesisCheck {
                        name: format!(
                            "moment inequality at q = {q_even}, delta = {:.4}: a > threshold",
                            rr.delta
                        ),
                        threshold,
                        value: a,
                        satisfied: a > threshold,
                    });
                }
            }
        }
    }

    let satisfied = checks.iter().all(|c| c.satisfied);
    AdmissibilityReport { checks, satisfied }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::{Coefficient, Decay, DependenceBound};
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn geometric(a: f64, b: f64) -> DependenceBound {
        DependenceBound::new(Coefficient::Eta, Decay::Geometric { a, b }, 1.0).unwrap()
    }

    fn riemannian(coeff: Coefficient, a: f64) -> DependenceBound {
        DependenceBound::new(coeff, Decay::Riemannian { a }, 1.0).unwrap()
    }

    fn params(theorem: Theorem, rho: f64, d: u32, decay: DependenceBound, q: f64) -> RateParams {
        RateParams { rho, d, decay, q, theorem }
    }

    #[test]
    fn q0_examples() {
        assert_eq!(q0_of(5.0).unwrap(), 4);
        assert_eq!(q0_of(4.0).unwrap(), 4);
        assert_eq!(q0_of(2.5).unwrap(), 2);
        assert!(q0_of(1.0).is_err());
        assert!(q0_of(0.5).is_err());
    }

    #[test]
    fn q0_bracket_property() {
        let mut rng = crate::rng::path_rng(99);
        for _ in 0..10_000 {
            let a = 1.0 + 99.0 * rng.random::<f64>();
            let q0 = q0_of(a).unwrap();
            assert!(q0 >= 2 && q0 % 2 == 0);
            assert!(a - 1.0 <= q0 as f64 && (q0 as f64) < a + 1.0, "a = {a}, q0 = {q0}");
        }
    }

    #[test]
    fn pointwise_exponent_examples() {
        let r = rate_exponent(&params(Theorem::T1, 2.0, 1, geometric(1.0, 1.0), 2.0)).unwrap();
        assert_abs_diff_eq!(r.exponent, 0.4, epsilon = 1e-9);
        assert_eq!(r.log_power, 0.0);

        let r = rate_exponent(&params(Theorem::T2, 2.0, 1, geometric(1.0, 1.0), 2.0)).unwrap();
        assert_abs_diff_eq!(r.exponent, 0.4, epsilon = 1e-9);
        assert_abs_diff_eq!(r.log_power, 1.6, epsilon = 1e-9);

        let r =
            rate_exponent(&params(Theorem::T3Mean, 3.0, 1, riemannian(Coefficient::Eta, 4.0), 2.0))
                .unwrap();
        assert_abs_diff_eq!(r.exponent, 0.4054054054054054, epsilon = 1e-9);
    }

    #[test]
    fn almost_sure_exponents() {
        // q0 = 4 at a = 4: denominator d(q0+2) + rho(q0+d).
        let r = rate_exponent(&params(
            Theorem::T3AlmostSure,
            3.0,
            1,
            riemannian(Coefficient::Eta, 4.0),
            2.0,
        ))
        .unwrap();
        let denom = 1.0 * 6.0 + 3.0 * 5.0;
        assert_abs_diff_eq!(r.exponent, 2.0 * 3.0 / denom, epsilon = 1e-12);
        assert_abs_diff_eq!(r.log_power, 5.0 * 3.0 / denom, epsilon = 1e-12);
    }

    #[test]
    fn bandwidth_examples() {
        let t1 = params(Theorem::T1, 2.0, 1, geometric(1.0, 1.0), 2.0);
        assert_eq!(optimal_bandwidth(&t1, 1024).unwrap(), 4);
        assert_eq!(optimal_bandwidth(&t1, 2).unwrap(), 1);
        assert!(optimal_bandwidth(&t1, 1).is_err());

        let t2 = params(Theorem::T2, 2.0, 1, geometric(1.0, 1.0), 2.0);
        assert_eq!(optimal_bandwidth(&t2, 1024).unwrap(), 1);
    }

    #[test]
    fn bandwidths_are_nondecreasing_over_dyadic_n() {
        let cases = [
            params(Theorem::T1, 2.0, 1, geometric(1.0, 1.0), 2.0),
            params(Theorem::T2, 2.0, 1, geometric(1.0, 1.0), 2.0),
            params(Theorem::T3Mean, 3.0, 1, riemannian(Coefficient::Eta, 5.0), 2.0),
            params(Theorem::T3AlmostSure, 3.0, 1, riemannian(Coefficient::Eta, 5.0), 2.0),
        ];
        for p in cases {
            let rr = rate_exponent(&p).unwrap();
            let mut prev = 0;
            for k in 1..=30u32 {
                let m = rr.bandwidth(1usize << k);
                assert!(m >= prev, "{:?} at n = 2^{k}: m = {m} < {prev}", p.theorem);
                prev = m;
            }
        }
    }

    #[test]
    fn riemannian_uniform_rate_is_strictly_worse_and_converges() {
        // The uniform riemannian exponent is below rho/(2 rho + d) and
        // approaches it monotonically as q0 grows.
        let rho = 3.0;
        let pointwise = rho / (2.0 * rho + 1.0);
        let mut prev = 0.0;
        for a in [4.0, 40.0, 400.0] {
            let p = params(Theorem::T3Mean, rho, 1, riemannian(Coefficient::Eta, a), 2.0);
            let e = rate_exponent(&p).unwrap().exponent;
            let t1 =
                rate_exponent(&params(Theorem::T1, rho, 1, riemannian(Coefficient::Eta, a), 2.0))
                    .unwrap()
                    .exponent;
            assert!(e < t1, "a = {a}");
            assert!(e > prev, "a = {a}");
            prev = e;
        }
        assert!(pointwise - prev < 0.002, "limit gap {}", pointwise - prev);
    }

    #[test]
    fn t2_log_loss_shrinks_with_b() {
        let rho = 2.0;
        let e = rho / (2.0 * rho + 1.0);
        let p = params(Theorem::T2, rho, 1, geometric(1.0, 1e6), 2.0);
        let r = rate_exponent(&p).unwrap();
        assert!(r.log_power < 2.0 * e + 1e-5, "log_power = {}", r.log_power);
    }

    #[test]
    fn admissibility_examples() {
        // eta, riemannian a = 5, rho = 2, d = 1:
        // threshold max(1 + 2/d + (d+1)/rho, 2 + 1/d) = max(4, 3) = 4.
        let p = params(Theorem::T1, 2.0, 1, riemannian(Coefficient::Eta, 5.0), 2.0);
        let report = check_admissibility(&p);
        let c = report.checks.iter().find(|c| c.name.starts_with("pointwise rate")).unwrap();
        assert_abs_diff_eq!(c.threshold, 4.0, epsilon = 1e-12);
        assert!(c.satisfied);
        assert!(report.satisfied);

        // phi-tilde, riemannian a = 3: threshold 1 + 2 + 0.5 = 3.5 -> fail.
        let p = params(Theorem::T1, 2.0, 1, riemannian(Coefficient::PhiTilde, 3.0), 2.0);
        let report = check_admissibility(&p);
        let c = report.checks.iter().find(|c| c.name.starts_with("pointwise rate")).unwrap();
        assert_abs_diff_eq!(c.threshold, 3.5, epsilon = 1e-12);
        assert!(!c.satisfied);
        assert!(!report.satisfied);

        // Geometric decay: vacuous pass.
        let p = params(Theorem::T1, 2.0, 1, geometric(0.7, 1.0), 2.0);
        assert!(check_admissibility(&p).satisfied);
    }

    #[test]
    fn hypothesis_violations_error() {
        // T2 with riemannian decay.
        let p = params(Theorem::T2, 2.0, 1, riemannian(Coefficient::Eta, 5.0), 2.0);
        assert!(rate_exponent(&p).is_err());
        // T3 with a < 4.
        let p = params(Theorem::T3Mean, 3.0, 1, riemannian(Coefficient::Eta, 3.0), 2.0);
        assert!(rate_exponent(&p).is_err());
        // T3 with rho <= 2d.
        let p = params(Theorem::T3Mean, 1.5, 1, riemannian(Coefficient::Eta, 5.0), 2.0);
        assert!(rate_exponent(&p).is_err());
        // q beyond q0.
        let p = params(Theorem::T1, 2.0, 1, riemannian(Coefficient::Eta, 5.0), 6.0);
        assert!(rate_exponent(&p).is_err());
    }
}
