//! Monte Carlo experiment engine.
//!
//! An experiment fixes a process, an estimator, a bandwidth rule, and an
//! error metric, then measures the metric over a geometric grid of sample
//! sizes and fits a log-log slope. The theoretical rates are O(.) statements
//! with unknown constants, so verdicts are always slope-based, never
//! absolute.
//!
//! Replicates are the unit of parallelism. Every replicate draws from its
//! own derived RNG stream and results are reduced in replicate order, so
//! aggregated values are bit-identical for any worker count.

use std::path::PathBuf;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{estimate_at, KernelFamily};
use crate::processes::{Density, ProcessSpec};
use crate::quad::trapezoid;
use crate::rates::{optimal_bandwidth, rate_exponent, RateParams};

use super::slope::fit_loglog_slope;

/// How the bandwidth index is chosen per sample size.
#[derive(Clone, Debug, PartialEq)]
pub enum BandwidthRule {
    /// The optimal schedule of a rate statement.
    Theorem(RateParams),
    Fixed(u32),
    /// `m = max(1, round(c * n^exponent))`.
    PowerLaw {
        c: f64,
        exponent: f64,
    },
}

impl std::fmt::Display for BandwidthRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BandwidthRule::Theorem(p) => write!(f, "theorem({})", p.theorem),
            BandwidthRule::Fixed(m) => write!(f, "fixed({m})"),
            BandwidthRule::PowerLaw { c, exponent } => write!(f, "power(c={c},exp={exponent})"),
        }
    }
}

/// Evaluation grid `points` equally spaced on `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(hi > lo) || points < 2 {
            return Err(Error::domain(format!("bad grid {lo}:{hi}:{points}")));
        }
        Ok(GridSpec { lo, hi, points })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.lo + i as f64 * step).collect()
    }
}

/// Error metric measured per sample size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    /// `(E |f_hat(x) - f(x)|^q)^(1/q)`.
    PointwiseLq { x: f64, q: f64 },
    /// Integrated squared error averaged over replicates; the integration
    /// weight defaults to the indicator of the grid interval (see
    /// [`run_experiment_weighted`] for other weights).
    Mise { grid: GridSpec },
    /// Mean over replicates of the max absolute error over the grid, a
    /// finite proxy for the continuum supremum; the grid resolution is
    /// recorded in the metric id.
    SupNorm { grid: GridSpec },
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::PointwiseLq { x, q } => write!(f, "pointwise_lq(x={x},q={q})"),
            Metric::Mise { grid } => write!(f, "mise({}:{}:{})", grid.lo, grid.hi, grid.points),
            Metric::SupNorm { grid } => write!(f, "sup({}:{}:{})", grid.lo, grid.hi, grid.points),
        }
    }
}

/// Default pilot-oracle sample count.
pub const PILOT_SAMPLES_DEFAULT: usize = 10_000_000;
/// Fejer order of the pilot density estimate.
pub const PILOT_M: u32 = 64;
/// RNG block reserved for the pilot simulation.
const PILOT_BLOCK: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    pub estimator: KernelFamily,
    pub bandwidth: BandwidthRule,
    /// Strictly increasing sample sizes.
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub metric: Metric,
    pub seed: u64,
    /// Worker threads; 0 means the global default.
    pub workers: usize,
    /// Target |slope|; defaults to the theorem exponent for theorem rules.
    pub expected_exponent: Option<f64>,
    pub slope_tol: f64,
    pub pilot_samples: usize,
    pub pilot_cache: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::domain("n_grid must be nonempty"));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("n_grid must be strictly increasing"));
        }
        if self.replicates < 1 {
            return Err(Error::domain("replicates must be >= 1"));
        }
        if !(self.slope_tol > 0.0) {
            return Err(Error::domain("slope_tol must be > 0"));
        }
        if let Metric::PointwiseLq { q, .. } = self.metric {
            if !(q >= 1.0) {
                return Err(Error::domain(format!("metric order q = {q} must be >= 1")));
            }
        }
        Ok(())
    }
}

/// One measured row of an experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub m: u32,
    pub value: f64,
    pub stderr: f64,
}

/// Which density oracle error metrics were computed against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// Closed-form marginal declared by the process.
    Exact,
    /// Fejer pilot estimate from a large auxiliary simulation.
    Pilot,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub fitted_slope: f64,
    pub slope_ci: (f64, f64),
    /// Positive rate exponent the slope is compared against, when known.
    pub theoretical_exponent: Option<f64>,
    /// `|fitted_slope + theoretical_exponent| <= slope_tol`, when a target
    /// exponent is known.
    pub verdict: Option<bool>,
    pub oracle: OracleKind,
    pub warnings: Vec<String>,
    /// Identification copied into every CSV row.
    pub process_id: String,
    pub estimator_id: String,
    pub metric_id: String,
    pub replicates: usize,
    pub seed: u64,
}

impl ExperimentResult {
    pub fn summary(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "process:   {}", self.process_id);
        let _ = writeln!(s, "estimator: {}   metric: {}", self.estimator_id, self.metric_id);
        let _ = writeln!(s, "replicates: {}   seed: {}", self.replicates, self.seed);
        for row in &self.rows {
            let _ = writeln!(
                s,
                "  n={:<8} m={:<6} value={:<12.6e} stderr={:.3e}",
                row.n, row.m, row.value, row.stderr
            );
        }
        let _ = writeln!(
            s,
            "fitted slope: {:.4}   95% CI [{:.4}, {:.4}]",
            self.fitted_slope, self.slope_ci.0, self.slope_ci.1
        );
        match (self.theoretical_exponent, self.verdict) {
            (Some(e), Some(ok)) => {
                let _ = writeln!(s, "theoretical slope: {:.4}", -e);
                let _ = writeln!(
                    s,
                    "verdict: {} (|fitted - theoretical| = {:.4})",
                    if ok { "PASS" } else { "FAIL" },
                    (self.fitted_slope + e).abs()
                );
            }
            _ => {
                let _ = writeln!(s, "verdict: n/a (no target exponent)");
            }
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

/// Truncated Fourier series fitted by the pilot simulation; evaluates the
/// Fejer estimate of the pilot sample at any point in O(m).
#[derive(Clone, Debug)]
pub struct FejerSeries {
    pub m: u32,
    /// `cos_coef[k-1] = mean cos(k X)`, `sin_coef[k-1] = mean sin(k X)`.
    pub cos_coef: Vec<f64>,
    pub sin_coef: Vec<f64>,
}

impl FejerSeries {
    pub fn fit(values: &[f64], m: u32) -> Self {
        let order = (m as usize).saturating_sub(1);
        let (mut c, mut s) = (vec![0.0f64; order], vec![0.0f64; order]);
        // Chebyshev-style recurrence: cos/sin of kx from (k-1)x and x.
        for &x in values {
            let (s1, c1) = x.sin_cos();
            let (mut sk, mut ck) = (s1, c1);
            for k in 0..order {
                c[k] += ck;
                s[k] += sk;
                let next_c = ck * c1 - sk * s1;
                let next_s = sk * c1 + ck * s1;
                ck = next_c;
                sk = next_s;
            }
        }
        let n = values.len() as f64;
        for v in c.iter_mut().chain(s.iter_mut()) {
            *v /= n;
        }
        FejerSeries { m, cos_coef: c, sin_coef: s }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 1.0 / (2.0 * std::f64::consts::PI);
        let mf = self.m as f64;
        for (i, (c, s)) in self.cos_coef.iter().zip(&self.sin_coef).enumerate() {
            let k = (i + 1) as f64;
            let damp = 1.0 - k / mf;
            acc += damp * (c * (k * x).cos() + s * (k * x).sin()) / std::f64::consts::PI;
        }
        acc
    }
}

enum DensityOracle {
    Exact(Density),
    Pilot(FejerSeries),
}

impl DensityOracle {
    fn eval(&self, x: f64) -> f64 {
        match self {
            DensityOracle::Exact(d) => d.eval(x),
            DensityOracle::Pilot(s) => s.eval(x),
        }
    }
}

fn pilot_cache_path(config: &ExperimentConfig) -> PathBuf {
    let dir = config.pilot_cache.clone().unwrap_or_else(|| PathBuf::from(".pilot-cache"));
    // Cheap stable fingerprint of the pilot inputs; the file re-states them
    // in full and is verified on load, so collisions only cost a recompute.
    let key = format!("{}|{}|{}|{PILOT_M}", config.process, config.pilot_samples, config.seed);
    let mut h: u64 = 0xcbf29ce484222325;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    dir.join(format!("pilot-{h:016x}.txt"))
}

fn load_pilot(path: &std::path::Path, key: &str) -> Option<FejerSeries> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != "weakdens-pilot v1" || lines.next()? != key {
        return None;
    }
    let m: u32 = lines.next()?.parse().ok()?;
    let mut cos_coef = Vec::new();
    let mut sin_coef = Vec::new();
    for line in lines {
        let mut it = line.split_whitespace();
        cos_coef.push(it.next()?.parse().ok()?);
        sin_coef.push(it.next()?.parse().ok()?);
    }
    (cos_coef.len() == m as usize - 1).then_some(FejerSeries { m, cos_coef, sin_coef })
}

fn store_pilot(path: &std::path::Path, key: &str, series: &FejerSeries) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = String::from("weakdens-pilot v1\n");
    out.push_str(key);
    out.push('\n');
    out.push_str(&series.m.to_string());
    out.push('\n');
    for (c, s) in series.cos_coef.iter().zip(&series.sin_coef) {
        out.push_str(&format!("{c} {s}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn resolve_oracle(config: &ExperimentConfig) -> Result<(DensityOracle, Vec<String>)> {
    if let Some(d) = config.process.true_density() {
        return Ok((DensityOracle::Exact(d), Vec::new()));
    }
    if config.pilot_samples == 0 {
        return Err(Error::MissingDensity);
    }
    let mut warnings = vec![format!(
        "no closed-form marginal: substituting a Fejer pilot oracle \
         ({} samples, m = {PILOT_M}); rows are flagged oracle=pilot",
        config.pilot_samples
    )];
    let key = format!("{}|{}|{}|{PILOT_M}", config.process, config.pilot_samples, config.seed);
    let cache = pilot_cache_path(config);
    if let Some(series) = load_pilot(&cache, &key) {
        return Ok((DensityOracle::Pilot(series), warnings));
    }
    let path = config.process.simulate_stream(config.pilot_samples, config.seed, PILOT_BLOCK, 0)?;
    let series = FejerSeries::fit(&path.values, PILOT_M);
    if let Err(e) = store_pilot(&cache, &key, &series) {
        warnings.push(format!("pilot cache write failed ({e}); continuing uncached"));
    }
    Ok((DensityOracle::Pilot(series), warnings))
}

fn bandwidth_for(rule: &BandwidthRule, n: usize) -> Result<u32> {
    match rule {
        BandwidthRule::Theorem(params) => optimal_bandwidth(params, n),
        BandwidthRule::Fixed(m) => {
            if *m < 1 {
                return Err(Error::domain("fixed bandwidth index must be >= 1"));
            }
            Ok(*m)
        }
        BandwidthRule::PowerLaw { c, exponent } => {
            let raw = c * (n as f64).powf(*exponent);
            Ok((raw.round() as i64).max(1) as u32)
        }
    }
}

fn sample_sd(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Run the experiment described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let (oracle, mut warnings) = resolve_oracle(config)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::domain(format!("thread pool: {e}")))?;

    let grid_xs: Vec<f64> = match config.metric {
        Metric::PointwiseLq { .. } => Vec::new(),
        Metric::Mise { grid } | Metric::SupNorm { grid } => grid.values(),
    };

    let mut rows = Vec::with_capacity(config.n_grid.len());
    for (block, &n) in config.n_grid.iter().enumerate() {
        let m = bandwidth_for(&config.bandwidth, n)?;
        if m < 2 {
            warnings.push(format!(
                "degenerate bandwidth m = {m} at n = {n}: slope regression will be distorted"
            ));
        }
        // Per-replicate metric values, in replicate order regardless of the
        // worker count.
        let per_rep: Vec<f64> = pool.install(|| {
            (0..config.replicates as u32)
                .into_par_iter()
                .map(|rep| -> Result<f64> {
                    let path = config.process.simulate_stream(n, config.seed, block as u32, rep)?;
                    Ok(match config.metric {
                        Metric::PointwiseLq { x, q } => {
                            let est = estimate_at(&path, &config.estimator, m, x);
                            (est.value - oracle.eval(x)).abs().powf(q)
                        }
                        Metric::Mise { .. } => {
                            let sq: Vec<f64> = grid_xs
                                .iter()
                                .map(|&x| {
                                    let est = estimate_at(&path, &config.estimator, m, x);
                                    (est.value - oracle.eval(x)).powi(2)
                                })
                                .collect();
                            trapezoid(&grid_xs, &sq)
                        }
                        Metric::SupNorm { .. } => grid_xs
                            .iter()
                            .map(|&x| {
                                let est = estimate_at(&path, &config.estimator, m, x);
                                (est.value - oracle.eval(x)).abs()
                            })
                            .fold(0.0, f64::max),
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })?;

        let mean = per_rep.iter().sum::<f64>() / per_rep.len() as f64;
        let se_mean = sample_sd(&per_rep, mean) / (per_rep.len() as f64).sqrt();
        let (value, stderr) = match config.metric {
            Metric::PointwiseLq { q, .. } => {
                let value = mean.powf(1.0 / q);
                // Delta method through m -> m^(1/q).
                let stderr = if value > 0.0 { se_mean * value.powf(1.0 - q) / q } else { se_mean };
                (value, stderr)
            }
            _ => (mean, se_mean),
        };
        rows.push(ExperimentRow { n, m, value, stderr });
    }

    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.value)).collect();
    let fit = fit_loglog_slope(&points)?;

    let theoretical_exponent = match (&config.expected_exponent, &config.bandwidth) {
        (Some(e), _) => Some(*e),
        (None, BandwidthRule::Theorem(params)) => {
            let e = rate_exponent(params)?.exponent;
            // Rates are stated per unit norm; the mise metric is a squared
            // error, so its slope target doubles.
            Some(if matches!(config.metric, Metric::Mise { .. }) { 2.0 * e } else { e })
        }
        _ => None,
    };
    let verdict = theoretical_exponent.map(|e| (fit.slope + e).abs() <= config.slope_tol);

    let pilot = matches!(oracle, DensityOracle::Pilot(_));
    let process_id = if pilot {
        format!("{}[oracle=pilot]", config.process)
    } else {
        config.process.to_string()
    };

    Ok(ExperimentResult {
        rows,
        fitted_slope: fit.slope,
        slope_ci: fit.ci,
        theoretical_exponent,
        verdict,
        oracle: if pilot { OracleKind::Pilot } else { OracleKind::Exact },
        warnings,
        process_id,
        estimator_id: config.estimator.kind.to_string(),
        metric_id: config.metric.to_string(),
        replicates: config.replicates,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{DoublingX0, InnovationSpec};

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            process: ProcessSpec::iid(InnovationSpec::Uniform { lo: 0.0, hi: 1.0 }).unwrap(),
            estimator: KernelFamily::compact(2).unwrap(),
            bandwidth: BandwidthRule::PowerLaw { c: 1.0, exponent: 0.2 },
            n_grid: vec![64, 128, 256, 512],
            replicates: 60,
            metric: Metric::PointwiseLq { x: 0.5, q: 2.0 },
            seed: 7,
            workers: 2,
            expected_exponent: None,
            slope_tol: 0.1,
            pilot_samples: PILOT_SAMPLES_DEFAULT,
            pilot_cache: None,
        }
    }

    #[test]
    fn iid_error_decreases_along_the_grid() {
        let result = run_experiment(&small_config()).unwrap();
        assert_eq!(result.rows.len(), 4);
        assert_eq!(result.oracle, OracleKind::Exact);
        // Monotone decrease, allowing one inversion from Monte Carlo noise.
        let inversions = result.rows.windows(2).filter(|w| w[1].value > w[0].value).count();
        assert!(inversions <= 1, "rows: {:?}", result.rows);
        assert!(result.fitted_slope < 0.0);
    }

    #[test]
    fn worker_count_does_not_change_values() {
        let mut a = small_config();
        a.workers = 1;
        let mut b = small_config();
        b.workers = 8;
        let ra = run_experiment(&a).unwrap();
        let rb = run_experiment(&b).unwrap();
        for (x, y) in ra.rows.iter().zip(&rb.rows) {
            assert_eq!(x.value.to_bits(), y.value.to_bits());
            assert_eq!(x.stderr.to_bits(), y.stderr.to_bits());
        }
    }

    #[test]
    fn single_n_fails_at_slope_fitting() {
        let mut config = small_config();
        config.n_grid = vec![256];
        let err = run_experiment(&config).unwrap_err();
        assert!(matches!(err, Error::SlopeFit(_)));
    }

    #[test]
    fn pilot_oracle_kicks_in_and_is_flagged() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = small_config();
        config.process = ProcessSpec::bilinear(
            1.0,
            0.0,
            vec![0.5],
            vec![],
            InnovationSpec::Gaussian { mean: 0.0, sd: 0.9 },
            2.0,
            200,
        )
        .unwrap();
        config.metric = Metric::PointwiseLq { x: 0.0, q: 2.0 };
        config.pilot_samples = 100_000;
        config.pilot_cache = Some(dir.path().to_path_buf());
        config.replicates = 20;
        let result = run_experiment(&config).unwrap();
        assert_eq!(result.oracle, OracleKind::Pilot);
        assert!(result.process_id.ends_with("[oracle=pilot]"));
        assert!(result.rows.iter().all(|r| r.value.is_finite()));
        // Second run hits the cache and reproduces bit-exactly.
        let again = run_experiment(&config).unwrap();
        for (x, y) in result.rows.iter().zip(&again.rows) {
            assert_eq!(x.value.to_bits(), y.value.to_bits());
        }
        assert_eq!(
            std::fs::read_dir(dir.path()).unwrap().count(),
            1,
            "pilot cache file written once"
        );
    }

    #[test]
    fn theorem_rule_supplies_the_target_exponent() {
        use crate::dependence::{Coefficient, Decay, DependenceBound};
        use crate::rates::Theorem;
        let mut config = small_config();
        config.bandwidth = BandwidthRule::Theorem(RateParams {
            rho: 2.0,
            d: 1,
            decay: DependenceBound::new(
                Coefficient::PhiTilde,
                Decay::Geometric { a: std::f64::consts::LN_2, b: 1.0 },
                1.0,
            )
            .unwrap(),
            q: 2.0,
            theorem: Theorem::T1,
        });
        config.process = ProcessSpec::doubling(DoublingX0::Random).unwrap();
        let result = run_experiment(&config).unwrap();
        assert_eq!(result.theoretical_exponent, Some(0.4));
        assert!(result.verdict.is_some());
    }

    #[test]
    fn fejer_series_matches_direct_estimate() {
        let path =
            ProcessSpec::iid(InnovationSpec::RaisedCosine).unwrap().simulate(20_000, 3).unwrap();
        let series = FejerSeries::fit(&path.values, 16);
        for x in [-2.0, -0.3, 0.0, 1.1] {
            let direct = crate::estimators::fejer_estimate(&path, 16, x).value;
            assert!(
                (series.eval(x) - direct).abs() < 1e-10,
                "x = {x}: {} vs {direct}",
                series.eval(x)
            );
        }
    }
}
