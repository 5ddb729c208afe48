//! Generators for weakly dependent time series.
//!
//! Each process carries what is analytically known about it: the closed-form
//! marginal density (when one exists), its regularity, and a declared decay
//! bound for its dependence coefficients. Generators are pure functions of
//! `(spec, seed)`: the same pair reproduces a path bit-exactly.
//!
//! The doubling Markov chain `X_k = (X_{k-1} + e_k)/2` stands in for the
//! expanding map `F(x) = 2x mod 1` (its time reversal): iterating the map
//! itself in floating point exhausts mantissa bits after ~53 steps and
//! collapses every orbit to 0, while the chain is numerically stable and has
//! the same invariant law U[0,1].

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dependence::{Coefficient, Decay, DependenceBound};
use crate::error::{Error, Result};
use crate::quad::simpson;
use crate::rng::path_rng;

/// Marginal or innovation law.
///
/// `Fixed` sequences are consumed in order and error when exhausted; they
/// exist so unit tests can drive the recursions with hand-picked values.
#[derive(Clone, Debug, PartialEq)]
pub enum InnovationSpec {
    /// Values in {0, 1}, P(1) = p.
    Bernoulli(f64),
    Gaussian {
        mean: f64,
        sd: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Density (1 + cos t) / (2 pi) on [-pi, pi].
    RaisedCosine,
    Fixed(Vec<f64>),
}

impl InnovationSpec {
    fn validate(&self) -> Result<()> {
        match self {
            InnovationSpec::Bernoulli(p) if !(0.0..=1.0).contains(p) => {
                Err(Error::domain(format!("Bernoulli p = {p} outside [0, 1]")))
            }
            InnovationSpec::Gaussian { sd, .. } if *sd < 0.0 => {
                Err(Error::domain(format!("Gaussian sd = {sd} negative")))
            }
            InnovationSpec::Uniform { lo, hi } if lo >= hi => {
                Err(Error::domain(format!("Uniform bounds [{lo}, {hi}] empty")))
            }
            _ => Ok(()),
        }
    }

    /// E|xi|^p, by closed form where trivial and quadrature otherwise.
    pub fn abs_moment(&self, p: f64) -> Result<f64> {
        if p < 1.0 {
            return Err(Error::domain(format!("moment order p = {p} below 1")));
        }
        self.validate()?;
        match *self {
            InnovationSpec::Bernoulli(prob) => Ok(prob),
            InnovationSpec::Gaussian { mean, sd } => {
                if sd == 0.0 {
                    return Ok(mean.abs().powf(p));
                }
                let lo = mean - 12.0 * sd;
                let hi = mean + 12.0 * sd;
                let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
                Ok(simpson(
                    |x| {
                        let z = (x - mean) / sd;
                        x.abs().powf(p) * norm * (-0.5 * z * z).exp()
                    },
                    lo,
                    hi,
                    20_000,
                ))
            }
            InnovationSpec::Uniform { lo, hi } => {
                Ok(simpson(|x| x.abs().powf(p), lo, hi, 20_000) / (hi - lo))
            }
            InnovationSpec::RaisedCosine => {
                let pi = std::f64::consts::PI;
                Ok(simpson(|x| x.abs().powf(p) * (1.0 + x.cos()) / (2.0 * pi), -pi, pi, 20_000))
            }
            InnovationSpec::Fixed(_) => {
                Err(Error::domain("Fixed sequences have no distributional moments"))
            }
        }
    }

    /// L^p norm (E|xi|^p)^{1/p}.
    pub fn norm(&self, p: f64) -> Result<f64> {
        Ok(self.abs_moment(p)?.powf(1.0 / p))
    }

    /// Closed-form Lebesgue density of this law, when it has one.
    pub fn density(&self) -> Option<Density> {
        match *self {
            InnovationSpec::Gaussian { mean, sd } if sd > 0.0 => {
                Some(Density::Gaussian { mean, sd })
            }
            InnovationSpec::Uniform { lo, hi } => Some(Density::Uniform { lo, hi }),
            InnovationSpec::RaisedCosine => Some(Density::RaisedCosine),
            _ => None,
        }
    }
}

impl fmt::Display for InnovationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InnovationSpec::Bernoulli(p) => write!(f, "bernoulli({p})"),
            InnovationSpec::Gaussian { mean, sd } => write!(f, "gaussian({mean},{sd})"),
            InnovationSpec::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            InnovationSpec::RaisedCosine => write!(f, "raised-cosine"),
            InnovationSpec::Fixed(v) => write!(f, "fixed[{} values]", v.len()),
        }
    }
}

/// Draws innovations from a spec, tracking `Fixed` consumption.
struct InnovationSource<'a> {
    spec: &'a InnovationSpec,
    rng: ChaCha8Rng,
    consumed: usize,
}

impl<'a> InnovationSource<'a> {
    fn new(spec: &'a InnovationSpec, rng: ChaCha8Rng) -> Self {
        Self { spec, rng, consumed: 0 }
    }

    fn next(&mut self) -> Result<f64> {
        let v = match self.spec {
            InnovationSpec::Bernoulli(p) => {
                if self.rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            InnovationSpec::Gaussian { mean, sd } => {
                // Box-Muller on two uniforms; one draw per call keeps the
                // stream layout independent of how callers batch requests.
                let u1: f64 = self.rng.random::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = self.rng.random();
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                mean + sd * z
            }
            InnovationSpec::Uniform { lo, hi } => lo + (hi - lo) * self.rng.random::<f64>(),
            InnovationSpec::RaisedCosine => loop {
                let pi = std::f64::consts::PI;
                let t = -pi + 2.0 * pi * self.rng.random::<f64>();
                let u: f64 = self.rng.random();
                if u <= 0.5 * (1.0 + t.cos()) {
                    break t;
                }
            },
            InnovationSpec::Fixed(seq) => {
                let Some(&v) = seq.get(self.consumed) else {
                    return Err(Error::InnovationsExhausted { consumed: self.consumed });
                };
                v
            }
        };
        self.consumed += 1;
        Ok(v)
    }
}

/// Closed-form marginal density attached to a process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Density {
    Gaussian { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    RaisedCosine,
}

impl Density {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Density::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
            }
            Density::Uniform { lo, hi } => {
                // Closed interval so endpoint quadrature nodes see the mass.
                if x >= lo && x <= hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Density::RaisedCosine => {
                let pi = std::f64::consts::PI;
                if x.abs() <= pi {
                    (1.0 + x.cos()) / (2.0 * pi)
                } else {
                    0.0
                }
            }
        }
    }

    /// Interval carrying all (or for the Gaussian, essentially all) mass.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Density::Gaussian { mean, sd } => (mean - 12.0 * sd, mean + 12.0 * sd),
            Density::Uniform { lo, hi } => (lo, hi),
            Density::RaisedCosine => (-std::f64::consts::PI, std::f64::consts::PI),
        }
    }
}

/// Starting point of the doubling chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DoublingX0 {
    /// Drawn U[0,1] from the seed; the chain is then strictly stationary.
    Random,
    Fixed(f64),
}

/// Subsampling scheme `i -> h(i)` (1-based indices into the base path).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stride {
    /// h(i) = step * i.
    Arithmetic(usize),
    /// h(i) = base^i. Accelerates dependence decay: Riemannian coefficients
    /// of the base series become geometric along this observation scheme.
    Geometric(usize),
}

impl Stride {
    fn validate(&self) -> Result<()> {
        match *self {
            Stride::Arithmetic(0) => Err(Error::domain("arithmetic stride step must be >= 1")),
            Stride::Geometric(base) if base < 2 => {
                Err(Error::domain("geometric stride base must be >= 2"))
            }
            _ => Ok(()),
        }
    }

    /// h(i) for 1-based i; None on overflow.
    fn index(&self, i: usize) -> Option<usize> {
        match *self {
            Stride::Arithmetic(step) => step.checked_mul(i),
            Stride::Geometric(base) => {
                let mut v: usize = 1;
                for _ in 0..i {
                    v = v.checked_mul(base)?;
                }
                Some(v)
            }
        }
    }
}

impl fmt::Display for Stride {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Stride::Arithmetic(s) => write!(f, "arithmetic({s})"),
            Stride::Geometric(b) => write!(f, "geometric({b})"),
        }
    }
}

/// A generative model plus its declared analytic metadata.
///
/// `dependence` and the assumption flags are declarations, not computed
/// facts: they record what is known analytically about the model (joint
/// densities bounded for linear processes with smooth innovations, the
/// doubling chain being the time reversal of an expanding map) and are not
/// verified numerically.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    /// Declared decay of the dependence coefficients, when known.
    pub dependence: Option<DependenceBound>,
    /// Declared regularity of the marginal density, when known.
    pub regularity: Option<f64>,
    /// Declared: joint pair densities exist and are uniformly bounded.
    pub joint_density_bounded: bool,
    /// Declared: the series is the time reversal of an expanding map.
    pub reversed_expanding_map: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProcessKind {
    Doubling {
        x0: DoublingX0,
        innovations: InnovationSpec,
    },
    /// Two-sided moving average over a finite coefficient window
    /// `offset -> weight`. The truncation radius is the caller's choice and
    /// is visible in the map itself, never hidden.
    Linear {
        coeffs: BTreeMap<i64, f64>,
        innovations: InnovationSpec,
    },
    Bilinear {
        a: f64,
        b: f64,
        ar: Vec<f64>,
        ma: Vec<f64>,
        innovations: InnovationSpec,
        /// Moment order used in the stationarity check.
        norm_order: f64,
        burn_in: usize,
    },
    Sampled {
        base: Box<ProcessSpec>,
        stride: Stride,
    },
    IidBaseline {
        law: InnovationSpec,
    },
}

/// Default bilinear burn-in: geometric forgetting at rate lambda < 1 leaves
/// initialization bias below lambda^1000.
pub const BILINEAR_DEFAULT_BURN_IN: usize = 1000;

impl ProcessSpec {
    /// Doubling chain with Bernoulli(1/2) innovations.
    pub fn doubling(x0: DoublingX0) -> Result<Self> {
        Self::doubling_with(x0, InnovationSpec::Bernoulli(0.5))
    }

    pub fn doubling_with(x0: DoublingX0, innovations: InnovationSpec) -> Result<Self> {
        check_doubling_args(x0, &innovations)?;
        let stationary =
            matches!(x0, DoublingX0::Random) && innovations == InnovationSpec::Bernoulli(0.5);
        Ok(ProcessSpec {
            kind: ProcessKind::Doubling { x0, innovations },
            // Contraction: each step halves the Lipschitz diameter of the
            // conditional law, so phi(r) <= 2^-r, i.e. C = 1, a = ln 2.
            dependence: Some(DependenceBound::new(
                Coefficient::PhiTilde,
                Decay::Geometric { a: std::f64::consts::LN_2, b: 1.0 },
                1.0,
            )?),
            regularity: if stationary { Some(1.0) } else { None },
            joint_density_bounded: false,
            reversed_expanding_map: true,
        })
    }

    pub fn linear(coeffs: BTreeMap<i64, f64>, innovations: InnovationSpec) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("linear process needs at least one coefficient"));
        }
        innovations.validate()?;
        let gaussian = matches!(innovations, InnovationSpec::Gaussian { .. });
        Ok(ProcessSpec {
            kind: ProcessKind::Linear { coeffs, innovations },
            dependence: None,
            regularity: if gaussian { Some(2.0) } else { None },
            // Holds whenever |E e^{iu xi}| <= C (1+|u|)^-delta; true for the
            // continuous innovation laws shipped here.
            joint_density_bounded: gaussian,
            reversed_expanding_map: false,
        })
    }

    /// The stock heavy-tail-coefficient example: a_0 = 1 and a_i = |i|^-5
    /// for 1 <= |i| <= 50, standard Gaussian innovations. Marginal is
    /// exactly N(0, sum a_i^2).
    pub fn linear_gaussian_preset() -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0i64, 1.0);
        for i in 1..=50i64 {
            let w = (i as f64).powi(-5);
            coeffs.insert(i, w);
            coeffs.insert(-i, w);
        }
        let mut spec =
            Self::linear(coeffs, InnovationSpec::Gaussian { mean: 0.0, sd: 1.0 }).unwrap();
        // eta_r = O(r^{1-A}) for coefficient tails |i|^-A, here A = 5.
        let decay = Decay::Riemannian { a: 4.0 };
        let constant = {
            let ProcessKind::Linear { coeffs, .. } = &spec.kind else { unreachable!() };
            // Smallest C with eta_r <= C r^-4 over the finite window.
            (1..=200u32)
                .map(|r| crate::dependence::eta_bound_linear(coeffs, 1.0, r) * (r as f64).powi(4))
                .fold(0.0f64, f64::max)
        };
        spec.dependence =
            Some(DependenceBound::new(Coefficient::Eta, decay, constant.max(1e-300)).unwrap());
        spec
    }

    pub fn bilinear(
        a: f64,
        b: f64,
        ar: Vec<f64>,
        ma: Vec<f64>,
        innovations: InnovationSpec,
        norm_order: f64,
        burn_in: usize,
    ) -> Result<Self> {
        let lambda = bilinear_lambda(&ar, &ma, &innovations, norm_order)?;
        if lambda >= 1.0 {
            return Err(Error::Stationarity { lambda });
        }
        // Geometric forgetting at rate lambda.
        let rate = (-lambda.ln()).max(1e-12);
        Ok(ProcessSpec {
            kind: ProcessKind::Bilinear { a, b, ar, ma, innovations, norm_order, burn_in },
            dependence: Some(DependenceBound::new(
                Coefficient::Eta,
                Decay::Geometric { a: rate, b: 1.0 },
                1.0,
            )?),
            regularity: None,
            joint_density_bounded: true,
            reversed_expanding_map: false,
        })
    }

    pub fn iid(law: InnovationSpec) -> Result<Self> {
        law.validate()?;
        Ok(ProcessSpec {
            kind: ProcessKind::IidBaseline { law },
            dependence: None,
            regularity: None,
            joint_density_bounded: true,
            reversed_expanding_map: false,
        })
    }

    pub fn sampled(base: ProcessSpec, stride: Stride) -> Result<Self> {
        stride.validate()?;
        let dependence = base.dependence;
        let regularity = base.regularity;
        let joint = base.joint_density_bounded;
        Ok(ProcessSpec {
            kind: ProcessKind::Sampled { base: Box::new(base), stride },
            dependence,
            regularity,
            joint_density_bounded: joint,
            reversed_expanding_map: false,
        })
    }

    /// Closed-form marginal density, when the model has one.
    pub fn true_density(&self) -> Option<Density> {
        match &self.kind {
            ProcessKind::Doubling { x0, innovations } => {
                // U[0,1] is the invariant law; it is the marginal only when
                // the chain is started stationary.
                if *x0 == DoublingX0::Random && *innovations == InnovationSpec::Bernoulli(0.5) {
                    Some(Density::Uniform { lo: 0.0, hi: 1.0 })
                } else {
                    None
                }
            }
            ProcessKind::Linear { coeffs, innovations } => match innovations {
                // A linear form of i.i.d. Gaussians is exactly Gaussian.
                InnovationSpec::Gaussian { mean, sd } => {
                    let sum: f64 = coeffs.values().sum();
                    let sq: f64 = coeffs.values().map(|a| a * a).sum();
                    let s = sd * sq.sqrt();
                    (s > 0.0).then_some(Density::Gaussian { mean: mean * sum, sd: s })
                }
                _ => None,
            },
            ProcessKind::Bilinear { .. } => None,
            ProcessKind::Sampled { base, .. } => base.true_density(),
            ProcessKind::IidBaseline { law } => law.density(),
        }
    }

    /// Simulate a length-`n` path. Pure in `(self, seed)`.
    pub fn simulate(&self, n: usize, seed: u64) -> Result<Path> {
        self.simulate_stream(n, seed, 0, 0)
    }

    /// Simulate on the derived stream `(seed, block, replicate)`; this is
    /// what Monte Carlo drivers call so replicates stay independent and
    /// order-insensitive.
    pub fn simulate_stream(&self, n: usize, seed: u64, block: u32, replicate: u32) -> Result<Path> {
        let rng = crate::rng::replicate_rng(seed, block, replicate);
        let mut path = match &self.kind {
            ProcessKind::Doubling { x0, innovations } => {
                doubling_core(n, *x0, innovations, rng, seed)?
            }
            ProcessKind::Linear { coeffs, innovations } => {
                linear_core(n, coeffs, innovations, rng, seed)?
            }
            ProcessKind::Bilinear { a, b, ar, ma, innovations, norm_order, burn_in } => {
                bilinear_core(n, *a, *b, ar, ma, innovations, *norm_order, *burn_in, rng, seed)?
            }
            ProcessKind::Sampled { base, stride } => {
                let base_len = stride.index(n).filter(|&v| v <= 100_000_000).ok_or_else(|| {
                    Error::domain(format!("sampled base length h({n}) overflows the 1e8 cap"))
                })?;
                let base_path = base.simulate_stream(base_len, seed, block, replicate)?;
                sample_process(&base_path, *stride)?
            }
            ProcessKind::IidBaseline { law } => iid_core(n, law, rng, seed)?,
        };
        path.spec_id = self.to_string();
        Ok(path)
    }
}

/// Canonical short descriptor; feeds CSV rows and report headers.
impl fmt::Display for ProcessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ProcessKind::Doubling { x0, innovations } => {
                match x0 {
                    DoublingX0::Random => write!(f, "doubling(x0=random")?,
                    DoublingX0::Fixed(v) => write!(f, "doubling(x0={v}")?,
                }
                if *innovations != InnovationSpec::Bernoulli(0.5) {
                    write!(f, "; innov={innovations}")?;
                }
                write!(f, ")")
            }
            ProcessKind::Linear { coeffs, innovations } => {
                write!(f, "linear(coeffs=")?;
                if coeffs.len() <= 8 {
                    let parts: Vec<String> =
                        coeffs.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                    write!(f, "[{}]", parts.join(","))?;
                } else {
                    write!(f, "[{} terms]", coeffs.len())?;
                }
                write!(f, "; innov={innovations})")
            }
            ProcessKind::Bilinear { a, b, ar, ma, innovations, norm_order, burn_in } => {
                let fmt_vec =
                    |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                write!(
                    f,
                    "bilinear(a={a}; b={b}; ar=[{}]; ma=[{}]; innov={innovations}; \
                     p={norm_order}; burn={burn_in})",
                    fmt_vec(ar),
                    fmt_vec(ma)
                )
            }
            ProcessKind::Sampled { base, stride } => write!(f, "sampled({base}; {stride})"),
            ProcessKind::IidBaseline { law } => write!(f, "iid({law})"),
        }
    }
}

/// A simulated observation sequence, reproducible from `(spec_id, seed)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub values: Vec<f64>,
    pub seed: u64,
    pub spec_id: String,
}

impl Path {
    pub fn new(values: Vec<f64>, seed: u64, spec_id: impl Into<String>) -> Self {
        assert!(!values.is_empty(), "paths are nonempty by construction");
        Path { values, seed, spec_id: spec_id.into() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_doubling_args(x0: DoublingX0, innovations: &InnovationSpec) -> Result<()> {
    if let DoublingX0::Fixed(v) = x0 {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("doubling x0 = {v} outside [0, 1]")));
        }
    }
    match innovations {
        InnovationSpec::Bernoulli(_) => Ok(()),
        InnovationSpec::Fixed(seq) => {
            if let Some(bad) = seq.iter().find(|v| **v != 0.0 && **v != 1.0) {
                Err(Error::domain(format!("doubling innovation {bad} not in {{0, 1}}")))
            } else {
                Ok(())
            }
        }
        other => Err(Error::domain(format!(
            "doubling innovations must be Bernoulli or Fixed 0/1, got {other}"
        ))),
    }
}

/// Doubling Markov chain: `X_k = (X_{k-1} + e_k) / 2`, values in [0, 1].
pub fn simulate_doubling(
    n: usize,
    x0: DoublingX0,
    innovations: &InnovationSpec,
    seed: u64,
) -> Result<Path> {
    doubling_core(n, x0, innovations, path_rng(seed), seed)
}

fn doubling_core(
    n: usize,
    x0: DoublingX0,
    innovations: &InnovationSpec,
    mut rng: ChaCha8Rng,
    seed: u64,
) -> Result<Path> {
    if n == 0 {
        return Err(Error::domain("path length must be >= 1"));
    }
    check_doubling_args(x0, innovations)?;
    let mut x = match x0 {
        DoublingX0::Random => rng.random::<f64>(),
        DoublingX0::Fixed(v) => v,
    };
    let mut source = InnovationSource::new(innovations, rng);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        x = 0.5 * (x + source.next()?);
        debug_assert!((0.0..=1.0).contains(&x));
        values.push(x);
    }
    Ok(Path::new(values, seed, "doubling"))
}

/// Two-sided moving average `X_t = sum_j a_j xi_{t-j}` over a finite window.
///
/// Innovations are generated over the index range extended by the coefficient
/// support, so the first and last outputs see a full window (burn-in is
/// implicit in the extension, not discarded output).
pub fn simulate_linear(
    n: usize,
    coeffs: &BTreeMap<i64, f64>,
    innovations: &InnovationSpec,
    seed: u64,
) -> Result<Path> {
    linear_core(n, coeffs, innovations, path_rng(seed), seed)
}

fn linear_core(
    n: usize,
    coeffs: &BTreeMap<i64, f64>,
    innovations: &InnovationSpec,
    rng: ChaCha8Rng,
    seed: u64,
) -> Result<Path> {
    if n == 0 {
        return Err(Error::domain("path length must be >= 1"));
    }
    if coeffs.is_empty() {
        return Err(Error::domain("linear process needs at least one coefficient"));
    }
    innovations.validate()?;
    let j_min = *coeffs.keys().next().unwrap();
    let j_max = *coeffs.keys().next_back().unwrap();
    // xi indices t - j for t in 1..=n, j in [j_min, j_max].
    let lo = 1 - j_max;
    let hi = n as i64 - j_min;
    let mut source = InnovationSource::new(innovations, rng);
    let mut xi = Vec::with_capacity((hi - lo + 1) as usize);
    for _ in lo..=hi {
        xi.push(source.next()?);
    }
    let values = (1..=n as i64)
        .map(|t| coeffs.iter().map(|(&j, &a)| a * xi[(t - j - lo) as usize]).sum())
        .collect();
    Ok(Path::new(values, seed, "linear"))
}

/// Contraction coefficient `lambda = |xi|_p * sum|a_j| + sum|b_j|`.
///
/// Magnitudes are summed so that sign cancellations cannot fake a
/// contraction; for the nonnegative coefficients of ARCH-type models this is
/// the usual lambda.
pub fn bilinear_lambda(
    ar: &[f64],
    ma: &[f64],
    innovations: &InnovationSpec,
    norm_order: f64,
) -> Result<f64> {
    let xi_norm = innovations.norm(norm_order)?;
    let sa: f64 = ar.iter().map(|a| a.abs()).sum();
    let sb: f64 = ma.iter().map(|b| b.abs()).sum();
    Ok(xi_norm * sa + sb)
}

/// Bilinear recursion `X_t = xi_t (a + sum a_j X_{t-j}) + b + sum b_j X_{t-j}`
/// from zero initial history; the first `burn_in` values are discarded.
#[allow(clippy::too_many_arguments)]
pub fn simulate_bilinear(
    n: usize,
    a: f64,
    b: f64,
    ar: &[f64],
    ma: &[f64],
    innovations: &InnovationSpec,
    norm_order: f64,
    burn_in: usize,
    seed: u64,
) -> Result<Path> {
    bilinear_core(n, a, b, ar, ma, innovations, norm_order, burn_in, path_rng(seed), seed)
}

#[allow(clippy::too_many_arguments)]
fn bilinear_core(
    n: usize,
    a: f64,
    b: f64,
    ar: &[f64],
    ma: &[f64],
    innovations: &InnovationSpec,
    norm_order: f64,
    burn_in: usize,
    rng: ChaCha8Rng,
    seed: u64,
) -> Result<Path> {
    if n == 0 {
        return Err(Error::domain("path length must be >= 1"));
    }
    if !matches!(innovations, InnovationSpec::Fixed(_)) {
        let lambda = bilinear_lambda(ar, ma, innovations, norm_order)?;
        if lambda >= 1.0 {
            return Err(Error::Stationarity { lambda });
        }
    }
    let depth = ar.len().max(ma.len());
    let total = burn_in + n;
    let mut source = InnovationSource::new(innovations, rng);
    let mut history: Vec<f64> = Vec::with_capacity(total);
    for t in 0..total {
        let mut ar_part = 0.0;
        let mut ma_part = 0.0;
        for j in 1..=depth {
            let x_prev = if t >= j { history[t - j] } else { 0.0 };
            if j <= ar.len() {
                ar_part += ar[j - 1] * x_prev;
            }
            if j <= ma.len() {
                ma_part += ma[j - 1] * x_prev;
            }
        }
        let xi = source.next()?;
        history.push(xi * (a + ar_part) + b + ma_part);
    }
    Ok(Path::new(history.split_off(burn_in), seed, "bilinear"))
}

/// Independent draws from `law`.
pub fn simulate_iid(n: usize, law: &InnovationSpec, seed: u64) -> Result<Path> {
    iid_core(n, law, path_rng(seed), seed)
}

fn iid_core(n: usize, law: &InnovationSpec, rng: ChaCha8Rng, seed: u64) -> Result<Path> {
    if n == 0 {
        return Err(Error::domain("path length must be >= 1"));
    }
    law.validate()?;
    let mut source = InnovationSource::new(law, rng);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(source.next()?);
    }
    Ok(Path::new(values, seed, "iid"))
}

/// Subsample `(x_{h(i)})` for i = 1, 2, ... while h(i) stays in range.
pub fn sample_process(path: &Path, stride: Stride) -> Result<Path> {
    stride.validate()?;
    let len = path.len();
    let mut values = Vec::new();
    let mut i = 1;
    while let Some(idx) = stride.index(i) {
        if idx > len {
            break;
        }
        values.push(path.values[idx - 1]);
        i += 1;
    }
    if values.is_empty() {
        let idx = stride.index(1).unwrap_or(usize::MAX);
        return Err(Error::IndexOutOfRange { index: idx, len });
    }
    Ok(Path::new(values, path.seed, format!("sampled({}; {stride})", path.spec_id)))
}
