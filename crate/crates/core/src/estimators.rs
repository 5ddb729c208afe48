//! Kernel families and evaluation of the linear density estimator
//! `f_hat(x) = (1/n) sum_i K_m(x, X_i)`.
//!
//! All shipped families are one-dimensional and satisfy the usual kernel
//! contracts: compact support of diameter O(1/m), Lipschitz constant
//! O(m^2), and unit normalization `int K_m(x, y) dy = 1`. The Haar family
//! is the documented exception: its scaling function is not Lipschitz, so
//! it is excluded from the Lipschitz contract (the estimator itself is
//! still perfectly computable: a histogram on dyadic bins).
//!
//! The bandwidth index `m` plays the role of an inverse bandwidth,
//! `m ~ h^-d`; callers working in bandwidth units convert via
//! `m = round(h^-d)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::processes::Path;
use crate::quad::simpson;

const PI: f64 = std::f64::consts::PI;

/// Panel count for normalization quadrature; integrands are smooth or
/// piecewise constant, so this is far more than the 1e-6 tolerance needs.
pub const NORMALIZATION_PANELS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// Polynomial kernel on [-1, 1] with the given vanishing-moment order.
    Compact { order: u32 },
    /// Fejer (Cesaro-averaged Dirichlet) projection kernel on the circle.
    FejerProjection,
    /// Haar scaling function: histogram on dyadic bins, m = 2^j.
    HaarWavelet,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::Compact { order } => write!(f, "compact{order}"),
            KernelKind::FejerProjection => write!(f, "fejer"),
            KernelKind::HaarWavelet => write!(f, "haar"),
        }
    }
}

/// A bandwidth-indexed kernel family `K_m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelFamily {
    pub kind: KernelKind,
    /// Dimension of the observations; 1 for every shipped family.
    pub d: u32,
    /// Radius of supp K in the base scale: supp K_m(x, .) has diameter
    /// at most `2 * support_radius * m^(-1/d)` (one full period for the
    /// Fejer family).
    pub support_radius: f64,
    /// `c` with `Lip(K_m(., y)) <= c * m^(1 + 1/d)`; None for Haar.
    pub lipschitz_scale: Option<f64>,
}

impl KernelFamily {
    /// Compact polynomial kernel of vanishing-moment order 2 or 4.
    ///
    /// Order 2 is the Epanechnikov kernel `(3/4)(1 - u^2)`; order 4 is
    /// `(15/32)(1 - u^2)(3 - 7u^2)`, whose first three moments vanish and
    /// whose fourth is -1/21.
    pub fn compact(order: u32) -> Result<Self> {
        let lipschitz_scale = match order {
            // max |K'| over the support: 3/2 at u = +-1 for order 2,
            // 15/4 at u = +-1 for order 4.
            2 => 1.5,
            4 => 3.75,
            _ => {
                return Err(Error::domain(format!(
                    "unsupported kernel order {order} (only 2 and 4 are shipped)"
                )))
            }
        };
        Ok(KernelFamily {
            kind: KernelKind::Compact { order },
            d: 1,
            support_radius: 1.0,
            lipschitz_scale: Some(lipschitz_scale),
        })
    }

    pub fn fejer() -> Self {
        KernelFamily {
            kind: KernelKind::FejerProjection,
            d: 1,
            support_radius: PI,
            // |F_m'| <= (m^2 - 1)/3, and K_m = F_m / (2 pi).
            lipschitz_scale: Some(1.0 / (6.0 * PI)),
        }
    }

    pub fn haar() -> Self {
        KernelFamily {
            kind: KernelKind::HaarWavelet,
            d: 1,
            support_radius: 1.0,
            lipschitz_scale: None,
        }
    }

    /// `K_m(x, y)`.
    pub fn eval_m(&self, m: u32, x: f64, y: f64) -> f64 {
        debug_assert!(m >= 1);
        match self.kind {
            KernelKind::Compact { order } => {
                let mf = m as f64;
                mf * compact_base_eval(order, mf * (x - y))
            }
            KernelKind::FejerProjection => fejer_eval(m, x - y) / (2.0 * PI),
            KernelKind::HaarWavelet => {
                let j = haar_level(m);
                let scale = (1u64 << j) as f64;
                if (x * scale).floor() == (y * scale).floor() {
                    scale
                } else {
                    0.0
                }
            }
        }
    }

    /// Interval on which `K_m(x, .)` can be nonzero.
    pub fn support_interval(&self, m: u32, x: f64) -> (f64, f64) {
        match self.kind {
            KernelKind::Compact { .. } => {
                let r = self.support_radius / m as f64;
                (x - r, x + r)
            }
            KernelKind::FejerProjection => (x - PI, x + PI),
            KernelKind::HaarWavelet => {
                let scale = (1u64 << haar_level(m)) as f64;
                let lo = (x * scale).floor() / scale;
                (lo, lo + 1.0 / scale)
            }
        }
    }

    /// Quadrature of `y -> K_m(x, y)` over its support; equals 1 for every
    /// family and every m (contract check).
    pub fn normalization(&self, m: u32, x: f64, panels: usize) -> f64 {
        let (lo, hi) = self.support_interval(m, x);
        // The Haar bin is half-open; pull the right endpoint inside so the
        // quadrature never samples the neighboring bin.
        let hi = hi - (hi - lo) * 1e-12;
        simpson(|y| self.eval_m(m, x, y), lo, hi, panels)
    }

    /// Vanishing-moment order targeted by this family, when meaningful.
    pub fn order(&self) -> Option<u32> {
        match self.kind {
            KernelKind::Compact { order } => Some(order),
            _ => None,
        }
    }
}

/// Resolution level for a Haar bandwidth index: the nearest power of two,
/// `j = round(log2 m)`.
pub fn haar_level(m: u32) -> u32 {
    debug_assert!(m >= 1);
    (m as f64).log2().round().max(0.0) as u32
}

fn compact_base_eval(order: u32, u: f64) -> f64 {
    if u.abs() > 1.0 {
        return 0.0;
    }
    let u2 = u * u;
    match order {
        2 => 0.75 * (1.0 - u2),
        4 => (15.0 / 32.0) * (1.0 - u2) * (3.0 - 7.0 * u2),
        _ => unreachable!("orders validated at construction"),
    }
}

/// Base kernel `K(u)` of the given order (2 or 4) at `u`.
pub fn compact_kernel_eval(order: u32, u: f64) -> Result<f64> {
    if order != 2 && order != 4 {
        return Err(Error::domain(format!(
            "unsupported kernel order {order} (only 2 and 4 are shipped)"
        )));
    }
    Ok(compact_base_eval(order, u))
}

/// Symmetric Dirichlet kernel `D_k(u) = 1 + 2 sum_{j<=k} cos(ju)`.
///
/// The cosine-sum form is exact at u = 0 (value 2k + 1) and has no
/// removable singularity, which makes it the reference side of the
/// closed-form identity check.
pub fn dirichlet_eval(k: u32, u: f64) -> f64 {
    let mut acc = 1.0;
    for j in 1..=k {
        acc += 2.0 * (j as f64 * u).cos();
    }
    acc
}

/// Average of the first m Dirichlet kernels, `(1/m) sum_{k=0}^{m-1} D_k(u)`.
pub fn fejer_dirichlet_average(m: u32, u: f64) -> f64 {
    assert!(m >= 1);
    (0..m).map(|k| dirichlet_eval(k, u)).sum::<f64>() / m as f64
}

/// Fejer kernel `F_m(u) = sin^2(mu/2) / (m sin^2(u/2))`.
///
/// Near u = 0 (mod 2 pi) the closed form cancels catastrophically, so when
/// |sin(u/2)| <= 1e-8 the Dirichlet-sum value is returned instead (exactly
/// m at u = 0).
pub fn fejer_eval(m: u32, u: f64) -> f64 {
    assert!(m >= 1);
    let s = (0.5 * u).sin();
    if s.abs() <= 1e-8 {
        return fejer_dirichlet_average(m, u);
    }
    let t = (0.5 * m as f64 * u).sin();
    t * t / (m as f64 * s * s)
}

/// One evaluation of the estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateResult {
    pub x: f64,
    pub value: f64,
    pub n: usize,
    pub m: u32,
    pub kernel: KernelKind,
    /// Nominal bias envelope `C m^(-rho/d)` when the caller supplied the
    /// marginal's regularity; None otherwise.
    pub bias_bound: Option<f64>,
}

impl EstimateResult {
    /// Attach the nominal bias envelope `c * m^(-rho/d)` for a marginal of
    /// regularity `rho` (d = 1 for all shipped families).
    pub fn with_bias_bound(mut self, rho: f64, c: f64) -> Self {
        self.bias_bound = Some(c * (self.m as f64).powf(-rho));
        self
    }
}

/// `f_hat(x)` for any kernel family; plain arithmetic mean, deterministic.
pub fn estimate_at(path: &Path, kernel: &KernelFamily, m: u32, x: f64) -> EstimateResult {
    assert!(m >= 1, "bandwidth index m must be >= 1");
    let n = path.len();
    let value = path.values.iter().map(|&xi| kernel.eval_m(m, x, xi)).sum::<f64>() / n as f64;
    EstimateResult { x, value, n, m, kernel: kernel.kind, bias_bound: None }
}

/// Fejer projection estimator `(1/(2 pi n)) sum_i F_m(x - X_i)`; the data
/// are read 2 pi-periodically.
pub fn fejer_estimate(path: &Path, m: u32, x: f64) -> EstimateResult {
    estimate_at(path, &KernelFamily::fejer(), m, x)
}

/// Haar estimator at resolution level `j`: a histogram on dyadic bins of
/// width `2^-j`, i.e. bandwidth index `m = 2^j`.
pub fn haar_wavelet_estimate(path: &Path, j: u32, x: f64) -> EstimateResult {
    estimate_at(path, &KernelFamily::haar(), 1u32 << j, x)
}

/// Pointwise application over a grid; output order matches the grid.
pub fn estimate_grid(
    path: &Path,
    kernel: &KernelFamily,
    m: u32,
    grid: &[f64],
) -> Vec<EstimateResult> {
    grid.iter().map(|&x| estimate_at(path, kernel, m, x)).collect()
}
