//! Density estimation for weakly dependent time series.
//!
//! The crate has four legs:
//!
//! - [`processes`]: deterministic-seed simulators for the stock weakly
//!   dependent models (doubling Markov chain, two-sided linear processes,
//!   bilinear recursions, subsampled observation schemes, i.i.d. baselines),
//!   each carrying the marginal density and dependence decay known for it
//!   analytically.
//! - [`estimators`]: linear density estimators `(1/n) sum K_m(x, X_i)` over
//!   compact polynomial kernels, the Fejer projection kernel, and the Haar
//!   scaling family, with the kernel contracts (support, Lipschitz,
//!   normalization, bias order) checkable numerically.
//! - [`dependence`]: analytic decay bounds per model plus an empirical
//!   verifier for the covariance terms C_k(r) and the moment inequality they
//!   enter.
//! - [`rates`] and [`harness`]: closed-form convergence-rate exponents and
//!   optimal bandwidth schedules, and a Monte Carlo harness that measures
//!   error-vs-n slopes and compares them to the predicted exponents.
//!
//! Everything downstream of a seed is reproducible: simulators are pure in
//! `(spec, seed)`, replicates draw from derived counter-based streams, and
//! parallel reductions are order-fixed, so runs are bit-identical across
//! worker counts.

// Negated float comparisons (`!(x > 0.0)`) are deliberate throughout:
// unlike `x <= 0.0` they also reject NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dependence;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod processes;
pub mod quad;
pub mod rates;
pub mod rng;

pub use error::{Error, Result};
