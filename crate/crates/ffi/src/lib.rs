//! C ABI for the weakdens library.
//!
//! Conventions:
//! - Handles (`WdProcess`, `WdPath`) are opaque pointers created and freed
//!   by this library; never free them with `free()`.
//! - Fallible calls return a [`WdStatus`]; outputs are written through
//!   pointers only on `WD_STATUS_OK`. On failure,
//!   [`wd_last_error_message`] returns a thread-local description.
//! - Strings returned as `char*` are owned by the caller and must be
//!   released with [`wd_string_free`].
//! - Processes are described either by a preset name or by the same config
//!   text format the CLI reads (the `[process]` section is used).

// Pointer-safety conventions (null handling, ownership, lifetimes) are
// stated once in the module docs above rather than per function.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use weakdens::dependence::{verify_moment_inequality_with_slack, DependenceBound};
use weakdens::error::Error;
use weakdens::estimators::{estimate_grid, fejer_eval, KernelFamily};
use weakdens::harness::config::{
    coefficient_from_str, decay_from_str, estimator_from_str, theorem_from_str,
};
use weakdens::harness::{csv_string, parse_config, process_preset, run_experiment};
use weakdens::processes::{Path as SeriesPath, ProcessSpec};
use weakdens::rates::{optimal_bandwidth, rate_exponent, RateParams};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Stationarity = 4,
    InnovationsExhausted = 5,
    IndexOutOfRange = 6,
    EnumerationInfeasible = 7,
    Hypothesis = 8,
    SlopeFit = 9,
    ConfigParse = 10,
    MissingDensity = 11,
    Io = 12,
    Panic = 13,
}

/// Opaque process handle.
pub struct WdProcess(ProcessSpec);

/// Opaque simulated-path handle.
pub struct WdPath(SeriesPath);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|c| *c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> WdStatus {
    match err {
        Error::Domain(_) => WdStatus::Domain,
        Error::Stationarity { .. } => WdStatus::Stationarity,
        Error::InnovationsExhausted { .. } => WdStatus::InnovationsExhausted,
        Error::IndexOutOfRange { .. } => WdStatus::IndexOutOfRange,
        Error::EnumerationInfeasible { .. } => WdStatus::EnumerationInfeasible,
        Error::Hypothesis(_) => WdStatus::Hypothesis,
        Error::SlopeFit(_) => WdStatus::SlopeFit,
        Error::ConfigParse { .. } => WdStatus::ConfigParse,
        Error::MissingDensity => WdStatus::MissingDensity,
        Error::Io(_) => WdStatus::Io,
    }
}

fn fail(err: &Error) -> WdStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guarded<F: FnOnce() -> WdStatus>(f: F) -> WdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            WdStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, WdStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(WdStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        WdStatus::InvalidUtf8
    })
}

fn alloc_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Library version as a static string; never freed.
#[no_mangle]
pub extern "C" fn wd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Thread-local message for the most recent failure on this thread. Valid
/// until the next failing call on the same thread; never freed.
#[no_mangle]
pub extern "C" fn wd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn wd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a process from a preset name (doubling, linear-gaussian,
/// iid-uniform, iid-gaussian, iid-cosine, bilinear-arch).
#[no_mangle]
pub unsafe extern "C" fn wd_process_preset(
    name: *const c_char,
    out: *mut *mut WdProcess,
) -> WdStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return WdStatus::NullPointer;
        }
        let name = match read_str(name) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match process_preset(name) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(WdProcess(spec)));
                WdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Build a process from config text (the `[process]` section of the CLI
/// config format).
#[no_mangle]
pub unsafe extern "C" fn wd_process_from_config(
    text: *const c_char,
    out: *mut *mut WdProcess,
) -> WdStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return WdStatus::NullPointer;
        }
        let text = match read_str(text) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match parse_config(text) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(WdProcess(config.process)));
                WdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Canonical descriptor of the process; free with [`wd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn wd_process_id(process: *const WdProcess) -> *mut c_char {
    if process.is_null() {
        return ptr::null_mut();
    }
    alloc_string(&(*process).0.to_string())
}

#[no_mangle]
pub unsafe extern "C" fn wd_process_free(process: *mut WdProcess) {
    if !process.is_null() {
        drop(Box::from_raw(process));
    }
}

/// Simulate a length-`n` path; reproducible in `(process, seed)`.
#[no_mangle]
pub unsafe extern "C" fn wd_simulate(
    process: *const WdProcess,
    n: usize,
    seed: u64,
    out: *mut *mut WdPath,
) -> WdStatus {
    guarded(|| {
        if process.is_null() || out.is_null() {
            set_error("null pointer argument");
            return WdStatus::NullPointer;
        }
        match (*process).0.simulate(n, seed) {
            Ok(path) => {
                *out = Box::into_raw(Box::new(WdPath(path)));
                WdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of values in the path (0 for a null handle).
#[no_mangle]
pub unsafe extern "C" fn wd_path_len(path: *const WdPath) -> usize {
    if path.is_null() {
        return 0;
    }
    (*path).0.len()
}

/// Borrowed pointer to the path values; valid while the handle lives.
#[no_mangle]
pub unsafe extern "C" fn wd_path_values(path: *const WdPath) -> *const f64 {
    if path.is_null() {
        return ptr::null();
    }
    (*path).0.values.as_ptr()
}

#[no_mangle]
pub unsafe extern "C" fn wd_path_free(path: *mut WdPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Evaluate the density estimate at `len` grid points into `out_values`.
/// `estimator` is one of compact2, compact4, fejer, haar.
#[no_mangle]
pub unsafe extern "C" fn wd_estimate_grid(
    path: *const WdPath,
    estimator: *const c_char,
    m: u32,
    xs: *const f64,
    len: usize,
    out_values: *mut f64,
) -> WdStatus {
    guarded(|| {
        if path.is_null() || (len > 0 && (xs.is_null() || out_values.is_null())) {
            set_error("null pointer argument");
            return WdStatus::NullPointer;
        }
        let kernel: KernelFamily =
            match read_str(estimator).and_then(|s| estimator_from_str(s).map_err(|e| fail(&e))) {
                Ok(k) => k,
                Err(status) => return status,
            };
        if m < 1 {
            set_error("bandwidth index m must be >= 1");
            return WdStatus::Domain;
        }
        let grid = std::slice::from_raw_parts(xs, len);
        let results = estimate_grid(&(*path).0, &kernel, m, grid);
        let out = std::slice::from_raw_parts_mut(out_values, len);
        for (slot, est) in out.iter_mut().zip(&results) {
            *slot = est.value;
        }
        WdStatus::Ok
    })
}

/// Base compact kernel K(u) for order 2 or 4.
#[no_mangle]
pub unsafe extern "C" fn wd_compact_kernel_eval(
    order: u32,
    u: f64,
    out_value: *mut f64,
) -> WdStatus {
    guarded(|| {
        if out_value.is_null() {
            set_error("null output pointer");
            return WdStatus::NullPointer;
        }
        match weakdens::estimators::compact_kernel_eval(order, u) {
            Ok(v) => {
                *out_value = v;
                WdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Fejer kernel F_m(u); NaN for m = 0.
#[no_mangle]
pub extern "C" fn wd_fejer_eval(m: u32, u: f64) -> f64 {
    if m < 1 {
        return f64::NAN;
    }
    fejer_eval(m, u)
}

unsafe fn rate_params(
    theorem: *const c_char,
    coefficient: *const c_char,
    decay: *const c_char,
    decay_constant: f64,
    rho: f64,
    d: u32,
    q: f64,
) -> Result<RateParams, WdStatus> {
    let theorem = theorem_from_str(read_str(theorem)?).map_err(|e| fail(&e))?;
    let coefficient = coefficient_from_str(read_str(coefficient)?).map_err(|e| fail(&e))?;
    let decay = decay_from_str(read_str(decay)?).map_err(|e| fail(&e))?;
    let bound = DependenceBound::new(coefficient, decay, decay_constant).map_err(|e| fail(&e))?;
    Ok(RateParams { rho, d, decay: bound, q, theorem })
}

/// Rate exponent and log power for a theorem / parameter set. `theorem` is
/// t1, t2, t3mean or t3as; `coefficient` is eta or phitilde; `decay` is
/// geometric(a,b) or riemannian(a).
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wd_rate_exponent(
    theorem: *const c_char,
    coefficient: *const c_char,
    decay: *const c_char,
    decay_constant: f64,
    rho: f64,
    d: u32,
    q: f64,
    out_exponent: *mut f64,
    out_log_power: *mut f64,
) -> WdStatus {
    guarded(|| {
        if out_exponent.is_null() || out_log_power.is_null() {
            set_error("null output pointer");
            return WdStatus::NullPointer;
        }
        let params = match rate_params(theorem, coefficient, decay, decay_constant, rho, d, q) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match rate_exponent(&params) {
            Ok(rr) => {
                *out_exponent = rr.exponent;
                *out_log_power = rr.log_power;
                WdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Optimal integer bandwidth index at sample size n.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wd_optimal_bandwidth(
    theorem: *const c_char,
    coefficient: *const c_char,
    decay: *const c_char,
    decay_constant: f64,
    rho: f64,
    d: u32,
    q: f64,
    n: usize,
    out_m: *mut u32,
) -> WdStatus {
    guarded(|| {
        if out_m.is_null() {
            set_error("null output pointer");
            return WdStatus::NullPointer;
        }
        let params = match rate_params(theorem, coefficient, decay, decay_constant, rho, d, q) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match optimal_bandwidth(&params, n) {
            Ok(m) => {
                *out_m = m;
                WdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Monte Carlo moment-inequality check. Writes 1 into `out_holds` when the
/// inequality holds at the given slack, 0 otherwise.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wd_verify_moment(
    process: *const WdProcess,
    x: f64,
    estimator: *const c_char,
    m: u32,
    q: u32,
    n: usize,
    replicates: usize,
    seed: u64,
    slack: f64,
    out_holds: *mut i32,
    out_lhs: *mut f64,
    out_rhs: *mut f64,
) -> WdStatus {
    guarded(|| {
        if process.is_null() || out_holds.is_null() || out_lhs.is_null() || out_rhs.is_null() {
            set_error("null pointer argument");
            return WdStatus::NullPointer;
        }
        let kernel =
            match read_str(estimator).and_then(|s| estimator_from_str(s).map_err(|e| fail(&e))) {
                Ok(k) => k,
                Err(status) => return status,
            };
        match verify_moment_inequality_with_slack(
            &(*process).0,
            x,
            &kernel,
            m,
            q,
            n,
            replicates,
            seed,
            slack,
        ) {
            Ok(report) => {
                *out_holds = report.holds as i32;
                *out_lhs = report.lhs;
                *out_rhs = report.rhs;
                WdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Run a full slope experiment from config text. On success `out_csv`
/// receives the result rows (fixed CSV schema) and `out_summary` the plain
/// text summary; free both with [`wd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn wd_run_experiment(
    config_text: *const c_char,
    out_csv: *mut *mut c_char,
    out_summary: *mut *mut c_char,
) -> WdStatus {
    guarded(|| {
        if out_csv.is_null() || out_summary.is_null() {
            set_error("null output pointer");
            return WdStatus::NullPointer;
        }
        let text = match read_str(config_text) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let config = match parse_config(text) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match run_experiment(&config) {
            Ok(result) => {
                *out_csv = alloc_string(&csv_string(&result));
                *out_summary = alloc_string(&result.summary());
                WdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
