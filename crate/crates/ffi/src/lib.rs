//! C ABI for the `nwidths` library.
//!
//! Every function returns an `int32_t` status: `NW_OK` on success, otherwise
//! the same code the command-line tool exits with. The message for the most
//! recent failure on the calling thread is available from
//! `nw_last_error_message`. Handles are opaque and owned by the caller once
//! returned; release them with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nwidths::allocator::{dyadic_grid, lower_bound_sequence, upper_bound_sequence, BlockModel, Strategy, WidthSequence};
use nwidths::cli::CliError;
use nwidths::exponents::{exponent, CaseId, WidthKind};
use nwidths::finwidths::{model_width, FiniteWidthQuery};
use nwidths::params::{format_rational, parse_rational, EmbeddingParams, ExtReal};
use nwidths::verify::fit_slope;

pub const NW_OK: i32 = 0;
pub const NW_ERR_NULL_POINTER: i32 = 1;
pub const NW_ERR_USAGE: i32 = 2;
pub const NW_ERR_INVALID_PARAMS: i32 = 3;
pub const NW_ERR_NOT_COMPACT: i32 = 10;
pub const NW_ERR_LIMITING_CASE: i32 = 11;
pub const NW_ERR_HYPOTHESIS_FAILURE: i32 = 12;
pub const NW_ERR_BOUNDARY_CASE: i32 = 13;
pub const NW_ERR_UNSUPPORTED_REGION: i32 = 20;
pub const NW_ERR_ORACLE_TOO_LARGE: i32 = 21;
pub const NW_ERR_INVALID_QUERY: i32 = 23;
pub const NW_ERR_REGIME_MISMATCH: i32 = 30;
pub const NW_ERR_INFEASIBLE_CONSTRAINTS: i32 = 31;
pub const NW_ERR_INVALID_BUDGET: i32 = 32;
pub const NW_ERR_INSUFFICIENT_POINTS: i32 = 40;
pub const NW_ERR_NON_POSITIVE_VALUE: i32 = 41;
pub const NW_ERR_INVALID_WINDOW: i32 = 42;
pub const NW_ERR_OUT_OF_RANGE: i32 = 70;
pub const NW_ERR_PANIC: i32 = 99;

pub const NW_KIND_KOLMOGOROV: i32 = 0;
pub const NW_KIND_GELFAND: i32 = 1;

pub const NW_STRATEGY_GREEDY: i32 = 0;
/// Step 4 or Step 3, whichever matches the regime.
pub const NW_STRATEGY_PAPER: i32 = 1;
pub const NW_STRATEGY_PAPER_STEP3: i32 = 2;
pub const NW_STRATEGY_PAPER_STEP4: i32 = 3;

/// Parsed embedding parameters.
pub struct NwParams(EmbeddingParams);

/// A sequence of `(n, value)` points.
pub struct NwSequence(WidthSequence);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(i32, String);

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure(e.exit_code(), e.to_string())
    }
}

fn fail<E: Into<CliError>>(e: E) -> Failure {
    e.into().into()
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NW_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            NW_ERR_PANIC
        }
    }
}

fn null() -> Failure {
    Failure(NW_ERR_NULL_POINTER, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(NW_ERR_USAGE, "argument is not valid UTF-8".into()))
}

unsafe fn ext_arg(p: *const c_char) -> Result<ExtReal, Failure> {
    str_arg(p)?.parse::<ExtReal>().map_err(fail)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

fn kind_arg(kind: i32) -> Result<WidthKind, Failure> {
    match kind {
        NW_KIND_KOLMOGOROV => Ok(WidthKind::Kolmogorov),
        NW_KIND_GELFAND => Ok(WidthKind::Gelfand),
        _ => Err(Failure(NW_ERR_USAGE, format!("unknown width kind {kind}"))),
    }
}

unsafe fn params_ref<'a>(p: *const NwParams) -> Result<&'a EmbeddingParams, Failure> {
    p.as_ref().map(|p| &p.0).ok_or_else(null)
}

/// Parse parameters from `key=value` text or a JSON object.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nw_params_parse(text: *const c_char, out: *mut *mut NwParams) -> i32 {
    guard(|| {
        let p = EmbeddingParams::parse(str_arg(text)?).map_err(fail)?;
        write(out, Box::into_raw(Box::new(NwParams(p))))
    })
}

/// Parameters with smoothness gap `delta` (`s2 = 0`), all numbers given as
/// rational strings such as `"3/4"` or `"inf"`.
///
/// # Safety
/// All string arguments must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nw_params_with_delta(
    p1: *const c_char,
    p2: *const c_char,
    d: u32,
    alpha: *const c_char,
    delta: *const c_char,
    out: *mut *mut NwParams,
) -> i32 {
    guard(|| {
        let alpha = parse_rational(str_arg(alpha)?).map_err(fail)?;
        let delta = parse_rational(str_arg(delta)?).map_err(fail)?;
        let p = EmbeddingParams::with_delta(ext_arg(p1)?, ext_arg(p2)?, d, alpha, delta);
        write(out, Box::into_raw(Box::new(NwParams(p))))
    })
}

/// # Safety
/// `params` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn nw_params_free(params: *mut NwParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Case (1..=6 for i..vi) and exponent κ. `out_kappa_str`, when not NULL,
/// receives κ as an exact rational string to be freed with `nw_string_free`.
///
/// # Safety
/// `params` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nw_classify(
    params: *const NwParams,
    kind: i32,
    out_case: *mut i32,
    out_kappa: *mut f64,
    out_kappa_str: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let d = exponent(kind_arg(kind)?, params_ref(params)?).map_err(fail)?;
        let case = CaseId::ALL.iter().position(|&c| c == d.case_id).map_or(0, |k| k as i32 + 1);
        write(out_case, case)?;
        write(out_kappa, d.kappa_f64())?;
        if !out_kappa_str.is_null() {
            let s = CString::new(format_rational(&d.kappa)).unwrap_or_default();
            out_kappa_str.write(s.into_raw());
        }
        Ok(())
    })
}

/// Model width of `id: ℓ_{p1}^N → ℓ_{p2}^N` at index `n`.
///
/// # Safety
/// `p1`, `p2` must be NUL-terminated; `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nw_finite_width(
    kind: i32,
    p1: *const c_char,
    p2: *const c_char,
    big_n: u64,
    n: u64,
    out_value: *mut f64,
) -> i32 {
    guard(|| {
        let q = FiniteWidthQuery::new(kind_arg(kind)?, ext_arg(p1)?, ext_arg(p2)?, big_n, n);
        let w = model_width(&q).map_err(fail)?;
        write(out_value, w.value)
    })
}

fn model_and_grid(
    params: &EmbeddingParams,
    kind: i32,
    n_min: u64,
    n_max: u64,
    per_octave: u32,
) -> Result<(BlockModel, Vec<u64>), Failure> {
    nwidths::verify::check_window((n_min, n_max)).map_err(fail)?;
    let model = BlockModel::new(params, kind_arg(kind)?).map_err(fail)?;
    Ok((model, dyadic_grid(n_min, n_max, per_octave)))
}

/// Upper bounds on the dyadic grid between the powers of two `n_min` and
/// `n_max`, with `per_octave` points per doubling.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nw_upper_bound_sequence(
    params: *const NwParams,
    kind: i32,
    n_min: u64,
    n_max: u64,
    per_octave: u32,
    strategy: i32,
    out: *mut *mut NwSequence,
) -> i32 {
    guard(|| {
        let (model, grid) = model_and_grid(params_ref(params)?, kind, n_min, n_max, per_octave)?;
        let s = match strategy {
            NW_STRATEGY_GREEDY => Strategy::Greedy,
            NW_STRATEGY_PAPER => model.paper_strategy().map_err(fail)?,
            NW_STRATEGY_PAPER_STEP3 => Strategy::PaperStep3,
            NW_STRATEGY_PAPER_STEP4 => Strategy::PaperStep4,
            other => return Err(Failure(NW_ERR_USAGE, format!("unknown strategy {other}"))),
        };
        let seq = upper_bound_sequence(&model, &grid, s).map_err(fail)?;
        write(out, Box::into_raw(Box::new(NwSequence(seq))))
    })
}

/// Single-block lower bounds on the same grid as the upper bounds.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nw_lower_bound_sequence(
    params: *const NwParams,
    kind: i32,
    n_min: u64,
    n_max: u64,
    per_octave: u32,
    out: *mut *mut NwSequence,
) -> i32 {
    guard(|| {
        let (model, grid) = model_and_grid(params_ref(params)?, kind, n_min, n_max, per_octave)?;
        let seq = lower_bound_sequence(&model, &grid).map_err(fail)?;
        write(out, Box::into_raw(Box::new(NwSequence(seq))))
    })
}

/// Number of points; 0 for NULL.
///
/// # Safety
/// `seq` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn nw_sequence_len(seq: *const NwSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.points.len())
}

/// # Safety
/// `seq` must be a live handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nw_sequence_get(seq: *const NwSequence, index: usize, out_n: *mut u64, out_value: *mut f64) -> i32 {
    guard(|| {
        let s = seq.as_ref().ok_or_else(null)?;
        let &(n, v) = s
            .0
            .points
            .get(index)
            .ok_or_else(|| Failure(NW_ERR_OUT_OF_RANGE, format!("index {index} out of range")))?;
        write(out_n, n)?;
        write(out_value, v)
    })
}

/// # Safety
/// `seq` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn nw_sequence_free(seq: *mut NwSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Least-squares slope of `log2 value` against `log2 n` on `[n_min, n_max]`.
/// `out_residual_rms` may be NULL.
///
/// # Safety
/// `seq` must be a live handle; `out_slope` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nw_fit_slope(
    seq: *const NwSequence,
    n_min: u64,
    n_max: u64,
    out_slope: *mut f64,
    out_residual_rms: *mut f64,
) -> i32 {
    guard(|| {
        let s = seq.as_ref().ok_or_else(null)?;
        let r = fit_slope(&s.0, (n_min, n_max), None).map_err(fail)?;
        write(out_slope, r.fitted_slope)?;
        if !out_residual_rms.is_null() {
            out_residual_rms.write(r.residual_rms);
        }
        Ok(())
    })
}

/// Message of the last failure on this thread, empty after a success. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn nw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn nw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn nw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
