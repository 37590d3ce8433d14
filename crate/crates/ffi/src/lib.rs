//! C interface over the windowed-aggregation engine.
//!
//! The shape is conventional: parse an expression once into an opaque handle,
//! evaluate it any number of times over caller-owned arrays, free the handle.
//! Results come back as a dense `double` array plus a validity byte per row
//! (empty frames produce invalid slots). Failures return a status code and
//! leave a human-readable message in thread-local storage, readable with
//! [`spillway_last_error_message`].
//!
//! Input arrays are copied on entry; the engine never holds pointers into
//! caller memory after a call returns. Integer results are converted to
//! `double`, so sums beyond 2^53 lose low bits at this boundary even though
//! the engine computes them exactly.

use spillway::cli::{evaluate_with_keys, parse_window_expr, WindowExpr};
use spillway::executor::{EngineConfig, Strategy};
use spillway::spill::SpillConfig;
use spillway::value::Column;
use spillway::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpillwayStatus {
    /// The call succeeded; out parameters are filled.
    Ok = 0,
    /// The expression text did not parse or failed frame validation.
    ParseError = 2,
    /// Input data was rejected.
    IngestError = 3,
    /// Spill page I/O failed.
    IoError = 4,
    /// Any other engine error, including internal panics.
    OtherError = 5,
    /// A pointer was null, a length inconsistent, or a parameter zero.
    InvalidArgument = 6,
}

/// Which evaluation strategy ran; mirrors the engine's planner vocabulary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpillwayStrategy {
    IncrementalUpdate = 0,
    RunningExtremum = 1,
    InMemoryDeque = 2,
    SpilledDeque = 3,
    BruteForce = 4,
}

/// Operation and I/O counters for one evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpillwayStats {
    pub strategy: SpillwayStrategy,
    pub rows: u64,
    pub add_ops: u64,
    pub remove_ops: u64,
    pub page_reads: u64,
    pub page_writes: u64,
    pub pages_live_peak: u64,
    pub hot_tail_peak: u64,
}

/// Opaque parsed-expression handle; create with [`spillway_expr_parse`],
/// destroy with [`spillway_expr_free`].
pub struct SpillwayExpr {
    inner: WindowExpr,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', "?");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL bytes replaced");
    });
}

fn status_for(err: &Error) -> SpillwayStatus {
    match err {
        Error::Parse(_) | Error::InvalidFrame(_) => SpillwayStatus::ParseError,
        Error::Ingest(_) => SpillwayStatus::IngestError,
        Error::SpillIo(_) => SpillwayStatus::IoError,
        _ => SpillwayStatus::OtherError,
    }
}

fn strategy_code(s: Strategy) -> SpillwayStrategy {
    match s {
        Strategy::IncrementalUpdate => SpillwayStrategy::IncrementalUpdate,
        Strategy::RunningExtremum => SpillwayStrategy::RunningExtremum,
        Strategy::InMemoryDeque => SpillwayStrategy::InMemoryDeque,
        Strategy::SpilledDeque => SpillwayStrategy::SpilledDeque,
        Strategy::BruteForce => SpillwayStrategy::BruteForce,
    }
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn spillway_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, as a NUL-terminated
/// string. Empty until a call fails. The pointer stays valid until the next
/// failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn spillway_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse a window expression such as
/// `"AVG(Score) OVER (ROWS BETWEEN 2 PRECEDING AND 1 FOLLOWING)"`.
///
/// Returns a handle to pass to the eval calls, or null on failure with the
/// diagnostic (including the byte offset of the first error) available via
/// [`spillway_last_error_message`].
///
/// # Safety
/// `text` must be a valid NUL-terminated string, readable for its full
/// length, and must stay valid for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn spillway_expr_parse(text: *const c_char) -> *mut SpillwayExpr {
    if text.is_null() {
        set_last_error("text is null");
        return std::ptr::null_mut();
    }
    let parsed = catch_unwind(AssertUnwindSafe(|| {
        let text = match CStr::from_ptr(text).to_str() {
            Ok(t) => t,
            Err(_) => {
                set_last_error("text is not valid UTF-8");
                return std::ptr::null_mut();
            }
        };
        match parse_window_expr(text) {
            Ok(inner) => Box::into_raw(Box::new(SpillwayExpr { inner })),
            Err(e) => {
                set_last_error(&e.to_string());
                std::ptr::null_mut()
            }
        }
    }));
    parsed.unwrap_or_else(|_| {
        set_last_error("internal panic during parse");
        std::ptr::null_mut()
    })
}

/// Free a handle returned by [`spillway_expr_parse`]. Null is a no-op.
///
/// # Safety
/// `expr` must be null or a pointer returned by [`spillway_expr_parse`] that
/// has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn spillway_expr_free(expr: *mut SpillwayExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Canonical result-column header for the expression, e.g. `"AVG(Score)"`,
/// as a freshly allocated NUL-terminated string. Free it with
/// [`spillway_string_free`]. Returns null if `expr` is null.
///
/// # Safety
/// `expr` must be null or a live handle from [`spillway_expr_parse`].
#[no_mangle]
pub unsafe extern "C" fn spillway_expr_display(expr: *const SpillwayExpr) -> *mut c_char {
    if expr.is_null() {
        set_last_error("expr is null");
        return std::ptr::null_mut();
    }
    let display = (*expr).inner.display();
    CString::new(display.replace('\0', "?"))
        .expect("NUL bytes replaced")
        .into_raw()
}

/// Free a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer returned by [`spillway_expr_display`] that
/// has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn spillway_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Evaluate `expr` over `len` doubles.
///
/// `keys` is the ORDER BY column when the expression has one (RANGE frames
/// require it) and may be null otherwise; when present it must also hold
/// `len` values. On success `out_values[i]` holds row `i`'s result and
/// `out_valid[i]` is 1, or `out_valid[i]` is 0 and the value slot is NaN for
/// rows whose frame was empty. `out_stats` may be null.
///
/// # Safety
/// `data` (and `keys` when non-null) must point to `len` readable values.
/// `out_values` and `out_valid` must point to `len` writable slots. No
/// aliasing constraints beyond the usual: the output arrays must not overlap
/// the inputs. `expr` must be a live handle from [`spillway_expr_parse`].
#[no_mangle]
pub unsafe extern "C" fn spillway_eval_f64(
    expr: *const SpillwayExpr,
    data: *const f64,
    len: usize,
    keys: *const f64,
    memory_budget: usize,
    page_size: usize,
    out_values: *mut f64,
    out_valid: *mut u8,
    out_stats: *mut SpillwayStats,
) -> SpillwayStatus {
    let data = match copy_in(data, len, "data") {
        Ok(v) => Column::Float(v),
        Err(s) => return s,
    };
    let keys = if keys.is_null() {
        None
    } else {
        match copy_in(keys, len, "keys") {
            Ok(v) => Some(Column::Float(v)),
            Err(s) => return s,
        }
    };
    eval_impl(
        expr,
        data,
        keys,
        memory_budget,
        page_size,
        out_values,
        out_valid,
        out_stats,
        len,
    )
}

/// Evaluate `expr` over `len` 64-bit integers. Results are still doubles;
/// see [`spillway_eval_f64`] for the output contract and safety rules.
///
/// # Safety
/// Identical to [`spillway_eval_f64`], with `data`/`keys` pointing at `i64`.
#[no_mangle]
pub unsafe extern "C" fn spillway_eval_i64(
    expr: *const SpillwayExpr,
    data: *const i64,
    len: usize,
    keys: *const i64,
    memory_budget: usize,
    page_size: usize,
    out_values: *mut f64,
    out_valid: *mut u8,
    out_stats: *mut SpillwayStats,
) -> SpillwayStatus {
    let data = match copy_in(data, len, "data") {
        Ok(v) => Column::Int(v),
        Err(s) => return s,
    };
    let keys = if keys.is_null() {
        None
    } else {
        match copy_in(keys, len, "keys") {
            Ok(v) => Some(Column::Int(v)),
            Err(s) => return s,
        }
    };
    eval_impl(
        expr,
        data,
        keys,
        memory_budget,
        page_size,
        out_values,
        out_valid,
        out_stats,
        len,
    )
}

unsafe fn copy_in<T: Copy>(
    ptr: *const T,
    len: usize,
    name: &str,
) -> Result<Vec<T>, SpillwayStatus> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if ptr.is_null() {
        set_last_error(&format!("{name} is null but len is {len}"));
        return Err(SpillwayStatus::InvalidArgument);
    }
    Ok(std::slice::from_raw_parts(ptr, len).to_vec())
}

#[allow(clippy::too_many_arguments)]
unsafe fn eval_impl(
    expr: *const SpillwayExpr,
    data: Column,
    keys: Option<Column>,
    memory_budget: usize,
    page_size: usize,
    out_values: *mut f64,
    out_valid: *mut u8,
    out_stats: *mut SpillwayStats,
    len: usize,
) -> SpillwayStatus {
    if expr.is_null() {
        set_last_error("expr is null");
        return SpillwayStatus::InvalidArgument;
    }
    if len > 0 && (out_values.is_null() || out_valid.is_null()) {
        set_last_error("output arrays are null");
        return SpillwayStatus::InvalidArgument;
    }
    if memory_budget == 0 || page_size == 0 {
        set_last_error("memory_budget and page_size must be at least 1");
        return SpillwayStatus::InvalidArgument;
    }
    let expr = &(*expr).inner;

    let result = catch_unwind(AssertUnwindSafe(|| {
        let config = EngineConfig {
            spill: SpillConfig {
                memory_budget,
                page_capacity: page_size,
                ..SpillConfig::default()
            },
        };
        evaluate_with_keys(expr, &data, keys.as_ref(), &config, None)
    }));
    let (output, strategy) = match result {
        Ok(Ok(pair)) => pair,
        Ok(Err(e)) => {
            set_last_error(&e.to_string());
            return status_for(&e);
        }
        Err(_) => {
            set_last_error("internal panic during evaluation");
            return SpillwayStatus::OtherError;
        }
    };

    debug_assert_eq!(output.values.len(), len);
    for (i, value) in output.values.iter().enumerate() {
        match value {
            Some(v) => {
                *out_values.add(i) = v.as_f64();
                *out_valid.add(i) = 1;
            }
            None => {
                *out_values.add(i) = f64::NAN;
                *out_valid.add(i) = 0;
            }
        }
    }
    if !out_stats.is_null() {
        *out_stats = SpillwayStats {
            strategy: strategy_code(strategy),
            rows: output.stats.rows as u64,
            add_ops: output.stats.add_ops,
            remove_ops: output.stats.remove_ops,
            page_reads: output.stats.io.page_reads,
            page_writes: output.stats.io.page_writes,
            pages_live_peak: output.stats.pages_live_peak,
            hot_tail_peak: output.stats.hot_tail_peak as u64,
        };
    }
    SpillwayStatus::Ok
}
