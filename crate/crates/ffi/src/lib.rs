//! C interface to the termination checker.
//!
//! Systems and reports are opaque handles owned by the caller and released
//! with their `_free` function. Strings returned by the library are
//! released with [`hodp_string_free`]. Every fallible call returns a
//! [`HodpStatus`]; the message of the last failure on the calling thread is
//! available from [`hodp_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hodp::order::Precedence;
use hodp::rewrite::{ExploreLimits, InternalMode};
use hodp::{AnalysisReport, Error, Format, Options, RewriteSystem, Verdict};

/// A parsed and type-checked rewrite system.
pub struct HodpSystem {
    inner: RewriteSystem,
}

/// The result of an analysis.
pub struct HodpReport {
    inner: AnalysisReport,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HodpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Type = 4,
    InferenceAmbiguity = 5,
    MalformedLhs = 6,
    /// Any other problem with the input: duplicate or unknown symbols,
    /// cyclic precedences, bad positions.
    InvalidInput = 7,
    ResourceLimit = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HodpVerdict {
    Yes = 0,
    No = 1,
    Maybe = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HodpFormat {
    Text = 0,
    TextTrace = 1,
    Json = 2,
}

/// Analysis options; obtain defaults from [`hodp_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HodpOptions {
    /// Fixed precedence such as `"f>g,f>h"`, or null to search.
    pub precedence: *const c_char,
    pub max_symbols: u32,
    pub ge_bound: u32,
    pub disprove: bool,
    pub explore_depth: u32,
    pub explore_nodes: u32,
    /// Restrict internal chain steps to rule steps.
    pub rules_only: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HodpStatus {
    match e {
        Error::Syntax { .. } => HodpStatus::Syntax,
        Error::Type { .. } | Error::TypeMismatch { .. } => HodpStatus::Type,
        Error::InferenceAmbiguity { .. } => HodpStatus::InferenceAmbiguity,
        Error::MalformedLhs { .. } => HodpStatus::MalformedLhs,
        Error::ResourceLimit(_) | Error::SearchSpaceExceeded { .. } => HodpStatus::ResourceLimit,
        _ => HodpStatus::InvalidInput,
    }
}

fn fail(e: Error) -> HodpStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

/// Runs `f`, turning a panic into [`HodpStatus::Panic`].
fn guard(f: impl FnOnce() -> HodpStatus) -> HodpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal error: {msg}"));
            HodpStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, HodpStatus> {
    if s.is_null() {
        set_error("null pointer".into());
        return Err(HodpStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|e| {
        set_error(format!("invalid UTF-8: {e}"));
        HodpStatus::InvalidUtf8
    })
}

#[no_mangle]
pub extern "C" fn hodp_options_default() -> HodpOptions {
    let d = Options::default();
    HodpOptions {
        precedence: ptr::null(),
        max_symbols: d.max_symbols as u32,
        ge_bound: d.ge_bound as u32,
        disprove: false,
        explore_depth: d.explore.max_depth as u32,
        explore_nodes: d.explore.max_nodes as u32,
        rules_only: false,
    }
}

/// Parses a system in the line-oriented input format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hodp_system_parse(text: *const c_char, out: *mut *mut HodpSystem) -> HodpStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return HodpStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match hodp::parse_system(text) {
            Ok(sys) => {
                *out = Box::into_raw(Box::new(HodpSystem { inner: sys }));
                HodpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of rules, or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a handle from [`hodp_system_parse`].
#[no_mangle]
pub unsafe extern "C" fn hodp_system_rule_count(system: *const HodpSystem) -> usize {
    system.as_ref().map_or(0, |s| s.inner.rules.len())
}

/// # Safety
/// `system` must be null or a handle from [`hodp_system_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hodp_system_free(system: *mut HodpSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Runs the analysis. `options` may be null for the defaults.
///
/// # Safety
/// `system` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hodp_analyze(
    system: *const HodpSystem,
    options: *const HodpOptions,
    out: *mut *mut HodpReport,
) -> HodpStatus {
    guard(|| {
        if out.is_null() || system.is_null() {
            set_error("null pointer".into());
            return HodpStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let o = options.as_ref().copied().unwrap_or_else(|| hodp_options_default());
        let precedence = if o.precedence.is_null() {
            None
        } else {
            let text = match read_str(o.precedence) {
                Ok(t) => t,
                Err(s) => return s,
            };
            match Precedence::parse(text) {
                Ok(p) => Some(p),
                Err(e) => return fail(e),
            }
        };
        let opts = Options {
            precedence,
            max_symbols: o.max_symbols as usize,
            ge_bound: o.ge_bound as usize,
            disprove: o.disprove,
            explore: ExploreLimits {
                max_depth: o.explore_depth as usize,
                max_nodes: o.explore_nodes as usize,
            },
            internal: if o.rules_only { InternalMode::RulesOnly } else { InternalMode::All },
            ..Options::default()
        };
        match hodp::run_pipeline(&(*system).inner, &opts) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(HodpReport { inner: r }));
                HodpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Verdict of a report; `Maybe` for a null handle.
///
/// # Safety
/// `report` must be null or a live handle from [`hodp_analyze`].
#[no_mangle]
pub unsafe extern "C" fn hodp_report_verdict(report: *const HodpReport) -> HodpVerdict {
    match report.as_ref().map(|r| r.inner.verdict) {
        Some(Verdict::Yes) => HodpVerdict::Yes,
        Some(Verdict::No) => HodpVerdict::No,
        _ => HodpVerdict::Maybe,
    }
}

/// Renders a report; the string must be released with [`hodp_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hodp_report_render(
    report: *const HodpReport,
    format: HodpFormat,
    out: *mut *mut c_char,
) -> HodpStatus {
    guard(|| {
        if out.is_null() || report.is_null() {
            set_error("null pointer".into());
            return HodpStatus::NullPointer;
        }
        let f = match format {
            HodpFormat::Text => Format::Text { trace: false },
            HodpFormat::TextTrace => Format::Text { trace: true },
            HodpFormat::Json => Format::Json,
        };
        let s = hodp::render_report(&(*report).inner, f);
        *out = CString::new(s).unwrap_or_default().into_raw();
        HodpStatus::Ok
    })
}

/// # Safety
/// `report` must be null or a handle from [`hodp_analyze`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hodp_report_free(report: *mut HodpReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Message of the last failure on this thread, or null. The string must be
/// released with [`hodp_string_free`].
#[no_mangle]
pub extern "C" fn hodp_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map_or(ptr::null_mut(), CString::into_raw))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hodp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
