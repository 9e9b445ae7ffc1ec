//! C interface to the hairpin-completion library.
//!
//! Conventions:
//! - Every function returns an [`HpcStatus`]; out-parameters are written only
//!   when the status is `HPC_STATUS_OK`.
//! - Returned strings are NUL-terminated UTF-8, owned by the caller, and must
//!   be released with [`hpc_string_free`].
//! - Instances are opaque handles released with [`hpc_instance_free`].
//! - On failure a thread-local message is set; fetch it with
//!   [`hpc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::Serialize;

use hpc::decide::{decide, DecideOptions, OrientationFilter};
use hpc::grammar::{build_grammar, export_text};
use hpc::growth::{growth_report, GrowthReport};
use hpc::instance::{parse_instance_str, render_instance};
use hpc::oracle::{membership, oracle_hairpin_set};
use hpc::series::{generating_function_dfa, grammar_generating_function, RationalSeries};
use hpc::HairpinInstance;

/// Opaque handle for a parsed instance.
pub struct HpcInstance {
    inner: HairpinInstance,
    notes: Vec<String>,
}

/// Status code returned by every interface function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpcStatus {
    /// Success; out-parameters are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The instance JSON was rejected; see `hpc_last_error`.
    InvalidInstance = 3,
    /// A word contained tokens outside the instance alphabet.
    InvalidWord = 4,
    /// The request exceeds a built-in size or length guard.
    Unsupported = 5,
    /// Unexpected internal failure.
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap_or_default());
}

fn fail(status: HpcStatus, msg: &str) -> HpcStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> HpcStatus) -> HpcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(HpcStatus::Internal, "internal error: unexpected panic"),
    }
}

/// Reads a borrowed C string, reporting null and encoding failures.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, HpcStatus> {
    if p.is_null() {
        return Err(fail(HpcStatus::NullArgument, &format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(HpcStatus::InvalidUtf8, &format!("{what} is not valid UTF-8")))
}

/// Hands `s` to the caller through `out` as a freshly allocated C string.
unsafe fn write_out(s: String, out: *mut *mut c_char) -> HpcStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            HpcStatus::Ok
        }
        Err(_) => fail(HpcStatus::Internal, "internal error: interior NUL in output"),
    }
}

unsafe fn instance_ref<'a>(inst: *const HpcInstance) -> Result<&'a HpcInstance, HpcStatus> {
    if inst.is_null() {
        Err(fail(HpcStatus::NullArgument, "instance handle is null"))
    } else {
        Ok(&*inst)
    }
}

/// Parses an instance description (the same JSON format the CLI reads) and
/// returns an owned handle through `out`.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` to a writable
/// pointer slot. The returned handle must be released with
/// `hpc_instance_free`.
#[no_mangle]
pub unsafe extern "C" fn hpc_instance_parse_json(
    json: *const c_char,
    out: *mut *mut HpcInstance,
) -> HpcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HpcStatus::NullArgument, "out pointer is null");
        }
        let src = match read_str(json, "instance JSON") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match parse_instance_str(src) {
            Ok(parsed) => {
                let handle = Box::new(HpcInstance { inner: parsed.instance, notes: parsed.notes });
                *out = Box::into_raw(handle);
                HpcStatus::Ok
            }
            Err(e) => fail(HpcStatus::InvalidInstance, &e.to_string()),
        }
    })
}

/// Releases an instance handle. Passing null is a no-op.
///
/// # Safety
/// `inst` must be null or a handle obtained from `hpc_instance_parse_json`
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn hpc_instance_free(inst: *mut HpcInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Writes the canonical JSON rendering of the instance (completed transition
/// tables, sorted alphabet) through `out`.
///
/// # Safety
/// `inst` must be a live handle and `out` a writable pointer slot; the
/// returned string must be released with `hpc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hpc_instance_render_json(
    inst: *const HpcInstance,
    out: *mut *mut c_char,
) -> HpcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HpcStatus::NullArgument, "out pointer is null");
        }
        let h = match instance_ref(inst) {
            Ok(h) => h,
            Err(status) => return status,
        };
        write_out(render_instance(&h.inner), out)
    })
}

/// Writes a JSON array with the normalization notes recorded while parsing
/// (for example completion of partial transition tables).
///
/// # Safety
/// `inst` must be a live handle and `out` a writable pointer slot; the
/// returned string must be released with `hpc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hpc_instance_notes_json(
    inst: *const HpcInstance,
    out: *mut *mut c_char,
) -> HpcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HpcStatus::NullArgument, "out pointer is null");
        }
        let h = match instance_ref(inst) {
            Ok(h) => h,
            Err(status) => return status,
        };
        match serde_json::to_string(&h.notes) {
            Ok(s) => write_out(s, out),
            Err(e) => fail(HpcStatus::Internal, &e.to_string()),
        }
    })
}

/// Runs the regularity decision battery and writes the verdict report as
/// JSON. `fast_path` toggles the precomputed-table route inside the pumping
/// tests; both routes produce identical verdicts.
///
/// # Safety
/// `inst` must be a live handle and `out` a writable pointer slot; the
/// returned string must be released with `hpc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hpc_decide_json(
    inst: *const HpcInstance,
    fast_path: bool,
    out: *mut *mut c_char,
) -> HpcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HpcStatus::NullArgument, "out pointer is null");
        }
        let h = match instance_ref(inst) {
            Ok(h) => h,
            Err(status) => return status,
        };
        let opts = DecideOptions { fast_path, orientation: OrientationFilter::Both };
        let report = decide(&h.inner, &opts).to_report(&h.inner.alphabet);
        match serde_json::to_string(&report) {
            Ok(s) => write_out(s, out),
            Err(e) => fail(HpcStatus::Internal, &e.to_string()),
        }
    })
}

/// Writes the unambiguous linear grammar for the completion as display text.
///
/// # Safety
/// `inst` must be a live handle and `out` a writable pointer slot; the
/// returned string must be released with `hpc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hpc_grammar_text(
    inst: *const HpcInstance,
    out: *mut *mut c_char,
) -> HpcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HpcStatus::NullArgument, "out pointer is null");
        }
        let h = match instance_ref(inst) {
            Ok(h) => h,
            Err(status) => return status,
        };
        match build_grammar(&h.inner) {
            Ok(g) => write_out(export_text(&g, &h.inner.alphabet), out),
            Err(e) => fail(HpcStatus::Unsupported, &e.to_string()),
        }
    })
}

#[derive(Serialize)]
struct SeriesBlock {
    hairpin: Option<RationalSeries>,
    l1: Option<RationalSeries>,
    ov_l2: Option<RationalSeries>,
}

#[derive(Serialize)]
struct GrowthDocument {
    #[serde(flatten)]
    report: GrowthReport,
    series: SeriesBlock,
}

/// Writes the growth report as JSON: growth classes and indicators for the
/// completion and both inputs, bound checks, and the exact generating
/// functions (null where a size guard refuses the computation).
///
/// # Safety
/// `inst` must be a live handle and `out` a writable pointer slot; the
/// returned string must be released with `hpc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hpc_growth_json(
    inst: *const HpcInstance,
    tolerance: f64,
    out: *mut *mut c_char,
) -> HpcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HpcStatus::NullArgument, "out pointer is null");
        }
        let h = match instance_ref(inst) {
            Ok(h) => h,
            Err(status) => return status,
        };
        let d = decide(&h.inner, &DecideOptions::default());
        let report = match growth_report(&h.inner, &d, tolerance) {
            Ok(r) => r,
            Err(e) => return fail(HpcStatus::Unsupported, &e.to_string()),
        };
        let series = SeriesBlock {
            hairpin: build_grammar(&h.inner)
                .ok()
                .and_then(|g| grammar_generating_function(&g).ok()),
            l1: generating_function_dfa(&h.inner.dfa1).ok(),
            ov_l2: generating_function_dfa(&h.inner.dfa2).ok(),
        };
        match serde_json::to_string(&GrowthDocument { report, series }) {
            Ok(s) => write_out(s, out),
            Err(e) => fail(HpcStatus::Internal, &e.to_string()),
        }
    })
}

/// Writes a JSON array with every completion word of length at most
/// `max_len`, rendered in alphabet tokens and sorted by length then
/// lexicographically. Lengths beyond the enumeration cap are refused.
///
/// # Safety
/// `inst` must be a live handle and `out` a writable pointer slot; the
/// returned string must be released with `hpc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hpc_enumerate_json(
    inst: *const HpcInstance,
    max_len: u32,
    out: *mut *mut c_char,
) -> HpcStatus {
    guarded(|| {
        if out.is_null() {
            return fail(HpcStatus::NullArgument, "out pointer is null");
        }
        let h = match instance_ref(inst) {
            Ok(h) => h,
            Err(status) => return status,
        };
        let words = match oracle_hairpin_set(&h.inner, max_len as usize) {
            Ok(w) => w,
            Err(e) => return fail(HpcStatus::Unsupported, &e.to_string()),
        };
        let rendered: Vec<String> = words.iter().map(|w| h.inner.alphabet.render(w)).collect();
        match serde_json::to_string(&rendered) {
            Ok(s) => write_out(s, out),
            Err(e) => fail(HpcStatus::Internal, &e.to_string()),
        }
    })
}

/// Tests whether `word` (alphabet tokens, e.g. "abA") belongs to the
/// completion, writing the answer through `is_member`.
///
/// # Safety
/// `inst` must be a live handle, `word` a NUL-terminated string, and
/// `is_member` a writable bool slot.
#[no_mangle]
pub unsafe extern "C" fn hpc_membership(
    inst: *const HpcInstance,
    word: *const c_char,
    is_member: *mut bool,
) -> HpcStatus {
    guarded(|| {
        if is_member.is_null() {
            return fail(HpcStatus::NullArgument, "is_member pointer is null");
        }
        let h = match instance_ref(inst) {
            Ok(h) => h,
            Err(status) => return status,
        };
        let s = match read_str(word, "word") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let letters = match h.inner.alphabet.parse(s) {
            Ok(w) => w,
            Err(e) => return fail(HpcStatus::InvalidWord, &e.to_string()),
        };
        *is_member = membership(&letters, &h.inner);
        HpcStatus::Ok
    })
}

/// Releases a string returned by this library. Passing null is a no-op.
///
/// # Safety
/// `s` must be null or a string obtained from this library that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn hpc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Writes a copy of the current thread's last error message (empty string if
/// no error has occurred).
///
/// # Safety
/// `out` must be a writable pointer slot; the returned string must be
/// released with `hpc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hpc_last_error(out: *mut *mut c_char) -> HpcStatus {
    guarded(|| {
        if out.is_null() {
            return HpcStatus::NullArgument;
        }
        let msg = LAST_ERROR.with(|e| e.borrow().to_str().unwrap_or_default().to_owned());
        write_out(msg, out)
    })
}
