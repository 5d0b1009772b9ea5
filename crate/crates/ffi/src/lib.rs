//! C ABI over `surface-mmp`.
//!
//! Documents are opaque handles. Every call returns an [`SmStatus`]; on failure
//! the message is available from [`sm_last_error_message`] on the same thread.
//! Strings handed out by the library must be released with [`sm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use surface_mmp::document::{parse_input, to_canonical_json, InputDocument};
use surface_mmp::report::{dispatch, verify_report, Command};
use surface_mmp::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    /// A required pointer was null.
    NullArgument = 1,
    /// A string argument was not UTF-8.
    InvalidUtf8 = 2,
    /// The document is not well-formed or does not match the schema.
    ParseError = 3,
    /// The document or request is invalid for the operation.
    InputError = 4,
    /// A checked theorem failed on the computed data.
    InvariantViolation = 5,
    /// `sm_verify` found failing checks; details are in the output string.
    VerifyFailed = 6,
    /// Internal panic caught at the boundary.
    Internal = 7,
}

/// Parsed input document.
pub struct SmDocument {
    doc: InputDocument,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SmStatus {
    match e {
        Error::Parse { .. } => SmStatus::ParseError,
        Error::InvariantViolation(_) => SmStatus::InvariantViolation,
        _ => SmStatus::InputError,
    }
}

fn fail(e: Error) -> SmStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

/// Runs `body` with panics turned into [`SmStatus::Internal`].
fn guard(body: impl FnOnce() -> SmStatus) -> SmStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| {
        set_error("internal panic");
        SmStatus::Internal
    })
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, SmStatus> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p).to_str().map(Some).map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        SmStatus::InvalidUtf8
    })
}

/// # Safety
/// `out` is null or writable.
unsafe fn hand_out(out: *mut *mut c_char, text: String) {
    if !out.is_null() {
        *out = CString::new(text.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw);
    }
}

/// Parses a JSON document. On success `*out` receives a handle to free with
/// [`sm_document_free`].
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sm_document_parse(text: *const c_char, out: *mut *mut SmDocument) -> SmStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return SmStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let text = match read_str(text, "text") {
            Ok(Some(t)) => t,
            Ok(None) => {
                set_error("text is null");
                return SmStatus::NullArgument;
            }
            Err(s) => return s,
        };
        match parse_input(text) {
            Ok(doc) => {
                *out = Box::into_raw(Box::new(SmDocument { doc }));
                SmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a document. Null is ignored.
///
/// # Safety
/// `doc` is null or a handle from [`sm_document_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_document_free(doc: *mut SmDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Runs a command by its CLI name (`classify`, `mmp`, `ioa`, ...).
///
/// `arg` is the curve id for `diff` and `ioa`, the point id for `blowup`, and
/// `"qf"` or `"lc"` for `mmp`; pass null otherwise. With `json` nonzero the
/// output is the machine report. `exit_code` (may be null) receives the code
/// the CLI would exit with, e.g. 2 when `validate` finds violations.
///
/// # Safety
/// `doc` is a live handle; `command` and `arg` are null or NUL-terminated;
/// `out` and `exit_code` are null or writable.
#[no_mangle]
pub unsafe extern "C" fn sm_run(
    doc: *const SmDocument,
    command: *const c_char,
    arg: *const c_char,
    json: i32,
    out: *mut *mut c_char,
    exit_code: *mut i32,
) -> SmStatus {
    guard(|| {
        if !out.is_null() {
            *out = ptr::null_mut();
        }
        let Some(doc) = doc.as_ref() else {
            set_error("doc is null");
            return SmStatus::NullArgument;
        };
        let name = match read_str(command, "command") {
            Ok(Some(n)) => n,
            Ok(None) => {
                set_error("command is null");
                return SmStatus::NullArgument;
            }
            Err(s) => return s,
        };
        let arg = match read_str(arg, "arg") {
            Ok(a) => a,
            Err(s) => return s,
        };
        let report = match Command::parse(name, arg).and_then(|c| dispatch(&c, &doc.doc)) {
            Ok(r) => r,
            Err(e) => {
                if !exit_code.is_null() {
                    *exit_code = e.exit_code();
                }
                return fail(e);
            }
        };
        if !exit_code.is_null() {
            *exit_code = report.exit_code;
        }
        let text = if json != 0 {
            serde_json::to_string_pretty(&report.machine).expect("reports serialize") + "\n"
        } else {
            report.human
        };
        hand_out(out, text);
        SmStatus::Ok
    })
}

/// Re-checks a machine report against the document. `*out` receives one line
/// per failed check (empty when everything verifies).
///
/// # Safety
/// `doc` is a live handle; `report` is NUL-terminated; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn sm_verify(doc: *const SmDocument, report: *const c_char, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        if !out.is_null() {
            *out = ptr::null_mut();
        }
        let Some(doc) = doc.as_ref() else {
            set_error("doc is null");
            return SmStatus::NullArgument;
        };
        let text = match read_str(report, "report") {
            Ok(Some(t)) => t,
            Ok(None) => {
                set_error("report is null");
                return SmStatus::NullArgument;
            }
            Err(s) => return s,
        };
        let value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                return fail(Error::Parse {
                    path: "report".into(),
                    message: e.to_string(),
                })
            }
        };
        match verify_report(&doc.doc, &value) {
            Ok(failures) => {
                let ok = failures.is_empty();
                hand_out(out, failures.iter().map(|f| format!("{f}\n")).collect());
                if ok {
                    SmStatus::Ok
                } else {
                    set_error(format!("{} check(s) failed", failures.len()));
                    SmStatus::VerifyFailed
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Canonical JSON form of the document.
///
/// # Safety
/// `doc` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sm_document_canonical(doc: *const SmDocument, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let Some(doc) = doc.as_ref() else {
            set_error("doc is null");
            return SmStatus::NullArgument;
        };
        if out.is_null() {
            set_error("out is null");
            return SmStatus::NullArgument;
        }
        hand_out(out, to_canonical_json(&doc.doc));
        SmStatus::Ok
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
