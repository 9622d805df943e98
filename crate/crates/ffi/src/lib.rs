//! C ABI surface for the toolkit.
//!
//! Conventions:
//! - objects cross the boundary as opaque handles (`FtccCode`,
//!   `FtccCircuit`) owned by Rust; free them with the matching
//!   `*_free` function;
//! - fallible calls return an `int32_t` status (`FTCC_OK` = 0); the last
//!   error message is readable through [`ftcc_last_error`];
//! - strings returned through `char**` are NUL-terminated, UTF-8 and must
//!   be released with [`ftcc_string_free`].
//!
//! The generated header lives at `include/ftcc.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ftcc::circuit::Circuit;
use ftcc::code::{BaseCode, CodeFile, StabilizerCode, TypeFilter, DEFAULT_ENUM_BUDGET};
use ftcc::concat::{assemble_gate_plan, lift_gadget, ConcatCode, ConcatSpec};
use ftcc::error::FtccError;
use ftcc::ft::witness::effective_distance;
use ftcc::ft::{LookupTables, VerifyContext};
use ftcc::report::{catalog, claimed_distance, gate_kind, run_table1};

/// Success.
pub const FTCC_OK: i32 = 0;
/// The requested verification ran and the claim failed.
pub const FTCC_FAIL: i32 = 1;
/// Malformed arguments (unknown names, bad UTF-8, null pointers).
pub const FTCC_ERR_USAGE: i32 = 2;
/// An enumeration or memory budget was exceeded.
pub const FTCC_ERR_BUDGET: i32 = 3;
/// Internal error; details via `ftcc_last_error`.
pub const FTCC_ERR_INTERNAL: i32 = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &FtccError) -> i32 {
    match err {
        FtccError::BudgetExceeded(_) | FtccError::SvBudget { .. } => FTCC_ERR_BUDGET,
        FtccError::Usage(_)
        | FtccError::UnknownCode(_)
        | FtccError::PauliParse { .. }
        | FtccError::Inapplicable { .. } => FTCC_ERR_USAGE,
        _ => FTCC_ERR_INTERNAL,
    }
}

/// Opaque stabilizer-code handle.
pub struct FtccCode {
    inner: StabilizerCode,
    spec: Option<ConcatSpec>,
}

/// Opaque circuit handle.
pub struct FtccCircuit {
    inner: Circuit,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(FTCC_ERR_USAGE);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        FTCC_ERR_USAGE
    })
}

fn guard<T>(f: impl FnOnce() -> T) -> Option<T> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => Some(v),
        Err(_) => {
            set_error("internal panic");
            None
        }
    }
}

fn out_string(out: *mut *mut c_char, s: String) -> i32 {
    if out.is_null() {
        set_error("null output pointer");
        return FTCC_ERR_USAGE;
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            FTCC_OK
        }
        Err(_) => {
            set_error("string contains interior NUL");
            FTCC_ERR_INTERNAL
        }
    }
}

fn load(name: &str) -> Result<FtccCode, FtccError> {
    if let Ok(base) = BaseCode::parse(name) {
        return Ok(FtccCode { inner: StabilizerCode::base(base), spec: None });
    }
    let spec = ConcatSpec::parse_name(name)?;
    let cc = ConcatCode::build(&spec)?;
    Ok(FtccCode { inner: cc.code, spec: Some(spec) })
}

/// Toolkit version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ftcc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Last error message for this thread (valid until the next failing call).
#[no_mangle]
pub extern "C" fn ftcc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned through a `char**` out-parameter.
///
/// # Safety
/// `s` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn ftcc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a base code (`five_qubit`, `steane`, `rm15`) or a named
/// concatenated code (`hcc-steane-1`, ...). Returns NULL on error.
///
/// # Safety
/// `name` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ftcc_code_load(name: *const c_char) -> *mut FtccCode {
    let Ok(name) = read_str(name) else { return std::ptr::null_mut() };
    match guard(|| load(name)) {
        Some(Ok(code)) => Box::into_raw(Box::new(code)),
        Some(Err(e)) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
        None => std::ptr::null_mut(),
    }
}

/// # Safety
/// `code` must come from [`ftcc_code_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ftcc_code_free(code: *mut FtccCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Physical qubit count, or -1 on null.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ftcc_code_qubits(code: *const FtccCode) -> i32 {
    if code.is_null() {
        return -1;
    }
    (*code).inner.n as i32
}

/// Stabilizer generator count, or -1 on null.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ftcc_code_generators(code: *const FtccCode) -> i32 {
    if code.is_null() {
        return -1;
    }
    (*code).inner.generators.len() as i32
}

/// Number of structural violations (0 = well formed), or -1 on null.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ftcc_code_validate(code: *const FtccCode) -> i32 {
    if code.is_null() {
        return -1;
    }
    guard(|| (*code).inner.validate().len() as i32).unwrap_or(-1)
}

/// Brute-force minimum logical weight up to `w_max`; writes -1 to `out`
/// when no nontrivial logical exists at or below the cap.
///
/// # Safety
/// `code` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftcc_code_min_logical_weight(
    code: *const FtccCode,
    w_max: u32,
    out: *mut i32,
) -> i32 {
    if code.is_null() || out.is_null() {
        set_error("null argument");
        return FTCC_ERR_USAGE;
    }
    match guard(|| {
        (*code)
            .inner
            .min_logical_weight(w_max as usize, TypeFilter::Any, DEFAULT_ENUM_BUDGET)
    }) {
        Some(Ok(found)) => {
            *out = found.map(|w| w as i32).unwrap_or(-1);
            FTCC_OK
        }
        Some(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        None => FTCC_ERR_INTERNAL,
    }
}

/// Serializes the code to its JSON file format.
///
/// # Safety
/// `code` must be a live handle; `out` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn ftcc_code_json(code: *const FtccCode, out: *mut *mut c_char) -> i32 {
    if code.is_null() {
        set_error("null code handle");
        return FTCC_ERR_USAGE;
    }
    match guard(|| serde_json::to_string_pretty(&CodeFile::from_code(&(*code).inner))) {
        Some(Ok(s)) => out_string(out, s),
        Some(Err(e)) => {
            set_error(&e.to_string());
            FTCC_ERR_INTERNAL
        }
        None => FTCC_ERR_INTERNAL,
    }
}

/// Builds the lifted fault-tolerant gadget for `gate` on the named
/// concatenated code. Returns NULL on error.
///
/// # Safety
/// `spec` and `gate` must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn ftcc_gadget_lifted(
    spec: *const c_char,
    gate: *const c_char,
) -> *mut FtccCircuit {
    let (Ok(spec), Ok(gate)) = (read_str(spec), read_str(gate)) else {
        return std::ptr::null_mut();
    };
    match guard(|| -> Result<Circuit, FtccError> {
        let spec = ConcatSpec::parse_name(spec)?;
        let kind = gate_kind(gate)?;
        let plan = assemble_gate_plan(&spec, &kind)?;
        Ok(lift_gadget(&spec, &plan)?.circuit)
    }) {
        Some(Ok(c)) => Box::into_raw(Box::new(FtccCircuit { inner: c })),
        Some(Err(e)) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
        None => std::ptr::null_mut(),
    }
}

/// # Safety
/// `c` must come from a gadget builder and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ftcc_circuit_free(c: *mut FtccCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Gate count (markers included), or -1 on null.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ftcc_circuit_gates(c: *const FtccCircuit) -> i32 {
    if c.is_null() {
        return -1;
    }
    (*c).inner.len() as i32
}

/// Serializes the circuit to the line-per-gate text format.
///
/// # Safety
/// `c` must be a live handle; `out` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn ftcc_circuit_text(c: *const FtccCircuit, out: *mut *mut c_char) -> i32 {
    if c.is_null() {
        set_error("null circuit handle");
        return FTCC_ERR_USAGE;
    }
    out_string(out, (*c).inner.to_text())
}

/// Runs the effective-distance check for one (code, gate) cell.
/// `claimed` = 0 uses the published value. Writes 1 to `out_pass` on PASS.
/// Returns FTCC_OK when the check ran (whatever the verdict).
///
/// # Safety
/// `spec` and `gate` must be valid NUL-terminated strings; `out_pass`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ftcc_effective_distance(
    spec: *const c_char,
    gate: *const c_char,
    claimed: u32,
    seed: u64,
    samples: u64,
    out_pass: *mut i32,
) -> i32 {
    let (Ok(spec_name), Ok(gate)) = (read_str(spec), read_str(gate)) else {
        return FTCC_ERR_USAGE;
    };
    if out_pass.is_null() {
        set_error("null output pointer");
        return FTCC_ERR_USAGE;
    }
    match guard(|| -> Result<bool, FtccError> {
        let spec = ConcatSpec::parse_name(spec_name)?;
        let claimed = if claimed == 0 {
            claimed_distance(&spec.name, gate).ok_or_else(|| FtccError::Inapplicable {
                gate: gate.into(),
                code: spec.name.clone(),
                reason: "cell is marked inapplicable".into(),
            })?
        } else {
            claimed as usize
        };
        let kind = gate_kind(gate)?;
        let plan = assemble_gate_plan(&spec, &kind)?;
        let lifted = lift_gadget(&spec, &plan)?;
        let ctx = VerifyContext::from_composite(&lifted.composite);
        let tables = LookupTables::new();
        let r = effective_distance(&ctx, &lifted.circuit, &tables, claimed, seed, samples)?;
        Ok(r.pass)
    }) {
        Some(Ok(pass)) => {
            *out_pass = i32::from(pass);
            FTCC_OK
        }
        Some(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        None => FTCC_ERR_INTERNAL,
    }
}

/// Emits the code catalog as JSON.
///
/// # Safety
/// `out` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn ftcc_catalog_json(out: *mut *mut c_char) -> i32 {
    match guard(|| -> Result<String, FtccError> {
        Ok(serde_json::to_string_pretty(&catalog()?)?)
    }) {
        Some(Ok(s)) => out_string(out, s),
        Some(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        None => FTCC_ERR_INTERNAL,
    }
}

/// Runs the full effective-distance table; writes the JSON report and
/// returns FTCC_OK / FTCC_FAIL for all-pass / any-fail.
///
/// # Safety
/// `out` receives an owned string.
#[no_mangle]
pub unsafe extern "C" fn ftcc_table1_json(seed: u64, samples: u64, out: *mut *mut c_char) -> i32 {
    match guard(|| -> Result<(String, bool), FtccError> {
        let report = run_table1(seed, samples)?;
        Ok((serde_json::to_string_pretty(&report)?, report.all_pass))
    }) {
        Some(Ok((s, pass))) => {
            let rc = out_string(out, s);
            if rc != FTCC_OK {
                return rc;
            }
            if pass {
                FTCC_OK
            } else {
                FTCC_FAIL
            }
        }
        Some(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        None => FTCC_ERR_INTERNAL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_query_free_roundtrip() {
        let name = CString::new("hcc-steane-1").unwrap();
        let code = unsafe { ftcc_code_load(name.as_ptr()) };
        assert!(!code.is_null());
        unsafe {
            assert_eq!(ftcc_code_qubits(code), 25);
            assert_eq!(ftcc_code_generators(code), 24);
            assert_eq!(ftcc_code_validate(code), 0);
            let mut json: *mut c_char = std::ptr::null_mut();
            assert_eq!(ftcc_code_json(code, &mut json), FTCC_OK);
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"n\": 25"));
            ftcc_string_free(json);
            ftcc_code_free(code);
        }
    }

    #[test]
    fn unknown_name_sets_error() {
        let name = CString::new("no-such-code").unwrap();
        let code = unsafe { ftcc_code_load(name.as_ptr()) };
        assert!(code.is_null());
        let msg = unsafe { CStr::from_ptr(ftcc_last_error()) }.to_str().unwrap();
        assert!(!msg.is_empty());
    }

    #[test]
    fn min_logical_weight_via_abi() {
        let name = CString::new("five_qubit").unwrap();
        let code = unsafe { ftcc_code_load(name.as_ptr()) };
        let mut out = 0i32;
        let rc = unsafe { ftcc_code_min_logical_weight(code, 3, &mut out) };
        assert_eq!(rc, FTCC_OK);
        assert_eq!(out, 3);
        unsafe { ftcc_code_free(code) };
    }

    #[test]
    fn lifted_gadget_text() {
        let spec = CString::new("enucc-steane-1").unwrap();
        let gate = CString::new("T").unwrap();
        let c = unsafe { ftcc_gadget_lifted(spec.as_ptr(), gate.as_ptr()) };
        assert!(!c.is_null());
        unsafe {
            assert!(ftcc_circuit_gates(c) > 50);
            let mut text: *mut c_char = std::ptr::null_mut();
            assert_eq!(ftcc_circuit_text(c, &mut text), FTCC_OK);
            let s = CStr::from_ptr(text).to_str().unwrap();
            assert!(s.contains("CNOT"));
            assert!(s.contains("EC "));
            ftcc_string_free(text);
            ftcc_circuit_free(c);
        }
    }

    #[test]
    fn effective_distance_via_abi() {
        let spec = CString::new("hcc-steane-1").unwrap();
        let gate = CString::new("T").unwrap();
        let mut pass = 0i32;
        let rc = unsafe {
            ftcc_effective_distance(spec.as_ptr(), gate.as_ptr(), 0, 7, 1000, &mut pass)
        };
        assert_eq!(rc, FTCC_OK);
        assert_eq!(pass, 1);
    }

    #[test]
    fn inapplicable_cell_reports_usage() {
        let spec = CString::new("hcc-five_qubit-1").unwrap();
        let gate = CString::new("H").unwrap();
        let mut pass = 0i32;
        let rc = unsafe {
            ftcc_effective_distance(spec.as_ptr(), gate.as_ptr(), 0, 7, 10, &mut pass)
        };
        assert_eq!(rc, FTCC_ERR_USAGE);
    }
}
