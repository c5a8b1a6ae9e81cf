//! C ABI over `bfree`.
//!
//! Every function returns a [`BfreeStatus`]; on failure the message is
//! available from [`bfree_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function. Strings
//! returned through `char **` outputs are released with
//! [`bfree_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bfree::density::{log_density_estimate, natural_density_estimate};
use bfree::window::window_measure;
use bfree::{exact_density, BSet, Error, ErrorKind, EtaSegment, FamilySpec, Limits};

/// Status codes. Values 2..=4 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfreeStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Budget = 3,
    Precondition = 4,
    Io = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// A primitive set of moduli.
pub struct BfreeBSet {
    inner: BSet,
}

/// A bit-packed stretch of the B-free indicator.
pub struct BfreeSegment {
    inner: EtaSegment,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> BfreeStatus {
    match e.kind() {
        ErrorKind::Parse => BfreeStatus::Parse,
        ErrorKind::Budget => BfreeStatus::Budget,
        ErrorKind::Precondition => BfreeStatus::Precondition,
        ErrorKind::Io => BfreeStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Utf8,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BfreeStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BfreeStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            BfreeStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_error("string argument is not valid UTF-8");
            BfreeStatus::InvalidUtf8
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            BfreeStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8)
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn bfree_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bfree_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Primitivize `values[0..len]` into a new set.
///
/// # Safety
/// `values` must point to `len` readable integers (may be NULL if `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn bfree_bset_from_values(
    values: *const u64,
    len: usize,
    out: *mut *mut BfreeBSet,
) -> BfreeStatus {
    guard(|| {
        let slice = if len == 0 {
            &[][..]
        } else {
            if values.is_null() {
                return Err(Failure::Null("values"));
            }
            std::slice::from_raw_parts(values, len)
        };
        let inner = BSet::primitivize(slice)?;
        write_out(out, Box::into_raw(Box::new(BfreeBSet { inner })), "out")
    })
}

/// Expand a family spec such as `prime_squares:10000`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfree_bset_from_family(spec: *const c_char, out: *mut *mut BfreeBSet) -> BfreeStatus {
    guard(|| {
        let family = FamilySpec::parse(read_str(spec, "spec")?)?;
        let inner = family.expand()?;
        write_out(out, Box::into_raw(Box::new(BfreeBSet { inner })), "out")
    })
}

/// Number of moduli; 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfree_bset_len(set: *const BfreeBSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// Copy up to `cap` moduli (ascending) into `buf`; returns the total count.
///
/// # Safety
/// `set` must be NULL or a live handle; `buf` must hold `cap` integers.
#[no_mangle]
pub unsafe extern "C" fn bfree_bset_values(set: *const BfreeBSet, buf: *mut u64, cap: usize) -> usize {
    let Some(s) = set.as_ref() else { return 0 };
    let values = s.inner.values();
    if !buf.is_null() {
        let n = values.len().min(cap);
        ptr::copy_nonoverlapping(values.as_ptr(), buf, n);
    }
    values.len()
}

/// # Safety
/// `set` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bfree_bset_free(set: *mut BfreeBSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Exact density of M_B as `"num/den"` (free with `bfree_string_free`)
/// and as a double. Either output may be NULL.
///
/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfree_exact_density(
    set: *const BfreeBSet,
    ratio: *mut *mut c_char,
    value: *mut f64,
) -> BfreeStatus {
    guard(|| {
        let d = exact_density(&borrow(set, "set")?.inner, &Limits::default())?;
        if !value.is_null() {
            value.write(d.to_f64());
        }
        if !ratio.is_null() {
            ratio.write(to_c_string(d.to_ratio_string()));
        }
        Ok(())
    })
}

/// Haar measure of the window on `Z/lcm(B)` as `"num/den"`.
///
/// # Safety
/// `set` must be a live handle; `ratio` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfree_window_measure(set: *const BfreeBSet, ratio: *mut *mut c_char) -> BfreeStatus {
    guard(|| {
        let w = window_measure(&borrow(set, "set")?.inner, &Limits::default())?;
        write_out(ratio, to_c_string(w.to_ratio_string()), "ratio")
    })
}

/// `|M_B ∩ [1, n]| / n`.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfree_natural_density(set: *const BfreeBSet, n: u64, out: *mut f64) -> BfreeStatus {
    guard(|| {
        let e = natural_density_estimate(&borrow(set, "set")?.inner, n)?;
        write_out(out, e.value, "out")
    })
}

/// Logarithmic density estimate at window `n >= 2`.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfree_log_density(set: *const BfreeBSet, n: u64, out: *mut f64) -> BfreeStatus {
    guard(|| {
        let e = log_density_estimate(&borrow(set, "set")?.inner, n)?;
        write_out(out, e.value, "out")
    })
}

/// Sieve the B-free indicator on `[start, start + len)`.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfree_sieve(
    set: *const BfreeBSet,
    start: i64,
    len: u64,
    out: *mut *mut BfreeSegment,
) -> BfreeStatus {
    guard(|| {
        let inner = bfree::sieve_interval(&borrow(set, "set")?.inner, start, len);
        write_out(out, Box::into_raw(Box::new(BfreeSegment { inner })), "out")
    })
}

/// # Safety
/// `seg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfree_segment_len(seg: *const BfreeSegment) -> u64 {
    seg.as_ref().map_or(0, |s| s.inner.len())
}

/// # Safety
/// `seg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfree_segment_start(seg: *const BfreeSegment) -> i64 {
    seg.as_ref().map_or(0, |s| s.inner.start())
}

/// Bit `i` (1 = B-free).
///
/// # Safety
/// `seg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfree_segment_get(seg: *const BfreeSegment, i: u64, out: *mut bool) -> BfreeStatus {
    guard(|| {
        let s = &borrow(seg, "segment")?.inner;
        if i >= s.len() {
            return Err(Error::Precondition(format!("index {i} outside segment of length {}", s.len())).into());
        }
        write_out(out, s.get(i), "out")
    })
}

/// Number of B-free positions.
///
/// # Safety
/// `seg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfree_segment_count_ones(seg: *const BfreeSegment) -> u64 {
    seg.as_ref().map_or(0, |s| s.inner.count_ones())
}

/// Longest run of multiples.
///
/// # Safety
/// `seg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfree_segment_max_zero_run(seg: *const BfreeSegment) -> u64 {
    seg.as_ref().map_or(0, |s| s.inner.max_zero_run())
}

/// Binary dump: `start` (i64 LE), `len` (u64 LE), then bits LSB first.
/// Copies up to `cap` bytes and stores the full size in `needed`.
///
/// # Safety
/// `seg` must be a live handle; `buf` must hold `cap` bytes (or be NULL);
/// `needed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfree_segment_serialize(
    seg: *const BfreeSegment,
    buf: *mut u8,
    cap: usize,
    needed: *mut usize,
) -> BfreeStatus {
    guard(|| {
        let bytes = borrow(seg, "segment")?.inner.to_bytes();
        if !buf.is_null() {
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len().min(cap));
        }
        write_out(needed, bytes.len(), "needed")
    })
}

/// # Safety
/// `seg` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bfree_segment_free(seg: *mut BfreeSegment) {
    if !seg.is_null() {
        drop(Box::from_raw(seg));
    }
}

/// Run a command described by a JSON run config (the `config` object of a
/// CLI JSON report) and return the JSON report.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfree_run_json(config_json: *const c_char, out: *mut *mut c_char) -> BfreeStatus {
    guard(|| {
        let report = bfree::cli::run_json(read_str(config_json, "config_json")?)?;
        write_out(out, to_c_string(report), "out")
    })
}
