//! C ABI over `kloostat`.
//!
//! Objects cross the boundary as opaque handles (`KlsContext`, `KlsTable`)
//! created by `*_new`/`*_compute`/`*_read` and released by the matching
//! `*_free`. Every fallible call returns a `KlsStatus`; on failure the
//! message is available from `kls_last_error_message` on the same thread.
//! Results are written through out-pointers, which are left untouched on
//! failure. Panics never unwind into C; they become `KLS_STATUS_PANIC`.
//!
//! Angles are radians with 0 <= alpha < beta <= pi. Residues are plain
//! integers and are reduced modulo p.

#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use kloostat::arith::{is_prime, ContextOptions, PrimeContext};
use kloostat::fft::DftAlgorithm;
use kloostat::io::{read_table, write_table};
use kloostat::kloosterman::{
    angles, kloosterman_table_batch, kloosterman_table_batch_with, kloosterman_table_naive,
    weil_ratio, AngleTable, KloostermanTable,
};
use kloostat::nonlinearity::{nonlinearity, sign_vector, wht};
use kloostat::sato_tate::{
    exp_sum, niederreiter_deviation, sato_tate_measure, window_count, Window,
};
use kloostat::sumset::{sumset_count, ResidueSet};
use kloostat::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlsStatus {
    Ok = 0,
    InvalidArgument = 1,
    NotPrime = 2,
    OutOfRange = 3,
    Format = 4,
    Io = 5,
    /// A computed value violated a proven property.
    Assertion = 6,
    EmptySet = 7,
    NullPointer = 8,
    Panic = 9,
}

/// Algorithm codes for `kls_table_compute`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlsMethod {
    /// Direct O(p^2) sum; rejected above 2^17.
    Naive = 0,
    /// Chirp-z transform, O(p log p).
    Batch = 1,
    /// Generator-reindexed transform, O(p log p).
    Rader = 2,
}

/// The field F_p with its lookup tables.
pub struct KlsContext {
    ctx: PrimeContext,
}

/// K_p(a) and psi_p(a) for a = 1..p-1, with the field they live in.
pub struct KlsTable {
    ctx: PrimeContext,
    table: KloostermanTable,
    angles: AngleTable,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> KlsStatus {
    if e.is_assertion() {
        return KlsStatus::Assertion;
    }
    match e {
        Error::NotPrime(_) | Error::PrimeTooSmall { .. } => KlsStatus::NotPrime,
        Error::PrimeTooLarge { .. }
        | Error::OracleCapExceeded { .. }
        | Error::TransformTooLarge { .. }
        | Error::ZeroResidue { .. }
        | Error::OutOfRange { .. }
        | Error::InvalidWindow { .. }
        | Error::PrincipalCharacter { .. } => KlsStatus::OutOfRange,
        Error::Format(_) | Error::PrimeMismatch { .. } => KlsStatus::Format,
        Error::Io(_) => KlsStatus::Io,
        Error::EmptySet(_)
        | Error::SetContainsZero
        | Error::EmptyWindow { .. }
        | Error::EmptyPoints => KlsStatus::EmptySet,
        _ => KlsStatus::InvalidArgument,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KlsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KlsStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("{what} is null"));
            KlsStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            KlsStatus::Panic
        }
    }
}

fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: callers pass either null or a pointer obtained from this library
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    // SAFETY: non-null and, by contract, valid for writes of T
    unsafe { out.write(value) };
    Ok(())
}

fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, Fail> {
    if path.is_null() {
        return Err(Fail::Null("path"));
    }
    // SAFETY: non-null NUL-terminated string by contract
    let s = unsafe { CStr::from_ptr(path) }
        .to_str()
        .map_err(|_| Error::InvalidArgument("path is not valid UTF-8".into()))?;
    Ok(Path::new(s))
}

fn slice_arg<'a>(data: *const u64, len: usize, what: &'static str) -> Result<&'a [u64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(Fail::Null(what));
    }
    // SAFETY: non-null and valid for `len` reads by contract
    Ok(unsafe { std::slice::from_raw_parts(data, len) })
}

fn reduce_set(p: u64, xs: &[u64]) -> Result<ResidueSet, Error> {
    ResidueSet::new(p, xs.iter().map(|&x| x % p).collect())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kls_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message for the last failed call on this thread; empty if none. Valid
/// until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn kls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// 1 if `m` is prime, else 0.
#[no_mangle]
pub extern "C" fn kls_is_prime(m: u64) -> i32 {
    is_prime(m) as i32
}

/// Creates the field F_p. `with_dlog` nonzero also builds the discrete-log
/// table.
#[no_mangle]
pub extern "C" fn kls_context_new(p: u64, with_dlog: i32, out: *mut *mut KlsContext) -> KlsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let opts = ContextOptions {
            dlog: with_dlog != 0,
            ..ContextOptions::default()
        };
        let ctx = PrimeContext::with_options(p, opts)?;
        write_out(out, Box::into_raw(Box::new(KlsContext { ctx })), "out")
    })
}

/// Releases a context; null is ignored.
#[no_mangle]
pub extern "C" fn kls_context_free(ctx: *mut KlsContext) {
    if !ctx.is_null() {
        // SAFETY: obtained from kls_context_new and not yet freed
        drop(unsafe { Box::from_raw(ctx) });
    }
}

/// The prime of a context, or 0 for null.
#[no_mangle]
pub extern "C" fn kls_context_prime(ctx: *const KlsContext) -> u64 {
    // SAFETY: null or a live handle
    unsafe { ctx.as_ref() }.map_or(0, |c| c.ctx.p())
}

fn finish_table(
    ctx: PrimeContext,
    table: KloostermanTable,
    out: *mut *mut KlsTable,
) -> Result<(), Fail> {
    let angles = angles(&table)?;
    let handle = Box::new(KlsTable { ctx, table, angles });
    write_out(out, Box::into_raw(handle), "out")
}

/// Computes K_p(a) for all a and certifies the Weil bound. `method` is a
/// `KlsMethod` code.
#[no_mangle]
pub extern "C" fn kls_table_compute(
    ctx: *const KlsContext,
    method: u32,
    out: *mut *mut KlsTable,
) -> KlsStatus {
    guard(|| {
        let c = &deref(ctx, "ctx")?.ctx;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let table = match method {
            m if m == KlsMethod::Naive as u32 => kloosterman_table_naive(c, false)?,
            m if m == KlsMethod::Batch as u32 => kloosterman_table_batch(c)?,
            m if m == KlsMethod::Rader as u32 => {
                kloosterman_table_batch_with(c, DftAlgorithm::Rader)?
            }
            m => return Err(Error::InvalidArgument(format!("unknown method code {m}")).into()),
        };
        finish_table(c.clone(), table, out)
    })
}

/// Releases a table; null is ignored.
#[no_mangle]
pub extern "C" fn kls_table_free(table: *mut KlsTable) {
    if !table.is_null() {
        // SAFETY: obtained from this library and not yet freed
        drop(unsafe { Box::from_raw(table) });
    }
}

/// The prime of a table, or 0 for null.
#[no_mangle]
pub extern "C" fn kls_table_prime(table: *const KlsTable) -> u64 {
    // SAFETY: null or a live handle
    unsafe { table.as_ref() }.map_or(0, |t| t.table.p())
}

/// Number of entries, p - 1, or 0 for null.
#[no_mangle]
pub extern "C" fn kls_table_len(table: *const KlsTable) -> usize {
    // SAFETY: null or a live handle
    unsafe { table.as_ref() }.map_or(0, |t| t.table.values().len())
}

/// Borrowed pointer to K_p(1), ..., K_p(p - 1); valid while the table lives.
#[no_mangle]
pub extern "C" fn kls_table_values(table: *const KlsTable) -> *const f64 {
    // SAFETY: null or a live handle
    unsafe { table.as_ref() }.map_or(ptr::null(), |t| t.table.values().as_ptr())
}

/// Borrowed pointer to psi_p(1), ..., psi_p(p - 1); valid while the table lives.
#[no_mangle]
pub extern "C" fn kls_table_angles(table: *const KlsTable) -> *const f64 {
    // SAFETY: null or a live handle
    unsafe { table.as_ref() }.map_or(ptr::null(), |t| t.angles.psi().as_ptr())
}

/// K_p(a) for a in 1..p-1.
#[no_mangle]
pub extern "C" fn kls_table_value(table: *const KlsTable, a: u64, out: *mut f64) -> KlsStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let a = t.ctx.check_unit("a", a)?;
        write_out(out, t.table.value(a), "out")
    })
}

/// Writes the table in KLST format, atomically.
#[no_mangle]
pub extern "C" fn kls_table_write(table: *const KlsTable, path: *const c_char) -> KlsStatus {
    guard(|| {
        let t = deref(table, "table")?;
        write_table(&t.table, path_arg(path)?)?;
        Ok(())
    })
}

/// Reads a KLST file. `expected_p` of 0 accepts any prime.
#[no_mangle]
pub extern "C" fn kls_table_read(
    path: *const c_char,
    expected_p: u64,
    out: *mut *mut KlsTable,
) -> KlsStatus {
    guard(|| {
        let path = path_arg(path)?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let expected = (expected_p != 0).then_some(expected_p);
        let table = read_table(path, expected)?;
        let ctx = PrimeContext::new(table.p())?;
        finish_table(ctx, table, out)
    })
}

/// max_a |K_p(a)| / (2 sqrt p).
#[no_mangle]
pub extern "C" fn kls_weil_ratio(table: *const KlsTable, out: *mut f64) -> KlsStatus {
    guard(|| write_out(out, weil_ratio(&deref(table, "table")?.table), "out"))
}

/// #{a : alpha <= psi_p(a) <= beta}.
#[no_mangle]
pub extern "C" fn kls_window_count(
    table: *const KlsTable,
    alpha: f64,
    beta: f64,
    out: *mut u64,
) -> KlsStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let w = Window::new(alpha, beta)?;
        write_out(out, window_count(&t.angles, &w), "out")
    })
}

/// Sato-Tate measure of [alpha, beta].
#[no_mangle]
pub extern "C" fn kls_sato_tate_measure(alpha: f64, beta: f64, out: *mut f64) -> KlsStatus {
    guard(|| write_out(out, sato_tate_measure(&Window::new(alpha, beta)?), "out"))
}

/// Exact sup over beta of |#{psi <= beta} - p mu(0, beta)|.
#[no_mangle]
pub extern "C" fn kls_niederreiter_deviation(table: *const KlsTable, out: *mut f64) -> KlsStatus {
    guard(|| {
        write_out(
            out,
            niederreiter_deviation(&deref(table, "table")?.angles),
            "out",
        )
    })
}

/// sum over a in the window of e_p(lambda a), as (re, im).
#[no_mangle]
pub extern "C" fn kls_exp_sum(
    table: *const KlsTable,
    lambda: u64,
    alpha: f64,
    beta: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> KlsStatus {
    guard(|| {
        let t = deref(table, "table")?;
        if out_re.is_null() || out_im.is_null() {
            return Err(Fail::Null("out"));
        }
        let z = exp_sum(&t.ctx, &t.angles, lambda, &Window::new(alpha, beta)?)?;
        write_out(out_re, z.re, "out_re")?;
        write_out(out_im, z.im, "out_im")
    })
}

/// Ordered pairs (u, v) in U x V with u + v in the window. Elements are
/// reduced mod p, deduplicated, and must be nonzero.
#[no_mangle]
pub extern "C" fn kls_sumset_count(
    table: *const KlsTable,
    u: *const u64,
    u_len: usize,
    v: *const u64,
    v_len: usize,
    alpha: f64,
    beta: f64,
    out: *mut u64,
) -> KlsStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let p = t.table.p();
        let us = reduce_set(p, slice_arg(u, u_len, "u")?)?;
        let vs = reduce_set(p, slice_arg(v, v_len, "v")?)?;
        let w = Window::new(alpha, beta)?;
        write_out(out, sumset_count(&us, &vs, &t.angles, &w)?, "out")
    })
}

/// Nonlinearity of the sign function on n = floor(log2 p) bits.
#[no_mangle]
pub extern "C" fn kls_nonlinearity(
    table: *const KlsTable,
    out_nl: *mut u64,
    out_n: *mut u32,
) -> KlsStatus {
    guard(|| {
        let t = deref(table, "table")?;
        if out_nl.is_null() || out_n.is_null() {
            return Err(Fail::Null("out"));
        }
        let signs = sign_vector(&t.ctx, &t.table)?;
        let spectrum = wht(&signs);
        write_out(out_nl, nonlinearity(&spectrum), "out_nl")?;
        write_out(out_n, signs.n(), "out_n")
    })
}
