//! C ABI over `flagqec`.
//!
//! Every call returns a [`FlagqecStatus`]; results go through out-pointers.
//! Protocols are opaque handles created by [`flagqec_protocol_new`] and
//! released with [`flagqec_protocol_free`].

use std::ffi::{c_char, CStr};
use std::ptr;

use flagqec::protocol::{Protocol, ProtocolName};
use flagqec::synthesis::certify_protocol;
use flagqec::threshold::{pseudothreshold, run_sweep, run_trial, SweepPoint};
use flagqec::Error;

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagqecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnknownProtocol = 3,
    UnknownBranch = 4,
    InvalidArgument = 5,
    NoBracket = 6,
    Internal = 7,
}

impl From<&Error> for FlagqecStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::UnknownProtocol(_) => FlagqecStatus::UnknownProtocol,
            Error::UnknownBranch(_) => FlagqecStatus::UnknownBranch,
            Error::NoBracket => FlagqecStatus::NoBracket,
            Error::ErrorRateOutOfRange(_) | Error::InvalidInput(_) => FlagqecStatus::InvalidArgument,
            _ => FlagqecStatus::Internal,
        }
    }
}

/// Opaque protocol handle.
pub struct FlagqecProtocol {
    inner: Protocol,
}

/// One Monte Carlo grid point, as written to the sweep CSV.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FlagqecSweepPoint {
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub p_l: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl From<&SweepPoint> for FlagqecSweepPoint {
    fn from(s: &SweepPoint) -> Self {
        FlagqecSweepPoint { p: s.p, trials: s.trials, failures: s.failures, p_l: s.p_l, ci_low: s.ci_low, ci_high: s.ci_high }
    }
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn flagqec_status_message(status: FlagqecStatus) -> *const c_char {
    let s: &'static CStr = match status {
        FlagqecStatus::Ok => c"ok",
        FlagqecStatus::NullPointer => c"null pointer argument",
        FlagqecStatus::InvalidUtf8 => c"string argument is not valid utf-8",
        FlagqecStatus::UnknownProtocol => c"unknown protocol name",
        FlagqecStatus::UnknownBranch => c"unknown branch name",
        FlagqecStatus::InvalidArgument => c"invalid argument",
        FlagqecStatus::NoBracket => c"no bracketing pair of points around p_L = p",
        FlagqecStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FlagqecStatus> {
    if s.is_null() {
        return Err(FlagqecStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| FlagqecStatus::InvalidUtf8)
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return FlagqecStatus::from(s),
        }
    };
}

impl From<Error> for FlagqecStatus {
    fn from(e: Error) -> Self {
        FlagqecStatus::from(&e)
    }
}

/// Builds a shipped protocol and its lookup tables.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn flagqec_protocol_new(name: *const c_char, out: *mut *mut FlagqecProtocol) -> FlagqecStatus {
    if out.is_null() {
        return FlagqecStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let name = match read_str(name) {
        Ok(s) => s,
        Err(s) => return s,
    };
    let name: ProtocolName = try_status!(name.parse());
    let inner = try_status!(Protocol::shipped(name));
    *out = Box::into_raw(Box::new(FlagqecProtocol { inner }));
    FlagqecStatus::Ok
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must come from [`flagqec_protocol_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn flagqec_protocol_free(p: *mut FlagqecProtocol) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn handle<'a>(p: *const FlagqecProtocol) -> Result<&'a Protocol, FlagqecStatus> {
    p.as_ref().map(|h| &h.inner).ok_or(FlagqecStatus::NullPointer)
}

/// Number of physical data qubits of the protocol's code.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn flagqec_protocol_num_qubits(p: *const FlagqecProtocol, out: *mut u32) -> FlagqecStatus {
    let proto = match handle(p) {
        Ok(h) => h,
        Err(s) => return s,
    };
    if out.is_null() {
        return FlagqecStatus::NullPointer;
    }
    *out = proto.code().n() as u32;
    FlagqecStatus::Ok
}

/// Replays every single fault and reports the scenario and violation counts.
///
/// # Safety
/// `p` must be a live handle; both out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn flagqec_protocol_verify(
    p: *const FlagqecProtocol,
    scenarios: *mut u64,
    violations: *mut u64,
) -> FlagqecStatus {
    let proto = match handle(p) {
        Ok(h) => h,
        Err(s) => return s,
    };
    if scenarios.is_null() || violations.is_null() {
        return FlagqecStatus::NullPointer;
    }
    let report = certify_protocol(proto);
    *scenarios = report.scenarios as u64;
    *violations = report.violations.len() as u64;
    FlagqecStatus::Ok
}

/// Worst-case two-qubit gate total on routes ending in `branch`.
///
/// # Safety
/// `p` must be a live handle, `branch` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn flagqec_protocol_gate_count(
    p: *const FlagqecProtocol,
    branch: *const c_char,
    out: *mut u64,
) -> FlagqecStatus {
    let proto = match handle(p) {
        Ok(h) => h,
        Err(s) => return s,
    };
    let branch = match read_str(branch) {
        Ok(b) => b,
        Err(s) => return s,
    };
    if out.is_null() {
        return FlagqecStatus::NullPointer;
    }
    *out = try_status!(proto.tree().branch_gate_count(branch)) as u64;
    FlagqecStatus::Ok
}

/// One noisy trial. `failed` is set to 1 on a logical error, else 0.
///
/// # Safety
/// `p` must be a live handle and `failed` writable.
#[no_mangle]
pub unsafe extern "C" fn flagqec_run_trial(
    p: *const FlagqecProtocol,
    phys: f64,
    trial: u64,
    seed: u64,
    failed: *mut u8,
) -> FlagqecStatus {
    let proto = match handle(p) {
        Ok(h) => h,
        Err(s) => return s,
    };
    if failed.is_null() {
        return FlagqecStatus::NullPointer;
    }
    *failed = try_status!(run_trial(proto, phys, trial, seed)) as u8;
    FlagqecStatus::Ok
}

/// Runs `trials` trials at each of the `len` rates in `ps`, writing one
/// point per rate into `out`.
///
/// # Safety
/// `ps` and `out` must each hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn flagqec_sweep(
    p: *const FlagqecProtocol,
    ps: *const f64,
    len: usize,
    trials: u64,
    seed: u64,
    workers: u32,
    out: *mut FlagqecSweepPoint,
) -> FlagqecStatus {
    let proto = match handle(p) {
        Ok(h) => h,
        Err(s) => return s,
    };
    if ps.is_null() || out.is_null() {
        return FlagqecStatus::NullPointer;
    }
    let grid = std::slice::from_raw_parts(ps, len);
    let points = try_status!(run_sweep(proto, grid, |_| trials, seed, workers as usize));
    let dst = std::slice::from_raw_parts_mut(out, len);
    for (d, s) in dst.iter_mut().zip(&points) {
        *d = s.into();
    }
    FlagqecStatus::Ok
}

/// Crossing of `p_L` with `p` over `len` sweep points.
///
/// # Safety
/// `points` must hold `len` elements and `p_star` be writable.
#[no_mangle]
pub unsafe extern "C" fn flagqec_pseudothreshold(
    points: *const FlagqecSweepPoint,
    len: usize,
    p_star: *mut f64,
) -> FlagqecStatus {
    if points.is_null() || p_star.is_null() {
        return FlagqecStatus::NullPointer;
    }
    let pts: Vec<SweepPoint> =
        std::slice::from_raw_parts(points, len).iter().map(|q| SweepPoint::new(q.p, q.trials, q.failures)).collect();
    *p_star = try_status!(pseudothreshold(&pts)).p_star;
    FlagqecStatus::Ok
}
