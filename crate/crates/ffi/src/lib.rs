//! C ABI over `qlock`. States and observables are opaque heap handles
//! released with their `_free` function. Every call returns a
//! [`QlockStatus`]; on failure `qlock_last_error_message` describes the
//! error for the calling thread until its next failing call.
//!
//! Matrices cross the boundary as row-major `double` arrays, real and
//! imaginary parts separately.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use qlock::io::{split_additive, state_from_json, state_to_json};
use qlock::linalg::ComplexMatrix;
use qlock::locking::{discord_entropic, mutual_information, observable_locking, purity_locking, LockingMethod};
use qlock::optim::OptimConfig;
use qlock::passive::BipartiteObservable;
use qlock::states::{is_cq, werner, DensityOperator};
use qlock::QlockError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlockStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    /// A quantifier's precondition does not hold (wrong dimensions,
    /// degenerate levels, marginal not maximally mixed).
    Precondition = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlockMethod {
    Theorem3Grid = 0,
    Corollary1ClosedForm = 1,
    BruteforceSu2 = 2,
}

impl From<QlockMethod> for LockingMethod {
    fn from(m: QlockMethod) -> Self {
        match m {
            QlockMethod::Theorem3Grid => LockingMethod::Theorem3Grid,
            QlockMethod::Corollary1ClosedForm => LockingMethod::Corollary1ClosedForm,
            QlockMethod::BruteforceSu2 => LockingMethod::BruteforceSu2,
        }
    }
}

/// Opaque bipartite density operator.
pub struct QlockState(DensityOperator);

/// Opaque additive observable O₁⊗I + I⊗O₂.
pub struct QlockObservable(BipartiteObservable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("NULs removed"));
}

fn status_of(e: &QlockError) -> QlockStatus {
    match e {
        QlockError::Parse(_) => QlockStatus::Parse,
        QlockError::WrongDims { .. }
        | QlockError::DegenerateSpectrum { .. }
        | QlockError::MarginalNotMixed { .. }
        | QlockError::MarginalsNotMixed { .. }
        | QlockError::ChannelMismatch(_) => QlockStatus::Precondition,
        QlockError::NoConvergence { .. } => QlockStatus::Numerical,
        _ => QlockStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), (QlockStatus, String)>) -> QlockStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QlockStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            QlockStatus::Panic
        }
    }
}

fn lib<T>(r: qlock::Result<T>) -> Result<T, (QlockStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (QlockStatus, String) {
    (QlockStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QlockStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (QlockStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn config(seed: u64, grid_points: usize) -> OptimConfig {
    let cfg = OptimConfig::default().with_seed(seed);
    if grid_points > 0 {
        cfg.with_grid_points(grid_points)
    } else {
        cfg
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qlock_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failing call on this thread, or an empty string.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qlock_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a state in the JSON state schema.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_state_from_json(json: *const c_char, out: *mut *mut QlockState) -> QlockStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (QlockStatus::Parse, format!("json is not UTF-8: {e}")))?;
        let rho = lib(state_from_json(text))?;
        write_out(out, Box::into_raw(Box::new(QlockState(rho))))
    })
}

/// Builds a state on C^{d1} ⊗ C^{d2} from row-major parts of length
/// (d1·d2)². `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` if non-null) must point to (d1·d2)² doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_state_from_matrix(
    re: *const f64,
    im: *const f64,
    d1: usize,
    d2: usize,
    out: *mut *mut QlockState,
) -> QlockStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        let d = d1
            .checked_mul(d2)
            .filter(|&d| d > 0 && d <= 64)
            .ok_or_else(|| (QlockStatus::InvalidArgument, format!("unsupported dims {d1}x{d2}")))?;
        let n = d * d;
        let re = std::slice::from_raw_parts(re, n);
        let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, n)) };
        let entries: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(re[k], im.map_or(0.0, |v| v[k])))
            .collect();
        let rho = lib(ComplexMatrix::from_row_major(entries).and_then(|m| DensityOperator::new(m, (d1, d2))))?;
        write_out(out, Box::into_raw(Box::new(QlockState(rho))))
    })
}

/// α|ψ−⟩⟨ψ−| + (1−α)I/4 for α in [0, 1].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_state_werner(alpha: f64, out: *mut *mut QlockState) -> QlockStatus {
    guard(|| {
        let rho = lib(werner(alpha))?;
        write_out(out, Box::into_raw(Box::new(QlockState(rho))))
    })
}

/// # Safety
/// `state` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qlock_state_free(state: *mut QlockState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `d1` and `d2` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_state_dims(state: *const QlockState, d1: *mut usize, d2: *mut usize) -> QlockStatus {
    guard(|| {
        let (a, b) = deref(state, "state")?.0.dims();
        write_out(d1, a)?;
        write_out(d2, b)
    })
}

/// Serializes the state; release the string with [`qlock_string_free`].
///
/// # Safety
/// `state` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_state_to_json(state: *const QlockState, out: *mut *mut c_char) -> QlockStatus {
    guard(|| {
        let text = state_to_json(&deref(state, "state")?.0);
        let c = CString::new(text).expect("JSON has no NUL");
        write_out(out, c.into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qlock_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// diag(0, ε₁) ⊗ I + I ⊗ diag(0, ε₂).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_observable_from_gaps(eps1: f64, eps2: f64, out: *mut *mut QlockObservable) -> QlockStatus {
    guard(|| {
        let b = lib(BipartiteObservable::from_gaps(eps1, eps2))?;
        write_out(out, Box::into_raw(Box::new(QlockObservable(b))))
    })
}

/// Diagonal two-qubit observable with `levels` in computational order
/// |00⟩, |01⟩, |10⟩, |11⟩. Fails unless the levels are additive.
///
/// # Safety
/// `levels` must point to 4 doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_observable_from_levels(levels: *const f64, out: *mut *mut QlockObservable) -> QlockStatus {
    guard(|| {
        if levels.is_null() {
            return Err(null("levels"));
        }
        let levels = std::slice::from_raw_parts(levels, 4);
        let b = lib(split_additive(&ComplexMatrix::from_diag(levels), (2, 2)))?;
        write_out(out, Box::into_raw(Box::new(QlockObservable(b))))
    })
}

/// # Safety
/// `obs` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qlock_observable_free(obs: *mut QlockObservable) {
    if !obs.is_null() {
        drop(Box::from_raw(obs));
    }
}

/// Observable locking of a two-qubit state. `grid_points = 0` keeps the
/// default budget of the chosen method.
///
/// # Safety
/// `state` and `obs` must be live handles; `value` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_observable_locking(
    state: *const QlockState,
    obs: *const QlockObservable,
    method: QlockMethod,
    seed: u64,
    grid_points: usize,
    value: *mut f64,
) -> QlockStatus {
    guard(|| {
        let rho = &deref(state, "state")?.0;
        let bobs = &deref(obs, "observable")?.0;
        let r = lib(observable_locking(rho, bobs, method.into(), &config(seed, grid_points)))?;
        write_out(value, r.value)
    })
}

/// Entropic discord in bits, measuring the first qubit.
///
/// # Safety
/// `state` must be a live handle; `value` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_discord(state: *const QlockState, seed: u64, value: *mut f64) -> QlockStatus {
    guard(|| {
        let d = lib(discord_entropic(&deref(state, "state")?.0, &config(seed, 0)))?;
        write_out(value, d)
    })
}

/// S(ρ₁) + S(ρ₂) − S(ρ) in bits.
///
/// # Safety
/// `state` must be a live handle; `value` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_mutual_information(state: *const QlockState, value: *mut f64) -> QlockStatus {
    guard(|| write_out(value, mutual_information(&deref(state, "state")?.0)))
}

/// Whether the state is classical on its first factor. `tol <= 0` uses the
/// library default.
///
/// # Safety
/// `state` must be a live handle; `result` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_is_cq(state: *const QlockState, tol: f64, result: *mut bool) -> QlockStatus {
    guard(|| {
        let tol = if tol > 0.0 { tol } else { qlock::states::DEFAULT_CQ_TOL };
        write_out(result, is_cq(&deref(state, "state")?.0, tol).is_cq)
    })
}

/// Purity that free classical channels on the first qubit cannot unlock.
/// Requires a maximally mixed first marginal.
///
/// # Safety
/// `state` must be a live handle; `value` writable.
#[no_mangle]
pub unsafe extern "C" fn qlock_purity_locking(state: *const QlockState, seed: u64, value: *mut f64) -> QlockStatus {
    guard(|| {
        let r = lib(purity_locking(&deref(state, "state")?.0, &config(seed, 0)))?;
        write_out(value, r.f_gn.unwrap_or(f64::NAN))
    })
}
