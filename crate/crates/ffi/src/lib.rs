//! C ABI over `qfrac-core`.
//!
//! Conventions:
//!
//! * every function returns a [`QfracStatus`] and writes its result through an
//!   out-pointer; nothing is written on failure,
//! * parameter sets and IVP solutions are opaque handles, created by
//!   `*_new`/`*_solve_*` and released by the matching `*_free`,
//! * after a non-OK status, [`qfrac_last_error_message`] describes the failure
//!   on the calling thread,
//! * panics never cross the boundary; they surface as `QFRAC_STATUS_PANIC`.
//!
//! Integrands are passed as a callback plus an opaque user pointer. The
//! callback is only invoked during the call that received it.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qfrac_core::{
    left_caputo, left_frac_integral, left_riemann_deriv, q_exp_big_e, q_exp_e, q_factorial_power, q_gamma,
    q_mittag_leffler, right_caputo, right_frac_integral, right_riemann_deriv, solve_ivp_closed, solve_ivp_picard,
    FracOrder, IVPSolution, IVProblem, MLParams, QError, QFunction, QParams, QResult, RightOpContext, Truncation,
};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfracStatus {
    Ok = 0,
    InvalidArgument = 1,
    Domain = 2,
    Pole = 3,
    NonConvergence = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque: a value of `q` plus the truncation policy.
pub struct QfracParams(QParams);

/// Opaque: an evaluable solution of a homogeneous Caputo IVP.
pub struct QfracIvpSolution(IVPSolution);

/// `f(x, user)`; must not unwind.
pub type QfracFn = Option<unsafe extern "C" fn(x: f64, user: *mut c_void) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &QError) -> QfracStatus {
    match e {
        QError::InvalidParameter(_) => QfracStatus::InvalidArgument,
        QError::Domain(_) => QfracStatus::Domain,
        QError::Pole(_) => QfracStatus::Pole,
        QError::NonConvergence { .. } => QfracStatus::NonConvergence,
    }
}

enum Failure {
    Q(QError),
    Null(&'static str),
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        Failure::Q(e)
    }
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QfracStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QfracStatus::Ok
        }
        Ok(Err(Failure::Q(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            QfracStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            QfracStatus::Panic
        }
    }
}

unsafe fn params<'a>(p: *const QfracParams) -> Result<&'a QParams, Failure> {
    p.as_ref().map(|h| &h.0).ok_or(Failure::Null("params"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(v);
    Ok(())
}

struct Callback {
    f: unsafe extern "C" fn(f64, *mut c_void) -> f64,
    user: *mut c_void,
}

impl QFunction for Callback {
    fn eval(&self, x: f64) -> QResult<f64> {
        Ok(unsafe { (self.f)(x, self.user) })
    }
}

fn callback(f: QfracFn, user: *mut c_void) -> Result<Callback, Failure> {
    f.map(|f| Callback { f, user }).ok_or(Failure::Null("f"))
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qfrac_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qfrac_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parameters for `0 < q < 1` with the default truncation policy.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_params_new(q: f64, out: *mut *mut QfracParams) -> QfracStatus {
    guard(|| {
        let p = QParams::new(q)?;
        write(out, Box::into_raw(Box::new(QfracParams(p))))
    })
}

/// Parameters with an explicit relative tolerance and term cap.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_params_with_truncation(
    q: f64,
    rel_tol: f64,
    max_terms: usize,
    out: *mut *mut QfracParams,
) -> QfracStatus {
    guard(|| {
        let trunc = Truncation { rel_tol, max_terms, ..Truncation::default() };
        let p = QParams::with_truncation(q, trunc)?;
        write(out, Box::into_raw(Box::new(QfracParams(p))))
    })
}

/// Releases a parameter handle. NULL is ignored.
///
/// # Safety
/// `p` must come from `qfrac_params_new*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qfrac_params_free(p: *mut QfracParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle or NULL; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_params_q(p: *const QfracParams, out: *mut f64) -> QfracStatus {
    guard(|| write(out, params(p)?.q()))
}

/// `Gamma_q(alpha)`.
///
/// # Safety
/// `p` must be a live handle or NULL; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_gamma(p: *const QfracParams, alpha: f64, out: *mut f64) -> QfracStatus {
    guard(|| write(out, q_gamma(alpha, params(p)?)?))
}

/// `(t - s)_q^alpha`.
///
/// # Safety
/// `p` must be a live handle or NULL; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_factorial_power(
    p: *const QfracParams,
    t: f64,
    s: f64,
    alpha: f64,
    out: *mut f64,
) -> QfracStatus {
    guard(|| write(out, q_factorial_power(t, s, alpha, params(p)?)?))
}

/// `e_q(t)`.
///
/// # Safety
/// `p` must be a live handle or NULL; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_exp_e(p: *const QfracParams, t: f64, out: *mut f64) -> QfracStatus {
    guard(|| write(out, q_exp_e(t, params(p)?)?))
}

/// `E_q(t)`, `|t| < 1`.
///
/// # Safety
/// `p` must be a live handle or NULL; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_exp_big_e(p: *const QfracParams, t: f64, out: *mut f64) -> QfracStatus {
    guard(|| write(out, q_exp_big_e(t, params(p)?)?))
}

/// `E_{alpha,beta}(lambda, z - z0)`.
///
/// # Safety
/// `p` must be a live handle or NULL; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_mittag_leffler(
    p: *const QfracParams,
    alpha: f64,
    beta: f64,
    lambda: f64,
    z0: f64,
    z: f64,
    out: *mut f64,
) -> QfracStatus {
    guard(|| {
        let ml = MLParams::new(alpha, beta, lambda, z0)?;
        write(out, q_mittag_leffler(&ml, z, params(p)?)?)
    })
}

/// Which left or right operator a call evaluates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfracOperator {
    Integral = 0,
    Riemann = 1,
    Caputo = 2,
}

/// Left operator with lower limit `a` applied to `f`, evaluated at `t`.
///
/// # Safety
/// `p` must be a live handle or NULL; `out` valid for writes; `f` callable
/// with `user` for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn qfrac_left(
    p: *const QfracParams,
    op: QfracOperator,
    f: QfracFn,
    user: *mut c_void,
    a: f64,
    alpha: f64,
    t: f64,
    out: *mut f64,
) -> QfracStatus {
    guard(|| {
        let p = params(p)?;
        let f = callback(f, user)?;
        let order = FracOrder::new(alpha)?;
        let v = match op {
            QfracOperator::Integral => left_frac_integral(&f, a, &order, t, p)?,
            QfracOperator::Riemann => left_riemann_deriv(&f, a, &order, t, p)?,
            QfracOperator::Caputo => left_caputo(&f, a, &order, t, p)?,
        };
        write(out, v)
    })
}

/// Right operator with upper limit `b` (may be `INFINITY`) applied to `f`.
///
/// # Safety
/// As for [`qfrac_left`].
#[no_mangle]
pub unsafe extern "C" fn qfrac_right(
    p: *const QfracParams,
    op: QfracOperator,
    f: QfracFn,
    user: *mut c_void,
    b: f64,
    alpha: f64,
    t: f64,
    out: *mut f64,
) -> QfracStatus {
    guard(|| {
        let p = params(p)?;
        let f = callback(f, user)?;
        let order = FracOrder::new(alpha)?;
        let ctx = RightOpContext::from_value(b, p)?;
        let v = match op {
            QfracOperator::Integral => right_frac_integral(&f, &ctx, &order, t, p)?,
            QfracOperator::Riemann => right_riemann_deriv(&f, &ctx, &order, t, p)?,
            QfracOperator::Caputo => right_caputo(&f, &ctx, &order, t, p)?,
        };
        write(out, v)
    })
}

/// Solves `C_a^alpha y = lambda y`, `y(a) = a0`. `picard_iterations == 0`
/// selects the closed form; otherwise the Picard iterate of that index.
///
/// # Safety
/// `p` must be a live handle or NULL; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_ivp_solve(
    p: *const QfracParams,
    alpha: f64,
    lambda: f64,
    a: f64,
    a0: f64,
    picard_iterations: u32,
    out: *mut *mut QfracIvpSolution,
) -> QfracStatus {
    guard(|| {
        let p = params(p)?;
        let prob = IVProblem::homogeneous(alpha, lambda, a, a0)?;
        let sol = if picard_iterations == 0 {
            solve_ivp_closed(&prob, p)?
        } else {
            solve_ivp_picard(&prob, picard_iterations, p)?
        };
        write(out, Box::into_raw(Box::new(QfracIvpSolution(sol))))
    })
}

/// `y(t)`. Solutions are immutable and may be shared between threads.
///
/// # Safety
/// `sol` must be a live handle or NULL; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfrac_ivp_evaluate(sol: *const QfracIvpSolution, t: f64, out: *mut f64) -> QfracStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or(Failure::Null("solution"))?;
        write(out, sol.0.evaluate(t)?)
    })
}

/// Releases a solution handle. NULL is ignored.
///
/// # Safety
/// `sol` must come from [`qfrac_ivp_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qfrac_ivp_free(sol: *mut QfracIvpSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}
