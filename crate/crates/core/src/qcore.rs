//! Basic nabla q-calculus on `T_q`: the q-bracket, the nabla q-derivative and
//! the Jackson integrals over `[a, t]` and `[t, b]`.

use crate::error::{QError, QResult};
use crate::grid::lattice_steps;
use crate::params::QParams;
use crate::series::{note_terms, SeriesSum};

/// A real function of one variable, evaluable on `[0, inf)`.
///
/// Plain closures `Fn(f64) -> f64` implement this directly; wrap a closure
/// returning [`QResult`] in [`Fallible`] when evaluation itself can fail (for
/// instance when the function is another operator's output).
pub trait QFunction {
    fn eval(&self, x: f64) -> QResult<f64>;
}

impl<F: Fn(f64) -> f64> QFunction for F {
    #[inline]
    fn eval(&self, x: f64) -> QResult<f64> {
        Ok(self(x))
    }
}

/// Adapter for closures whose evaluation can fail.
#[derive(Clone, Copy)]
pub struct Fallible<F>(pub F);

impl<F: Fn(f64) -> QResult<f64>> QFunction for Fallible<F> {
    #[inline]
    fn eval(&self, x: f64) -> QResult<f64> {
        (self.0)(x)
    }
}

/// Upper limit of a tail integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Infinite,
}

/// `[r]_q = (1 - q^r) / (1 - q)`.
pub fn q_bracket(r: f64, p: &QParams) -> f64 {
    (1.0 - p.pow(r)) / (1.0 - p.q())
}

/// `(f(t) - f(qt)) / ((1 - q) t)`, defined for `t > 0`.
pub fn nabla_q<F: QFunction + ?Sized>(f: &F, t: f64, p: &QParams) -> QResult<f64> {
    nabla_q_n(f, 1, t, p)
}

/// The nabla q-derivative applied `n` times, by repeated differencing of the
/// samples `f(t), f(qt), ..., f(q^n t)`.
pub fn nabla_q_n<F: QFunction + ?Sized>(f: &F, n: u32, t: f64, p: &QParams) -> QResult<f64> {
    if n == 0 {
        return f.eval(t);
    }
    if !(t > 0.0) {
        return Err(QError::domain(format!("nabla q-derivative needs t > 0, got {t}")));
    }
    let q = p.q();
    let n = n as usize;
    let mut pts = Vec::with_capacity(n + 1);
    let mut vals = Vec::with_capacity(n + 1);
    let mut x = t;
    for _ in 0..=n {
        pts.push(x);
        vals.push(f.eval(x)?);
        x *= q;
    }
    for level in 1..=n {
        for k in 0..=(n - level) {
            vals[k] = (vals[k] - vals[k + 1]) / ((1.0 - q) * pts[k]);
        }
    }
    Ok(vals[0])
}

/// `int_0^x f(s) nabla s = (1 - q) x sum_{i>=0} q^i f(x q^i)`.
fn jackson_from_zero<F: QFunction + ?Sized>(f: &F, x: f64, p: &QParams) -> QResult<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    if !(x > 0.0) {
        return Err(QError::domain(format!("Jackson integral endpoint must be >= 0, got {x}")));
    }
    let q = p.q();
    let mut weight = 1.0;
    let mut s = x;
    let sum = SeriesSum::run("Jackson integral", p.trunc(), |_| {
        let term = weight * f.eval(s)?;
        weight *= q;
        s *= q;
        Ok(term)
    })?;
    Ok((1.0 - q) * x * sum)
}

/// `(1 - q) sum_{i=0}^{m-1} upper q^i f(upper q^i)`: the integral over
/// `(upper q^m, upper]` when both ends share a lattice.
fn jackson_finite<F: QFunction + ?Sized>(f: &F, upper: f64, m: usize, p: &QParams) -> QResult<f64> {
    let q = p.q();
    let mut acc = 0.0;
    let mut s = upper;
    for _ in 0..m {
        acc += s * f.eval(s)?;
        s *= q;
    }
    note_terms(m as u64);
    Ok((1.0 - q) * acc)
}

/// The nabla q-integral `int_a^t f(s) nabla s` for real `a, t >= 0`.
///
/// Defined as `int_0^t - int_0^a`. When `a` and `t` lie on a common
/// `q`-lattice the shared tail cancels and the result is the finite sum over
/// `(a, t]`. The integral is signed: `a > t` gives minus the reversed integral.
pub fn q_integral<F: QFunction + ?Sized>(f: &F, a: f64, t: f64, p: &QParams) -> QResult<f64> {
    if a < 0.0 || t < 0.0 || a.is_nan() || t.is_nan() {
        return Err(QError::domain(format!("integration limits must be >= 0, got a={a}, t={t}")));
    }
    if a == t {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < t { (a, t, 1.0) } else { (t, a, -1.0) };
    if let Some(m) = lattice_steps(hi, lo, p) {
        return Ok(sign * jackson_finite(f, hi, m, p)?);
    }
    Ok(jackson_from_zero(f, t, p)? - jackson_from_zero(f, a, p)?)
}

/// The tail integral `int_t^b f(s) nabla s` for `t > 0`.
///
/// With `b = inf` this is `(1 - q) t sum_{i>=1} q^{-i} f(t q^{-i})`; divergence
/// is detected at runtime. With finite `b >= t` the integral sums the lattice
/// points `t q^{-i}` lying in `(t, b]`, which for `b = t q^{-m}` is exactly
/// `int_t^inf - int_b^inf`.
pub fn q_integral_tail<F: QFunction + ?Sized>(f: &F, t: f64, b: Bound, p: &QParams) -> QResult<f64> {
    if !(t > 0.0) {
        return Err(QError::domain(format!("tail integral needs t > 0, got {t}")));
    }
    let q = p.q();
    match b {
        Bound::Infinite => {
            let mut s = t;
            let sum = SeriesSum::run("tail integral", p.trunc(), |_| {
                s /= q;
                Ok(s * f.eval(s)?)
            })?;
            Ok((1.0 - q) * sum)
        }
        Bound::Finite(b) => {
            if b.is_nan() || b < t {
                return Err(QError::domain(format!("tail integral needs b >= t, got t={t}, b={b}")));
            }
            let m = match lattice_steps(b, t, p) {
                Some(m) => m,
                None => ((t / b).ln() / q.ln()).floor().max(0.0) as usize,
            };
            let mut acc = 0.0;
            let mut s = t;
            for _ in 0..m {
                s /= q;
                acc += s * f.eval(s)?;
            }
            note_terms(m as u64);
            Ok((1.0 - q) * acc)
        }
    }
}
