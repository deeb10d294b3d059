//! Truncated infinite sums and products.
//!
//! Every infinite expansion in the crate goes through [`SeriesSum`] or
//! [`InfiniteProduct`], so the stopping rule and the divergence detector live
//! in exactly one place. Both also feed a per-thread term counter that the
//! identity harness reads to report how much work a check took.

use std::cell::Cell;

use crate::error::{QError, QResult};
use crate::params::Truncation;

thread_local! {
    static TERMS: Cell<u64> = const { Cell::new(0) };
}

/// Resets this thread's term counter.
pub fn reset_term_counter() {
    TERMS.with(|c| c.set(0));
}

/// Number of series terms and product factors evaluated on this thread since
/// the last [`reset_term_counter`].
pub fn term_counter() -> u64 {
    TERMS.with(|c| c.get())
}

pub(crate) fn note_terms(n: u64) {
    TERMS.with(|c| c.set(c.get() + n));
}

#[inline]
fn bump() {
    TERMS.with(|c| c.set(c.get() + 1));
}

/// Outcome of feeding one term to a running sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Step {
    Continue,
    Done,
}

/// Accumulates a series term by term.
///
/// Stops after `consecutive_small` successive terms with
/// `|term| <= rel_tol * |sum| + abs_tol`. Divergence is reported when a term is
/// not finite, when `max_terms` is exhausted, or when the term magnitudes grow
/// for `consecutive_small` successive steps without the growth ratio slowing
/// down. Convergent series whose terms grow for a while before a decaying
/// ratio takes over (kernels with a large exponent, `e_q` near its radius) are
/// therefore not cut off early.
pub(crate) struct SeriesSum<'a> {
    what: &'static str,
    trunc: &'a Truncation,
    sum: f64,
    terms: usize,
    small_run: usize,
    growth_run: usize,
    prev_abs: f64,
    prev_ratio: f64,
}

impl<'a> SeriesSum<'a> {
    pub(crate) fn new(what: &'static str, trunc: &'a Truncation) -> Self {
        SeriesSum {
            what,
            trunc,
            sum: 0.0,
            terms: 0,
            small_run: 0,
            growth_run: 0,
            prev_abs: 0.0,
            prev_ratio: 0.0,
        }
    }

    pub(crate) fn push(&mut self, term: f64) -> QResult<Step> {
        bump();
        self.terms += 1;
        if !term.is_finite() {
            return Err(self.diverged());
        }
        self.sum += term;
        let mag = term.abs();

        if self.prev_abs > 0.0 && mag > self.prev_abs {
            let ratio = mag / self.prev_abs;
            if self.growth_run > 0 && ratio < self.prev_ratio * (1.0 - 1e-12) {
                self.growth_run = 1;
            } else {
                self.growth_run += 1;
            }
            self.prev_ratio = ratio;
            if self.growth_run >= self.trunc.consecutive_small {
                return Err(self.diverged());
            }
        } else {
            self.growth_run = 0;
            self.prev_ratio = 0.0;
        }
        self.prev_abs = mag;

        if mag <= self.trunc.rel_tol * self.sum.abs() + self.trunc.abs_tol {
            self.small_run += 1;
            if self.small_run >= self.trunc.consecutive_small {
                return Ok(Step::Done);
            }
        } else {
            self.small_run = 0;
        }
        if self.terms >= self.trunc.max_terms {
            return Err(self.diverged());
        }
        Ok(Step::Continue)
    }

    fn diverged(&self) -> QError {
        QError::NonConvergence { what: self.what, terms: self.terms }
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }

    /// Sums `term(0), term(1), ...` until the stopping rule fires.
    pub(crate) fn run(
        what: &'static str,
        trunc: &Truncation,
        mut term: impl FnMut(usize) -> QResult<f64>,
    ) -> QResult<f64> {
        let mut acc = SeriesSum::new(what, trunc);
        let mut i = 0;
        loop {
            if acc.push(term(i)?)? == Step::Done {
                return Ok(acc.value());
            }
            i += 1;
        }
    }
}

/// Accumulates an infinite product factor by factor.
pub(crate) struct InfiniteProduct<'a> {
    what: &'static str,
    trunc: &'a Truncation,
    value: f64,
    factors: usize,
    small_run: usize,
}

impl<'a> InfiniteProduct<'a> {
    pub(crate) fn new(what: &'static str, trunc: &'a Truncation, initial: f64) -> Self {
        InfiniteProduct { what, trunc, value: initial, factors: 0, small_run: 0 }
    }

    pub(crate) fn push(&mut self, factor: f64) -> QResult<Step> {
        bump();
        self.factors += 1;
        if !factor.is_finite() {
            return Err(QError::NonConvergence { what: self.what, terms: self.factors });
        }
        self.value *= factor;
        if self.value == 0.0 {
            return Ok(Step::Done);
        }
        if (factor - 1.0).abs() <= self.trunc.rel_tol {
            self.small_run += 1;
            if self.small_run >= self.trunc.consecutive_small {
                return Ok(Step::Done);
            }
        } else {
            self.small_run = 0;
        }
        if self.factors >= self.trunc.max_terms {
            return Err(QError::NonConvergence { what: self.what, terms: self.factors });
        }
        Ok(Step::Continue)
    }

    pub(crate) fn value(&self) -> f64 {
        self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_converges() {
        let tr = Truncation::default();
        let v = SeriesSum::run("geo", &tr, |i| Ok(0.5f64.powi(i as i32))).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn zero_series_stops_after_consecutive_small() {
        let tr = Truncation::default();
        reset_term_counter();
        let v = SeriesSum::run("zero", &tr, |_| Ok(0.0)).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(term_counter(), tr.consecutive_small as u64);
    }

    #[test]
    fn geometric_growth_is_divergence() {
        let tr = Truncation::default();
        let err = SeriesSum::run("grow", &tr, |i| Ok(2f64.powi(i as i32))).unwrap_err();
        assert_eq!(err, QError::NonConvergence { what: "grow", terms: 4 });
    }

    #[test]
    fn decelerating_growth_is_tolerated() {
        // terms rise for several steps, then the ratio drops below one
        let tr = Truncation::default();
        let x: f64 = 1.9;
        let q: f64 = 0.5;
        let v = SeriesSum::run("eq-like", &tr, |k| {
            let mut t = 1.0;
            for j in 1..=k {
                t *= x * (1.0 - q) / (1.0 - q.powi(j as i32));
            }
            Ok(t)
        });
        assert!(v.is_ok());
    }

    #[test]
    fn max_terms_exhausted() {
        let tr = Truncation { max_terms: 10, ..Default::default() };
        let err = SeriesSum::run("slow", &tr, |i| Ok(1.0 / (i as f64 + 1.0))).unwrap_err();
        assert!(matches!(err, QError::NonConvergence { terms: 10, .. }));
    }

    #[test]
    fn alternating_sporadic_zero_does_not_stop_early() {
        // a single zero term in the middle must not end the sum
        let tr = Truncation::default();
        let v = SeriesSum::run("gap", &tr, |i| {
            Ok(if i == 2 { 0.0 } else { 0.5f64.powi(i as i32) })
        })
        .unwrap();
        assert!((v - (2.0 - 0.25)).abs() < 1e-11);
    }

    #[test]
    fn product_stops_when_factors_approach_one() {
        let tr = Truncation::default();
        let mut p = InfiniteProduct::new("prod", &tr, 1.0);
        let mut i = 0;
        while p.push(1.0 + 0.5f64.powi(i)).unwrap() == Step::Continue {
            i += 1;
        }
        // prod (1 + 2^-i), i >= 0 = 2 * 2.384231029031371...
        assert!((p.value() - 4.768462058062742).abs() < 1e-10);
    }
}
