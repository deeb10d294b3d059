use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};

/// Truncation policy shared by every infinite sum and product in the crate.
///
/// A sum stops once `consecutive_small` successive terms satisfy
/// `|term| <= rel_tol * |partial_sum| + abs_tol`; a product stops once the same
/// number of successive factors satisfy `|factor - 1| <= rel_tol`. Reaching
/// `max_terms` first is reported as [`QError::NonConvergence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
    pub consecutive_small: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_terms: 10_000,
            consecutive_small: 3,
        }
    }
}

impl Truncation {
    pub fn validate(&self) -> QResult<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QError::InvalidParameter(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(QError::InvalidParameter(format!(
                "abs_tol must be non-negative, got {}",
                self.abs_tol
            )));
        }
        if self.max_terms < 1 {
            return Err(QError::InvalidParameter("max_terms must be at least 1".into()));
        }
        if self.consecutive_small < 1 {
            return Err(QError::InvalidParameter(
                "consecutive_small must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// The base `q` of the time scale together with the truncation policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParams {
    q: f64,
    trunc: Truncation,
}

impl QParams {
    pub fn new(q: f64) -> QResult<Self> {
        Self::with_truncation(q, Truncation::default())
    }

    pub fn with_truncation(q: f64, trunc: Truncation) -> QResult<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QError::InvalidParameter(format!(
                "q must lie strictly between 0 and 1, got {q}"
            )));
        }
        trunc.validate()?;
        Ok(QParams { q, trunc })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn trunc(&self) -> &Truncation {
        &self.trunc
    }

    /// `q^x` for real `x`, using integer powers when `x` is integral.
    #[inline]
    pub fn pow(&self, x: f64) -> f64 {
        if x.fract() == 0.0 && x.abs() < i32::MAX as f64 {
            self.q.powi(x as i32)
        } else {
            self.q.powf(x)
        }
    }

    /// `r(alpha) = q^{-alpha (alpha - 1) / 2}`, the prefactor of right-sided operators.
    pub fn r_coef(&self, alpha: f64) -> f64 {
        self.pow(-0.5 * alpha * (alpha - 1.0))
    }
}
