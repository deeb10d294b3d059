//! Exact points of the time scales `T_q^shift = {q^(n + shift)} ∪ {0}`.

use std::cmp::Ordering;

use crate::error::{QError, QResult};
use crate::params::QParams;

const SNAP: f64 = 1e-10;

/// A point `q^(exponent + shift)` with `shift` in `[0, 1)`, or zero.
///
/// Equality compares the `(exponent, shift)` pair, never floating values, so
/// points produced by [`GridPoint::shifted`] from a common origin compare
/// exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    Zero,
    Point { exponent: i64, shift: f64 },
}

impl GridPoint {
    /// The point `q^n` of `T_q`.
    pub fn tq(n: i64) -> Self {
        GridPoint::Point { exponent: n, shift: 0.0 }
    }

    /// The point `q^(n + shift)`; the shift is normalised into `[0, 1)`.
    pub fn new(n: i64, shift: f64) -> QResult<Self> {
        if !shift.is_finite() {
            return Err(QError::InvalidParameter(format!("grid shift must be finite, got {shift}")));
        }
        let whole = shift.floor();
        Ok(GridPoint::Point { exponent: n + whole as i64, shift: shift - whole })
    }

    /// Recovers the grid representation of a positive value. Shifts within
    /// `1e-10` of an integer snap to `T_q` itself.
    pub fn from_value(x: f64, p: &QParams) -> QResult<Self> {
        if x == 0.0 {
            return Ok(GridPoint::Zero);
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(QError::domain(format!("grid points are non-negative, got {x}")));
        }
        let e = x.ln() / p.q().ln();
        let mut n = e.floor();
        let mut shift = e - n;
        if shift < SNAP {
            shift = 0.0;
        } else if shift > 1.0 - SNAP {
            shift = 0.0;
            n += 1.0;
        }
        Ok(GridPoint::Point { exponent: n as i64, shift })
    }

    pub fn value(&self, p: &QParams) -> f64 {
        match *self {
            GridPoint::Zero => 0.0,
            GridPoint::Point { exponent, shift } => {
                let base = p.q().powi(exponent as i32);
                if shift == 0.0 {
                    base
                } else {
                    base * p.q().powf(shift)
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GridPoint::Zero)
    }

    /// `q^k` times this point. Zero stays zero.
    pub fn shifted(&self, k: i64) -> Self {
        match *self {
            GridPoint::Zero => GridPoint::Zero,
            GridPoint::Point { exponent, shift } => GridPoint::Point { exponent: exponent + k, shift },
        }
    }

    /// `q^x` times this point for real `x`.
    pub fn scaled(&self, x: f64) -> QResult<Self> {
        match *self {
            GridPoint::Zero => Ok(GridPoint::Zero),
            GridPoint::Point { exponent, shift } => GridPoint::new(exponent, shift + x),
        }
    }

    /// Returns `k` with `other = q^k * self` when both lie on the same lattice.
    pub fn steps_to(&self, other: &GridPoint) -> Option<i64> {
        match (self, other) {
            (
                GridPoint::Point { exponent: a, shift: sa },
                GridPoint::Point { exponent: b, shift: sb },
            ) if sa == sb => Some(b - a),
            _ => None,
        }
    }

    /// Total exponent `n + shift`; `None` for zero.
    pub fn total_exponent(&self) -> Option<f64> {
        match *self {
            GridPoint::Zero => None,
            GridPoint::Point { exponent, shift } => Some(exponent as f64 + shift),
        }
    }
}

impl PartialOrd for GridPoint {
    /// Orders by value; since `q < 1` a larger `(exponent, shift)` is a smaller point.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (GridPoint::Zero, GridPoint::Zero) => Some(Ordering::Equal),
            (GridPoint::Zero, _) => Some(Ordering::Less),
            (_, GridPoint::Zero) => Some(Ordering::Greater),
            (
                GridPoint::Point { exponent: ea, shift: sa },
                GridPoint::Point { exponent: eb, shift: sb },
            ) => match eb.cmp(ea) {
                Ordering::Equal => sb.partial_cmp(sa),
                ord => Some(ord),
            },
        }
    }
}

/// Returns `m >= 0` with `lower = upper * q^m` when both positive values lie on
/// one `q`-lattice, judged to a relative tolerance of `1e-10`.
pub(crate) fn lattice_steps(upper: f64, lower: f64, p: &QParams) -> Option<usize> {
    if !(upper > 0.0 && lower > 0.0) {
        return None;
    }
    let m = ((lower / upper).ln() / p.q().ln()).round();
    if !(0.0..=(i32::MAX as f64)).contains(&m) {
        return None;
    }
    let m = m as usize;
    let back = upper * p.q().powi(m as i32);
    if (back - lower).abs() <= SNAP * lower {
        Some(m)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> QParams {
        QParams::new(0.5).unwrap()
    }

    #[test]
    fn zero_has_zero_value() {
        assert_eq!(GridPoint::Zero.value(&p()), 0.0);
    }

    #[test]
    fn tq_values_are_powers() {
        assert_eq!(GridPoint::tq(3).value(&p()), 0.125);
        assert_eq!(GridPoint::tq(-2).value(&p()), 4.0);
    }

    #[test]
    fn from_value_round_trips_on_tq() {
        let pp = QParams::new(0.3).unwrap();
        for n in -6..10 {
            let g = GridPoint::from_value(0.3f64.powi(n), &pp).unwrap();
            assert_eq!(g, GridPoint::tq(n as i64));
        }
    }

    #[test]
    fn shifted_points_compare_exactly() {
        let b = GridPoint::new(0, 0.3).unwrap();
        let c = b.shifted(-1).shifted(1);
        assert_eq!(b, c);
        assert_eq!(b.steps_to(&b.shifted(4)), Some(4));
        assert_eq!(b.steps_to(&GridPoint::tq(4)), None);
    }

    #[test]
    fn scaled_normalises_shift() {
        let g = GridPoint::tq(2).scaled(-0.25).unwrap();
        assert_eq!(g, GridPoint::Point { exponent: 1, shift: 0.75 });
        assert!((g.value(&p()) - 0.5f64.powf(1.75)).abs() < 1e-15);
    }

    #[test]
    fn ordering_follows_value() {
        assert!(GridPoint::tq(1) > GridPoint::tq(2));
        assert!(GridPoint::Zero < GridPoint::tq(50));
        assert!(GridPoint::new(1, 0.5).unwrap() < GridPoint::tq(1));
    }

    #[test]
    fn lattice_steps_detects_alignment() {
        let pp = p();
        assert_eq!(lattice_steps(1.0, 0.125, &pp), Some(3));
        assert_eq!(lattice_steps(1.0, 1.0, &pp), Some(0));
        assert_eq!(lattice_steps(1.0, 0.2, &pp), None);
        assert_eq!(lattice_steps(0.125, 1.0, &pp), None);
    }
}
