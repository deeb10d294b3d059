//! Residual sweeps for the right semigroup law on a finite interval.
//!
//! With `b < inf` the law `_bI^beta _bI^alpha f = _bI^{alpha+beta} f` is not
//! known to hold. These sweeps only measure the gap; nothing is asserted.
//! The inner integral is extended by zero past `b`, which is what the outer
//! operator samples near the upper limit.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::check::fmt_num;
use crate::error::{QError, QResult};
use crate::frac::{right_frac_integral, right_frac_integral_zero_extended, FracOrder, RightOpContext};
use crate::grid::GridPoint;
use crate::params::QParams;
use crate::qcore::{Fallible, QFunction};

/// `(alpha, beta)` pairs over `{0.25, 0.5, 0.75, 1.5}`, integer sums included.
pub fn default_pairs() -> Vec<(f64, f64)> {
    let orders = [0.25, 0.5, 0.75, 1.5];
    orders.iter().flat_map(|&a| orders.iter().map(move |&b| (a, b))).collect()
}

/// `b q^k` for `k = 1, 2, 3`.
pub fn default_points(b: f64, p: &QParams) -> Vec<f64> {
    (1..=3).map(|k| b * p.q().powi(k)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExploreRecord {
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
    pub b: f64,
    pub t: f64,
    pub value_lhs: Option<f64>,
    pub value_rhs: Option<f64>,
    pub abs_residual: Option<f64>,
    pub rel_residual: Option<f64>,
    pub error: Option<String>,
}

fn residual<F: QFunction + Sync + ?Sized>(
    f: &F,
    ctx: &RightOpContext,
    alpha: f64,
    beta: f64,
    t: f64,
    p: &QParams,
) -> QResult<(f64, f64)> {
    let inner_order = FracOrder::new(alpha)?;
    let inner = Fallible(|x: f64| right_frac_integral_zero_extended(f, ctx, &inner_order, x, p));
    let lhs = right_frac_integral(&inner, ctx, &FracOrder::new(beta)?, t, p)?;
    let rhs = right_frac_integral(f, ctx, &FracOrder::new(alpha + beta)?, t, p)?;
    Ok((lhs, rhs))
}

/// One record per `(pair, t)`, in grid order. Evaluation errors are kept as
/// rows with the `error` field set.
pub fn explore_right_semigroup<F: QFunction + Sync + ?Sized>(
    f: &F,
    pairs: &[(f64, f64)],
    points: &[f64],
    b: f64,
    p: &QParams,
) -> QResult<Vec<ExploreRecord>> {
    if !(b.is_finite() && b > 0.0) {
        return Err(QError::InvalidParameter(format!("explore needs a finite b > 0, got {b}")));
    }
    let grid = GridPoint::from_value(b, p)?;
    if grid.total_exponent().is_some_and(|e| e.fract() != 0.0) {
        return Err(QError::InvalidParameter(format!("b = {b} is not a point of T_q for q = {}", p.q())));
    }
    let ctx = RightOpContext::finite(grid)?;
    let jobs: Vec<(f64, f64, f64)> =
        pairs.iter().flat_map(|&(a, be)| points.iter().map(move |&t| (a, be, t))).collect();
    Ok(jobs
        .par_iter()
        .map(|&(alpha, beta, t)| {
            let mut rec = ExploreRecord {
                alpha,
                beta,
                q: p.q(),
                b,
                t,
                value_lhs: None,
                value_rhs: None,
                abs_residual: None,
                rel_residual: None,
                error: None,
            };
            match residual(f, &ctx, alpha, beta, t, p) {
                Ok((lhs, rhs)) => {
                    let abs = (lhs - rhs).abs();
                    let scale = lhs.abs().max(rhs.abs());
                    rec.value_lhs = Some(lhs);
                    rec.value_rhs = Some(rhs);
                    rec.abs_residual = Some(abs);
                    rec.rel_residual = Some(if abs == 0.0 { 0.0 } else { abs / scale });
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect())
}

pub const EXPLORE_CSV_HEADER: [&str; 10] =
    ["alpha", "beta", "q", "b", "t", "value_lhs", "value_rhs", "abs_residual", "rel_residual", "error"];

pub fn write_explore_csv<W: Write>(records: &[ExploreRecord], w: W) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(EXPLORE_CSV_HEADER)?;
    let num = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
    for r in records {
        out.write_record([
            fmt_num(r.alpha),
            fmt_num(r.beta),
            fmt_num(r.q),
            fmt_num(r.b),
            fmt_num(r.t),
            num(r.value_lhs),
            num(r.value_rhs),
            num(r.abs_residual),
            num(r.rel_residual),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_integer_sums() {
        let pairs = default_pairs();
        assert_eq!(pairs.len(), 16);
        assert!(pairs.iter().any(|(a, b)| a + b == 1.0));
        assert!(pairs.iter().any(|(a, b)| a + b == 2.0));
    }

    #[test]
    fn residuals_are_finite_and_nonnegative() {
        let p = QParams::new(0.5).unwrap();
        let recs = explore_right_semigroup(&|_: f64| 1.0, &[(0.5, 0.5)], &default_points(1.0, &p), 1.0, &p).unwrap();
        assert_eq!(recs.len(), 3);
        for r in &recs {
            let res = r.abs_residual.unwrap();
            assert!(res.is_finite() && res >= 0.0, "{r:?}");
        }
    }

    #[test]
    fn empty_grid_is_header_only() {
        let p = QParams::new(0.5).unwrap();
        let recs = explore_right_semigroup(&|_: f64| 1.0, &[], &[0.5], 1.0, &p).unwrap();
        let mut buf = Vec::new();
        write_explore_csv(&recs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), EXPLORE_CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn rejects_off_grid_b() {
        let p = QParams::new(0.5).unwrap();
        assert!(explore_right_semigroup(&|_: f64| 1.0, &[(0.5, 0.5)], &[0.5], 0.7, &p).is_err());
        assert!(explore_right_semigroup(&|_: f64| 1.0, &[(0.5, 0.5)], &[0.5], f64::INFINITY, &p).is_err());
    }
}
