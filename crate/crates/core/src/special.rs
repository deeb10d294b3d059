//! q-special functions: q-Pochhammer symbol, q-factorial powers, q-gamma and
//! the two q-exponentials `e_q` and `E_q`.

use crate::error::{QError, QResult};
use crate::grid::GridPoint;
use crate::params::QParams;
use crate::series::{note_terms, InfiniteProduct, SeriesSum, Step};

/// Denominators at or below this magnitude are treated as poles; the floor
/// catches cancellation to rounding level that an absolute tolerance misses.
fn pole_floor(p: &QParams) -> f64 {
    p.trunc().abs_tol.max(8.0 * f64::EPSILON)
}

fn is_nonneg_integer(x: f64) -> bool {
    x >= 0.0 && x.fract() == 0.0
}

/// `(q; q)_n = prod_{j=1}^{n} (1 - q^j)`.
pub fn q_pochhammer(n: u32, p: &QParams) -> f64 {
    let q = p.q();
    let mut qj = 1.0;
    let mut acc = 1.0;
    for _ in 0..n {
        qj *= q;
        acc *= 1.0 - qj;
    }
    acc
}

/// The q-factorial power `(t - s)_q^alpha`.
///
/// Non-negative integer exponents use the finite product
/// `prod_{i<alpha} (t - q^i s)`. Every other real exponent uses
/// `t^alpha prod_{i>=0} (1 - (s/t) q^i) / (1 - (s/t) q^{i+alpha})`; for negative
/// integers that product telescopes to `1 / prod_{j=1}^{m} (t - q^{-j} s)`,
/// which is what gets evaluated so that a vanishing numerator cannot mask the
/// matching vanishing denominator.
pub fn q_factorial_power(t: f64, s: f64, alpha: f64, p: &QParams) -> QResult<f64> {
    if !(t.is_finite() && s.is_finite() && alpha.is_finite()) {
        return Err(QError::domain(format!("non-finite q-factorial arguments t={t}, s={s}, alpha={alpha}")));
    }
    let q = p.q();
    if is_nonneg_integer(alpha) {
        let mut acc = 1.0;
        let mut qi = 1.0;
        for _ in 0..(alpha as u64) {
            acc *= t - qi * s;
            qi *= q;
        }
        note_terms(alpha as u64);
        return Ok(acc);
    }
    if alpha.fract() == 0.0 {
        let m = (-alpha) as u64;
        let mut acc = 1.0;
        let mut qj = 1.0;
        for _ in 0..m {
            qj /= q;
            let f = t - qj * s;
            if f.abs() <= pole_floor(p) * t.abs().max(s.abs() * qj) {
                return Err(QError::pole(format!("(t - s)_q^{alpha} at t={t}, s={s}")));
            }
            acc *= f;
        }
        note_terms(m);
        return Ok(1.0 / acc);
    }
    if t == 0.0 {
        if s == 0.0 && alpha > 0.0 {
            return Ok(0.0);
        }
        return Err(QError::domain(format!("(t - s)_q^{alpha} needs t != 0 for a non-integer exponent (s={s})")));
    }
    if t < 0.0 {
        return Err(QError::domain(format!("(t - s)_q^{alpha} with t={t} < 0 is not real")));
    }
    let x = s / t;
    let floor = pole_floor(p);
    let mut prod = InfiniteProduct::new("q-factorial product", p.trunc(), t.powf(alpha));
    let mut xq = x;
    let mut xqa = x * p.pow(alpha);
    loop {
        let num = 1.0 - xq;
        let den = 1.0 - xqa;
        if den.abs() <= floor {
            return Err(QError::pole(format!("(t - s)_q^{alpha} at t={t}, s={s}")));
        }
        // a vanishing numerator ends the product: with a non-integer
        // exponent no later denominator can vanish
        if num.abs() <= floor {
            return Ok(0.0);
        }
        if prod.push(num / den)? == Step::Done {
            return Ok(prod.value());
        }
        xq *= q;
        xqa *= q;
    }
}

/// `(t - s)_q^alpha` for grid arguments. Factors `1 - q^k` whose exponent is
/// exactly zero are detected from the integer exponents, so the vanishing of
/// `(t - t q^{-j})_q^m` for `m > j` is exact.
pub fn q_factorial_power_on_grid(t: GridPoint, s: GridPoint, alpha: f64, p: &QParams) -> QResult<f64> {
    let (nt, st) = match t {
        GridPoint::Zero => return q_factorial_power(0.0, s.value(p), alpha, p),
        GridPoint::Point { exponent, shift } => (exponent, shift),
    };
    let (ns, ss) = match s {
        GridPoint::Zero => return q_factorial_power(t.value(p), 0.0, alpha, p),
        GridPoint::Point { exponent, shift } => (exponent, shift),
    };
    let dn = ns - nt;
    let ds = ss - st;
    let tv = t.value(p);
    // 1 - q^{i + dn + ds + extra}, exactly zero when the exponent is
    let one_minus = |i: i64, extra: f64| -> f64 {
        let frac = ds + extra;
        if frac.fract() == 0.0 && i + dn + frac as i64 == 0 {
            0.0
        } else {
            1.0 - p.pow((i + dn) as f64 + frac)
        }
    };
    if is_nonneg_integer(alpha) {
        let mut acc = tv.powi(alpha as i32);
        for i in 0..(alpha as i64) {
            acc *= one_minus(i, 0.0);
        }
        note_terms(alpha as u64);
        return Ok(acc);
    }
    if alpha.fract() == 0.0 {
        let m = (-alpha) as i64;
        let mut acc = tv.powi(alpha as i32);
        for j in 1..=m {
            let f = one_minus(-j, 0.0);
            if f == 0.0 {
                return Err(QError::pole(format!("(t - s)_q^{alpha} on the grid")));
            }
            acc /= f;
        }
        note_terms(m as u64);
        return Ok(acc);
    }
    let mut prod = InfiniteProduct::new("q-factorial product", p.trunc(), tv.powf(alpha));
    let mut i = 0i64;
    loop {
        let num = one_minus(i, 0.0);
        let den = one_minus(i, alpha);
        if den == 0.0 {
            return Err(QError::pole(format!("(t - s)_q^{alpha} on the grid")));
        }
        if num == 0.0 {
            return Ok(0.0);
        }
        if prod.push(num / den)? == Step::Done {
            return Ok(prod.value());
        }
        i += 1;
    }
}

/// `Gamma_q(alpha) = (1 - q)^{1 - alpha} prod_{i>=0} (1 - q^{i+1}) / (1 - q^{i+alpha})`.
pub fn q_gamma(alpha: f64, p: &QParams) -> QResult<f64> {
    if !alpha.is_finite() {
        return Err(QError::domain(format!("q-gamma of {alpha}")));
    }
    if alpha <= 0.0 && alpha.fract() == 0.0 {
        return Err(QError::pole(format!("q-gamma at non-positive integer {alpha}")));
    }
    let q = p.q();
    let mut prod = InfiniteProduct::new("q-gamma product", p.trunc(), (1.0 - q).powf(1.0 - alpha));
    let mut q1 = q;
    let mut qa = p.pow(alpha);
    loop {
        if prod.push((1.0 - q1) / (1.0 - qa))? == Step::Done {
            return Ok(prod.value());
        }
        q1 *= q;
        qa *= q;
    }
}

/// `e_q(t) = sum_k t^k / Gamma_q(k+1)`, with `Gamma_q(k+1) = [k]_q!`
/// accumulated incrementally.
pub fn q_exp_e(t: f64, p: &QParams) -> QResult<f64> {
    let q = p.q();
    let mut term = 1.0;
    let mut qk = 1.0;
    SeriesSum::run("e_q series", p.trunc(), |k| {
        if k > 0 {
            qk *= q;
            term *= t * (1.0 - q) / (1.0 - qk);
        }
        Ok(term)
    })
}

/// `E_q(t) = prod_{n>=0} (1 - q^n t)^{-1}` for `|t| < 1`.
pub fn q_exp_big_e(t: f64, p: &QParams) -> QResult<f64> {
    if !(t.abs() < 1.0) {
        return Err(QError::domain(format!("E_q(t) needs |t| < 1, got {t}")));
    }
    let q = p.q();
    let mut prod = InfiniteProduct::new("E_q product", p.trunc(), 1.0);
    let mut qn = 1.0;
    loop {
        let den = 1.0 - qn * t;
        if den.abs() <= pole_floor(p) {
            return Err(QError::pole(format!("E_q at t={t}")));
        }
        if prod.push(1.0 / den)? == Step::Done {
            return Ok(prod.value());
        }
        qn *= q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{nabla_q, q_bracket};
    use approx::assert_relative_eq;

    fn p(q: f64) -> QParams {
        QParams::new(q).unwrap()
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(q_pochhammer(0, &p(0.5)), 1.0);
        assert_eq!(q_pochhammer(1, &p(0.5)), 0.5);
        assert_eq!(q_pochhammer(2, &p(0.5)), 0.375);
    }

    #[test]
    fn factorial_power_values() {
        let pp = p(0.5);
        assert_eq!(q_factorial_power(1.3, 0.4, 0.0, &pp).unwrap(), 1.0);
        // oracle: (1 - 0.5)(1 - 0.5*0.5)
        assert_eq!(q_factorial_power(1.0, 0.5, 2.0, &pp).unwrap(), 0.5 * 0.75);
        let v = q_factorial_power(2.0, 0.0, 0.7, &pp).unwrap();
        assert_relative_eq!(v, 2f64.powf(0.7), max_relative = 1e-15);
    }

    #[test]
    fn factorial_power_domain_and_poles() {
        let pp = p(0.5);
        assert!(matches!(q_factorial_power(0.0, 1.0, 0.5, &pp), Err(QError::Domain(_))));
        assert!(matches!(q_factorial_power(-1.0, 0.5, 0.5, &pp), Err(QError::Domain(_))));
        // (t - s)_q^{-1} = 1 / (t - s/q) has a pole at s = q t
        assert!(matches!(q_factorial_power(1.0, 0.5, -1.0, &pp), Err(QError::Pole(_))));
        // denominator 1 - (s/t) q^{alpha} vanishes for s/t = q^{-alpha}
        assert!(matches!(q_factorial_power(1.0, 2f64.powf(0.5), 0.5, &pp), Err(QError::Pole(_))));
    }

    #[test]
    fn negative_integer_power_telescopes() {
        let pp = p(0.5);
        // (t - t)_q^{-1} = 1 / (t - t/q) even though the first numerator vanishes
        let v = q_factorial_power(1.0, 1.0, -1.0, &pp).unwrap();
        assert_relative_eq!(v, 1.0 / (1.0 - 2.0), max_relative = 1e-15);
        // matches the general product just off the integer
        let near = q_factorial_power(1.0, 0.3, -2.0 + 1e-9, &pp).unwrap();
        let exact = q_factorial_power(1.0, 0.3, -2.0, &pp).unwrap();
        assert_relative_eq!(near, exact, max_relative = 1e-7);
    }

    #[test]
    fn non_integer_power_vanishes_when_s_equals_t() {
        assert_eq!(q_factorial_power(0.7, 0.7, 1.3, &p(0.5)).unwrap(), 0.0);
    }

    #[test]
    fn grid_power_vanishes_exactly() {
        let pp = p(0.3);
        let t = GridPoint::tq(2);
        for j in 1..4i64 {
            let r = t.shifted(-j);
            for m in (j + 1)..7 {
                assert_eq!(q_factorial_power_on_grid(t, r, m as f64, &pp).unwrap(), 0.0);
            }
            // m = j keeps every factor away from zero
            assert_ne!(q_factorial_power_on_grid(t, r, j as f64, &pp).unwrap(), 0.0);
        }
    }

    #[test]
    fn grid_power_agrees_with_float_power() {
        let pp = p(0.5);
        let t = GridPoint::tq(0);
        let s = GridPoint::new(2, 0.25).unwrap();
        for alpha in [-1.5, -1.0, 0.0, 0.4, 1.0, 2.0, 2.7] {
            let g = q_factorial_power_on_grid(t, s, alpha, &pp).unwrap();
            let f = q_factorial_power(1.0, s.value(&pp), alpha, &pp).unwrap();
            assert_relative_eq!(g, f, max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_values() {
        let pp = p(0.5);
        assert_relative_eq!(q_gamma(1.0, &pp).unwrap(), 1.0, max_relative = 1e-11);
        assert_relative_eq!(q_gamma(3.0, &pp).unwrap(), 1.5, max_relative = 1e-11);
        // 40-digit oracle from an independent product evaluation
        assert_relative_eq!(q_gamma(0.5, &pp).unwrap(), 1.5720327257863239, max_relative = 1e-12);
    }

    #[test]
    fn gamma_poles() {
        for a in [0.0, -1.0, -4.0] {
            assert!(matches!(q_gamma(a, &p(0.5)), Err(QError::Pole(_))));
        }
        assert!(q_gamma(-0.5, &p(0.5)).unwrap().is_finite());
    }

    #[test]
    fn gamma_recurrence() {
        for q in [0.3, 0.5, 0.9] {
            let pp = p(q);
            for a in [0.3, 0.5, 1.7, 2.4] {
                let lhs = q_gamma(a + 1.0, &pp).unwrap();
                let rhs = q_bracket(a, &pp) * q_gamma(a, &pp).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn exponentials() {
        let pp = p(0.5);
        assert_eq!(q_exp_e(0.0, &pp).unwrap(), 1.0);
        assert_eq!(q_exp_big_e(0.0, &pp).unwrap(), 1.0);
        assert_relative_eq!(q_exp_e(0.5, &pp).unwrap(), 1.731373309727532, max_relative = 1e-12);
        assert_relative_eq!(q_exp_big_e(0.25, &pp).unwrap(), 1.731373309727532, max_relative = 1e-12);
    }

    #[test]
    fn big_e_product_matches_series() {
        for q in [0.3, 0.5, 0.8] {
            let pp = p(q);
            for t in [-0.6f64, 0.1, 0.25, 0.7] {
                let series: f64 = (0..400).map(|n| t.powi(n as i32) / q_pochhammer(n, &pp)).sum();
                assert_relative_eq!(q_exp_big_e(t, &pp).unwrap(), series, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn exponential_errors() {
        let pp = p(0.5);
        assert!(matches!(q_exp_big_e(1.0, &pp), Err(QError::Domain(_))));
        // (1 - q) t = 1.5 is outside the radius of e_q
        assert!(matches!(q_exp_e(3.0, &pp), Err(QError::NonConvergence { .. })));
    }

    #[test]
    fn derivative_of_factorial_power_in_t() {
        let pp = p(0.5);
        let s = 0.125;
        for alpha in [0.4, 1.0, 1.6, 2.0] {
            let lhs = nabla_q(&|x: f64| q_factorial_power(x, s, alpha, &pp).unwrap(), 1.0, &pp).unwrap();
            let rhs = q_bracket(alpha, &pp) * q_factorial_power(1.0, s, alpha - 1.0, &pp).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        }
    }
}
