//! Left and right fractional q-integrals with their Riemann and Caputo
//! q-fractional derivatives.
//!
//! Left operators with lower limit `a` act on functions on `[a, inf)`; right
//! operators with upper limit `b` sample their operand on the shifted scale
//! `T_q^{1-alpha}`, which is why every [`QFunction`] is evaluable on all of
//! `[0, inf)`.

use crate::error::{QError, QResult};
use crate::grid::GridPoint;
use crate::params::QParams;
use crate::qcore::{nabla_q_n, q_integral, q_integral_tail, Bound, Fallible, QFunction};
use crate::special::{q_factorial_power, q_gamma};

const EDGE: f64 = 1e-12;

/// A fractional order `alpha > 0` with its ceiling index.
///
/// For non-integer `alpha`, `n = floor(alpha) + 1`; for integer `alpha`,
/// `n = alpha` and the operators take their integer-order clause.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    n: u32,
    is_integer: bool,
}

impl FracOrder {
    pub fn new(alpha: f64) -> QResult<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(QError::InvalidParameter(format!("fractional order must be positive, got {alpha}")));
        }
        if alpha > u32::MAX as f64 / 2.0 {
            return Err(QError::InvalidParameter(format!("fractional order {alpha} is too large")));
        }
        let is_integer = alpha.fract() == 0.0;
        let n = if is_integer { alpha as u32 } else { alpha.floor() as u32 + 1 };
        Ok(FracOrder { alpha, n, is_integer })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_integer(&self) -> bool {
        self.is_integer
    }
}

/// Upper limit of the right-sided operators: a grid point `b` or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightOpContext {
    b: Option<GridPoint>,
}

impl RightOpContext {
    pub fn infinite() -> Self {
        RightOpContext { b: None }
    }

    pub fn finite(b: GridPoint) -> QResult<Self> {
        if b.is_zero() {
            return Err(QError::domain("right operators need an upper limit b > 0"));
        }
        Ok(RightOpContext { b: Some(b) })
    }

    /// `b = inf` for an infinite value, otherwise the grid point of `b`.
    pub fn from_value(b: f64, p: &QParams) -> QResult<Self> {
        if b == f64::INFINITY {
            Ok(Self::infinite())
        } else {
            Self::finite(GridPoint::from_value(b, p)?)
        }
    }

    pub fn b(&self) -> Option<GridPoint> {
        self.b
    }

    /// The context with upper limit `q^{-1} b`.
    pub fn raised(&self) -> Self {
        RightOpContext { b: self.b.map(|b| b.shifted(-1)) }
    }

    pub fn bound(&self, p: &QParams) -> Bound {
        match self.b {
            Some(b) => Bound::Finite(b.value(p)),
            None => Bound::Infinite,
        }
    }
}

/// `-nabla_q f`, the derivative that pairs with right-sided operators.
pub fn right_nabla<F: QFunction + ?Sized>(f: &F, t: f64, p: &QParams) -> QResult<f64> {
    Ok(-nabla_q_n(f, 1, t, p)?)
}

fn sign(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn left_integral_raw<F: QFunction + ?Sized>(f: &F, a: f64, alpha: f64, t: f64, p: &QParams) -> QResult<f64> {
    if !(a >= 0.0) || !(t > 0.0) {
        return Err(QError::domain(format!("left fractional integral needs a >= 0 and t > 0, got a={a}, t={t}")));
    }
    if (t - a).abs() <= EDGE * t {
        return Ok(0.0);
    }
    if t < a {
        return Err(QError::domain(format!("left fractional integral needs t >= a, got a={a}, t={t}")));
    }
    if alpha == 1.0 {
        return q_integral(f, a, t, p);
    }
    let q = p.q();
    let kernel = Fallible(|s: f64| Ok(q_factorial_power(t, q * s, alpha - 1.0, p)? * f.eval(s)?));
    Ok(q_integral(&kernel, a, t, p)? / q_gamma(alpha, p)?)
}

fn right_integral_raw<F: QFunction + ?Sized>(
    f: &F,
    ctx: &RightOpContext,
    alpha: f64,
    t: f64,
    zero_beyond_b: bool,
    p: &QParams,
) -> QResult<f64> {
    if !(t > 0.0) {
        return Err(QError::domain(format!("right fractional integral needs t > 0, got {t}")));
    }
    let bound = ctx.bound(p);
    if let Bound::Finite(b) = bound {
        if (t - b).abs() <= EDGE * b {
            return Ok(0.0);
        }
        if t > b {
            if zero_beyond_b {
                return Ok(0.0);
            }
            return Err(QError::domain(format!("right fractional integral needs t <= b, got t={t}, b={b}")));
        }
    }
    let shift = p.pow(1.0 - alpha);
    let kernel = Fallible(|s: f64| Ok(q_factorial_power(s, t, alpha - 1.0, p)? * f.eval(s * shift)?));
    let integral = q_integral_tail(&kernel, t, bound, p)?;
    Ok(p.r_coef(alpha) / q_gamma(alpha, p)? * integral)
}

/// Left fractional q-integral
/// `(1 / Gamma_q(alpha)) int_a^t (t - qs)_q^{alpha-1} f(s) nabla s`.
///
/// Returns zero at `t = a`; `t < a` is a domain error.
pub fn left_frac_integral<F: QFunction + ?Sized>(
    f: &F,
    a: f64,
    order: &FracOrder,
    t: f64,
    p: &QParams,
) -> QResult<f64> {
    left_integral_raw(f, a, order.alpha, t, p)
}

/// Right fractional q-integral
/// `(r(alpha) / Gamma_q(alpha)) int_t^b (s - t)_q^{alpha-1} f(s q^{1-alpha}) nabla s`
/// with `r(alpha) = q^{-alpha(alpha-1)/2}`.
///
/// Returns zero at `t = b`; `t > b` is a domain error.
pub fn right_frac_integral<F: QFunction + ?Sized>(
    f: &F,
    ctx: &RightOpContext,
    order: &FracOrder,
    t: f64,
    p: &QParams,
) -> QResult<f64> {
    right_integral_raw(f, ctx, order.alpha, t, false, p)
}

/// [`right_frac_integral`] extended by zero to `t > b`, the convention under
/// which `_bI_q^alpha` is a function on all of `(0, inf)`.
pub fn right_frac_integral_zero_extended<F: QFunction + ?Sized>(
    f: &F,
    ctx: &RightOpContext,
    order: &FracOrder,
    t: f64,
    p: &QParams,
) -> QResult<f64> {
    right_integral_raw(f, ctx, order.alpha, t, true, p)
}

fn check_left_stencil(a: f64, n: u32, t: f64, p: &QParams) -> QResult<()> {
    if a > 0.0 && t * p.pow(n as f64) < a * (1.0 - EDGE) {
        return Err(QError::domain(format!(
            "nabla^{n} at t={t} samples below the lower limit a={a}; need t >= a q^-{n}"
        )));
    }
    Ok(())
}

/// Left Riemann q-fractional derivative `nabla_q^n I_a^{n-alpha} f`.
/// Integer orders return `nabla_q^alpha f`.
pub fn left_riemann_deriv<F: QFunction + ?Sized>(
    f: &F,
    a: f64,
    order: &FracOrder,
    t: f64,
    p: &QParams,
) -> QResult<f64> {
    if order.is_integer {
        return nabla_q_n(f, order.n, t, p);
    }
    left_riemann_deriv_composed(f, a, order.alpha, order.n, t, p)
}

/// `nabla_q^n I_a^{n-alpha} f` for an explicit `n > alpha`, bypassing the
/// integer-order clause.
pub fn left_riemann_deriv_composed<F: QFunction + ?Sized>(
    f: &F,
    a: f64,
    alpha: f64,
    n: u32,
    t: f64,
    p: &QParams,
) -> QResult<f64> {
    if !(n as f64 > alpha && alpha > 0.0) {
        return Err(QError::InvalidParameter(format!("need 0 < alpha < n, got alpha={alpha}, n={n}")));
    }
    check_left_stencil(a, n, t, p)?;
    let inner = Fallible(|x: f64| left_integral_raw(f, a, n as f64 - alpha, x, p));
    nabla_q_n(&inner, n, t, p)
}

/// Right Riemann q-fractional derivative `(-1)^n nabla_q^n _bI_q^{n-alpha} f`.
/// Integer orders return `(-1)^n nabla_q^n f`.
pub fn right_riemann_deriv<F: QFunction + ?Sized>(
    f: &F,
    ctx: &RightOpContext,
    order: &FracOrder,
    t: f64,
    p: &QParams,
) -> QResult<f64> {
    if order.is_integer {
        return Ok(sign(order.n) * nabla_q_n(f, order.n, t, p)?);
    }
    right_riemann_deriv_composed(f, ctx, order.alpha, order.n, t, p)
}

/// `(-1)^n nabla_q^n _bI_q^{n-alpha} f` for an explicit `n > alpha`.
pub fn right_riemann_deriv_composed<F: QFunction + ?Sized>(
    f: &F,
    ctx: &RightOpContext,
    alpha: f64,
    n: u32,
    t: f64,
    p: &QParams,
) -> QResult<f64> {
    if !(n as f64 > alpha && alpha > 0.0) {
        return Err(QError::InvalidParameter(format!("need 0 < alpha < n, got alpha={alpha}, n={n}")));
    }
    let inner = Fallible(|x: f64| right_integral_raw(f, ctx, n as f64 - alpha, x, false, p));
    Ok(sign(n) * nabla_q_n(&inner, n, t, p)?)
}

/// Left Caputo q-fractional derivative `I_a^{n-alpha} nabla_q^n f`.
/// Integer orders return `nabla_q^alpha f`.
pub fn left_caputo<F: QFunction + ?Sized>(f: &F, a: f64, order: &FracOrder, t: f64, p: &QParams) -> QResult<f64> {
    let n = order.n;
    if order.is_integer {
        return nabla_q_n(f, n, t, p);
    }
    let dn = Fallible(|s: f64| nabla_q_n(f, n, s, p));
    left_integral_raw(&dn, a, n as f64 - order.alpha, t, p)
}

/// Right Caputo q-fractional derivative `_bI_q^{n-alpha} (_b nabla_q)^n f`
/// with `_b nabla_q = -nabla_q`. Integer orders return `(-1)^n nabla_q^n f`.
pub fn right_caputo<F: QFunction + ?Sized>(
    f: &F,
    ctx: &RightOpContext,
    order: &FracOrder,
    t: f64,
    p: &QParams,
) -> QResult<f64> {
    let n = order.n;
    if order.is_integer {
        return Ok(sign(n) * nabla_q_n(f, n, t, p)?);
    }
    let dn = Fallible(|s: f64| Ok(sign(n) * nabla_q_n(f, n, s, p)?));
    right_integral_raw(&dn, ctx, n as f64 - order.alpha, t, false, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{nabla_q, q_integral};
    use approx::assert_relative_eq;

    fn p(q: f64) -> QParams {
        QParams::new(q).unwrap()
    }

    fn ord(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn frac_order_ceiling() {
        let o = ord(0.3);
        assert_eq!((o.n(), o.is_integer()), (1, false));
        let o = ord(1.0);
        assert_eq!((o.n(), o.is_integer()), (1, true));
        let o = ord(2.7);
        assert_eq!((o.n(), o.is_integer()), (3, false));
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(-1.0).is_err());
    }

    #[test]
    fn order_one_is_plain_integral() {
        let pp = p(0.5);
        let f = |s: f64| 1.0 + s * s;
        for a in [0.0, 0.125] {
            let v = left_frac_integral(&f, a, &ord(1.0), 1.0, &pp).unwrap();
            assert_eq!(v, q_integral(&f, a, 1.0, &pp).unwrap());
        }
    }

    #[test]
    fn left_integral_examples() {
        let pp = p(0.5);
        let v = left_frac_integral(&|s: f64| s, 0.0, &ord(1.0), 1.0, &pp).unwrap();
        assert_relative_eq!(v, 2.0 / 3.0, max_relative = 1e-11);
        // 1 / Gamma_q(1.5) from a 40-digit product oracle
        let v = left_frac_integral(&|_s: f64| 1.0, 0.0, &ord(0.5), 1.0, &pp).unwrap();
        assert_relative_eq!(v, 1.0859231828858144, max_relative = 1e-10);
    }

    #[test]
    fn left_integral_limits() {
        let pp = p(0.5);
        let f = |s: f64| s;
        assert_eq!(left_frac_integral(&f, 0.25, &ord(0.5), 0.25, &pp).unwrap(), 0.0);
        assert!(matches!(left_frac_integral(&f, 0.25, &ord(0.5), 0.125, &pp), Err(QError::Domain(_))));
    }

    #[test]
    fn right_integral_examples() {
        let pp = p(0.5);
        let f = |s: f64| s.powi(-2);
        let inf = RightOpContext::infinite();
        assert_relative_eq!(right_frac_integral(&f, &inf, &ord(1.0), 1.0, &pp).unwrap(), 0.5, max_relative = 1e-11);
        let fin = RightOpContext::from_value(2.0, &pp).unwrap();
        assert_eq!(right_frac_integral(&f, &fin, &ord(0.5), 2.0, &pp).unwrap(), 0.0);
        assert!(matches!(right_frac_integral(&f, &fin, &ord(0.5), 4.0, &pp), Err(QError::Domain(_))));
        assert_eq!(right_frac_integral_zero_extended(&f, &fin, &ord(0.5), 4.0, &pp).unwrap(), 0.0);
        let g = Fallible(|x: f64| right_frac_integral(&f, &inf, &ord(1.0), x, &pp));
        assert_relative_eq!(nabla_q(&g, 1.0, &pp).unwrap(), -1.0, max_relative = 1e-10);
    }

    #[test]
    fn riemann_integer_orders() {
        let pp = p(0.5);
        let f = |s: f64| s * s * s + 2.0 * s;
        let t = 0.8;
        let d1 = nabla_q(&f, t, &pp).unwrap();
        assert_eq!(left_riemann_deriv(&f, 0.0, &ord(1.0), t, &pp).unwrap(), d1);
        assert_eq!(right_riemann_deriv(&f, &RightOpContext::infinite(), &ord(1.0), t, &pp).unwrap(), -d1);
        // the fractional path with n = 2 lands on the same value
        let ctx = RightOpContext::from_value(8.0, &pp).unwrap();
        let via = right_riemann_deriv_composed(&f, &ctx, 1.0, 2, t, &pp).unwrap();
        assert_relative_eq!(via, -d1, max_relative = 1e-9);
        let via = left_riemann_deriv_composed(&f, 0.0, 1.0, 2, t, &pp).unwrap();
        assert_relative_eq!(via, d1, max_relative = 1e-9);
    }

    #[test]
    fn riemann_of_constant() {
        let pp = p(0.5);
        let c = 2.5;
        let v = left_riemann_deriv(&|_s: f64| c, 0.0, &ord(0.5), 1.0, &pp).unwrap();
        // c t^{-1/2} / Gamma_q(1/2) at t = 1
        assert_relative_eq!(v, c * 0.6361190728391512, max_relative = 1e-9);
    }

    #[test]
    fn riemann_stencil_below_lower_limit() {
        let pp = p(0.5);
        let err = left_riemann_deriv(&|s: f64| s, 0.25, &ord(1.5), 0.5, &pp).unwrap_err();
        assert!(matches!(err, QError::Domain(_)));
    }

    #[test]
    fn caputo_kills_constants() {
        let pp = p(0.5);
        let c = |_s: f64| 3.0;
        assert_eq!(left_caputo(&c, 0.125, &ord(0.6), 1.0, &pp).unwrap(), 0.0);
        assert_eq!(left_caputo(&c, 0.0, &ord(1.6), 1.0, &pp).unwrap(), 0.0);
        let ctx = RightOpContext::from_value(4.0, &pp).unwrap();
        assert_eq!(right_caputo(&c, &ctx, &ord(0.6), 1.0, &pp).unwrap(), 0.0);
    }

    #[test]
    fn caputo_integer_orders() {
        let pp = p(0.5);
        let f = |s: f64| s * s * s;
        let t = 0.5;
        let d2 = nabla_q_n(&f, 2, t, &pp).unwrap();
        assert_eq!(left_caputo(&f, 0.0, &ord(2.0), t, &pp).unwrap(), d2);
        let ctx = RightOpContext::infinite();
        assert_eq!(right_caputo(&f, &ctx, &ord(1.0), t, &pp).unwrap(), -nabla_q(&f, t, &pp).unwrap());
    }

    #[test]
    fn caputo_inverts_on_polynomial() {
        let pp = p(0.5);
        let f = |s: f64| s + s * s;
        let a = 0.125;
        let o = ord(0.7);
        let c = Fallible(|s: f64| left_caputo(&f, a, &o, s, &pp));
        let lhs = left_frac_integral(&c, a, &o, 1.0, &pp).unwrap();
        assert_relative_eq!(lhs, f(1.0) - f(a), max_relative = 1e-9);
    }

    #[test]
    fn raised_context_shifts_by_one_step() {
        let pp = p(0.5);
        let ctx = RightOpContext::from_value(1.0, &pp).unwrap();
        assert_eq!(ctx.raised().bound(&pp), Bound::Finite(2.0));
        assert_eq!(RightOpContext::infinite().raised(), RightOpContext::infinite());
    }
}
