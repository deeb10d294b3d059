//! The q-Mittag-Leffler function and the linear Caputo q-fractional initial
//! value problem
//!
//! ```text
//! C_a^alpha y(t) = lambda y(t) + f(t),   y(a) = a0,   0 < alpha <= 1,
//! ```
//!
//! solved either in closed form,
//! `y(t) = a0 E_alpha(lambda, t - a) + int_a^t (t - qs)^{alpha-1} E_{alpha,alpha}(lambda, t - q^alpha s) f(s) nabla s`,
//! or by Picard iteration `y_m = a0 + lambda I_a^alpha y_{m-1} + I_a^alpha f`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{QError, QResult};
use crate::frac::{left_caputo, left_integral_raw, FracOrder};
use crate::grid::lattice_steps;
use crate::params::QParams;
use crate::qcore::{q_integral, Fallible, QFunction};
use crate::series::{term_counter, SeriesSum};
use crate::special::{q_factorial_power, q_gamma};

/// Parameters of `qE_{alpha,beta}(lambda, z - z0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub z0: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64, lambda: f64, z0: f64) -> QResult<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(QError::InvalidParameter(format!("Mittag-Leffler alpha must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && lambda.is_finite() && z0.is_finite()) {
            return Err(QError::InvalidParameter("Mittag-Leffler parameters must be finite".into()));
        }
        if z0 < 0.0 {
            return Err(QError::domain(format!("Mittag-Leffler z0 must be >= 0, got {z0}")));
        }
        Ok(MLParams { alpha, beta, lambda, z0 })
    }
}

/// `qE_{alpha,beta}(lambda, z - z0) = sum_k lambda^k (z - z0)_q^{alpha k} / Gamma_q(alpha k + beta)`.
///
/// The exponent `alpha k` sits on the q-factorial power, which differs from
/// `((z - z0)_q^alpha)^k` unless `z0 = 0`.
pub fn q_mittag_leffler(mp: &MLParams, z: f64, p: &QParams) -> QResult<f64> {
    if z < mp.z0 {
        return Err(QError::domain(format!("Mittag-Leffler needs z >= z0, got z={z}, z0={}", mp.z0)));
    }
    let mut lam_k = 1.0;
    SeriesSum::run("q-Mittag-Leffler series", p.trunc(), |k| {
        if k > 0 {
            lam_k *= mp.lambda;
        }
        if lam_k == 0.0 {
            return Ok(0.0);
        }
        let order = mp.alpha * k as f64;
        let power = q_factorial_power(z, mp.z0, order, p)?;
        if power == 0.0 {
            return Ok(0.0);
        }
        Ok(lam_k * power / q_gamma(order + mp.beta, p)?)
    })
}

/// Shared forcing term of an initial value problem.
pub type Forcing = Arc<dyn QFunction + Send + Sync>;

/// `C_a^alpha y = lambda y + f`, `y(a) = a0`, with `0 < alpha <= 1`.
#[derive(Clone)]
pub struct IVProblem {
    alpha: f64,
    lambda: f64,
    a: f64,
    a0: f64,
    forcing: Option<Forcing>,
}

impl fmt::Debug for IVProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IVProblem")
            .field("alpha", &self.alpha)
            .field("lambda", &self.lambda)
            .field("a", &self.a)
            .field("a0", &self.a0)
            .field("forced", &self.forcing.is_some())
            .finish()
    }
}

impl IVProblem {
    /// A problem with `f = 0`.
    pub fn homogeneous(alpha: f64, lambda: f64, a: f64, a0: f64) -> QResult<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(QError::InvalidParameter(format!("IVP order must lie in (0, 1], got {alpha}")));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(QError::domain(format!("IVP start a must be >= 0, got {a}")));
        }
        if !(lambda.is_finite() && a0.is_finite()) {
            return Err(QError::InvalidParameter("IVP lambda and a0 must be finite".into()));
        }
        Ok(IVProblem { alpha, lambda, a, a0, forcing: None })
    }

    pub fn with_forcing(mut self, f: Forcing) -> Self {
        self.forcing = Some(f);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn forcing(&self) -> Option<&Forcing> {
        self.forcing.as_ref()
    }

    fn forcing_at(&self, t: f64) -> QResult<f64> {
        match &self.forcing {
            Some(f) => f.eval(t),
            None => Ok(0.0),
        }
    }

    fn check_point(&self, t: f64) -> QResult<()> {
        if !(t >= self.a) {
            return Err(QError::domain(format!("IVP solution is defined for t >= a = {}, got {t}", self.a)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedForm,
    Picard { iterations: u32 },
}

/// A value of the solution together with the number of series terms spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub terms: u64,
}

/// An evaluable solution `t -> y(t)` of an [`IVProblem`].
///
/// Immutable once built; Picard iterates are recomputed per evaluation with a
/// private cache keyed by iteration and grid point.
#[derive(Debug, Clone)]
pub struct IVPSolution {
    problem: IVProblem,
    params: QParams,
    method: SolveMethod,
}

impl IVPSolution {
    pub fn method(&self) -> SolveMethod {
        self.method
    }

    pub fn problem(&self) -> &IVProblem {
        &self.problem
    }

    pub fn evaluate(&self, t: f64) -> QResult<f64> {
        self.problem.check_point(t)?;
        match self.method {
            SolveMethod::ClosedForm => closed_form_value(&self.problem, t, &self.params),
            SolveMethod::Picard { iterations } => PicardEval::new(&self.problem, &self.params, t)?.y(iterations, 0),
        }
    }

    pub fn evaluate_traced(&self, t: f64) -> QResult<Evaluation> {
        let before = term_counter();
        let value = self.evaluate(t)?;
        Ok(Evaluation { value, terms: term_counter() - before })
    }
}

impl QFunction for IVPSolution {
    fn eval(&self, x: f64) -> QResult<f64> {
        self.evaluate(x)
    }
}

fn closed_form_value(prob: &IVProblem, t: f64, p: &QParams) -> QResult<f64> {
    let alpha = prob.alpha;
    let free = if prob.a0 == 0.0 {
        0.0
    } else {
        let ml = MLParams::new(alpha, 1.0, prob.lambda, prob.a)?;
        prob.a0 * q_mittag_leffler(&ml, t, p)?
    };
    let Some(f) = &prob.forcing else {
        return Ok(free);
    };
    let q = p.q();
    let qa = p.pow(alpha);
    let kernel = Fallible(|s: f64| {
        let fs = f.eval(s)?;
        if fs == 0.0 {
            return Ok(0.0);
        }
        let ml = MLParams::new(alpha, alpha, prob.lambda, qa * s)?;
        Ok(q_factorial_power(t, q * s, alpha - 1.0, p)? * q_mittag_leffler(&ml, t, p)? * fs)
    });
    Ok(free + q_integral(&kernel, prob.a, t, p)?)
}

/// Closed-form solution built from the q-Mittag-Leffler function.
pub fn solve_ivp_closed(prob: &IVProblem, p: &QParams) -> QResult<IVPSolution> {
    Ok(IVPSolution { problem: prob.clone(), params: *p, method: SolveMethod::ClosedForm })
}

/// The Picard iterate `y_m`, with `y_0 = a0`. Every fractional integral is
/// evaluated numerically from samples of the previous iterate.
///
/// For `a > 0` the iterate is evaluable on the lattice `a q^{-j}`; for `a = 0`
/// at any `t > 0`.
pub fn solve_ivp_picard(prob: &IVProblem, m: u32, p: &QParams) -> QResult<IVPSolution> {
    Ok(IVPSolution { problem: prob.clone(), params: *p, method: SolveMethod::Picard { iterations: m } })
}

/// Iterates sampled on the lattice `t0 q^i`, cached per `(iteration, i)`.
struct PicardEval<'a> {
    prob: &'a IVProblem,
    p: &'a QParams,
    t0: f64,
    iterates: RefCell<HashMap<(u32, usize), f64>>,
    forced: RefCell<HashMap<usize, f64>>,
}

impl<'a> PicardEval<'a> {
    fn new(prob: &'a IVProblem, p: &'a QParams, t0: f64) -> QResult<Self> {
        if prob.a > 0.0 && lattice_steps(t0, prob.a, p).is_none() {
            return Err(QError::domain(format!(
                "Picard iterates are sampled on the lattice of a = {}; t = {t0} is off it",
                prob.a
            )));
        }
        Ok(PicardEval {
            prob,
            p,
            t0,
            iterates: RefCell::new(HashMap::new()),
            forced: RefCell::new(HashMap::new()),
        })
    }

    fn point(&self, i: usize) -> f64 {
        self.t0 * self.p.q().powi(i as i32)
    }

    fn index_of(&self, x: f64, i: usize, s: f64) -> usize {
        i + ((s / x).ln() / self.p.q().ln()).round() as usize
    }

    fn y(&self, m: u32, i: usize) -> QResult<f64> {
        if m == 0 {
            return Ok(self.prob.a0);
        }
        let cached = self.iterates.borrow().get(&(m, i)).copied();
        if let Some(v) = cached {
            return Ok(v);
        }
        let x = self.point(i);
        let alpha = self.prob.alpha;
        let prev = Fallible(|s: f64| self.y(m - 1, self.index_of(x, i, s)));
        let mut v = self.prob.a0;
        if self.prob.lambda != 0.0 {
            v += self.prob.lambda * left_integral_raw(&prev, self.prob.a, alpha, x, self.p)?;
        }
        v += self.forced(i)?;
        self.iterates.borrow_mut().insert((m, i), v);
        Ok(v)
    }

    fn forced(&self, i: usize) -> QResult<f64> {
        let Some(f) = &self.prob.forcing else {
            return Ok(0.0);
        };
        let cached = self.forced.borrow().get(&i).copied();
        if let Some(v) = cached {
            return Ok(v);
        }
        let v = left_integral_raw(&**f, self.prob.a, self.prob.alpha, self.point(i), self.p)?;
        self.forced.borrow_mut().insert(i, v);
        Ok(v)
    }
}

/// `C_a^alpha y(t) - lambda y(t) - f(t)`.
pub fn ivp_residual<Y: QFunction + ?Sized>(prob: &IVProblem, y: &Y, t: f64, p: &QParams) -> QResult<f64> {
    if !(t > prob.a) {
        return Err(QError::domain(format!("residual needs t > a = {}, got {t}", prob.a)));
    }
    let order = FracOrder::new(prob.alpha)?;
    let lhs = left_caputo(y, prob.a, &order, t, p)?;
    Ok(lhs - prob.lambda * y.eval(t)? - prob.forcing_at(t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::q_exp_e;
    use approx::assert_relative_eq;

    fn p(q: f64) -> QParams {
        QParams::new(q).unwrap()
    }

    #[test]
    fn ml_with_zero_lambda() {
        let pp = p(0.5);
        for beta in [1.0, 0.5, 2.3] {
            let ml = MLParams::new(0.7, beta, 0.0, 0.1).unwrap();
            let v = q_mittag_leffler(&ml, 0.9, &pp).unwrap();
            assert_relative_eq!(v, 1.0 / q_gamma(beta, &pp).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn ml_reduces_to_e_q() {
        let pp = p(0.5);
        for (lam, z) in [(1.0, 0.5), (0.3, 1.0), (-0.8, 1.2)] {
            let ml = MLParams::new(1.0, 1.0, lam, 0.0).unwrap();
            let v = q_mittag_leffler(&ml, z, &pp).unwrap();
            assert_relative_eq!(v, q_exp_e(lam * z, &pp).unwrap(), max_relative = 1e-11);
        }
    }

    #[test]
    fn ml_regression_value() {
        // 40-digit oracle from an independent series evaluation
        let pp = p(0.5);
        let ml = MLParams::new(0.9, 1.0, 0.3, 0.0625).unwrap();
        let v = q_mittag_leffler(&ml, 1.0, &pp).unwrap();
        assert_relative_eq!(v, 1.3634725967451728, max_relative = 1e-11);
    }

    #[test]
    fn ml_rejects_z_below_z0() {
        let pp = p(0.5);
        let ml = MLParams::new(0.9, 1.0, 0.3, 0.5).unwrap();
        assert!(matches!(q_mittag_leffler(&ml, 0.25, &pp), Err(QError::Domain(_))));
        assert!(MLParams::new(0.0, 1.0, 0.3, 0.5).is_err());
    }

    #[test]
    fn problem_validation() {
        assert!(IVProblem::homogeneous(0.0, 1.0, 0.0, 1.0).is_err());
        assert!(IVProblem::homogeneous(1.2, 1.0, 0.0, 1.0).is_err());
        assert!(IVProblem::homogeneous(1.0, 1.0, -0.1, 1.0).is_err());
        assert!(IVProblem::homogeneous(1.0, 1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn trivial_problem_is_constant() {
        let pp = p(0.5);
        let prob = IVProblem::homogeneous(0.6, 0.0, 0.125, 2.5).unwrap();
        let y = solve_ivp_closed(&prob, &pp).unwrap();
        for t in [0.125, 0.25, 1.0] {
            assert_eq!(y.evaluate(t).unwrap(), 2.5);
        }
        let r = ivp_residual(&prob, &y, 1.0, &pp).unwrap();
        assert!(r.abs() <= 1e-11);
    }

    #[test]
    fn initial_value_is_reproduced() {
        let pp = p(0.5);
        let prob = IVProblem::homogeneous(0.9, 0.3, 0.0625, 1.7).unwrap();
        let y = solve_ivp_closed(&prob, &pp).unwrap();
        assert!((y.evaluate(0.0625).unwrap() - 1.7).abs() <= 10.0 * 1e-12 * 2.7);
        assert!(y.evaluate(0.03).is_err());
    }

    #[test]
    fn picard_first_iterates() {
        let pp = p(0.5);
        let (alpha, lam, a, a0) = (0.8, 0.4, 0.0625, 1.3);
        let prob = IVProblem::homogeneous(alpha, lam, a, a0).unwrap();
        let y0 = solve_ivp_picard(&prob, 0, &pp).unwrap();
        assert_eq!(y0.evaluate(0.5).unwrap(), a0);
        let y1 = solve_ivp_picard(&prob, 1, &pp).unwrap();
        for t in [0.125, 0.5, 1.0] {
            let expected = a0
                * (1.0 + lam * q_factorial_power(t, a, alpha, &pp).unwrap() / q_gamma(alpha + 1.0, &pp).unwrap());
            assert_relative_eq!(y1.evaluate(t).unwrap(), expected, max_relative = 1e-10);
        }
        assert!(y1.evaluate(0.3).is_err());
    }

    #[test]
    fn constant_is_not_a_solution() {
        let pp = p(0.5);
        let prob = IVProblem::homogeneous(0.9, 0.3, 0.0625, 2.0).unwrap();
        let r = ivp_residual(&prob, &|_s: f64| 2.0, 0.5, &pp).unwrap();
        assert_relative_eq!(r, -0.6, max_relative = 1e-14);
    }

    #[test]
    fn unit_order_solution_is_e_q() {
        let pp = p(0.5);
        let prob = IVProblem::homogeneous(1.0, 1.0, 0.0, 1.0).unwrap();
        let y = solve_ivp_closed(&prob, &pp).unwrap();
        for t in [0.25, 0.5, 1.0] {
            assert_relative_eq!(y.evaluate(t).unwrap(), q_exp_e(t, &pp).unwrap(), max_relative = 1e-11);
        }
    }
}
