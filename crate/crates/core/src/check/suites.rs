use std::sync::Arc;

use super::{Case, CheckConfig, Compare, Outcome, Suite};
use crate::error::QResult;
use crate::frac::{
    left_caputo, left_frac_integral, left_riemann_deriv, right_caputo, right_frac_integral,
    right_frac_integral_zero_extended, right_riemann_deriv, FracOrder, RightOpContext,
};
use crate::grid::GridPoint;
use crate::lcg::Lcg;
use crate::mittag::{ivp_residual, q_mittag_leffler, solve_ivp_closed, solve_ivp_picard, IVProblem, MLParams};
use crate::params::QParams;
use crate::qcore::{nabla_q, nabla_q_n, q_bracket, q_integral, q_integral_tail, Bound, Fallible, QFunction};
use crate::series::SeriesSum;
use crate::special::{q_exp_big_e, q_exp_e, q_factorial_power, q_factorial_power_on_grid, q_gamma, q_pochhammer};

const QS: [f64; 3] = [0.3, 0.5, 0.8];

type Probe = (&'static str, fn(f64) -> f64);

fn one(_: f64) -> f64 {
    1.0
}
fn lin(t: f64) -> f64 {
    t
}
fn sq(t: f64) -> f64 {
    t * t
}
fn lin_sq(t: f64) -> f64 {
    t + t * t
}
fn one_plus(t: f64) -> f64 {
    1.0 + t
}
fn cubic(t: f64) -> f64 {
    t * t * t - 2.0 * t
}
fn inv2(t: f64) -> f64 {
    1.0 / (t * t)
}
fn inv3(t: f64) -> f64 {
    1.0 / (t * t * t)
}
fn inv4(t: f64) -> f64 {
    let t2 = t * t;
    1.0 / (t2 * t2)
}

const POLYS: [Probe; 3] = [("f=1+t", one_plus), ("f=t^2", sq), ("f=t^3-2t", cubic)];
const FRAC_FNS: [Probe; 4] = [("f=1", one), ("f=t", lin), ("f=t^2", sq), ("f=t+t^2", lin_sq)];

fn horner(c: &[f64; 4], x: f64) -> f64 {
    ((c[3] * x + c[2]) * x + c[1]) * x + c[0]
}

fn near_integer(x: f64, gap: f64) -> bool {
    (x - x.round()).abs() < gap
}

/// Seeded real exponents in `[lo, hi)` kept `gap` away from every integer.
fn draw_exponent(rng: &mut Lcg, lo: f64, hi: f64, gap: f64) -> f64 {
    loop {
        let x = rng.uniform(lo, hi);
        if !near_integer(x, gap) {
            return x;
        }
    }
}

/// Lattice points `q^3, q^2, q, 1` used as evaluation points.
fn sweep_t(q: f64) -> [f64; 4] {
    [q.powi(3), q.powi(2), q, 1.0]
}

pub(super) fn core(cfg: &CheckConfig, out: &mut Vec<Case>) -> QResult<()> {
    let tol = 10.0 * cfg.truncation.rel_tol;
    let machine = 64.0 * f64::EPSILON;
    for q in QS {
        let p = cfg.params(q)?;
        for n in -5..=10 {
            let t = q.powi(n);
            for (name, f) in POLYS {
                let run = move || {
                    let big = Fallible(|x: f64| q_integral(&f, 0.0, x, &p));
                    Ok(Outcome::new(nabla_q(&big, t, &p)?, f(t)))
                };
                out.push(
                    Case::new("fundamental_theorem", Suite::Core, q, Compare::Relative(tol), Box::new(run))
                        .a(0.0)
                        .t(t)
                        .detail(name),
                );
            }
            if n >= 0 {
                let run = move || {
                    let f = Fallible(|s: f64| q_exp_e(s, &p));
                    let big = Fallible(|x: f64| q_integral(&f, 0.0, x, &p));
                    Ok(Outcome::new(nabla_q(&big, t, &p)?, q_exp_e(t, &p)?))
                };
                out.push(
                    Case::new("fundamental_theorem", Suite::Core, q, Compare::Relative(tol), Box::new(run))
                        .a(0.0)
                        .t(t)
                        .detail("f=e_q"),
                );
            }
            for (name, f) in POLYS {
                let run = move || {
                    let df = Fallible(|s: f64| nabla_q(&f, s, &p));
                    Ok(Outcome::new(q_integral(&df, 0.0, t, &p)?, f(t) - f(0.0)))
                };
                out.push(
                    Case::new("continuity", Suite::Core, q, Compare::Relative(tol), Box::new(run))
                        .a(0.0)
                        .t(t)
                        .detail(name),
                );
            }
        }
    }

    let mut rng = Lcg::new(cfg.seed);
    for q in QS {
        let p = cfg.params(q)?;
        for pair in 0..8 {
            let mut coeffs = || [0; 4].map(|_| rng.uniform(-2.0, 2.0));
            let (cf, cg) = (coeffs(), coeffs());
            for n in -2..=5 {
                let t = q.powi(n);
                let run = move || {
                    let f = |x: f64| horner(&cf, x);
                    let g = |x: f64| horner(&cg, x);
                    let fg = |x: f64| f(x) * g(x);
                    let lhs = nabla_q(&fg, t, &p)?;
                    let rhs = nabla_q(&f, t, &p)? * g(t) + f(q * t) * nabla_q(&g, t, &p)?;
                    let scale = (fg(t).abs() + fg(q * t).abs()) / ((1.0 - q) * t);
                    Ok(Outcome::scaled(lhs, rhs, scale))
                };
                out.push(
                    Case::new("product_rule", Suite::Core, q, Compare::Relative(machine), Box::new(run))
                        .t(t)
                        .detail(format!("seeded cubic pair {pair}")),
                );
            }
        }
    }

    for q in QS {
        let p = cfg.params(q)?;
        for n in [-2, 0, 2] {
            let t = q.powi(n);
            for j in 0..3 {
                for k in 0..3 {
                    let kern = move |x: f64, s: f64| x.powi(j) * s.powi(k);
                    for a in [0.0, q.powi(n + 3)] {
                        let run = move || {
                            let big = Fallible(|x: f64| q_integral(&|s: f64| kern(x, s), a, x, &p));
                            let lhs = nabla_q(&big, t, &p)?;
                            let dt = Fallible(|s: f64| nabla_q(&|x: f64| kern(x, s), t, &p));
                            let rhs = q_integral(&dt, a, t, &p)? + kern(q * t, t);
                            Ok(Outcome::new(lhs, rhs))
                        };
                        out.push(
                            Case::new("differentiate_left_limit", Suite::Core, q, Compare::Relative(tol), Box::new(run))
                                .a(a)
                                .t(t)
                                .detail(format!("f=t^{j} s^{k}")),
                        );
                    }
                    let b = q.powi(n - 2);
                    let run = move || {
                        let big =
                            Fallible(|x: f64| q_integral_tail(&|s: f64| kern(x, s), x, Bound::Finite(b), &p));
                        let lhs = nabla_q(&big, t, &p)?;
                        let dt = Fallible(|s: f64| nabla_q(&|x: f64| kern(x, s), t, &p));
                        let rhs = q_integral_tail(&dt, q * t, Bound::Finite(b), &p)? - kern(t, t);
                        Ok(Outcome::new(lhs, rhs))
                    };
                    out.push(
                        Case::new("differentiate_right_limit", Suite::Core, q, Compare::Relative(tol), Box::new(run))
                            .b(b)
                            .t(t)
                            .detail(format!("f=t^{j} s^{k}")),
                    );
                }
            }
        }
    }

    for q in QS {
        let p = cfg.params(q)?;
        let triples = [(q.powi(4), q.powi(2), 1.0), (0.0, 0.31, 1.0), (0.07, 0.31, 0.9)];
        for (a, b, c) in triples {
            for (name, f) in POLYS {
                let run = move || {
                    let whole = q_integral(&f, a, c, &p)?;
                    let parts = q_integral(&f, a, b, &p)? + q_integral(&f, b, c, &p)?;
                    Ok(Outcome::new(whole, parts))
                };
                out.push(
                    Case::new("additivity", Suite::Core, q, Compare::Relative(1e-12), Box::new(run))
                        .a(a)
                        .b(b)
                        .t(c)
                        .detail(name),
                );
            }
        }
    }
    Ok(())
}

pub(super) fn special(cfg: &CheckConfig, out: &mut Vec<Case>) -> QResult<()> {
    let gamma = cfg.gamma();
    for q in [0.3, 0.5, 0.9] {
        let p = cfg.params(q)?;
        for alpha in [0.3, 0.5, 1.7, 2.4] {
            let run = move || {
                let lhs = gamma(alpha + 1.0, &p)?;
                let rhs = q_bracket(alpha, &p) * gamma(alpha, &p)?;
                Ok(Outcome::new(lhs, rhs))
            };
            out.push(Case::new("gamma_recurrence", Suite::Special, q, Compare::Relative(1e-10), Box::new(run)).alpha(alpha));
        }
    }

    let mut rng = Lcg::new(cfg.seed ^ 0x5eed_0001);
    for q in QS {
        let p = cfg.params(q)?;
        let mut pairs = Vec::new();
        while pairs.len() < 6 {
            let beta = draw_exponent(&mut rng, -1.5, 2.5, 0.05);
            let gam = draw_exponent(&mut rng, -1.5, 2.5, 0.05);
            if !near_integer(beta + gam, 0.05) {
                pairs.push((beta, gam));
            }
        }
        for (beta, gam) in pairs {
            for m in 1..=5 {
                let s = q.powi(m);
                let run = move || {
                    let lhs = q_factorial_power(1.0, s, beta + gam, &p)?;
                    let rhs = q_factorial_power(1.0, s, beta, &p)? * q_factorial_power(1.0, p.pow(beta) * s, gam, &p)?;
                    Ok(Outcome::new(lhs, rhs))
                };
                out.push(
                    Case::new("factorial_power_split", Suite::Special, q, Compare::Relative(1e-9), Box::new(run))
                        .alpha(beta)
                        .beta(gam)
                        .t(1.0)
                        .detail(format!("s=q^{m}")),
                );
            }
        }
        for _ in 0..4 {
            let beta = draw_exponent(&mut rng, -1.5, 2.5, 0.05);
            for scale in [q * q, q, 2.0] {
                for m in 1..=3 {
                    let s = q.powi(m);
                    let run = move || {
                        let lhs = q_factorial_power(scale, scale * s, beta, &p)?;
                        let rhs = scale.powf(beta) * q_factorial_power(1.0, s, beta, &p)?;
                        Ok(Outcome::new(lhs, rhs))
                    };
                    out.push(
                        Case::new("factorial_power_scaling", Suite::Special, q, Compare::Relative(1e-9), Box::new(run))
                            .alpha(beta)
                            .t(1.0)
                            .detail(format!("scale={scale}, s=q^{m}")),
                    );
                }
            }
        }
        for _ in 0..6 {
            let alpha = draw_exponent(&mut rng, -1.5, 2.5, 0.05);
            for m in 1..=4 {
                let s = q.powi(m);
                let run = move || {
                    let lhs = nabla_q(&Fallible(|x: f64| q_factorial_power(x, s, alpha, &p)), 1.0, &p)?;
                    let rhs = q_bracket(alpha, &p) * q_factorial_power(1.0, s, alpha - 1.0, &p)?;
                    Ok(Outcome::new(lhs, rhs))
                };
                out.push(
                    Case::new("factorial_power_dt", Suite::Special, q, Compare::Relative(1e-9), Box::new(run))
                        .alpha(alpha)
                        .t(1.0)
                        .detail(format!("s=q^{m}")),
                );
                let run = move || {
                    let lhs = nabla_q(&Fallible(|y: f64| q_factorial_power(1.0, y, alpha, &p)), s, &p)?;
                    let rhs = -q_bracket(alpha, &p) * q_factorial_power(1.0, q * s, alpha - 1.0, &p)?;
                    Ok(Outcome::new(lhs, rhs))
                };
                out.push(
                    Case::new("factorial_power_ds", Suite::Special, q, Compare::Relative(1e-9), Box::new(run))
                        .alpha(alpha)
                        .t(1.0)
                        .detail(format!("s=q^{m}")),
                );
            }
        }
    }

    for q in QS {
        let p = cfg.params(q)?;
        for t in [0.1, 0.5, 0.9] {
            let run = move || Ok(Outcome::new(q_exp_e(t, &p)?, q_exp_big_e((1.0 - q) * t, &p)?));
            out.push(Case::new("exp_relation", Suite::Special, q, Compare::Relative(1e-10), Box::new(run)).t(t));
        }
        for t in [0.1f64, 0.25, 0.5, 0.9] {
            let run = move || {
                let series = SeriesSum::run("E_q series", p.trunc(), |n| Ok(t.powi(n as i32) / q_pochhammer(n as u32, &p)))?;
                Ok(Outcome::new(q_exp_big_e(t, &p)?, series))
            };
            out.push(
                Case::new("big_e_product_series", Suite::Special, q, Compare::Relative(1e-10), Box::new(run)).t(t),
            );
        }
        for k in [0i64, 2] {
            let t = GridPoint::tq(k);
            for alpha in [0.5f64, 1.7, 2.0, 3.0] {
                let reach = if alpha.fract() == 0.0 { alpha as i64 } else { 3 };
                for j in 0..reach {
                    let s = t.shifted(-j);
                    let run = move || Ok(Outcome::new(q_factorial_power_on_grid(t, s, alpha, &p)?, 0.0));
                    out.push(
                        Case::new("factorial_power_vanishing", Suite::Special, q, Compare::Exact, Box::new(run))
                            .alpha(alpha)
                            .t(t.value(&p))
                            .detail(format!("s=t q^-{j}")),
                    );
                }
            }
        }
    }
    Ok(())
}

fn order(alpha: f64) -> QResult<FracOrder> {
    FracOrder::new(alpha)
}

pub(super) fn frac(cfg: &CheckConfig, out: &mut Vec<Case>) -> QResult<()> {
    let tol = 1e-6;
    for q in QS {
        let p = cfg.params(q)?;
        for a in [0.0, q.powi(3)] {
            for alpha in [0.5, 1.0, 1.7] {
                for mu in [0.0, 0.5, 1.0, 2.0] {
                    for t in [q * q, q, 1.0] {
                        let run = move || {
                            let f = Fallible(|x: f64| q_factorial_power(x, a, mu, &p));
                            let lhs = left_frac_integral(&f, a, &order(alpha)?, t, &p)?;
                            let coef = q_gamma(mu + 1.0, &p)? / q_gamma(alpha + mu + 1.0, &p)?;
                            Ok(Outcome::new(lhs, coef * q_factorial_power(t, a, mu + alpha, &p)?))
                        };
                        out.push(
                            Case::new("power_rule", Suite::Frac, q, Compare::Relative(1e-8), Box::new(run))
                                .alpha(alpha)
                                .beta(mu)
                                .a(a)
                                .t(t)
                                .detail(format!("mu={mu}")),
                        );
                    }
                }
            }
        }

        let orders = [0.4, 0.9, 1.3];
        for a in [0.0, q.powi(3)] {
            for t in sweep_t(q).into_iter().filter(|&t| t > a * (1.0 + 1e-9)) {
                for alpha in orders {
                    for beta in orders {
                        for (name, f) in FRAC_FNS {
                            let run = move || {
                                let inner = Fallible(|x: f64| left_frac_integral(&f, a, &order(alpha)?, x, &p));
                                let lhs = left_frac_integral(&inner, a, &order(beta)?, t, &p)?;
                                let rhs = left_frac_integral(&f, a, &order(alpha + beta)?, t, &p)?;
                                Ok(Outcome::new(lhs, rhs))
                            };
                            out.push(
                                Case::new("left_semigroup", Suite::Frac, q, Compare::Relative(tol), Box::new(run))
                                    .alpha(alpha)
                                    .beta(beta)
                                    .a(a)
                                    .t(t)
                                    .detail(name),
                            );
                        }
                    }
                }
            }
        }

        for n in [1u32, 2] {
            for a in [0.0, q.powi(3)] {
                for t in sweep_t(q).into_iter().filter(|&t| a == 0.0 || t * q.powi(n as i32) >= a * (1.0 - 1e-9)) {
                    for (name, f) in FRAC_FNS {
                        let run = move || {
                            let inner = Fallible(|x: f64| left_frac_integral(&f, a, &order(n as f64)?, x, &p));
                            Ok(Outcome::new(nabla_q_n(&inner, n, t, &p)?, f(t)))
                        };
                        out.push(
                            Case::new("left_integral_inverse", Suite::Frac, q, Compare::Relative(tol), Box::new(run))
                                .alpha(n as f64)
                                .a(a)
                                .t(t)
                                .detail(name),
                        );
                    }
                }
            }
            let decaying: &[Probe] = if n == 1 {
                &[("f=t^-2", inv2), ("f=t^-3", inv3)]
            } else {
                &[("f=t^-3", inv3), ("f=t^-4", inv4)]
            };
            for &(name, f) in decaying {
                for t in sweep_t(q) {
                    let run = move || {
                        let ctx = RightOpContext::infinite();
                        let inner = Fallible(|x: f64| right_frac_integral(&f, &ctx, &order(n as f64)?, x, &p));
                        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                        Ok(Outcome::new(sign * nabla_q_n(&inner, n, t, &p)?, f(t)))
                    };
                    out.push(
                        Case::new("right_integral_inverse", Suite::Frac, q, Compare::Relative(1e-8), Box::new(run))
                            .alpha(n as f64)
                            .b(f64::INFINITY)
                            .t(t)
                            .detail(format!("{name}, b=inf")),
                    );
                }
            }
        }

        for t in sweep_t(q) {
            let run = move || {
                let lhs = right_frac_integral(&inv2, &RightOpContext::infinite(), &order(1.0)?, t, &p)?;
                Ok(Outcome::new(lhs, q / t))
            };
            out.push(
                Case::new("right_integral_tail_value", Suite::Frac, q, Compare::Relative(1e-8), Box::new(run))
                    .alpha(1.0)
                    .b(f64::INFINITY)
                    .t(t)
                    .detail("f=t^-2, b=inf"),
            );
        }

        for (name, f, decay) in [("f=t^-3", inv3 as fn(f64) -> f64, 3.0), ("f=t^-4", inv4, 4.0)] {
            for alpha in orders {
                for beta in orders {
                    if alpha + beta > decay - 1.0 {
                        continue;
                    }
                    for t in sweep_t(q) {
                        let run = move || {
                            let ctx = RightOpContext::infinite();
                            let inner = Fallible(|x: f64| right_frac_integral(&f, &ctx, &order(alpha)?, x, &p));
                            let lhs = right_frac_integral(&inner, &ctx, &order(beta)?, t, &p)?;
                            let rhs = right_frac_integral(&f, &ctx, &order(alpha + beta)?, t, &p)?;
                            Ok(Outcome::new(lhs, rhs))
                        };
                        out.push(
                            Case::new("right_semigroup", Suite::Frac, q, Compare::Relative(tol), Box::new(run))
                                .alpha(alpha)
                                .beta(beta)
                                .b(f64::INFINITY)
                                .t(t)
                                .detail(format!("{name}, b=inf")),
                        );
                    }
                }
            }
        }

        for bn in [0i64, -2] {
            let b = q.powi(bn as i32);
            for alpha in orders {
                for beta in orders {
                    for (name, f) in FRAC_FNS {
                        let x = b * q;
                        let run = move || {
                            let ctx = RightOpContext::finite(GridPoint::tq(bn))?;
                            let inner =
                                Fallible(|y: f64| right_frac_integral_zero_extended(&f, &ctx, &order(alpha)?, y, &p));
                            let shift = p.pow(1.0 - beta);
                            let kernel =
                                Fallible(|s: f64| Ok(q_factorial_power(s, x, beta - 1.0, &p)? * inner.eval(s * shift)?));
                            Ok(Outcome::new(q_integral_tail(&kernel, b, Bound::Infinite, &p)?, 0.0))
                        };
                        out.push(
                            Case::new("right_integral_beyond_b", Suite::Frac, q, Compare::Exact, Box::new(run))
                                .alpha(alpha)
                                .beta(beta)
                                .b(b)
                                .t(x)
                                .detail(name),
                        );
                    }
                }
            }
        }

        for a in [0.0, q.powi(3)] {
            for t in sweep_t(q).into_iter().filter(|&t| t > a * (1.0 + 1e-9)) {
                for alpha in orders {
                    for (name, f) in FRAC_FNS {
                        let run = move || {
                            let df = Fallible(|s: f64| nabla_q(&f, s, &p));
                            let lhs = left_frac_integral(&df, a, &order(alpha)?, t, &p)?;
                            let big = Fallible(|x: f64| left_frac_integral(&f, a, &order(alpha)?, x, &p));
                            let boundary = q_factorial_power(t, a, alpha - 1.0, &p)? * f(a) / q_gamma(alpha, &p)?;
                            Ok(Outcome::with_terms(lhs, &[nabla_q(&big, t, &p)?, -boundary]))
                        };
                        out.push(
                            Case::new("left_integral_of_derivative", Suite::Frac, q, Compare::Relative(tol), Box::new(run))
                                .alpha(alpha)
                                .a(a)
                                .t(t)
                                .detail(name),
                        );
                    }
                }
            }
        }

        let a = q.powi(3);
        for t in sweep_t(q).into_iter().filter(|&t| t * q * q >= a * (1.0 - 1e-9)) {
            for alpha in [1.5, 2.3] {
                for (name, f) in FRAC_FNS {
                    let run = move || {
                        let d2 = Fallible(|s: f64| nabla_q_n(&f, 2, s, &p));
                        let lhs = left_frac_integral(&d2, a, &order(alpha)?, t, &p)?;
                        let big = Fallible(|x: f64| left_frac_integral(&f, a, &order(alpha)?, x, &p));
                        let mut terms = vec![nabla_q_n(&big, 2, t, &p)?];
                        for k in 0..2u32 {
                            let e = alpha - 2.0 + k as f64;
                            terms.push(-q_factorial_power(t, a, e, &p)? / q_gamma(e + 1.0, &p)? * nabla_q_n(&f, k, a, &p)?);
                        }
                        Ok(Outcome::with_terms(lhs, &terms))
                    };
                    out.push(
                        Case::new("left_integral_of_second_derivative", Suite::Frac, q, Compare::Relative(tol), Box::new(run))
                            .alpha(alpha)
                            .a(a)
                            .t(t)
                            .detail(name),
                    );
                }
            }
        }

        for bn in [0i64, -2] {
            let b = q.powi(bn as i32);
            for t in sweep_t(q).into_iter().filter(|&t| t <= b * (1.0 + 1e-9)) {
                for alpha in orders {
                    for (name, f) in FRAC_FNS {
                        let run = move || {
                            let ctx = RightOpContext::finite(GridPoint::tq(bn))?;
                            let mdf = Fallible(|s: f64| Ok(-nabla_q(&f, s, &p)?));
                            let lhs = right_frac_integral(&mdf, &ctx.raised(), &order(alpha)?, t, &p)?;
                            let big = Fallible(|x: f64| right_frac_integral(&f, &ctx, &order(alpha)?, x, &p));
                            let boundary = p.r_coef(alpha) / q_gamma(alpha, &p)?
                                * q_factorial_power(b, q * t, alpha - 1.0, &p)?
                                * f(p.pow(1.0 - alpha) * b / q);
                            Ok(Outcome::with_terms(lhs, &[-nabla_q(&big, t, &p)?, -boundary]))
                        };
                        out.push(
                            Case::new("right_integral_of_derivative", Suite::Frac, q, Compare::Relative(tol), Box::new(run))
                                .alpha(alpha)
                                .b(b)
                                .t(t)
                                .detail(name),
                        );
                    }
                }
            }
        }

        let small = [0.4, 0.6, 0.9];
        for a in [0.0, q.powi(3)] {
            for t in sweep_t(q).into_iter().filter(|&t| t > a * (1.0 + 1e-9)) {
                for alpha in small {
                    for (name, f) in FRAC_FNS {
                        let run = move || {
                            let ord = order(alpha)?;
                            let lhs = left_caputo(&f, a, &ord, t, &p)?;
                            let riemann = left_riemann_deriv(&f, a, &ord, t, &p)?;
                            let boundary = q_factorial_power(t, a, -alpha, &p)? * f(a) / q_gamma(1.0 - alpha, &p)?;
                            Ok(Outcome::with_terms(lhs, &[riemann, -boundary]))
                        };
                        out.push(
                            Case::new("caputo_riemann_left", Suite::Frac, q, Compare::Relative(tol), Box::new(run))
                                .alpha(alpha)
                                .a(a)
                                .t(t)
                                .detail(name),
                        );
                    }
                }
            }
        }
        for bn in [0i64, -2] {
            let b = q.powi(bn as i32);
            for t in sweep_t(q).into_iter().filter(|&t| t <= b * (1.0 + 1e-9)) {
                for alpha in small {
                    for (name, f) in FRAC_FNS {
                        let run = move || {
                            let ord = order(alpha)?;
                            let ctx = RightOpContext::finite(GridPoint::tq(bn))?;
                            let lhs = right_caputo(&f, &ctx.raised(), &ord, t, &p)?;
                            let riemann = right_riemann_deriv(&f, &ctx, &ord, t, &p)?;
                            let boundary = p.r_coef(1.0 - alpha) / q_gamma(1.0 - alpha, &p)?
                                * q_factorial_power(b, q * t, -alpha, &p)?
                                * f(p.pow(alpha) * b / q);
                            Ok(Outcome::with_terms(lhs, &[riemann, -boundary]))
                        };
                        out.push(
                            Case::new("caputo_riemann_right", Suite::Frac, q, Compare::Relative(tol), Box::new(run))
                                .alpha(alpha)
                                .b(b)
                                .t(t)
                                .detail(name),
                        );
                    }
                }
            }
        }

        let cases: [(f64, f64); 9] = [
            (0.4, 0.0),
            (0.7, 0.0),
            (0.9, 0.0),
            (1.0, 0.0),
            (0.4, a),
            (0.7, a),
            (0.9, a),
            (1.0, a),
            (1.6, a),
        ];
        for (alpha, a) in cases {
            for t in sweep_t(q).into_iter().filter(|&t| t > a * (1.0 + 1e-9)) {
                for (name, f) in FRAC_FNS {
                    let run = move || {
                        let ord = order(alpha)?;
                        let c = Fallible(|s: f64| left_caputo(&f, a, &ord, s, &p));
                        let lhs = left_frac_integral(&c, a, &ord, t, &p)?;
                        let mut terms = vec![f(t)];
                        for k in 0..ord.n() {
                            terms.push(
                                -q_factorial_power(t, a, k as f64, &p)? / q_gamma(k as f64 + 1.0, &p)?
                                    * nabla_q_n(&f, k, a, &p)?,
                            );
                        }
                        Ok(Outcome::with_terms(lhs, &terms))
                    };
                    out.push(
                        Case::new("integral_of_caputo", Suite::Frac, q, Compare::Relative(tol), Box::new(run))
                            .alpha(alpha)
                            .a(a)
                            .t(t)
                            .detail(name),
                    );
                }
            }
        }
    }
    Ok(())
}

fn forcing_t(s: f64) -> f64 {
    s
}

pub(super) fn ivp(cfg: &CheckConfig, out: &mut Vec<Case>) -> QResult<()> {
    let reference = |q: f64| -> QResult<Vec<(&'static str, IVProblem)>> {
        Ok(vec![
            ("a=q^4, f=0", IVProblem::homogeneous(0.9, 0.3, q.powi(4), 1.0)?),
            ("a=0, f=t", IVProblem::homogeneous(0.9, 0.3, 0.0, 1.0)?.with_forcing(Arc::new(forcing_t))),
        ])
    };

    for q in [0.3, 0.5] {
        let p = cfg.params(q)?;
        for alpha in [0.5, 0.9] {
            for lambda in [-0.3, 0.3] {
                let probs = [
                    ("a=q^4, f=0", IVProblem::homogeneous(alpha, lambda, q.powi(4), 1.0)?),
                    ("a=0, f=t", IVProblem::homogeneous(alpha, lambda, 0.0, 1.0)?.with_forcing(Arc::new(forcing_t))),
                ];
                for (name, prob) in probs {
                    for t in sweep_t(q) {
                        let a = prob.a();
                        let prob = prob.clone();
                        let run = move || {
                            let y = solve_ivp_closed(&prob, &p)?;
                            let ord = order(prob.alpha())?;
                            let mut rhs = prob.a0() + prob.lambda() * left_frac_integral(&y, prob.a(), &ord, t, &p)?;
                            if let Some(f) = prob.forcing() {
                                rhs += left_frac_integral(&**f, prob.a(), &ord, t, &p)?;
                            }
                            Ok(Outcome::new(y.evaluate(t)?, rhs))
                        };
                        out.push(
                            Case::new("fixed_point", Suite::Ivp, q, Compare::Relative(1e-6), Box::new(run))
                                .alpha(alpha)
                                .beta(lambda)
                                .a(a)
                                .t(t)
                                .detail(format!("{name}, lambda={lambda}")),
                        );
                    }
                }
            }
        }
    }

    let q = 0.5;
    let p = cfg.params(q)?;
    for (name, prob) in reference(q)? {
        for t in sweep_t(q) {
            let pr = prob.clone();
            let run = move || {
                let closed = solve_ivp_closed(&pr, &p)?.evaluate(t)?;
                let picard = solve_ivp_picard(&pr, 25, &p)?.evaluate(t)?;
                Ok(Outcome::new(picard, closed))
            };
            out.push(
                Case::new("picard_matches_closed_form", Suite::Ivp, q, Compare::Relative(1e-6), Box::new(run))
                    .alpha(prob.alpha())
                    .beta(prob.lambda())
                    .a(prob.a())
                    .t(t)
                    .detail(format!("{name}, m=25")),
            );
            let pr = prob.clone();
            let run = move || {
                let y = solve_ivp_closed(&pr, &p)?;
                Ok(Outcome::new(ivp_residual(&pr, &y, t, &p)?.abs(), 0.0))
            };
            out.push(
                Case::new("residual", Suite::Ivp, q, Compare::AtMost(1e-5), Box::new(run))
                    .alpha(prob.alpha())
                    .beta(prob.lambda())
                    .a(prob.a())
                    .t(t)
                    .detail(name),
            );
        }
        let steps = [5u32, 10, 15, 20, 25];
        for w in steps.windows(2) {
            let (m0, m1) = (w[0], w[1]);
            let pr = prob.clone();
            let run = move || {
                let mut errs = [0.0f64; 2];
                for t in sweep_t(q) {
                    let closed = solve_ivp_closed(&pr, &p)?.evaluate(t)?;
                    for (e, m) in errs.iter_mut().zip([m0, m1]) {
                        *e = e.max((solve_ivp_picard(&pr, m, &p)?.evaluate(t)? - closed).abs());
                    }
                }
                Ok(Outcome::new(errs[1], errs[0]))
            };
            out.push(
                Case::new("picard_error_monotone", Suite::Ivp, q, Compare::AtMost(1e-9), Box::new(run))
                    .alpha(prob.alpha())
                    .beta(prob.lambda())
                    .a(prob.a())
                    .detail(format!("{name}, max error m={m1} vs m={m0}")),
            );
        }
    }

    for q in QS {
        let p = cfg.params(q)?;
        for t in sweep_t(q) {
            let run = move || {
                let prob = IVProblem::homogeneous(1.0, 1.0, 0.0, 1.0)?;
                Ok(Outcome::new(solve_ivp_closed(&prob, &p)?.evaluate(t)?, q_exp_e(t, &p)?))
            };
            out.push(
                Case::new("unit_order_exponential", Suite::Ivp, q, Compare::Relative(1e-8), Box::new(run))
                    .alpha(1.0)
                    .beta(1.0)
                    .a(0.0)
                    .t(t),
            );
        }
    }

    for q in [0.3, 0.5, 0.8] {
        let p = cfg.params(q)?;
        let a = q.powi(4);
        for alpha in [0.5, 0.9] {
            let lambda = 0.3f64;
            for k in 1..=5u32 {
                for t in [q * q, 1.0] {
                    let run = move || {
                        let ord = order(alpha)?;
                        let picard = iterated_integral(k, a, &ord, t, &p)? * lambda.powi(k as i32);
                        let kf = k as f64;
                        let term = lambda.powi(k as i32) * q_factorial_power(t, a, kf * alpha, &p)?
                            / q_gamma(kf * alpha + 1.0, &p)?;
                        Ok(Outcome::new(picard, term))
                    };
                    out.push(
                        Case::new("mittag_leffler_term", Suite::Ivp, q, Compare::Relative(1e-9), Box::new(run))
                            .alpha(alpha)
                            .beta(lambda)
                            .a(a)
                            .t(t)
                            .detail(format!("k={k}")),
                    );
                }
            }
        }
    }

    for q in QS {
        let p = cfg.params(q)?;
        let run = move || {
            let ml = MLParams::new(0.5, 1.0, 0.0, 0.0)?;
            Ok(Outcome::new(q_mittag_leffler(&ml, 0.7, &p)?, 1.0))
        };
        out.push(
            Case::new("mittag_leffler_zero_lambda", Suite::Ivp, q, Compare::Relative(1e-15), Box::new(run))
                .alpha(0.5)
                .beta(0.0)
                .a(0.0)
                .t(0.7),
        );
    }
    Ok(())
}

/// `(I_a^alpha)^k 1` evaluated by nesting the numerical integral `k` times.
fn iterated_integral(k: u32, a: f64, ord: &FracOrder, t: f64, p: &QParams) -> QResult<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let inner = Fallible(|x: f64| iterated_integral(k - 1, a, ord, x, p));
    left_frac_integral(&inner, a, ord, t, p)
}
