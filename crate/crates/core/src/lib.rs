//! Numerical q-fractional calculus on the time scale `T_q = {q^n} ∪ {0}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`]: the nabla q-derivative and Jackson integrals,
//! * [`special`]: q-factorial powers, `Gamma_q`, q-Pochhammer, `e_q`, `E_q`,
//! * [`frac`]: left/right fractional q-integrals, Riemann and Caputo derivatives,
//! * [`mittag`]: the q-Mittag-Leffler function and the Caputo initial value problem,
//! * [`check`]: the identity harness behind `qfrac check`,
//! * [`explore`]: residual sweeps for the finite-`b` right semigroup.
//!
//! Every infinite sum and product is truncated by one policy, [`Truncation`].

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod error;
pub mod explore;
pub mod expr;
pub mod frac;
pub mod grid;
pub mod lcg;
pub mod mittag;
pub mod params;
pub mod qcore;
pub mod series;
pub mod special;

pub use error::{QError, QResult};
pub use frac::{
    left_caputo, left_frac_integral, left_riemann_deriv, left_riemann_deriv_composed, right_caputo,
    right_frac_integral, right_frac_integral_zero_extended, right_nabla, right_riemann_deriv,
    right_riemann_deriv_composed, FracOrder, RightOpContext,
};
pub use grid::GridPoint;
pub use mittag::{
    ivp_residual, q_mittag_leffler, solve_ivp_closed, solve_ivp_picard, Evaluation, Forcing, IVPSolution, IVProblem,
    MLParams, SolveMethod,
};
pub use params::{QParams, Truncation};
pub use qcore::{nabla_q, nabla_q_n, q_bracket, q_integral, q_integral_tail, Bound, Fallible, QFunction};
pub use special::{q_exp_big_e, q_exp_e, q_factorial_power, q_factorial_power_on_grid, q_gamma, q_pochhammer};
