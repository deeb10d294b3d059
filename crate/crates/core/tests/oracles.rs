//! Reference values computed independently at 40 significant digits and
//! frozen here. Tolerances reflect the default truncation policy.

use approx::assert_relative_eq;
use qfrac_core::{
    left_frac_integral, q_exp_big_e, q_exp_e, q_gamma, q_mittag_leffler, Fallible, FracOrder, MLParams, QParams,
};

fn half() -> QParams {
    QParams::new(0.5).unwrap()
}

#[test]
fn gamma_at_half() {
    assert_relative_eq!(q_gamma(0.5, &half()).unwrap(), 1.5720327257863239, max_relative = 1e-11);
    assert_relative_eq!(1.0 / q_gamma(0.5, &half()).unwrap(), 0.6361190728391512, max_relative = 1e-11);
    assert_relative_eq!(1.0 / q_gamma(1.5, &half()).unwrap(), 1.0859231828858144, max_relative = 1e-11);
}

#[test]
fn exponentials_at_half() {
    let p = half();
    assert_relative_eq!(q_exp_e(0.5, &p).unwrap(), 1.731373309727532, max_relative = 1e-12);
    assert_relative_eq!(q_exp_big_e(0.25, &p).unwrap(), 1.731373309727532, max_relative = 1e-12);
}

#[test]
fn mittag_leffler_reference_point() {
    let p = half();
    let ml = MLParams::new(0.9, 1.0, 0.3, 0.5f64.powi(4)).unwrap();
    assert_relative_eq!(q_mittag_leffler(&ml, 1.0, &p).unwrap(), 1.3634725967451728, max_relative = 1e-11);
}

#[test]
fn first_order_integral_of_identity() {
    // int_0^1 s nabla s = 1 / (1 + q)
    let p = half();
    let v = left_frac_integral(&Fallible(|s: f64| Ok(s)), 0.0, &FracOrder::new(1.0).unwrap(), 1.0, &p).unwrap();
    assert_relative_eq!(v, 2.0 / 3.0, max_relative = 1e-12);
}
