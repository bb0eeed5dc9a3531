mod common;

use common::{fd_max_rel_err, rel_err};

#[test]
fn analytic_gradients_match_central_differences() {
    let o = common::criteria::gradients();
    assert!(o.pass, "{}", o.detail);
}

#[test]
fn checker_flags_a_wrong_gradient() {
    let f = |x: &[f64]| x[0] * x[0] + 3.0 * x[1];
    let x = [0.7, -1.2];
    assert!(fd_max_rel_err(&x, &[1.4, 3.0], 1e-5, 1e-3, f) < 1e-8);
    assert!(fd_max_rel_err(&x, &[1.4, 3.003], 1e-5, 1e-3, f) > 5e-4);
    assert!(fd_max_rel_err(&x, &[0.7, 3.0], 1e-5, 1e-3, f) > 0.4);
}

#[test]
fn relative_error_uses_the_floor_near_zero() {
    assert_eq!(rel_err(1e-9, 0.0, 1e-3), 1e-6);
    assert_eq!(rel_err(2.0, 1.0, 1e-3), 0.5);
}
