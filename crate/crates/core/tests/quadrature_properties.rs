use conformal_isometry::expr::{parse, ComplexValue, ExprTree};
use conformal_isometry::quadrature::{
    fixed_gauss_exp_f, integrate_along_polyline, integrate_exp_f, QuadratureConfig,
};
use proptest::prelude::*;

fn entire() -> impl Strategy<Value = ExprTree> {
    prop_oneof![
        Just("0"),
        Just("z"),
        Just("z^2/4"),
        Just("sin(z)/2"),
        Just("cos(z) - z^3/5"),
        Just("exp(z/3)"),
        Just("i*z"),
    ]
    .prop_map(|s| parse(s).unwrap())
}

fn disc_point(radius: f64) -> impl Strategy<Value = ComplexValue> {
    (0.0..radius, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| ComplexValue::from_polar(r, t))
}

fn tol(cfg: &QuadratureConfig, value: ComplexValue) -> f64 {
    cfg.abs_tol.max(cfg.rel_tol * value.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn path_independence(
        f in entire(),
        a in disc_point(2.0),
        b in disc_point(2.0),
        mid in prop::collection::vec(disc_point(2.0), 1..4),
    ) {
        let cfg = QuadratureConfig::default();
        let direct = integrate_exp_f(&f, a, b, &cfg).unwrap();
        let mut path = vec![a];
        path.extend(mid);
        path.push(b);
        let bent = integrate_along_polyline(&f, &path, &cfg).unwrap();
        prop_assert!((direct - bent).norm() <= 10.0 * tol(&cfg, direct), "{direct} vs {bent}");
    }

    #[test]
    fn additivity_and_antisymmetry(
        f in entire(),
        a in disc_point(2.0),
        b in disc_point(2.0),
        c in disc_point(2.0),
    ) {
        let cfg = QuadratureConfig::default();
        let ab = integrate_exp_f(&f, a, b, &cfg).unwrap();
        let bc = integrate_exp_f(&f, b, c, &cfg).unwrap();
        let chained = integrate_along_polyline(&f, &[a, b, c], &cfg).unwrap();
        prop_assert_eq!(ab + bc, chained);
        let ac = integrate_exp_f(&f, a, c, &cfg).unwrap();
        prop_assert!((ac - chained).norm() <= 10.0 * tol(&cfg, ac));
        let ba = integrate_exp_f(&f, b, a, &cfg).unwrap();
        prop_assert!((ab + ba).norm() <= 2.0 * tol(&cfg, ab));
    }
}

#[test]
fn repeated_calls_are_bit_identical() {
    let f = parse("sin(z)/2 + z^3").unwrap();
    let cfg = QuadratureConfig::default();
    let a = ComplexValue::new(0.1, -0.4);
    let b = ComplexValue::new(1.3, 0.9);
    let first = integrate_exp_f(&f, a, b, &cfg).unwrap();
    for _ in 0..5 {
        assert_eq!(integrate_exp_f(&f, a, b, &cfg).unwrap(), first);
    }
}

/// The composite 7-point Gauss rule has order 14: halving the panel width
/// divides the error by about 2^14.
#[test]
fn base_rule_convergence_order() {
    let f = parse("z").unwrap();
    let from = ComplexValue::new(0.0, 0.0);
    let to = ComplexValue::new(0.0, 20.0);
    let exact = to.exp() - 1.0;
    let err = |n| (fixed_gauss_exp_f(&f, from, to, n).unwrap() - exact).norm();
    let (e2, e8) = (err(2), err(8));
    let order = (e2 / e8).log2() / 2.0;
    assert!((13.0..=16.0).contains(&order), "observed order {order}");
    assert!(err(4) < e2 && e8 < err(4));
}
