use conformal_isometry::expr::{parse, ComplexValue, ExprTree, Func};
use conformal_isometry::geometry::{laplacian, FieldError};
use conformal_isometry::grid::Point;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

fn leaf() -> impl Strategy<Value = ExprTree> {
    prop_oneof![
        Just(ExprTree::Var),
        Just(ExprTree::imag_unit()),
        (0u32..40).prop_map(|k| ExprTree::real(k as f64 / 8.0)),
    ]
}

/// Trees in the image of the parser: literals are non-negative reals or `i`.
fn tree(with_quotients: bool) -> impl Strategy<Value = ExprTree> {
    leaf().prop_recursive(4, 24, 2, move |inner| {
        let b = |t: ExprTree| Box::new(t);
        let mut options = vec![
            (inner.clone(), inner.clone())
                .prop_map(move |(x, y)| ExprTree::Add(b(x), b(y)))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(move |(x, y)| ExprTree::Sub(b(x), b(y)))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(move |(x, y)| ExprTree::Mul(b(x), b(y)))
                .boxed(),
            (inner.clone(), 0u32..4)
                .prop_map(move |(x, n)| ExprTree::Pow(b(x), n))
                .boxed(),
            inner.clone().prop_map(move |x| ExprTree::Neg(b(x))).boxed(),
            (
                inner.clone(),
                prop_oneof![Just(Func::Exp), Just(Func::Sin), Just(Func::Cos)],
            )
                .prop_map(move |(x, f)| ExprTree::Call(f, b(x)))
                .boxed(),
        ];
        if with_quotients {
            options.push(
                (inner.clone(), inner)
                    .prop_map(move |(x, y)| ExprTree::Div(b(x), b(y)))
                    .boxed(),
            );
        }
        proptest::strategy::Union::new(options)
    })
}

fn unit_disc_point() -> impl Strategy<Value = ComplexValue> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| ComplexValue::from_polar(r, t))
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(t in tree(true)) {
        let printed = t.to_string();
        let reparsed = parse(&printed).unwrap();
        prop_assert_eq!(reparsed, t, "{}", printed);
    }

    #[test]
    fn derivative_matches_central_differences(f in tree(false), z in unit_disc_point()) {
        let fz = f.evaluate(z).unwrap();
        let d1 = f.differentiate();
        let d3 = d1.differentiate().differentiate();
        let exact = d1.evaluate(z).unwrap();
        let third = d3.evaluate(z).unwrap().norm();
        let mut h = 1e-3;
        while h >= 1e-5 {
            let step = c(h, 0.0);
            let fd = (f.evaluate(z + step).unwrap() - f.evaluate(z - step).unwrap()) / (2.0 * h);
            let truncation = h * h / 6.0 * (1.5 * third + 1.0);
            let roundoff = 64.0 * f64::EPSILON * (1.0 + fz.norm()) / h;
            let err = (exact - fd).norm();
            prop_assert!(err <= truncation + roundoff, "h={h}: err {err:e} vs {truncation:e} + {roundoff:e}");
            h /= 2.0;
        }
    }

    #[test]
    fn real_part_is_discretely_harmonic(f in tree(false), z in unit_disc_point()) {
        let re_f = |p: Point| f.real_part_field(p.x, p.y).map_err(|e| FieldError::Evaluation(e.to_string()));
        let d4 = f.differentiate().differentiate().differentiate().differentiate();
        let d6 = d4.differentiate().differentiate();
        let fourth = d4.evaluate(z).unwrap().norm();
        let sixth = d6.evaluate(z).unwrap().norm();
        let scale = 1.0 + f.evaluate(z).unwrap().norm();
        let p = Point::from_complex(z);
        for h in [1e-2, 5e-3] {
            let lap = laplacian(&re_f, p, h).unwrap();
            // Δ_h Re f = (h²/6) Re f'''' + O(h⁴)
            let bound = h * h / 6.0 * fourth * 1.05 + h.powi(4) * (sixth + 1.0) + 1e-13 * scale / (h * h);
            prop_assert!(lap.abs() <= bound, "h={h}: {lap:e} > {bound:e}");
        }
    }

    #[test]
    fn evaluation_respects_field_operations(
        a in (-5.0..5.0f64, -5.0..5.0f64),
        b in (-5.0..5.0f64, -5.0..5.0f64),
        n in 0u32..6,
    ) {
        let (x, y) = (c(a.0, a.1), c(b.0, b.1));
        let lit = |v: ComplexValue| Box::new(ExprTree::Literal(v));
        let z = c(0.0, 0.0);
        prop_assert_eq!(ExprTree::Add(lit(x), lit(y)).evaluate(z).unwrap(), x + y);
        prop_assert_eq!(ExprTree::Mul(lit(x), lit(y)).evaluate(z).unwrap(), x * y);
        prop_assert_eq!(ExprTree::Pow(lit(x), n).evaluate(z).unwrap(), x.powu(n));
        let direct = (0..n).fold(c(1.0, 0.0), |acc, _| acc * x);
        prop_assert!((ExprTree::Pow(lit(x), n).evaluate(z).unwrap() - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
    }
}

#[test]
fn quotient_free_trees_are_entire() {
    assert!(parse("exp(z^3) - 2*sin(i*z)").unwrap().is_entire());
    assert!(!parse("z/(1 + z^2)").unwrap().is_entire());
}
