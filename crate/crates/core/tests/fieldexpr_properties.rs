mod common;

use proptest::prelude::*;
use qgeom::FieldExpr;
use rand::Rng;

const XY: [&str; 2] = ["x", "y"];

fn expr_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        (-4.0f64..4.0).prop_map(|c| format!("({c})")),
        (1u8..6).prop_map(|c| c.to_string()),
    ];
    leaf.prop_recursive(4, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}+{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}-({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/(2+({b})^2)")),
            (inner.clone(), 0u8..4).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(sin({a}))")),
            inner.clone().prop_map(|a| format!("sqrt(1+({a})^2)")),
            inner.clone().prop_map(|a| format!("log(2+cos({a}))")),
            inner.prop_map(|a| format!("abs({a})")),
        ]
    })
}

fn same_value(a: f64, b: f64, rel: f64) -> bool {
    if a.is_finite() && b.is_finite() {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) || a == b
    } else {
        a.is_nan() && b.is_nan() || a == b
    }
}

/// `(4 D(h/2) − D(h))/3` with central differences along coordinate `k`.
fn richardson_partial(e: &FieldExpr, x: &[f64], k: usize, h: f64) -> f64 {
    let central = |h: f64| {
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[k] += h;
        m[k] -= h;
        (e.eval(&p) - e.eval(&m)) / (2.0 * h)
    };
    (4.0 * central(0.5 * h) - central(h)) / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_form_reparses_to_same_values(src in expr_source(), seed in any::<u64>()) {
        let e = FieldExpr::parse(&src, &XY).unwrap();
        let printed = e.to_string();
        let back = FieldExpr::parse(&printed, &XY).unwrap();
        let mut rng = common::rng(seed);
        for _ in 0..100 {
            let x = common::uniform(&mut rng, 2, -3.0, 3.0);
            let (a, b) = (e.eval(&x), back.eval(&x));
            prop_assert!(same_value(a, b, 1e-15), "{src} -> {printed}: {a} vs {b}");
        }
    }

    #[test]
    fn mixed_partials_commute(src in expr_source(), seed in any::<u64>()) {
        let e = FieldExpr::parse(&src, &XY).unwrap();
        let xy = e.diff(0).diff(1);
        let yx = e.diff(1).diff(0);
        let mut rng = common::rng(seed);
        for _ in 0..20 {
            let x = common::uniform(&mut rng, 2, -2.0, 2.0);
            let (a, b) = (xy.eval(&x), yx.eval(&x));
            if a.is_finite() && b.is_finite() {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0), "{src}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn evaluation_is_deterministic(src in expr_source(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let e = FieldExpr::parse(&src, &XY).unwrap();
        let again = FieldExpr::parse(&src, &XY).unwrap();
        prop_assert_eq!(e.eval(&[x, y]).to_bits(), again.eval(&[x, y]).to_bits());
    }
}

#[test]
fn symbolic_derivatives_match_finite_differences() {
    let sources = [
        "sin(x*y)+cos(x)^2",
        "exp(x*y)",
        "sqrt(1+x^2+y^2)",
        "log(2+sin(x)*y)",
        "x^3*y-2*x*y^2+5",
        "abs(x-3)*exp(-y)",
        "sin(exp(x)*y)/(2+cos(y))",
        "(1+x^2+y^2)^1.5",
        "(2+x*y)^(-2)",
        "cos(sqrt(2+x^2))*log(3+y)",
    ];
    let mut rng = common::rng(7);
    for src in sources {
        let e = FieldExpr::parse(src, &XY).unwrap();
        // orders 1, 2, 3 along every index chain (i, j, k)
        for _ in 0..50 {
            let x = common::uniform(&mut rng, 2, -1.0, 1.0);
            let mut lower = vec![(e.clone(), String::new())];
            for _order in 1..=3 {
                let mut next = Vec::new();
                for (d, tag) in &lower {
                    for k in 0..2 {
                        let sym = d.diff(k);
                        let fd = richardson_partial(d, &x, k, 1e-3);
                        let s = sym.eval(&x);
                        assert!(
                            (s - fd).abs() <= 1e-6 * s.abs().max(fd.abs()).max(1.0),
                            "{src} ∂{tag}{k} at {x:?}: {s} vs {fd}"
                        );
                        next.push((sym, format!("{tag}{k}")));
                    }
                }
                lower = next;
            }
        }
    }
}

#[test]
fn third_derivative_of_exp_xy() {
    let e = FieldExpr::parse("exp(x*y)", &XY).unwrap();
    let d2 = e.diff(0).diff(0);
    let d3 = d2.diff(0);
    let x = [0.3, 0.7];
    let exact = 0.7f64.powi(3) * (0.21f64).exp();
    assert!((d3.eval(&x) - exact).abs() < 1e-14);
    let fd = richardson_partial(&d2, &x, 0, 1e-3);
    assert!((d3.eval(&x) - fd).abs() < 1e-6 * exact);
}

#[test]
fn random_points_round_trip_for_fixed_sources() {
    let mut rng = common::rng(11);
    for src in [
        "x^2+y^2-1",
        "-x^-2",
        "2*x^-3",
        "-(x-y)-(-3)",
        "x/(y/(x*y))",
        "(-2)^2*x",
    ] {
        let e = FieldExpr::parse(src, &XY).unwrap();
        let back = FieldExpr::parse(&e.to_string(), &XY).unwrap();
        for _ in 0..100 {
            let x = [rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)];
            assert_eq!(
                e.eval(&x).to_bits(),
                back.eval(&x).to_bits(),
                "{src} -> {e}"
            );
        }
    }
}
