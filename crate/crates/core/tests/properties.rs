use proptest::prelude::*;

use dsurf::dnum::{classify, exp_j, DClass, DNum};
use dsurf::gallery;
use dsurf::holo::NullBox;
use dsurf::sexpr::{diff_t, lower, parse, Expr};

fn dnum(range: f64) -> impl Strategy<Value = DNum> {
    (-range..range, -range..range).prop_map(|(re, im)| DNum::new(re, im))
}

fn close(a: DNum, b: DNum, tol: f64) -> bool {
    (a - b).null_abs_max() <= tol * b.null_abs_max().max(1.0)
}

// Nested hyperbolic functions overflow quickly; values beyond this are
// skipped rather than compared.
fn moderate(x: DNum) -> bool {
    x.is_finite() && x.null_abs_max() < 1e8
}

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("t".to_string()),
        Just("j".to_string()),
        Just("pi".to_string()),
        (-3.0f64..3.0).prop_map(|c| format!("{c:.4}")),
    ]
}

fn expr_text() -> impl Strategy<Value = String> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), 0.5f64..4.0).prop_map(|(a, c)| format!("({a})/{c:.3}")),
            (inner.clone(), 0u32..4).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner, 0usize..5).prop_map(|(a, f)| format!("{}({a})", ["sin", "cos", "sinh", "cosh", "exp"][f])),
        ]
    })
}

proptest! {
    #[test]
    fn modulus_is_multiplicative(a in dnum(50.0), b in dnum(50.0)) {
        let lhs = (a * b).modsq();
        let rhs = a.modsq() * b.modsq();
        let size = (a.re.powi(2) + a.im.powi(2)) * (b.re.powi(2) + b.im.powi(2));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * size.max(1.0));
    }

    #[test]
    fn conjugation_is_an_automorphism(a in dnum(20.0), b in dnum(20.0)) {
        prop_assert!(close((a * b).conj(), a.conj() * b.conj(), 1e-14));
        prop_assert!(close((a + b).conj(), a.conj() + b.conj(), 1e-15));
        prop_assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn null_view_round_trips(p in -1e3f64..1e3, m in -1e3f64..1e3) {
        let (p2, m2) = DNum::from_null(p, m).null();
        prop_assert!((p2 - p).abs() <= 1e-12 * p.abs().max(1.0));
        prop_assert!((m2 - m).abs() <= 1e-12 * m.abs().max(1.0));
    }

    #[test]
    fn nth_root_inverts_power(p in 1e-3f64..1e3, m in 1e-3f64..1e3, n in 1u32..9) {
        let x = DNum::from_null(p, m);
        let r = x.nth_root_positive(n).unwrap();
        prop_assert_eq!(classify(r, 1e-300), DClass::Positive);
        let (a, b) = r.powi(n).null();
        prop_assert!(((a - p) / p).abs() <= 1e-10);
        prop_assert!(((b - m) / m).abs() <= 1e-10);
    }

    #[test]
    fn exp_j_has_unit_modulus(theta in -5.0f64..5.0, phi in -5.0f64..5.0) {
        prop_assert!((exp_j(theta).modsq() - 1.0).abs() <= 1e-9 * theta.cosh().powi(2));
        let size = theta.cosh() * phi.cosh();
        prop_assert!((exp_j(theta) * exp_j(phi) - exp_j(theta + phi)).null_abs_max() <= 1e-14 * size);
    }

    #[test]
    fn display_reparses_to_same_tree(text in expr_text()) {
        let e = parse(&text).unwrap();
        let back = parse(&e.to_string()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn lowering_matches_direct_evaluation(text in expr_text(), t in dnum(1.0)) {
        let e = parse(&text).unwrap();
        let lowered = lower(&e).eval(t).unwrap();
        prop_assume!(moderate(lowered));
        prop_assert!(close(lowered, e.eval_dnum(t), 1e-12), "{text}: {lowered} vs {}", e.eval_dnum(t));
    }

    #[test]
    fn differentiation_commutes_with_lowering(text in expr_text(), t in dnum(1.0)) {
        let e = parse(&text).unwrap();
        let symbolic = lower(&diff_t(&e)).eval(t).unwrap();
        prop_assume!(moderate(symbolic));
        let lowered = lower(&e).differentiate().eval(t).unwrap();
        prop_assert!(close(symbolic, lowered, 1e-12));
    }

    #[test]
    fn primitive_then_derivative_is_identity(text in expr_text(), a in -0.95f64..0.95, b in -0.95f64..0.95) {
        let e = parse(&text).unwrap();
        let t = DNum::from_null(a, b);
        let dom = NullBox::new((-1.0, 1.0), (-1.0, 1.0));
        let f = lower(&e).with_domain(dom);
        prop_assume!([-1.0, 0.0, 1.0].iter().all(|&x| moderate(f.eval(DNum::from_null(x, x)).unwrap())));
        let back = f.primitive(DNum::ZERO).unwrap().differentiate().eval(t).unwrap();
        let direct = f.eval(t).unwrap();
        let scale = direct.null_abs_max().max(1.0);
        prop_assert!((back - direct).null_abs_max() <= 1e-6 * scale, "{text}");
    }

    #[test]
    fn normal_part_keeps_the_square(i in 0usize..5, x in 0.02f64..0.98, y in 0.02f64..0.98) {
        let (_, s) = gallery::all().swap_remove(i);
        let d = s.domain().null;
        let t = DNum::from_null(d.a.0 + x * (d.a.1 - d.a.0), d.b.0 + y * (d.b.1 - d.b.0));
        prop_assume!(s.domain().contains(t));
        let p = s.point_data(t).unwrap();
        let scale: f64 = p.dphi.iter().map(|c| c.null_abs_max().powi(2)).sum();
        prop_assert!((p.dphi_perp.square() - p.dphi_sq).null_abs_max() <= 1e-9 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn smart_constructors_preserve_value(a in -5.0f64..5.0, b in -5.0f64..5.0, t in dnum(1.0)) {
        let l = Expr::mul(Expr::Num(a), Expr::T);
        let r = Expr::mul(Expr::Num(b), Expr::apply(dsurf::sexpr::Func::Sin, Expr::T));
        let built = Expr::add(l.clone(), r.clone());
        let plain = Expr::Add(Box::new(l), Box::new(r));
        prop_assert!(close(built.eval_dnum(t), plain.eval_dnum(t), 1e-14));
    }
}
