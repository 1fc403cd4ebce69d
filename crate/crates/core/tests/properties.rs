use proptest::prelude::*;

use curveflow::eulersys::HCase;
use curveflow::jetspace::{bracket, total_derivative, PointField};
use curveflow::liealg::{in_span, kernel_theta, theta, AlgebraBasis, Sampler};
use curveflow::liftcurve::{arc_length, lift, read_csv, write_csv, Branch, LiftCase, LiftOptions, PlaneCurve};
use curveflow::symcore::{differentiate, is_zero, normalize, parse, BaseVar, Expr, Symbol, Verdict};

fn leaf() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["u", "rho", "s", "a", "t", "u_a", "rho_a", "s_t", "T", "2", "1/3", "lambda"]).prop_map(String::from)
}

/// Small expressions over coordinates, jets and one parameter.
fn expr_text() -> impl Strategy<Value = String> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), 1i32..4).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.prop_map(|a| format!("exp(({a})/5)")),
        ]
    })
}

fn zero(e: &Expr) -> bool {
    is_zero(e) == Verdict::Zero
}

fn field_zero(x: &PointField) -> bool {
    x.coefficients().iter().all(|c| zero(c))
}

fn all_generators() -> Vec<PointField> {
    HCase::all_symbolic().iter().flat_map(|c| AlgebraBasis::of_case(c).fields()).collect()
}

fn case_and_pair() -> impl Strategy<Value = (usize, usize, usize)> {
    (0usize..7, 0usize..9, 0usize..9)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, .. ProptestConfig::default() })]

    #[test]
    fn derivative_is_linear(a in expr_text(), b in expr_text(), c in -3i64..4) {
        let (ea, eb) = (parse(&a).unwrap(), parse(&b).unwrap());
        let x = Symbol::new("rho");
        let lhs = differentiate(&(Expr::int(c) * &ea + &eb), &x);
        let rhs = Expr::int(c) * differentiate(&ea, &x) + differentiate(&eb, &x);
        prop_assert!(zero(&(lhs - rhs)));
    }

    #[test]
    fn leibniz_rule(a in expr_text(), b in expr_text()) {
        let (ea, eb) = (parse(&a).unwrap(), parse(&b).unwrap());
        let x = Symbol::new("u");
        let lhs = differentiate(&(&ea * &eb), &x);
        let rhs = differentiate(&ea, &x) * &eb + &ea * differentiate(&eb, &x);
        prop_assert!(zero(&(lhs - rhs)));
    }

    #[test]
    fn normalize_is_idempotent(a in expr_text()) {
        let once = normalize(&parse(&a).unwrap());
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn printing_round_trips(a in expr_text()) {
        let e = normalize(&parse(&a).unwrap());
        let back = parse(&e.to_string()).unwrap();
        prop_assert!(zero(&(back - &e)));
    }

    #[test]
    fn total_derivatives_commute(a in expr_text()) {
        let e = parse(&a).unwrap();
        let ta = total_derivative(&total_derivative(&e, BaseVar::T), BaseVar::A);
        let at = total_derivative(&total_derivative(&e, BaseVar::A), BaseVar::T);
        prop_assert!(zero(&(ta - at)));
    }

    #[test]
    fn bracket_is_antisymmetric((c, i, j) in case_and_pair()) {
        let g = AlgebraBasis::of_case(&HCase::all_symbolic()[c]).fields();
        let (x, y) = (&g[i % g.len()], &g[j % g.len()]);
        prop_assert!(field_zero(&bracket(x, y).add(&bracket(y, x))));
    }

    #[test]
    fn theta_is_a_homomorphism((c, i, j) in case_and_pair()) {
        let g = AlgebraBasis::of_case(&HCase::all_symbolic()[c]).fields();
        let (x, y) = (&g[i % g.len()], &g[j % g.len()]);
        let lhs = theta(&bracket(x, y)).unwrap().to_point_field();
        let rhs = bracket(&theta(x).unwrap().to_point_field(), &theta(y).unwrap().to_point_field());
        prop_assert!(field_zero(&lhs.add(&rhs.scale(&Expr::int(-1)))));
    }

    #[test]
    fn kernel_is_an_ideal((c, i, j) in case_and_pair()) {
        let s = Sampler::default();
        let alg = AlgebraBasis::of_case(&HCase::all_symbolic()[c]);
        let k = kernel_theta(&alg, &s).unwrap().fields();
        let g = alg.fields();
        let br = bracket(&g[i % g.len()], &k[j % k.len()]);
        prop_assert!(field_zero(&br) || in_span(&br, &k, &s).unwrap());
    }

    #[test]
    fn circle_length_scales_with_radius(r in 0.1f64..10.0) {
        let base = PlaneCurve::circle(401).unwrap();
        let scale = |v: &[f64]| v.iter().map(|x| r * x).collect::<Vec<_>>();
        let c = PlaneCurve::new(base.tau.clone(), scale(&base.x), scale(&base.y), Some((scale(&base.x_tau), scale(&base.y_tau)))).unwrap();
        let l = arc_length(&c).unwrap();
        prop_assert!((l[400] - std::f64::consts::TAU * r).abs() < 1e-8 * r);
    }

    #[test]
    fn linear_branches_mirror(lambda in 0.05f64..0.95, c0 in -2.0f64..2.0) {
        let c = PlaneCurve::circle(201).unwrap();
        let case = LiftCase::Linear { lambda };
        let opts = LiftOptions::default();
        let up = lift(&case, c0, &c, Branch::Plus, &opts).unwrap();
        let down = lift(&case, c0, &c, Branch::Minus, &opts).unwrap();
        for (u, d) in up.z.iter().zip(&down.z) {
            prop_assert!(((u - c0) + (d - c0)).abs() < 1e-12 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn lifted_lengths_are_monotone(z0 in 0.2f64..1.5) {
        let c = PlaneCurve::circle(201).unwrap();
        let r = lift(&LiftCase::Log, z0, &c, Branch::Plus, &LiftOptions::default()).unwrap();
        prop_assert_eq!(r.l[0], 0.0);
        prop_assert_eq!(r.a[0], 0.0);
        prop_assert!(r.l.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(r.a.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn csv_preserves_values(z0 in 0.2f64..1.5, n in 5usize..60) {
        let c = PlaneCurve::circle(n).unwrap();
        let r = lift(&LiftCase::Log, z0, &c, Branch::Plus, &LiftOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        let t = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(t.tau, r.tau);
        prop_assert_eq!(t.l, r.l);
        prop_assert_eq!(t.z, r.z);
        prop_assert_eq!(t.a, r.a);
    }
}

#[test]
fn jacobi_identity_on_tables() {
    for case in HCase::all_symbolic() {
        let g = AlgebraBasis::of_case(&case).fields();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                for k in j + 1..g.len() {
                    let (x, y, z) = (&g[i], &g[j], &g[k]);
                    let sum = bracket(x, &bracket(y, z)).add(&bracket(y, &bracket(z, x))).add(&bracket(z, &bracket(x, y)));
                    assert!(field_zero(&sum), "{case}: {i} {j} {k}");
                }
            }
        }
    }
}

#[test]
fn every_generator_is_projectable() {
    for x in all_generators() {
        assert!(theta(&x).is_ok(), "{x}");
    }
}
