use proptest::prelude::*;

use symlab_core::gss::{self, apply_equivalence, equation_distance, EquivalenceTransform, GssEquation};
use symlab_core::jet::JetSpace;
use symlab_core::lie::{commutator, compare_fields, prolong, prolong_via_characteristic, GeneratorField};
use symlab_core::liouville::{self, catalog_entries, orbit_gamma, Params};
use symlab_core::{parse, EvalPoint, Expr, SamplingBox, VarRegistry};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        (-2.0..2.0f64).prop_map(|c| Expr::constant((c * 8.0).round() / 8.0)),
    ]
}

/// Smooth expressions in `x`, `y` that are finite everywhere.
fn smooth() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| a.tanh()),
            inner.clone().prop_map(|a| a.tanh().exp()),
            (inner, 0u8..4).prop_map(|(a, k)| a.powf(f64::from(k))),
        ]
    })
}

fn point() -> impl Strategy<Value = EvalPoint> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y)| EvalPoint::from_reals(&[("x", x), ("y", y)]))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

fn real_poly() -> impl Strategy<Value = Expr> {
    let reg = VarRegistry::real(&["x", "y", "u"]);
    prop::sample::select(vec!["0", "1", "x", "y", "u", "x*y", "x^2 - y", "u*x", "2*u + y^2", "x*u - y", "y^3"])
        .prop_map(move |s| parse(s, &reg).unwrap())
}

fn field() -> impl Strategy<Value = GeneratorField> {
    (real_poly(), real_poly(), real_poly())
        .prop_map(|(a, b, c)| GeneratorField::point("X", &["x", "y"], &["u"], vec![a, b], vec![c]).unwrap())
}

fn xyu_box() -> SamplingBox {
    SamplingBox::new().real("x", -1.0, 1.0).real("y", -1.0, 1.0).real("u", -1.0, 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn simplify_preserves_value(e in smooth(), p in point()) {
        let (a, b) = (e.eval_real(&p).unwrap(), e.simplify().eval_real(&p).unwrap());
        prop_assert!(close(a, b, 1e-12), "{e}: {a} vs {b}");
    }

    #[test]
    fn simplify_is_idempotent(e in smooth()) {
        let once = e.simplify();
        prop_assert_eq!(once.simplify().to_string(), once.to_string());
    }

    #[test]
    fn printed_form_parses_back(e in smooth(), p in point()) {
        let back = parse(&e.to_string(), &VarRegistry::real(&["x", "y"])).unwrap();
        let (a, b) = (e.eval_real(&p).unwrap(), back.eval_real(&p).unwrap());
        prop_assert!(close(a, b, 1e-12), "{e} reparsed as {back}");
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in smooth(), b in smooth(), p in point()) {
        let (va, vb) = (a.eval_real(&p).unwrap(), b.eval_real(&p).unwrap());
        prop_assert!(close(a.add(&b).eval_real(&p).unwrap(), va + vb, 1e-12));
        prop_assert!(close(a.mul(&b).eval_real(&p).unwrap(), va * vb, 1e-12));
    }

    #[test]
    fn derivative_matches_central_difference(e in smooth(), x in -0.9..0.9f64, y in -0.9..0.9f64) {
        let h = 1e-5;
        let at = |x: f64| e.eval_real(&EvalPoint::from_reals(&[("x", x), ("y", y)])).unwrap();
        let fd = (at(x + h) - at(x - h)) / (2.0 * h);
        let d = e.d("x").unwrap().eval_real(&EvalPoint::from_reals(&[("x", x), ("y", y)])).unwrap();
        let scale = 1.0 + at(x).abs();
        prop_assert!((d - fd).abs() <= 1e-5 * scale * (1.0 + d.abs()), "{e}: {d} vs {fd}");
    }

    #[test]
    fn bracket_is_antisymmetric(a in field(), b in field(), seed in 0u64..1000) {
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap().scale(-1.0);
        prop_assert!(compare_fields(&ab, &ba, &xyu_box(), 20, 1e-12, seed).unwrap().equal);
    }

    #[test]
    fn prolongation_routes_agree(g in field(), seed in 0u64..1000) {
        let jet = JetSpace::new(&["x", "y"], &["u"], 3).unwrap();
        let direct = prolong(&g, 2, &jet).unwrap();
        let via = prolong_via_characteristic(&g, 2, &jet).unwrap();
        let mut bx = SamplingBox::new();
        for (_, name) in jet.coords() {
            bx = bx.real(name, -1.0, 1.0);
        }
        for (name, c) in direct.iter() {
            let other = via.get(name).unwrap();
            let cmp = symlab_core::expr::compare(c, other, &bx, 20, 1e-10, seed).unwrap();
            prop_assert!(cmp.equal, "{name}: {c} vs {other}");
        }
    }

    #[test]
    fn equivalence_transforms_invert(k in -1.0..1.0f64, al in 0.3..3.0f64, neg in any::<bool>()) {
        let base = GssEquation::parse(-1.0, 1.0, "exp(u) + u^2", "u^(1/2)").unwrap();
        let al = if neg { -al } else { al };
        for t in [EquivalenceTransform::ShiftU(k), EquivalenceTransform::ScaleU(al), EquivalenceTransform::ScaleXy(al)] {
            let there = apply_equivalence(&base, t).unwrap();
            let back = apply_equivalence(&there, t.inverse().unwrap()).unwrap();
            prop_assert!(equation_distance(&back, &base, 30).unwrap() < 1e-12, "{t:?}");
        }
    }

    #[test]
    fn pendulum_quadrature_matches_runge_kutta(u0 in -1.0..1.0f64, p0 in -1.5..1.5f64) {
        let f = gss::expr("-sin(u)").unwrap();
        let prof = gss::quadrature_integrate(&f, u0, p0, 5.0).unwrap();
        prop_assert!(gss::rk_gap(&prof, 50).unwrap() < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The flow of `z^2 d/dz` composes additively in its parameter.
    #[test]
    fn mobius_orbits_compose(a in -0.25..0.25f64, b in -0.25..0.25f64, seed in 0u64..1000) {
        let harris = catalog_entries().into_iter().find(|e| e.name == "harris").unwrap();
        let g = harris.generating_function(&Params::new()).unwrap();
        let phi = parse("z^2", &VarRegistry::new().with("z", symlab_core::VarKind::Complex)).unwrap();
        let two = orbit_gamma(&orbit_gamma(&g, &phi, a).unwrap(), &phi, b).unwrap();
        let one = orbit_gamma(&g, &phi, a + b).unwrap();
        let u2 = liouville::solution_from_gamma(&two).unwrap();
        let u1 = liouville::solution_from_gamma(&one).unwrap();
        let bx = SamplingBox::new().real("x", -0.4, 0.4).real("y", -0.4, 0.4);
        let c = symlab_core::expr::compare(u1.field("u").unwrap(), u2.field("u").unwrap(), &bx, 30, 1e-11, seed).unwrap();
        prop_assert!(c.equal, "max deviation {}", c.max_deviation);
    }

    #[test]
    fn residual_reports_are_deterministic(idx in 0usize..8, seed in any::<u64>()) {
        let e = &catalog_entries()[idx];
        let sol = e.solution(&Params::new()).unwrap();
        let sys = liouville::liouville_system();
        let r1 = sol.residual_report(&sys, 30, seed, liouville::RESIDUAL_TOL).unwrap();
        let r2 = sol.residual_report(&sys, 30, seed, liouville::RESIDUAL_TOL).unwrap();
        prop_assert!(r1.pass);
        prop_assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
    }
}
