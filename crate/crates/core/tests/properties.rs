mod common;

use std::sync::Arc;

use kahler::bounds::{schwarz_bound_report, BoundSettings};
use kahler::expr::{parse_expression, Expr, Func};
use kahler::geometry::{catalog, curvature_tensor, disk_automorphism};
use kahler::identities::{averaging_identity_check, identity_terms, psh_min_eigenvalue, sandwich_check, IdentityKind, PshQuantity};
use kahler::linalg::CMatrix;
use kahler::maps::{max_norm, HoloMap};
use kahler::scenario::Manifest;
use kahler::C64;
use proptest::prelude::*;

fn c64() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn small_point(m: usize, r: f64) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(c64(), m).prop_map(move |v| {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1.0 {
            v.iter().map(|z| z * (r / n)).collect()
        } else {
            v.iter().map(|z| z * r).collect()
        }
    })
}

fn nonzero_vec(m: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(c64(), m).prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
}

fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-3.0f64..3.0).prop_map(Expr::num),
        (1usize..=2).prop_map(Expr::z),
        c64().prop_map(Expr::constant),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            (inner.clone(), 0u32..4).prop_map(|(a, n)| Expr::pow(a, n)),
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(|a| Expr::func(Func::Exp, a)),
            inner.clone().prop_map(|a| Expr::func(Func::Conj, a)),
            inner.prop_map(|a| Expr::func(Func::Abs2, a)),
        ]
    })
}

fn flat_to_ball(comps: &[&str]) -> HoloMap {
    let m = comps.iter().map(|c| if c.contains("z2") { 2 } else { 1 }).max().unwrap();
    let domain = Arc::new(catalog("flat", m, None).unwrap());
    let target = Arc::new(catalog("complex_hyperbolic_ball", comps.len(), None).unwrap());
    HoloMap::parse(domain, target, comps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn parse_print_parse_is_stable(e in expr_tree()) {
        let first = parse_expression(&e.to_string()).unwrap();
        let second = parse_expression(&first.to_string()).unwrap();
        prop_assert_eq!(&first, &second, "{}", first);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn printed_expressions_parse_back_to_the_same_function(e in expr_tree(), p in small_point(2, 0.9)) {
        let text = e.to_string();
        let back = parse_expression(&text).unwrap();
        let (x, y) = (e.eval(&p).unwrap(), back.eval(&p).unwrap());
        prop_assume!(x.is_finite() && x.norm() < 1e12);
        prop_assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()), "{text}: {x} vs {y}");
    }

    #[test]
    fn manifest_round_trips_through_json(seed in any::<u64>(), count in 1usize..500, radius in 0.01f64..0.99) {
        let text = format!(
            r#"{{"schema":1,"name":"rt","seed":{seed},"domain":{{"catalog":"poincare_disk","dim":1}},
            "target":{{"catalog":"complex_hyperbolic_ball","dim":2,"scale":1.5}},"map":["z1/2","z1^2/2"],
            "sampler":{{"count":{count},"radius":{radius}}},"checks":[{{"kind":"boch1"}},{{"kind":"schwarz","K":2.0}}]}}"#
        );
        let m = Manifest::from_json(&text).unwrap();
        let again = Manifest::from_json(&serde_json::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(m, again);
    }

    #[test]
    fn boch1_sides_scale_with_modulus_squared(p in small_point(1, 0.85), v in nonzero_vec(1), c in c64()) {
        prop_assume!(c.norm() > 0.1);
        let f = HoloMap::parse(
            Arc::new(catalog("poincare_disk", 1, None).unwrap()),
            Arc::new(catalog("complex_hyperbolic_ball", 2, None).unwrap()),
            &["z1/2", "z1^2/2"],
        ).unwrap();
        let base = identity_terms(IdentityKind::Boch1, &f, &p, &v, 4).unwrap();
        let cv: Vec<C64> = v.iter().map(|z| z * c).collect();
        let scaled = identity_terms(IdentityKind::Boch1, &f, &p, &cv, 4).unwrap();
        let k = c.norm_sqr();
        prop_assert!((scaled.lhs - k * base.lhs).abs() <= 1e-9 * (1.0 + scaled.lhs.abs()));
        prop_assert!((scaled.rhs - k * base.rhs).abs() <= 1e-9 * (1.0 + scaled.rhs.abs()));
    }

    #[test]
    fn boch2_is_invariant_under_domain_translation(p in small_point(1, 0.5), t in small_point(1, 0.3), v in nonzero_vec(1)) {
        let f = flat_to_ball(&["z1/2", "z1^2/2"]);
        let shift = Expr::add(Expr::z(1), Expr::constant(t[0]));
        let g = f.precompose(&[shift], f.domain().clone()).unwrap();
        let q = vec![p[0] - t[0]];
        let a = identity_terms(IdentityKind::Boch2, &f, &p, &v, 4).unwrap();
        let b = identity_terms(IdentityKind::Boch2, &g, &q, &v, 4).unwrap();
        prop_assert!((a.lhs - b.lhs).abs() <= 1e-9 * (1.0 + a.lhs.abs()));
        prop_assert!((a.rhs - b.rhs).abs() <= 1e-9 * (1.0 + a.rhs.abs()));
    }

    #[test]
    fn averaging_form_is_invariant_under_weight_permutation(w in prop::collection::vec(c64(), 3), p in small_point(3, 0.6)) {
        prop_assume!(w.iter().any(|z| z.norm() > 1e-3));
        let cp = curvature_tensor(&catalog("complex_hyperbolic_ball", 3, None).unwrap(), &p).unwrap();
        let a = averaging_identity_check(&cp, &w, None, 128, 1, 1e-6).unwrap().algebraic;
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let pw: Vec<C64> = perm.iter().map(|&i| w[i]).collect();
            let b = averaging_identity_check(&cp, &pw, None, 128, 1, 1e-6).unwrap().algebraic;
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn log1p_energy_is_psh_for_affine_flat_maps(a in c64(), b in c64(), c in c64(), d in c64(), p in small_point(2, 2.0)) {
        let comp = |x: C64, y: C64| format!("({}+{}*i)*z1 + ({}+{}*i)*z2", x.re, x.im, y.re, y.im);
        let (f1, f2) = (comp(a, b), comp(c, d));
        let flat = Arc::new(catalog("flat", 2, None).unwrap());
        let f = HoloMap::parse(flat.clone(), flat, &[f1.as_str(), f2.as_str()]).unwrap();
        let lo = psh_min_eigenvalue(PshQuantity::Log1pEnergy, &f, &p, 4).unwrap();
        prop_assert!(lo >= -1e-10, "min eigenvalue {lo}");
    }

    #[test]
    fn sandwich_holds_for_random_pairs(
        b in prop::collection::vec(c64(), 9),
        c in prop::collection::vec(c64(), 9),
        s in 0usize..3,
    ) {
        let bm = CMatrix::from_row_slice(3, 3, &b);
        let cm = CMatrix::from_row_slice(3, 3, &c);
        let a = &bm * bm.adjoint();
        let g = &cm * cm.adjoint() + CMatrix::identity(3, 3) * C64::new(0.05, 0.0);
        let sw = sandwich_check(&a, &g, s).unwrap();
        prop_assert!(sw.slack() >= -1e-10 * (1.0 + sw.sup.abs()), "slack {}", sw.slack());
    }

    #[test]
    fn schwarz_observed_value_is_invariant_under_disk_automorphisms(a in small_point(1, 0.7), theta in 0.0f64..std::f64::consts::TAU, pts in prop::collection::vec(small_point(1, 0.8), 1..8)) {
        let disk = Arc::new(catalog("poincare_disk", 1, None).unwrap());
        let target = Arc::new(catalog("poincare_disk", 1, Some(2.0)).unwrap());
        let f = HoloMap::parse(disk.clone(), target, &["z1^2/2 + z1/3"]).unwrap();
        let phi = disk_automorphism(a[0], theta).unwrap();
        let g = f.precompose(std::slice::from_ref(&phi), disk).unwrap();
        let images: Vec<Vec<C64>> = pts.iter().map(|p| vec![phi.eval(p).unwrap()]).collect();
        for (p, q) in pts.iter().zip(&images) {
            let (x, y) = (max_norm(&g, p).unwrap(), max_norm(&f, q).unwrap());
            prop_assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
        }
        let s = BoundSettings::default();
        let rg = schwarz_bound_report(&g, &pts, Some(2.0), Some(1.0), &s).unwrap();
        let rf = schwarz_bound_report(&f, &images, Some(2.0), Some(1.0), &s).unwrap();
        prop_assert!((rg.observed - rf.observed).abs() <= 1e-8);
    }
}

#[test]
fn three_circle_slack_for_rotation_invariant_map_does_not_depend_on_density() {
    let doc = common::run_scenario("three_circle_ball", &common::default_opts());
    let s1 = common::num(&common::entry(&doc, "three_circle")["values"]["slack"]);
    let s2 = common::num(&common::entry(&doc, "three_circle_dense")["values"]["slack"]);
    assert!(s1 > 0.0 && s2 <= s1, "{s1} -> {s2}");
}

#[test]
fn three_circle_slack_stays_nonnegative_for_asymmetric_map() {
    let doc = common::run_scenario("three_circle_ball_asymmetric", &common::default_opts());
    for label in ["three_circle", "three_circle_dense"] {
        let e = common::entry(&doc, label);
        assert_eq!(e["status"], "pass");
        assert!(common::num(&e["values"]["slack"]) >= 0.0);
    }
}
