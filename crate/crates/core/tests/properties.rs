use std::f64::consts::TAU;

use proptest::prelude::*;
use reebflow_core::contact::certify_reeb;
use reebflow_core::dynamics::{classify, integrate, Classification, Region};
use reebflow_core::hamiltonian::{BChoice, GridOptions, HamiltonianModel};
use reebflow_core::ode::IntegratorConfig;
use reebflow_core::phase::PhasePoint;
use reebflow_core::quadratic::{a_matrix, q_value, QuadForm};
use reebflow_core::scenario::ScenarioConfig;
use reebflow_core::torus::{normalize_field, InvariantSetKind, InvariantSetSpec, TorusVectorField};
use reebflow_core::trig::TrigPoly;

fn default_model() -> HamiltonianModel {
    ScenarioConfig::default_scenario().build().unwrap()
}

fn wavy_field() -> TorusVectorField {
    TorusVectorField::new(vec![
        TrigPoly::constant(2, 1.0).with_term(vec![1, 0], 0.2, 0.1),
        TrigPoly::constant(2, 1.3).with_term(vec![0, 1], 0.0, 0.25),
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trig_poly_is_periodic(a in -2.0f64..2.0, t0 in 0.0f64..TAU, t1 in 0.0f64..TAU, m0 in -3i64..3, m1 in -3i64..3) {
        let p = TrigPoly::constant(2, 0.5).with_term(vec![m0, m1], a, 0.3);
        let v = p.value(&[t0, t1]);
        prop_assert!((p.value(&[t0 + TAU, t1]) - v).abs() < 1e-12);
        prop_assert!((p.value(&[t0, t1 - TAU]) - v).abs() < 1e-12);
    }

    #[test]
    fn normalized_coefficients_sum_to_one(t0 in 0.0f64..TAU, t1 in 0.0f64..TAU) {
        let k = normalize_field(&wavy_field(), 1.5).unwrap();
        let kv = k.k(&[t0, t1]);
        prop_assert!((kv.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        prop_assert!(kv.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn normalization_ignores_rescaling(s in 0.1f64..10.0, t0 in 0.0f64..TAU, t1 in 0.0f64..TAU) {
        let v = wavy_field();
        let k1 = normalize_field(&v, 1.5).unwrap().k(&[t0, t1]);
        let k2 = normalize_field(&v.scaled(s), 1.5).unwrap().k(&[t0, t1]);
        for (a, b) in k1.iter().zip(&k2) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_form_matches_matrix(
        b in 0.1f64..50.0,
        tau in 0.0f64..3.0,
        r in proptest::collection::vec(0.0f64..4.0, 3),
        w in proptest::collection::vec(0.1f64..2.0, 3),
    ) {
        let s: f64 = w.iter().sum();
        let k: Vec<f64> = w.iter().map(|v| v / s).collect();
        let a = a_matrix(&k, b);
        let d = nalgebra::DVector::from_iterator(3, r.iter().map(|x| x - tau));
        let via_matrix = d.dot(&(&a * &d));
        let direct = q_value(&k, b, tau, &r);
        prop_assert!((via_matrix - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn quad_form_wrapper_agrees(b in 0.5f64..20.0, r0 in 0.0f64..4.0, r1 in 0.0f64..4.0, t0 in 0.0f64..TAU, t1 in 0.0f64..TAU) {
        let k = normalize_field(&wavy_field(), 1.5).unwrap();
        let q = QuadForm::new(b, 2.0, &k);
        let direct = q_value(&k.k(&[t0, t1]), b, 2.0, &[r0, r1]);
        prop_assert!((q.eval(&[r0, r1], &[t0, t1]).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn reeb_residuals_along_random_points(r0 in 0.0f64..4.5, r1 in 0.0f64..4.5, t0 in 0.0f64..TAU, t1 in 0.0f64..TAU, z in -2.0f64..2.0) {
        let m = default_model();
        let res = certify_reeb(&m, &PhasePoint::from_polar(&[r0, r1], &[t0, t1], z));
        prop_assert!(res.alpha <= 1e-9);
        prop_assert!(res.d_alpha <= 1e-8);
    }

    #[test]
    fn h_is_one_outside_support(r0 in 0.0f64..6.0, r1 in 0.0f64..6.0, t in 0.0f64..TAU, dz in 0.0f64..3.0) {
        let m = default_model();
        let sb = m.support_bounds();
        let p = PhasePoint::from_polar(&[r0, r1], &[t, -t], sb.z_max + dz);
        prop_assert_eq!(m.eval_h(&p), 1.0);
        prop_assert!(m.grad_h(&p).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn forward_then_backward_returns(r0 in 0.3f64..2.5, r1 in 0.3f64..2.5, t0 in 0.0f64..TAU, z in -1.0f64..1.0) {
        let m = default_model();
        let cfg = IntegratorConfig::with_tol(1e-12, 1e-12);
        let x0 = PhasePoint::from_polar(&[r0, r1], &[t0, 0.5], z);
        let fwd = integrate(&m, &x0, 2.0, &cfg).unwrap();
        let back = integrate(&m, fwd.last(), -2.0, &cfg).unwrap();
        let err = back
            .last()
            .coords()
            .iter()
            .zip(x0.coords())
            .fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
        prop_assert!(err < 1e-8, "round trip error {}", err);
    }

    #[test]
    fn alpha_residual_stays_small_along_orbits(r0 in 0.3f64..2.5, r1 in 0.3f64..2.5, z in -1.0f64..1.0) {
        let m = default_model();
        let trace = integrate(&m, &PhasePoint::from_polar(&[r0, r1], &[0.2, 1.1], z), 5.0, &IntegratorConfig::default()).unwrap();
        for p in &trace.states {
            prop_assert!(certify_reeb(&m, p).alpha <= 1e-9);
        }
    }

    #[test]
    fn bigger_box_never_escapes_sooner(r0 in 0.3f64..2.0, z in -1.2f64..0.5, grow in 0.0f64..1.0) {
        let m = default_model();
        let trace = integrate(&m, &PhasePoint::from_polar(&[r0, 0.9], &[0.0, 0.0], z), 20.0, &IntegratorConfig::default()).unwrap();
        let small = Region::Box { r_min: 0.2, r_max: 3.0, z_max: 1.5 };
        let large = Region::Box { r_min: 0.2 - 0.1 * grow, r_max: 3.0 + grow, z_max: 1.5 + grow };
        match (classify(&trace, &small), classify(&trace, &large)) {
            (Classification::Escapes { t: ts }, Classification::Escapes { t: tl }) => prop_assert!(tl >= ts),
            (Classification::Stays { .. }, Classification::Escapes { .. }) => prop_assert!(false, "larger box escaped first"),
            _ => {}
        }
    }
}

#[test]
fn tighter_tolerance_converges() {
    let m = default_model();
    let x0 = PhasePoint::from_polar(&[1.1, 1.2], &[0.3, 2.0], -0.2);
    let end = |tol: f64| {
        integrate(&m, &x0, 10.0, &IntegratorConfig::with_tol(tol, tol))
            .unwrap()
            .last()
            .clone()
    };
    let dist = |a: &PhasePoint, b: &PhasePoint| {
        a.coords()
            .iter()
            .zip(b.coords())
            .fold(0.0f64, |acc, (u, v)| acc.max((u - v).abs()))
    };
    let (coarse, mid, fine) = (end(1e-6), end(1e-9), end(1e-12));
    assert!(dist(&mid, &fine) < dist(&coarse, &fine));
    assert!(dist(&mid, &fine) < 1e-6);
}

#[test]
fn sub_torus_set_is_invariant() {
    let field = TorusVectorField::new(vec![
        TrigPoly::constant(2, 2.0),
        TrigPoly::zero().with_term(vec![0, 1], 0.0, 1.0),
    ])
    .unwrap();
    let set = InvariantSetSpec::new(
        2,
        InvariantSetKind::SubTorus {
            indices: vec![1],
            values: vec![0.0],
        },
    )
    .unwrap();
    let m = HamiltonianModel::build(&field, set, 0.7, 1.5, BChoice::Auto, GridOptions::default())
        .unwrap();
    let x0 = PhasePoint::from_polar(&[1.0, 1.0], &[0.4, 0.0], 0.0);
    let trace = integrate(&m, &x0, 30.0, &IntegratorConfig::default()).unwrap();
    for p in &trace.states {
        assert!((p.r(0) - 1.0).abs() < 1e-6 && (p.r(1) - 1.0).abs() < 1e-6);
        assert!(p.z().abs() < 1e-6);
        assert!(p.theta(1).abs() < 1e-6);
    }
    let end = trace.last();
    assert!(end.theta(0).rem_euclid(TAU) > 0.5);
}
