use std::f64::consts::TAU;

use lattice_akns::algebra::CMatrix;
use lattice_akns::darboux::{
    bianchi_two_soliton, darboux_identity_residual, soliton_type1, soliton_type2, toda_general_solution,
    type1_linear_data, type2_linear_data, BoundaryTerm, OneSoliton, SolitonParams,
};
use lattice_akns::dnls::{dressed_v_from_recursion, v_operator_poly};
use lattice_akns::{ClosureKind, Complex64, Error, Flow, RankOnePair};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn root(k: f64, n: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * k / n)
}

fn rotation_pair(kappa: f64) -> RankOnePair {
    let (s, c) = (0.6_f64, 0.8_f64);
    let u = CMatrix::from_rows(&[vec![cx(c, 0.0), cx(0.0, -s)], vec![cx(0.0, -s), cx(c, 0.0)]]).unwrap();
    RankOnePair::from_unitary(&u, cx(kappa, 0.0)).unwrap()
}

fn periodic_type1(xi: Complex64, d1: Complex64, x1: Complex64, flow: Flow, pair: &RankOnePair, t: f64) -> OneSoliton {
    let mut p = SolitonParams::type1(xi, pair.kappa, x1, d1, flow);
    p.periodic = true;
    soliton_type1(&p, pair, 1, 12, 3, t).unwrap()
}

#[test]
fn first_family_solves_both_flows() {
    let pair = RankOnePair::new(2, 3, cx(1.1, 0.0), ClosureKind::TripleProduct).unwrap();
    for flow in [Flow::T1, Flow::T2] {
        let s = periodic_type1(root(1.0, 12.0), cx(0.3, 0.1), cx(0.5, 0.0), flow, &pair, 0.35);
        assert!(s.field.eom_defect(flow).unwrap() < 1e-10);
        assert!(s.field.periodicity_defect() < 1e-12);
        assert!(s.constraint_residual() < 1e-12);
    }
}

#[test]
fn second_family_solves_both_flows() {
    let pair = rotation_pair(1.2);
    for flow in [Flow::T1, Flow::T2] {
        let p = SolitonParams::type2(cx(0.5, 0.0), pair.kappa, cx(0.6, 0.1), cx(0.3, -0.2), flow);
        let s = soliton_type2(&p, &pair, -5, 11, 3, 0.4).unwrap();
        assert!(s.field.eom_defect(flow).unwrap() < 1e-10, "{flow:?}");
        assert!(s.constraint_residual() < 1e-12);
    }
}

#[test]
fn second_family_refuses_periodic_mode() {
    let pair = rotation_pair(1.0);
    let mut p = SolitonParams::type2(cx(0.5, 0.0), pair.kappa, cx(0.6, 0.0), cx(0.3, 0.0), Flow::T1);
    p.periodic = true;
    assert!(matches!(soliton_type2(&p, &pair, 1, 8, 2, 0.0), Err(Error::PeriodicityViolation { .. })));
}

#[test]
fn dressing_matrix_intertwines_lax_operators() {
    let pair = RankOnePair::new(1, 2, cx(0.9, 0.2), ClosureKind::TripleProduct).unwrap();
    let s = periodic_type1(root(2.0, 12.0), cx(-0.2, 0.4), cx(0.8, -0.3), Flow::T2, &pair, 0.2);
    let lambdas = [cx(0.3, 0.0), cx(-1.2, 0.7), cx(2.5, -0.1)];
    assert!(darboux_identity_residual(&s.state(), &s.dressing_data(), &lambdas).unwrap() < 1e-12);
}

#[test]
fn dressing_recursion_reproduces_time_operators() {
    let pair = RankOnePair::new(2, 1, cx(1.1, 0.0), ClosureKind::TripleProduct).unwrap();
    let s = periodic_type1(root(1.0, 12.0), cx(0.3, 0.1), cx(0.5, 0.0), Flow::T1, &pair, 0.0);
    let state = s.state();
    for alpha in 1..=3 {
        let dressed = dressed_v_from_recursion(&state, &s.dressing_data(), alpha).unwrap();
        for (site, v) in dressed.iter().enumerate() {
            let printed = v_operator_poly(&state, site, Flow::from_alpha(alpha).unwrap()).unwrap();
            assert!(v.max_coeff_diff(&printed).unwrap() < 1e-9, "alpha {alpha} site {site}");
        }
    }
}

#[test]
fn dressing_recursion_rejects_unconstrained_blocks() {
    let pair = RankOnePair::new(1, 1, cx(1.0, 0.0), ClosureKind::TripleProduct).unwrap();
    let s = periodic_type1(root(1.0, 12.0), cx(0.3, 0.1), cx(0.5, 0.0), Flow::T1, &pair, 0.0);
    let mut dressing = s.dressing_data();
    dressing.a[3][(0, 0)] += cx(0.1, 0.0);
    assert!(matches!(
        dressed_v_from_recursion(&s.state(), &dressing, 2),
        Err(Error::InconsistentDressing { .. })
    ));
}

#[test]
fn toda_route_reproduces_both_families() {
    let pair = RankOnePair::new(1, 1, cx(1.1, 0.0), ClosureKind::TripleProduct).unwrap();
    let p = SolitonParams::type1(cx(0.7, 0.4), pair.kappa, cx(0.5, 0.2), cx(0.3, 0.1), Flow::T2);
    let direct = soliton_type1(&p, &pair, -3, 8, 2, 0.3).unwrap();
    let (lin, y1) = type1_linear_data(&p).unwrap();
    let toda = toda_general_solution(&lin, &pair, y1, BoundaryTerm::default(), -3, 8, 2, 0.3).unwrap();
    assert!(direct.field.max_abs_diff(&toda) < 1e-12);

    let pair = rotation_pair(1.2);
    let p = SolitonParams::type2(cx(0.5, 0.0), pair.kappa, cx(0.6, 0.1), cx(0.3, -0.2), Flow::T1);
    let direct = soliton_type2(&p, &pair, -3, 8, 2, 0.3).unwrap();
    let (lin, y1) = type2_linear_data(&p).unwrap();
    let toda = toda_general_solution(&lin, &pair, y1, BoundaryTerm::default(), -3, 8, 2, 0.3).unwrap();
    assert!(direct.field.max_abs_diff(&toda) < 1e-12);
}

fn bianchi_inputs(flow: Flow, t: f64) -> (OneSoliton, OneSoliton) {
    let pair = RankOnePair::new(1, 1, cx(1.1, 0.0), ClosureKind::TripleProduct).unwrap();
    (
        periodic_type1(root(1.0, 12.0), cx(0.3, 0.1), cx(0.5, 0.0), flow, &pair, t),
        periodic_type1(root(2.0, 12.0), cx(-0.2, 0.4), cx(0.8, -0.3), flow, &pair, t),
    )
}

#[test]
fn superposition_is_symmetric_and_solves_the_flow() {
    for flow in [Flow::T1, Flow::T2] {
        let (s1, s2) = bianchi_inputs(flow, 0.25);
        let ab = bianchi_two_soliton(&s1, &s2).unwrap();
        let ba = bianchi_two_soliton(&s2, &s1).unwrap();
        assert!(ab.max_abs_diff(&ba) < 1e-12);
        assert!(ab.eom_defect(flow).unwrap() < 1e-9, "{flow:?}");
    }
}

#[test]
fn superposition_with_trivial_dressing_is_indeterminate() {
    let (s1, _) = bianchi_inputs(Flow::T1, 0.1);
    let zero = OneSoliton::zero(&s1.field.pair, 1, 12, 3, 0.1);
    assert!(matches!(bianchi_two_soliton(&s1, &zero), Err(Error::SingularSoliton { .. })));
}

#[test]
fn superposition_with_zero_seed_partner_kills_lower_field() {
    let (s1, _) = bianchi_inputs(Flow::T1, 0.1);
    let pair = s1.field.pair.clone();
    let partner = periodic_type1(root(2.0, 12.0), cx(0.0, 0.0), cx(0.0, 0.0), Flow::T1, &pair, 0.1);
    let out = bianchi_two_soliton(&s1, &partner).unwrap();
    assert!(out.eom_defect(Flow::T1).unwrap() < 1e-12);
    assert!(out.sites().all(|n| out.y_at(n).value.norm() < 1e-14));
}

#[test]
fn superposition_rejects_coincident_parameters() {
    let (s1, _) = bianchi_inputs(Flow::T1, 0.0);
    let pair = s1.field.pair.clone();
    let twin = periodic_type1(root(1.0, 12.0), cx(0.1, 0.0), cx(0.2, 0.0), Flow::T1, &pair, 0.0);
    assert!(matches!(bianchi_two_soliton(&s1, &twin), Err(Error::DegenerateBianchi(_))));
}

#[test]
fn parameters_round_trip_through_json() {
    let p = SolitonParams::type1(root(1.0, 12.0), cx(1.1, 0.0), cx(0.5, 0.0), cx(0.3, 0.1), Flow::T2);
    let text = serde_json::to_string(&p).unwrap();
    assert_eq!(serde_json::from_str::<SolitonParams>(&text).unwrap(), p);
    let bad = text.replacen('{', "{\"extra\":1,", 1);
    assert!(serde_json::from_str::<SolitonParams>(&bad).is_err());
}
