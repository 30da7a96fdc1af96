use lattice_akns::conserved::{charge_drift, charge_recursion, local_charges, trace_drift};
use lattice_akns::darboux::{soliton_type1, SolitonParams};
use lattice_akns::dnls::{evolve, zero_curvature_residual};
use lattice_akns::integrate::BlockFields;
use lattice_akns::{ChargeRule, ClosureKind, Complex64, DnlsState, Flow, RankOnePair};
use rand::SeedableRng;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn soliton_state(flow: Flow) -> DnlsState {
    let pair = RankOnePair::new(1, 2, cx(1.0, 0.0), ClosureKind::TripleProduct).unwrap();
    let xi = Complex64::from_polar(1.0, std::f64::consts::TAU / 10.0);
    let mut p = SolitonParams::type1(xi, pair.kappa, cx(0.4, 0.1), cx(0.2, -0.1), flow);
    p.periodic = true;
    soliton_type1(&p, &pair, 1, 10, 0, 0.0).unwrap().state()
}

#[test]
fn zero_curvature_on_rectangular_blocks() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(42);
    let lambdas = [cx(0.7, 0.0), cx(-0.3, 1.1), cx(1.9, -0.6), cx(0.0, -2.0), cx(-1.4, -0.2)];
    for _ in 0..5 {
        let s = DnlsState::random(&mut rng, 9, 1, 2, 0.5);
        for flow in [Flow::T1, Flow::T2] {
            let r = zero_curvature_residual(&s, flow, &lambdas).unwrap();
            assert!(r.iter().all(|&v| v < 1e-11), "{flow:?} {r:?}");
        }
    }
}

#[test]
fn closed_form_charges_match_transfer_expansion() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(9);
    let s = DnlsState::random(&mut rng, 7, 1, 2, 0.4);
    let report = local_charges(&s, &[cx(1.5, 0.0)]).unwrap();
    let from_tau = charge_recursion(&report.tau.unwrap(), 4, ChargeRule::Validated).unwrap();
    for k in 0..4 {
        assert!((from_tau[k] - report.h[k]).norm() < 1e-12, "H{}", k + 1);
    }
}

#[test]
fn soliton_evolution_conserves_charges() {
    for flow in [Flow::T1, Flow::T2] {
        let traj = evolve(&soliton_state(flow), flow, 1e-3, 1000, 100).unwrap();
        let drift = trace_drift(&traj.states, &[cx(1.3, 0.0), cx(0.4, 0.9), cx(-2.0, 0.5)]).unwrap();
        assert!(drift.iter().all(|&d| d < 1e-6), "{flow:?} {drift:?}");
        let dh = charge_drift(&traj.states).unwrap();
        assert!(dh.iter().all(|&d| d < 1e-7), "{flow:?} {dh:?}");
    }
}

#[test]
fn rk4_error_ratio_is_sixteen() {
    let s = soliton_state(Flow::T1);
    let run = |dt: f64, steps| evolve(&s, Flow::T1, dt, steps, steps).unwrap().last().clone();
    let (coarse, fine, finer) = (run(0.1, 10), run(0.05, 20), run(0.025, 40));
    let ratio = coarse.max_abs_diff(&fine) / fine.max_abs_diff(&finer);
    assert!((12.8..19.2).contains(&ratio), "{ratio}");
}
