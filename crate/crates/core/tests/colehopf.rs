use lattice_akns::colehopf::{
    burgers_residual, burgers_truncation_order, cole_hopf_forward, continuum_convergence, hamilton_jacobi_residual,
    ContinuumProfile, DeltaScaling,
};
use lattice_akns::darboux::{LinearScheme, LinearSolution};
use lattice_akns::{Complex64, ContinuumGrid};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn grid(hx: f64) -> ContinuumGrid {
    ContinuumGrid {
        x_min: -1.0,
        x_max: 1.0,
        hx,
        t_min: 0.5,
        t_max: 1.0,
        ht: hx,
        g: cx(0.8, 0.3),
        kappa: cx(1.2, -0.4),
    }
}

#[test]
fn two_mode_heat_maps_to_exact_burgers() {
    let heat = LinearSolution::new(
        &[(cx(1.0, 0.0), cx(1.0, 0.0)), (cx(0.4, 0.2), cx(0.7, 0.1)), (cx(0.2, 0.0), cx(1.3, 0.0))],
        2,
        LinearScheme::ForwardDnls,
    )
    .unwrap();
    for t in [0.0, 0.4, 1.1] {
        let f = cole_hopf_forward(&heat, -4, 14, t).unwrap();
        let (hj, bu) = (hamilton_jacobi_residual(&f), burgers_residual(&f));
        println!("t = {t}: HJ {hj:.3e}, Burgers {bu:.3e}");
        assert!(hj < 1e-12 && bu < 1e-12);
    }
}

#[test]
fn quadratic_truncation_remainder_shrinks_with_delta() {
    let deltas = [0.1, 0.05, 0.025, 0.0125];
    for scaling in [
        DeltaScaling::LongWave { amplitude: cx(1.0, 0.0) },
        DeltaScaling::SmallAmplitude { amplitude: cx(1.0, 0.0), base: cx(0.8, 0.0) },
    ] {
        let r = burgers_truncation_order(&scaling, &deltas, 5, 24, 0.3).unwrap();
        println!("{scaling:?}: {r:?}");
        let exponent = r.burgers_exponent.unwrap();
        // Long-wave data leaves a fourth-order remainder, small-amplitude data a second-order one.
        assert!(exponent > 1.8, "{exponent}");
        assert!(r.burgers_remainders.windows(2).all(|w| w[1] < w[0]));
    }
    let flat = burgers_truncation_order(&DeltaScaling::LongWave { amplitude: cx(1.0, 0.0) }, &[0.0], 1, 10, 0.0).unwrap();
    assert_eq!(flat.burgers_remainders, vec![0.0]);
    assert_eq!(flat.hj_remainders, vec![0.0]);
}

#[test]
fn heat_kernel_pair_converges_at_second_order() {
    let conv = continuum_convergence(&grid(0.02), &ContinuumProfile::HeatKernel).unwrap();
    println!("{conv:?}");
    assert!((3.5..4.5).contains(&conv.ratio));
}

#[test]
fn mode_pair_converges_at_second_order() {
    let profile = ContinuumProfile::Modes { modes: vec![(cx(1.0, 0.0), cx(0.0, 0.0)), (cx(0.6, 0.2), cx(1.3, 0.0))] };
    let conv = continuum_convergence(&grid(0.05), &profile).unwrap();
    println!("{conv:?}");
    assert!((3.5..4.5).contains(&conv.ratio));
}
