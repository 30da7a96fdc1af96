//! The `verify-all` suites. Each suite is deterministic for a given seed and
//! the suites run in parallel with their order preserved in the report.

use std::f64::consts::TAU;

use lattice_akns::al::{al_evolve, al_soliton_oscillator, al_zero_curvature_residual, AlDarbouxParams, AlSeeds};
use lattice_akns::colehopf::{burgers_residual, burgers_truncation_order, cole_hopf_forward, continuum_convergence};
use lattice_akns::colehopf::{ContinuumProfile, DeltaScaling};
use lattice_akns::conserved::{charge_drift, trace_drift};
use lattice_akns::darboux::{
    bianchi_two_soliton, soliton_type1, soliton_type2, toda_general_solution, type1_coefficient_recursion,
    type1_linear_data, type2_linear_data, BoundaryTerm, LinearScheme, LinearSolution, OneSoliton, SolitonParams,
};
use lattice_akns::dnls::{dressed_v_from_recursion, evolve, v_operator_poly, zero_curvature_residual};
use lattice_akns::glm::{build_hankel_data, closed_form_deviation, fit_type2, solve_glm, GlmScheme, GlmSolitonParams};
use lattice_akns::integrate::BlockFields;
use lattice_akns::{AlState, AlVariant, CMatrix, ClosureKind, Complex64, DnlsState, Flow, RankOnePair};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{
    BurgersConfig, ContinuumConfig, BURGERS_TOL, CHARGE_DRIFT_TOL, CONTINUUM_RATIO, GLM_CLOSED_FORM_TOL,
    GLM_RESIDUAL_TOL, TRACE_DRIFT_TOL, TRUNCATION_RATIO,
};
use crate::config::{cx, load};
use crate::report::{num, write_csv, write_json, Check};
use crate::{CliError, Context, RunConfig};

pub const ZERO_CURVATURE_DNLS_TOL: f64 = 1e-11;
pub const ZERO_CURVATURE_AL_TOL: f64 = 1e-10;
pub const RECURSION_TOL: f64 = 1e-12;
pub const DRESSING_TOL: f64 = 1e-9;
pub const TODA_MATCH_TOL: f64 = 1e-9;
pub const TODA_EOM_TOL: f64 = 1e-8;
pub const BIANCHI_SYMMETRY_TOL: f64 = 1e-10;
pub const BIANCHI_EOM_TOL: f64 = 1e-8;
pub const BIANCHI_COLLAPSE_TOL: f64 = 1e-10;
pub const GLM_FIT_TOL: f64 = 1e-8;
pub const RK4_RATIO: (f64, f64) = (12.8, 19.2);

pub const SUITES: [&str; 10] = [
    "zero-curvature",
    "conservation",
    "recursion",
    "dressing",
    "toda",
    "bianchi",
    "glm",
    "cole-hopf",
    "continuum",
    "rk4-order",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub suites: Vec<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { suites: SUITES.iter().map(|s| s.to_string()).collect() }
    }
}

#[derive(Debug, Serialize)]
struct SuiteReport {
    suite: String,
    pass: bool,
    checks: Vec<Check>,
    error: Option<String>,
}

fn root(k: f64, n: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * k / n)
}

fn random_complex(rng: &mut StdRng, r: f64) -> Complex64 {
    cx(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn scalar_pair(kappa: f64) -> Result<RankOnePair, CliError> {
    Ok(RankOnePair::new(1, 1, cx(kappa, 0.0), ClosureKind::TripleProduct)?)
}

fn rotation_pair(kappa: f64) -> Result<RankOnePair, CliError> {
    let u = CMatrix::from_rows(&[vec![cx(0.8, 0.0), cx(0.0, -0.6)], vec![cx(0.0, -0.6), cx(0.8, 0.0)]])?;
    Ok(RankOnePair::from_unitary(&u, cx(kappa, 0.0))?)
}

fn periodic_type1(
    xi: Complex64,
    d1: Complex64,
    x1: Complex64,
    flow: Flow,
    pair: &RankOnePair,
    halo: usize,
) -> Result<OneSoliton, CliError> {
    let mut p = SolitonParams::type1(xi, pair.kappa, x1, d1, flow);
    p.periodic = true;
    Ok(soliton_type1(&p, pair, 1, 12, halo, 0.0)?)
}

fn type2_params(flow: Flow, pair: &RankOnePair) -> SolitonParams {
    SolitonParams::type2(cx(0.5, 0.0), pair.kappa, cx(0.6, 0.1), cx(0.3, -0.2), flow)
}

fn three_mode_heat(alpha: u32) -> Result<LinearSolution, CliError> {
    Ok(LinearSolution::new(
        &[(cx(1.0, 0.0), cx(1.0, 0.0)), (cx(0.3, 0.1), cx(0.9, 0.2)), (cx(0.2, 0.0), cx(1.1, -0.1))],
        alpha,
        LinearScheme::ForwardDnls,
    )?)
}

fn zero_curvature(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let mut rng = StdRng::seed_from_u64(ctx.seed);
    let (mut dnls, mut al): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        for (nd, md) in [(1, 1), (1, 2)] {
            let s = DnlsState::random(&mut rng, 8, nd, md, 0.5);
            let lambdas: Vec<_> = (0..5).map(|_| random_complex(&mut rng, 2.0)).collect();
            for flow in [Flow::T1, Flow::T2] {
                dnls = zero_curvature_residual(&s, flow, &lambdas)?.into_iter().fold(dnls, f64::max);
            }
            let a = AlState::random(&mut rng, 8, nd, md, 0.4);
            let zs: Vec<_> = (0..5)
                .map(|_| Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU)))
                .collect();
            for variant in [AlVariant::Al, AlVariant::Network] {
                al = al.max(al_zero_curvature_residual(&a, variant, &zs)?);
            }
        }
    }
    Ok(vec![
        Check::below("dnls", dnls, ctx.tol(ZERO_CURVATURE_DNLS_TOL)),
        Check::below("al", al, ctx.tol(ZERO_CURVATURE_AL_TOL)),
    ])
}

fn conservation(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let samples = [cx(1.3, 0.0), cx(0.4, 0.9), cx(-2.0, 0.5)];
    let scalar = scalar_pair(1.1)?;
    let rot = rotation_pair(1.2)?;
    let mut checks = Vec::new();
    for flow in [Flow::T1, Flow::T2] {
        let type1 = periodic_type1(root(1.0, 12.0), cx(0.3, 0.1), cx(0.5, 0.0), flow, &scalar, 0)?;
        let type2 = soliton_type2(&type2_params(flow, &rot), &rot, 1, 10, 0, 0.0)?;
        let toda = toda_general_solution(
            &three_mode_heat(flow.alpha())?,
            &scalar,
            cx(0.4, 0.0),
            BoundaryTerm::default(),
            1,
            10,
            0,
            0.0,
        )?;
        let s1 = periodic_type1(root(1.0, 12.0), cx(0.3, 0.1), cx(0.5, 0.0), flow, &scalar, 1)?;
        let s2 = periodic_type1(root(3.0, 12.0), cx(0.5, 0.0), cx(0.3, 0.2), flow, &scalar, 1)?;
        let two = bianchi_two_soliton(&s1, &s2)?;
        let inputs = [("type1", type1.state()), ("type2", type2.state()), ("toda", toda.state()), ("bianchi", two.state())];
        for (name, state) in inputs {
            let traj = evolve(&state, flow, 1e-3, 1000, 50)?;
            let tr = trace_drift(&traj.states, &samples)?.into_iter().fold(0.0, f64::max);
            let h = charge_drift(&traj.states)?.into_iter().fold(0.0, f64::max);
            let tag = format!("{name}_t{}", flow.alpha());
            checks.push(Check::below(format!("{tag}_trace_drift"), tr, ctx.tol(TRACE_DRIFT_TOL)));
            checks.push(Check::below(format!("{tag}_charge_drift"), h, ctx.tol(CHARGE_DRIFT_TOL)));
        }
    }
    Ok(checks)
}

fn recursion(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let mut rng = StdRng::seed_from_u64(ctx.seed);
    let (mut worst, mut draws, mut attempts): (f64, usize, usize) = (0.0, 0, 0);
    while draws < 20 && attempts < 1000 {
        attempts += 1;
        let xi = Complex64::from_polar(rng.gen_range(0.6..1.4), rng.gen_range(0.0..TAU));
        let kappa = Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..TAU));
        let (d1, x1) = (random_complex(&mut rng, 0.5), random_complex(&mut rng, 1.0));
        if (xi - 1.0).norm() < 0.1 {
            continue;
        }
        let pair = RankOnePair::new(1, 1, kappa, ClosureKind::TripleProduct)?;
        let p = SolitonParams::type1(xi, kappa, x1, d1, Flow::T1);
        let (Ok((a, d)), Ok(sol)) = (type1_coefficient_recursion(&p, 32), soliton_type1(&p, &pair, 1, 32, 0, 0.0))
        else {
            continue;
        };
        if a.iter().chain(&d).any(|v| v.norm() > 1e3) {
            continue;
        }
        for n in 1..=32i64 {
            let i = (n - 1) as usize;
            worst = worst
                .max((sol.d_at(n).value - d[i]).norm() / (1.0 + d[i].norm()))
                .max((sol.a_at(n).value - a[i]).norm() / (1.0 + a[i].norm()));
        }
        draws += 1;
    }
    Ok(vec![Check::holds("twenty_draws", draws == 20), Check::below("max_deviation", worst, ctx.tol(RECURSION_TOL))])
}

fn dressing(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let mut worst: f64 = 0.0;
    for (nd, md) in [(1, 1), (2, 1), (1, 3)] {
        let pair = RankOnePair::new(nd, md, cx(1.1, 0.0), ClosureKind::TripleProduct)?;
        let s = periodic_type1(root(1.0, 12.0), cx(0.3, 0.1), cx(0.5, 0.0), Flow::T1, &pair, 0)?;
        let state = s.state();
        for alpha in 1..=3 {
            let dressed = dressed_v_from_recursion(&state, &s.dressing_data(), alpha)?;
            for (site, v) in dressed.iter().enumerate() {
                let direct = v_operator_poly(&state, site, Flow::from_alpha(alpha)?)?;
                worst = worst.max(v.max_coeff_diff(&direct)?);
            }
        }
    }
    Ok(vec![Check::below("max_deviation", worst, ctx.tol(DRESSING_TOL))])
}

fn toda(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let (mut matched, mut eom): (f64, f64) = (0.0, 0.0);
    let pair = scalar_pair(1.1)?;
    let rot = rotation_pair(1.2)?;
    for flow in [Flow::T1, Flow::T2] {
        let p = SolitonParams::type1(cx(0.7, 0.4), pair.kappa, cx(0.5, 0.2), cx(0.3, 0.1), flow);
        let direct = soliton_type1(&p, &pair, -3, 10, 2, 0.3)?;
        let (lin, y1) = type1_linear_data(&p)?;
        let t = toda_general_solution(&lin, &pair, y1, BoundaryTerm::default(), -3, 10, 2, 0.3)?;
        matched = matched.max(direct.field.max_abs_diff(&t));
        eom = eom.max(t.eom_defect(flow)?);

        let p = type2_params(flow, &rot);
        let direct = soliton_type2(&p, &rot, -3, 10, 2, 0.3)?;
        let (lin, y1) = type2_linear_data(&p)?;
        let t = toda_general_solution(&lin, &rot, y1, BoundaryTerm::default(), -3, 10, 2, 0.3)?;
        matched = matched.max(direct.field.max_abs_diff(&t));
        eom = eom.max(t.eom_defect(flow)?);

        let general =
            toda_general_solution(&three_mode_heat(flow.alpha())?, &pair, cx(0.4, 0.0), BoundaryTerm::default(), -3, 10, 2, 0.3)?;
        eom = eom.max(general.eom_defect(flow)?);
    }
    Ok(vec![
        Check::below("soliton_match", matched, ctx.tol(TODA_MATCH_TOL)),
        Check::below("eom_defect", eom, ctx.tol(TODA_EOM_TOL)),
    ])
}

fn bianchi(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let pair = scalar_pair(1.1)?;
    let s1 = periodic_type1(root(1.0, 12.0), cx(0.3, 0.1), cx(0.5, 0.0), Flow::T1, &pair, 3)?;
    let s2 = periodic_type1(root(2.0, 12.0), cx(-0.2, 0.4), cx(0.8, -0.3), Flow::T1, &pair, 3)?;
    let ab = bianchi_two_soliton(&s1, &s2)?;
    let ba = bianchi_two_soliton(&s2, &s1)?;
    let partner = periodic_type1(root(2.0, 12.0), cx(0.0, 0.0), cx(0.0, 0.0), Flow::T1, &pair, 3)?;
    let collapse = match bianchi_two_soliton(&s1, &partner) {
        Ok(out) => out
            .sites()
            .map(|n| {
                (out.x_at(n).value - s1.field.x_at(n).value)
                    .norm()
                    .max((out.y_at(n).value - s1.field.y_at(n).value).norm())
            })
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    Ok(vec![
        Check::below("symmetry", ab.max_abs_diff(&ba), ctx.tol(BIANCHI_SYMMETRY_TOL)),
        Check::below("eom_defect", ab.eom_defect(Flow::T1)?, ctx.tol(BIANCHI_EOM_TOL)),
        Check::below("zero_seed_collapse", collapse, ctx.tol(BIANCHI_COLLAPSE_TOL)),
    ])
}

fn glm_soliton(scheme: GlmScheme, lambda: Complex64, lambda_hat: Complex64) -> Result<GlmSolitonParams, CliError> {
    Ok(GlmSolitonParams {
        lambda,
        lambda_hat,
        amplitude: cx(0.7, 0.0),
        amplitude_hat: cx(0.9, 0.3),
        scheme,
        weight: cx(1.0, 0.0),
        alpha: 1,
        pair: scalar_pair(1.0)?,
    })
}

fn glm(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let (mut residual, mut closed, mut fit): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let lambda = 0.3_f64;
    let lambda_hat = -(2.0 - (2.0 * lambda).exp()).ln() / 2.0;
    for scheme in [GlmScheme::ForwardBackward, GlmScheme::Symmetric] {
        let p = glm_soliton(scheme, cx(1.0, 0.2), cx(0.8, -0.1))?;
        let sol = solve_glm(&build_hankel_data(&p.data(10, 0.1), &p.pair)?)?;
        residual = residual.max(sol.residual_rel);
        closed = closed.max(closed_form_deviation(&p, &sol, 0.1)?.0);

        let sol = solve_glm(&build_hankel_data(&two_mode_data(scheme), &scalar_pair(1.0)?)?)?;
        residual = residual.max(sol.residual_rel);

        let p = glm_soliton(scheme, cx(lambda, 0.0), cx(lambda_hat, 0.0))?;
        let sol = solve_glm(&build_hankel_data(&p.data(32, 0.0), &p.pair)?)?;
        let f = fit_type2(&p, &sol, 0.0)?;
        fit = fit.max(f.x_error).max(f.y_error);
    }
    Ok(vec![
        Check::below("residual_rel", residual, ctx.tol(GLM_RESIDUAL_TOL)),
        Check::below("closed_form_deviation", closed, ctx.tol(GLM_CLOSED_FORM_TOL)),
        Check::below("type2_fit", fit, ctx.tol(GLM_FIT_TOL)),
    ])
}

fn two_mode_data(scheme: GlmScheme) -> lattice_akns::glm::GlmData {
    use lattice_akns::glm::{GlmData, GlmMode};
    let mode = |a: Complex64, e: Complex64| GlmMode { amplitude: a, exponent: e };
    GlmData {
        scheme,
        weight: cx(1.0, 0.0),
        alpha: 1,
        window: 8,
        time: 0.25,
        modes: vec![mode(cx(0.5, 0.1), cx(0.9, 0.3)), mode(cx(-0.2, 0.4), cx(1.4, -0.2))],
        hat_modes: vec![mode(cx(0.6, 0.0), cx(1.1, 0.0)), mode(cx(0.3, -0.3), cx(0.7, 0.5))],
    }
}

fn cole_hopf(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let cfg = BurgersConfig::default();
    let heat = LinearSolution::new(&cfg.modes, 2, LinearScheme::ForwardDnls)?;
    let mut residual: f64 = 0.0;
    for t in [0.0, 0.5, 1.0] {
        residual = residual.max(burgers_residual(&cole_hopf_forward(&heat, cfg.first_site, cfg.n_sites, t)?));
    }
    let report = burgers_truncation_order(
        &DeltaScaling::LongWave { amplitude: cx(1.0, 0.0) },
        &[0.05, 0.025],
        cfg.truncation_first_site,
        cfg.truncation_n_sites,
        cfg.truncation_time,
    )?;
    let ratio = report.burgers_ratios[0].unwrap_or(f64::NAN);
    Ok(vec![
        Check::below("burgers_residual", residual, ctx.tol(BURGERS_TOL)),
        Check::within("truncation_ratio", ratio, TRUNCATION_RATIO.0, TRUNCATION_RATIO.1),
    ])
}

fn continuum(_ctx: &Context) -> Result<Vec<Check>, CliError> {
    let cfg = ContinuumConfig::default();
    let conv = continuum_convergence(&cfg.grid, &ContinuumProfile::HeatKernel)?;
    Ok(vec![Check::within("convergence_ratio", conv.ratio, CONTINUUM_RATIO.0, CONTINUUM_RATIO.1)])
}

fn rk4_order(_ctx: &Context) -> Result<Vec<Check>, CliError> {
    let pair = scalar_pair(1.1)?;
    let dnls = periodic_type1(root(1.0, 12.0), cx(0.3, 0.1), cx(0.5, 0.0), Flow::T1, &pair, 0)?.state();
    let run = |dt: f64, steps: usize| evolve(&dnls, Flow::T1, dt, steps, steps).map(|t| t.last().clone());
    let (c, f, ff) = (run(0.1, 10)?, run(0.05, 20)?, run(0.025, 40)?);
    let mut checks = vec![Check::within("dnls_t1", c.max_abs_diff(&f) / f.max_abs_diff(&ff), RK4_RATIO.0, RK4_RATIO.1)];

    let (big_q, zeta) = (cx(1.2, 0.0), cx(0.5, 0.2));
    let params = AlDarbouxParams {
        big_q,
        kappa: big_q * big_q * zeta,
        zeta,
        seeds: AlSeeds { a1: cx(0.0, 0.0), d1: cx(0.0, 0.0), b_hat1: cx(0.0, 0.0), b1: cx(0.0, 0.0) },
        pair: scalar_pair(1.0)?,
    };
    let lin = LinearSolution::new(
        &[(cx(0.3, 0.0), cx(1.8, 0.0)), (cx(0.1, 0.2), Complex64::from_polar(2.5, 0.4))],
        1,
        LinearScheme::SymmetricAl,
    )?;
    let al = al_soliton_oscillator(&params, &lin, cx(0.7, 0.0), -5, 14, 1, 0.0)?.state();
    for (name, variant) in [("al", AlVariant::Al), ("network", AlVariant::Network)] {
        let run = |dt: f64, steps: usize| al_evolve(&al, variant, dt, steps, steps).map(|t| t.last().clone());
        let (c, f, ff) = (run(0.1, 10)?, run(0.05, 20)?, run(0.025, 40)?);
        checks.push(Check::within(name, c.max_abs_diff(&f) / f.max_abs_diff(&ff), RK4_RATIO.0, RK4_RATIO.1));
    }
    Ok(checks)
}

fn run_suite(ctx: &Context, name: &str) -> SuiteReport {
    let result = match name {
        "zero-curvature" => zero_curvature(ctx),
        "conservation" => conservation(ctx),
        "recursion" => recursion(ctx),
        "dressing" => dressing(ctx),
        "toda" => toda(ctx),
        "bianchi" => bianchi(ctx),
        "glm" => glm(ctx),
        "cole-hopf" => cole_hopf(ctx),
        "continuum" => continuum(ctx),
        "rk4-order" => rk4_order(ctx),
        other => Err(CliError::Usage(format!("unknown suite {other}"))),
    };
    match result {
        Ok(checks) => SuiteReport { suite: name.into(), pass: checks.iter().all(|c| c.pass), checks, error: None },
        Err(e) => SuiteReport { suite: name.into(), pass: false, checks: Vec::new(), error: Some(e.to_string()) },
    }
}

#[derive(Serialize)]
struct VerifyArtifact<'a> {
    config: RunConfig<'a, VerifyConfig>,
    pass: bool,
    suites: &'a [SuiteReport],
}

pub fn verify_all(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let cfg: VerifyConfig = load(ctx.config.as_deref())?;
    if let Some(bad) = cfg.suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(CliError::Usage(format!("unknown suite {bad}; known: {}", SUITES.join(", "))));
    }
    let reports: Vec<SuiteReport> = cfg.suites.par_iter().map(|s| run_suite(ctx, s)).collect();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for r in &reports {
        for c in &r.checks {
            let bound = |b: Option<f64>| b.map(num).unwrap_or_default();
            rows.push(vec![
                r.suite.clone(),
                c.name.clone(),
                num(c.value),
                bound(c.lower),
                bound(c.upper),
                c.pass.to_string(),
            ]);
            checks.push(Check { name: format!("{}/{}", r.suite, c.name), ..c.clone() });
        }
        if let Some(e) = &r.error {
            rows.push(vec![r.suite.clone(), "error".into(), String::new(), String::new(), String::new(), "false".into()]);
            checks.push(Check { name: format!("{}/error: {e}", r.suite), value: f64::NAN, lower: None, upper: None, pass: false });
        }
    }
    write_csv(&ctx.out, "verify.csv", &["suite", "check", "value", "lower", "upper", "pass"], rows)?;
    let artifact = VerifyArtifact {
        config: RunConfig {
            command: "verify-all",
            model: ctx.model,
            seed: ctx.seed,
            tolerance_scale: ctx.tolerance_scale,
            params: &cfg,
        },
        pass: reports.iter().all(|r| r.pass),
        suites: &reports,
    };
    write_json(&ctx.out, "verify.json", &artifact)?;
    Ok(checks)
}
