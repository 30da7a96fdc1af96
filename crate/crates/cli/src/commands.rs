//! One function per subcommand. Each loads its parameter block, writes its
//! artifacts into the output directory and returns the declared checks.

use lattice_akns::al::{al_soliton_oscillator, AlDarbouxParams, AlSeeds};
use lattice_akns::colehopf::{
    burgers_residual, burgers_residuals, burgers_truncation_order, cole_hopf_forward, continuum_convergence,
    hamilton_jacobi_residual, hamilton_jacobi_residuals, verify_continuum_nls, ContinuumProfile, DeltaScaling,
};
use lattice_akns::conserved::{
    charge_drift, charge_recursion, closed_form_charges, tau_coefficients, trace_drift, transfer_trace,
};
use lattice_akns::darboux::{LinearScheme, LinearSolution, SolitonFamily, SolitonParams};
use lattice_akns::glm::{build_hankel_data, closed_form_deviation, solve_glm, GlmData, GlmMode, GlmScheme, GlmSolitonParams};
use lattice_akns::integrate::BlockFields;
use lattice_akns::{
    al::al_evolve, dnls::evolve as dnls_evolve, AlVariant, CMatrix, ChargeRule, ClosureKind, Complex64, ContinuumGrid,
    Flow, RankOnePair,
};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::config::{build_soliton, cx, default_soliton, load, Initial, InitialState, PairConfig, TimeGrid};
use crate::report::{num, write_csv, write_json, Check};
use crate::{CliError, Context, FamilyArg, GlmArgs, Model, RunConfig, SchemeArg, SolitonArgs};

pub const DNLS_EOM_TOL: f64 = 1e-10;
pub const AL_EOM_TOL: f64 = 1e-8;
pub const PERIODICITY_TOL: f64 = 1e-10;
pub const CONSTRAINT_TOL: f64 = 1e-10;
pub const TRACE_DRIFT_TOL: f64 = 1e-6;
pub const CHARGE_DRIFT_TOL: f64 = 1e-7;
pub const TAU_MATCH_TOL: f64 = 1e-10;
pub const GLM_RESIDUAL_TOL: f64 = 1e-10;
pub const GLM_CLOSED_FORM_TOL: f64 = 1e-10;
pub const BURGERS_TOL: f64 = 1e-10;
pub const TRUNCATION_RATIO: (f64, f64) = (6.0, 10.0);
pub const CONTINUUM_RATIO: (f64, f64) = (3.5, 4.5);

#[derive(Serialize)]
struct Artifact<'a, P: Serialize, R: Serialize> {
    config: RunConfig<'a, P>,
    checks: &'a [Check],
    results: R,
}

fn emit<P: Serialize, R: Serialize>(
    ctx: &Context,
    command: &str,
    params: &P,
    checks: &[Check],
    results: R,
) -> Result<(), CliError> {
    let artifact = Artifact {
        config: RunConfig { command, model: ctx.model, seed: ctx.seed, tolerance_scale: ctx.tolerance_scale, params },
        checks,
        results,
    };
    write_json(&ctx.out, &format!("{command}.json"), &artifact)
}

fn c_cells(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

fn block_rows(t: f64, site: usize, block: &str, m: &CMatrix, rows: &mut Vec<Vec<String>>) {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let z = m[(r, c)];
            rows.push(vec![num(t), site.to_string(), block.into(), r.to_string(), c.to_string(), num(z.re), num(z.im)]);
        }
    }
}

// ---------------------------------------------------------------- soliton

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DnlsSolitonConfig {
    pub soliton: SolitonParams,
    pub pair: PairConfig,
    pub first_site: i64,
    pub n_sites: usize,
    pub halo: usize,
    pub times: TimeGrid,
}

impl Default for DnlsSolitonConfig {
    fn default() -> Self {
        Self {
            soliton: default_soliton(Flow::T1),
            pair: PairConfig::default(),
            first_site: 1,
            n_sites: 12,
            halo: 2,
            times: TimeGrid::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlSolitonConfig {
    /// `Q`; the closure constant is `Q²ζ`.
    pub big_q: Complex64,
    pub zeta: Complex64,
    /// Heat modes `(amplitude, base)` of the symmetric lattice flow.
    pub modes: Vec<(Complex64, Complex64)>,
    /// Coefficient of the homogeneous term.
    pub homogeneous: Complex64,
    pub variant: AlVariant,
    pub first_site: i64,
    pub n_sites: usize,
    pub halo: usize,
    pub times: TimeGrid,
}

impl Default for AlSolitonConfig {
    fn default() -> Self {
        Self {
            big_q: cx(1.2, 0.0),
            zeta: cx(0.5, 0.2),
            modes: vec![(cx(0.3, 0.0), cx(1.8, 0.0)), (cx(0.1, 0.2), Complex64::from_polar(2.5, 0.4))],
            homogeneous: cx(0.7, 0.0),
            variant: AlVariant::Al,
            first_site: -5,
            n_sites: 14,
            halo: 1,
            times: TimeGrid::default(),
        }
    }
}

const SOLITON_HEADER: [&str; 6] = ["t", "site", "upper_re", "upper_im", "lower_re", "lower_im"];

fn apply_soliton_flags(cfg: &mut DnlsSolitonConfig, args: &SolitonArgs) {
    let s = &mut cfg.soliton;
    match (args.family, s.family) {
        (Some(FamilyArg::Type2), SolitonFamily::Type1 { .. }) => {
            *s = SolitonParams::type2(cx(0.5, 0.0), s.kappa, cx(0.6, 0.1), cx(0.3, -0.2), s.flow);
        }
        (Some(FamilyArg::Type1), SolitonFamily::Type2 { .. }) => {
            let mut d = default_soliton(s.flow);
            d.kappa = s.kappa;
            *s = d;
        }
        _ => {}
    }
    if let Some(xi) = args.xi {
        s.family = SolitonFamily::Type1 { xi };
    }
    if let Some(p) = args.periodic {
        s.periodic = p;
    }
}

pub fn soliton(ctx: &Context, args: &SolitonArgs) -> Result<Vec<Check>, CliError> {
    match ctx.model {
        Model::Dnls => {
            let mut cfg: DnlsSolitonConfig = load(ctx.config.as_deref())?;
            apply_soliton_flags(&mut cfg, args);
            dnls_soliton(ctx, &cfg)
        }
        Model::Al => {
            if args.family.is_some() || args.xi.is_some() || args.periodic.is_some() {
                return Err(CliError::Usage("--family, --xi and --periodic apply to --model dnls".into()));
            }
            let cfg: AlSolitonConfig = load(ctx.config.as_deref())?;
            al_soliton(ctx, &cfg)
        }
    }
}

#[derive(Serialize)]
struct SolitonSample {
    t: f64,
    eom_defect: f64,
    periodicity_defect: f64,
    constraint_residual: f64,
}

fn dnls_soliton(ctx: &Context, cfg: &DnlsSolitonConfig) -> Result<Vec<Check>, CliError> {
    if matches!(cfg.soliton.family, SolitonFamily::Type2 { .. }) && cfg.soliton.periodic {
        return Err(CliError::Usage("second-family solitons are not periodic".into()));
    }
    let pair = cfg.pair.build(cfg.soliton.kappa)?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for t in cfg.times.times()? {
        let sol = build_soliton(&cfg.soliton, &pair, cfg.first_site, cfg.n_sites, cfg.halo, t)?;
        for n in sol.field.sites() {
            let (x, y) = (sol.field.x_at(n).value, sol.field.y_at(n).value);
            let [xr, xi] = c_cells(x);
            let [yr, yi] = c_cells(y);
            rows.push(vec![num(t), n.to_string(), xr, xi, yr, yi]);
        }
        samples.push(SolitonSample {
            t,
            eom_defect: sol.field.eom_defect(cfg.soliton.flow)?,
            periodicity_defect: sol.field.periodicity_defect(),
            constraint_residual: sol.constraint_residual(),
        });
    }
    let worst = |f: fn(&SolitonSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let mut checks = vec![Check::below("eom_defect", worst(|s| s.eom_defect), ctx.tol(DNLS_EOM_TOL))];
    if cfg.soliton.periodic {
        checks.push(Check::below("periodicity_defect", worst(|s| s.periodicity_defect), ctx.tol(PERIODICITY_TOL)));
    }
    checks.push(Check::below("constraint_residual", worst(|s| s.constraint_residual), ctx.tol(CONSTRAINT_TOL)));
    write_csv(&ctx.out, "soliton.csv", &SOLITON_HEADER, rows)?;
    emit(ctx, "soliton", cfg, &checks, samples)?;
    Ok(checks)
}

fn al_soliton(ctx: &Context, cfg: &AlSolitonConfig) -> Result<Vec<Check>, CliError> {
    let pair = RankOnePair::new(1, 1, cx(1.0, 0.0), ClosureKind::TripleProduct)?;
    let zero = cx(0.0, 0.0);
    let params = AlDarbouxParams {
        big_q: cfg.big_q,
        kappa: cfg.big_q * cfg.big_q * cfg.zeta,
        zeta: cfg.zeta,
        seeds: AlSeeds { a1: zero, d1: zero, b_hat1: zero, b1: zero },
        pair,
    };
    let heat = LinearSolution::new(&cfg.modes, 1, LinearScheme::SymmetricAl)?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for t in cfg.times.times()? {
        let sol = al_soliton_oscillator(&params, &heat, cfg.homogeneous, cfg.first_site, cfg.n_sites, cfg.halo.max(1), t)?;
        for i in 0..sol.n_sites {
            let k = sol.halo + i;
            let [ur, ui] = c_cells(sol.b_hat[k].value);
            let [lr, li] = c_cells(sol.b[k].value);
            rows.push(vec![num(t), (sol.first_site + i as i64).to_string(), ur, ui, lr, li]);
        }
        samples.push(SolitonSample {
            t,
            eom_defect: sol.eom_defect(cfg.variant)?,
            periodicity_defect: 0.0,
            constraint_residual: 0.0,
        });
    }
    let eom = samples.iter().map(|s| s.eom_defect).fold(0.0, f64::max);
    let checks = vec![Check::below("eom_defect", eom, ctx.tol(AL_EOM_TOL))];
    write_csv(&ctx.out, "soliton.csv", &SOLITON_HEADER, rows)?;
    emit(ctx, "soliton", cfg, &checks, samples)?;
    Ok(checks)
}

// ---------------------------------------------------------------- evolve / charges

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub initial: Initial,
    /// DNLS flow index.
    pub flow: Flow,
    /// AL flow variant.
    pub variant: AlVariant,
    pub dt: f64,
    pub steps: usize,
    pub sample_every: usize,
    /// Spectral points at which `tr T` is tracked.
    pub trace_points: Vec<Complex64>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            initial: Initial::default(),
            flow: Flow::T1,
            variant: AlVariant::Al,
            dt: 1e-3,
            steps: 1000,
            sample_every: 100,
            trace_points: vec![cx(1.3, 0.0), cx(0.4, 0.9), cx(-2.0, 0.5)],
        }
    }
}

impl EvolveConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.dt.is_finite() && self.dt > 0.0) || self.steps == 0 || self.sample_every == 0 {
            return Err(CliError::Usage("dt, steps and sample_every must be positive".into()));
        }
        if self.trace_points.is_empty() {
            return Err(CliError::Usage("trace_points must not be empty".into()));
        }
        Ok(())
    }
}

enum Run {
    Dnls(lattice_akns::Trajectory<lattice_akns::DnlsState>),
    Al(lattice_akns::Trajectory<lattice_akns::AlState>),
}

fn integrate(ctx: &Context, cfg: &EvolveConfig) -> Result<Run, CliError> {
    cfg.validate()?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(ctx.seed);
    Ok(match cfg.initial.build(ctx.model, &mut rng)? {
        InitialState::Dnls(s) => Run::Dnls(dnls_evolve(&s, cfg.flow, cfg.dt, cfg.steps, cfg.sample_every)?),
        InitialState::Al(s) => Run::Al(al_evolve(&s, cfg.variant, cfg.dt, cfg.steps, cfg.sample_every)?),
    })
}

fn max_drift(v: Vec<f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

pub fn evolve(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let cfg: EvolveConfig = load(ctx.config.as_deref())?;
    let run = integrate(ctx, &cfg)?;
    let mut rows = Vec::new();
    let drift = match &run {
        Run::Dnls(tr) => {
            for (t, s) in tr.times.iter().zip(&tr.states) {
                for site in 0..s.n_sites() {
                    block_rows(*t, site, "upper", &s.upper()[site], &mut rows);
                    block_rows(*t, site, "lower", &s.lower()[site], &mut rows);
                }
            }
            max_drift(trace_drift(&tr.states, &cfg.trace_points)?)
        }
        Run::Al(tr) => {
            for (t, s) in tr.times.iter().zip(&tr.states) {
                for site in 0..s.n_sites() {
                    block_rows(*t, site, "upper", &s.upper()[site], &mut rows);
                    block_rows(*t, site, "lower", &s.lower()[site], &mut rows);
                }
            }
            max_drift(trace_drift(&tr.states, &cfg.trace_points)?)
        }
    };
    let checks = vec![Check::below("trace_drift", drift, ctx.tol(TRACE_DRIFT_TOL))];
    write_csv(&ctx.out, "evolve.csv", &["t", "site", "block", "row", "col", "re", "im"], rows)?;
    emit(ctx, "evolve", &cfg, &checks, ())?;
    Ok(checks)
}

#[derive(Serialize)]
struct ChargeResults {
    trace_drift: f64,
    charge_drift: Option<[f64; 4]>,
    tau_mismatch: Option<f64>,
}

pub fn charges(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let cfg: EvolveConfig = load(ctx.config.as_deref())?;
    let run = integrate(ctx, &cfg)?;
    let mut header: Vec<String> = vec!["t".into()];
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let results = match &run {
        Run::Dnls(tr) => {
            for k in 1..=4 {
                header.push(format!("h{k}_re"));
                header.push(format!("h{k}_im"));
            }
            let scalar = tr.states[0].n_dim() == 1 && tr.states[0].n_sites() > 4;
            let mut mismatch: f64 = 0.0;
            for (t, s) in tr.times.iter().zip(&tr.states) {
                let h = closed_form_charges(s);
                let mut row = vec![num(*t)];
                row.extend(h.iter().flat_map(|&z| c_cells(z)));
                rows.push(row);
                if scalar {
                    let from_tau = charge_recursion(&tau_coefficients(s)?, 4, ChargeRule::Validated)?;
                    for (a, b) in from_tau.iter().zip(&h) {
                        mismatch = mismatch.max((a - b).norm() / (1.0 + b.norm()));
                    }
                }
            }
            let trace = max_drift(trace_drift(&tr.states, &cfg.trace_points)?);
            let hd = charge_drift(&tr.states)?;
            if scalar {
                checks.push(Check::below("tau_vs_closed_form", mismatch, ctx.tol(TAU_MATCH_TOL)));
            }
            checks.push(Check::below("charge_drift", hd.iter().copied().fold(0.0, f64::max), ctx.tol(CHARGE_DRIFT_TOL)));
            checks.push(Check::below("trace_drift", trace, ctx.tol(TRACE_DRIFT_TOL)));
            ChargeResults { trace_drift: trace, charge_drift: Some(hd), tau_mismatch: scalar.then_some(mismatch) }
        }
        Run::Al(tr) => {
            for k in 0..cfg.trace_points.len() {
                header.push(format!("trace{k}_re"));
                header.push(format!("trace{k}_im"));
            }
            for (t, s) in tr.times.iter().zip(&tr.states) {
                let mut row = vec![num(*t)];
                for &z in &cfg.trace_points {
                    row.extend(c_cells(transfer_trace(s, z)?));
                }
                rows.push(row);
            }
            let trace = max_drift(trace_drift(&tr.states, &cfg.trace_points)?);
            checks.push(Check::below("trace_drift", trace, ctx.tol(TRACE_DRIFT_TOL)));
            ChargeResults { trace_drift: trace, charge_drift: None, tau_mismatch: None }
        }
    };
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(&ctx.out, "charges.csv", &header, rows)?;
    emit(ctx, "charges", &cfg, &checks, results)?;
    Ok(checks)
}

// ---------------------------------------------------------------- glm

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GlmConfig {
    pub data: GlmData,
    /// Closure constant of the scalar pair.
    pub kappa: Complex64,
}

impl GlmConfig {
    fn preset(modes: usize, scheme: GlmScheme) -> Result<Self, CliError> {
        let mode = |a: Complex64, e: Complex64| GlmMode { amplitude: a, exponent: e };
        let (window, time, m, h) = match modes {
            1 => (10, 0.1, vec![mode(cx(0.7, 0.0), cx(1.0, 0.2))], vec![mode(cx(0.9, 0.3), cx(0.8, -0.1))]),
            2 => (
                8,
                0.25,
                vec![mode(cx(0.5, 0.1), cx(0.9, 0.3)), mode(cx(-0.2, 0.4), cx(1.4, -0.2))],
                vec![mode(cx(0.6, 0.0), cx(1.1, 0.0)), mode(cx(0.3, -0.3), cx(0.7, 0.5))],
            ),
            other => return Err(CliError::Usage(format!("--modes must be 1 or 2, got {other}"))),
        };
        Ok(Self {
            data: GlmData { scheme, weight: cx(1.0, 0.0), alpha: 1, window, time, modes: m, hat_modes: h },
            kappa: cx(1.0, 0.0),
        })
    }
}

impl Default for GlmConfig {
    fn default() -> Self {
        Self::preset(1, GlmScheme::ForwardBackward).expect("one-mode preset")
    }
}

#[derive(Serialize)]
struct GlmResults {
    residual_abs: f64,
    residual_rel: f64,
    closed_form_deviation: Option<f64>,
    closed_form_rows: Option<usize>,
}

pub fn glm(ctx: &Context, args: &GlmArgs) -> Result<Vec<Check>, CliError> {
    let scheme = args.scheme.map(|s| match s {
        SchemeArg::ForwardBackward => GlmScheme::ForwardBackward,
        SchemeArg::Symmetric => GlmScheme::Symmetric,
    });
    let mut cfg: GlmConfig = match (&ctx.config, args.modes) {
        (Some(_), modes) => {
            let cfg: GlmConfig = load(ctx.config.as_deref())?;
            if let Some(m) = modes {
                if cfg.data.modes.len() != m || cfg.data.hat_modes.len() != m {
                    return Err(CliError::Usage(format!("--modes {m} disagrees with the configured modes")));
                }
            }
            cfg
        }
        (None, modes) => GlmConfig::preset(modes.unwrap_or(1), GlmScheme::ForwardBackward)?,
    };
    if let Some(s) = scheme {
        cfg.data.scheme = s;
    }
    let pair = RankOnePair::new(1, 1, cfg.kappa, ClosureKind::TripleProduct)?;
    let sol = solve_glm(&build_hankel_data(&cfg.data, &pair)?)?;
    let mut checks = vec![Check::below("residual_rel", sol.residual_rel, ctx.tol(GLM_RESIDUAL_TOL))];
    let mut results = GlmResults {
        residual_abs: sol.residual_abs,
        residual_rel: sol.residual_rel,
        closed_form_deviation: None,
        closed_form_rows: None,
    };
    if let ([m], [h]) = (cfg.data.modes.as_slice(), cfg.data.hat_modes.as_slice()) {
        let params = GlmSolitonParams {
            lambda: m.exponent,
            lambda_hat: h.exponent,
            amplitude: m.amplitude,
            amplitude_hat: h.amplitude,
            scheme: cfg.data.scheme,
            weight: cfg.data.weight,
            alpha: cfg.data.alpha,
            pair,
        };
        let (dev, rows) = closed_form_deviation(&params, &sol, cfg.data.time)?;
        checks.push(Check::below("closed_form_deviation", dev, ctx.tol(GLM_CLOSED_FORM_TOL)));
        checks.push(Check::holds("closed_form_rows", rows > 0));
        results.closed_form_deviation = Some(dev);
        results.closed_form_rows = Some(rows);
    }
    let header = ["k", "j", "row", "col", "re", "im"];
    let blocks = |f: &dyn Fn(i64, i64) -> CMatrix| {
        let mut rows = Vec::new();
        for k in sol.sites() {
            for j in sol.sites() {
                let m = f(k, j);
                for r in 0..m.rows() {
                    for c in 0..m.cols() {
                        let z = m[(r, c)];
                        rows.push(vec![k.to_string(), j.to_string(), r.to_string(), c.to_string(), num(z.re), num(z.im)]);
                    }
                }
            }
        }
        rows
    };
    write_csv(&ctx.out, "glm_b.csv", &header, blocks(&|k, j| sol.b_block(k, j)))?;
    write_csv(&ctx.out, "glm_c.csv", &header, blocks(&|k, j| sol.c_block(k, j)))?;
    emit(ctx, "glm", &cfg, &checks, results)?;
    Ok(checks)
}

// ---------------------------------------------------------------- burgers

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BurgersConfig {
    /// Heat modes `(amplitude, base)` of the forward second flow.
    pub modes: Vec<(Complex64, Complex64)>,
    pub first_site: i64,
    pub n_sites: usize,
    pub times: TimeGrid,
    pub scaling: DeltaScaling,
    pub deltas: Vec<f64>,
    pub truncation_first_site: i64,
    pub truncation_n_sites: usize,
    pub truncation_time: f64,
}

impl Default for BurgersConfig {
    fn default() -> Self {
        Self {
            modes: vec![(cx(1.0, 0.0), cx(1.0, 0.0)), (cx(0.4, 0.2), cx(0.7, 0.1)), (cx(0.2, 0.0), cx(1.3, 0.0))],
            first_site: -4,
            n_sites: 14,
            times: TimeGrid { start: 0.0, stop: 1.0, samples: 3 },
            scaling: DeltaScaling::LongWave { amplitude: cx(1.0, 0.0) },
            deltas: vec![0.05, 0.025],
            truncation_first_site: 5,
            truncation_n_sites: 24,
            truncation_time: 0.3,
        }
    }
}

#[derive(Serialize)]
struct BurgersResults {
    hamilton_jacobi_residual: f64,
    burgers_residual: f64,
    truncation: lattice_akns::colehopf::TruncationReport,
}

pub fn burgers(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let cfg: BurgersConfig = load(ctx.config.as_deref())?;
    if cfg.deltas.len() < 2 {
        return Err(CliError::Usage("deltas needs at least two values".into()));
    }
    let heat = LinearSolution::new(&cfg.modes, 2, LinearScheme::ForwardDnls)?;
    let (mut hj_max, mut bu_max): (f64, f64) = (0.0, 0.0);
    let mut rows = Vec::new();
    for t in cfg.times.times()? {
        let fields = cole_hopf_forward(&heat, cfg.first_site, cfg.n_sites, t)?;
        hj_max = hj_max.max(hamilton_jacobi_residual(&fields));
        bu_max = bu_max.max(burgers_residual(&fields));
        let (hj, bu) = (hamilton_jacobi_residuals(&fields), burgers_residuals(&fields));
        let u = &fields.velocity.values;
        for (i, n) in fields.potential.sites().enumerate() {
            let y = fields.potential.values[i].value;
            let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
            let [yr, yi] = c_cells(y);
            let [ur, ui] = u.get(i).map(|j| c_cells(j.value)).unwrap_or_default();
            rows.push(vec![num(t), n.to_string(), yr, yi, ur, ui, opt(hj.get(i).copied()), opt(bu.get(i).copied())]);
        }
    }
    let report = burgers_truncation_order(
        &cfg.scaling,
        &cfg.deltas,
        cfg.truncation_first_site,
        cfg.truncation_n_sites,
        cfg.truncation_time,
    )?;
    let mut checks = vec![
        Check::below("hamilton_jacobi_residual", hj_max, ctx.tol(BURGERS_TOL)),
        Check::below("burgers_residual", bu_max, ctx.tol(BURGERS_TOL)),
    ];
    for (i, r) in report.burgers_ratios.iter().enumerate() {
        let v = r.unwrap_or(f64::NAN);
        checks.push(Check::within(format!("truncation_ratio_{i}"), v, TRUNCATION_RATIO.0, TRUNCATION_RATIO.1));
    }
    write_csv(
        &ctx.out,
        "burgers.csv",
        &["t", "site", "y_re", "y_im", "u_re", "u_im", "hj_residual", "burgers_residual"],
        rows,
    )?;
    let trows = report.deltas.iter().enumerate().map(|(i, d)| {
        vec![num(*d), num(report.hj_remainders[i]), num(report.burgers_remainders[i])]
    });
    write_csv(&ctx.out, "truncation.csv", &["delta", "hj_remainder", "burgers_remainder"], trows)?;
    let results = BurgersResults { hamilton_jacobi_residual: hj_max, burgers_residual: bu_max, truncation: report };
    emit(ctx, "burgers", &cfg, &checks, results)?;
    Ok(checks)
}

// ---------------------------------------------------------------- continuum

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuumConfig {
    pub grid: ContinuumGrid,
    pub profile: ContinuumProfile,
}

impl Default for ContinuumConfig {
    fn default() -> Self {
        Self {
            grid: ContinuumGrid {
                x_min: -1.0,
                x_max: 1.0,
                hx: 0.02,
                t_min: 0.5,
                t_max: 1.0,
                ht: 0.02,
                g: cx(1.0, 0.0),
                kappa: cx(1.0, 0.0),
            },
            profile: ContinuumProfile::HeatKernel,
        }
    }
}

pub fn continuum(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let cfg: ContinuumConfig = load(ctx.config.as_deref())?;
    let report = verify_continuum_nls(&cfg.grid, &cfg.profile)?;
    let conv = continuum_convergence(&cfg.grid, &cfg.profile)?;
    let checks = vec![Check::within("convergence_ratio", conv.ratio, CONTINUUM_RATIO.0, CONTINUUM_RATIO.1)];
    let rows = report.points.iter().map(|p| vec![num(p.x), num(p.t), num(p.upper), num(p.lower)]);
    write_csv(&ctx.out, "continuum.csv", &["x", "t", "upper", "lower"], rows)?;
    emit(ctx, "continuum", &cfg, &checks, conv)?;
    Ok(checks)
}
