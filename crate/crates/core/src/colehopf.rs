//! Logarithmic map from the forward discrete heat equation to the discrete
//! Burgers equation, and the continuum heat-kernel solutions of the NLS pair.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::darboux::{LinearScheme, LinearSolution};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Heat data must satisfy its lattice equation to this relative accuracy.
pub const HEAT_RESIDUAL_TOL: f64 = 1e-10;

/// Sites whose neighbouring phases differ by less than this from `±π` have no
/// well-defined continuation of the logarithm.
pub const BRANCH_MARGIN: f64 = 1e-8;

/// Values and exact time derivatives on the window `first_site..first_site + len`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarLattice {
    pub first_site: i64,
    pub values: Vec<Jet>,
}

impl ScalarLattice {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.values.len() as i64).map(move |i| self.first_site + i)
    }

    pub fn at(&self, n: i64) -> Jet {
        self.values[(n - self.first_site) as usize]
    }

    /// Samples a mode sum at time `t`.
    pub fn from_modes(heat: &LinearSolution, first_site: i64, n_sites: usize, t: f64) -> Self {
        Self {
            first_site,
            values: (0..n_sites as i64).map(|i| heat.eval(first_site + i, t)).collect(),
        }
    }
}

/// Potential `y = ln x̂` and its increments `u_n = y_{n+1} - y_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColeHopfFields {
    pub potential: ScalarLattice,
    pub velocity: ScalarLattice,
}

fn check_forward_heat(heat: &LinearSolution, first_site: i64, n_sites: usize, t: f64) -> Result<()> {
    if heat.scheme != LinearScheme::ForwardDnls || heat.alpha != 2 {
        return Err(Error::InvalidParameter("heat data must solve the forward second-order lattice flow".into()));
    }
    let sites = first_site..first_site + n_sites as i64;
    let scale = sites.clone().map(|n| heat.eval(n, t).norm()).fold(0.0, f64::max).max(1.0);
    let defect = sites.map(|n| heat.residual(n, t).norm()).fold(0.0, f64::max);
    if !(defect <= HEAT_RESIDUAL_TOL * scale) {
        return Err(Error::InvalidParameter(format!("heat residual {defect:.3e} exceeds tolerance")));
    }
    Ok(())
}

/// Logarithm along the window, continued from the principal value at the first site.
fn continued_log(values: &[Jet], first_site: i64) -> Result<Vec<Jet>> {
    let mut out: Vec<Jet> = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        let site = first_site + i as i64;
        if !(v.value.norm() > 0.0) || !v.value.is_finite() {
            return Err(Error::LogBranch { site });
        }
        let mut y = v.ln();
        if let Some(prev) = out.last() {
            let step = (v.value / values[i - 1].value).arg();
            if PI - step.abs() < BRANCH_MARGIN {
                return Err(Error::LogBranch { site });
            }
            y.value.im = prev.value.im + step;
        }
        out.push(y);
    }
    Ok(out)
}

/// Maps heat data `x̂_n = e^{y_n}` on `n_sites` sites to the potential and its increments.
pub fn cole_hopf_forward(heat: &LinearSolution, first_site: i64, n_sites: usize, t: f64) -> Result<ColeHopfFields> {
    if n_sites < 2 {
        return Err(Error::InvalidParameter("need at least two sites".into()));
    }
    check_forward_heat(heat, first_site, n_sites, t)?;
    let raw = ScalarLattice::from_modes(heat, first_site, n_sites, t);
    let y = continued_log(&raw.values, first_site)?;
    let u = y.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(ColeHopfFields {
        potential: ScalarLattice { first_site, values: y },
        velocity: ScalarLattice { first_site, values: u },
    })
}

fn fold_max(v: Vec<f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

/// `|ẏ_n - e^{u_n}(e^{u_{n+1}} - 1) + (e^{u_n} - 1)|` at each site with a full stencil.
pub fn hamilton_jacobi_residuals(fields: &ColeHopfFields) -> Vec<f64> {
    let (y, u) = (&fields.potential.values, &fields.velocity.values);
    (0..u.len().saturating_sub(1))
        .map(|i| {
            let (e0, e1) = (u[i].value.exp(), u[i + 1].value.exp());
            (y[i].deriv - (e0 * (e1 - 1.0) - (e0 - 1.0))).norm()
        })
        .collect()
}

/// `|u̇_n - e^{u_{n+1}}(e^{u_{n+2}} - e^{u_n}) + 2(e^{u_{n+1}} - e^{u_n})|` at each site with a full stencil.
pub fn burgers_residuals(fields: &ColeHopfFields) -> Vec<f64> {
    let u = &fields.velocity.values;
    (0..u.len().saturating_sub(2))
        .map(|i| {
            let (e0, e1, e2) = (u[i].value.exp(), u[i + 1].value.exp(), u[i + 2].value.exp());
            (u[i].deriv - (e1 * (e2 - e0) - (e1 - e0) * 2.0)).norm()
        })
        .collect()
}

pub fn hamilton_jacobi_residual(fields: &ColeHopfFields) -> f64 {
    fold_max(hamilton_jacobi_residuals(fields))
}

pub fn burgers_residual(fields: &ColeHopfFields) -> f64 {
    fold_max(burgers_residuals(fields))
}

/// Remainders of the quadratic truncations
/// `ẏ_n ≈ Δ²y_n + (Δy_n)²` and `u̇_n ≈ Δ²u_n + Δ(u_n²)`.
pub fn truncation_remainders(fields: &ColeHopfFields) -> (f64, f64) {
    let (y, u) = (&fields.potential.values, &fields.velocity.values);
    let hj = fold_max(
        (0..y.len().saturating_sub(2))
            .map(|i| {
                let d2 = y[i + 2].value - y[i + 1].value * 2.0 + y[i].value;
                let d1 = y[i + 1].value - y[i].value;
                (y[i].deriv - d2 - d1 * d1).norm()
            })
            .collect(),
    );
    let burgers = fold_max(
        (0..u.len().saturating_sub(2))
            .map(|i| {
                let d2 = u[i + 2].value - u[i + 1].value * 2.0 + u[i].value;
                let dsq = u[i + 1].value * u[i + 1].value - u[i].value * u[i].value;
                (u[i].deriv - d2 - dsq).norm()
            })
            .collect(),
    );
    (hj, burgers)
}

/// How the heat data depends on the small parameter `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DeltaScaling {
    /// `x̂_n = 1 + c e^{-δ(n-1)} e^{Λt}`: slowly varying profile of fixed amplitude.
    LongWave { amplitude: Complex64 },
    /// `x̂_n = 1 + δ c ξ^{n-1} e^{Λt}`: fixed base, small amplitude.
    SmallAmplitude { amplitude: Complex64, base: Complex64 },
}

impl DeltaScaling {
    /// Heat data for a given `δ`; `δ = 0` gives the constant lattice.
    pub fn heat(&self, delta: f64) -> Result<LinearSolution> {
        let one = Complex64::new(1.0, 0.0);
        let modes = match *self {
            Self::LongWave { amplitude } => vec![(one, one), (amplitude, Complex64::new((-delta).exp(), 0.0))],
            Self::SmallAmplitude { amplitude, base } => vec![(one, one), (amplitude * delta, base)],
        };
        LinearSolution::new(&modes, 2, LinearScheme::ForwardDnls)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub deltas: Vec<f64>,
    pub hj_remainders: Vec<f64>,
    pub burgers_remainders: Vec<f64>,
    /// `r(δ_k) / r(δ_{k+1})` for consecutive entries; `None` where the finer remainder vanishes.
    pub hj_ratios: Vec<Option<f64>>,
    pub burgers_ratios: Vec<Option<f64>>,
    /// Least-squares slope of `ln r` against `ln δ` over positive remainders.
    pub burgers_exponent: Option<f64>,
    pub burgers_constant: Option<f64>,
}

fn ratios(r: &[f64]) -> Vec<Option<f64>> {
    r.windows(2).map(|w| (w[1] > 0.0).then(|| w[0] / w[1])).collect()
}

fn power_fit(deltas: &[f64], r: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .zip(r)
        .filter(|(d, r)| **d > 0.0 && **r > 0.0)
        .map(|(d, r)| (d.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, (my - slope * mx).exp()))
}

/// Measures both truncation remainders along a sequence of `δ` values at time `t`.
pub fn burgers_truncation_order(
    scaling: &DeltaScaling,
    deltas: &[f64],
    first_site: i64,
    n_sites: usize,
    t: f64,
) -> Result<TruncationReport> {
    let mut hj = Vec::with_capacity(deltas.len());
    let mut bu = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if !(0.0..=0.1).contains(&delta) {
            return Err(Error::InvalidParameter(format!("delta {delta} outside [0, 0.1]")));
        }
        let fields = cole_hopf_forward(&scaling.heat(delta)?, first_site, n_sites, t)?;
        let (r_hj, r_bu) = truncation_remainders(&fields);
        hj.push(r_hj);
        bu.push(r_bu);
    }
    let fit = power_fit(deltas, &bu);
    Ok(TruncationReport {
        deltas: deltas.to_vec(),
        hj_ratios: ratios(&hj),
        burgers_ratios: ratios(&bu),
        hj_remainders: hj,
        burgers_remainders: bu,
        burgers_exponent: fit.map(|f| f.0),
        burgers_constant: fit.map(|f| f.1),
    })
}

/// Rectangle in `(x, t)` sampled with steps `hx`, `ht`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub hx: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub ht: f64,
    pub g: Complex64,
    pub kappa: Complex64,
}

impl ContinuumGrid {
    fn validate(&self) -> Result<()> {
        if !(self.hx > 0.0 && self.ht > 0.0) || self.x_max < self.x_min || self.t_max < self.t_min {
            return Err(Error::InvalidParameter("grid steps must be positive and ranges ordered".into()));
        }
        if self.g.norm() == 0.0 || self.kappa.norm() == 0.0 {
            return Err(Error::InvalidParameter("g and kappa must be nonzero".into()));
        }
        // The time stencil reaches one step below t_min.
        if self.t_min - self.ht <= 0.0 {
            return Err(Error::SingularTime(self.t_min - self.ht));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|i| lo + h * i as f64).collect()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = Self::axis(self.x_min, self.x_max, self.hx);
        let ts = Self::axis(self.t_min, self.t_max, self.ht);
        ts.iter().flat_map(|&t| xs.iter().map(move |&x| (x, t))).collect()
    }

    pub fn refined(&self) -> Self {
        Self { hx: self.hx / 2.0, ht: self.ht / 2.0, ..*self }
    }
}

/// Linear seed `û₀` of the continuum pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContinuumProfile {
    /// Delta-function initial profile: `u = g t^{1/2} e^{x²/4t}`, `û = e^{-x²/4t} / (2κg t^{3/2})`.
    HeatKernel,
    /// `û₀ = Σ c_s e^{-k_s x + k_s² t}` mapped through `u = g/û₀`, `û = -(û₀û₀'' - û₀'²)/(κg û₀)`.
    Modes { modes: Vec<(Complex64, Complex64)> },
}

impl ContinuumProfile {
    /// Exact `(u, û)` at `(x, t)`.
    pub fn fields(&self, g: Complex64, kappa: Complex64, x: f64, t: f64) -> Result<(Complex64, Complex64)> {
        match self {
            Self::HeatKernel => {
                if t <= 0.0 {
                    return Err(Error::SingularTime(t));
                }
                let e = Complex64::new(x * x / (4.0 * t), 0.0).exp();
                Ok((g * t.sqrt() * e, (kappa * g).inv() / (e * 2.0 * t.powf(1.5))))
            }
            Self::Modes { modes } => {
                let zero = Complex64::new(0.0, 0.0);
                let (mut s0, mut s1, mut s2) = (zero, zero, zero);
                for &(c, k) in modes {
                    let e = c * (-k * x + k * k * t).exp();
                    s0 += e;
                    s1 -= k * e;
                    s2 += k * k * e;
                }
                if s0.norm() == 0.0 {
                    return Err(Error::InvalidParameter(format!("linear seed vanishes at x = {x}, t = {t}")));
                }
                Ok((g / s0, -(s0 * s2 - s1 * s1) / (kappa * g * s0)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumResidual {
    pub x: f64,
    pub t: f64,
    /// `u_t + u_xx - 2κ û u²` by centred differences.
    pub upper: f64,
    /// `-û_t + û_xx - 2κ u û²` by centred differences.
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumReport {
    pub hx: f64,
    pub ht: f64,
    pub max_residual: f64,
    pub points: Vec<ContinuumResidual>,
}

/// Centred-difference residuals of the continuum pair on every grid point.
pub fn verify_continuum_nls(grid: &ContinuumGrid, profile: &ContinuumProfile) -> Result<ContinuumReport> {
    grid.validate()?;
    let (g, k) = (grid.g, grid.kappa);
    let points = grid
        .points()
        .par_iter()
        .map(|&(x, t)| {
            let f = |dx: f64, dt: f64| profile.fields(g, k, x + dx, t + dt);
            let (u, uh) = f(0.0, 0.0)?;
            let (u_tp, uh_tp) = f(0.0, grid.ht)?;
            let (u_tm, uh_tm) = f(0.0, -grid.ht)?;
            let (u_xp, uh_xp) = f(grid.hx, 0.0)?;
            let (u_xm, uh_xm) = f(-grid.hx, 0.0)?;
            let dt = |p: Complex64, m: Complex64| (p - m) / (2.0 * grid.ht);
            let dxx = |p: Complex64, c: Complex64, m: Complex64| (p - c * 2.0 + m) / (grid.hx * grid.hx);
            let upper = dt(u_tp, u_tm) + dxx(u_xp, u, u_xm) - k * uh * u * u * 2.0;
            let lower = -dt(uh_tp, uh_tm) + dxx(uh_xp, uh, uh_xm) - k * u * uh * uh * 2.0;
            Ok(ContinuumResidual { x, t, upper: upper.norm(), lower: lower.norm() })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = points.iter().map(|p| p.upper.max(p.lower)).fold(0.0, f64::max);
    Ok(ContinuumReport { hx: grid.hx, ht: grid.ht, max_residual, points })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumConvergence {
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
}

/// Maximum residual on `grid` and on the grid with both steps halved.
pub fn continuum_convergence(grid: &ContinuumGrid, profile: &ContinuumProfile) -> Result<ContinuumConvergence> {
    let coarse = verify_continuum_nls(grid, profile)?.max_residual;
    let fine = verify_continuum_nls(&grid.refined(), profile)?.max_residual;
    Ok(ContinuumConvergence { coarse, fine, ratio: coarse / fine })
}
