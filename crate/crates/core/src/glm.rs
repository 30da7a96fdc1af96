//! Discrete Gelfand–Levitan–Marchenko factorisation on a finite window.
//!
//! Hankel data `f_{i+j}`, `f̂_{i+j}` built from decaying linear modes are
//! factorised as `(I + K⁺)(I + F) = I + K⁻` with `K⁺` upper and `K⁻` strictly
//! lower triangular in the site index. Each row of `K⁺` is an independent
//! dense solve, run in parallel.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{CMatrix, LuFactor, RankOnePair};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Relative pivot threshold for the window solves; rows far up the window are
/// badly scaled but still solvable, so only vanishing pivots are rejected.
pub const GLM_PIVOT_REL_TOL: f64 = 1e-300;

/// Hankel entries above this modulus are rejected.
pub const OVERFLOW_LIMIT: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlmScheme {
    /// `∂ₜf̂ = Δ^α f̂` (forward in the column index) and `∂ₜf = w^α ∇^α f` (backward).
    ForwardBackward,
    /// `∂ₜg_s = g_{s+1} - 2g_s + g_{s-1}`, with weight `w` on `f`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlmMode {
    pub amplitude: Complex64,
    /// Spatial decay rate: the mode is `e^{-exponent·s}`.
    pub exponent: Complex64,
}

/// Serializable description of a factorisation problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlmData {
    pub scheme: GlmScheme,
    #[serde(default = "unit_weight")]
    pub weight: Complex64,
    #[serde(default = "first_flow")]
    pub alpha: u32,
    /// Sites run over `-window..=window`.
    pub window: usize,
    #[serde(default)]
    pub time: f64,
    /// Modes of `f`, embedded along `B`.
    pub modes: Vec<GlmMode>,
    /// Modes of `f̂`, embedded along `B̂`.
    pub hat_modes: Vec<GlmMode>,
}

fn unit_weight() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn first_flow() -> u32 {
    1
}

/// Time exponents `(Λ, Λ̂)` for spatial rates `(λ, λ̂)`.
pub fn glm_dispersion(
    scheme: GlmScheme,
    weight: Complex64,
    alpha: u32,
    lambda: Complex64,
    lambda_hat: Complex64,
) -> Result<(Complex64, Complex64)> {
    match scheme {
        GlmScheme::ForwardBackward => {
            if alpha == 0 {
                return Err(Error::FlowUnsupported(0));
            }
            let a = alpha as i32;
            Ok((
                weight.powi(a) * (lambda.exp() - 1.0).powi(a),
                ((-lambda_hat).exp() - 1.0).powi(a),
            ))
        }
        GlmScheme::Symmetric if alpha == 1 => {
            let sym = |l: Complex64| {
                let s = (l / 2.0).exp() - (-l / 2.0).exp();
                s * s
            };
            Ok((weight * sym(lambda), sym(lambda_hat)))
        }
        GlmScheme::Symmetric => Err(Error::FlowUnsupported(alpha)),
    }
}

/// Integer difference operators on `2N + 1` sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceOps {
    pub window: usize,
    /// `D = Σ (e_{j,j+1} - e_{jj})`, row-major.
    pub d: Vec<i64>,
}

fn int_binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * i64::from(n - i) / i64::from(i + 1))
}

impl DifferenceOps {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidParameter("window must be at least 1".into()));
        }
        let n = 2 * window + 1;
        let mut d = vec![0i64; n * n];
        for j in 0..n {
            d[j * n + j] = -1;
            if j + 1 < n {
                d[j * n + j + 1] = 1;
            }
        }
        Ok(Self { window, d })
    }

    pub fn size(&self) -> usize {
        2 * self.window + 1
    }

    /// `D* = Dᵀ`.
    pub fn d_star(&self) -> Vec<i64> {
        let n = self.size();
        (0..n * n).map(|k| self.d[(k % n) * n + k / n]).collect()
    }

    fn int_mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let n = self.size();
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik != 0 {
                    for j in 0..n {
                        out[i * n + j] += aik * b[k * n + j];
                    }
                }
            }
        }
        out
    }

    /// `D^α` by repeated multiplication.
    pub fn power(&self, alpha: u32) -> Vec<i64> {
        let n = self.size();
        let mut p: Vec<i64> = (0..n * n).map(|k| i64::from(k % (n + 1) == 0)).collect();
        for _ in 0..alpha {
            p = self.int_mul(&p, &self.d);
        }
        p
    }

    /// `Σ_k (-1)^{α-k} C(α,k) e_{j,j+k}`.
    pub fn binomial_power(&self, alpha: u32) -> Vec<i64> {
        let n = self.size();
        let mut p = vec![0i64; n * n];
        for j in 0..n {
            for k in 0..=alpha {
                if j + (k as usize) < n {
                    let sign = if (alpha - k) % 2 == 0 { 1 } else { -1 };
                    p[j * n + j + k as usize] = sign * int_binomial(alpha, k);
                }
            }
        }
        p
    }

    pub fn to_cmatrix(&self, m: &[i64]) -> CMatrix {
        let n = self.size();
        CMatrix::from_fn(n, n, |i, j| Complex64::new(m[i * n + j] as f64, 0.0))
    }
}

/// Hankel data ready for factorisation.
#[derive(Debug, Clone)]
pub struct GlmSystem {
    pub data: GlmData,
    pub pair: RankOnePair,
    rates: Vec<Complex64>,
    hat_rates: Vec<Complex64>,
}

impl GlmSystem {
    pub fn n_dim(&self) -> usize {
        self.pair.n_dim()
    }

    pub fn m_dim(&self) -> usize {
        self.pair.m_dim()
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        let w = self.data.window as i64;
        -w..=w
    }

    fn scalar_f(&self, s: i64, t: f64) -> Jet {
        self.data.modes.iter().zip(&self.rates).fold(Jet::real(0.0), |acc, (m, &r)| {
            acc + Jet::exp_rate(r, t) * (m.amplitude * (-m.exponent * s as f64).exp())
        })
    }

    fn scalar_f_hat(&self, s: i64, t: f64) -> Jet {
        self.data.hat_modes.iter().zip(&self.hat_rates).fold(Jet::real(0.0), |acc, (m, &r)| {
            acc + Jet::exp_rate(r, t) * (m.amplitude * (-m.exponent * s as f64).exp())
        })
    }

    /// `f_s` as an `M×N` block.
    pub fn f(&self, s: i64) -> CMatrix {
        self.pair.b.scale(self.scalar_f(s, self.data.time).value)
    }

    /// `f̂_s` as an `N×M` block.
    pub fn f_hat(&self, s: i64) -> CMatrix {
        self.pair.b_hat.scale(self.scalar_f_hat(s, self.data.time).value)
    }

    /// Defect of the linear lattice equations for `f` and `f̂` at the given antidiagonals.
    pub fn linear_residual(&self, samples: &[i64]) -> f64 {
        let t = self.data.time;
        let w = self.data.weight;
        let alpha = self.data.alpha;
        let mut worst: f64 = 0.0;
        for &s in samples {
            let g = |k: i64| self.scalar_f(k, t).value;
            let gh = |k: i64| self.scalar_f_hat(k, t).value;
            let (rhs, rhs_hat) = match self.data.scheme {
                GlmScheme::ForwardBackward => {
                    let stencil = |h: &dyn Fn(i64) -> Complex64, dir: i64| -> Complex64 {
                        (0..=alpha)
                            .map(|k| {
                                let sign = if (alpha - k) % 2 == 0 { 1.0 } else { -1.0 };
                                h(s + dir * i64::from(k)) * (sign * int_binomial(alpha, k) as f64)
                            })
                            .sum()
                    };
                    (stencil(&g, -1) * w.powi(alpha as i32), stencil(&gh, 1))
                }
                GlmScheme::Symmetric => (
                    (g(s + 1) - g(s) * 2.0 + g(s - 1)) * w,
                    gh(s + 1) - gh(s) * 2.0 + gh(s - 1),
                ),
            };
            let scale = 1.0 + g(s).norm() + gh(s).norm();
            worst = worst
                .max((self.scalar_f(s, t).deriv - rhs).norm() / scale)
                .max((self.scalar_f_hat(s, t).deriv - rhs_hat).norm() / scale);
        }
        worst
    }
}

/// Attaches dispersion to the modes and checks the data stay finite on the window.
pub fn build_hankel_data(data: &GlmData, pair: &RankOnePair) -> Result<GlmSystem> {
    if data.window == 0 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    pair.validate()?;
    let zero = Complex64::new(0.0, 0.0);
    let rates = data
        .modes
        .iter()
        .map(|m| glm_dispersion(data.scheme, data.weight, data.alpha, m.exponent, zero).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    let hat_rates = data
        .hat_modes
        .iter()
        .map(|m| glm_dispersion(data.scheme, data.weight, data.alpha, zero, m.exponent).map(|r| r.1))
        .collect::<Result<Vec<_>>>()?;
    let sys = GlmSystem {
        data: data.clone(),
        pair: pair.clone(),
        rates,
        hat_rates,
    };
    let w = data.window as i64;
    for s in [-2 * w, 2 * w] {
        for v in [sys.scalar_f(s, data.time).value, sys.scalar_f_hat(s, data.time).value] {
            if !v.is_finite() || v.norm() > OVERFLOW_LIMIT {
                return Err(Error::ModeOverflow(format!("|f| = {:e} at antidiagonal {s}", v.norm())));
            }
        }
    }
    Ok(sys)
}

/// Blocks of `K⁺ = [[A, B], [C, D]]` and `K⁻`, stored as site-blocked dense matrices.
#[derive(Debug, Clone)]
pub struct GlmSolution {
    pub window: usize,
    pub n_dim: usize,
    pub m_dim: usize,
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
    /// `K⁻` in the layout `[[N-sites], [M-sites]]`, zero on and above the site diagonal.
    pub k_minus: CMatrix,
    /// `max |(I+K⁺)(I+F) - (I+K⁻)|`.
    pub residual_abs: f64,
    /// `residual_abs / (‖I+K⁺‖∞ ‖I+F‖∞)`.
    pub residual_rel: f64,
}

impl GlmSolution {
    fn slot(&self, i: i64) -> usize {
        (i + self.window as i64) as usize
    }

    pub fn b_block(&self, i: i64, j: i64) -> CMatrix {
        let (r, c) = (self.slot(i), self.slot(j));
        self.b.submatrix(r * self.n_dim, c * self.m_dim, self.n_dim, self.m_dim).expect("site in window")
    }

    pub fn c_block(&self, i: i64, j: i64) -> CMatrix {
        let (r, c) = (self.slot(i), self.slot(j));
        self.c.submatrix(r * self.m_dim, c * self.n_dim, self.m_dim, self.n_dim).expect("site in window")
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        let w = self.window as i64;
        -w..=w
    }

    /// Diagonal elements `(B_nn, C_nn)` as candidate lattice fields.
    pub fn local_fields(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        self.sites().map(|n| (self.b_block(n, n), self.c_block(n, n))).unzip()
    }
}

fn hankel(n_sites: usize, window: i64, block: impl Fn(i64) -> CMatrix, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n_sites * rows, n_sites * cols);
    for i in 0..n_sites {
        for j in 0..n_sites {
            let s = i as i64 + j as i64 - 2 * window;
            m.set_block(i * rows, j * cols, &block(s)).expect("block fits");
        }
    }
    m
}

fn tail_cols(m: &CMatrix, row: usize, rows: usize, col0: usize) -> CMatrix {
    m.submatrix(row, col0, rows, m.cols() - col0).expect("inside matrix")
}

fn trailing(m: &CMatrix, r0: usize, c0: usize) -> CMatrix {
    m.submatrix(r0, c0, m.rows() - r0, m.cols() - c0).expect("inside matrix")
}

/// Row-by-row solution of the upper-triangular factor.
pub fn solve_glm(system: &GlmSystem) -> Result<GlmSolution> {
    let (nd, md) = (system.n_dim(), system.m_dim());
    let window = system.data.window as i64;
    let n = 2 * system.data.window + 1;
    let f = hankel(n, window, |s| system.f(s), md, nd);
    let fh = hankel(n, window, |s| system.f_hat(s), nd, md);

    let rows: Vec<_> = (0..n)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let site = r as i64 - window;
            let singular = |e: Error| match e {
                Error::SingularMatrix { .. } => Error::SingularGlm { row: site },
                other => other,
            };
            let f_w = trailing(&f, r * md, r * nd);
            let fh_w = trailing(&fh, r * nd, r * md);
            let eye_m = CMatrix::identity(f_w.rows());
            let eye_n = CMatrix::identity(fh_w.rows());
            let op_b = &eye_m - &(&f_w * &fh_w);
            let op_c = &eye_n - &(&fh_w * &f_w);
            let rhs_b = -&tail_cols(&fh, r * nd, nd, r * md);
            let rhs_c = -&tail_cols(&f, r * md, md, r * nd);
            let solve = |op: &CMatrix, rhs: &CMatrix| -> Result<CMatrix> {
                let lu = LuFactor::with_tolerance(&op.transpose(), GLM_PIVOT_REL_TOL).map_err(singular)?;
                Ok(lu.solve(&rhs.transpose())?.transpose())
            };
            let b_row = solve(&op_b, &rhs_b)?;
            let c_row = solve(&op_c, &rhs_c)?;
            let a_row = -&(&b_row * &f_w);
            let d_row = -&(&c_row * &fh_w);
            Ok((a_row, b_row, c_row, d_row))
        })
        .collect::<Result<_>>()?;

    let mut a = CMatrix::zeros(n * nd, n * nd);
    let mut b = CMatrix::zeros(n * nd, n * md);
    let mut c = CMatrix::zeros(n * md, n * nd);
    let mut d = CMatrix::zeros(n * md, n * md);
    for (r, (ar, br, cr, dr)) in rows.iter().enumerate() {
        a.set_block(r * nd, r * nd, ar)?;
        b.set_block(r * nd, r * md, br)?;
        c.set_block(r * md, r * nd, cr)?;
        d.set_block(r * md, r * md, dr)?;
    }

    let k_plus = CMatrix::block2(&a, &b, &c, &d)?;
    let big_f = CMatrix::block2(&CMatrix::zeros(n * nd, n * nd), &fh, &f, &CMatrix::zeros(n * md, n * md))?;
    let eye = CMatrix::identity(k_plus.rows());
    let lhs_k = &eye + &k_plus;
    let lhs_f = &eye + &big_f;
    let product = &lhs_k * &lhs_f;
    let site_of = |idx: usize| if idx < n * nd { idx / nd } else { (idx - n * nd) / md };
    let mut k_minus = CMatrix::zeros(product.rows(), product.cols());
    let mut residual_abs: f64 = 0.0;
    for i in 0..product.rows() {
        for j in 0..product.cols() {
            let v = product[(i, j)] - eye[(i, j)];
            if site_of(j) >= site_of(i) {
                residual_abs = residual_abs.max(v.norm());
            } else {
                k_minus[(i, j)] = v;
            }
        }
    }
    let residual_rel = residual_abs / (lhs_k.norm_inf() * lhs_f.norm_inf());
    Ok(GlmSolution {
        window: system.data.window,
        n_dim: nd,
        m_dim: md,
        a,
        b,
        c,
        d,
        k_minus,
        residual_abs,
        residual_rel,
    })
}

/// Single-mode data `f = b e^{-λs+Λt} B`, `f̂ = b̂ e^{-λ̂s+Λ̂t} B̂`.
#[derive(Debug, Clone)]
pub struct GlmSolitonParams {
    pub lambda: Complex64,
    pub lambda_hat: Complex64,
    pub amplitude: Complex64,
    pub amplitude_hat: Complex64,
    pub scheme: GlmScheme,
    pub weight: Complex64,
    pub alpha: u32,
    pub pair: RankOnePair,
}

impl GlmSolitonParams {
    pub fn data(&self, window: usize, time: f64) -> GlmData {
        GlmData {
            scheme: self.scheme,
            weight: self.weight,
            alpha: self.alpha,
            window,
            time,
            modes: vec![GlmMode {
                amplitude: self.amplitude,
                exponent: self.lambda,
            }],
            hat_modes: vec![GlmMode {
                amplitude: self.amplitude_hat,
                exponent: self.lambda_hat,
            }],
        }
    }

    /// `κ b b̂`, the closure constant seen by the scalar factors.
    pub fn effective_kappa(&self) -> Complex64 {
        self.pair.kappa * self.amplitude * self.amplitude_hat
    }

    /// `h_k = e^{-2μk} e^{(Λ+Λ̂)t} / (e^{-μ} - 1)²` with `μ = λ + λ̂`.
    pub fn h(&self, k: i64, time: f64) -> Result<Complex64> {
        let mu = self.lambda + self.lambda_hat;
        let den = (-mu).exp() - 1.0;
        if den.norm() < 1e-14 {
            return Err(Error::DegenerateMode("lambda + lambda_hat = 0".into()));
        }
        let (rate, rate_hat) = glm_dispersion(self.scheme, self.weight, self.alpha, self.lambda, self.lambda_hat)?;
        Ok((-2.0 * mu * k as f64 + (rate + rate_hat) * time).exp() / (den * den))
    }

    /// Rows where the finite-window solve is expected to match the infinite-window formula.
    pub fn well_conditioned(&self, k: i64, window: usize, time: f64) -> Result<bool> {
        let kh = (self.effective_kappa() * self.h(k, time)?).norm();
        let mu = (self.lambda + self.lambda_hat).re;
        let tail = (-mu * (window as i64 + 1 - k) as f64).exp();
        Ok(kh <= 1e4 && tail * kh.min(1.0) < 1e-12)
    }
}

/// Closed-form `B_{kj}`, `C_{kj}` for `j ≥ k`, indexed `[k + N][j + N]` (zero below the diagonal).
pub fn one_soliton_closed_form(
    params: &GlmSolitonParams,
    window: usize,
    time: f64,
) -> Result<(Vec<Vec<CMatrix>>, Vec<Vec<CMatrix>>)> {
    params.pair.validate()?;
    let (rate, rate_hat) = glm_dispersion(params.scheme, params.weight, params.alpha, params.lambda, params.lambda_hat)?;
    let kappa = params.effective_kappa();
    let w = window as i64;
    let (nd, md) = (params.pair.n_dim(), params.pair.m_dim());
    let mut bs = Vec::new();
    let mut cs = Vec::new();
    for k in -w..=w {
        let den = 1.0 - kappa * params.h(k, time)?;
        if den.norm() < 1e-14 {
            return Err(Error::SingularGlm { row: k });
        }
        let (mut brow, mut crow) = (Vec::new(), Vec::new());
        for j in -w..=w {
            if j < k {
                brow.push(CMatrix::zeros(nd, md));
                crow.push(CMatrix::zeros(md, nd));
                continue;
            }
            let s = (k + j) as f64;
            let bh = -(-params.lambda_hat * s + rate_hat * time).exp() * params.amplitude_hat / den;
            let cb = -(-params.lambda * s + rate * time).exp() * params.amplitude / den;
            brow.push(params.pair.b_hat.scale(bh));
            crow.push(params.pair.b.scale(cb));
        }
        bs.push(brow);
        cs.push(crow);
    }
    Ok((bs, cs))
}

/// Largest relative deviation of the solved `B`, `C` rows from the closed form on well-conditioned rows.
pub fn closed_form_deviation(params: &GlmSolitonParams, sol: &GlmSolution, time: f64) -> Result<(f64, usize)> {
    let (bs, cs) = one_soliton_closed_form(params, sol.window, time)?;
    let w = sol.window as i64;
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for k in -w..=w {
        if !params.well_conditioned(k, sol.window, time)? {
            continue;
        }
        rows += 1;
        let r = (k + w) as usize;
        let (mut num, mut den): (f64, f64) = (0.0, 0.0);
        for j in k..=w {
            let c = (j + w) as usize;
            num = num
                .max((&sol.b_block(k, j) - &bs[r][c]).max_abs())
                .max((&sol.c_block(k, j) - &cs[r][c]).max_abs());
            den = den.max(bs[r][c].max_abs()).max(cs[r][c].max_abs());
        }
        worst = worst.max(num / den);
    }
    Ok((worst, rows))
}

/// Second-family soliton parameters reproducing the diagonal of a scalar GLM solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Type2Fit {
    pub c: Complex64,
    pub x1: Complex64,
    pub d1: Complex64,
    /// Fitted constant in `C_nn ≈ γ y_{n-1}`.
    pub y_scale: Complex64,
    /// Relative deviations over the compared rows.
    pub x_error: f64,
    pub y_error: f64,
    pub rows: usize,
}

fn least_squares_2(rows: &[(Complex64, Complex64, Complex64)]) -> Result<(Complex64, Complex64)> {
    // Gram-Schmidt QR for v ≈ α u + β w.
    let zero = Complex64::new(0.0, 0.0);
    let dot = |f: &dyn Fn(&(Complex64, Complex64, Complex64)) -> (Complex64, Complex64)| {
        rows.iter().map(|r| { let (p, q) = f(r); p.conj() * q }).fold(zero, |a, b| a + b)
    };
    let r11 = dot(&|r| (r.0, r.0)).re.sqrt();
    if r11 == 0.0 || !r11.is_finite() {
        return Err(Error::SingularMatrix { pivot: r11, threshold: 0.0 });
    }
    let r12 = dot(&|r| (r.0, r.1)) / r11;
    let resid: Vec<Complex64> = rows.iter().map(|r| r.1 - r.0 / r11 * r12).collect();
    let r22 = resid.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let w_norm = r12.norm().hypot(r22);
    if r22 <= 1e-14 * w_norm {
        return Err(Error::SingularMatrix { pivot: r22, threshold: 1e-14 * w_norm });
    }
    let qv1 = dot(&|r| (r.0, r.2)) / r11;
    let qv2 = rows.iter().zip(&resid).map(|(r, q)| q.conj() * r.2).fold(zero, |a, b| a + b) / r22;
    let beta = qv2 / r22;
    let alpha = (qv1 - r12 * beta) / r11;
    Ok((alpha, beta))
}

/// Fits `1/B_nn` by the two second-family modes with `η = e^{2λ}`, `ε = e^{-2λ̂}` at the solution time,
/// then rebuilds the soliton at `t = 0` with the fitted seeds and compares both fields.
pub fn fit_type2(params: &GlmSolitonParams, sol: &GlmSolution, time: f64) -> Result<Type2Fit> {
    use crate::darboux::{soliton_type2, SolitonParams};
    use crate::dnls::Flow;

    if sol.n_dim != 1 || sol.m_dim != 1 {
        return Err(Error::VariantUnavailable("fit needs scalar fields".into()));
    }
    let eta = (2.0 * params.lambda).exp();
    let eps = (-2.0 * params.lambda_hat).exp();
    if (eta + eps - 2.0).norm() > 1e-12 {
        return Err(Error::InvalidParameter("exponents must satisfy e^{2λ} + e^{-2λ̂} = 2".into()));
    }
    let c = eta - 1.0;
    let rows: Vec<i64> = sol
        .sites()
        .filter(|&k| params.well_conditioned(k, sol.window, time).unwrap_or(false) && k > -(sol.window as i64))
        .collect();
    if rows.len() < 3 {
        return Err(Error::InvalidParameter("too few well-conditioned rows".into()));
    }
    let b_nn = |n: i64| sol.b_block(n, n)[(0, 0)];
    let samples: Vec<_> = rows
        .iter()
        .map(|&n| {
            let v = 1.0 / b_nn(n);
            let wt = 1.0 / v.norm();
            (eps.powi(-(n as i32 - 1)) * wt, eta.powi(-(n as i32 - 1)) * wt, v * wt)
        })
        .collect();
    let (alpha, beta) = least_squares_2(&samples)?;
    let x1 = 1.0 / (alpha + beta);
    let xb = eps / eta;
    let kappa = Complex64::new(1.0, 0.0);
    let kb = kappa / eta;
    let dh1 = -alpha * (xb - 1.0) * x1 / kb;
    let d1 = kappa * dh1 - c;
    let pair = RankOnePair::from_unitary(&CMatrix::identity(1), kappa)?;
    let sp = SolitonParams::type2(c, kappa, x1, d1, Flow::T1);
    let first = *rows.first().expect("nonempty");
    let last = *rows.last().expect("nonempty");
    let soliton = soliton_type2(&sp, &pair, first, (last - first + 1) as usize, 1, 0.0)?;
    let (mut dx, mut bx): (f64, f64) = (0.0, 0.0);
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for &n in &rows {
        dx = dx.max((b_nn(n) - soliton.field.x_at(n).value).norm());
        bx = bx.max(b_nn(n).norm());
        let y = soliton.field.y_at(n - 1).value;
        num += y.conj() * sol.c_block(n, n)[(0, 0)];
        den += y.norm_sqr();
    }
    let gamma = num / den;
    let (mut dy, mut by): (f64, f64) = (0.0, 0.0);
    for &n in &rows {
        let cn = sol.c_block(n, n)[(0, 0)];
        dy = dy.max((cn - gamma * soliton.field.y_at(n - 1).value).norm());
        by = by.max(cn.norm());
    }
    Ok(Type2Fit {
        c,
        x1,
        d1,
        y_scale: gamma,
        x_error: dx / bx,
        y_error: dy / by,
        rows: rows.len(),
    })
}
