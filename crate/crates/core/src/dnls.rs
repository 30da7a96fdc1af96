//! Matrix DNLS hierarchy on a periodic lattice.
//!
//! The Lax operator is `L_n(λ) = [[λI + N_n, X_n], [Y_n, I]]` with
//! `N_n = θI + X_n Y_n`. Site indices wrap modulo the lattice size.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{sigma, upper_projector, CMatrix, SpectralMatrixPoly};
use crate::error::{Error, Result};
use crate::integrate::{integrate, BlockFields, FieldRates, Trajectory};

/// Tolerance on the dressing constraints before the recursion is trusted.
pub const DRESSING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Flow {
    T1,
    T2,
    T3,
}

impl Flow {
    pub fn from_alpha(alpha: u32) -> Result<Self> {
        match alpha {
            1 => Ok(Flow::T1),
            2 => Ok(Flow::T2),
            3 => Ok(Flow::T3),
            other => Err(Error::FlowUnsupported(other)),
        }
    }

    pub fn alpha(self) -> u32 {
        match self {
            Flow::T1 => 1,
            Flow::T2 => 2,
            Flow::T3 => 3,
        }
    }
}

impl TryFrom<u32> for Flow {
    type Error = Error;
    fn try_from(a: u32) -> Result<Self> {
        Flow::from_alpha(a)
    }
}

impl From<Flow> for u32 {
    fn from(f: Flow) -> u32 {
        f.alpha()
    }
}

pub(crate) fn wrap(i: i64, n: usize) -> usize {
    i.rem_euclid(n as i64) as usize
}

#[derive(Debug, Clone)]
pub struct DnlsState {
    n_dim: usize,
    m_dim: usize,
    pub theta: Complex64,
    pub x: Vec<CMatrix>,
    pub y: Vec<CMatrix>,
}

impl DnlsState {
    pub fn new(theta: Complex64, x: Vec<CMatrix>, y: Vec<CMatrix>) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::Dimension(format!("{} x blocks and {} y blocks", x.len(), y.len())));
        }
        let (n_dim, m_dim) = x[0].shape();
        if x.iter().any(|b| b.shape() != (n_dim, m_dim)) || y.iter().any(|b| b.shape() != (m_dim, n_dim)) {
            return Err(Error::Dimension("field blocks must be NxM and MxN throughout".into()));
        }
        Ok(Self { n_dim, m_dim, theta, x, y })
    }

    pub fn zeros(n_sites: usize, n_dim: usize, m_dim: usize) -> Self {
        Self {
            n_dim,
            m_dim,
            theta: Complex64::new(1.0, 0.0),
            x: vec![CMatrix::zeros(n_dim, m_dim); n_sites],
            y: vec![CMatrix::zeros(m_dim, n_dim); n_sites],
        }
    }

    /// Entries uniform in the square `[-scale, scale]²`.
    pub fn random<R: Rng>(rng: &mut R, n_sites: usize, n_dim: usize, m_dim: usize, scale: f64) -> Self {
        let mut draw = |r, c| {
            CMatrix::from_fn(r, c, |_, _| {
                Complex64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
            })
        };
        let x = (0..n_sites).map(|_| draw(n_dim, m_dim)).collect();
        let y = (0..n_sites).map(|_| draw(m_dim, n_dim)).collect();
        Self {
            n_dim,
            m_dim,
            theta: Complex64::new(1.0, 0.0),
            x,
            y,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.x.len()
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn m_dim(&self) -> usize {
        self.m_dim
    }

    pub fn xs(&self, site: i64) -> &CMatrix {
        &self.x[wrap(site, self.n_sites())]
    }

    pub fn ys(&self, site: i64) -> &CMatrix {
        &self.y[wrap(site, self.n_sites())]
    }

    /// `N_n = θI + X_n Y_n`.
    pub fn big_n(&self, site: i64) -> CMatrix {
        let mut m = self.xs(site) * self.ys(site);
        for i in 0..self.n_dim {
            m[(i, i)] += self.theta;
        }
        m
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site < self.n_sites() {
            Ok(())
        } else {
            Err(Error::Dimension(format!("site {site} outside 0..{}", self.n_sites())))
        }
    }
}

impl BlockFields for DnlsState {
    fn upper(&self) -> &[CMatrix] {
        &self.x
    }
    fn lower(&self) -> &[CMatrix] {
        &self.y
    }
    fn upper_mut(&mut self) -> &mut [CMatrix] {
        &mut self.x
    }
    fn lower_mut(&mut self) -> &mut [CMatrix] {
        &mut self.y
    }
}

fn blocks(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> CMatrix {
    CMatrix::block2(&a, &b, &c, &d).expect("block shapes fixed by the state")
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// λ-independent part of the Lax operator.
fn lax_constant(state: &DnlsState, n: i64) -> CMatrix {
    blocks(
        state.big_n(n),
        state.xs(n).clone(),
        state.ys(n).clone(),
        CMatrix::identity(state.m_dim),
    )
}

pub fn lax(state: &DnlsState, site: usize, lambda: Complex64) -> Result<CMatrix> {
    state.check_site(site)?;
    let mut l = lax_constant(state, site as i64);
    for i in 0..state.n_dim {
        l[(i, i)] += lambda;
    }
    Ok(l)
}

pub fn lax_poly(state: &DnlsState, site: usize) -> Result<SpectralMatrixPoly> {
    state.check_site(site)?;
    SpectralMatrixPoly::new(
        0,
        vec![
            lax_constant(state, site as i64),
            upper_projector(state.n_dim, state.m_dim),
        ],
    )
}

/// Coefficients of `V^(2)` without the `λ²Σ/2` term: `(λ^0, λ^1)`.
fn v2_lower(s: &DnlsState, n: i64) -> (CMatrix, CMatrix) {
    let (nn, mm) = (s.n_dim, s.m_dim);
    let xy = s.xs(n) * s.ys(n - 1);
    let c0 = blocks(
        -&xy,
        s.xs(n + 1) - &(&s.big_n(n) * s.xs(n)),
        s.ys(n - 2) - &(s.ys(n - 1) * &s.big_n(n - 1)),
        s.ys(n - 1) * s.xs(n),
    );
    let c1 = blocks(
        CMatrix::zeros(nn, nn),
        s.xs(n).clone(),
        s.ys(n - 1).clone(),
        CMatrix::zeros(mm, mm),
    );
    (c0, c1)
}

/// Constant term added to `λV^(2)` in the third flow.
pub fn w3_constant(s: &DnlsState, n: i64) -> CMatrix {
    let big_n = |k| s.big_n(k);
    let (x, y) = (|k| s.xs(k), |k| s.ys(k));
    let e11 = &(&(&(x(n) * y(n - 1)) * &big_n(n - 1)) + &(&(&big_n(n) * x(n)) * y(n - 1)))
        - &(&(x(n) * y(n - 2)) + &(x(n + 1) * y(n - 1)));
    let nn0 = big_n(n);
    let e12 = &(&(&(x(n + 2) - &(&(x(n) * y(n - 1)) * x(n))) - &(&big_n(n + 1) * x(n + 1)))
        - &(&(&(x(n + 1) * y(n)) * x(n)) + &(&nn0 * x(n + 1))))
        + &(&(&nn0 * &nn0) * x(n));
    let nm1 = big_n(n - 1);
    let e21 = &(&(&(y(n - 3) - &(y(n - 2) * &big_n(n - 2))) - &(y(n - 2) * &nm1))
        - &(&(&(y(n - 1) * x(n - 1)) * y(n - 2)) - &(&(y(n - 1) * &nm1) * &nm1)))
        - &(&(y(n - 1) * x(n)) * y(n - 1));
    let e22 = &(&(&(y(n - 2) * x(n)) - &(&(y(n - 1) * &nm1) * x(n))) + &(y(n - 1) * x(n + 1)))
        - &(&(y(n - 1) * &nn0) * x(n));
    blocks(e11, e12, e21, e22)
}

pub fn v_operator_poly(state: &DnlsState, site: usize, flow: Flow) -> Result<SpectralMatrixPoly> {
    state.check_site(site)?;
    let n = site as i64;
    let (nn, mm) = (state.n_dim, state.m_dim);
    let half_sigma = sigma(nn, mm).scale_re(0.5);
    let coeffs = match flow {
        Flow::T1 => vec![
            blocks(
                CMatrix::zeros(nn, nn),
                state.xs(n).clone(),
                state.ys(n - 1).clone(),
                CMatrix::zeros(mm, mm),
            ),
            half_sigma,
        ],
        Flow::T2 => {
            let (c0, c1) = v2_lower(state, n);
            vec![c0, c1, half_sigma]
        }
        Flow::T3 => {
            let (c0, c1) = v2_lower(state, n);
            vec![w3_constant(state, n), c0, c1, half_sigma]
        }
    };
    SpectralMatrixPoly::new(0, coeffs)
}

pub fn v_operator(state: &DnlsState, site: usize, flow: Flow, lambda: Complex64) -> Result<CMatrix> {
    v_operator_poly(state, site, flow)?.eval(lambda)
}

/// Right-hand sides of the t1 and t2 equations of motion.
///
/// For `θ ≠ 1` the linear terms of the t1 flow carry `θ`; at `θ = 1` this is
/// the standard form.
pub fn eom_rhs(state: &DnlsState, flow: Flow) -> Result<FieldRates> {
    let n_sites = state.n_sites() as i64;
    let (x, y) = (|k| state.xs(k), |k| state.ys(k));
    let th = state.theta;
    let mut upper = Vec::with_capacity(n_sites as usize);
    let mut lower = Vec::with_capacity(n_sites as usize);
    match flow {
        Flow::T1 => {
            for n in 0..n_sites {
                let xyx = &(x(n) * y(n)) * x(n);
                let yxy = &(y(n) * x(n)) * y(n);
                upper.push(&(x(n + 1) - &x(n).scale(th)) - &xyx);
                lower.push(&(&y(n).scale(th) - y(n - 1)) + &yxy);
            }
        }
        Flow::T2 => {
            for n in 0..n_sites {
                let nn0 = state.big_n(n);
                let dx = &(&(&(x(n + 2) - &(&(x(n + 1) * y(n)) * x(n)))
                    - &(&(&nn0 + &state.big_n(n + 1)) * x(n + 1)))
                    + &(&(&nn0 * &nn0) * x(n)))
                    - &(&(x(n) * y(n - 1)) * x(n));
                let dy = &(&(&(&(&(y(n) * x(n)) * y(n - 1)) + &(y(n - 1) * &(&nn0 + &state.big_n(n - 1))))
                    - &(&(y(n) * &nn0) * &nn0))
                    + &(&(y(n) * x(n + 1)) * y(n)))
                    - y(n - 2);
                upper.push(dx);
                lower.push(dy);
            }
        }
        Flow::T3 => return Err(Error::FlowUnsupported(3)),
    }
    Ok(FieldRates { upper, lower })
}

/// `∂ₜL_n` given field rates, by the chain rule through `N_n`.
pub fn lax_rate(state: &DnlsState, rates: &FieldRates, site: usize) -> CMatrix {
    let n = site as i64;
    let dn = &(&rates.upper[site] * state.ys(n)) + &(state.xs(n) * &rates.lower[site]);
    blocks(
        dn,
        rates.upper[site].clone(),
        rates.lower[site].clone(),
        CMatrix::zeros(state.m_dim, state.m_dim),
    )
}

/// `max_n ‖∂ₜL_n − (V_{n+1}L_n − L_nV_n)‖` per spectral sample.
pub fn zero_curvature_residual(state: &DnlsState, flow: Flow, lambdas: &[Complex64]) -> Result<Vec<f64>> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("no spectral samples".into()));
    }
    let rates = eom_rhs(state, flow)?;
    let n_sites = state.n_sites();
    let vpolys = (0..n_sites)
        .map(|k| v_operator_poly(state, k, flow))
        .collect::<Result<Vec<_>>>()?;
    lambdas
        .iter()
        .map(|&lam| {
            let vs = vpolys.iter().map(|p| p.eval(lam)).collect::<Result<Vec<_>>>()?;
            let mut worst: f64 = 0.0;
            for site in 0..n_sites {
                let l = lax(state, site, lam)?;
                let rhs = &(&vs[(site + 1) % n_sites] * &l) - &(&l * &vs[site]);
                worst = worst.max((&lax_rate(state, &rates, site) - &rhs).max_abs());
            }
            Ok(worst)
        })
        .collect()
}

/// Largest deviation between supplied time derivatives and the equations of motion.
pub fn eom_defect(state: &DnlsState, rates: &FieldRates, flow: Flow) -> Result<f64> {
    Ok(eom_rhs(state, flow)?.max_abs_diff(rates))
}

pub fn evolve(state: &DnlsState, flow: Flow, dt: f64, steps: usize, sample_every: usize) -> Result<Trajectory<DnlsState>> {
    if flow == Flow::T3 {
        return Err(Error::FlowUnsupported(3));
    }
    integrate(state, dt, steps, sample_every, |s| eom_rhs(s, flow))
}

/// Diagonal blocks `A_n`, `D_n` of the dressing matrix `K_n = [[A_n, -X_n], [Y_{n-1}, D_n]]`.
#[derive(Debug, Clone)]
pub struct DressingData {
    pub a: Vec<CMatrix>,
    pub d: Vec<CMatrix>,
}

impl DressingData {
    pub fn k_matrix(&self, state: &DnlsState, site: usize) -> CMatrix {
        let n = site as i64;
        blocks(
            self.a[site].clone(),
            -state.xs(n),
            state.ys(n - 1).clone(),
            self.d[site].clone(),
        )
    }

    /// Largest defect of the difference constraints tying `K` to the fields.
    pub fn constraint_residual(&self, state: &DnlsState) -> Result<f64> {
        let n_sites = state.n_sites();
        if self.a.len() != n_sites || self.d.len() != n_sites {
            return Err(Error::Dimension("dressing data length differs from the lattice".into()));
        }
        let mut worst: f64 = 0.0;
        for k in 0..n_sites {
            let n = k as i64;
            let next = (k + 1) % n_sites;
            let (x, y) = (state.xs(n), state.ys(n));
            let r1 = &(&self.a[next] - &self.a[k]) - &(x * y);
            let r2 = &(&self.d[next] - &self.d[k]) + &(y * x);
            let r3 = &(y - state.ys(n - 1)) - &(y * &self.a[k]);
            let r4 = &(&(x - state.xs(n + 1)) + &(&(x * y) * x)) - &(x * &self.d[k]);
            for r in [r1, r2, r3, r4] {
                worst = worst.max(r.max_abs());
            }
        }
        Ok(worst)
    }
}

/// Builds `V^(α)` at every site from the dressing recursion
/// `w_{α-1} = [K, Σ]/2`, `w_{k-1} = -w_k K`.
pub fn dressed_v_from_recursion(
    state: &DnlsState,
    dressing: &DressingData,
    alpha: u32,
) -> Result<Vec<SpectralMatrixPoly>> {
    let flow = Flow::from_alpha(alpha)?;
    let residual = dressing.constraint_residual(state)?;
    if residual > DRESSING_TOL {
        return Err(Error::InconsistentDressing { residual });
    }
    let sig = sigma(state.n_dim, state.m_dim);
    let alpha = flow.alpha() as usize;
    (0..state.n_sites())
        .map(|site| {
            let k = dressing.k_matrix(state, site);
            let mut w = vec![CMatrix::zeros(k.rows(), k.rows()); alpha];
            w[alpha - 1] = k.commutator(&sig)?.scale_re(0.5);
            for j in (1..alpha).rev() {
                w[j - 1] = -&(&w[j] * &k);
            }
            w.push(sig.scale(c(0.5)));
            SpectralMatrixPoly::new(0, w)
        })
        .collect()
}
