//! Matrix Ablowitz–Ladik lattice: Lax pair, the two second-order flows and
//! Darboux constructions of one-solitons.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{CMatrix, RankOnePair, SpectralMatrixPoly};
use crate::conserved::LaxChain;
use crate::darboux::{LinearScheme, LinearSolution, POLE_TOL};
use crate::dnls::wrap;
use crate::error::{Error, Result};
use crate::integrate::{integrate, BlockFields, FieldRates, Trajectory};
use crate::jet::Jet;

const CONSTRAINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlBoundary {
    Periodic,
    /// Fields outside the window are zero.
    Vanishing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlVariant {
    /// Generalised AL flow generated by `V(2) - V(0)`.
    Al,
    /// The network equations.
    Network,
}

#[derive(Debug, Clone)]
pub struct AlState {
    n_dim: usize,
    m_dim: usize,
    pub b_hat: Vec<CMatrix>,
    pub b: Vec<CMatrix>,
    pub boundary: AlBoundary,
}

impl AlState {
    pub fn new(b_hat: Vec<CMatrix>, b: Vec<CMatrix>, boundary: AlBoundary) -> Result<Self> {
        if b_hat.is_empty() || b_hat.len() != b.len() {
            return Err(Error::Dimension(format!("{} upper and {} lower blocks", b_hat.len(), b.len())));
        }
        let (n_dim, m_dim) = b_hat[0].shape();
        if b_hat.iter().any(|m| m.shape() != (n_dim, m_dim)) || b.iter().any(|m| m.shape() != (m_dim, n_dim)) {
            return Err(Error::Dimension("field blocks must be NxM and MxN throughout".into()));
        }
        Ok(Self {
            n_dim,
            m_dim,
            b_hat,
            b,
            boundary,
        })
    }

    pub fn zeros(n_sites: usize, n_dim: usize, m_dim: usize, boundary: AlBoundary) -> Self {
        Self {
            n_dim,
            m_dim,
            b_hat: vec![CMatrix::zeros(n_dim, m_dim); n_sites],
            b: vec![CMatrix::zeros(m_dim, n_dim); n_sites],
            boundary,
        }
    }

    /// Entries uniform in the square `[-scale, scale]²`.
    pub fn random<R: Rng>(rng: &mut R, n_sites: usize, n_dim: usize, m_dim: usize, scale: f64) -> Self {
        let mut draw = |r, c| {
            CMatrix::from_fn(r, c, |_, _| {
                Complex64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
            })
        };
        let b_hat = (0..n_sites).map(|_| draw(n_dim, m_dim)).collect();
        let b = (0..n_sites).map(|_| draw(m_dim, n_dim)).collect();
        Self {
            n_dim,
            m_dim,
            b_hat,
            b,
            boundary: AlBoundary::Periodic,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.b_hat.len()
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn m_dim(&self) -> usize {
        self.m_dim
    }

    fn index(&self, site: i64) -> Option<usize> {
        let n = self.n_sites();
        match self.boundary {
            AlBoundary::Periodic => Some(wrap(site, n)),
            AlBoundary::Vanishing => (0..n as i64).contains(&site).then_some(site as usize),
        }
    }

    pub fn bh(&self, site: i64) -> CMatrix {
        self.index(site)
            .map_or_else(|| CMatrix::zeros(self.n_dim, self.m_dim), |i| self.b_hat[i].clone())
    }

    pub fn bl(&self, site: i64) -> CMatrix {
        self.index(site)
            .map_or_else(|| CMatrix::zeros(self.m_dim, self.n_dim), |i| self.b[i].clone())
    }

    /// Largest field magnitude on the first and last site.
    pub fn edge_magnitude(&self) -> f64 {
        let last = self.n_sites() - 1;
        [0, last]
            .iter()
            .map(|&i| self.b_hat[i].max_abs().max(self.b[i].max_abs()))
            .fold(0.0, f64::max)
    }
}

impl BlockFields for AlState {
    fn upper(&self) -> &[CMatrix] {
        &self.b_hat
    }
    fn lower(&self) -> &[CMatrix] {
        &self.b
    }
    fn upper_mut(&mut self) -> &mut [CMatrix] {
        &mut self.b_hat
    }
    fn lower_mut(&mut self) -> &mut [CMatrix] {
        &mut self.b
    }
}

fn blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    CMatrix::block2(a, b, c, d).expect("block shapes fixed by the state")
}

fn check_z(z: Complex64) -> Result<()> {
    if z.norm() == 0.0 {
        Err(Error::SpectralPole)
    } else {
        Ok(())
    }
}

fn check_site(state: &AlState, site: usize) -> Result<()> {
    if site < state.n_sites() {
        Ok(())
    } else {
        Err(Error::Dimension(format!("site {site} outside 0..{}", state.n_sites())))
    }
}

/// `L_n(z) = [[zI, b̂_n], [b_n, z⁻¹I]]`.
pub fn al_lax(state: &AlState, site: usize, z: Complex64) -> Result<CMatrix> {
    check_z(z)?;
    check_site(state, site)?;
    let n = site as i64;
    Ok(blocks(
        &CMatrix::scalar_identity(state.n_dim, z),
        &state.bh(n),
        &state.bl(n),
        &CMatrix::scalar_identity(state.m_dim, z.inv()),
    ))
}

/// The Lax operator as a Laurent polynomial in `z`.
pub fn al_lax_poly(state: &AlState, site: usize) -> Result<SpectralMatrixPoly> {
    check_site(state, site)?;
    let (nd, md) = (state.n_dim, state.m_dim);
    let n = site as i64;
    let zn = CMatrix::zeros(nd, nd);
    let zm = CMatrix::zeros(md, md);
    SpectralMatrixPoly::new(
        -1,
        vec![
            blocks(&zn, &CMatrix::zeros(nd, md), &CMatrix::zeros(md, nd), &CMatrix::identity(md)),
            blocks(&zn, &state.bh(n), &state.bl(n), &zm),
            blocks(&CMatrix::identity(nd), &CMatrix::zeros(nd, md), &CMatrix::zeros(md, nd), &zm),
        ],
    )
}

impl LaxChain for AlState {
    fn n_sites(&self) -> usize {
        AlState::n_sites(self)
    }
    fn site_lax_poly(&self, site: usize) -> Result<SpectralMatrixPoly> {
        al_lax_poly(self, site)
    }
    fn site_lax(&self, site: usize, s: Complex64) -> Result<CMatrix> {
        al_lax(self, site, s)
    }
}

/// Time component of the Lax pair for the chosen flow.
pub fn al_v_operator(state: &AlState, site: i64, variant: AlVariant, z: Complex64) -> Result<CMatrix> {
    check_z(z)?;
    let (nd, md) = (state.n_dim, state.m_dim);
    let zi = z.inv();
    let (bh, bh_prev) = (state.bh(site), state.bh(site - 1));
    let (b, b_prev) = (state.bl(site), state.bl(site - 1));
    let top = &CMatrix::scalar_identity(nd, z * z) - &(&bh * &b_prev);
    let bottom = &(&b * &bh_prev) - &CMatrix::scalar_identity(md, zi * zi);
    Ok(match variant {
        AlVariant::Al => blocks(
            &(&top - &CMatrix::identity(nd)),
            &(&bh.scale(z) - &bh_prev.scale(zi)),
            &(&b_prev.scale(z) - &b.scale(zi)),
            &(&bottom + &CMatrix::identity(md)),
        ),
        AlVariant::Network => blocks(
            &top,
            &(&bh.scale(z) + &bh_prev.scale(zi)),
            &(&b_prev.scale(z) + &b.scale(zi)),
            &-&bottom,
        ),
    })
}

/// Right-hand sides of the flow at every site.
pub fn al_eom_rhs(state: &AlState, variant: AlVariant) -> FieldRates {
    let (upper, lower) = (0..state.n_sites() as i64)
        .map(|n| {
            let (h0, hp, hm) = (state.bh(n), state.bh(n + 1), state.bh(n - 1));
            let (b0, bp, bm) = (state.bl(n), state.bl(n + 1), state.bl(n - 1));
            let hbh_prev = &(&h0 * &b0) * &hm;
            let hbh_next = &(&hp * &b0) * &h0;
            let bhb_next = &(&bp * &h0) * &b0;
            let bhb_prev = &(&b0 * &h0) * &bm;
            match variant {
                AlVariant::Al => (
                    &(&(&(&hp + &hm) - &h0.scale_re(2.0)) - &hbh_prev) - &hbh_next,
                    &(&(&(&b0.scale_re(2.0) - &bp) - &bm) + &bhb_next) + &bhb_prev,
                ),
                AlVariant::Network => (
                    &(&(&hp - &hm) + &hbh_prev) - &hbh_next,
                    &(&(&bp - &bm) - &bhb_next) + &bhb_prev,
                ),
            }
        })
        .unzip();
    FieldRates { upper, lower }
}

/// `max_n ‖∂L_n - (V_{n+1}L_n - L_nV_n)‖` over the samples.
pub fn al_zero_curvature_residual(state: &AlState, variant: AlVariant, zs: &[Complex64]) -> Result<f64> {
    let rates = al_eom_rhs(state, variant);
    let (nd, md) = (state.n_dim, state.m_dim);
    let mut worst: f64 = 0.0;
    for &z in zs {
        for site in 0..state.n_sites() {
            let n = site as i64;
            let l = al_lax(state, site, z)?;
            let dl = blocks(
                &CMatrix::zeros(nd, nd),
                &rates.upper[site],
                &rates.lower[site],
                &CMatrix::zeros(md, md),
            );
            let flow = &(&al_v_operator(state, n + 1, variant, z)? * &l) - &(&l * &al_v_operator(state, n, variant, z)?);
            worst = worst.max((&dl - &flow).max_abs());
        }
    }
    Ok(worst)
}

pub fn al_evolve(
    state: &AlState,
    variant: AlVariant,
    dt: f64,
    steps: usize,
    sample_every: usize,
) -> Result<Trajectory<AlState>> {
    integrate(state, dt, steps, sample_every, |s| Ok(al_eom_rhs(s, variant)))
}

/// Largest defect of the analytic rates against the flow, on window sites.
pub fn al_eom_defect(state: &AlState, rates: &FieldRates, variant: AlVariant) -> f64 {
    al_eom_rhs(state, variant).max_abs_diff(rates)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlSeeds {
    pub a1: Complex64,
    pub d1: Complex64,
    pub b_hat1: Complex64,
    pub b1: Complex64,
}

#[derive(Debug, Clone)]
pub struct AlDarbouxParams {
    /// `Q = e^Θ`.
    pub big_q: Complex64,
    pub kappa: Complex64,
    pub zeta: Complex64,
    pub seeds: AlSeeds,
    pub pair: RankOnePair,
}

impl AlDarbouxParams {
    fn check(&self) -> Result<()> {
        if self.big_q.norm() == 0.0 {
            return Err(Error::InvalidParameter("Q must be nonzero".into()));
        }
        self.pair.validate()
    }
}

/// Fundamental-Darboux one-soliton with its scalar dressing coefficients.
#[derive(Debug, Clone)]
pub struct AlSoliton {
    pub state: AlState,
    /// `a_n`, `d_n` with `A_n = I + a_n B̂B`, `D_n = I + d_n BB̂`, for sites `1..=N+1`.
    pub a: Vec<Complex64>,
    pub d: Vec<Complex64>,
    /// Scalar profiles `b̂_n`, `b_n` for sites `1..=N+1`.
    pub b_hat: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub big_q: Complex64,
    pub pair: RankOnePair,
}

/// Site-recursive one-soliton on sites `1..=N`, with `b̂_n B̂` and `b_n B` as fields.
pub fn al_soliton_fundamental(params: &AlDarbouxParams, n_sites: usize) -> Result<AlSoliton> {
    params.check()?;
    if n_sites == 0 {
        return Err(Error::Dimension("empty lattice".into()));
    }
    let k = params.pair.kappa;
    let q2 = params.big_q * params.big_q;
    let s = params.seeds;
    let (mut a, mut d, mut bh, mut b) = (vec![s.a1], vec![s.d1], vec![s.b_hat1], vec![s.b1]);
    for i in 0..n_sites {
        let site = i as i64 + 2;
        let a_next = a[i] - bh[i] * b[i] * (1.0 + k * a[i]);
        let d_next = d[i] - b[i] * bh[i] * (1.0 + k * d[i]);
        let (fa, fd) = (1.0 + k * a_next, 1.0 + k * d_next);
        if fa.norm() < POLE_TOL || fd.norm() < POLE_TOL {
            return Err(Error::SingularDressing { site });
        }
        a.push(a_next);
        d.push(d_next);
        bh.push(bh[i] / (q2 * fd));
        b.push(q2 * b[i] / fa);
    }
    let pair = &params.pair;
    let state = AlState::new(
        bh[..n_sites].iter().map(|&v| pair.b_hat.scale(v)).collect(),
        b[..n_sites].iter().map(|&v| pair.b.scale(v)).collect(),
        AlBoundary::Vanishing,
    )?;
    Ok(AlSoliton {
        state,
        a,
        d,
        b_hat: bh,
        b,
        big_q: params.big_q,
        pair: pair.clone(),
    })
}

impl AlSoliton {
    fn check_site(&self, site: i64) -> Result<usize> {
        let last = self.a.len() as i64;
        if (2..=last).contains(&site) {
            Ok(site as usize - 1)
        } else {
            Err(Error::Dimension(format!("site {site} outside 2..={last}")))
        }
    }

    /// `M_n(z) = [[QzI - A_n/(Qz), -b̂_{n-1}B̂/Q], [Qb_{n-1}B, QzD_n - I/(Qz)]]`.
    pub fn darboux_matrix(&self, site: i64, z: Complex64) -> Result<CMatrix> {
        check_z(z)?;
        let i = self.check_site(site)?;
        let pair = &self.pair;
        let q = self.big_q;
        let (nd, md) = (pair.n_dim(), pair.m_dim());
        let big_a = &CMatrix::identity(nd) + &pair.upper_product().scale(self.a[i]);
        let big_d = &CMatrix::identity(md) + &pair.lower_product().scale(self.d[i]);
        let qz = q * z;
        Ok(blocks(
            &(&CMatrix::scalar_identity(nd, qz) - &big_a.scale(qz.inv())),
            &pair.b_hat.scale(-self.b_hat[i - 1] / q),
            &pair.b.scale(q * self.b[i - 1]),
            &(&big_d.scale(qz) - &CMatrix::scalar_identity(md, qz.inv())),
        ))
    }

    /// `max ‖M_{n+1}(z) L̂(z) - L_n(z) M_n(z)‖` over interior sites `2..=N`.
    pub fn darboux_residual(&self, zs: &[Complex64]) -> Result<f64> {
        let pair = &self.pair;
        let (nd, md) = (pair.n_dim(), pair.m_dim());
        let mut worst: f64 = 0.0;
        for &z in zs {
            check_z(z)?;
            let bare = blocks(
                &CMatrix::scalar_identity(nd, z),
                &CMatrix::zeros(nd, md),
                &CMatrix::zeros(md, nd),
                &CMatrix::scalar_identity(md, z.inv()),
            );
            for n in 2..self.a.len() as i64 {
                let i = n as usize - 1;
                let lax = blocks(
                    &CMatrix::scalar_identity(nd, z),
                    &pair.b_hat.scale(self.b_hat[i]),
                    &pair.b.scale(self.b[i]),
                    &CMatrix::scalar_identity(md, z.inv()),
                );
                let lhs = &self.darboux_matrix(n + 1, z)? * &bare;
                let rhs = &lax * &self.darboux_matrix(n, z)?;
                worst = worst.max((&lhs - &rhs).max_abs());
            }
        }
        Ok(worst)
    }
}

/// Deformed-oscillator one-soliton stored over the window plus a halo.
#[derive(Debug, Clone)]
pub struct AlOscillatorSolution {
    pub pair: RankOnePair,
    pub first_site: i64,
    pub n_sites: usize,
    pub halo: usize,
    /// Scalar profiles; fields are `b̂_n B̂` and `b_n B`.
    pub b_hat: Vec<Jet>,
    pub b: Vec<Jet>,
}

impl AlOscillatorSolution {
    fn assemble(&self, range: std::ops::Range<usize>, deriv: bool) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let pick = |j: &Jet| if deriv { j.deriv } else { j.value };
        let up = range.clone().map(|i| self.pair.b_hat.scale(pick(&self.b_hat[i]))).collect();
        let low = range.map(|i| self.pair.b.scale(pick(&self.b[i]))).collect();
        (up, low)
    }

    fn window(&self) -> std::ops::Range<usize> {
        self.halo..self.halo + self.n_sites
    }

    /// Window fields with vanishing exterior.
    pub fn state(&self) -> AlState {
        let (up, low) = self.assemble(self.window(), false);
        AlState::new(up, low, AlBoundary::Vanishing).expect("pair fixes block shapes")
    }

    pub fn rates(&self) -> FieldRates {
        let (upper, lower) = self.assemble(self.window(), true);
        FieldRates { upper, lower }
    }

    /// Flow defect on the window using halo neighbours.
    pub fn eom_defect(&self, variant: AlVariant) -> Result<f64> {
        if self.halo < 1 {
            return Err(Error::InvalidParameter("equation check needs one halo site".into()));
        }
        let all = 0..self.b_hat.len();
        let (up, low) = self.assemble(all.clone(), false);
        let ext = AlState::new(up, low, AlBoundary::Vanishing)?;
        let (upper, lower) = self.assemble(all, true);
        let rhs = al_eom_rhs(&ext, variant);
        Ok(self
            .window()
            .map(|i| (&rhs.upper[i] - &upper[i]).max_abs().max((&rhs.lower[i] - &lower[i]).max_abs()))
            .fold(0.0, f64::max))
    }
}

/// Solves the oscillator-type dressing equations for heat data `p_n`.
///
/// With `ρ = ζ/Q²` and `s_n = Σ ζc ξ^{n-1}e^{Λt}/(1 - ρ/ξ) + C ρ^n e^{μt}`,
/// `μ = ρ + 1/ρ - 2`, the fields are `b_n ∝ 1/s_n` and
/// `b̂_n = A_{n+1}p_n - Q²p_{n+1}` where `A_n = κ p_n / s_{n-1} + ζ`.
#[allow(clippy::too_many_arguments)]
pub fn al_soliton_oscillator(
    params: &AlDarbouxParams,
    linear: &LinearSolution,
    homogeneous: Complex64,
    first_site: i64,
    n_sites: usize,
    halo: usize,
    time: f64,
) -> Result<AlOscillatorSolution> {
    params.check()?;
    if linear.scheme != LinearScheme::SymmetricAl || linear.alpha != 1 {
        return Err(Error::InvalidParameter("oscillator dressing needs symmetric heat data".into()));
    }
    let (q, kappa, zeta) = (params.big_q, params.kappa, params.zeta);
    let q2 = q * q;
    let mismatch = (kappa - q2 * zeta).norm();
    if mismatch > CONSTRAINT_TOL * (1.0 + kappa.norm()) {
        return Err(Error::InconsistentDressing { residual: mismatch });
    }
    if zeta.norm() == 0.0 {
        return Err(Error::InvalidParameter("zeta must be nonzero".into()));
    }
    let len = n_sites + 2 * halo;
    let sites = first_site - halo as i64..first_site + (n_sites + halo) as i64;
    let trivial = linear.modes.iter().all(|m| m.amplitude.norm() == 0.0);
    if trivial {
        return Ok(AlOscillatorSolution {
            pair: params.pair.clone(),
            first_site,
            n_sites,
            halo,
            b_hat: vec![Jet::real(0.0); len],
            b: vec![Jet::real(0.0); len],
        });
    }
    let rho = zeta / q2;
    let mu = rho + rho.inv() - 2.0;
    let weights = linear
        .modes
        .iter()
        .map(|m| {
            let w = 1.0 - rho / m.base;
            if w.norm() < POLE_TOL {
                Err(Error::DegenerateMode(format!("base {} resonates with rho", m.base)))
            } else {
                Ok(zeta * m.amplitude / w)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let s = |n: i64| {
        linear.modes.iter().zip(&weights).fold(
            Jet::exp_rate(mu, time) * (homogeneous * rho.powi(n as i32)),
            |acc, (m, &w)| acc + Jet::exp_rate(m.rate, time) * (w * m.base.powi((n - 1) as i32)),
        )
    };
    let p = |n: i64| linear.eval(n, time);
    let q_tilde = |n: i64| -> Result<Jet> {
        let sn = s(n);
        if sn.value.norm() < POLE_TOL {
            return Err(Error::SingularDressing { site: n });
        }
        Ok(sn.recip())
    };
    let big_a = |n: i64| -> Result<Jet> { Ok(p(n) * q_tilde(n - 1)? * kappa + zeta) };
    let mut worst: f64 = 0.0;
    let (mut b_hat, mut b) = (Vec::with_capacity(len), Vec::with_capacity(len));
    for n in sites {
        let r = big_a(n + 1)? * p(n) - p(n + 1) * q2;
        let qt = q_tilde(n)?;
        let ii = q_tilde(n - 1)? - qt * big_a(n)? / q2;
        let iii = big_a(n + 1)? - big_a(n)? + r * q_tilde(n - 1)? * q2;
        worst = worst.max(ii.norm()).max(iii.norm());
        b_hat.push(r);
        b.push(qt / params.pair.kappa);
    }
    if worst > CONSTRAINT_TOL {
        return Err(Error::InconsistentDressing { residual: worst });
    }
    Ok(AlOscillatorSolution {
        pair: params.pair.clone(),
        first_site,
        n_sites,
        halo,
        b_hat,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ClosureKind;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lax_examples() {
        let z = AlState::zeros(3, 2, 1, AlBoundary::Periodic);
        let l = al_lax(&z, 0, c(2.0)).unwrap();
        assert_eq!(l, CMatrix::from_fn(3, 3, |i, j| if i != j { c(0.0) } else if i < 2 { c(2.0) } else { c(0.5) }));
        let s = AlState::new(vec![CMatrix::scalar(c(1.0))], vec![CMatrix::scalar(c(-1.0))], AlBoundary::Periodic).unwrap();
        assert_eq!(al_lax(&s, 0, c(1.0)).unwrap().as_slice(), &[c(1.0), c(1.0), c(-1.0), c(1.0)]);
        assert!(matches!(al_lax(&s, 0, c(0.0)), Err(Error::SpectralPole)));
    }

    #[test]
    fn v_operator_examples() {
        let z = AlState::zeros(4, 1, 2, AlBoundary::Periodic);
        assert!(al_v_operator(&z, 1, AlVariant::Al, c(1.0)).unwrap().max_abs() < 1e-15);
        let v = al_v_operator(&z, 1, AlVariant::Network, c(2.0)).unwrap();
        assert_eq!(v, CMatrix::from_fn(3, 3, |i, j| if i != j { c(0.0) } else if i == 0 { c(4.0) } else { c(0.25) }));
    }

    #[test]
    fn rhs_hand_evaluation() {
        let mut s = AlState::zeros(5, 1, 1, AlBoundary::Periodic);
        s.b_hat[0] = CMatrix::scalar(c(1.0));
        let r = al_eom_rhs(&s, AlVariant::Al);
        assert_eq!(r.upper[0][(0, 0)], c(-2.0));
        assert_eq!(r.upper[1][(0, 0)], c(1.0));
        assert_eq!(r.upper[4][(0, 0)], c(1.0));
        assert!(r.lower.iter().all(|m| m.max_abs() == 0.0));
    }

    #[test]
    fn network_symmetric_reduction() {
        let vals = [0.3, -0.2, 0.5, 0.1, -0.4];
        let m: Vec<_> = vals.iter().map(|&v| CMatrix::scalar(c(v))).collect();
        let s = AlState::new(m.clone(), m, AlBoundary::Periodic).unwrap();
        let r = al_eom_rhs(&s, AlVariant::Network);
        for n in 0..5 {
            let b = |k: i64| vals[k.rem_euclid(5) as usize];
            let k = n as i64;
            let expect = b(k + 1) - b(k - 1) - b(k + 1) * b(k) * b(k) + b(k) * b(k) * b(k - 1);
            assert!((r.lower[n][(0, 0)] - c(expect)).norm() < 1e-15);
            assert!((&r.lower[n] - &r.upper[n]).max_abs() < 1e-15);
        }
    }

    #[test]
    fn oscillator_dispersion_value() {
        let lin = LinearSolution::new(&[(c(1.0), c(2.0))], 1, LinearScheme::SymmetricAl).unwrap();
        assert!((lin.modes[0].rate - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn fundamental_zero_seeds_give_zero_state() {
        let pair = RankOnePair::new(1, 1, c(1.0), ClosureKind::TripleProduct).unwrap();
        let params = AlDarbouxParams {
            big_q: c(1.1),
            kappa: c(1.0),
            zeta: c(0.0),
            seeds: AlSeeds { a1: c(0.3), d1: c(-0.2), b_hat1: c(0.0), b1: c(0.0) },
            pair,
        };
        let sol = al_soliton_fundamental(&params, 6).unwrap();
        assert!(sol.state.b_hat.iter().chain(&sol.state.b).all(|m| m.max_abs() == 0.0));
    }
}
