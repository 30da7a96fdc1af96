//! DNLS solution factory: one-solitons of both families, Toda-type general
//! solutions from linear lattice data, and two-soliton superposition.
//!
//! Fields are stored as scalar profiles on a window of sites plus a halo of
//! neighbours, and assembled on a rank-one pair as `X = x B̂`, `Y = y B`.
//! Profiles are jets, so every constructor also yields the exact time
//! derivative of the fields.

mod bianchi;
mod linear;
mod soliton;
mod toda;

pub use bianchi::bianchi_two_soliton;
pub use linear::{dispersion, LinearMode, LinearScheme, LinearSolution};
pub use soliton::{
    soliton_type1, soliton_type2, type1_coefficient_recursion, type1_linear_data, type2_linear_data, OneSoliton,
    SolitonFamily,
    SolitonParams,
};
pub use toda::{toda_general_solution, BoundaryTerm};

use num_complex::Complex64;

use crate::algebra::{CMatrix, RankOnePair};
use crate::dnls::{self, DnlsState, Flow};
use crate::error::{Error, Result};
use crate::integrate::FieldRates;
use crate::jet::Jet;

/// Denominators below this modulus are treated as poles.
pub const POLE_TOL: f64 = 1e-12;

/// Neighbour sites stored on each side of the window.
pub const DEFAULT_HALO: usize = 4;

pub(crate) fn checked_div(num: Jet, den: Jet, site: i64) -> Result<Jet> {
    if den.value.norm() < POLE_TOL || !den.value.is_finite() {
        return Err(Error::SingularSoliton { site });
    }
    let q = num / den;
    if q.value.is_finite() && q.deriv.is_finite() {
        Ok(q)
    } else {
        Err(Error::SingularSoliton { site })
    }
}

/// Scalar profiles `x_n`, `y_n` over `first_site - halo .. first_site + n_sites + halo`.
#[derive(Debug, Clone)]
pub struct LatticeSolution {
    pub pair: RankOnePair,
    pub first_site: i64,
    pub n_sites: usize,
    pub halo: usize,
    pub x: Vec<Jet>,
    pub y: Vec<Jet>,
}

impl LatticeSolution {
    pub(crate) fn build(
        pair: &RankOnePair,
        first_site: i64,
        n_sites: usize,
        halo: usize,
        mut profile: impl FnMut(i64) -> Result<(Jet, Jet)>,
    ) -> Result<Self> {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for n in extended_range(first_site, n_sites, halo) {
            let (xn, yn) = profile(n)?;
            x.push(xn);
            y.push(yn);
        }
        Ok(Self {
            pair: pair.clone(),
            first_site,
            n_sites,
            halo,
            x,
            y,
        })
    }

    pub(crate) fn slot(&self, n: i64) -> usize {
        let i = n - self.first_site + self.halo as i64;
        assert!(i >= 0 && (i as usize) < self.x.len(), "site {n} outside stored range");
        i as usize
    }

    pub fn x_at(&self, n: i64) -> Jet {
        self.x[self.slot(n)]
    }

    pub fn y_at(&self, n: i64) -> Jet {
        self.y[self.slot(n)]
    }

    /// Site labels of the window.
    pub fn sites(&self) -> std::ops::Range<i64> {
        self.first_site..self.first_site + self.n_sites as i64
    }

    fn assemble(&self, range: std::ops::Range<usize>, deriv: bool) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let pick = |j: &Jet| if deriv { j.deriv } else { j.value };
        let xs = range.clone().map(|i| self.pair.b_hat.scale(pick(&self.x[i]))).collect();
        let ys = range.map(|i| self.pair.b.scale(pick(&self.y[i]))).collect();
        (xs, ys)
    }

    fn window(&self) -> std::ops::Range<usize> {
        self.halo..self.halo + self.n_sites
    }

    /// Window fields as a periodic lattice state.
    pub fn state(&self) -> DnlsState {
        let (x, y) = self.assemble(self.window(), false);
        DnlsState::new(Complex64::new(1.0, 0.0), x, y).expect("pair fixes block shapes")
    }

    /// Exact time derivatives of the window fields.
    pub fn rates(&self) -> FieldRates {
        let (upper, lower) = self.assemble(self.window(), true);
        FieldRates { upper, lower }
    }

    /// Equation-of-motion defect on the window, with true neighbours from the halo.
    pub fn eom_defect(&self, flow: Flow) -> Result<f64> {
        if self.halo < 2 {
            return Err(Error::InvalidParameter("equation check needs two halo sites".into()));
        }
        let all = 0..self.x.len();
        let (x, y) = self.assemble(all.clone(), false);
        let ext = DnlsState::new(Complex64::new(1.0, 0.0), x, y)?;
        let (upper, lower) = self.assemble(all, true);
        let rhs = dnls::eom_rhs(&ext, flow)?;
        let mut worst: f64 = 0.0;
        for i in self.window() {
            worst = worst
                .max((&rhs.upper[i] - &upper[i]).max_abs())
                .max((&rhs.lower[i] - &lower[i]).max_abs());
        }
        Ok(worst)
    }

    /// `max(|x_{n+N} - x_n|, |y_{n+N} - y_n|)` over the halo overlap.
    pub fn periodicity_defect(&self) -> f64 {
        let n = self.n_sites;
        (0..self.x.len().saturating_sub(n))
            .map(|i| (self.x[i + n].value - self.x[i].value).norm().max((self.y[i + n].value - self.y[i].value).norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sites()
            .map(|n| {
                (self.x_at(n).value - other.x_at(n).value)
                    .norm()
                    .max((self.y_at(n).value - other.y_at(n).value).norm())
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn extended_range(first_site: i64, n_sites: usize, halo: usize) -> std::ops::Range<i64> {
    first_site - halo as i64..first_site + (n_sites + halo) as i64
}

/// `max_n ‖M_{n+1}(λ) L̂_n(λ) - L_n(λ) M_n(λ)‖` with `M = λI + K` and the zero-field `L̂`.
pub fn darboux_identity_residual(
    state: &DnlsState,
    dressing: &dnls::DressingData,
    lambdas: &[Complex64],
) -> Result<f64> {
    let zero = DnlsState::zeros(state.n_sites(), state.n_dim(), state.m_dim());
    let n = state.n_sites();
    let dim = state.n_dim() + state.m_dim();
    let mut worst: f64 = 0.0;
    for &lam in lambdas {
        let m: Vec<CMatrix> = (0..n)
            .map(|k| &dressing.k_matrix(state, k) + &CMatrix::scalar_identity(dim, lam))
            .collect();
        for k in 0..n {
            let lhs = &m[(k + 1) % n] * &dnls::lax(&zero, k, lam)?;
            let rhs = &dnls::lax(state, k, lam)? * &m[k];
            worst = worst.max((&lhs - &rhs).max_abs());
        }
    }
    Ok(worst)
}
