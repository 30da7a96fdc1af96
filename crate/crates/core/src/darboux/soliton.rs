use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{checked_div, extended_range, LatticeSolution, LinearScheme, LinearSolution, POLE_TOL};
use crate::algebra::{CMatrix, RankOnePair};
use crate::dnls::{DnlsState, DressingData, Flow};
use crate::error::{Error, Result};
use crate::integrate::FieldRates;
use crate::jet::Jet;

const PERIODIC_TOL: f64 = 1e-10;
const SEED_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SolitonFamily {
    /// Spatial base `ξ`, with `ξ̂ = 1 - ξ` and `ζ = 0`.
    Type1 { xi: Complex64 },
    /// `ζ = c²`, `η = 1 + c`, `ε = 1 - c`, `ξ̂ = 0`.
    Type2 { c: Complex64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonParams {
    pub family: SolitonFamily,
    pub kappa: Complex64,
    pub x1: Complex64,
    pub d1: Complex64,
    /// Optional; checked against the value forced by the constraints.
    #[serde(default)]
    pub a1: Option<Complex64>,
    /// Optional; checked against the value forced by the constraints.
    #[serde(default)]
    pub y1: Option<Complex64>,
    pub flow: Flow,
    #[serde(default)]
    pub periodic: bool,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl SolitonParams {
    pub fn type1(xi: Complex64, kappa: Complex64, x1: Complex64, d1: Complex64, flow: Flow) -> Self {
        Self {
            family: SolitonFamily::Type1 { xi },
            kappa,
            x1,
            d1,
            a1: None,
            y1: None,
            flow,
            periodic: false,
        }
    }

    pub fn type2(c: Complex64, kappa: Complex64, x1: Complex64, d1: Complex64, flow: Flow) -> Self {
        Self {
            family: SolitonFamily::Type2 { c },
            ..Self::type1(zero(), kappa, x1, d1, flow)
        }
    }

    /// Seed `a_1` forced by the constraints.
    pub fn derived_a1(&self) -> Complex64 {
        match self.family {
            SolitonFamily::Type1 { xi } => (1.0 - xi) / self.kappa - self.d1,
            SolitonFamily::Type2 { .. } => -self.d1,
        }
    }

    /// Second-site value `d_2` of the diagonal dressing block.
    pub fn d2(&self) -> Complex64 {
        match self.family {
            SolitonFamily::Type1 { xi } => self.d1 / (xi + self.kappa * self.d1),
            SolitonFamily::Type2 { c } => (self.d1 + c * c) / (1.0 + self.d1),
        }
    }

    /// Seed `y_1` forced by the constraints.
    pub fn derived_y1(&self) -> Result<Complex64> {
        let jump = self.d1 - self.d2();
        if !jump.is_finite() {
            return Err(Error::SingularSoliton { site: 2 });
        }
        if self.x1 == zero() {
            return if jump.norm() < SEED_TOL {
                Ok(zero())
            } else {
                Err(Error::InvalidParameter("x1 = 0 forces d1 to be a fixed point".into()))
            };
        }
        Ok(match self.family {
            SolitonFamily::Type1 { .. } => jump / self.x1,
            SolitonFamily::Type2 { .. } => jump / (self.kappa * self.x1),
        })
    }

    fn check_seeds(&self) -> Result<(Complex64, Complex64)> {
        let a1 = self.derived_a1();
        let y1 = self.derived_y1()?;
        for (given, forced) in [(self.a1, a1), (self.y1, y1)] {
            if let Some(g) = given {
                let residual = (g - forced).norm();
                if residual > SEED_TOL * (1.0 + forced.norm()) {
                    return Err(Error::InconsistentDressing { residual });
                }
            }
        }
        Ok((a1, y1))
    }
}

/// One-soliton fields together with its dressing coefficients.
///
/// The dressing blocks are `A_n = a_n B̂B` and `D_n = d_n BB̂`.
#[derive(Debug, Clone)]
pub struct OneSoliton {
    pub field: LatticeSolution,
    pub a: Vec<Jet>,
    pub d: Vec<Jet>,
    pub params: Option<SolitonParams>,
    pub time: f64,
}

impl OneSoliton {
    /// The trivial dressing: all fields and blocks vanish.
    pub fn zero(pair: &RankOnePair, first_site: i64, n_sites: usize, halo: usize, time: f64) -> Self {
        let len = n_sites + 2 * halo;
        let field = LatticeSolution::build(pair, first_site, n_sites, halo, |_| Ok((Jet::real(0.0), Jet::real(0.0))))
            .expect("constant profile");
        Self {
            field,
            a: vec![Jet::real(0.0); len],
            d: vec![Jet::real(0.0); len],
            params: None,
            time,
        }
    }

    pub fn state(&self) -> DnlsState {
        self.field.state()
    }

    pub fn rates(&self) -> FieldRates {
        self.field.rates()
    }

    pub fn a_at(&self, n: i64) -> Jet {
        self.a[self.field.slot(n)]
    }

    pub fn d_at(&self, n: i64) -> Jet {
        self.d[self.field.slot(n)]
    }

    /// Largest defect of the dressing constraints on the window, with halo neighbours.
    pub fn constraint_residual(&self) -> f64 {
        let pair = &self.field.pair;
        let (up, low) = (pair.upper_product(), pair.lower_product());
        let f = &self.field;
        let mut worst: f64 = 0.0;
        for n in f.sites() {
            let x = |m| pair.b_hat.scale(f.x_at(m).value);
            let y = |m| pair.b.scale(f.y_at(m).value);
            let a = |m| up.scale(self.a_at(m).value);
            let d = |m| low.scale(self.d_at(m).value);
            let (xn, yn) = (x(n), y(n));
            let r1 = &(&a(n + 1) - &a(n)) - &(&xn * &yn);
            let r2 = &(&d(n + 1) - &d(n)) + &(&yn * &xn);
            let r3 = &(&yn - &y(n - 1)) - &(&yn * &a(n));
            let r4 = &(&(&xn - &x(n + 1)) + &(&(&xn * &yn) * &xn)) - &(&xn * &d(n));
            for r in [r1, r2, r3, r4] {
                worst = worst.max(r.max_abs());
            }
        }
        worst
    }

    /// Dressing blocks on the window.
    pub fn dressing_data(&self) -> DressingData {
        let up = self.field.pair.upper_product();
        let low = self.field.pair.lower_product();
        let sites = self.field.sites();
        DressingData {
            a: sites.clone().map(|n| up.scale(self.a_at(n).value)).collect::<Vec<CMatrix>>(),
            d: sites.map(|n| low.scale(self.d_at(n).value)).collect(),
        }
    }
}

fn check_pair(params: &SolitonParams, pair: &RankOnePair) -> Result<()> {
    if (pair.kappa - params.kappa).norm() > 1e-14 * (1.0 + params.kappa.norm()) {
        return Err(Error::InvalidParameter("pair closure constant differs from kappa".into()));
    }
    pair.validate()
}

fn build(
    params: &SolitonParams,
    pair: &RankOnePair,
    first_site: i64,
    n_sites: usize,
    halo: usize,
    time: f64,
    mut profile: impl FnMut(i64) -> Result<[Jet; 4]>,
) -> Result<OneSoliton> {
    let (mut a, mut d) = (Vec::new(), Vec::new());
    let field = LatticeSolution::build(pair, first_site, n_sites, halo, |n| {
        let [x, y, an, dn] = profile(n)?;
        a.push(an);
        d.push(dn);
        Ok((x, y))
    })?;
    debug_assert_eq!(a.len(), extended_range(first_site, n_sites, halo).count());
    Ok(OneSoliton {
        field,
        a,
        d,
        params: Some(params.clone()),
        time,
    })
}

/// Family with `ζ = 0`; periodic when `ξ^N = 1`.
pub fn soliton_type1(
    params: &SolitonParams,
    pair: &RankOnePair,
    first_site: i64,
    n_sites: usize,
    halo: usize,
    time: f64,
) -> Result<OneSoliton> {
    let SolitonFamily::Type1 { xi } = params.family else {
        return Err(Error::InvalidParameter("expected the first soliton family".into()));
    };
    if xi == zero() || xi == Complex64::new(1.0, 0.0) {
        return Err(Error::DegenerateMode(format!("spatial base {xi}")));
    }
    check_pair(params, pair)?;
    if params.periodic {
        let defect = (xi.powi(n_sites as i32) - 1.0).norm();
        if defect >= PERIODIC_TOL {
            return Err(Error::PeriodicityViolation { defect });
        }
    }
    let (a1, y1) = params.check_seeds()?;
    let (k, d1, x1) = (params.kappa, params.d1, params.x1);
    let rate = (xi - 1.0).powi(params.flow.alpha() as i32);
    let e = Jet::exp_rate(rate, time);
    let one = Complex64::new(1.0, 0.0);
    build(params, pair, first_site, n_sites, halo, time, |n| {
        let p = e * xi.powi((n - 1) as i32);
        let q = p.recip();
        let qq = q / xi;
        let d = checked_div(Jet::constant((xi - 1.0) * d1), p * (xi - 1.0) + (p - one) * (k * d1), n)?;
        let x = checked_div(p * ((xi - 1.0) * x1), p * (xi - 1.0 + k * d1) - k * d1, n)?;
        let a = checked_div(Jet::constant((xi - 1.0) * a1), q * (xi - 1.0) + (q - one) * (k * a1), n)?;
        let y = checked_div(
            qq * ((xi - 1.0) * (1.0 - k * a1) * y1),
            qq * (xi - 1.0 + k * a1) - k * a1,
            n,
        )?;
        Ok([x, y, a, d])
    })
}

/// First-family coefficients `(a_n, d_n)` for `n = 1..=n_sites` at `t = 0`, by
/// iterating `d_{n+1} = d_n / (ξ + κ d_n)` and `a_{n+1} = ξ a_n / (1 - κ a_n)`.
pub fn type1_coefficient_recursion(params: &SolitonParams, n_sites: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let SolitonFamily::Type1 { xi } = params.family else {
        return Err(Error::InvalidParameter("expected the first soliton family".into()));
    };
    let k = params.kappa;
    let (mut a, mut d) = (vec![params.a1.unwrap_or_else(|| params.derived_a1())], vec![params.d1]);
    for n in 1..n_sites {
        let (an, dn) = (a[n - 1], d[n - 1]);
        let (den_a, den_d) = (1.0 - k * an, xi + k * dn);
        if den_a.norm() < POLE_TOL || den_d.norm() < POLE_TOL {
            return Err(Error::SingularSoliton { site: n as i64 + 1 });
        }
        a.push(xi * an / den_a);
        d.push(dn / den_d);
    }
    Ok((a, d))
}

/// Family with `ξ̂ = 0`, `ζ = c²`; needs an identity-closure pair.
pub fn soliton_type2(
    params: &SolitonParams,
    pair: &RankOnePair,
    first_site: i64,
    n_sites: usize,
    halo: usize,
    time: f64,
) -> Result<OneSoliton> {
    let SolitonFamily::Type2 { c } = params.family else {
        return Err(Error::InvalidParameter("expected the second soliton family".into()));
    };
    let (eta, eps) = (1.0 + c, 1.0 - c);
    if c == zero() || eta == zero() || eps == zero() {
        return Err(Error::DegenerateMode(format!("c = {c} collapses the two bases")));
    }
    check_pair(params, pair)?;
    if pair.identity_residual() > 1e-12 {
        return Err(Error::VariantUnavailable("second family needs B̂B = κI".into()));
    }
    let xb = eps / eta;
    if params.periodic {
        return Err(Error::PeriodicityViolation {
            defect: (xb.powi(n_sites as i32) - 1.0).norm(),
        });
    }
    let (a1, y1) = params.check_seeds()?;
    let (k, d1, x1) = (params.kappa, params.d1, params.x1);
    let kb = k / eta;
    let dh1 = (d1 + c) / k;
    let ah1 = (a1 + c) / k;
    let alpha = params.flow.alpha() as i32;
    let e_eta = Jet::exp_rate((eta - 1.0).powi(alpha), time);
    let e_eps = Jet::exp_rate((eps - 1.0).powi(alpha), time);
    let pow_eta = |m: i64| e_eta * eta.powi(m as i32);
    let pow_eps = |m: i64| e_eps * eps.powi(m as i32);
    let y_num = y1 * ((xb - 1.0 + kb * ah1) * eta - kb * ah1 * eps);
    build(params, pair, first_site, n_sites, halo, time, |n| {
        let x = checked_div(
            Jet::constant((xb - 1.0) * x1),
            pow_eta(n - 1).recip() * (xb - 1.0 + kb * dh1) - pow_eps(n - 1).recip() * (kb * dh1),
            n,
        )?;
        let y = checked_div(
            Jet::constant(y_num),
            pow_eta(n) * (xb - 1.0 + kb * ah1) - pow_eps(n) * (kb * ah1),
            n,
        )?;
        let r = pow_eps(n - 1) / pow_eta(n - 1);
        let one = Complex64::new(1.0, 0.0);
        let dh = checked_div(Jet::constant((xb - 1.0) * dh1), r * (xb - 1.0) + (r - one) * (kb * dh1), n)?;
        let ri = r.recip();
        let ah = checked_div(Jet::constant((xb - 1.0) * ah1), ri * (xb - 1.0) + (ri - one) * (kb * ah1), n)?;
        // A = a I = (a/κ) B̂B and likewise for D.
        let a = (ah * k - c) / k;
        let d = (dh * k - c) / k;
        Ok([x, y, a, d])
    })
}

/// Two-mode forward linear data reproducing the first family, with the matching `y_1`.
pub fn type1_linear_data(params: &SolitonParams) -> Result<(LinearSolution, Complex64)> {
    let SolitonFamily::Type1 { xi } = params.family else {
        return Err(Error::InvalidParameter("expected the first soliton family".into()));
    };
    let (k, d1) = (params.kappa, params.d1);
    let c1 = -k * d1 / (xi - 1.0 + k * d1);
    let lin = LinearSolution::new(
        &[(c1, Complex64::new(1.0, 0.0)), (Complex64::new(1.0, 0.0), xi)],
        params.flow.alpha(),
        LinearScheme::ForwardDnls,
    )?;
    let g = d1 * (xi - 1.0) / params.x1;
    Ok((lin, g / (c1 + xi)))
}

/// Two-mode forward linear data reproducing the second family, with the matching `y_1`.
pub fn type2_linear_data(params: &SolitonParams) -> Result<(LinearSolution, Complex64)> {
    let SolitonFamily::Type2 { c } = params.family else {
        return Err(Error::InvalidParameter("expected the second soliton family".into()));
    };
    let (eta, eps) = (1.0 + c, 1.0 - c);
    let (k, d1) = (params.kappa, params.d1);
    let xb = eps / eta;
    let kb = k / eta;
    let dh1 = (d1 + c) / k;
    let c1 = -kb * dh1;
    let c2 = xb - 1.0 + kb * dh1;
    let lin = LinearSolution::new(&[(c1, eta), (c2, eps)], params.flow.alpha(), LinearScheme::ForwardDnls)?;
    let g = -c1 * c2 * (eta - eps) * (eta - eps) / (k * (xb - 1.0) * params.x1);
    Ok((lin, g / (c1 * eta + c2 * eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ClosureKind;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn scalar_pair(k: f64) -> RankOnePair {
        RankOnePair::new(1, 1, c(k), ClosureKind::TripleProduct).unwrap()
    }

    #[test]
    fn first_family_second_site_values() {
        let p = SolitonParams::type1(c(2.0), c(1.0), c(0.5), c(1.0), Flow::T1);
        assert!((p.d2() - c(1.0 / 3.0)).norm() < 1e-15);
        let s = soliton_type1(&p, &scalar_pair(1.0), 1, 4, 0, 0.0).unwrap();
        assert!((s.d_at(2).value - c(1.0 / 3.0)).norm() < 1e-15);
        let mut q = p.clone();
        q.d1 = c(-1.5);
        let s = soliton_type1(&q, &scalar_pair(1.0), 1, 4, 0, 0.0).unwrap();
        assert!((s.a_at(1).value - c(0.5)).norm() < 1e-15);
        assert!((s.a_at(2).value - c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_seeds_give_zero_fields() {
        let xi = Complex64::from_polar(1.0, std::f64::consts::TAU / 6.0);
        let p = SolitonParams::type1(xi, c(1.3), c(0.0), c(0.0), Flow::T2);
        let s = soliton_type1(&p, &scalar_pair(1.3), 1, 6, 2, 0.4).unwrap();
        assert!(s.field.x.iter().chain(&s.field.y).all(|j| j.value.norm() == 0.0));
    }

    #[test]
    fn periodic_mode_requires_root_of_unity() {
        let mut p = SolitonParams::type1(c(1.1), c(1.0), c(0.3), c(0.2), Flow::T1);
        p.periodic = true;
        assert!(matches!(
            soliton_type1(&p, &scalar_pair(1.0), 1, 8, 2, 0.0),
            Err(Error::PeriodicityViolation { .. })
        ));
    }

    #[test]
    fn inconsistent_seed_rejected() {
        let mut p = SolitonParams::type1(c(2.0), c(1.0), c(0.5), c(1.0), Flow::T1);
        p.a1 = Some(c(0.9));
        assert!(matches!(
            soliton_type1(&p, &scalar_pair(1.0), 1, 4, 2, 0.0),
            Err(Error::InconsistentDressing { .. })
        ));
    }

    #[test]
    fn second_family_definitions_and_degeneracy() {
        let p = SolitonParams::type2(c(0.0), c(1.0), c(0.3), c(0.1), Flow::T1);
        let pair = RankOnePair::new(1, 1, c(1.0), ClosureKind::Identity).unwrap();
        assert!(matches!(soliton_type2(&p, &pair, 1, 4, 2, 0.0), Err(Error::DegenerateMode(_))));
        let (eta, eps) = (c(1.5), c(0.5));
        assert!((eps / eta - c(1.0 / 3.0)).norm() < 1e-16);
        let rect = RankOnePair::new(1, 2, c(1.0), ClosureKind::TripleProduct).unwrap();
        let p = SolitonParams::type2(c(0.5), c(1.0), c(0.3), c(0.1), Flow::T1);
        assert!(matches!(soliton_type2(&p, &rect, 1, 4, 2, 0.0), Err(Error::VariantUnavailable(_))));
    }

    #[test]
    fn second_family_first_site_matches_seeds() {
        let p = SolitonParams::type2(c(0.5), c(1.2), Complex64::new(0.6, 0.1), Complex64::new(0.3, -0.2), Flow::T1);
        let pair = RankOnePair::from_unitary(&CMatrix::identity(1), c(1.2)).unwrap();
        let s = soliton_type2(&p, &pair, 1, 6, 2, 0.0).unwrap();
        assert!((s.field.x_at(1).value - p.x1).norm() < 1e-14);
        assert!((s.field.y_at(1).value - p.derived_y1().unwrap()).norm() < 1e-14);
        assert!((s.d_at(1).value * c(1.2) - p.d1).norm() < 1e-14);
    }
}
