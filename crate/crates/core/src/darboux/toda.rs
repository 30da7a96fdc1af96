use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{checked_div, LatticeSolution, LinearScheme, LinearSolution};
use crate::algebra::RankOnePair;
use crate::error::{Error, Result};
use crate::jet::Jet;

const BOUNDARY_RATE_TOL: f64 = 1e-10;

/// How the boundary value `x̂_2` enters the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryTerm {
    /// `x̂_2` evaluated once at `t0` and held fixed.
    Frozen { t0: f64 },
    /// `x̂_2(t)` evaluated at the current time; accepted only if it is stationary.
    Live,
}

impl Default for BoundaryTerm {
    fn default() -> Self {
        BoundaryTerm::Frozen { t0: 0.0 }
    }
}

/// `y_n = x̂_2 y_1 / x̂_{n+1}` and `x_n = -(x̂_{n+2}x̂_n - x̂_{n+1}²) / (κ x̂_2 y_1 x̂_n)`.
#[allow(clippy::too_many_arguments)]
pub fn toda_general_solution(
    linear: &LinearSolution,
    pair: &RankOnePair,
    y1: Complex64,
    boundary: BoundaryTerm,
    first_site: i64,
    n_sites: usize,
    halo: usize,
    time: f64,
) -> Result<LatticeSolution> {
    if linear.scheme != LinearScheme::ForwardDnls {
        return Err(Error::InvalidParameter("Toda route uses forward linear data".into()));
    }
    if y1 == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter("y1 must be nonzero".into()));
    }
    pair.validate()?;
    let g = match boundary {
        BoundaryTerm::Frozen { t0 } => {
            let x2 = linear.eval(2, t0).value;
            if x2.norm() < super::POLE_TOL {
                return Err(Error::SingularSoliton { site: 2 });
            }
            Jet::constant(x2 * y1)
        }
        BoundaryTerm::Live => {
            let x2 = linear.eval(2, time);
            if x2.deriv.norm() > BOUNDARY_RATE_TOL {
                return Err(Error::InconsistentBoundaryTerm { rate: x2.deriv.norm() });
            }
            x2 * y1
        }
    };
    let kg = g * pair.kappa;
    LatticeSolution::build(pair, first_site, n_sites, halo, |n| {
        let (h0, h1, h2) = (linear.eval(n, time), linear.eval(n + 1, time), linear.eval(n + 2, time));
        let x = -checked_div(h2 * h0 - h1 * h1, kg * h0, n)?;
        let y = checked_div(g, h1, n + 1)?;
        Ok((x, y))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ClosureKind;
    use crate::dnls::Flow;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_data_is_a_fixed_point() {
        let lin = LinearSolution::new(&[(c(2.0), c(1.0))], 1, LinearScheme::ForwardDnls).unwrap();
        let pair = RankOnePair::new(1, 1, c(0.8), ClosureKind::TripleProduct).unwrap();
        let s = toda_general_solution(&lin, &pair, c(0.4), BoundaryTerm::default(), 1, 5, 2, 0.3).unwrap();
        for n in s.sites() {
            assert!(s.x_at(n).value.norm() < 1e-15);
            assert!((s.y_at(n).value - c(0.4)).norm() < 1e-15);
        }
    }

    #[test]
    fn live_boundary_needs_stationary_x2() {
        let lin = LinearSolution::new(&[(c(1.0), c(1.0)), (c(0.5), c(0.7))], 1, LinearScheme::ForwardDnls).unwrap();
        let pair = RankOnePair::new(1, 1, c(1.0), ClosureKind::TripleProduct).unwrap();
        assert!(matches!(
            toda_general_solution(&lin, &pair, c(0.4), BoundaryTerm::Live, 1, 5, 2, 0.3),
            Err(Error::InconsistentBoundaryTerm { .. })
        ));
    }

    #[test]
    fn frozen_boundary_solves_both_flows() {
        let modes = [
            (c(0.7), Complex64::from_polar(1.0, std::f64::consts::TAU / 12.0)),
            (Complex64::new(1.3, 0.2), Complex64::from_polar(1.0, -std::f64::consts::PI / 2.0)),
            (c(2.0), c(1.0)),
        ];
        let pair = RankOnePair::new(1, 2, c(0.9), ClosureKind::TripleProduct).unwrap();
        for flow in [Flow::T1, Flow::T2] {
            let lin = LinearSolution::new(&modes, flow.alpha(), LinearScheme::ForwardDnls).unwrap();
            let s = toda_general_solution(&lin, &pair, c(0.4), BoundaryTerm::default(), 1, 12, 3, 0.3).unwrap();
            assert!(s.eom_defect(flow).unwrap() < 1e-11);
        }
    }
}
