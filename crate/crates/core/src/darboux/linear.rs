use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearScheme {
    /// `∂ₜ x̂_n = Δ^α x̂_n` with the forward difference `Δf_n = f_{n+1} - f_n`.
    ForwardDnls,
    /// `∂ₜ x̂_n = x̂_{n+1} - 2x̂_n + x̂_{n-1}`.
    SymmetricAl,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearMode {
    pub amplitude: Complex64,
    pub base: Complex64,
    pub rate: Complex64,
}

/// Finite mode sum `x̂_n(t) = Σ c_s ξ_s^{n-1} e^{Λ_s t}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSolution {
    pub modes: Vec<LinearMode>,
    pub scheme: LinearScheme,
    pub alpha: u32,
}

/// Exponent tying a spatial base to its time dependence.
pub fn dispersion(base: Complex64, alpha: u32, scheme: LinearScheme) -> Result<Complex64> {
    if base == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateMode("zero base".into()));
    }
    match scheme {
        LinearScheme::ForwardDnls => {
            if alpha == 0 {
                return Err(Error::FlowUnsupported(0));
            }
            Ok((base - 1.0).powi(alpha as i32))
        }
        // (ξ^{1/2} - ξ^{-1/2})² without choosing a square-root branch.
        LinearScheme::SymmetricAl if alpha == 1 => Ok(base + base.inv() - 2.0),
        LinearScheme::SymmetricAl => Err(Error::FlowUnsupported(alpha)),
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl LinearSolution {
    /// Attaches dispersion to `(amplitude, base)` pairs.
    pub fn new(modes: &[(Complex64, Complex64)], alpha: u32, scheme: LinearScheme) -> Result<Self> {
        let modes = modes
            .iter()
            .map(|&(amplitude, base)| {
                Ok(LinearMode {
                    amplitude,
                    base,
                    rate: dispersion(base, alpha, scheme)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { modes, scheme, alpha })
    }

    /// Value and time derivative at site `n`.
    pub fn eval(&self, n: i64, t: f64) -> Jet {
        self.modes.iter().fold(Jet::real(0.0), |acc, m| {
            acc + Jet::exp_rate(m.rate, t) * (m.amplitude * m.base.powi((n - 1) as i32))
        })
    }

    /// Defect of the linear lattice equation at `(n, t)`.
    pub fn residual(&self, n: i64, t: f64) -> Complex64 {
        let v = |k: i64| self.eval(k, t).value;
        let rhs = match self.scheme {
            LinearScheme::ForwardDnls => (0..=self.alpha)
                .map(|k| {
                    let sign = if (self.alpha - k) % 2 == 0 { 1.0 } else { -1.0 };
                    v(n + i64::from(k)) * (sign * binomial(self.alpha, k))
                })
                .sum(),
            LinearScheme::SymmetricAl => v(n + 1) - v(n) * 2.0 + v(n - 1),
        };
        self.eval(n, t).deriv - rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dispersion_examples() {
        for alpha in 1..=3 {
            assert_eq!(dispersion(c(1.0), alpha, LinearScheme::ForwardDnls).unwrap(), c(0.0));
        }
        assert_eq!(dispersion(c(2.0), 2, LinearScheme::ForwardDnls).unwrap(), c(1.0));
        assert!((dispersion(c(2.0), 1, LinearScheme::SymmetricAl).unwrap() - c(0.5)).norm() < 1e-15);
        assert!(matches!(
            dispersion(c(0.0), 1, LinearScheme::ForwardDnls),
            Err(Error::DegenerateMode(_))
        ));
    }

    #[test]
    fn modes_solve_their_equations() {
        let modes = [(Complex64::new(0.7, 0.1), Complex64::new(0.4, 0.8)), (c(1.3), c(1.1))];
        for (alpha, scheme) in [
            (1, LinearScheme::ForwardDnls),
            (2, LinearScheme::ForwardDnls),
            (3, LinearScheme::ForwardDnls),
            (1, LinearScheme::SymmetricAl),
        ] {
            let sol = LinearSolution::new(&modes, alpha, scheme).unwrap();
            for (n, t) in [(-3, 0.2), (0, 0.0), (4, 1.3), (9, -0.5)] {
                assert!(sol.residual(n, t).norm() < 1e-12, "{scheme:?} {alpha} at ({n}, {t})");
            }
        }
    }
}
