use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CMatrix;
use crate::error::{Error, Result};

const CLOSURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureKind {
    /// `B̂BB̂ = κB̂` and `BB̂B = κB`.
    TripleProduct,
    /// Additionally `B̂B = κI` and `BB̂ = κI`.
    Identity,
}

/// Rectangular pair `(B̂, B)` closing under triple products.
#[derive(Debug, Clone)]
pub struct RankOnePair {
    pub b_hat: CMatrix,
    pub b: CMatrix,
    pub kappa: Complex64,
    pub kind: ClosureKind,
}

impl RankOnePair {
    pub fn new(n_dim: usize, m_dim: usize, kappa: Complex64, kind: ClosureKind) -> Result<Self> {
        if kappa == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter("closure constant must be nonzero".into()));
        }
        if n_dim == 0 || m_dim == 0 {
            return Err(Error::Dimension("block sizes must be positive".into()));
        }
        match kind {
            ClosureKind::TripleProduct => {
                let mut b_hat = CMatrix::zeros(n_dim, m_dim);
                let mut b = CMatrix::zeros(m_dim, n_dim);
                b_hat[(0, 0)] = Complex64::new(1.0, 0.0);
                b[(0, 0)] = kappa;
                Ok(Self { b_hat, b, kappa, kind })
            }
            ClosureKind::Identity => {
                Self::from_unitary(&CMatrix::identity(n_dim), kappa).and_then(|p| {
                    if n_dim == m_dim {
                        Ok(p)
                    } else {
                        Err(Error::VariantUnavailable(format!(
                            "identity closure needs square blocks, got {n_dim}x{m_dim}"
                        )))
                    }
                })
            }
        }
    }

    /// Identity-closure pair `B̂ = U`, `B = κU*` for a unitary `U`.
    pub fn from_unitary(u: &CMatrix, kappa: Complex64) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::VariantUnavailable("unitary factor must be square".into()));
        }
        let pair = Self {
            b_hat: u.clone(),
            b: u.adjoint().scale(kappa),
            kappa,
            kind: ClosureKind::Identity,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn n_dim(&self) -> usize {
        self.b_hat.rows()
    }

    pub fn m_dim(&self) -> usize {
        self.b_hat.cols()
    }

    /// Max of the two triple-product defects.
    pub fn triple_residual(&self) -> f64 {
        let bhb = &self.b_hat * &self.b;
        let r1 = (&(&bhb * &self.b_hat) - &self.b_hat.scale(self.kappa)).max_abs();
        let r2 = (&(&(&self.b * &self.b_hat) * &self.b) - &self.b.scale(self.kappa)).max_abs();
        r1.max(r2)
    }

    /// Max of the two identity-closure defects; infinite for rectangular pairs.
    pub fn identity_residual(&self) -> f64 {
        if self.n_dim() != self.m_dim() {
            return f64::INFINITY;
        }
        let k = CMatrix::scalar_identity(self.n_dim(), self.kappa);
        let r1 = (&(&self.b_hat * &self.b) - &k).max_abs();
        let r2 = (&(&self.b * &self.b_hat) - &k).max_abs();
        r1.max(r2)
    }

    pub fn validate(&self) -> Result<()> {
        let r = match self.kind {
            ClosureKind::TripleProduct => self.triple_residual(),
            ClosureKind::Identity => self.triple_residual().max(self.identity_residual()),
        };
        if r < CLOSURE_TOL {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("pair violates its closure by {r:.3e}")))
        }
    }

    /// `B̂B`, the 𝒩×𝒩 projector-like block.
    pub fn upper_product(&self) -> CMatrix {
        &self.b_hat * &self.b
    }

    /// `BB̂`, the ℳ×ℳ block.
    pub fn lower_product(&self) -> CMatrix {
        &self.b * &self.b_hat
    }
}
