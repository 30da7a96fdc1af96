//! Dense complex matrices, Laurent matrix polynomials in a spectral
//! parameter, rank-one closure pairs and a pivoted dense solver.

mod matrix;
mod poly;
mod rank_one;
mod solve;

pub use matrix::CMatrix;
pub use poly::{SpectralMatrixPoly, POLY_ZERO_TOL};
pub use rank_one::{ClosureKind, RankOnePair};
pub use solve::{dense_solve, inverse, LuFactor, PIVOT_REL_TOL};

use num_complex::Complex64;

/// `diag(I_n, -I_m)`.
pub fn sigma(n_dim: usize, m_dim: usize) -> CMatrix {
    let mut s = CMatrix::identity(n_dim + m_dim);
    for i in n_dim..n_dim + m_dim {
        s[(i, i)] = Complex64::new(-1.0, 0.0);
    }
    s
}

/// `diag(I_n, 0)`.
pub fn upper_projector(n_dim: usize, m_dim: usize) -> CMatrix {
    let mut p = CMatrix::zeros(n_dim + m_dim, n_dim + m_dim);
    for i in 0..n_dim {
        p[(i, i)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// `diag(0, I_m)`.
pub fn lower_projector(n_dim: usize, m_dim: usize) -> CMatrix {
    let mut p = CMatrix::zeros(n_dim + m_dim, n_dim + m_dim);
    for i in n_dim..n_dim + m_dim {
        p[(i, i)] = Complex64::new(1.0, 0.0);
    }
    p
}
