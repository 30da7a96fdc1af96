use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

/// Relative pivot threshold against `‖a‖∞`.
pub const PIVOT_REL_TOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P a = L U`.
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl LuFactor {
    pub fn new(a: &CMatrix) -> Result<Self> {
        Self::with_tolerance(a, PIVOT_REL_TOL)
    }

    /// Factorises with a caller-chosen relative pivot threshold.
    pub fn with_tolerance(a: &CMatrix, rel_tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!("LU of a {}x{} matrix", a.rows(), a.cols())));
        }
        let n = a.rows();
        let threshold = rel_tol * a.norm_inf();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularMatrix { pivot, threshold });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let inv = Complex64::new(1.0, 0.0) / lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] * inv;
                lu[(i, k)] = f;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, rhs: &CMatrix) -> Result<CMatrix> {
        let n = self.lu.rows();
        if rhs.rows() != n {
            return Err(Error::Dimension(format!("rhs has {} rows, expected {n}", rhs.rows())));
        }
        let m = rhs.cols();
        let mut x = CMatrix::from_fn(n, m, |i, j| rhs[(self.perm[i], j)]);
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                for j in 0..m {
                    let v = x[(k, j)];
                    x[(i, j)] -= l * v;
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                for j in 0..m {
                    let v = x[(k, j)];
                    x[(i, j)] -= u * v;
                }
            }
            let d = self.lu[(i, i)];
            for j in 0..m {
                x[(i, j)] /= d;
            }
        }
        Ok(x)
    }
}

/// Solves `a x = rhs` by partial-pivoting elimination.
pub fn dense_solve(a: &CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    LuFactor::new(a)?.solve(rhs)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    dense_solve(a, &CMatrix::identity(a.rows()))
}
