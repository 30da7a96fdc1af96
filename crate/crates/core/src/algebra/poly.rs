use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

/// Coefficients below this max-norm are treated as zero when normalizing.
pub const POLY_ZERO_TOL: f64 = 1e-13;

/// Laurent polynomial `sum_k c_k s^k` with square matrix coefficients.
#[derive(Debug, Clone)]
pub struct SpectralMatrixPoly {
    min_degree: i32,
    coeffs: Vec<CMatrix>,
    dim: usize,
}

impl SpectralMatrixPoly {
    pub fn new(min_degree: i32, coeffs: Vec<CMatrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Dimension("polynomial needs at least one coefficient".into()))?;
        let dim = first.rows();
        if coeffs.iter().any(|c| c.shape() != (dim, dim)) {
            return Err(Error::Dimension("coefficients must share one square shape".into()));
        }
        Ok(Self { min_degree, coeffs, dim })
    }

    pub fn constant(m: CMatrix) -> Result<Self> {
        Self::monomial(0, m)
    }

    pub fn monomial(degree: i32, m: CMatrix) -> Result<Self> {
        Self::new(degree, vec![m])
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            min_degree: 0,
            coeffs: vec![CMatrix::zeros(dim, dim)],
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i32 {
        self.min_degree + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    /// Coefficient of `s^degree`, zero outside the stored range.
    pub fn coeff(&self, degree: i32) -> CMatrix {
        let k = degree - self.min_degree;
        if k < 0 || k as usize >= self.coeffs.len() {
            CMatrix::zeros(self.dim, self.dim)
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.max_degree().max(other.max_degree());
        let coeffs = (lo..=hi).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        Self::new(lo, coeffs)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![CMatrix::zeros(self.dim, self.dim); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.max_abs() == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += &(a * b);
            }
        }
        Self::new(self.min_degree + other.min_degree, coeffs)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            min_degree: self.min_degree,
            coeffs: self.coeffs.iter().map(|m| m.scale(c)).collect(),
            dim: self.dim,
        }
    }

    /// Left multiplication by a constant matrix.
    pub fn left_mul(&self, m: &CMatrix) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| m.try_mul(c)).collect::<Result<_>>()?;
        Self::new(self.min_degree, coeffs)
    }

    /// Right multiplication by a constant matrix.
    pub fn right_mul(&self, m: &CMatrix) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.try_mul(m)).collect::<Result<_>>()?;
        Self::new(self.min_degree, coeffs)
    }

    pub fn eval(&self, s: Complex64) -> Result<CMatrix> {
        if self.min_degree < 0 && s == Complex64::new(0.0, 0.0) {
            return Err(Error::SpectralPole);
        }
        // Horner in s over the shifted polynomial, then multiply by s^min.
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(s);
            acc += c;
        }
        Ok(acc.scale(s.powi(self.min_degree)))
    }

    /// Trims zero coefficients at both ends.
    pub fn normalized(&self) -> Self {
        let nz = |m: &CMatrix| m.max_abs() >= POLY_ZERO_TOL;
        match (self.coeffs.iter().position(nz), self.coeffs.iter().rposition(nz)) {
            (Some(lo), Some(hi)) => Self {
                min_degree: self.min_degree + lo as i32,
                coeffs: self.coeffs[lo..=hi].to_vec(),
                dim: self.dim,
            },
            _ => Self::zero(self.dim),
        }
    }

    /// Largest coefficient difference over the union of degree ranges.
    pub fn max_coeff_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.max_degree().max(other.max_degree());
        Ok((lo..=hi)
            .map(|k| (&self.coeff(k) - &other.coeff(k)).max_abs())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_coeff_diff(other).is_ok_and(|d| d <= tol)
    }

    /// Scalar coefficients of the trace polynomial, from `min_degree` upward.
    pub fn trace_coefficients(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(CMatrix::trace).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "polynomial coefficient sizes {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn square_of_lambda() {
        let p = SpectralMatrixPoly::monomial(1, CMatrix::identity(2)).unwrap();
        let q = p.try_mul(&p).unwrap().normalized();
        assert_eq!((q.min_degree(), q.max_degree()), (2, 2));
        assert_eq!(q.coeff(2), CMatrix::identity(2));
    }

    #[test]
    fn difference_of_squares_in_z() {
        let i = CMatrix::identity(2);
        let p = SpectralMatrixPoly::new(-1, vec![i.clone(), CMatrix::zeros(2, 2), i.clone()]).unwrap();
        let q = SpectralMatrixPoly::new(-1, vec![i.scale(c(-1.0)), CMatrix::zeros(2, 2), i.clone()]).unwrap();
        let r = p.try_mul(&q).unwrap().normalized();
        assert_eq!((r.min_degree(), r.max_degree()), (-2, 2));
        assert_eq!(r.coeff(2), i);
        assert_eq!(r.coeff(-2), i.scale(c(-1.0)));
        assert_eq!(r.coeff(0), CMatrix::zeros(2, 2));
    }

    #[test]
    fn mismatched_dims_rejected() {
        let p = SpectralMatrixPoly::zero(2);
        let q = SpectralMatrixPoly::zero(3);
        assert!(matches!(p.try_mul(&q), Err(Error::Dimension(_))));
    }

    #[test]
    fn eval_at_zero_with_negative_degree_is_a_pole() {
        let p = SpectralMatrixPoly::monomial(-1, CMatrix::identity(1)).unwrap();
        assert_eq!(p.eval(c(0.0)), Err(Error::SpectralPole));
    }

    #[test]
    fn normalizing_zero_poly() {
        let p = SpectralMatrixPoly::new(-3, vec![CMatrix::zeros(2, 2); 4]).unwrap();
        let n = p.normalized();
        assert_eq!((n.min_degree(), n.max_degree()), (0, 0));
    }
}
