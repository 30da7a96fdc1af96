//! First-order forward-mode dual numbers over `Complex64`.
//!
//! Closed-form solutions are evaluated on jets so that their time derivative
//! comes out exactly alongside the value.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub deriv: Complex64,
}

impl Jet {
    pub const fn new(value: Complex64, deriv: Complex64) -> Self {
        Self { value, deriv }
    }

    pub fn constant(value: Complex64) -> Self {
        Self::new(value, Complex64::new(0.0, 0.0))
    }

    pub fn real(value: f64) -> Self {
        Self::constant(Complex64::new(value, 0.0))
    }

    /// `e^{rate·t}` with its derivative.
    pub fn exp_rate(rate: Complex64, t: f64) -> Self {
        let e = (rate * t).exp();
        Self::new(e, rate * e)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, self.deriv * e)
    }

    /// Principal logarithm.
    pub fn ln(self) -> Self {
        Self::new(self.value.ln(), self.deriv / self.value)
    }

    pub fn recip(self) -> Self {
        let r = self.value.inv();
        Self::new(r, -self.deriv * r * r)
    }

    pub fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Self::real(1.0);
        }
        let v = self.value.powi(k);
        let dv = self.value.powi(k - 1) * f64::from(k);
        Self::new(v, dv * self.deriv)
    }

    pub fn norm(self) -> f64 {
        self.value.norm()
    }
}

impl From<Complex64> for Jet {
    fn from(v: Complex64) -> Self {
        Self::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, r: Jet) -> Jet {
        Jet::new(self.value + r.value, self.deriv + r.deriv)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, r: Jet) -> Jet {
        Jet::new(self.value - r.value, self.deriv - r.deriv)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, r: Jet) -> Jet {
        Jet::new(self.value * r.value, self.deriv * r.value + self.value * r.deriv)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, r: Jet) -> Jet {
        self * r.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.value, -self.deriv)
    }
}

impl Add<Complex64> for Jet {
    type Output = Jet;
    fn add(self, r: Complex64) -> Jet {
        Jet::new(self.value + r, self.deriv)
    }
}

impl Sub<Complex64> for Jet {
    type Output = Jet;
    fn sub(self, r: Complex64) -> Jet {
        Jet::new(self.value - r, self.deriv)
    }
}

impl Mul<Complex64> for Jet {
    type Output = Jet;
    fn mul(self, r: Complex64) -> Jet {
        Jet::new(self.value * r, self.deriv * r)
    }
}

impl Div<Complex64> for Jet {
    type Output = Jet;
    fn div(self, r: Complex64) -> Jet {
        Jet::new(self.value / r, self.deriv / r)
    }
}

impl Add<Jet> for Complex64 {
    type Output = Jet;
    fn add(self, r: Jet) -> Jet {
        r + self
    }
}

impl Sub<Jet> for Complex64 {
    type Output = Jet;
    fn sub(self, r: Jet) -> Jet {
        Jet::new(self - r.value, -r.deriv)
    }
}

impl Mul<Jet> for Complex64 {
    type Output = Jet;
    fn mul(self, r: Jet) -> Jet {
        r * self
    }
}

impl Div<Jet> for Complex64 {
    type Output = Jet;
    fn div(self, r: Jet) -> Jet {
        r.recip() * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_rule() {
        let t = 0.7;
        let a = Complex64::new(0.3, 0.2);
        let f = |t: f64| {
            let e = Jet::exp_rate(a, t);
            e / (e + Complex64::new(2.0, 0.0))
        };
        let h = 1e-6;
        let fd = (f(t + h).value - f(t - h).value) / (2.0 * h);
        assert!((f(t).deriv - fd).norm() < 1e-9);
    }

    #[test]
    fn powi_and_ln() {
        let x = Jet::new(Complex64::new(1.5, 0.5), Complex64::new(1.0, 0.0));
        let p = x.powi(3);
        assert!((p.deriv - 3.0 * x.value * x.value).norm() < 1e-14);
        assert!((x.ln().deriv - x.value.inv()).norm() < 1e-15);
        assert_eq!(x.powi(0), Jet::real(1.0));
    }
}
