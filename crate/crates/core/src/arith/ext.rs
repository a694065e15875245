//! Complex numbers with an unbounded binary exponent, for products of many
//! theta values that would under- or overflow `f64`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// `mantissa · 2^exp` with `|mantissa| ∈ [1, 2)` unless zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtComplex {
    mantissa: Complex64,
    exp: i64,
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex {
        mantissa: Complex64::new(0.0, 0.0),
        exp: 0,
    };
    pub const ONE: ExtComplex = ExtComplex {
        mantissa: Complex64::new(1.0, 0.0),
        exp: 0,
    };

    pub fn new(z: Complex64) -> Self {
        ExtComplex {
            mantissa: z,
            exp: 0,
        }
        .normalized()
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0))
    }

    fn normalized(self) -> Self {
        let m = self.mantissa.norm();
        if m == 0.0 || !m.is_finite() {
            return if m == 0.0 { Self::ZERO } else { self };
        }
        let shift = m.log2().floor() as i64;
        ExtComplex {
            mantissa: self.mantissa * 2f64.powi(-shift as i32),
            exp: self.exp + shift,
        }
    }

    /// `(mantissa, exponent)` with value `mantissa · 2^exponent`.
    pub fn parts(&self) -> (Complex64, i64) {
        (self.mantissa, self.exp)
    }

    pub fn from_parts(mantissa: Complex64, exp: i64) -> Self {
        ExtComplex { mantissa, exp }.normalized()
    }

    /// `2^x` for real `x`, exact in the exponent range of the type.
    pub fn exp2(x: f64) -> Self {
        let k = x.floor();
        Self::from_parts(Complex64::new(2f64.powf(x - k), 0.0), k as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm() == 0.0
    }

    /// `log₂|z|`, `-∞` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().log2() + self.exp as f64
        }
    }

    /// `|z|` as `f64`, saturating to 0 or ∞.
    pub fn abs(&self) -> f64 {
        self.mantissa.norm() * 2f64.powf(self.exp as f64)
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.exp < -1100 {
            return Complex64::new(0.0, 0.0);
        }
        self.mantissa * 2f64.powf(self.exp as f64)
    }

    pub fn powu(&self, e: u32) -> Self {
        let mut result = Self::ONE;
        let mut base = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }

    pub fn scale(&self, x: f64) -> Self {
        (ExtComplex {
            mantissa: self.mantissa * x,
            exp: self.exp,
        })
        .normalized()
    }
}

impl Mul for ExtComplex {
    type Output = ExtComplex;
    fn mul(self, rhs: ExtComplex) -> ExtComplex {
        ExtComplex {
            mantissa: self.mantissa * rhs.mantissa,
            exp: self.exp + rhs.exp,
        }
        .normalized()
    }
}

impl Add for ExtComplex {
    type Output = ExtComplex;
    fn add(self, rhs: ExtComplex) -> ExtComplex {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = big.exp - small.exp;
        if gap > 1100 {
            return big;
        }
        ExtComplex {
            mantissa: big.mantissa + small.mantissa * 2f64.powi(-(gap as i32)),
            exp: big.exp,
        }
        .normalized()
    }
}

impl Neg for ExtComplex {
    type Output = ExtComplex;
    fn neg(self) -> ExtComplex {
        ExtComplex {
            mantissa: -self.mantissa,
            exp: self.exp,
        }
    }
}

impl Sub for ExtComplex {
    type Output = ExtComplex;
    fn sub(self, rhs: ExtComplex) -> ExtComplex {
        self + (-rhs)
    }
}

impl std::iter::Sum for ExtComplex {
    fn sum<I: Iterator<Item = ExtComplex>>(iter: I) -> Self {
        iter.fold(ExtComplex::ZERO, |a, b| a + b)
    }
}

impl std::iter::Product for ExtComplex {
    fn product<I: Iterator<Item = ExtComplex>>(iter: I) -> Self {
        iter.fold(ExtComplex::ONE, |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survives_underflow() {
        let tiny = ExtComplex::from_real(1e-300);
        let p = tiny.powu(4);
        assert!((p.log2_abs() - 4.0 * (1e-300f64).log2()).abs() < 1e-9);
        assert_eq!(p.to_complex(), Complex64::new(0.0, 0.0));
        let back = p * ExtComplex::from_real(1e300).powu(4);
        assert!((back.to_complex().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn arithmetic_matches_f64() {
        let a = Complex64::new(1.5, -0.25);
        let b = Complex64::new(-3.0, 7.0);
        let (ea, eb) = (ExtComplex::new(a), ExtComplex::new(b));
        assert!(((ea * eb).to_complex() - a * b).norm() < 1e-12);
        assert!(((ea + eb).to_complex() - (a + b)).norm() < 1e-12);
        assert!(((ea - ea).to_complex()).norm() < 1e-15);
    }
}
