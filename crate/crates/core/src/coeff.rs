//! Gaussian rational numbers `re + i·im`, the coefficient field of every
//! truncated expansion in this crate.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(k: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(k)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        let one = BigRational::one();
        let zero = BigRational::zero();
        match k.rem_euclid(4) {
            0 => GaussianRational::new(one, zero),
            1 => GaussianRational::new(zero, one),
            2 => GaussianRational::new(-one, zero),
            _ => GaussianRational::new(zero, -one),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        GaussianRational {
            re: &self.re * c,
            im: &self.im * c,
        }
    }

    /// `self += a * b`, skipping work for purely real operands.
    pub fn add_product(&mut self, a: &GaussianRational, b: &GaussianRational) {
        match (a.im.is_zero(), b.im.is_zero()) {
            (true, true) => self.re += &a.re * &b.re,
            (true, false) => {
                self.re += &a.re * &b.re;
                self.im += &a.re * &b.im;
            }
            (false, true) => {
                self.re += &a.re * &b.re;
                self.im += &a.im * &b.re;
            }
            (false, false) => {
                self.re += &a.re * &b.re - &a.im * &b.im;
                self.im += &a.re * &b.im + &a.im * &b.re;
            }
        }
    }

    /// Exact quotient; `None` when dividing by zero.
    pub fn checked_div(&self, other: &GaussianRational) -> Option<GaussianRational> {
        if other.is_zero() {
            return None;
        }
        let norm = &other.re * &other.re + &other.im * &other.im;
        let num = self * &other.conj();
        Some(GaussianRational {
            re: num.re / &norm,
            im: num.im / norm,
        })
    }

    pub fn to_complex64(&self) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        num_complex::Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Default for GaussianRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        let mut out = GaussianRational::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Parses `"p/q"` or `"p"` into a rational, insisting on lowest terms with
/// a positive denominator.
pub fn parse_rational_strict(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let q: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if !q.is_positive() {
        return Err(Error::Parse(format!(
            "denominator must be positive in {s:?}"
        )));
    }
    let r = BigRational::new(p.clone(), q.clone());
    if r.numer() != &p || r.denom() != &q {
        return Err(Error::Parse(format!("{s:?} is not in lowest terms")));
    }
    Ok(r)
}

/// Canonical `"p/q"` rendering (`"p"` when the denominator is one).
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_i_cycle() {
        let i = GaussianRational::i_pow(1);
        let mut acc = GaussianRational::one();
        for k in 0..8 {
            assert_eq!(acc, GaussianRational::i_pow(k));
            acc = &acc * &i;
        }
        assert_eq!(GaussianRational::i_pow(-1), GaussianRational::i_pow(3));
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = GaussianRational::new(rational(3, 2), rational(-1, 5));
        let b = GaussianRational::new(rational(7, 1), rational(2, 3));
        let q = (&a * &b).checked_div(&b).unwrap();
        assert_eq!(q, a);
        assert!(a.checked_div(&GaussianRational::zero()).is_none());
    }

    #[test]
    fn strict_parsing() {
        assert_eq!(parse_rational_strict("-3/4").unwrap(), rational(-3, 4));
        assert_eq!(parse_rational_strict("5").unwrap(), rational(5, 1));
        assert!(parse_rational_strict("2/4").is_err());
        assert!(parse_rational_strict("1/-2").is_err());
        assert!(parse_rational_strict("x").is_err());
        assert_eq!(format_rational(&rational(6, 3)), "2");
    }
}
