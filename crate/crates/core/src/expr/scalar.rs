//! Exact complex-rational constants.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn real(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn int(n: i64) -> Self {
        Scalar::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Scalar::real(ratio(n, d))
    }

    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Scalar { re: &self.re / &norm, im: -(&self.im / &norm) })
    }

    /// Integer power; `None` for a negative power of zero.
    pub fn powi(&self, n: i64) -> Option<Self> {
        if n < 0 {
            return self.inv()?.powi(-n);
        }
        let mut base = self.clone();
        let mut acc = Scalar::one();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        Some(acc)
    }

    /// Exact `self^(p/q)` when `self` is a positive real rational whose numerator and
    /// denominator are perfect q-th powers.
    pub fn exact_root_pow(&self, exp: &BigRational) -> Option<Self> {
        if !self.is_real() || !self.re.is_positive() {
            return None;
        }
        let q = exp.denom().to_u32()?;
        let p = exp.numer().to_i64()?;
        let num = exact_nth_root(self.re.numer(), q)?;
        let den = exact_nth_root(self.re.denom(), q)?;
        Scalar::real(BigRational::new(num, den)).powi(p)
    }
}

fn exact_nth_root(n: &BigInt, q: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.nth_root(q);
    if root.pow(q) == *n {
        Some(root)
    } else {
        None
    }
}

/// Smallest-denominator rational within `tol` of `v` (continued fractions), if its
/// denominator stays at most `max_den`.
pub fn reconstruct_rational(v: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    if !v.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        (h0, h1) = (h1, ai * h1 + h0);
        (k0, k1) = (k1, ai * k1 + k0);
        if k1 > max_den as i128 {
            return None;
        }
        if (h1 as f64 / k1 as f64 - v).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = x - a;
        if frac == 0.0 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

/// True when the rational is an integer.
pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

pub(crate) fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "(rat {} {})", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            fmt_rational(&self.re, f)
        } else {
            write!(f, "(cx ")?;
            fmt_rational(&self.re, f)?;
            write!(f, " ")?;
            fmt_rational(&self.im, f)?;
            write!(f, ")")
        }
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn reconstructs_small_rationals() {
        assert_eq!(super::reconstruct_rational(-0.375, 100, 1e-12), Some(super::ratio(-3, 8)));
        assert_eq!(super::reconstruct_rational(4.0, 100, 1e-12), Some(super::ratio(4, 1)));
        assert_eq!(super::reconstruct_rational(1.0 / 3.0 + 1e-13, 100, 1e-10), Some(super::ratio(1, 3)));
        assert_eq!(super::reconstruct_rational(std::f64::consts::PI, 100, 1e-12), None);
    }

    use super::*;

    #[test]
    fn inverse_of_i_is_minus_i() {
        let inv = Scalar::i().inv().unwrap();
        assert_eq!(inv, -&Scalar::i());
    }

    #[test]
    fn exact_roots() {
        let four = Scalar::int(4);
        assert_eq!(four.exact_root_pow(&ratio(1, 2)), Some(Scalar::int(2)));
        assert_eq!(four.exact_root_pow(&ratio(-1, 2)), Some(Scalar::rational(1, 2)));
        assert_eq!(Scalar::int(2).exact_root_pow(&ratio(1, 2)), None);
        assert_eq!(Scalar::int(-4).exact_root_pow(&ratio(1, 2)), None);
    }

    #[test]
    fn powi_negative_zero_is_none() {
        assert!(Scalar::zero().powi(-1).is_none());
        assert_eq!(Scalar::i().powi(2), Some(Scalar::int(-1)));
    }
}
