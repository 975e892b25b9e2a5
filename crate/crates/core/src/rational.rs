//! Coefficient types.
//!
//! [`Rational`] is `num_rational::BigRational`: always reduced, with a
//! positive denominator, and its `Display` is exactly the `"p/q"` (or `"p"`)
//! form used by every emitter in this workspace.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `re + i·im` with exact rational parts. Only the exact count formula uses it.
pub type GaussianRational = Complex<Rational>;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// `m!!` for odd `m >= -1`, with `(-1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<BigInt> {
    if m < -1 || m % 2 == 0 {
        return Err(Error::BadParity(m));
    }
    let mut acc = BigInt::one();
    let mut f = m;
    while f > 1 {
        acc *= f;
        f -= 2;
    }
    Ok(acc)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `k (k-1) ... (k-m+1)`; zero as soon as `m > k`.
pub fn falling_factorial(k: i64, m: u64) -> BigInt {
    (0..m as i64).fold(BigInt::one(), |acc, i| acc * (k - i))
}

/// `base^e` for a (possibly negative) integer exponent.
pub fn pow_int(base: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// Ring operations needed by [`crate::poly::SparsePoly`].
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync + Zero + One {
    fn add_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn from_rational(q: Rational) -> Self;
    fn scale(&self, q: &Rational) -> Self;
}

impl Coeff for Rational {
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rational(q: Rational) -> Self {
        q
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
}

impl Coeff for GaussianRational {
    fn add_assign_ref(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        Complex::new(&self.re * &other.re - &self.im * &other.im, &self.re * &other.im + &self.im * &other.re)
    }
    fn neg_ref(&self) -> Self {
        Complex::new(-&self.re, -&self.im)
    }
    fn from_rational(q: Rational) -> Self {
        Complex::new(q, Zero::zero())
    }
    fn scale(&self, q: &Rational) -> Self {
        Complex::new(&self.re * q, &self.im * q)
    }
}

/// Integer value of a rational known to be integral.
pub fn to_integer(q: &Rational) -> Option<BigInt> {
    q.is_integer().then(|| q.numer().clone())
}

pub fn is_even(n: i64) -> bool {
    n.is_even()
}

pub fn to_f64(q: &Rational) -> f64 {
    let (n, d) = (q.numer(), q.denom());
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            // scale both down to keep the quotient finite
            let shift = n.bits().max(d.bits()).saturating_sub(1000);
            let a = (n.abs() >> shift).to_f64().unwrap_or(f64::MAX);
            let b = (d >> shift).to_f64().unwrap_or(f64::MAX);
            if n.is_negative() {
                -a / b
            } else {
                a / b
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1).unwrap(), BigInt::from(1));
        assert_eq!(double_factorial(5).unwrap(), BigInt::from(15));
        // (2n)!/(2^n n!) with n = 5
        let oracle = factorial(10) / (BigInt::from(32) * factorial(5));
        assert_eq!(double_factorial(9).unwrap(), oracle);
        assert_eq!(oracle, BigInt::from(945));
        assert!(matches!(double_factorial(4), Err(Error::BadParity(4))));
        assert!(matches!(double_factorial(-3), Err(Error::BadParity(-3))));
    }

    #[test]
    fn rational_display_and_parse() {
        assert_eq!(rat(-71, 18).to_string(), "-71/18");
        assert_eq!(rat(4, 2).to_string(), "2");
        assert_eq!(rat(3, -6).to_string(), "-1/2");
        assert_eq!(parse_rational("-143/1296"), Some(rat(-143, 1296)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn conjugation_is_an_involution() {
        let z = GaussianRational::new(rat(1, 3), rat(-5, 7));
        assert_eq!(z.conj().conj(), z);
        let w = z.mul_ref(&z.conj());
        assert!(w.im.is_zero());
    }

    #[test]
    fn falling_factorial_vanishes_past_k() {
        assert_eq!(falling_factorial(3, 4), BigInt::zero());
        assert_eq!(falling_factorial(5, 2), BigInt::from(20));
        assert_eq!(falling_factorial(5, 0), BigInt::one());
    }
}
