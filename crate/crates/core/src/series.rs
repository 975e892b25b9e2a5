//! Truncated univariate power series over [`Rational`].
//!
//! A [`Series`] of order `N` stores the exact coefficients of `z^0..=z^N`;
//! everything beyond `z^N` is unknown (not zero). Binary operations return
//! the smaller of the two orders, dividing by `z^m` lowers the order by `m`
//! and multiplying by `z^m` raises it by `m`.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Rational>,
}

impl Series {
    /// Builds a series whose order is `coeffs.len() - 1`.
    ///
    /// Panics on an empty vector: a series always knows at least `z^0`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one known coefficient");
        Series { coeffs }
    }

    /// Pads or truncates `coeffs` to exactly `order + 1` entries.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        Series { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Rational) -> Self {
        Series { coeffs: (0..=order).map(f).collect() }
    }

    pub fn zeros(order: usize) -> Self {
        Series { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// `c z^power`, known through `order`.
    pub fn monomial(c: Rational, power: usize, order: usize) -> Self {
        let mut s = Self::zeros(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// The identity series `z`.
    pub fn var(order: usize) -> Self {
        Self::monomial(Rational::one(), 1, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `z^i`; `None` beyond the truncation order.
    pub fn coeff(&self, i: usize) -> Option<&Rational> {
        self.coeffs.get(i)
    }

    /// Coefficient of `z^i`, panicking beyond the truncation order.
    pub fn at(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    /// Index of the first nonzero coefficient, or `order + 1` if all known
    /// coefficients vanish.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.coeffs.len())
    }

    pub fn truncate(&self, order: usize) -> Series {
        assert!(order <= self.order(), "cannot raise order by truncation");
        Series { coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Truncates to `min(order, self.order())`.
    pub fn truncate_to(&self, order: usize) -> Series {
        self.truncate(order.min(self.order()))
    }

    pub fn scale(&self, c: &Rational) -> Series {
        Series { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiplies by `z^m`; the order rises by `m`.
    pub fn shift_up(&self, m: usize) -> Series {
        let mut coeffs = vec![Rational::zero(); m];
        coeffs.extend(self.coeffs.iter().cloned());
        Series { coeffs }
    }

    /// Divides by `z^m`, requiring the first `m` coefficients to vanish.
    pub fn shift_down(&self, m: usize) -> Result<Series> {
        let v = self.valuation();
        if v < m {
            return Err(Error::ValuationViolation { expected: m, found: v });
        }
        if m > self.order() {
            return Err(Error::InsufficientOrder { needed: m, available: self.order() });
        }
        Ok(Series { coeffs: self.coeffs[m..].to_vec() })
    }

    /// Substitutes `z -> c z`.
    pub fn dilate(&self, c: &Rational) -> Series {
        let mut p = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let out = a * &p;
                p *= c;
                out
            })
            .collect();
        Series { coeffs }
    }

    pub fn derivative(&self) -> Series {
        if self.order() == 0 {
            return Series::zeros(0);
        }
        Series::from_fn(self.order() - 1, |i| &self.coeffs[i + 1] * int(i as i64 + 1))
    }

    /// Evaluates the known polynomial part at `z`.
    pub fn eval(&self, z: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * z + c)
    }

    fn mul_to(&self, other: &Series, order: usize) -> Series {
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series { coeffs: out }
    }

    /// `self^e` by repeated squaring; no constraint on the constant term.
    pub fn powi(&self, mut e: usize) -> Series {
        let mut base = self.clone();
        let mut acc = Series::one(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Series> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::NonUnitDivisor);
        }
        let inv0 = a0.recip();
        let n = self.order();
        let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
        b.push(inv0.clone());
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &b[m - k];
                }
            }
            b.push(-acc * &inv0);
        }
        Ok(Series { coeffs: b })
    }

    /// Exact quotient. When the divisor has valuation `m > 0` the dividend
    /// must have valuation at least `m`; both are divided by `z^m` first and
    /// the result order is `min(orders) - m`.
    pub fn div(&self, other: &Series) -> Result<Series> {
        let m = other.valuation();
        if m == 0 {
            let order = self.order().min(other.order());
            return Ok(self.truncate(order).mul_to(&other.truncate(order).recip()?, order));
        }
        if m > other.order() || self.valuation() < m || m > self.order() {
            return Err(Error::NonUnitDivisor);
        }
        let a = self.shift_down(m)?;
        let b = other.shift_down(m)?;
        a.div(&b)
    }

    /// `exp(a)` for `a(0) = 0`.
    pub fn exp(&self) -> Result<Series> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::BadConstantTerm(self.coeffs[0].clone()));
        }
        let n = self.order();
        let mut e: Vec<Rational> = Vec::with_capacity(n + 1);
        e.push(Rational::one());
        // n e_n = sum_{k=1}^n k a_k e_{n-k}
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &e[m - k] * int(k as i64);
                }
            }
            e.push(acc / int(m as i64));
        }
        Ok(Series { coeffs: e })
    }

    /// `log(a)` for `a(0) = 1`.
    pub fn log(&self) -> Result<Series> {
        if !self.coeffs[0].is_one() {
            return Err(Error::BadConstantTerm(self.coeffs[0].clone()));
        }
        let n = self.order();
        let mut l: Vec<Rational> = Vec::with_capacity(n + 1);
        l.push(Rational::zero());
        // a' = a l'  =>  m l_m = m a_m - sum_{k=1}^{m-1} k l_k a_{m-k}
        for m in 1..=n {
            let mut acc = &self.coeffs[m] * int(m as i64);
            for k in 1..m {
                if !self.coeffs[m - k].is_zero() {
                    acc -= &l[k] * &self.coeffs[m - k] * int(k as i64);
                }
            }
            l.push(acc / int(m as i64));
        }
        Ok(Series { coeffs: l })
    }

    /// `a^e` for `a(0) = 1` and rational `e`.
    pub fn pow_rational(&self, e: &Rational) -> Result<Series> {
        if !self.coeffs[0].is_one() {
            return Err(Error::BadConstantTerm(self.coeffs[0].clone()));
        }
        let n = self.order();
        let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
        b.push(Rational::one());
        // a b' = e a' b  =>  m b_m = sum_{k=1}^m (e k - (m - k)) a_k b_{m-k}
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    let w = e * int(k as i64) - int((m - k) as i64);
                    acc += &self.coeffs[k] * &b[m - k] * w;
                }
            }
            b.push(acc / int(m as i64));
        }
        Ok(Series { coeffs: b })
    }

    /// `self(inner(z))` for `inner(0) = 0`, known through the smaller order.
    pub fn compose(&self, inner: &Series) -> Result<Series> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::BadConstantTerm(inner.coeffs[0].clone()));
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        let mut acc = Series::constant(self.coeffs[order].clone(), order);
        for c in self.coeffs[..order].iter().rev() {
            acc = acc.mul_to(&inner, order);
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        Series::from_fn(order, |i| &self.coeffs[i] + &rhs.coeffs[i])
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        Series::from_fn(order, |i| &self.coeffs[i] - &rhs.coeffs[i])
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        self.mul_to(rhs, order)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// Solves `T(x) = x psi(T(x))` by Newton iteration; the number of exact
/// coefficients roughly doubles per step. The result has order
/// `psi.order() + 1`.
pub fn newton_solve_tree(psi: &Series) -> Result<Series> {
    if psi.at(0).is_zero() {
        return Err(Error::BadConstantTerm(psi.at(0).clone()));
    }
    let target = psi.order() + 1;
    let mut t = Series::monomial(psi.at(0).clone(), 1, 1);
    let mut known = 1;
    let dpsi = psi.derivative();
    while known < target {
        let next = (2 * known + 1).min(target);
        let t_ext = Series::from_coeffs(t.coeffs.clone(), next);
        // F = T - x psi(T), with F = O(x^{known+1})
        let psi_t = psi.truncate(next - 1).compose(&t_ext.truncate(next - 1))?;
        let f = &t_ext - &psi_t.shift_up(1);
        let f_low = f.shift_down(known + 1)?;
        let m = f_low.order();
        // F' = 1 - x psi'(T), needed only through x^m
        let dpsi_t =
            if m == 0 { Series::zeros(0) } else { dpsi.truncate(m - 1).compose(&t_ext.truncate(m - 1))?.shift_up(1) };
        let denom = &Series::one(m) - &dpsi_t;
        let step = (&f_low * &denom.recip()?).shift_up(known + 1);
        t = &t_ext - &step;
        known = next;
    }
    Ok(t)
}

/// `[s^p] H(T(s))` with `T = s psi(T)`, via `(1/p) [s^{p-1}] H'(s) psi(s)^p`.
pub fn lagrange_invert_coeff(h_prime: &Series, psi: &Series, p: usize) -> Result<Rational> {
    if p == 0 {
        return Err(Error::InvalidArgument("Lagrange inversion needs p >= 1".into()));
    }
    let need = p - 1;
    let have = psi.order().min(h_prime.order());
    if have < need {
        return Err(Error::InsufficientOrder { needed: need, available: have });
    }
    let psi_p = psi.truncate(need).powi(p);
    let prod = &h_prime.truncate(need) * &psi_p;
    Ok(prod.at(need) / int(p as i64))
}
