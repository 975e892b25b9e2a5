//! Sparse multivariate polynomials and truncated series whose coefficients
//! are such polynomials.
//!
//! Variables are small integer indices. A [`Monomial`] stores only the
//! variables with a positive exponent, sorted by index.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::rational::{double_factorial, from_bigint, int, pow_int, Coeff, Rational};

pub type Var = u16;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(SmallVec<[(Var, u16); 6]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u16) -> Self {
        let mut m = SmallVec::new();
        if e > 0 {
            m.push((v, e));
        }
        Monomial(m)
    }

    /// Builds a monomial from arbitrary `(var, exponent)` pairs; repeated
    /// variables are merged and zero exponents dropped.
    pub fn from_pairs(pairs: &[(Var, u16)]) -> Self {
        let mut map: BTreeMap<Var, u16> = BTreeMap::new();
        for &(v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    /// `sum_v weight(v) * e_v`.
    pub fn weighted_degree(&self, weight: impl Fn(Var) -> u32) -> u32 {
        self.0.iter().map(|&(v, e)| weight(v) * e as u32).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, u16)> + '_ {
        self.0.iter().copied()
    }

    /// Removes `v` and returns its former exponent.
    pub fn without(&self, v: Var) -> (Monomial, u16) {
        let e = self.exponent(v);
        (Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect()), e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.0.iter().map(|&(v, e)| if e == 1 { format!("x{v}") } else { format!("x{v}^{e}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial: monomial -> nonzero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePoly<C: Coeff = Rational> {
    terms: HashMap<Monomial, C>,
}

impl<C: Coeff> Default for SparsePoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> SparsePoly<C> {
    pub fn zero() -> Self {
        SparsePoly { terms: HashMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), C::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    /// Terms in monomial order, for deterministic output.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.scale(factor));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg_ref());
        }
        out
    }

    pub fn neg(&self) -> Self {
        SparsePoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg_ref())).collect() }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        SparsePoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(q))).collect() }
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul_ref(k));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_filtered(other, |_| true)
    }

    /// Product keeping only the monomials accepted by `keep`.
    pub fn mul_filtered(&self, other: &Self, keep: impl Fn(&Monomial) -> bool) -> Self {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut out = Self::zero();
        for (m1, c1) in &small.terms {
            for (m2, c2) in &large.terms {
                let m = m1.mul(m2);
                if keep(&m) {
                    out.add_term(m, c1.mul_ref(c2));
                }
            }
        }
        out
    }

    /// `self^n` by binary exponentiation, pruning monomials rejected by `keep`
    /// after every product.
    pub fn pow_filtered(&self, mut n: u32, keep: impl Fn(&Monomial) -> bool + Copy) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_filtered(&base, keep);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_filtered(&base, keep);
            }
        }
        acc
    }

    pub fn pow(&self, n: u32) -> Self {
        self.pow_filtered(n, |_| true)
    }

    /// Rewrites every term through `f`, which returns the new monomial and a
    /// rational factor, or `None` to drop the term.
    pub fn map_terms(&self, f: impl Fn(&Monomial) -> Option<(Monomial, Rational)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((m2, q)) = f(m) {
                out.add_term(m2, c.scale(&q));
            }
        }
        out
    }

    pub fn retain(&mut self, keep: impl Fn(&Monomial) -> bool) {
        self.terms.retain(|m, _| keep(m));
    }

    pub fn max_var(&self) -> Option<Var> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v)).max()
    }
}

impl SparsePoly<Rational> {
    /// Evaluates at a rational point; unlisted variables are an error.
    pub fn eval(&self, point: &BTreeMap<Var, Rational>) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.iter() {
                let x = point.get(&v).ok_or(Error::MissingWeight(v))?;
                t *= pow_int(x, e as i64);
            }
            acc += t;
        }
        Ok(acc)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for SparsePoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.sorted_terms().into_iter().map(|(m, c)| format!("({c})*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Gaussian-moment evaluation `exp(sum_j alpha_j x_j^2 / 2) (.)_{x=1} P`.
///
/// Each monomial `prod x_j^{e_j}` maps to `prod alpha_j^{e_j/2} (e_j - 1)!!`
/// when every `e_j` is even and to zero otherwise. Negative weights are
/// allowed; the rule is applied formally.
pub fn gaussian_hadamard<C: Coeff>(p: &SparsePoly<C>, alphas: &BTreeMap<Var, Rational>) -> Result<C> {
    let mut moments: HashMap<(Var, u16), Rational> = HashMap::new();
    let mut acc = C::zero();
    for (m, c) in p.terms() {
        if m.iter().any(|(_, e)| e % 2 == 1) {
            // still insist on known weights so typos surface
            for (v, _) in m.iter() {
                if !alphas.contains_key(&v) {
                    return Err(Error::MissingWeight(v));
                }
            }
            continue;
        }
        let mut w = Rational::from_integer(1.into());
        for (v, e) in m.iter() {
            let alpha = alphas.get(&v).ok_or(Error::MissingWeight(v))?;
            let mom = match moments.get(&(v, e)) {
                Some(x) => x.clone(),
                None => {
                    let x = from_bigint(double_factorial(e as i64 - 1)?) * pow_int(alpha, (e / 2) as i64);
                    moments.insert((v, e), x.clone());
                    x
                }
            };
            w *= mom;
        }
        acc.add_assign_ref(&c.scale(&w));
    }
    Ok(acc)
}

/// Truncated series in a distinguished variable `s` with [`SparsePoly`]
/// coefficients. Same truncation semantics as [`crate::series::Series`].
#[derive(Clone, Debug, PartialEq)]
pub struct PolySeries<C: Coeff = Rational> {
    coeffs: Vec<SparsePoly<C>>,
}

impl<C: Coeff> PolySeries<C> {
    pub fn new(coeffs: Vec<SparsePoly<C>>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one known coefficient");
        PolySeries { coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        PolySeries { coeffs: vec![SparsePoly::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = SparsePoly::one();
        s
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> SparsePoly<C>) -> Self {
        PolySeries { coeffs: (0..=order).map(f).collect() }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &SparsePoly<C> {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[SparsePoly<C>] {
        &self.coeffs
    }

    pub fn coeff_mut(&mut self, i: usize) -> &mut SparsePoly<C> {
        &mut self.coeffs[i]
    }

    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.coeffs.len())
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order());
        PolySeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |i| self.coeffs[i].add(&other.coeffs[i]))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |i| self.coeffs[i].sub(&other.coeffs[i]))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        PolySeries { coeffs: self.coeffs.iter().map(|c| c.scale(q)).collect() }
    }

    /// Multiplies every coefficient by the polynomial `p`.
    pub fn mul_poly(&self, p: &SparsePoly<C>) -> Self {
        PolySeries { coeffs: self.coeffs.iter().map(|c| c.mul(p)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_with(other, Exec::Sequential)
    }

    /// Product; with [`Exec::Parallel`] the output coefficients are computed
    /// concurrently.
    pub fn mul_with(&self, other: &Self, exec: Exec) -> Self {
        let order = self.order().min(other.order());
        let coeffs = par::map_range(exec, 0..order + 1, |n| {
            let mut acc = SparsePoly::zero();
            for i in 0..=n {
                let (a, b) = (&self.coeffs[i], &other.coeffs[n - i]);
                if !a.is_zero() && !b.is_zero() {
                    acc.add_assign(&a.mul(b));
                }
            }
            acc
        });
        PolySeries { coeffs }
    }

    pub fn shift_up(&self, m: usize) -> Self {
        let mut coeffs = vec![SparsePoly::zero(); m];
        coeffs.extend(self.coeffs.iter().cloned());
        PolySeries { coeffs }
    }

    /// Divides by `s^m`; the first `m` coefficients must vanish.
    pub fn shift_down(&self, m: usize) -> Result<Self> {
        let v = self.valuation();
        if v < m {
            return Err(Error::ValuationViolation { expected: m, found: v });
        }
        if m > self.order() {
            return Err(Error::InsufficientOrder { needed: m, available: self.order() });
        }
        Ok(PolySeries { coeffs: self.coeffs[m..].to_vec() })
    }

    /// `exp(a)`; the `s^0` coefficient must be the zero polynomial.
    pub fn exp(&self) -> Result<Self> {
        self.exp_with(Exec::Sequential)
    }

    pub fn exp_with(&self, exec: Exec) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument("exp of a polynomial series needs a zero constant coefficient".into()));
        }
        let n = self.order();
        let mut e: Vec<SparsePoly<C>> = Vec::with_capacity(n + 1);
        e.push(SparsePoly::one());
        for m in 1..=n {
            let parts = par::map_range(exec, 1..m + 1, |k| {
                if self.coeffs[k].is_zero() || e[m - k].is_zero() {
                    SparsePoly::zero()
                } else {
                    self.coeffs[k].mul(&e[m - k]).scale(&(int(k as i64) / int(m as i64)))
                }
            });
            let mut acc = SparsePoly::zero();
            for p in &parts {
                acc.add_assign(p);
            }
            e.push(acc);
        }
        Ok(PolySeries { coeffs: e })
    }

    /// `log(1 + b)` for `b` with zero constant coefficient.
    pub fn log1p(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument("log(1 + b) needs b with a zero constant coefficient".into()));
        }
        let n = self.order();
        let mut l: Vec<SparsePoly<C>> = Vec::with_capacity(n + 1);
        l.push(SparsePoly::zero());
        for m in 1..=n {
            let mut acc = self.coeffs[m].clone();
            for k in 1..m {
                if !l[k].is_zero() && !self.coeffs[m - k].is_zero() {
                    acc.add_scaled(&l[k].mul(&self.coeffs[m - k]), &(int(-(k as i64)) / int(m as i64)));
                }
            }
            l.push(acc);
        }
        Ok(PolySeries { coeffs: l })
    }

    /// `log(a)` for `a` whose constant coefficient is the polynomial 1.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != SparsePoly::one() {
            return Err(Error::InvalidArgument("log needs constant coefficient 1".into()));
        }
        let mut b = self.clone();
        b.coeffs[0] = SparsePoly::zero();
        b.log1p()
    }

    /// `a^e = exp(e log a)` for `a` with constant coefficient 1.
    pub fn pow_rational(&self, e: &Rational) -> Result<Self> {
        self.log()?.scale(e).exp()
    }

    pub fn map_coeffs(&self, f: impl Fn(&SparsePoly<C>) -> SparsePoly<C>) -> Self {
        PolySeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn into_coeffs(self) -> Vec<SparsePoly<C>> {
        self.coeffs
    }
}

impl PolySeries<Rational> {
    /// Embeds a univariate series `sum a_m x^m` as `sum a_m v^m s^m`, i.e.
    /// evaluates it at `s * v`.
    pub fn from_series_scaled(series: &crate::series::Series, v: Var) -> Self {
        Self::from_fn(series.order(), |m| SparsePoly::term(Monomial::var_pow(v, m as u16), series.at(m).clone()))
    }
}
