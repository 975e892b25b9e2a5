//! Asymptotic expansion of the number of labeled k-regular graphs,
//!
//! ```text
//! SG_n ~ (nk/e)^(nk/2) / k!^n * exp(-(k^2-1)/4) / sqrt(2) * SG~(1/n),
//! ```
//!
//! with exact rational coefficients of `SG~`.
//!
//! Pipeline for a fixed `k` and target order `r` (all series in `s` to
//! order `2r + 2`, auxiliary variables `u = x0` and `t_1..t_{2r+2} = x1..`):
//! 1. `psi` from the phase `t^2/2 + t - log(1+t)`, the tree function
//!    `T = x psi(T)`, and `u_{p,q} = [s^p] (1+T(s))^(-q)`;
//! 2. `v_{p,q} = [z^p] (sum_{j>=2} t_j z^(j-1))^q / sqrt(1 - z^2)`;
//! 3. the rows `B_{0,j}` combining both;
//! 4. `C1 = exp((k(k-1)u^2 s^2 t_2 (1+T(s t_1))^-2 - log(1 + B_0)) / s^2
//!    + (k-1)^2/4 (1+T(s t_1))^-4 + (2k^2u^2 - k + 1)(k-1)/4)`;
//! 5. `C2 = (C1(-1/sqrt k) + C1(1/sqrt k)) T'(s t_1)`, formed by doubling the
//!    even part in `u` and substituting `u^2 = 1/k`;
//! 6. `[z^r] SG~ = (-1)^r` times the Gaussian moment evaluation of
//!    `[s^(2r)] C2` with weights `-1/(2k)` on `t_1` and `-1/j` on `t_j`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laplace::{psi_from_phase, regular_phase, PhaseAmplitude};
use crate::par::{self, Exec};
use crate::poly::{gaussian_hadamard, Monomial, PolySeries, SparsePoly, Var};
use crate::rational::{factorial, falling_factorial, from_bigint, int, pow_int, rat, Rational};
use crate::series::{lagrange_invert_coeff, newton_solve_tree, Series};

pub const U: Var = 0;

/// `psi(t) = (1 + (log(1/(1+t)) + t - t^2/2) / t^2)^(-1/2)` to `order`.
pub fn regular_psi(order: usize) -> Result<Series> {
    let pa = PhaseAmplitude::new(regular_phase(order + 2), Series::one(order), int(2))?;
    psi_from_phase(&pa)
}

/// Tree function `T = x psi(T)` to `order` (>= 1).
pub fn tree_series(order: usize) -> Result<Series> {
    if order == 0 {
        return Ok(Series::zeros(0));
    }
    newton_solve_tree(&regular_psi(order - 1)?)
}

/// `[s^p] (1 + T(s))^(-q)` by composing with the tree function.
pub fn u_pq(p: usize, q: usize, psi: &Series) -> Result<Rational> {
    if psi.order() + 1 < p {
        return Err(Error::InsufficientOrder { needed: p.saturating_sub(1), available: psi.order() });
    }
    if p == 0 {
        return Ok(int(1));
    }
    let t = newton_solve_tree(&psi.truncate(p - 1))?;
    let one_plus_t = &Series::one(p) + &t;
    Ok(one_plus_t.pow_rational(&-int(q as i64))?.at(p).clone())
}

/// `[s^p] (1 + T(s))^(-q) = -(q/p) [s^(p-1)] psi(s)^p / (1+s)^(q+1)`.
pub fn u_pq_lagrange(p: usize, q: usize, psi: &Series) -> Result<Rational> {
    if p == 0 {
        return Ok(int(1));
    }
    let base = Series::from_coeffs(vec![int(1), int(1)], p - 1);
    let h_prime = base.pow_rational(&-int(q as i64 + 1))?.scale(&-int(q as i64));
    lagrange_invert_coeff(&h_prime, psi, p)
}

/// `(1 - z^2)^(-1/2)` coefficients to `order`.
fn inv_sqrt_one_minus_sq(order: usize) -> Vec<Rational> {
    (0..=order)
        .map(|m| {
            if m % 2 == 1 {
                Rational::zero()
            } else {
                let h = (m / 2) as u64;
                from_bigint(crate::rational::binomial(2 * h, h)) / from_bigint(BigInt::from(4).pow(h as u32))
            }
        })
        .collect()
}

/// `v_{p,q}` as a polynomial in `t_2, t_3, ...` (variables `2, 3, ...`),
/// restricted to `t_j` with `j <= tmax`.
pub fn v_pq(p: usize, q: usize, tmax: usize) -> SparsePoly {
    VTable::new(p, q, tmax).get(p, q).clone()
}

/// All `v_{p,q}` for `p <= pmax`, `q <= qmax`.
struct VTable {
    rows: Vec<Vec<SparsePoly>>,
}

impl VTable {
    fn new(pmax: usize, qmax: usize, tmax: usize) -> Self {
        let sq = inv_sqrt_one_minus_sq(pmax);
        let base = PolySeries::from_fn(pmax, |i| {
            let j = i + 1;
            if i >= 1 && j <= tmax {
                SparsePoly::var(j as Var)
            } else {
                SparsePoly::zero()
            }
        });
        let mut power = PolySeries::one(pmax);
        let mut rows = vec![vec![SparsePoly::zero(); qmax + 1]; pmax + 1];
        for q in 0..=qmax {
            for p in 0..=pmax {
                let mut acc = SparsePoly::zero();
                for i in 0..=p {
                    if !power.coeff(i).is_zero() && !sq[p - i].is_zero() {
                        acc.add_scaled(power.coeff(i), &sq[p - i]);
                    }
                }
                rows[p][q] = acc;
            }
            power = power.mul(&base);
        }
        VTable { rows }
    }

    fn get(&self, p: usize, q: usize) -> &SparsePoly {
        &self.rows[p][q]
    }
}

/// Shared univariate data for one truncation order.
struct Ingredients {
    n: usize,
    t: Series,
    inv_pow: HashMap<usize, Series>,
    v: VTable,
}

impl Ingredients {
    fn new(n: usize) -> Result<Self> {
        let t = tree_series(n + 1)?;
        let one_plus_t = &Series::one(n) + &t.truncate(n);
        let mut inv_pow = HashMap::new();
        let inv1 = one_plus_t.recip()?;
        let mut cur = Series::one(n);
        for q in 0..=3 * n {
            inv_pow.insert(q, cur.clone());
            cur = &cur * &inv1;
        }
        Ok(Ingredients { n, t, inv_pow, v: VTable::new(n, n, n) })
    }

    fn u(&self, p: usize, q: usize) -> &Rational {
        self.inv_pow[&q].at(p)
    }
}

/// `B_{0,j}` as a polynomial in `u` (variable 0) and `t_1..` (variables `1..`).
///
/// The falling factorial `k (k-1) ... (k - a - b - l + 1)` removes every term
/// with `a + b + l > k`.
fn b0_row_with(k: u32, j: usize, ing: &Ingredients) -> SparsePoly {
    let half_km1 = rat(k as i64 - 1, 2);
    let mut acc = SparsePoly::zero();
    for l in 1..=j {
        for a in 0..=l {
            for b in 0..=j.saturating_sub(a + l) {
                let s = a + b + l;
                if s > j {
                    continue;
                }
                let ff = falling_factorial(k as i64, s as u64);
                if ff.is_zero() {
                    continue;
                }
                let u = ing.u(j - s, 3 * a + b + l);
                if u.is_zero() {
                    continue;
                }
                let v = ing.v.get(l - a, b);
                if v.is_zero() {
                    continue;
                }
                let c = from_bigint(ff) / from_bigint(factorial(a as u64) * factorial(b as u64))
                    * pow_int(&half_km1, a as i64)
                    * u;
                let m = Monomial::from_pairs(&[(U, s as u16), (1, (j - s) as u16)]);
                acc.add_assign(&v.mul(&SparsePoly::term(m, c)));
            }
        }
    }
    acc
}

/// `B_{0,j}(u, t)` for the given `k`, built with series to order `max(j, 2)`.
pub fn b0_row(k: u32, j: usize) -> Result<SparsePoly> {
    let ing = Ingredients::new(j.max(2))?;
    Ok(b0_row_with(k, j, &ing))
}

/// Whether to drop monomials that the final moment rule sends to zero as
/// soon as their parity is settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Pruning {
    #[default]
    OddMoments,
    None,
}

/// `C2(s, t)` to order `2r` in `s`.
pub fn c2_series(k: u32, r: usize) -> Result<PolySeries> {
    c2_series_with(k, r, Exec::default(), Pruning::default())
}

pub fn c2_series_with(k: u32, r: usize, exec: Exec, pruning: Pruning) -> Result<PolySeries> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    let n = 2 * r + 2;
    let ing = Ingredients::new(n)?;
    debug_assert_eq!(ing.n, n);

    let rows = par::map_range(exec, 0..n + 1, |j| if j == 0 { SparsePoly::zero() } else { b0_row_with(k, j, &ing) });
    let b0 = PolySeries::new(rows);
    let log_b0 = b0.log1p()?;

    let kk = k as i64;
    let inv2 = PolySeries::from_series_scaled(&ing.inv_pow[&2], 1);
    let inv4 = PolySeries::from_series_scaled(&ing.inv_pow[&4], 1);
    let lead = SparsePoly::term(Monomial::from_pairs(&[(U, 2), (2, 1)]), int(kk * (kk - 1)));
    let numer = inv2.mul_poly(&lead).shift_up(2).truncate(n).sub(&log_b0);
    let mut expo = numer.shift_down(2)?;
    expo = expo.add(&inv4.truncate(n - 2).scale(&rat((kk - 1) * (kk - 1), 4)));
    let mut c0 = SparsePoly::term(Monomial::var_pow(U, 2), rat(2 * kk * kk * (kk - 1), 4));
    c0.add_term(Monomial::one(), rat(-(kk - 1) * (kk - 1), 4));
    expo.coeff_mut(0).add_assign(&c0);
    if !expo.coeff(0).is_zero() {
        return Err(Error::ValuationViolation { expected: 1, found: 0 });
    }

    let c1 = expo.exp_with(exec)?;
    let inv_k = rat(1, kk);
    let mut even = c1.map_coeffs(|p| {
        p.map_terms(|m| {
            let (rest, e) = m.without(U);
            (e % 2 == 0).then(|| (rest, int(2) * pow_int(&inv_k, (e / 2) as i64)))
        })
    });
    if pruning == Pruning::OddMoments {
        even = even.map_coeffs(|p| {
            let mut p = p.clone();
            p.retain(|m| m.iter().all(|(v, e)| v == 1 || e % 2 == 0));
            p
        });
    }
    let dt = PolySeries::from_series_scaled(&ing.t.derivative().truncate(n - 2), 1);
    let mut c2 = even.mul_with(&dt, exec);
    if pruning == Pruning::OddMoments {
        c2 = c2.map_coeffs(|p| {
            let mut p = p.clone();
            p.retain(|m| m.exponent(1) % 2 == 0);
            p
        });
    }
    Ok(c2)
}

fn moment_weights(k: u32, tmax: usize) -> BTreeMap<Var, Rational> {
    let mut w = BTreeMap::new();
    w.insert(1, rat(-1, 2 * k as i64));
    for j in 2..=tmax {
        w.insert(j as Var, rat(-1, j as i64));
    }
    w
}

/// `[z^0..z^r] SG~` for a fixed `k >= 2`.
pub fn sg_tilde_series(k: u32, r: usize) -> Result<Series> {
    sg_tilde_series_with(k, r, Exec::default(), Pruning::default())
}

pub fn sg_tilde_series_with(k: u32, r: usize, exec: Exec, pruning: Pruning) -> Result<Series> {
    let c2 = c2_series_with(k, r, exec, pruning)?;
    let w = moment_weights(k, 2 * r + 2);
    let mut out = Vec::with_capacity(r + 1);
    for l in 0..=r {
        let v = gaussian_hadamard(c2.coeff(2 * l), &w)?;
        out.push(if l % 2 == 1 { -v } else { v });
    }
    Ok(Series::new(out))
}

/// `[z^r] SG~` for a fixed `k >= 2`.
pub fn sg_tilde_coeff(k: u32, r: usize) -> Result<Rational> {
    Ok(sg_tilde_series(k, r)?.at(r).clone())
}

/// Prefactor `n^(alpha n) beta^n n^gamma` times constants, described exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Prefactor {
    pub alpha: Rational,
    pub gamma: Rational,
    pub description: String,
}

/// Asymptotic expansion: prefactor plus the coefficients of a series in `1/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub kind: &'static str,
    pub k: u32,
    pub prefactor: Prefactor,
    pub coeffs: Vec<Rational>,
    pub gap_valuation: Option<usize>,
}

impl Expansion {
    pub fn regular(k: u32, coeffs: Vec<Rational>) -> Self {
        Expansion {
            kind: "sg",
            k,
            prefactor: Prefactor {
                alpha: rat(k as i64, 2),
                gamma: int(0),
                description: format!("(n*{k}/e)^(n*{k}/2) / {k}!^n * exp(-({k}^2-1)/4) / sqrt(2)"),
            },
            coeffs,
            gap_valuation: None,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn plain(&self) -> String {
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("k,r,coefficient\n");
        for (r, c) in self.coeffs.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", self.k, r, c));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(r, c)| json!({"k": self.k, "r": r, "coefficient": c.to_string()}))
            .collect();
        let mut v = json!({
            "kind": self.kind,
            "k": self.k,
            "alpha": self.prefactor.alpha.to_string(),
            "gamma": self.prefactor.gamma.to_string(),
            "prefactor": self.prefactor.description,
            "coefficients": coeffs,
        });
        if let Some(g) = self.gap_valuation {
            v["gap_valuation"] = json!(g);
        }
        v
    }
}

/// Numerator of `[z^r] SG~ = P_r(k) / k^r`, valid for `k >= 2r + 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalKPolynomial {
    pub r: usize,
    /// Coefficients of `P_r` in increasing powers of `k`.
    pub numerator: Vec<Rational>,
    pub sample_ks: Vec<u32>,
    pub check_ks: Vec<u32>,
}

impl FormalKPolynomial {
    pub fn eval_numerator(&self, k: &Rational) -> Rational {
        self.numerator.iter().rev().fold(Rational::zero(), |acc, c| acc * k + c)
    }

    pub fn eval(&self, k: u32) -> Rational {
        let kk = int(k as i64);
        self.eval_numerator(&kk) / pow_int(&kk, self.r as i64)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "poly": self.numerator.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "denom_power": self.r,
        })
    }

    /// Human-readable `(...)/k^r`.
    pub fn pretty(&self) -> String {
        let mut terms = Vec::new();
        for (d, c) in self.numerator.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match d {
                0 => String::new(),
                1 => "k".into(),
                _ => format!("k^{d}"),
            };
            let body = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono
            } else if *c == -Rational::one() {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
            };
            terms.push(body);
        }
        let num = if terms.is_empty() { "0".into() } else { terms.join(" + ").replace("+ -", "- ") };
        if self.r == 0 {
            num
        } else {
            format!("({num}) / k^{}", self.r)
        }
    }
}

/// Polynomial through `(x_i, y_i)`, coefficients in increasing degree.
pub fn interpolate(points: &[(Rational, Rational)]) -> Vec<Rational> {
    let n = points.len();
    let mut dd: Vec<Rational> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&points[i].0 - &points[i - level].0);
        }
    }
    // expand the Newton form
    let mut poly = vec![Rational::zero(); n.max(1)];
    for i in (0..n).rev() {
        // poly = poly * (x - x_i) + dd[i]
        let xi = &points[i].0;
        let mut next = vec![Rational::zero(); n.max(1)];
        for d in 0..n {
            if poly[d].is_zero() {
                continue;
            }
            if d + 1 < n {
                next[d + 1] += &poly[d];
            }
            next[d] -= &poly[d] * xi;
        }
        next[0] += &dd[i];
        poly = next;
    }
    while poly.len() > 1 && poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    poly
}

/// Recovers `P_r` from `4r + 1` samples at `k = 2r+2, ...` and checks two
/// further values of `k`.
pub fn formal_k_interpolate(r: usize) -> Result<FormalKPolynomial> {
    formal_k_interpolate_with(r, Exec::default())
}

pub fn formal_k_interpolate_with(r: usize, exec: Exec) -> Result<FormalKPolynomial> {
    let kmin = (2 * r + 2) as u32;
    let samples = 4 * r as u32 + 1;
    let ks: Vec<u32> = (kmin..kmin + samples + 2).collect();
    // inner parallelism would only oversubscribe here
    let inner = Exec::Sequential;
    let values = par::try_map(exec, &ks, |&k| {
        let c = sg_tilde_series_with(k, r, inner, Pruning::OddMoments)?;
        Ok::<_, Error>(c.at(r) * pow_int(&int(k as i64), r as i64))
    })?;
    let pts: Vec<(Rational, Rational)> =
        ks[..samples as usize].iter().zip(&values).map(|(&k, v)| (int(k as i64), v.clone())).collect();
    let poly = FormalKPolynomial {
        r,
        numerator: interpolate(&pts),
        sample_ks: ks[..samples as usize].to_vec(),
        check_ks: ks[samples as usize..].to_vec(),
    };
    for (i, &k) in ks.iter().enumerate().skip(samples as usize) {
        if poly.eval_numerator(&int(k as i64)) != values[i] {
            return Err(Error::DegreeOverflow { k });
        }
    }
    Ok(poly)
}
