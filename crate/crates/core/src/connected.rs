//! Expansion of the number of connected labeled k-regular graphs through the
//! transfer of divergent series.
//!
//! If `a_n ~ n^(alpha n) beta^n n^gamma A~(1/n)` then
//! `[z^n] H(A(z)) ~ n^(alpha n) beta^n n^gamma A~_H(1/n)` with
//!
//! ```text
//! A~_H(z) = sum_j A~_j(z) [x^j] H'(A(x)),
//! A~_j(z) = rho^j z^(alpha j) (1 - jz)^(gamma - alpha j)
//!           exp(alpha (log(1 - jz) + jz) / z) A~(z / (1 - jz)),
//! rho = e^(-alpha) / beta.
//! ```
//!
//! For `a_n = SG_n / n!` and `H = log`: `alpha = k/2 - 1`, `gamma = -1/2`,
//! `rho = k! / k^(k/2)` and `[x^j] H'(A(x)) = [x^j] 1/SG(x)`. When `k` is odd
//! only even `j` contribute.

use num_traits::{One, Zero};

use crate::counts::{egf_reciprocal_coeffs, CountTable};
use crate::error::{Error, Result};
use crate::laplace::stirling_series;
use crate::par::{self, Exec};
use crate::rational::{factorial, from_bigint, int, pow_int, rat, Rational};
use crate::regular::{sg_tilde_series, Expansion};
use crate::series::Series;

/// Growth scale `n^(alpha n) beta^n n^gamma`. The per-step constant
/// `rho = e^(-alpha) / beta` is stored as `rho_rat * sqrt(rho_sqrt)` so that
/// the half-integral cases stay exact for even steps.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthScale {
    pub alpha: Rational,
    pub gamma: Rational,
    pub rho_rat: Rational,
    pub rho_sqrt: Rational,
    pub beta_desc: String,
}

impl GrowthScale {
    /// Scale with a rational `rho`.
    pub fn new(alpha: Rational, gamma: Rational, rho: Rational) -> Self {
        GrowthScale { alpha, gamma, rho_rat: rho, rho_sqrt: int(1), beta_desc: String::new() }
    }

    /// Scale of `SG_n / n!`: `alpha = k/2 - 1`, `beta = e (k/e)^(k/2) / k!`,
    /// `gamma = -1/2`.
    pub fn regular_egf(k: u32) -> Result<Self> {
        if k < 3 {
            return Err(Error::BadScale(format!("k = {k}: the growth exponent k/2 - 1 must be positive")));
        }
        let kk = k as i64;
        let kf = from_bigint(factorial(k as u64));
        let (rho_rat, rho_sqrt) = if k.is_multiple_of(2) {
            (kf / pow_int(&int(kk), kk / 2), int(1))
        } else {
            (kf / pow_int(&int(kk), (kk - 1) / 2), rat(1, kk))
        };
        Ok(GrowthScale {
            alpha: rat(kk - 2, 2),
            gamma: rat(-1, 2),
            rho_rat,
            rho_sqrt,
            beta_desc: format!("e*({k}/e)^({k}/2)/{k}!"),
        })
    }

    /// `rho^j`, an error when it is irrational.
    pub fn rho_pow(&self, j: usize) -> Result<Rational> {
        let base = pow_int(&self.rho_rat, j as i64);
        if j.is_multiple_of(2) {
            return Ok(base * pow_int(&self.rho_sqrt, (j / 2) as i64));
        }
        match rational_sqrt(&self.rho_sqrt) {
            Some(s) => Ok(base * pow_int(&s, j as i64)),
            None => Err(Error::IrrationalPrefactor { k: 0, j: j as u32 }),
        }
    }

    /// `alpha j` as an integer, if it is one.
    fn shift(&self, j: usize) -> Option<usize> {
        let v = &self.alpha * int(j as i64);
        (v.is_integer() && v >= int(0)).then(|| v.to_integer().try_into().ok()).flatten()
    }

    pub fn is_integral(&self) -> bool {
        self.alpha.is_integer()
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// `A~_j` to order `order`; the result order is also capped by
/// `alpha j + atilde.order()`.
pub fn shifted_expansion(atilde: &Series, j: usize, scale: &GrowthScale, order: usize) -> Result<Series> {
    if j == 0 {
        return Ok(atilde.truncate(order.min(atilde.order())));
    }
    if scale.alpha <= int(0) {
        return Err(Error::BadScale(format!("alpha = {} must be positive", scale.alpha)));
    }
    let v = scale.shift(j).ok_or(Error::IrrationalPrefactor { k: 0, j: j as u32 })?;
    let prefactor = scale.rho_pow(j)?;
    let capped = order.min(v + atilde.order());
    if v > capped {
        return Ok(Series::zeros(capped));
    }
    let m = capped - v;
    let jz = Series::from_coeffs(vec![int(1), int(-(j as i64))], m + 1);
    // (log(1 - jz) + jz) / z has valuation 1
    let mercator = &jz.log()? + &Series::monomial(int(j as i64), 1, m + 1);
    debug_assert!(mercator.valuation() >= 2);
    let expo = mercator.shift_down(1)?.scale(&scale.alpha).exp()?;
    let power = jz.truncate(m).pow_rational(&(&scale.gamma - &scale.alpha * int(j as i64)))?;
    let inner = Series::var(m).div(&jz.truncate(m))?;
    let moved = atilde.truncate(m).compose(&inner)?;
    let body = &(&power * &expo) * &moved;
    Ok(body.scale(&prefactor).shift_up(v))
}

/// `f_{k,j}(z)`: `1` for `j = 0`, `z^((k/2 - 1) j)` when `jk` is even, else 0.
pub fn f_kj(k: u32, j: usize, order: usize) -> Series {
    if j == 0 {
        return Series::one(order);
    }
    if (k as usize * j) % 2 == 1 {
        return Series::zeros(order);
    }
    let v = (k as usize - 2) * j / 2;
    if v > order {
        Series::zeros(order)
    } else {
        Series::monomial(int(1), v, order)
    }
}

/// How the transfer sum is truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Cutoff {
    /// `j <= 2r`.
    #[default]
    Fixed,
    /// Stop once `alpha j > r`.
    Valuation,
}

/// Which indices enter the transfer sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferMode {
    /// `alpha` a positive integer, every `j`.
    Integer,
    /// Only even `j`, for sequences vanishing at odd indices.
    EvenOnly,
}

/// `A~_H` to order `r` from `c_j = [x^j] H'(A(x))`.
pub fn generic_transfer(
    atilde: &Series,
    scale: &GrowthScale,
    hprime_coeffs: &[Rational],
    r: usize,
    mode: TransferMode,
) -> Result<Series> {
    generic_transfer_with(atilde, scale, hprime_coeffs, r, mode, Exec::default())
}

pub fn generic_transfer_with(
    atilde: &Series,
    scale: &GrowthScale,
    hprime_coeffs: &[Rational],
    r: usize,
    mode: TransferMode,
    exec: Exec,
) -> Result<Series> {
    if scale.alpha <= int(0) {
        return Err(Error::BadScale(format!("alpha = {} must be positive", scale.alpha)));
    }
    if mode == TransferMode::Integer && !scale.is_integral() {
        return Err(Error::BadScale(format!("alpha = {} is not an integer", scale.alpha)));
    }
    // alpha j <= r
    let jmax = (int(r as i64) / &scale.alpha).floor().to_integer();
    let jmax: usize = jmax.try_into().unwrap_or(0);
    let js: Vec<usize> = (0..=jmax.min(hprime_coeffs.len().saturating_sub(1)))
        .filter(|&j| mode == TransferMode::Integer || j % 2 == 0)
        .filter(|&j| !hprime_coeffs[j].is_zero())
        .collect();
    let terms =
        par::try_map(exec, &js, |&j| Ok::<_, Error>(shifted_expansion(atilde, j, scale, r)?.scale(&hprime_coeffs[j])))?;
    let mut acc = Series::zeros(r.min(atilde.order()));
    for t in &terms {
        acc = &acc + t;
    }
    Ok(acc)
}

/// Coefficients of the regular-graph transfer sum over `j` in `js`.
fn regular_transfer_sum(
    k: u32,
    atilde: &Series,
    c: &[Rational],
    js: impl Iterator<Item = usize>,
    order: usize,
    exec: Exec,
) -> Result<Series> {
    let scale = GrowthScale::regular_egf(k)?;
    // jk odd: f_{k,j} vanishes, skip before any arithmetic
    let js: Vec<usize> = js.filter(|&j| (k as usize * j).is_multiple_of(2) && !c[j].is_zero()).collect();
    let terms = par::try_map(exec, &js, |&j| {
        shifted_expansion(atilde, j, &scale, order).map_err(|e| match e {
            Error::IrrationalPrefactor { j, .. } => Error::IrrationalPrefactor { k, j },
            e => e,
        })
    })?;
    let mut acc: Option<Series> = None;
    for (t, &j) in terms.iter().zip(&js) {
        let t = t.scale(&c[j]);
        acc = Some(match acc {
            None => t,
            Some(a) => &a + &t,
        });
    }
    Ok(acc.unwrap_or_else(|| Series::zeros(order)))
}

/// `[z^0..z^r]` of the connected expansion for `k >= 3`.
pub fn csg_tilde(k: u32, r: usize, counts: &CountTable) -> Result<Series> {
    csg_tilde_with(k, r, counts, Cutoff::default(), Exec::default())
}

pub fn csg_tilde_with(k: u32, r: usize, counts: &CountTable, cutoff: Cutoff, exec: Exec) -> Result<Series> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("connected expansion needs k >= 3, got {k}")));
    }
    let s = stirling_series(r);
    let sg = sg_tilde_series(k, r)?;
    let atilde = sg.div(&s)?;
    let jmax = match cutoff {
        Cutoff::Fixed => 2 * r,
        Cutoff::Valuation => 2 * r / (k as usize - 2),
    };
    let c = egf_reciprocal_coeffs(k, jmax as u32, counts)?;
    let sum = regular_transfer_sum(k, &atilde, &c, 0..=jmax, r, exec)?;
    Ok(&s * &sum)
}

/// `(k+1)(k-2)/2`, the expected first index where the two expansions differ.
pub fn expected_gap(k: u32) -> usize {
    ((k as usize + 1) * (k as usize - 2)) / 2
}

/// Connected minus all-graphs expansion, to order `r`.
///
/// Equals `S~ sum_{j>=1} A~_j c_j`; the first nonzero `c_j` has `j = k + 1`,
/// so `A~` is only needed to order `r - (k+1)(k-2)/2`.
pub fn csg_minus_sg(k: u32, r: usize, counts: &CountTable) -> Result<Series> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("connected expansion needs k >= 3, got {k}")));
    }
    let lead = expected_gap(k);
    let need = r.saturating_sub(lead);
    let s = stirling_series(r);
    let atilde = sg_tilde_series(k, need)?.div(&s.truncate(need))?;
    let jmax = 2 * r / (k as usize - 2);
    let c = egf_reciprocal_coeffs(k, jmax as u32, counts)?;
    let sum = regular_transfer_sum(k, &atilde, &c, 1..=jmax, r, Exec::default())?;
    if sum.order() < r {
        return Err(Error::InsufficientOrder { needed: r, available: sum.order() });
    }
    Ok(&s * &sum)
}

/// Valuation of the difference between the connected and all-graphs
/// expansions, checked against `(k+1)(k-2)/2`.
pub fn valuation_gap(k: u32, r: usize, counts: &CountTable) -> Result<usize> {
    let expected = expected_gap(k);
    if r < expected {
        return Err(Error::InvalidArgument(format!("order {r} is below the expected gap {expected}")));
    }
    let d = csg_minus_sg(k, r, counts)?;
    let v = d.valuation();
    if v > d.order() {
        return Err(Error::GapMismatch { k, expected, found: None });
    }
    if v != expected {
        return Err(Error::GapMismatch { k, expected, found: Some(v) });
    }
    Ok(v)
}

impl Expansion {
    pub fn connected(k: u32, coeffs: Vec<Rational>, gap_valuation: Option<usize>) -> Self {
        let mut e = Expansion::regular(k, coeffs);
        e.kind = "csg";
        e.gap_valuation = gap_valuation;
        e
    }
}

impl Default for GrowthScale {
    fn default() -> Self {
        GrowthScale::new(Rational::one(), Rational::zero(), Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::{count_dp_range, CountKind, Provenance};

    fn table(k: u32, nmax: u32) -> CountTable {
        let mut t = CountTable::new(CountKind::All);
        for (n, v) in count_dp_range(k, nmax).into_iter().enumerate() {
            t.insert(k, n as u32, v, Provenance::Dp).unwrap();
        }
        t
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_kj(4, 1, 3), Series::monomial(int(1), 1, 3));
        assert_eq!(f_kj(3, 3, 3), Series::zeros(3));
        assert_eq!(f_kj(3, 4, 3), Series::monomial(int(1), 2, 3));
        assert_eq!(f_kj(5, 0, 2), Series::one(2));
    }

    #[test]
    fn prefactor_is_rational_for_even_steps() {
        let s = GrowthScale::regular_egf(3).unwrap();
        assert_eq!(s.rho_pow(4).unwrap(), rat(16, 9));
        assert_eq!(s.rho_pow(2).unwrap(), rat(4, 3));
        assert!(matches!(s.rho_pow(1), Err(Error::IrrationalPrefactor { .. })));
        let s = GrowthScale::regular_egf(4).unwrap();
        assert_eq!(s.rho_pow(1).unwrap(), rat(24, 16));
    }

    #[test]
    fn shift_zero_is_identity() {
        let a = Series::new(vec![int(2), rat(-1, 3), rat(5, 7), int(1)]);
        let s = GrowthScale::regular_egf(4).unwrap();
        assert_eq!(shifted_expansion(&a, 0, &s, 3).unwrap(), a);
        let mercator = &Series::from_coeffs(vec![int(1), int(-1)], 4).log().unwrap() + &Series::var(4);
        assert_eq!(mercator.coeffs(), &[int(0), int(0), rat(-1, 2), rat(-1, 3), rat(-1, 4)]);
    }

    #[test]
    fn identity_hprime_returns_input() {
        let a = Series::new(vec![int(1), int(2), int(3)]);
        let s = GrowthScale::new(int(1), rat(-1, 2), int(2));
        let out = generic_transfer(&a, &s, &[int(1), int(0), int(0)], 2, TransferMode::Integer).unwrap();
        assert_eq!(out, a);
        assert!(matches!(
            generic_transfer(&a, &GrowthScale::new(int(0), int(0), int(1)), &[int(1)], 2, TransferMode::Integer),
            Err(Error::BadScale(_))
        ));
    }

    #[test]
    fn connected_k3() {
        let t = table(3, 10);
        let c = csg_tilde(3, 2, &t).unwrap();
        assert_eq!(c.coeffs(), &[int(2), rat(-71, 18), rat(-335, 1296)]);
        let d = csg_tilde_with(3, 2, &t, Cutoff::Valuation, Exec::Sequential).unwrap();
        assert_eq!(c, d);
        assert_eq!(valuation_gap(3, 2, &t).unwrap(), 2);
        assert_eq!(csg_minus_sg(3, 2, &t).unwrap().at(2), &rat(-4, 27));
    }
}
