//! Property checks shared by the proptest suite and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use regasym_core::connected::{f_kj, generic_transfer, shifted_expansion, GrowthScale, TransferMode};
use regasym_core::counts::{connected_from_all, connected_via_log, count_brute, egf};
use regasym_core::laplace::{expand_direct, expand_hadamard, regular_phase, stirling_phase, PhaseAmplitude};
use regasym_core::poly::{gaussian_hadamard, Monomial, SparsePoly};
use regasym_core::rational::{double_factorial, from_bigint, int, rat, Rational};
use regasym_core::regular::{regular_psi, sg_tilde_series, u_pq, u_pq_lagrange};
use regasym_core::series::Series;

pub type Check = Result<(), TestCaseError>;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=9).prop_map(|(p, q)| rat(p, q))
}

/// Series with the given constant term and random higher coefficients.
pub fn series_with_constant(c0: Rational, order: usize) -> impl Strategy<Value = Series> {
    proptest::collection::vec(small_rational(), order).prop_map(move |rest| {
        let mut v = vec![c0.clone()];
        v.extend(rest);
        Series::new(v)
    })
}

pub fn exp_log_inverse(s: &Series) -> Check {
    // s has constant term 0
    let e = s.exp().map_err(err)?;
    prop_assert_eq!(&e.log().map_err(err)?, s);
    let one_plus = &Series::one(s.order()) + s;
    prop_assert_eq!(one_plus.log().map_err(err)?.exp().map_err(err)?, one_plus);
    Ok(())
}

pub fn exp_is_additive(s: &Series, t: &Series) -> Check {
    let lhs = (s + t).exp().map_err(err)?;
    let rhs = &s.exp().map_err(err)? * &t.exp().map_err(err)?;
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn pow_laws(s: &Series, a: &Rational, b: &Rational) -> Check {
    // s has constant term 1
    let pa = s.pow_rational(a).map_err(err)?;
    let pb = s.pow_rational(b).map_err(err)?;
    prop_assert_eq!(&pa * &pb, s.pow_rational(&(a + b)).map_err(err)?);
    prop_assert_eq!(pa.pow_rational(b).map_err(err)?, s.pow_rational(&(a * b)).map_err(err)?);
    prop_assert_eq!(s.pow_rational(&int(3)).map_err(err)?, s.powi(3));
    prop_assert_eq!(s.pow_rational(&int(-1)).map_err(err)?, s.recip().map_err(err)?);
    Ok(())
}

pub fn newton_matches_lagrange(pmax: usize, qmax: usize) -> Check {
    let psi = regular_psi(2 * (pmax + qmax) + 4).map_err(err)?;
    for p in 0..=pmax {
        for q in 0..=qmax {
            let a = u_pq(p, q, &psi).map_err(err)?;
            let b = u_pq_lagrange(p, q, &psi).map_err(err)?;
            prop_assert_eq!(a, b, "p = {}, q = {}", p, q);
        }
    }
    Ok(())
}

pub fn laplace_routes_agree(phi: &Series, phi2: &Rational, amp: &Series, r: usize) -> Check {
    let pa = PhaseAmplitude::new(phi.clone(), amp.clone(), phi2.clone()).map_err(err)?;
    prop_assert_eq!(expand_hadamard(&pa, r).map_err(err)?, expand_direct(&pa, r).map_err(err)?);
    Ok(())
}

/// The two phases of the cross-formula check, to the order `r` needs.
pub fn laplace_phases(r: usize) -> [(Series, Rational); 2] {
    [(stirling_phase(2 * r + 2), int(1)), (regular_phase(2 * r + 2), int(2))]
}

/// Degree at most 6 amplitude, padded to the order `r` needs.
pub fn amplitude(coeffs: &[Rational], r: usize) -> Series {
    Series::from_coeffs(coeffs.to_vec(), 2 * r)
}

/// `A~_j` has valuation at least `ceil(j/2)`; indices with `jk` odd drop out.
pub fn atilde_valuation(k: u32, jmax: usize) -> Check {
    let order = jmax / 2 + 3;
    let atilde = sg_tilde_series(k, order).map_err(err)?;
    let s = regular_stirling(order);
    let atilde = atilde.div(&s).map_err(err)?;
    let scale = GrowthScale::regular_egf(k).map_err(err)?;
    for j in 0..=jmax {
        if (k as usize * j) % 2 == 1 {
            prop_assert!(f_kj(k, j, order).coeffs().iter().all(Zero::is_zero));
            continue;
        }
        let a = shifted_expansion(&atilde, j, &scale, order + j).map_err(err)?;
        prop_assert!(a.valuation() >= j.div_ceil(2), "k = {}, j = {}: valuation {}", k, j, a.valuation());
    }
    Ok(())
}

fn regular_stirling(order: usize) -> Series {
    regasym_core::laplace::stirling_series(order)
}

/// `exp(log(SG(z))) = SG(z)` on enumerated counts, and both connected routes agree.
pub fn egf_round_trip(k: u32, nmax: u32) -> Check {
    let sg: Vec<BigInt> = (0..=nmax).map(|n| count_brute(k, n, nmax)).collect::<Result<_, _>>().map_err(err)?;
    let f = egf(&sg);
    prop_assert_eq!(f.log().map_err(err)?.exp().map_err(err)?, f.clone());
    let a = connected_from_all(&sg);
    let b = connected_via_log(&sg).map_err(err)?;
    prop_assert_eq!(&a, &b);
    let mut c = egf(&a).into_coeffs();
    c[0] = Rational::zero();
    prop_assert_eq!(Series::new(c).exp().map_err(err)?, f);
    Ok(())
}

/// Linear in the polynomial, multiplicative across disjoint variables, and the
/// moment rule on monomials.
pub fn gaussian_rules(p: &SparsePoly, q: &SparsePoly, a0: &Rational, a1: &Rational, c: &Rational) -> Check {
    let alphas: BTreeMap<u16, Rational> = [(0u16, a0.clone()), (1u16, a1.clone())].into_iter().collect();
    let h = |x: &SparsePoly| gaussian_hadamard(x, &alphas).map_err(err);
    prop_assert_eq!(h(&p.add(q))?, h(p)? + h(q)?);
    prop_assert_eq!(h(&p.scale(c))?, h(p)? * c);
    // p uses variable 0 only, q variable 1 only
    prop_assert_eq!(h(&p.mul(q))?, h(p)? * h(q)?);
    for m in 0..5u16 {
        let mono = SparsePoly::term(Monomial::var_pow(0, 2 * m), Rational::one());
        let want =
            from_bigint(double_factorial(2 * m as i64 - 1).map_err(err)?) * num_traits::pow(a0.clone(), m as usize);
        prop_assert_eq!(h(&mono)?, want);
        let odd = SparsePoly::term(Monomial::var_pow(0, 2 * m + 1), Rational::one());
        prop_assert!(h(&odd)?.is_zero());
    }
    Ok(())
}

pub fn univariate(var: u16, coeffs: &[Rational]) -> SparsePoly {
    let mut p = SparsePoly::zero();
    for (d, c) in coeffs.iter().enumerate() {
        p.add_term(Monomial::var_pow(var, d as u16), c.clone());
    }
    p
}

/// A sequence supported on even indices with `b_2m = a_m` transfers like `a`
/// at half the growth exponent: `B~(z) = A~(2z)` and `B~_H(z) = A~_H(2z)`.
pub fn even_transfer_matches_integer(
    atilde: &Series,
    alpha: i64,
    gamma: &Rational,
    rho: &Rational,
    c: &[Rational],
    r: usize,
) -> Check {
    let a_scale = GrowthScale::new(int(alpha), gamma.clone(), rho.clone());
    let lhs = generic_transfer(atilde, &a_scale, c, r, TransferMode::Integer).map_err(err)?;
    let b_scale = GrowthScale {
        alpha: rat(alpha, 2),
        gamma: gamma.clone(),
        rho_rat: int(1),
        rho_sqrt: rho * num_traits::pow(int(2), alpha as usize),
        beta_desc: String::new(),
    };
    let mut c2 = vec![Rational::zero(); 2 * c.len()];
    for (i, ci) in c.iter().enumerate() {
        c2[2 * i] = ci.clone();
    }
    let btilde = atilde.dilate(&int(2));
    let rhs = generic_transfer(&btilde, &b_scale, &c2, r, TransferMode::EvenOnly).map_err(err)?;
    prop_assert_eq!(rhs, lhs.dilate(&int(2)));
    Ok(())
}

pub fn err(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}
