//! Laplace-method coefficient engine.
//!
//! For a centred phase `phi` (`phi(0) = phi'(0) = 0`, `phi''(0) != 0`) and an
//! amplitude `A`, the expansion of `int A(t) exp(-n phi(t)) dt` around the
//! minimum is described by the series
//!
//! ```text
//! F(z) = exp(z x^2 / (2 phi''(0))) (.)_{x=1} A(T(x)) T'(x),   T = x psi(T),
//! psi(t) = (phi(t) / (phi''(0) t^2 / 2))^(-1/2).
//! ```
//!
//! Two routes are provided: through the tree function `T` and the Gaussian
//! moment rule, and through the closed coefficient formula
//! `[z^l] F = (2l-1)!! / phi''(0)^l [t^(2l)] A psi^(2l+1)`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{gaussian_hadamard, Monomial, SparsePoly};
use crate::rational::{double_factorial, from_bigint, int, pow_int, rat, Rational};
use crate::series::{newton_solve_tree, Series};

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseAmplitude {
    phi: Series,
    amp: Series,
    phi2: Rational,
}

impl PhaseAmplitude {
    /// `phi` must already be centred; `phi2` must equal `2 [t^2] phi`.
    pub fn new(phi: Series, amp: Series, phi2: Rational) -> Result<Self> {
        if phi.order() < 2 {
            return Err(Error::InsufficientOrder { needed: 2, available: phi.order() });
        }
        if !phi.at(0).is_zero() || !phi.at(1).is_zero() {
            return Err(Error::BadPhase(format!(
                "phase must start at t^2, got constant {} and linear {}",
                phi.at(0),
                phi.at(1)
            )));
        }
        if phi.at(2).is_zero() {
            return Err(Error::DegeneratePhase);
        }
        if phi2 != phi.at(2) * int(2) {
            return Err(Error::BadPhase(format!(
                "second derivative {} disagrees with 2 [t^2] phi = {}",
                phi2,
                phi.at(2) * int(2)
            )));
        }
        Ok(PhaseAmplitude { phi, amp, phi2 })
    }

    pub fn phi(&self) -> &Series {
        &self.phi
    }

    pub fn amp(&self) -> &Series {
        &self.amp
    }

    pub fn phi2(&self) -> &Rational {
        &self.phi2
    }

    /// Largest `r` both routes can serve.
    pub fn max_order(&self) -> usize {
        let by_phi = (self.phi.order() - 2) / 2;
        by_phi.min(self.amp.order() / 2)
    }

    fn check_order(&self, r: usize) -> Result<()> {
        if self.phi.order() < 2 * r + 2 {
            return Err(Error::InsufficientOrder { needed: 2 * r + 2, available: self.phi.order() });
        }
        if self.amp.order() < 2 * r {
            return Err(Error::InsufficientOrder { needed: 2 * r, available: self.amp.order() });
        }
        Ok(())
    }
}

/// `t - log(1 + t)` to the given order.
pub fn stirling_phase(order: usize) -> Series {
    Series::from_fn(order, |m| match m {
        0 | 1 => Rational::zero(),
        _ => {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            rat(sign, m as i64)
        }
    })
}

/// `t^2/2 + t - log(1 + t)` to the given order; the phase behind regular graphs.
pub fn regular_phase(order: usize) -> Series {
    let mut phi = stirling_phase(order).into_coeffs();
    if order >= 2 {
        phi[2] += rat(1, 2);
    }
    Series::new(phi)
}

/// Series of coefficients `[z^0..z^r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceExpansion {
    pub coeffs: Vec<Rational>,
}

impl LaplaceExpansion {
    pub fn to_series(&self) -> Series {
        Series::new(self.coeffs.clone())
    }
}

/// `psi(t) = (phi(t) / (phi''(0) t^2 / 2))^(-1/2)`, to order `phi.order - 2`.
pub fn psi_from_phase(pa: &PhaseAmplitude) -> Result<Series> {
    let quotient = pa.phi.shift_down(2)?.scale(&(int(2) / &pa.phi2));
    quotient.pow_rational(&rat(-1, 2))
}

/// Coefficients through the tree function and the Gaussian moment rule.
pub fn expand_hadamard(pa: &PhaseAmplitude, r: usize) -> Result<LaplaceExpansion> {
    pa.check_order(r)?;
    let psi = psi_from_phase(pa)?.truncate(2 * r);
    let t = newton_solve_tree(&psi)?;
    let dt = t.derivative();
    let f = &pa.amp.truncate(2 * r).compose(&t.truncate(2 * r))? * &dt;
    let alpha: BTreeMap<u16, Rational> = [(0u16, pa.phi2.recip())].into_iter().collect();
    let mut coeffs = Vec::with_capacity(r + 1);
    for l in 0..=r {
        let p = SparsePoly::term(Monomial::var_pow(0, 2 * l as u16), f.at(2 * l).clone());
        coeffs.push(gaussian_hadamard(&p, &alpha)?);
    }
    Ok(LaplaceExpansion { coeffs })
}

/// Coefficients through `(2l-1)!! / phi''(0)^l [t^(2l)] A psi^(2l+1)`.
pub fn expand_direct(pa: &PhaseAmplitude, r: usize) -> Result<LaplaceExpansion> {
    pa.check_order(r)?;
    let psi = psi_from_phase(pa)?.truncate(2 * r);
    let amp = pa.amp.truncate(2 * r);
    let mut coeffs = Vec::with_capacity(r + 1);
    let mut psi_pow = psi.clone();
    for l in 0..=r {
        // psi_pow = psi^(2l+1)
        let c = (&amp * &psi_pow).at(2 * l).clone();
        let w = from_bigint(double_factorial(2 * l as i64 - 1)?) / pow_int(&pa.phi2, l as i64);
        coeffs.push(c * w);
        psi_pow = &(&psi_pow * &psi) * &psi;
    }
    Ok(LaplaceExpansion { coeffs })
}

/// Stirling's correction series `n! ~ n^n e^-n sqrt(2 pi n) S(1/n)`.
pub fn stirling_series(r: usize) -> Series {
    let pa = PhaseAmplitude::new(stirling_phase(2 * r + 2), Series::one(2 * r), int(1))
        .expect("Stirling phase is well formed");
    expand_hadamard(&pa, r).expect("orders are sufficient by construction").to_series()
}
