//! Thin wrapper over `astro_float` for the numeric checks: a working
//! precision plus the constant cache, and conversions from exact values.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;

use crate::rational::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

pub struct Ctx {
    pub precision: usize,
    cc: Consts,
}

impl Ctx {
    pub fn new(precision: usize) -> Self {
        Ctx { precision, cc: Consts::new().expect("constant cache allocation") }
    }

    pub fn int(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.precision)
    }

    pub fn bigint(&mut self, n: &BigInt) -> BigFloat {
        BigFloat::parse(&n.to_string(), Radix::Dec, self.precision, RM, &mut self.cc)
    }

    pub fn rational(&mut self, q: &Rational) -> BigFloat {
        let n = self.bigint(q.numer());
        let d = self.bigint(q.denom());
        self.div(&n, &d)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.precision, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.precision, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.precision, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.precision, RM)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.precision, RM, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.precision, RM, &mut self.cc)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.precision, RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.precision, RM)
    }

    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.precision, RM)
    }

    /// Binary exponent, i.e. `|a|` lies in `[2^(e-1), 2^e)`; `None` for zero.
    pub fn exponent(a: &BigFloat) -> Option<i64> {
        if a.is_zero() {
            None
        } else {
            a.exponent().map(|e| e as i64)
        }
    }

    pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
        self.to_decimal(a, 20).parse().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `digits` digits after the point, rounded half-even.
    pub fn to_decimal(&mut self, a: &BigFloat, digits: u32) -> String {
        let scale = BigFloat::from_u64(10u64.pow(digits.min(19)), self.precision);
        let mut scaled = self.mul(a, &scale);
        for _ in 19..digits {
            scaled = self.mul(&scaled, &self.int(10));
        }
        let neg = scaled.is_negative();
        let abs = scaled.abs();
        let fl = abs.floor();
        let frac = self.sub(&abs, &fl);
        let half = BigFloat::from_f64(0.5, self.precision);
        let mut n = self.bigint_floor(&fl);
        match frac.cmp(&half) {
            Some(o) if o > 0 => n += 1,
            Some(0) if n.bit(0) => n += 1,
            _ => {}
        }
        let s = n.to_string();
        let d = digits as usize;
        let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
        let (ip, fp) = s.split_at(s.len() - d);
        let sign = if neg && n != BigInt::from(0) { "-" } else { "" };
        if d == 0 {
            format!("{sign}{ip}")
        } else {
            format!("{sign}{ip}.{fp}")
        }
    }

    /// Integer part of a nonnegative float, exactly.
    fn bigint_floor(&mut self, a: &BigFloat) -> BigInt {
        match a.as_raw_parts() {
            None => BigInt::from(0),
            Some((words, _, _, exp, _)) => {
                // value = 0.mantissa * 2^exp, words little-endian
                let mut digits = Vec::with_capacity(words.len() * 2);
                for w in words {
                    let w = *w;
                    digits.push(w as u32);
                    digits.push((w >> 32) as u32);
                }
                let m = BigInt::from(num_bigint::BigUint::new(digits));
                let shift = exp as i64 - (words.len() * astro_float::WORD_BIT_SIZE) as i64;
                if shift >= 0 {
                    m << shift as usize
                } else {
                    m >> (-shift) as usize
                }
            }
        }
    }
}

pub fn is_negative(a: &BigFloat) -> bool {
    a.sign() == Some(Sign::Neg)
}
