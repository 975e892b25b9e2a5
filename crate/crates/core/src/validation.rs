//! Residual tables: how far exact counts are from the truncated expansion,
//!
//! ```text
//! (count / P(n) - sum_{j<r} c_j n^-j) n^r,
//! P(n) = (nk/e)^(nk/2) / k!^n * exp(-(k^2-1)/4) / sqrt(2),
//! ```
//!
//! evaluated in log space at a configurable binary precision.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use astro_float::BigFloat;
use log::warn;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::connected::csg_tilde;
use crate::counts::CountTable;
use crate::error::{Error, Result};
use crate::float::Ctx;
use crate::par::{self, Exec};
use crate::rational::{parse_rational, Rational};
use crate::regular::sg_tilde_series;

pub const DEFAULT_PRECISION: usize = 256;
const GUARD_BITS: i64 = 32;
const MAX_PRECISION: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    Sg,
    Csg,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::Sg => "sg",
            Which::Csg => "csg",
        })
    }
}

impl FromStr for Which {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sg" => Ok(Which::Sg),
            "csg" => Ok(Which::Csg),
            _ => Err(format!("expected sg or csg, got {s:?}")),
        }
    }
}

/// `c_0..c_{r-1}` of the relevant expansion.
pub fn expansion_coeffs(which: Which, k: u32, r: usize, counts: &CountTable) -> Result<Vec<Rational>> {
    if r == 0 {
        return Ok(Vec::new());
    }
    let s = match which {
        Which::Sg => sg_tilde_series(k, r - 1)?,
        Which::Csg => csg_tilde(k, r - 1, counts)?,
    };
    Ok(s.into_coeffs())
}

/// `log P(n)` at the context precision.
fn log_prefactor(c: &mut Ctx, k: u32, n: u32) -> BigFloat {
    let nk = c.int(n as i64 * k as i64);
    let half_nk = c.div(&nk, &c.int(2));
    let ln_nk = c.ln(&nk);
    let mut acc = c.mul(&half_nk, &c.sub(&ln_nk, &c.int(1)));
    // log k! as a sum of logs of integers
    let mut log_kf = c.int(0);
    for i in 2..=k as i64 {
        let li = c.ln(&c.int(i));
        log_kf = c.add(&log_kf, &li);
    }
    acc = c.sub(&acc, &c.mul(&c.int(n as i64), &log_kf));
    let quarter = c.div(&c.int((k as i64) * (k as i64) - 1), &c.int(4));
    acc = c.sub(&acc, &quarter);
    let ln2 = c.ln(&c.int(2));
    c.sub(&acc, &c.div(&ln2, &c.int(2)))
}

/// One residual at a fixed precision. Fails with `PrecisionUnderflow` when
/// cancellation leaves fewer than 32 significant bits.
pub fn residual_at(k: u32, n: u32, count: &BigInt, coeffs: &[Rational], precision: usize) -> Result<BigFloat> {
    if n == 0 {
        return Err(Error::InvalidArgument("residuals need n >= 1".into()));
    }
    if count.is_zero() || count.is_negative() {
        return Err(Error::InvalidArgument(format!("count for k = {k}, n = {n} is {count}, no logarithm")));
    }
    let mut c = Ctx::new(precision);
    let lc = c.bigint(count);
    let log_count = c.ln(&lc);
    let log_p = log_prefactor(&mut c, k, n);
    let diff_log = c.sub(&log_count, &log_p);
    let mut lost = 0i64;
    if let (Some(a), Some(b)) = (Ctx::exponent(&log_count), Ctx::exponent(&diff_log)) {
        lost += (a - b).max(0);
    }
    let ratio = c.exp(&diff_log);
    let nf = c.int(n as i64);
    let mut partial = c.int(0);
    let mut npow = c.int(1);
    for coef in coeffs {
        let q = c.rational(coef);
        partial = c.add(&partial, &c.div(&q, &npow));
        npow = c.mul(&npow, &nf);
    }
    let diff = c.sub(&ratio, &partial);
    match (Ctx::exponent(&ratio), Ctx::exponent(&diff)) {
        (Some(a), Some(b)) => lost += (a - b).max(0),
        (Some(_), None) => lost = precision as i64,
        _ => {}
    }
    if lost > precision as i64 - GUARD_BITS {
        return Err(Error::PrecisionUnderflow { lost, precision });
    }
    Ok(c.mul(&diff, &npow))
}

/// Residual, doubling the precision on underflow. Returns the value and the
/// precision actually used.
pub fn residual(k: u32, n: u32, count: &BigInt, coeffs: &[Rational], precision: usize) -> Result<(BigFloat, usize)> {
    let mut p = precision;
    loop {
        match residual_at(k, n, count, coeffs, p) {
            Err(Error::PrecisionUnderflow { .. }) if p < MAX_PRECISION => p *= 2,
            other => return other.map(|v| (v, p)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ResidualCell {
    pub n: u32,
    /// Full-precision decimal (30 digits after the point), or `None`.
    pub value: Option<String>,
    /// Half-even rounding to two decimals, or `"NA"`.
    pub rounded: String,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ResidualRow {
    pub k: u32,
    pub r: usize,
    pub cells: Vec<ResidualCell>,
}

#[derive(Clone, Debug)]
pub struct ResidualTable {
    pub which: Which,
    pub ns: Vec<u32>,
    pub precision: usize,
    pub rows: Vec<ResidualRow>,
}

impl ResidualTable {
    /// Header `n,<n-values>` then one row per `k`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n");
        for n in &self.ns {
            s.push_str(&format!(",{n}"));
        }
        s.push('\n');
        if self.ns.is_empty() {
            return s;
        }
        for row in &self.rows {
            s.push_str(&row.k.to_string());
            for c in &row.cells {
                s.push(',');
                s.push_str(&c.rounded);
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                json!({
                    "k": row.k,
                    "r": row.r,
                    "cells": row.cells.iter().map(|c| json!({
                        "n": c.n,
                        "value": c.value,
                        "rounded": c.rounded,
                        "error": c.error,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({"which": self.which.to_string(), "precision": self.precision, "ns": self.ns, "rows": rows})
    }

    pub fn cell(&self, k: u32, n: u32) -> Option<&ResidualCell> {
        let row = self.rows.iter().find(|r| r.k == k)?;
        row.cells.iter().find(|c| c.n == n)
    }
}

/// Residual table over `rows` (pairs `(k, r)`) and `ns`. `all` holds the
/// counts of all k-regular graphs (needed by both expansions), `connected`
/// the connected counts (used only for `Which::Csg`). Cells that cannot be
/// evaluated are reported as `NA` and logged.
pub fn residual_table(
    which: Which,
    rows: &[(u32, usize)],
    ns: &[u32],
    all: &CountTable,
    connected: &CountTable,
    precision: usize,
    exec: Exec,
) -> Result<ResidualTable> {
    let mut coeffs: BTreeMap<(u32, usize), Vec<Rational>> = BTreeMap::new();
    for &(k, r) in rows {
        if let Entry::Vacant(slot) = coeffs.entry((k, r)) {
            slot.insert(expansion_coeffs(which, k, r, all)?);
        }
    }
    let counts = match which {
        Which::Sg => all,
        Which::Csg => connected,
    };
    let grid: Vec<(usize, u32)> = (0..rows.len()).flat_map(|i| ns.iter().map(move |&n| (i, n))).collect();
    let cells = par::map(exec, &grid, |&(i, n)| {
        let (k, r) = rows[i];
        let computed = counts.require(k, n).and_then(|count| residual(k, n, count, &coeffs[&(k, r)], precision));
        match computed {
            Ok((v, p)) => {
                let mut c = Ctx::new(p);
                ResidualCell { n, value: Some(c.to_decimal(&v, 30)), rounded: c.to_decimal(&v, 2), error: None }
            }
            Err(e) => ResidualCell { n, value: None, rounded: "NA".into(), error: Some(e.to_string()) },
        }
    });
    let mut out_rows = Vec::with_capacity(rows.len());
    let mut it = cells.into_iter();
    for &(k, r) in rows {
        let cells: Vec<ResidualCell> = it.by_ref().take(ns.len()).collect();
        for c in &cells {
            if let Some(e) = &c.error {
                warn!("{which} k = {k}, n = {}: {e}", c.n);
            }
        }
        out_rows.push(ResidualRow { k, r, cells });
    }
    Ok(ResidualTable { which, ns: ns.to_vec(), precision, rows: out_rows })
}

/// Reference residuals: one row per `(k, r)` with printed two-decimal values.
#[derive(Clone, Debug, PartialEq)]
pub struct Golden {
    pub ns: Vec<u32>,
    pub rows: Vec<GoldenRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenRow {
    pub k: u32,
    pub r: usize,
    pub values: Vec<Rational>,
}

impl Golden {
    /// Parses `k,r,<n...>` CSV with `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::Parse { path: "<golden>".into(), line, msg };
        let mut ns: Option<Vec<u32>> = None;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            match &ns {
                None => {
                    if fields.len() < 2 || fields[0] != "k" || fields[1] != "r" {
                        return Err(bad(i + 1, "header must start with k,r".into()));
                    }
                    let parsed: std::result::Result<Vec<u32>, _> = fields[2..].iter().map(|f| f.parse()).collect();
                    ns = Some(parsed.map_err(|e| bad(i + 1, format!("bad n: {e}")))?);
                }
                Some(ns) => {
                    if fields.len() != ns.len() + 2 {
                        return Err(bad(i + 1, format!("expected {} fields", ns.len() + 2)));
                    }
                    let k = fields[0].parse().map_err(|e| bad(i + 1, format!("bad k: {e}")))?;
                    let r = fields[1].parse().map_err(|e| bad(i + 1, format!("bad r: {e}")))?;
                    let values = fields[2..]
                        .iter()
                        .map(|f| decimal_to_rational(f).ok_or_else(|| bad(i + 1, format!("bad value {f:?}"))))
                        .collect::<Result<Vec<_>>>()?;
                    rows.push(GoldenRow { k, r, values });
                }
            }
        }
        Ok(Golden { ns: ns.unwrap_or_default(), rows })
    }

    pub fn row(&self, k: u32) -> Option<&GoldenRow> {
        self.rows.iter().find(|r| r.k == k)
    }

    pub fn value(&self, k: u32, n: u32) -> Option<&Rational> {
        let i = self.ns.iter().position(|&m| m == n)?;
        self.row(k).map(|r| &r.values[i])
    }
}

/// Exact value of a decimal literal such as `-14.03`.
pub fn decimal_to_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{ip}{fp}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let q = parse_rational(&format!("{digits}/1{}", "0".repeat(fp.len())))?;
    Some(if neg { -q } else { q })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub k: u32,
    pub n: u32,
    pub computed: String,
    pub expected: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k = {}, n = {}: computed {}, reference {}", self.k, self.n, self.computed, self.expected)
    }
}

/// Cells of `table` that differ from the reference by more than `tol`;
/// cells without a reference value are ignored, `NA` cells always mismatch.
pub fn compare(table: &ResidualTable, golden: &Golden, tol: &Rational) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for row in &table.rows {
        for c in &row.cells {
            let Some(want) = golden.value(row.k, c.n) else { continue };
            let ok = decimal_to_rational(&c.rounded).is_some_and(|got| (got - want).abs() <= *tol);
            if !ok {
                out.push(Mismatch { k: row.k, n: c.n, computed: c.rounded.clone(), expected: decimal(want) });
            }
        }
    }
    out
}

fn decimal(q: &Rational) -> String {
    let mut c = Ctx::new(128);
    let v = c.rational(q);
    c.to_decimal(&v, 2)
}
