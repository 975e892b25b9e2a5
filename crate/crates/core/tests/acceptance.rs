//! One line per acceptance criterion. Exits non-zero when a criterion fails
//! in a way not already accounted for below.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regasym_core::connected::{csg_minus_sg, csg_tilde, valuation_gap};
use regasym_core::counts::{count_brute, count_hadamard, count_two_regular, CountKind};
use regasym_core::data;
use regasym_core::laplace::stirling_series;
use regasym_core::rational::{factorial, from_bigint, int, pow_int, rat, Rational};
use regasym_core::regular::{formal_k_interpolate, sg_tilde_series};
use regasym_core::validation::{compare, residual_table, Golden, Which};
use regasym_core::Exec;

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rats(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(p, q)| rat(p, q)).collect()
}

const SG_GOLDEN: [(u32, [(i64, i64); 3]); 3] = [
    (3, [(2, 1), (-71, 18), (-143, 1296)]),
    (4, [(2, 1), (-235, 24), (18289, 2304)]),
    (5, [(2, 1), (-589, 30), (190249, 3600)]),
];

const CSG_GOLDEN: [(u32, [(i64, i64); 3]); 3] = [
    (3, [(2, 1), (-71, 18), (-335, 1296)]),
    (4, [(2, 1), (-235, 24), (18289, 2304)]),
    (5, [(2, 1), (-589, 30), (190249, 3600)]),
];

fn c1() -> Outcome {
    let got = stirling_series(3);
    let want = rats(&[(1, 1), (1, 12), (1, 288), (-139, 51840)]);
    ensure(got.coeffs() == want.as_slice(), || format!("got {:?}", got.coeffs()))?;
    Ok("1, 1/12, 1/288, -139/51840".into())
}

fn c2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let r = 6;
    for case in 0..20 {
        let deg = rng.gen_range(0..=6);
        let amp: Vec<Rational> = (0..=deg).map(|_| rat(rng.gen_range(-30..=30), rng.gen_range(1..=15))).collect();
        for (phi, phi2) in laplace_phases(r) {
            laplace_routes_agree(&phi, &phi2, &amplitude(&amp, r), r).map_err(|e| format!("case {case}: {e}"))?;
        }
    }
    Ok("20 amplitudes x 2 phases, r = 6, exact agreement".into())
}

fn c3() -> Outcome {
    for (k, want) in SG_GOLDEN {
        let got = sg_tilde_series(k, 2).map_err(s)?;
        ensure(got.coeffs() == rats(&want).as_slice(), || format!("k = {k}: got {:?}", got.coeffs()))?;
    }
    for k in 2..=12 {
        let c0 = sg_tilde_series(k, 0).map_err(s)?;
        ensure(c0.at(0) == &int(2), || format!("k = {k}: [z^0] = {}", c0.at(0)))?;
    }
    Ok("k = 3, 4, 5 through z^2; [z^0] = 2 for k = 2..12".into())
}

fn c4() -> Outcome {
    let printed: [(usize, Vec<Rational>); 2] = [
        (1, [1, -3, 2, 0, -1].iter().map(|&c| rat(c, 6)).collect()),
        (2, [-71, 234, -239, 36, 50, 6, -16, 0, 1].iter().map(|&c| rat(c, 144)).collect()),
    ];
    let mut held = Vec::new();
    for (r, want) in printed {
        let p = formal_k_interpolate(r).map_err(s)?;
        ensure(p.numerator == want, || format!("r = {r}: {}", p.pretty()))?;
        ensure(!p.check_ks.is_empty(), || format!("r = {r}: no held-out points"))?;
        held.push(format!("r = {r} held out k = {:?}", p.check_ks));
    }
    Ok(held.join("; "))
}

fn c5() -> Outcome {
    let mut cells = 0;
    for (k, nmax) in [(2u32, 8u32), (3, 8), (4, 7)] {
        for n in (0..=nmax).filter(|n| n * k % 2 == 0) {
            let f = count_hadamard(k, n).map_err(s)?;
            let b = count_brute(k, n, 10).map_err(s)?;
            ensure(f == b, || format!("k = {k}, n = {n}: formula {f}, enumeration {b}"))?;
            cells += 1;
        }
    }
    for n in 0..=14 {
        let f = count_hadamard(2, n).map_err(s)?;
        ensure(f == count_two_regular(n), || format!("k = 2, n = {n}"))?;
    }
    Ok(format!("{cells} (k, n) pairs equal to enumeration; k = 2 matches cycle counts for n <= 14"))
}

/// Printed `[z^2]` of the connected expansion as a function of `k`.
fn csg_z2_formula(k: u32, sg4: &BigInt) -> Rational {
    let kk = int(k as i64);
    let poly = [-71, 234, -239, 36, 50, 6, -16, 0, 1].iter().rev().fold(int(0), |acc, &c| acc * &kk + int(c));
    let indicator = if k == 3 {
        int(12)
            * pow_int(&from_bigint(factorial(k as u64)), 4)
            * pow_int(&kk, 2 - 2 * k as i64)
            * from_bigint(sg4.clone())
    } else {
        int(0)
    };
    (poly - indicator) / int(144) / (&kk * &kk)
}

fn c6() -> Outcome {
    let all = data::shipped(CountKind::All).map_err(s)?;
    for (k, want) in CSG_GOLDEN {
        let got = csg_tilde(k, 2, &all).map_err(s)?;
        ensure(got.coeffs() == rats(&want).as_slice(), || format!("k = {k}: got {:?}", got.coeffs()))?;
        let sg4 = count_hadamard(k, 4).map_err(s)?;
        let f = csg_z2_formula(k, &sg4);
        ensure(&f == got.at(2), || format!("k = {k}: indicator formula gives {f}, computed {}", got.at(2)))?;
    }
    Ok("k = 3, 4, 5 through z^2; k = 3 [z^2] = -335/1296 from SG_4 = 1".into())
}

fn c7() -> Outcome {
    let all = data::shipped(CountKind::All).map_err(s)?;
    let gap3 = valuation_gap(3, 2, &all).map_err(s)?;
    ensure(gap3 == 2, || format!("k = 3: gap {gap3}"))?;
    let d = csg_minus_sg(3, 2, &all).map_err(s)?;
    let golden_diff = rat(-335, 1296) - rat(-143, 1296);
    ensure(d.at(2) == &golden_diff && golden_diff == rat(-4, 27), || format!("k = 3: difference {}", d.at(2)))?;
    let gap4 = valuation_gap(4, 5, &all).map_err(s)?;
    ensure(gap4 == 5, || format!("k = 4: gap {gap4}"))?;
    // independent route: both full expansions at the same order
    let r = 5;
    let direct = &csg_tilde(4, r, &all).map_err(s)? - &sg_tilde_series(4, r).map_err(s)?;
    ensure(direct.valuation() == 5, || format!("k = 4: full expansions differ first at z^{}", direct.valuation()))?;
    Ok(format!("k = 3 gap 2 (difference -4/27); k = 4 gap 5, [z^5] difference {}", direct.at(5)))
}

type CellSet = BTreeSet<(Which, u32, u32)>;

fn residual_mismatches(
    which: Which,
    rows: &[(u32, usize)],
    precision: usize,
) -> Result<(CellSet, Vec<String>, Vec<String>), String> {
    let all = data::shipped(CountKind::All).map_err(s)?;
    let connected = data::shipped(CountKind::Connected).map_err(s)?;
    let golden = Golden::parse(match which {
        Which::Sg => data::GOLDEN_SG,
        Which::Csg => data::GOLDEN_CSG,
    })
    .map_err(s)?;
    let ns: Vec<u32> = (10..=100).step_by(10).collect();
    let table = residual_table(which, rows, &ns, &all, &connected, precision, Exec::default()).map_err(s)?;
    let mism = compare(&table, &golden, &rat(1, 100));
    let set = mism.iter().map(|m| (which, m.k, m.n)).collect();
    let text = mism.iter().map(|m| format!("{which} {m}")).collect();
    let rounded = table.rows.iter().flat_map(|r| r.cells.iter().map(|c| c.rounded.clone())).collect();
    Ok((set, text, rounded))
}

/// Returns the outcome and whether its failure is the known one.
fn c8() -> (Outcome, bool) {
    let run = || -> Result<(CellSet, Vec<String>, bool, CellSet), String> {
        let sg_rows = [(2, 3), (3, 3), (4, 3), (5, 3)];
        let csg_rows = [(3, 3), (4, 3)];
        let (mut set, mut text, lo_sg) = residual_mismatches(Which::Sg, &sg_rows, 256)?;
        let (set_c, text_c, lo_csg) = residual_mismatches(Which::Csg, &csg_rows, 256)?;
        set.extend(set_c);
        text.extend(text_c);
        let (_, _, hi_sg) = residual_mismatches(Which::Sg, &sg_rows, 512)?;
        let (_, _, hi_csg) = residual_mismatches(Which::Csg, &csg_rows, 512)?;
        let stable = lo_sg == hi_sg && lo_csg == hi_csg;
        // the count behind the k = 5, n = 10 cell, three ways: shipped table,
        // exact formula, and complementation (5-regular on 10 vertices <-> 4-regular)
        let all = data::shipped(CountKind::All).map_err(s)?;
        let sg5 = all.require(5, 10).map_err(s)?.clone();
        if sg5 != BigInt::from(66462606)
            || count_hadamard(5, 10).map_err(s)? != sg5
            || all.require(4, 10).map_err(s)? != &sg5
        {
            return Err(format!("SG_10 for k = 5 is inconsistent: {sg5}"));
        }
        // the k = 2 row at the next truncation order
        let (set_r4, _, _) = residual_mismatches(Which::Sg, &[(2, 4)], 256)?;
        Ok((set, text, stable, set_r4))
    };
    let (set, text, stable, set_r4) = match run() {
        Ok(v) => v,
        Err(e) => return (Err(e), false),
    };
    if !stable {
        return (Err("doubling the precision changed a rounded cell".into()), false);
    }
    if set.is_empty() {
        return (Ok("all 60 cells within 0.01; 512 bits agree with 256 bits".into()), true);
    }
    let mut known: CellSet = (10..=100).step_by(10).map(|n| (Which::Sg, 2, n)).collect();
    known.insert((Which::Sg, 5, 10));
    let k2_row_fixed_by_r4 = set_r4.is_empty();
    let summary = format!(
        "{} of 60 cells off by more than 0.01: {}. The printed k = 2 row is reproduced exactly with r = 4 \
         ({}); the k = 5, n = 10 cell is 2.13 from exact counts (SG_10 = 66462606 from the table, the formula \
         and the 4-regular complement) against a printed 2.16. Every other cell matches; 512 bits agree with 256 bits",
        set.len(),
        summarize(&text),
        if k2_row_fixed_by_r4 { "all 10 cells" } else { "NOT all cells" },
    );
    (Err(summary), set == known && k2_row_fixed_by_r4)
}

fn summarize(lines: &[String]) -> String {
    if lines.len() <= 3 {
        lines.join("; ")
    } else {
        format!("{}; ...; {}", lines[..2].join("; "), lines[lines.len() - 1])
    }
}

fn c9() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 32, failure_persistence: None, ..Config::default() });
    let fail = |name: &str, e: &dyn std::fmt::Display| format!("{name}: {e}");
    runner.run(&series_with_constant(int(0), 6), |s| exp_log_inverse(&s)).map_err(|e| fail("exp/log", &e))?;
    runner
        .run(&(series_with_constant(int(0), 5), series_with_constant(int(0), 5)), |(a, b)| exp_is_additive(&a, &b))
        .map_err(|e| fail("exp additivity", &e))?;
    runner
        .run(&(series_with_constant(int(1), 5), small_rational(), small_rational()), |(x, a, b)| pow_laws(&x, &a, &b))
        .map_err(|e| fail("pow", &e))?;
    newton_matches_lagrange(6, 6).map_err(|e| fail("Newton vs Lagrange", &e))?;
    for k in 3..=5 {
        atilde_valuation(k, 10).map_err(|e| fail("A~_j valuation", &e))?;
    }
    for k in 2..=4 {
        egf_round_trip(k, 8).map_err(|e| fail("EGF round trip", &e))?;
    }
    Ok("series laws, u_{p,q} for p, q <= 6, A~_j valuations for k = 3..5, j <= 10, EGF exp(log) through n = 8".into())
}

fn main() -> ExitCode {
    // libtest-style filter arguments are ignored; this target always runs everything
    let limits = [1u64, 10, 30, 120, 300, 60, 60, 120, 120];
    let mut unexpected = false;
    let mut fails = 0;
    for (i, limit) in limits.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let (outcome, known) = match n {
            1 => (c1(), false),
            2 => (c2(), false),
            3 => (c3(), false),
            4 => (c4(), false),
            5 => (c5(), false),
            6 => (c6(), false),
            7 => (c7(), false),
            8 => c8(),
            _ => (c9(), false),
        };
        let took = start.elapsed();
        let over = took > Duration::from_secs(*limit);
        let time = format!("{:.2}s, limit {limit}s", took.as_secs_f64());
        match (outcome, over) {
            (Ok(msg), false) => println!("criterion {n}: PASS ({time}) {msg}"),
            (Ok(msg), true) => {
                println!("criterion {n}: FAIL ({time}, over the time limit) {msg}");
                fails += 1;
                unexpected = true;
            }
            (Err(msg), _) => {
                let tag = if known { "known discrepancy with the printed table" } else { "unexpected" };
                println!("criterion {n}: FAIL ({time}; {tag}) {msg}");
                fails += 1;
                unexpected |= !known || over;
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - fails);
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
