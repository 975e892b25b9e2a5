//! Exact counts of labeled k-regular graphs.
//!
//! Independent routes:
//! - [`count_hadamard`]: Gaussian-moment evaluation of the `n`-th power of
//!   `[y^k] exp(-i sum_j x_j y^j) / sqrt(1 - y^2)`;
//! - [`count_brute`]: backtracking over adjacency matrices;
//! - [`count_two_regular`]: sets of cycles of length at least 3;
//! - [`DpCounter`]: dynamic programming over residual-degree profiles, used to
//!   produce the shipped tables up to `n = 100`.
//!
//! Connected counts follow from the exp/log relation between the exponential
//! generating functions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{gaussian_hadamard, Monomial, PolySeries, SparsePoly};
use crate::rational::{binomial, factorial, from_bigint, int, rat, to_integer, GaussianRational, Rational};
use crate::series::Series;

pub const DEFAULT_BRUTE_LIMIT: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Formula,
    Brute,
    Dp,
    Ingested,
    /// Obtained from other counts through the exp/log relation.
    Derived,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Formula => "formula",
            Provenance::Brute => "brute",
            Provenance::Dp => "dp",
            Provenance::Ingested => "ingested",
            Provenance::Derived => "derived",
        })
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "formula" => Provenance::Formula,
            "brute" => Provenance::Brute,
            "dp" => Provenance::Dp,
            "ingested" => Provenance::Ingested,
            "derived" => Provenance::Derived,
            _ => return Err(format!("unknown provenance {s:?}")),
        })
    }
}

fn check_args(k: u32, n: u32) -> Result<()> {
    if k > u16::MAX as u32 - 1 || n > u16::MAX as u32 {
        return Err(Error::InvalidArgument(format!("k = {k}, n = {n} out of range")));
    }
    Ok(())
}

/// Structural zeros and ones shared by every route, `None` when the count
/// has to be computed.
fn trivial_count(k: u32, n: u32) -> Option<BigInt> {
    if n == 0 {
        Some(BigInt::one())
    } else if (n as u64 * k as u64) % 2 == 1 || n <= k {
        Some(BigInt::zero())
    } else {
        None
    }
}

/// `[y^k] exp(-i sum_{j<=k} x_j y^j) / sqrt(1 - y^2)` with `x_j` as variable `j`.
pub fn hadamard_bracket(k: u32) -> SparsePoly<GaussianRational> {
    let k = k as usize;
    let minus_i = Complex::new(int(0), int(-1));
    let arg = PolySeries::from_fn(k, |j| {
        if j == 0 {
            SparsePoly::zero()
        } else {
            SparsePoly::term(Monomial::var(j as u16), minus_i.clone())
        }
    });
    let e = arg.exp().expect("argument has no constant term");
    let mut out = SparsePoly::zero();
    for m in 0..=k / 2 {
        // [y^(2m)] (1 - y^2)^(-1/2) = C(2m, m) / 4^m
        let c = from_bigint(binomial(2 * m as u64, m as u64)) / from_bigint(BigInt::from(4).pow(m as u32));
        out.add_scaled(e.coeff(k - 2 * m), &c);
    }
    out
}

/// Exact count through the Gaussian-moment formula.
pub fn count_hadamard(k: u32, n: u32) -> Result<BigInt> {
    check_args(k, n)?;
    if let Some(c) = trivial_count(k, n) {
        return Ok(c);
    }
    let bracket = hadamard_bracket(k);
    let budget = n * k;
    let power = bracket.pow_filtered(n, |m| m.weighted_degree(|v| v as u32) <= budget);
    let alphas: BTreeMap<u16, Rational> = (1..=k as u16).map(|j| (j, rat(1, j as i64))).collect();
    let value = gaussian_hadamard(&power, &alphas)?;
    if !value.im.is_zero() {
        return Err(Error::NonRealResult(format!("k = {k}, n = {n}: {} + {} i", value.re, value.im)));
    }
    let re = if (n * k / 2) % 2 == 1 { -value.re } else { value.re };
    to_integer(&re).ok_or_else(|| Error::NonIntegerResult(format!("k = {k}, n = {n}: {re}")))
}

/// Exact count by enumerating adjacency matrices, for `n <= limit`.
pub fn count_brute(k: u32, n: u32, limit: u32) -> Result<BigInt> {
    if n > limit {
        return Err(Error::LimitExceeded { n, limit });
    }
    if n == 0 {
        return Ok(BigInt::one());
    }
    if k >= n {
        return Ok(BigInt::zero());
    }
    let mut deg = vec![k; n as usize];
    Ok(BigInt::from(brute_from(0, &mut deg)))
}

fn brute_from(i: usize, deg: &mut [u32]) -> u64 {
    let n = deg.len();
    if i == n {
        return 1;
    }
    let need = deg[i] as usize;
    let cands: Vec<usize> = (i + 1..n).filter(|&j| deg[j] > 0).collect();
    if need > cands.len() {
        return 0;
    }
    let remaining: u64 = deg[i + 1..].iter().map(|&d| d as u64).sum();
    if (remaining + need as u64) % 2 == 1 {
        return 0;
    }
    let saved = deg[i];
    deg[i] = 0;
    let mut total = 0;
    let mut chosen = Vec::with_capacity(need);
    choose(&cands, need, 0, &mut chosen, &mut |sel: &[usize]| {
        for &j in sel {
            deg[j] -= 1;
        }
        total += brute_from(i + 1, deg);
        for &j in sel {
            deg[j] += 1;
        }
    });
    deg[i] = saved;
    total
}

fn choose(items: &[usize], m: usize, start: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if acc.len() == m {
        f(acc);
        return;
    }
    let left = m - acc.len();
    for idx in start..=items.len().saturating_sub(left) {
        if idx >= items.len() {
            break;
        }
        acc.push(items[idx]);
        choose(items, m, idx + 1, acc, f);
        acc.pop();
    }
}

/// `n! [x^n] exp(sum_{m>=3} x^m / (2m))`.
pub fn count_two_regular(n: u32) -> BigInt {
    let order = n as usize;
    let cycles = Series::from_fn(order, |m| if m >= 3 { rat(1, 2 * m as i64) } else { int(0) });
    let egf = cycles.exp().expect("cycle series has no constant term");
    to_integer(&(egf.at(order) * from_bigint(factorial(n as u64)))).expect("integral by construction")
}

/// Residual-degree dynamic programme. The state records how many unfinished
/// vertices still need `1, 2, ..., k` more edges; a vertex with the smallest
/// positive residual is finished by choosing all its remaining neighbours.
/// The memo is shared between calls with the same `k`.
pub struct DpCounter {
    k: usize,
    memo: HashMap<Vec<u16>, BigInt>,
    binom: Vec<Vec<BigInt>>,
}

impl DpCounter {
    pub fn new(k: u32) -> Self {
        DpCounter { k: k as usize, memo: HashMap::new(), binom: vec![vec![BigInt::one()]] }
    }

    fn binom(&mut self, n: usize, m: usize) -> BigInt {
        while self.binom.len() <= n {
            let prev = self.binom.last().unwrap().clone();
            let mut row = vec![BigInt::one(); prev.len() + 1];
            for i in 1..prev.len() {
                row[i] = &prev[i - 1] + &prev[i];
            }
            self.binom.push(row);
        }
        if m > n {
            BigInt::zero()
        } else {
            self.binom[n][m].clone()
        }
    }

    pub fn count(&mut self, n: u32) -> BigInt {
        if let Some(c) = trivial_count(self.k as u32, n) {
            return c;
        }
        let mut state = vec![0u16; self.k];
        state[self.k - 1] = n as u16;
        self.solve(state)
    }

    fn solve(&mut self, state: Vec<u16>) -> BigInt {
        let Some(d) = state.iter().position(|&c| c > 0) else {
            return BigInt::one();
        };
        if let Some(v) = self.memo.get(&state) {
            return v.clone();
        }
        let mut rest = state.clone();
        rest[d] -= 1;
        let need = d + 1;
        let mut total = BigInt::zero();
        let mut picks = vec![0u16; self.k];
        self.distribute(&rest, need, 0, &mut picks, &mut total);
        self.memo.insert(state, total.clone());
        total
    }

    fn distribute(&mut self, rest: &[u16], need: usize, e: usize, picks: &mut Vec<u16>, total: &mut BigInt) {
        if e == rest.len() {
            if need != 0 {
                return;
            }
            let mut weight = BigInt::one();
            for (i, &m) in picks.iter().enumerate() {
                weight *= self.binom(rest[i] as usize, m as usize);
            }
            // picked vertices drop one class; class 0 is finished
            let mut next = vec![0u16; rest.len()];
            for i in 0..rest.len() {
                next[i] += rest[i] - picks[i];
                if i > 0 {
                    next[i - 1] += picks[i];
                }
            }
            *total += weight * self.solve(next);
            return;
        }
        let cap = (rest[e] as usize).min(need);
        for m in 0..=cap {
            picks[e] = m as u16;
            self.distribute(rest, need - m, e + 1, picks, total);
        }
        picks[e] = 0;
    }
}

/// Counts for `n = 0..=nmax` by the residual-degree programme.
pub fn count_dp_range(k: u32, nmax: u32) -> Vec<BigInt> {
    let mut dp = DpCounter::new(k);
    (0..=nmax).map(|n| dp.count(n)).collect()
}

/// Connected counts from all counts, `sg[0] = 1`; entry 0 of the result is 0.
///
/// `C_n = S_n - sum_{m=1}^{n-1} C(n-1, m-1) C_m S_{n-m}` (split off the
/// component containing a fixed vertex).
pub fn connected_from_all(sg: &[BigInt]) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); sg.len()];
    for n in 1..sg.len() {
        let mut acc = sg[n].clone();
        for m in 1..n {
            if c[m].is_zero() || sg[n - m].is_zero() {
                continue;
            }
            acc -= binomial(n as u64 - 1, m as u64 - 1) * &c[m] * &sg[n - m];
        }
        c[n] = acc;
    }
    c
}

/// Exponential generating function `sum a_n x^n / n!` through `a.len() - 1`.
pub fn egf(a: &[BigInt]) -> Series {
    Series::from_fn(a.len() - 1, |n| from_bigint(a[n].clone()) / from_bigint(factorial(n as u64)))
}

/// Connected counts as `n! [x^n] log(SG(x))`.
pub fn connected_via_log(sg: &[BigInt]) -> Result<Vec<BigInt>> {
    let l = egf(sg).log()?;
    (0..sg.len())
        .map(|n| {
            let v = l.at(n) * from_bigint(factorial(n as u64));
            to_integer(&v).ok_or_else(|| Error::NonIntegerResult(format!("connected count at n = {n}: {v}")))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountKind {
    All,
    Connected,
}

/// Exact counts keyed by `(k, n)` for one kind of graph, with provenance.
#[derive(Clone, Debug)]
pub struct CountTable {
    kind: CountKind,
    entries: BTreeMap<(u32, u32), (BigInt, Provenance)>,
}

impl CountTable {
    pub fn new(kind: CountKind) -> Self {
        CountTable { kind, entries: BTreeMap::new() }
    }

    pub fn kind(&self) -> CountKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn check(&self, k: u32, n: u32, count: &BigInt) -> Result<()> {
        let bad = |msg: &str| Err(Error::CountInvariant { k, n, msg: msg.into() });
        if count.is_negative() {
            return bad("negative count");
        }
        let odd = (n as u64 * k as u64) % 2 == 1;
        if odd && !count.is_zero() {
            return bad("n k is odd but the count is nonzero");
        }
        if n >= 1 && n <= k && !count.is_zero() {
            return bad("fewer than k + 1 vertices but the count is nonzero");
        }
        if self.kind == CountKind::All && n == 0 && !count.is_one() {
            return bad("the empty graph must be counted exactly once");
        }
        Ok(())
    }

    /// Inserts after checking the structural invariants. An existing entry
    /// with a different value is an error; with the same value it keeps its
    /// original provenance.
    pub fn insert(&mut self, k: u32, n: u32, count: BigInt, prov: Provenance) -> Result<()> {
        self.check(k, n, &count)?;
        if let Some((old, oldp)) = self.entries.get(&(k, n)) {
            if *old != count {
                return Err(Error::CountInvariant {
                    k,
                    n,
                    msg: format!("{oldp} value {old} conflicts with {prov} value {count}"),
                });
            }
            return Ok(());
        }
        self.entries.insert((k, n), (count, prov));
        Ok(())
    }

    pub fn get(&self, k: u32, n: u32) -> Option<&BigInt> {
        self.entries.get(&(k, n)).map(|(c, _)| c)
    }

    pub fn provenance(&self, k: u32, n: u32) -> Option<Provenance> {
        self.entries.get(&(k, n)).map(|&(_, p)| p)
    }

    pub fn require(&self, k: u32, n: u32) -> Result<&BigInt> {
        self.get(k, n).ok_or(Error::MissingCount { k, n })
    }

    /// `[a_0, ..., a_nmax]` for one `k`.
    pub fn sequence(&self, k: u32, nmax: u32) -> Result<Vec<BigInt>> {
        (0..=nmax).map(|n| self.require(k, n).cloned()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, &BigInt, Provenance)> {
        self.entries.iter().map(|(&(k, n), (c, p))| (k, n, c, *p))
    }

    pub fn ks(&self) -> Vec<u32> {
        let mut ks: Vec<u32> = self.entries.keys().map(|&(k, _)| k).collect();
        ks.dedup();
        ks
    }

    /// Largest `m` with every `n <= m` present for this `k`.
    pub fn contiguous_max(&self, k: u32) -> Option<u32> {
        let mut m = None;
        for n in 0.. {
            if self.get(k, n).is_none() {
                break;
            }
            m = Some(n);
        }
        m
    }

    /// Fills `n = 0..=nmax` for `k` with the residual-degree programme where
    /// entries are missing. Only tables of all graphs can be filled.
    pub fn fill_dp(&mut self, k: u32, nmax: u32) -> Result<()> {
        if self.kind != CountKind::All {
            return Err(Error::InvalidArgument("only tables of all graphs can be filled".into()));
        }
        if self.contiguous_max(k).is_some_and(|m| m >= nmax) {
            return Ok(());
        }
        for (n, v) in count_dp_range(k, nmax).into_iter().enumerate() {
            self.insert(k, n as u32, v, Provenance::Dp)?;
        }
        Ok(())
    }

    /// Adds b-file entries for `k`, checking the declared first index.
    pub fn ingest_bfile(&mut self, path: &Path, k: u32, offset: u32) -> Result<usize> {
        let text = fs::read_to_string(path)?;
        self.ingest_bfile_str(&text, path, k, offset)
    }

    pub fn ingest_bfile_str(&mut self, text: &str, path: &Path, k: u32, offset: u32) -> Result<usize> {
        let rows = parse_bfile(text, path, offset)?;
        let count = rows.len();
        for (n, a) in rows {
            self.insert(k, n, a, Provenance::Ingested)?;
        }
        Ok(count)
    }

    /// Cache records `k n count provenance`, one per line.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        {
            let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
            for (k, n, c, p) in self.entries() {
                writeln!(f, "{k} {n} {c} {p}")?;
            }
            f.flush()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }

    /// Merges a cache file; a missing file is not an error.
    pub fn read_cache(&mut self, path: &Path) -> Result<usize> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let mut added = 0;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: String| Error::Parse { path: path.to_path_buf(), line: i + 1, msg };
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(perr(format!("expected 4 fields, found {}", parts.len())));
            }
            let k: u32 = parts[0].parse().map_err(|e| perr(format!("bad k: {e}")))?;
            let n: u32 = parts[1].parse().map_err(|e| perr(format!("bad n: {e}")))?;
            let c: BigInt = parts[2].parse().map_err(|e| perr(format!("bad count: {e}")))?;
            let p: Provenance = parts[3].parse().map_err(perr)?;
            self.insert(k, n, c, p)?;
            added += 1;
        }
        Ok(added)
    }
}

/// Parses OEIS b-file text: `n a(n)` per line, `#` comments and blank lines
/// ignored, indices strictly consecutive starting at `offset`.
pub fn parse_bfile(text: &str, path: &Path, offset: u32) -> Result<Vec<(u32, BigInt)>> {
    let mut rows: Vec<(u32, BigInt)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |msg: String| Error::Parse { path: path.to_path_buf(), line: i + 1, msg };
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(perr(format!("expected \"n a(n)\", found {line:?}")));
        };
        let n: u32 = a.parse().map_err(|e| perr(format!("bad index {a:?}: {e}")))?;
        let v: BigInt = b.parse().map_err(|e| perr(format!("bad value {b:?}: {e}")))?;
        match rows.last() {
            None if n != offset => return Err(Error::OffsetMismatch { declared: offset, found: n }),
            Some(&(prev, _)) if n != prev + 1 => {
                return Err(perr(format!("index {n} does not follow {prev}")));
            }
            _ => {}
        }
        rows.push((n, v));
    }
    Ok(rows)
}

/// Renders `n a(n)` lines starting at `offset`.
pub fn format_bfile(values: &[BigInt], offset: u32, header: &str) -> String {
    let mut s = String::new();
    for line in header.lines() {
        s.push_str("# ");
        s.push_str(line);
        s.push('\n');
    }
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{} {}\n", offset as usize + i, v));
    }
    s
}

/// `[x^j] 1 / SG(x)` for `j = 0..=jmax`, `SG` the exponential generating
/// function of the `k`-regular counts.
pub fn egf_reciprocal_coeffs(k: u32, jmax: u32, counts: &CountTable) -> Result<Vec<Rational>> {
    let seq = counts.sequence(k, jmax)?;
    Ok(egf(&seq).recip()?.into_coeffs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn hadamard_examples() {
        assert_eq!(count_hadamard(2, 3).unwrap(), b(1));
        assert_eq!(count_hadamard(3, 4).unwrap(), b(1));
        assert_eq!(count_hadamard(3, 6).unwrap(), b(70));
        assert_eq!(count_hadamard(3, 5).unwrap(), b(0));
    }

    #[test]
    fn brute_examples() {
        assert_eq!(count_brute(0, 5, 10).unwrap(), b(1));
        assert_eq!(count_brute(1, 4, 10).unwrap(), b(3));
        assert_eq!(count_brute(2, 4, 10).unwrap(), b(3));
        assert_eq!(count_brute(1, 6, 10).unwrap(), b(15));
        assert!(matches!(count_brute(3, 12, 10), Err(Error::LimitExceeded { n: 12, limit: 10 })));
    }

    #[test]
    fn two_regular_examples() {
        assert_eq!(count_two_regular(0), b(1));
        assert_eq!(count_two_regular(3), b(1));
        assert_eq!(count_two_regular(5), b(12));
        assert_eq!(count_two_regular(5), count_brute(2, 5, 10).unwrap());
    }

    #[test]
    fn dp_matches_known_values() {
        let c3: Vec<BigInt> = count_dp_range(3, 10);
        let want = [1, 0, 0, 0, 1, 0, 70, 0, 19355, 0, 11180820];
        assert_eq!(c3, want.iter().map(|&v| b(v)).collect::<Vec<_>>());
        let c4 = count_dp_range(4, 11);
        assert_eq!(c4[10], b(66462606));
        assert_eq!(c4[11], "5188453830".parse::<BigInt>().unwrap());
        for n in 0..=9 {
            assert_eq!(count_dp_range(2, 9)[n], count_two_regular(n as u32));
        }
    }

    #[test]
    fn connected_routes_agree() {
        let sg = count_dp_range(3, 12);
        let c = connected_from_all(&sg);
        assert_eq!(c[8], b(19320));
        assert_eq!(c[10], b(11166120));
        let mut via_log = connected_via_log(&sg).unwrap();
        via_log[0] = b(0);
        assert_eq!(c, via_log);
    }

    #[test]
    fn bfile_parsing() {
        let p = Path::new("t.b");
        let rows = parse_bfile("0 1\n1 0\n", p, 0).unwrap();
        assert_eq!(rows, vec![(0, b(1)), (1, b(0))]);
        let rows = parse_bfile("# header\n\n0 1\n", p, 0).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(matches!(parse_bfile("1 0\n", p, 0), Err(Error::OffsetMismatch { declared: 0, found: 1 })));
        assert!(matches!(parse_bfile("0 1\n1 x\n", p, 0), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_bfile("0 1\n2 0\n", p, 0), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn table_invariants_and_reciprocal() {
        let mut t = CountTable::new(CountKind::All);
        for (n, v) in count_dp_range(3, 8).into_iter().enumerate() {
            t.insert(3, n as u32, v, Provenance::Dp).unwrap();
        }
        assert!(t.insert(3, 5, b(2), Provenance::Brute).is_err());
        assert!(t.insert(3, 6, b(71), Provenance::Brute).is_err());
        t.insert(3, 6, b(70), Provenance::Brute).unwrap();
        assert_eq!(t.provenance(3, 6), Some(Provenance::Dp));
        let c = egf_reciprocal_coeffs(3, 4, &t).unwrap();
        assert_eq!(c, vec![int(1), int(0), int(0), int(0), rat(-1, 24)]);
        assert!(matches!(egf_reciprocal_coeffs(3, 9, &t), Err(Error::MissingCount { k: 3, n: 9 })));
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("counts.txt");
        let mut t = CountTable::new(CountKind::All);
        t.insert(3, 6, b(70), Provenance::Formula).unwrap();
        t.insert(2, 5, b(12), Provenance::Brute).unwrap();
        t.write_cache(&path).unwrap();
        let mut u = CountTable::new(CountKind::All);
        assert_eq!(u.read_cache(&path).unwrap(), 2);
        assert_eq!(u.get(3, 6), Some(&b(70)));
        assert_eq!(u.provenance(2, 5), Some(Provenance::Brute));
    }
}
