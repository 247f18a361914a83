//! Upper bounds `D̂(b, r)` on how much `n -> b*n + r` can raise complexity,
//! for 3-smooth bases `b = 2^i 3^j`, and the quantities derived from a full
//! row: the runtime exponent and the density-one bound on `f(n) / log n`.
//!
//! A row for `b` is built from the rows of its proper divisors `p` through
//! `b*n + r = p*((b/p)*n + r/p) + r mod p`, so rows are memoized per base and
//! shared by every larger base that needs them.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::complexity::ComplexityTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SmoothBase {
    #[serde(rename = "b")]
    value: u64,
    #[serde(rename = "i")]
    twos: u32,
    #[serde(rename = "j")]
    threes: u32,
}

impl SmoothBase {
    pub fn new(twos: u32, threes: u32) -> Result<Self> {
        if twos + threes == 0 {
            return Err(Error::NotSmooth(1));
        }
        let value = 2u64
            .checked_pow(twos)
            .and_then(|a| 3u64.checked_pow(threes).and_then(|b| a.checked_mul(b)))
            .ok_or_else(|| Error::invalid(format!("2^{twos} * 3^{threes} overflows u64")))?;
        Ok(SmoothBase {
            value,
            twos,
            threes,
        })
    }

    pub fn from_value(b: u64) -> Result<Self> {
        if b < 2 {
            return Err(Error::NotSmooth(b));
        }
        let mut rest = b;
        let twos = rest.trailing_zeros();
        rest >>= twos;
        let mut threes = 0;
        while rest % 3 == 0 {
            rest /= 3;
            threes += 1;
        }
        if rest != 1 {
            return Err(Error::NotSmooth(b));
        }
        Ok(SmoothBase {
            value: b,
            twos,
            threes,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn twos(&self) -> u32 {
        self.twos
    }

    pub fn threes(&self) -> u32 {
        self.threes
    }

    /// Divisors `p` of the base with `1 < p < b`, ascending.
    pub fn proper_divisors(&self) -> Vec<SmoothBase> {
        let mut out = Vec::new();
        for i in 0..=self.twos {
            for j in 0..=self.threes {
                if i + j == 0 || (i == self.twos && j == self.threes) {
                    continue;
                }
                out.push(SmoothBase::new(i, j).expect("divisor of a valid base"));
            }
        }
        out.sort();
        out
    }

    fn is_prime(&self) -> bool {
        self.value == 2 || self.value == 3
    }
}

/// All `2^i 3^j <= limit` with `i + j > 0`, ascending.
pub fn enumerate_bases(limit: u64) -> Vec<SmoothBase> {
    let mut out = Vec::new();
    let mut pow3 = 1u64;
    let mut j = 0;
    while pow3 <= limit {
        let mut v = pow3;
        let mut i = 0;
        while v <= limit {
            if i + j > 0 {
                out.push(SmoothBase {
                    value: v,
                    twos: i,
                    threes: j,
                });
            }
            match v.checked_mul(2) {
                Some(next) => v = next,
                None => break,
            }
            i += 1;
        }
        match pow3.checked_mul(3) {
            Some(next) => pow3 = next,
            None => break,
        }
        j += 1;
    }
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbrTable {
    pub base: SmoothBase,
    pub d: Vec<u16>,
}

impl DbrTable {
    pub fn get(&self, r: u64) -> u16 {
        self.d[r as usize]
    }
}

fn check_inputs(base: SmoothBase, r: u64, table: &ComplexityTable) -> Result<()> {
    if r >= base.value {
        return Err(Error::ResidueOutOfRange {
            base: base.value,
            r,
        });
    }
    if table.limit() < base.value {
        return Err(Error::TableTooSmall {
            need: base.value,
            have: table.limit(),
        });
    }
    Ok(())
}

/// The closed-form cases. `None` means the divisor recursion decides.
#[inline]
fn direct_rule(b: u64, r: u64, table: &ComplexityTable) -> Option<u16> {
    let fb = u16::from(table.f(b));
    if r == 0 {
        Some(fb)
    } else if r == 1 || b % r == 0 {
        Some(fb + 1)
    } else if b == 2 || b == 3 {
        Some(fb + u16::from(table.f(r)))
    } else {
        None
    }
}

struct Split {
    p: u64,
    low: Arc<[u16]>,
    high: Arc<[u16]>,
}

#[inline]
fn recursive_entry(b: u64, r: u64, table: &ComplexityTable, splits: &[Split]) -> u16 {
    if let Some(v) = direct_rule(b, r, table) {
        return v;
    }
    let mut best = u16::from(table.f(b)) + u16::from(table.f(r));
    for s in splits {
        let v = s.low[(r % s.p) as usize] + s.high[(r / s.p) as usize];
        if v < best {
            best = v;
        }
    }
    best
}

/// Memoizing evaluator for `D̂(b, r)`. Rows are keyed by base and reused
/// across calls, so sweeping bases in ascending order computes each row once.
pub struct DbrSolver<'t> {
    table: &'t ComplexityTable,
    rows: HashMap<u64, Arc<[u16]>>,
}

impl<'t> DbrSolver<'t> {
    pub fn new(table: &'t ComplexityTable) -> Self {
        DbrSolver {
            table,
            rows: HashMap::new(),
        }
    }

    pub fn table(&self) -> &'t ComplexityTable {
        self.table
    }

    /// Number of memoized rows.
    pub fn cached_rows(&self) -> usize {
        self.rows.len()
    }

    /// Drops every memoized row.
    pub fn clear(&mut self) {
        self.rows.clear();
    }

    pub fn calc_dbr(&mut self, base: SmoothBase, r: u64) -> Result<u16> {
        check_inputs(base, r, self.table)?;
        if let Some(row) = self.rows.get(&base.value) {
            return Ok(row[r as usize]);
        }
        if let Some(v) = direct_rule(base.value, r, self.table) {
            return Ok(v);
        }
        let splits = self.splits(base);
        Ok(recursive_entry(base.value, r, self.table, &splits))
    }

    pub fn dbr_table(&mut self, base: SmoothBase) -> Result<DbrTable> {
        check_inputs(base, 0, self.table)?;
        let row = self.row(base);
        Ok(DbrTable {
            base,
            d: row.to_vec(),
        })
    }

    /// Builds (or fetches) the row of `base`; the table must cover `base`.
    fn row(&mut self, base: SmoothBase) -> Arc<[u16]> {
        if let Some(row) = self.rows.get(&base.value) {
            return Arc::clone(row);
        }
        let splits = self.splits(base);
        let b = base.value;
        let table = self.table;
        let row: Vec<u16> = (0..b as usize)
            .into_par_iter()
            .with_min_len(4096)
            .map(|r| recursive_entry(b, r as u64, table, &splits))
            .collect();
        let row: Arc<[u16]> = row.into();
        self.rows.insert(b, Arc::clone(&row));
        row
    }

    fn splits(&mut self, base: SmoothBase) -> Vec<Split> {
        if base.is_prime() {
            return Vec::new();
        }
        let divisors = base.proper_divisors();
        // Ascending order guarantees every row a divisor needs already exists.
        for &p in &divisors {
            self.row(p);
        }
        divisors
            .iter()
            .map(|p| Split {
                p: p.value,
                low: Arc::clone(&self.rows[&p.value]),
                high: Arc::clone(&self.rows[&(base.value / p.value)]),
            })
            .collect()
    }
}

/// `D̂(b, r)` by plain recursion with no memo. Exponential in the number of
/// divisors; for cross-checking small bases.
pub fn calc_dbr_unmemoized(base: SmoothBase, r: u64, table: &ComplexityTable) -> Result<u16> {
    check_inputs(base, r, table)?;
    Ok(plain(base, r, table))
}

fn plain(base: SmoothBase, r: u64, table: &ComplexityTable) -> u16 {
    let b = base.value;
    if let Some(v) = direct_rule(b, r, table) {
        return v;
    }
    let mut best = u16::from(table.f(b)) + u16::from(table.f(r));
    for p in base.proper_divisors() {
        let q = SmoothBase::from_value(b / p.value).expect("cofactor is smooth");
        let v = plain(p, r % p.value, table) + plain(q, r / p.value, table);
        best = best.min(v);
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeSummary {
    #[serde(flatten)]
    pub base: SmoothBase,
    #[serde(serialize_with = "crate::report::biguint")]
    pub m0: BigUint,
    #[serde(serialize_with = "crate::report::biguint")]
    pub m1: BigUint,
    #[serde(serialize_with = "crate::report::biguint")]
    pub m2: BigUint,
    #[serde(serialize_with = "crate::report::sig9")]
    pub alpha: f64,
}

fn histogram(d: &[u16]) -> Vec<u64> {
    let max = d.iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0u64; max + 1];
    for &v in d {
        counts[v as usize] += 1;
    }
    counts
}

/// `m_t = sum over r with D ≡ t (mod 3) of 3^((D - t)/3)`, and
/// `alpha = -1 + log(m0 + 3^(1/3) m1 + 3^(2/3) m2) / log b`.
pub fn runtime_exponent(t: &DbrTable) -> RuntimeSummary {
    let mut m = [BigUint::zero(), BigUint::zero(), BigUint::zero()];
    for (value, &count) in histogram(&t.d).iter().enumerate() {
        if count == 0 {
            continue;
        }
        let class = value % 3;
        let power = BigUint::from(3u32).pow(((value - class) / 3) as u32);
        m[class] += power * count;
    }
    let [m0, m1, m2] = m;
    let weighted = big_to_f64(&m0)
        + 3f64.powf(1.0 / 3.0) * big_to_f64(&m1)
        + 3f64.powf(2.0 / 3.0) * big_to_f64(&m2);
    let alpha = -1.0 + weighted.ln() / (t.base.value as f64).ln();
    RuntimeSummary {
        base: t.base,
        m0,
        m1,
        m2,
        alpha,
    }
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavgSummary {
    #[serde(flatten)]
    pub base: SmoothBase,
    #[serde(serialize_with = "crate::report::biguint")]
    pub dsum: BigUint,
    #[serde(rename = "cavg_ln", serialize_with = "crate::report::sig9")]
    pub bound_ln: f64,
    #[serde(rename = "cavg_log3", serialize_with = "crate::report::sig9")]
    pub bound_log3: f64,
}

/// `sum_r D̂(b, r) / (b log b)`, per `log n` and per `log_3 n`.
pub fn cavg_bound(t: &DbrTable) -> CavgSummary {
    let dsum: u128 = t.d.iter().map(|&v| u128::from(v)).sum();
    let b = t.base.value as f64;
    let bound_ln = dsum as f64 / (b * b.ln());
    CavgSummary {
        base: t.base,
        dsum: BigUint::from(dsum),
        bound_ln,
        bound_log3: bound_ln * 3f64.ln(),
    }
}

/// First `n >= 1` with `f(r + b n) > f(n) + d`, scanning while `r + b n` is
/// inside the table.
pub fn first_dbr_violation(b: u64, r: u64, d: u16, table: &ComplexityTable) -> Option<u64> {
    let limit = table.limit();
    let mut n = 1u64;
    loop {
        let x = b.checked_mul(n).and_then(|v| v.checked_add(r))?;
        if x > limit {
            return None;
        }
        if u16::from(table.f(x)) > u16::from(table.f(n)) + d {
            return Some(n);
        }
        n += 1;
    }
}

/// Whether `f(r + b n) <= f(n) + d` for every `n >= 1` the table covers.
pub fn verify_dbr(base: SmoothBase, r: u64, d: u16, table: &ComplexityTable) -> bool {
    first_dbr_violation(base.value, r, d, table).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Thm21Outcome {
    /// `f(b + r) = f(b) + 1`.
    FirstPass,
    /// `f(b + r) != f(b) + 1` but `f(2b + r) = f(b) + 3`.
    SecondPass,
    Fail,
}

/// Certifies `D(b, r) >= f(b) + 1` for a divisor `2 <= r < b` of `b`.
pub fn verify_thm21(base: SmoothBase, r: u64, table: &ComplexityTable) -> Result<Thm21Outcome> {
    let b = base.value;
    if r < 2 || r >= b || b % r != 0 {
        return Err(Error::invalid(format!(
            "{r} is not a divisor of {b} in 2..{b}"
        )));
    }
    let need = 2 * b + r;
    if table.limit() < need {
        return Err(Error::TableTooSmall {
            need,
            have: table.limit(),
        });
    }
    let fb = table.f(b);
    Ok(if table.f(b + r) == fb + 1 {
        Thm21Outcome::FirstPass
    } else if table.f(2 * b + r) == fb + 3 {
        Thm21Outcome::SecondPass
    } else {
        Thm21Outcome::Fail
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Thm21Sweep {
    pub pairs: u64,
    pub first_pass: u64,
    pub second_pass: u64,
    pub fail: u64,
    /// Pairs where the recursion did not return exactly `f(b) + 1`.
    pub dbr_mismatch: u64,
}

/// Runs [`verify_thm21`] and the `D̂ = f(b) + 1` check for every divisor pair
/// of every 3-smooth `b <= base_limit`.
pub fn thm21_sweep(base_limit: u64, table: &ComplexityTable) -> Result<Thm21Sweep> {
    let mut solver = DbrSolver::new(table);
    let mut sweep = Thm21Sweep::default();
    for base in enumerate_bases(base_limit) {
        let b = base.value;
        for r in base.proper_divisors().iter().map(SmoothBase::value) {
            sweep.pairs += 1;
            match verify_thm21(base, r, table)? {
                Thm21Outcome::FirstPass => sweep.first_pass += 1,
                Thm21Outcome::SecondPass => sweep.second_pass += 1,
                Thm21Outcome::Fail => sweep.fail += 1,
            }
            if solver.calc_dbr(base, r)? != u16::from(table.f(b)) + 1 {
                sweep.dbr_mismatch += 1;
            }
        }
    }
    Ok(sweep)
}
