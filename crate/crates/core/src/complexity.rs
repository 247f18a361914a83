//! Exact integer complexity `f(n)`: the least number of `1`s that express `n`
//! with `+`, `*` and parentheses.
//!
//! [`compute_table`] is the sieve used for real work: additions are checked
//! only up to a per-`n` summand cutoff derived from [`max_product`], and
//! products are pushed forward from each finished entry. [`brute_force_table`]
//! evaluates the full recursion and exists to cross-check the sieve.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expression;

/// Largest complexity an entry may hold. Also the initial value of every
/// cell before the sieve lowers it.
pub const MAX_VALUE: u8 = 127;

/// Largest limit accepted by [`brute_force_table`].
pub const ORACLE_LIMIT: u64 = 100_000;

/// Exact `f(n)` for `1 <= n <= limit`, one byte per entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityTable {
    // values[0] is never read.
    values: Vec<u8>,
}

impl ComplexityTable {
    /// Wraps `values[1..=N]`; `values[0]` is ignored.
    pub(crate) fn from_dense(values: Vec<u8>) -> Self {
        debug_assert!(values.len() >= 2);
        ComplexityTable { values }
    }

    /// Builds a table from `f(1), f(2), ...`, checking the entries are in range.
    pub fn from_values(entries: &[u8]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Format("table must hold at least f(1)".into()));
        }
        if entries[0] != 1 {
            return Err(Error::Format(format!(
                "f(1) must be 1, found {}",
                entries[0]
            )));
        }
        if let Some((i, v)) = entries
            .iter()
            .enumerate()
            .find(|(_, &v)| v == 0 || v > MAX_VALUE)
        {
            return Err(Error::Format(format!(
                "f({}) = {} is out of range",
                i + 1,
                v
            )));
        }
        let mut values = Vec::with_capacity(entries.len() + 1);
        values.push(0);
        values.extend_from_slice(entries);
        Ok(ComplexityTable { values })
    }

    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    /// `f(n)`; panics when `n` is 0 or beyond the limit.
    #[inline]
    pub fn f(&self, n: u64) -> u8 {
        assert!(n >= 1, "f(0) is undefined");
        self.values[n as usize]
    }

    pub fn get(&self, n: u64) -> Option<u8> {
        if n == 0 {
            None
        } else {
            self.values.get(n as usize).copied()
        }
    }

    /// `f(1), ..., f(limit)`.
    pub fn as_slice(&self) -> &[u8] {
        &self.values[1..]
    }

    pub(crate) fn check_index(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit() {
            Err(Error::OutOfTable {
                index: n,
                limit: self.limit(),
            })
        } else {
            Ok(())
        }
    }
}

/// `E(k)`: the largest product of positive integers summing to `k`
/// (OEIS A000792). `E(0) = 1`.
pub fn max_product(k: u32) -> u128 {
    let mut k = k;
    let mut result: u128 = 1;
    while k >= 5 || k == 3 {
        result *= 3;
        k -= 3;
    }
    result << (k / 2)
}

/// Inclusive upper limit of the summand loop for `n`.
///
/// With `target = f(n-1)`, walks `k` down from `target / 2` until
/// `E(k) + E(target - k) >= n` and returns `E(k)`. Requires the table to be
/// exact on `1..n`.
pub fn kmax(n: u64, table: &ComplexityTable) -> Result<u64> {
    if n < 2 {
        return Err(Error::invalid(format!("kmax needs n >= 2, got {n}")));
    }
    table.check_index(n - 1)?;
    Ok(kmax_from_target(n, table.f(n - 1)))
}

#[inline]
pub(crate) fn kmax_from_target(n: u64, target: u8) -> u64 {
    let target = u32::from(target);
    let n = u128::from(n);
    let mut k = target / 2;
    // k = 0 always terminates: E(f(n-1)) >= n-1.
    while k > 0 && max_product(k) + max_product(target - k) < n {
        k -= 1;
    }
    max_product(k) as u64
}

fn allocate(limit: u64) -> Result<Vec<u8>> {
    let len = usize::try_from(limit)
        .ok()
        .and_then(|l| l.checked_add(1))
        .ok_or(Error::Allocation(limit))?;
    let mut values = Vec::new();
    values
        .try_reserve_exact(len)
        .map_err(|_| Error::Allocation(limit))?;
    values.resize(len, MAX_VALUE);
    values[0] = 0;
    values[1] = 1;
    Ok(values)
}

/// Runs the addition step for `n`: `f(n-1) + 1`, then `f(m) + f(n-m)` for
/// `6 <= m <= min(upper, n/2)`. `m = 1` is the first check; `m = 2..5` can
/// never beat it.
#[inline]
pub(crate) fn relax_sums(values: &mut [u8], n: usize, upper: u64) {
    let step = values[n - 1] + 1;
    if values[n] > step {
        values[n] = step;
    }
    let upper = (upper as usize).min(n / 2);
    let mut best = values[n];
    for m in 6..=upper {
        let s = values[m] + values[n - m];
        if s < best {
            best = s;
        }
    }
    values[n] = best;
}

/// Pushes `f(m) + f(n)` forward to every `m*n <= limit` with `2 <= m <= n`.
#[inline]
pub(crate) fn relax_products(values: &mut [u8], n: usize) {
    let limit = values.len() - 1;
    let fnv = values[n];
    let mut m = 2;
    while m <= n {
        let Some(mn) = m.checked_mul(n) else { break };
        if mn > limit {
            break;
        }
        let s = values[m] + fnv;
        if values[mn] > s {
            values[mn] = s;
        }
        m += 1;
    }
}

/// Exact `f(n)` for all `n <= limit` using the summand-cutoff sieve.
pub fn compute_table(limit: u64) -> Result<ComplexityTable> {
    if limit == 0 {
        return Err(Error::LimitOutOfRange {
            limit,
            min: 1,
            max: u64::MAX,
        });
    }
    let mut values = allocate(limit)?;
    let len = values.len();
    for n in 2..len {
        let upper = kmax_from_target(n as u64, values[n - 1]);
        relax_sums(&mut values, n, upper);
        relax_products(&mut values, n);
    }
    Ok(ComplexityTable::from_dense(values))
}

/// Direct evaluation of the defining recursion: every divisor `2 <= d <= sqrt(n)`
/// and every summand `1 <= a <= n/2`. Quadratic, so capped at [`ORACLE_LIMIT`].
pub fn brute_force_table(limit: u64) -> Result<ComplexityTable> {
    if !(1..=ORACLE_LIMIT).contains(&limit) {
        return Err(Error::LimitOutOfRange {
            limit,
            min: 1,
            max: ORACLE_LIMIT,
        });
    }
    let mut values = allocate(limit)?;
    for n in 2..=limit as usize {
        let mut best = MAX_VALUE;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                best = best.min(values[d] + values[n / d]);
            }
            d += 1;
        }
        for a in 1..=n / 2 {
            best = best.min(values[a] + values[n - a]);
        }
        values[n] = best;
    }
    Ok(ComplexityTable::from_dense(values))
}

/// Reconstructs an optimal expression for `n` from the table.
///
/// Tries, in order: `n = 1`; `(n-1) + 1`; a divisor `d <= sqrt(n)`; a summand
/// `6 <= m <= kmax(n)`. One of them reproduces `f(n)` whenever the table came
/// from [`compute_table`].
pub fn witness(n: u64, table: &ComplexityTable) -> Result<Expression> {
    table.check_index(n)?;
    build_witness(n, table)
}

fn build_witness(n: u64, table: &ComplexityTable) -> Result<Expression> {
    if n == 1 {
        return Ok(Expression::one());
    }
    let target = table.f(n);
    if table.f(n - 1) + 1 == target {
        return Ok(Expression::sum(
            build_witness(n - 1, table)?,
            Expression::one(),
        ));
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 && table.f(d) + table.f(n / d) == target {
            return Ok(Expression::product(
                build_witness(d, table)?,
                build_witness(n / d, table)?,
            ));
        }
        d += 1;
    }
    let upper = kmax_from_target(n, table.f(n - 1)).min(n / 2);
    for m in 6..=upper {
        if table.f(m) + table.f(n - m) == target {
            return Ok(Expression::sum(
                build_witness(m, table)?,
                build_witness(n - m, table)?,
            ));
        }
    }
    Err(Error::Inconsistent(n))
}

/// `log_3(n)`, exact for powers of three.
pub fn log3(n: u64) -> f64 {
    let mut p = 1u64;
    let mut k = 0u32;
    while p < n {
        match p.checked_mul(3) {
            Some(next) => {
                p = next;
                k += 1;
            }
            None => break,
        }
    }
    if p == n {
        f64::from(k)
    } else {
        (n as f64).ln() / 3f64.ln()
    }
}

/// `3 log_3(n) <= value`, decided exactly as `n^3 <= 3^value`.
pub fn meets_lower_bound(n: u64, value: u32) -> bool {
    BigUint::from(n).pow(3) <= BigUint::from(3u32).pow(value)
}

/// `value <= 3 log_2(n)`, decided exactly as `2^value <= n^3`.
pub fn meets_upper_bound(n: u64, value: u32) -> bool {
    BigUint::from(1u32) << value <= BigUint::from(n).pow(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectStat {
    pub n: u64,
    #[serde(serialize_with = "crate::report::sig9")]
    pub defect: f64,
}

/// `f(n) - 3 log_3(n)`.
pub fn defect(n: u64, table: &ComplexityTable) -> Result<DefectStat> {
    table.check_index(n)?;
    let d = f64::from(table.f(n)) - 3.0 * log3(n);
    Ok(DefectStat {
        n,
        defect: d.max(0.0),
    })
}
