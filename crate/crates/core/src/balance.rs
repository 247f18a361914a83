//! Digit-balance statistics: how many `n <= N` have some base-`b` digit whose
//! frequency strays at least `eps` from `1/b`, against the Hoeffding-style
//! bound `N^(1 - 2 eps^2 / log b)`, plus the Bernoulli KL exponent used for
//! binary ones-fractions.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceParams {
    #[serde(rename = "b")]
    pub base: u32,
    pub eps: f64,
    #[serde(rename = "N")]
    pub limit: u64,
}

/// Largest `N` accepted by [`unbalanced_census`].
pub const CENSUS_LIMIT: u64 = 1 << 24;

impl BalanceParams {
    pub fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return Err(Error::invalid(format!("base {} must be >= 2", self.base)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid(format!("eps {} must be positive", self.eps)));
        }
        if !(1..=CENSUS_LIMIT).contains(&self.limit) {
            return Err(Error::LimitOutOfRange {
                limit: self.limit,
                min: 1,
                max: CENSUS_LIMIT,
            });
        }
        Ok(())
    }
}

/// How the digit length of each `n` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DigitConvention {
    /// Each number's own expansion, without leading zeros.
    TrueLength,
    /// Every number zero-padded to the digit length of `N`.
    Padded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceReport {
    #[serde(flatten)]
    pub params: BalanceParams,
    pub empirical: u64,
    #[serde(serialize_with = "crate::report::sig9")]
    pub bound: f64,
    pub convention: DigitConvention,
}

/// Counts of each digit `0..b` in the base-`b` expansion of `n`.
pub fn digit_histogram(n: u64, b: u32) -> Vec<u64> {
    assert!(n >= 1 && b >= 2, "digit_histogram needs n >= 1 and b >= 2");
    let mut hist = vec![0u64; b as usize];
    let b = u64::from(b);
    let mut n = n;
    while n > 0 {
        hist[(n % b) as usize] += 1;
        n /= b;
    }
    hist
}

/// `max_d |count_d / len - 1/b|`.
pub fn max_deviation(hist: &[u64]) -> f64 {
    let len: u64 = hist.iter().sum();
    let b = hist.len() as u64;
    // |b*count - len| / (b*len), computed from exact integers.
    let denom = (b * len) as f64;
    hist.iter()
        .map(|&c| (b * c).abs_diff(len) as f64 / denom)
        .fold(0.0, f64::max)
}

/// `2 eps^2 / log b`; the unbalanced count is at most `N^(1 - this)`.
pub fn hoeffding_exponent(b: u32, eps: f64) -> f64 {
    2.0 * eps * eps / f64::from(b).ln()
}

/// `D(p || q) = p log(p/q) + (1-p) log((1-p)/(1-q))` in nats.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    let open = |x: f64| x > 0.0 && x < 1.0;
    if !open(p) || !open(q) {
        return Err(Error::invalid(format!(
            "kl_bernoulli needs p, q in (0, 1), got p={p}, q={q}"
        )));
    }
    Ok(p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln())
}

/// `1 - D(p1 || 1/2) / log 2`: binary numbers with ones-fraction at least
/// `p1` number at most `N` to this power.
pub fn bad_set_exponent_binary(p1: f64) -> Result<f64> {
    if !(p1 > 0.5 && p1 < 1.0) {
        return Err(Error::invalid(format!("p1 = {p1} must lie in (1/2, 1)")));
    }
    Ok(1.0 - kl_bernoulli(p1, 0.5)? / 2f64.ln())
}

pub fn is_unbalanced(n: u64, b: u32, eps: f64) -> bool {
    max_deviation(&digit_histogram(n, b)) >= eps
}

/// Counts `1 <= n <= N` whose digits are unbalanced, using true lengths.
pub fn unbalanced_census(params: BalanceParams) -> Result<BalanceReport> {
    census_with(params, DigitConvention::TrueLength)
}

pub fn census_with(params: BalanceParams, convention: DigitConvention) -> Result<BalanceReport> {
    params.validate()?;
    let BalanceParams { base, eps, limit } = params;
    let width = digit_histogram(limit, base).iter().sum::<u64>();
    let empirical = (1..=limit)
        .into_par_iter()
        .filter(|&n| {
            let mut hist = digit_histogram(n, base);
            if convention == DigitConvention::Padded {
                let len: u64 = hist.iter().sum();
                hist[0] += width - len;
            }
            max_deviation(&hist) >= eps
        })
        .count() as u64;
    let bound = (limit as f64).powf(1.0 - hoeffding_exponent(base, eps));
    Ok(BalanceReport {
        params,
        empirical,
        bound,
        convention,
    })
}
