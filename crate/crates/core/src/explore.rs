//! Strip-and-divide exploration on arbitrary-precision integers.
//!
//! Writing `n = k + d*m` with `k = n mod d` costs `k + f(d)` ones plus the
//! cost of `m`. Repeating until `m` has a sparse binary expansion and then
//! applying the binary Horner scheme gives an explicit upper bound on `f(n)`.
//! A value counts as "nice" once its ones-fraction is at most the threshold.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::complexity::compute_table;
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.55;
pub const DEFAULT_MAX_STEPS: usize = 64;
/// Largest divisor accepted by [`divide_chain`]; its complexity is computed exactly.
pub const MAX_DIVISOR: u64 = 1_000_000;
/// Parsed values are capped at this many bits.
pub const MAX_BITS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub negative: bool,
    pub coeff: BigUint,
    /// `base ^ exponent`, multiplied into `coeff`.
    pub power: Option<(BigUint, u32)>,
}

impl Term {
    fn value(&self) -> BigUint {
        match &self.power {
            Some((base, exp)) => &self.coeff * base.pow(*exp),
            None => self.coeff.clone(),
        }
    }
}

/// A signed sum of terms `c`, `a^e` or `c*a^e`, with its exact value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigExpr {
    terms: Vec<Term>,
    value: BigUint,
}

impl BigExpr {
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }
}

impl fmt::Display for BigExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            match (i, t.negative) {
                (0, _) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match &t.power {
                None => write!(f, "{}", t.coeff)?,
                Some((base, exp)) if t.coeff == BigUint::from(1u32) => write!(f, "{base}^{exp}")?,
                Some((base, exp)) => write!(f, "{}*{base}^{exp}", t.coeff)?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos,
            msg: msg.into(),
        })
    }

    fn int(&mut self) -> Result<(usize, BigUint)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.src.get(start) {
                Some(&c) => self.error(start, format!("expected integer, found '{}'", c as char)),
                None => self.error(start, "expected integer, found end of input"),
            };
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let value = digits.parse::<BigUint>().expect("ascii digits");
        Ok((start, value))
    }

    fn exponent(&mut self, base: &BigUint) -> Result<u32> {
        let (pos, e) = self.int()?;
        let exp = e
            .to_u32()
            .ok_or(())
            .or_else(|_| self.error(pos, "exponent too large"))?;
        if base.bits().saturating_mul(u64::from(exp)) > MAX_BITS {
            return self.error(pos, format!("result would exceed {MAX_BITS} bits"));
        }
        Ok(exp)
    }

    fn term(&mut self, negative: bool) -> Result<Term> {
        let (_, first) = self.int()?;
        match self.peek() {
            Some(b'^') => {
                self.pos += 1;
                let exp = self.exponent(&first)?;
                Ok(Term {
                    negative,
                    coeff: BigUint::from(1u32),
                    power: Some((first, exp)),
                })
            }
            Some(b'*') => {
                self.pos += 1;
                let (_, base) = self.int()?;
                match self.peek() {
                    Some(b'^') => self.pos += 1,
                    _ => return self.error(self.pos, "expected '^' after 'INT*INT'"),
                }
                let exp = self.exponent(&base)?;
                Ok(Term {
                    negative,
                    coeff: first,
                    power: Some((base, exp)),
                })
            }
            _ => Ok(Term {
                negative,
                coeff: first,
                power: None,
            }),
        }
    }
}

/// Parses `term (('+'|'-') term)*` where `term` is `INT`, `INT^INT` or
/// `INT*INT^INT`. The value must be positive.
pub fn parse_bigexpr(text: &str) -> Result<BigExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut terms = vec![p.term(false)?];
    loop {
        match p.peek() {
            None => break,
            Some(b'+') => {
                p.pos += 1;
                terms.push(p.term(false)?);
            }
            Some(b'-') => {
                p.pos += 1;
                terms.push(p.term(true)?);
            }
            Some(c) => return p.error(p.pos, format!("unexpected '{}'", c as char)),
        }
    }
    let mut total = BigInt::zero();
    for t in &terms {
        let v = BigInt::from(t.value());
        if t.negative {
            total -= v;
        } else {
            total += v;
        }
    }
    if total.sign() != Sign::Plus {
        return Err(Error::Parse {
            pos: 0,
            msg: format!("expression evaluates to {total}, which is not positive"),
        });
    }
    Ok(BigExpr {
        terms,
        value: total.magnitude().clone(),
    })
}

/// `popcount(n) / bit_length(n)`.
pub fn ones_fraction(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "ones_fraction needs n >= 1");
    n.count_ones() as f64 / n.bits() as f64
}

/// `1 + 2(k - 1) + (s - 1)` for bit length `k` and popcount `s`.
pub fn guy_binary_big(n: &BigUint) -> u64 {
    assert!(!n.is_zero(), "guy_binary_big needs n >= 1");
    1 + 2 * (n.bits() - 1) + (n.count_ones() - 1)
}

pub fn residues(n: &BigUint, moduli: &[u64]) -> Result<Vec<u64>> {
    moduli
        .iter()
        .map(|&m| {
            if m < 2 {
                Err(Error::invalid(format!("modulus {m} must be >= 2")))
            } else {
                Ok((n % m).to_u64().expect("residue below a u64 modulus"))
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub i: usize,
    pub bits: u64,
    pub ones: u64,
    #[serde(serialize_with = "crate::report::sig9")]
    pub fraction: f64,
    pub r_mod_d: u64,
    pub r_mod_3: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Ones-fraction at or below the threshold.
    Nice,
    /// The value dropped below the divisor; dividing further would reach 0.
    BelowDivisor,
    /// `max_steps` divisions without reaching a nice value.
    Budget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivideTrace {
    pub divisor: u64,
    pub threshold: f64,
    /// `f(divisor)`.
    pub divisor_cost: u64,
    /// One record per value `n_0, n_1, ...`, ending at the stopping value.
    pub steps: Vec<StepRecord>,
    /// Number of divisions performed.
    pub iterations: usize,
    pub stop: StopReason,
    /// Ones spent on the divisions: the sum of `k_i + f(d)`.
    pub cost_so_far: u64,
    values: Vec<BigUint>,
}

impl DivideTrace {
    /// `n_0, ..., n_iterations`.
    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn final_value(&self) -> &BigUint {
        self.values.last().expect("trace holds n_0")
    }

    /// `n_i mod 3` for every recorded value.
    pub fn residue_chain_mod3(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.r_mod_3).collect()
    }
}

fn record(i: usize, n: &BigUint, d: u64) -> StepRecord {
    StepRecord {
        i,
        bits: n.bits(),
        ones: n.count_ones(),
        fraction: ones_fraction(n),
        r_mod_d: (n % d).to_u64().expect("small residue"),
        r_mod_3: (n % 3u32).to_u64().expect("small residue"),
    }
}

/// Iterates `n_{i+1} = (n_i - n_i mod d) / d` until `n_i` is nice, falls
/// below `d`, or `max_steps` divisions have been done.
pub fn divide_chain(n: &BigUint, d: u64, threshold: f64, max_steps: usize) -> Result<DivideTrace> {
    if n.is_zero() {
        return Err(Error::invalid("divide_chain needs n >= 1"));
    }
    if !(2..=MAX_DIVISOR).contains(&d) {
        return Err(Error::invalid(format!(
            "divisor {d} not in 2..={MAX_DIVISOR}"
        )));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(format!(
            "threshold {threshold} not in (0, 1)"
        )));
    }
    let divisor_cost = u64::from(compute_table(d)?.f(d));
    let mut values = vec![n.clone()];
    let mut steps = vec![record(0, n, d)];
    let mut cost = 0u64;
    let stop = loop {
        let i = steps.len() - 1;
        let last = &steps[i];
        if last.fraction <= threshold {
            break StopReason::Nice;
        }
        let current = &values[i];
        if *current < BigUint::from(d) {
            break StopReason::BelowDivisor;
        }
        if i >= max_steps {
            break StopReason::Budget;
        }
        cost += last.r_mod_d + divisor_cost;
        let next = (current - last.r_mod_d) / d;
        steps.push(record(i + 1, &next, d));
        values.push(next);
    };
    Ok(DivideTrace {
        divisor: d,
        threshold,
        divisor_cost,
        iterations: steps.len() - 1,
        steps,
        stop,
        cost_so_far: cost,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainBound {
    pub bits: u64,
    pub divisions: u64,
    pub final_cost: u64,
    /// Upper bound on `f(n_0)`.
    pub total: u64,
}

/// `cost_so_far` plus the binary Horner cost of the final value.
pub fn chain_bound(trace: &DivideTrace) -> ChainBound {
    let final_cost = guy_binary_big(trace.final_value());
    ChainBound {
        bits: trace.values[0].bits(),
        divisions: trace.cost_so_far,
        final_cost,
        total: trace.cost_so_far + final_cost,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisorSummary {
    pub divisor: u64,
    pub residue: u64,
    pub iterations: usize,
    pub stop: StopReason,
    #[serde(serialize_with = "crate::report::sig9")]
    pub first_quotient_fraction: f64,
    pub total: u64,
}

/// Runs one chain per divisor for side-by-side comparison.
pub fn compare_divisors(
    n: &BigUint,
    divisors: &[u64],
    threshold: f64,
    max_steps: usize,
) -> Result<Vec<DivisorSummary>> {
    divisors
        .iter()
        .map(|&d| {
            let trace = divide_chain(n, d, threshold, max_steps)?;
            let residue = trace.steps[0].r_mod_d;
            let q = (n - residue) / d;
            let first_quotient_fraction = if q.is_zero() { 0.0 } else { ones_fraction(&q) };
            Ok(DivisorSummary {
                divisor: d,
                residue,
                iterations: trace.iterations,
                stop: trace.stop,
                first_quotient_fraction,
                total: chain_bound(&trace).total,
            })
        })
        .collect()
}
