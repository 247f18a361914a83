//! Greedy upper bounds on `f(n)` and the summand-cutoff experiments.
//!
//! * Steinerberger's mod-6 recursion ([`steinerberger`]) and Guy's binary
//!   Horner scheme ([`guy_binary`]) give explicit representations, hence
//!   upper bounds.
//! * If `f(n) = f(a) + f(n - a)` and `f(n) <= c log_3 n`, the lower bound
//!   `f(x) >= 3 log_3 x` forces `a <= 2 n^(c/3 - 1)`. [`summand_limit`] turns
//!   a bound constant into such a cutoff and [`improvement_experiment`]
//!   counts how often it beats the sieve's own cutoff.

use serde::{Serialize, Serializer};

use crate::complexity::{kmax_from_target, relax_products, relax_sums, ComplexityTable, MAX_VALUE};
use crate::error::{Error, Result};
use crate::expr::Expression;

/// Greedy counts `g(1..=N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyTable {
    g: Vec<u16>,
}

impl GreedyTable {
    pub fn build(limit: u64) -> Result<Self> {
        let len = usize::try_from(limit)
            .ok()
            .and_then(|l| l.checked_add(1))
            .ok_or(Error::Allocation(limit))?;
        let mut g = Vec::new();
        g.try_reserve_exact(len)
            .map_err(|_| Error::Allocation(limit))?;
        g.push(0);
        for n in 1..len as u64 {
            let v = match greedy_step(n) {
                GreedyStep::Leaf => n as u16,
                GreedyStep::Step { cost, next, .. } => cost as u16 + g[next as usize],
            };
            g.push(v);
        }
        Ok(GreedyTable { g })
    }

    pub fn limit(&self) -> u64 {
        (self.g.len() - 1) as u64
    }

    pub fn get(&self, n: u64) -> Option<u32> {
        if n == 0 {
            None
        } else {
            self.g.get(n as usize).map(|&v| u32::from(v))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GreedyStep {
    /// `n <= 5`, written as `1 + ... + 1`.
    Leaf,
    /// `n = add + mul * next`, costing `cost` ones beyond `g(next)`.
    Step {
        add: u32,
        mul: u32,
        cost: u32,
        next: u64,
    },
}

fn greedy_step(n: u64) -> GreedyStep {
    if n <= 5 {
        return GreedyStep::Leaf;
    }
    let (add, mul, cost, next) = match n % 6 {
        0 | 3 => (0, 3, 3, n / 3),
        2 | 4 => (0, 2, 2, n / 2),
        1 => (1, 3, 4, (n - 1) / 3),
        _ => (1, 2, 3, (n - 1) / 2),
    };
    GreedyStep::Step {
        add,
        mul,
        cost,
        next,
    }
}

/// `g(n)`: `n` for `n <= 5`; otherwise by `n mod 6`: `{0,3}` -> `3 + g(n/3)`,
/// `{2,4}` -> `2 + g(n/2)`, `1` -> `4 + g((n-1)/3)`, `5` -> `3 + g((n-1)/2)`.
/// Uses `cache` once the recursion falls inside it.
pub fn steinerberger(n: u64, cache: &GreedyTable) -> u32 {
    let mut total = 0;
    let mut n = n;
    loop {
        if let Some(v) = cache.get(n) {
            return total + v;
        }
        match greedy_step(n) {
            GreedyStep::Leaf => return total + n as u32,
            GreedyStep::Step { cost, next, .. } => {
                total += cost;
                n = next;
            }
        }
    }
}

/// The representation behind [`steinerberger`]; it has exactly `g(n)` leaves.
pub fn greedy_expression(n: u64) -> Expression {
    assert!(n >= 1, "greedy_expression needs n >= 1");
    match greedy_step(n) {
        GreedyStep::Leaf => Expression::ones_sum(n as u32),
        GreedyStep::Step { add, mul, next, .. } => {
            let prod = Expression::product(Expression::ones_sum(mul), greedy_expression(next));
            if add == 0 {
                prod
            } else {
                Expression::sum(Expression::ones_sum(add), prod)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuyRepresentation {
    pub count: u32,
    pub expr: Expression,
}

/// `1 + 2(k - 1) + (s - 1)` for a `k`-bit `n` with `s` ones.
pub fn guy_count(n: u128) -> u32 {
    assert!(n >= 1, "guy_count needs n >= 1");
    let k = 128 - n.leading_zeros();
    let s = n.count_ones();
    1 + 2 * (k - 1) + (s - 1)
}

/// Horner evaluation of the binary digits: start from the leading `1`, then
/// per remaining bit double with `(1+1)*x` and add `1` when the bit is set.
pub fn guy_binary(n: u128) -> GuyRepresentation {
    assert!(n >= 1, "guy_binary needs n >= 1");
    let k = 128 - n.leading_zeros();
    let mut expr = Expression::one();
    for i in (0..k - 1).rev() {
        expr = Expression::product(Expression::ones_sum(2), expr);
        if (n >> i) & 1 == 1 {
            expr = Expression::sum(Expression::one(), expr);
        }
    }
    GuyRepresentation {
        count: expr.ones(),
        expr,
    }
}

/// Guy-method constant per `log_3 n` when a fraction `p1` of the bits are ones.
pub fn guy_constant(p1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::invalid(format!("ones fraction {p1} not in [0, 1]")));
    }
    Ok((3.0 * p1 + 2.0 * (1.0 - p1)) * 3f64.ln() / 2f64.ln())
}

pub const DEFAULT_EPSILON_GUARD: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SummandMode {
    /// `floor(2 n^(c/3 - 1))`.
    Theoretical { c: f64 },
    /// `ceil(n^β)`, `β = (g(n)/log_3 n + guard)/3 - 1`.
    GreedyPerN,
    /// `ceil(n^(c/3 - 1))`: a uniform `f(n) <= c log_3 n` alone.
    Uniform { c: f64 },
    /// `ceil(n^min(c/3 - 1, β))`.
    UniformMin { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummandBoundSpec {
    pub mode: SummandMode,
    pub epsilon_guard: f64,
}

impl SummandBoundSpec {
    pub fn theoretical(c: f64) -> Self {
        Self::with_mode(SummandMode::Theoretical { c })
    }

    pub fn greedy_per_n() -> Self {
        Self::with_mode(SummandMode::GreedyPerN)
    }

    pub fn uniform(c: f64) -> Self {
        Self::with_mode(SummandMode::Uniform { c })
    }

    pub fn uniform_min(c: f64) -> Self {
        Self::with_mode(SummandMode::UniformMin { c })
    }

    fn with_mode(mode: SummandMode) -> Self {
        SummandBoundSpec {
            mode,
            epsilon_guard: DEFAULT_EPSILON_GUARD,
        }
    }

    /// Rejects constants `c <= 3` (non-positive exponent) and bad guards.
    pub fn validate(&self) -> Result<()> {
        if !self.epsilon_guard.is_finite() || self.epsilon_guard < 0.0 {
            return Err(Error::invalid(format!(
                "epsilon guard {} must be finite and non-negative",
                self.epsilon_guard
            )));
        }
        match self.mode {
            SummandMode::Theoretical { c }
            | SummandMode::Uniform { c }
            | SummandMode::UniformMin { c }
                if !(c.is_finite() && c > 3.0) =>
            {
                Err(Error::invalid(format!("bound constant {c} must exceed 3")))
            }
            _ => Ok(()),
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            SummandMode::Theoretical { .. } => "theoretical",
            SummandMode::GreedyPerN => "greedy",
            SummandMode::Uniform { .. } => "uniform",
            SummandMode::UniformMin { .. } => "uniform-min",
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self.mode {
            SummandMode::Theoretical { c }
            | SummandMode::Uniform { c }
            | SummandMode::UniformMin { c } => Some(c),
            SummandMode::GreedyPerN => None,
        }
    }

    fn needs_greedy(&self) -> bool {
        matches!(
            self.mode,
            SummandMode::GreedyPerN | SummandMode::UniformMin { .. }
        )
    }
}

impl Serialize for SummandBoundSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SummandBoundSpec", 2)?;
        st.serialize_field("c", &self.constant())?;
        st.serialize_field("epsilon_guard", &self.epsilon_guard)?;
        st.end()
    }
}

/// Exponent `c/3 - 1` a bound `f(n) <= c log_3 n` puts on summands.
pub fn summand_exponent(c: f64) -> f64 {
    c / 3.0 - 1.0
}

fn greedy_exponent(n: u64, g: u32, guard: f64) -> f64 {
    let log3n = (n as f64).ln() / 3f64.ln();
    (f64::from(g) / log3n + guard) / 3.0 - 1.0
}

fn ceil_pow(n: u64, exponent: f64) -> u64 {
    if exponent <= 0.0 {
        1
    } else {
        (n as f64).powf(exponent).ceil() as u64
    }
}

/// Largest summand that needs checking for `n` under `spec`. A non-positive
/// exponent yields 1, i.e. no sums beyond `f(n-1) + 1`.
pub fn summand_limit(n: u64, spec: &SummandBoundSpec, greedy: Option<&GreedyTable>) -> Result<u64> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "summand_limit needs n >= 2, got {n}"
        )));
    }
    let g = || -> Result<u32> {
        greedy.and_then(|t| t.get(n)).ok_or(Error::TableTooSmall {
            need: n,
            have: greedy.map_or(0, GreedyTable::limit),
        })
    };
    Ok(match spec.mode {
        SummandMode::Theoretical { c } => {
            let e = summand_exponent(c);
            if e <= 0.0 {
                1
            } else {
                (2.0 * (n as f64).powf(e)).floor() as u64
            }
        }
        SummandMode::GreedyPerN => ceil_pow(n, greedy_exponent(n, g()?, spec.epsilon_guard)),
        SummandMode::Uniform { c } => ceil_pow(n, summand_exponent(c)),
        SummandMode::UniformMin { c } => {
            let e = summand_exponent(c).min(greedy_exponent(n, g()?, spec.epsilon_guard));
            ceil_pow(n, e)
        }
    })
}

/// How many examples of improved `n` a report keeps.
pub const REPORTED_EXAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImprovementReport {
    #[serde(rename = "N")]
    pub limit: u64,
    pub mode: &'static str,
    pub params: SummandBoundSpec,
    pub improved: u64,
    pub first_improved_examples: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: ImprovementReport,
    /// The table as built with the clamped summand loop.
    pub table: ComplexityTable,
}

/// Largest `N` accepted by [`improvement_experiment`].
pub const EXPERIMENT_LIMIT: u64 = 20_000_000;

/// Runs the sieve while counting how often `summand_limit < kmax`. The sum
/// loop uses `min(kmax, summand_limit)`, so the returned table shows whether
/// the clamp preserved every value.
pub fn improvement_experiment(limit: u64, spec: &SummandBoundSpec) -> Result<ExperimentOutcome> {
    improvement_experiment_with(limit, spec, |_, _, _| {})
}

/// As [`improvement_experiment`], calling `observe(n, kmax, summand_limit)` for
/// every `n >= 2`.
pub fn improvement_experiment_with<F>(
    limit: u64,
    spec: &SummandBoundSpec,
    mut observe: F,
) -> Result<ExperimentOutcome>
where
    F: FnMut(u64, u64, u64),
{
    if !(1..=EXPERIMENT_LIMIT).contains(&limit) {
        return Err(Error::LimitOutOfRange {
            limit,
            min: 1,
            max: EXPERIMENT_LIMIT,
        });
    }
    spec.validate()?;
    let greedy = if spec.needs_greedy() {
        Some(GreedyTable::build(limit)?)
    } else {
        None
    };
    let len = limit as usize + 1;
    let mut values = Vec::new();
    values
        .try_reserve_exact(len)
        .map_err(|_| Error::Allocation(limit))?;
    values.resize(len, MAX_VALUE);
    values[0] = 0;
    values[1] = 1;

    let mut improved = 0u64;
    let mut examples = Vec::new();
    for n in 2..len {
        let n64 = n as u64;
        let limitm = kmax_from_target(n64, values[n - 1]);
        let up_to = summand_limit(n64, spec, greedy.as_ref())?;
        observe(n64, limitm, up_to);
        if up_to < limitm {
            improved += 1;
            if examples.len() < REPORTED_EXAMPLES {
                examples.push(n64);
            }
        }
        relax_sums(&mut values, n, limitm.min(up_to));
        relax_products(&mut values, n);
    }
    Ok(ExperimentOutcome {
        report: ImprovementReport {
            limit,
            mode: spec.mode_name(),
            params: *spec,
            improved,
            first_improved_examples: examples,
        },
        table: ComplexityTable::from_dense(values),
    })
}
