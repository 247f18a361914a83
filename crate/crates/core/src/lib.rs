//! Integer complexity: exact tables of `f(n)`, the least number of `1`s that
//! write `n` with `+`, `*` and parentheses, together with the tools built on
//! top of them.
//!
//! - [`complexity`]: the summand-cutoff sieve, a brute-force oracle, witness
//!   expressions and the defect `f(n) - 3 log_3 n`.
//! - [`table_io`]: the `ICX1` on-disk table format.
//! - [`dbr`]: `D̂(b, r)` rows for 3-smooth bases, the runtime exponent and
//!   the density-one bound.
//! - [`strategies`]: greedy and binary-Horner upper bounds, summand cutoffs
//!   and the improvement-count experiments.
//! - [`balance`]: digit-balance censuses, Hoeffding and KL exponents.
//! - [`explore`]: strip-and-divide chains on big integers.

pub mod balance;
pub mod complexity;
pub mod dbr;
pub mod error;
pub mod explore;
pub mod expr;
pub mod report;
pub mod strategies;
pub mod table_io;

pub use complexity::{
    brute_force_table, compute_table, defect, kmax, max_product, witness, ComplexityTable,
    DefectStat,
};
pub use dbr::{
    cavg_bound, enumerate_bases, runtime_exponent, verify_dbr, verify_thm21, CavgSummary,
    DbrSolver, DbrTable, RuntimeSummary, SmoothBase, Thm21Outcome,
};
pub use error::{Error, Result};
pub use expr::Expression;
pub use strategies::{
    guy_binary, guy_constant, improvement_experiment, steinerberger, summand_limit, GreedyTable,
    ImprovementReport, SummandBoundSpec, SummandMode,
};
