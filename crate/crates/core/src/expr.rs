//! Expression trees built from `1`, `+` and `*`.
//!
//! Every constructor caches the value and the number of `1` leaves, so a
//! witness can be checked in O(1). [`Expression::evaluate`] and
//! [`Expression::count_ones`] walk the tree again and are meant for tests
//! that should not trust the cache.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    One,
    Sum(Box<Expression>, Box<Expression>),
    Product(Box<Expression>, Box<Expression>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expression {
    node: Node,
    value: u128,
    ones: u32,
}

impl Expression {
    pub fn one() -> Self {
        Expression {
            node: Node::One,
            value: 1,
            ones: 1,
        }
    }

    /// Panics if the value overflows `u128`.
    pub fn sum(left: Expression, right: Expression) -> Self {
        let value = left
            .value
            .checked_add(right.value)
            .expect("expression value overflows u128");
        let ones = left.ones + right.ones;
        Expression {
            node: Node::Sum(Box::new(left), Box::new(right)),
            value,
            ones,
        }
    }

    /// Panics if the value overflows `u128`.
    pub fn product(left: Expression, right: Expression) -> Self {
        let value = left
            .value
            .checked_mul(right.value)
            .expect("expression value overflows u128");
        let ones = left.ones + right.ones;
        Expression {
            node: Node::Product(Box::new(left), Box::new(right)),
            value,
            ones,
        }
    }

    /// `1 + 1 + ... + 1` with `k` leaves (`k >= 1`).
    pub fn ones_sum(k: u32) -> Self {
        assert!(k >= 1, "an expression needs at least one leaf");
        (1..k).fold(Expression::one(), |acc, _| {
            Expression::sum(acc, Expression::one())
        })
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn ones(&self) -> u32 {
        self.ones
    }

    /// Recomputes the value from the leaves, ignoring the cache.
    pub fn evaluate(&self) -> Option<u128> {
        match &self.node {
            Node::One => Some(1),
            Node::Sum(l, r) => l.evaluate()?.checked_add(r.evaluate()?),
            Node::Product(l, r) => l.evaluate()?.checked_mul(r.evaluate()?),
        }
    }

    /// Recounts the leaves, ignoring the cache.
    pub fn count_ones(&self) -> u32 {
        match &self.node {
            Node::One => 1,
            Node::Sum(l, r) | Node::Product(l, r) => l.count_ones() + r.count_ones(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent_is_product: bool) -> fmt::Result {
        match &self.node {
            Node::One => f.write_str("1"),
            Node::Sum(l, r) => {
                if parent_is_product {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, false)?;
                f.write_str("+")?;
                r.fmt_prec(f, false)?;
                if parent_is_product {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Node::Product(l, r) => {
                l.fmt_prec(f, true)?;
                f.write_str("*")?;
                r.fmt_prec(f, true)
            }
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}
