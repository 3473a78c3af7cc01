//! Exact arithmetic kernel: rationals, sparse multivariate polynomials,
//! normalized rational functions, and the expression parser.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here may be shared freely across threads.

mod expr;
mod parse;
mod poly;

pub use expr::ScalarExpr;
pub use parse::{parse_expr, parse_rational, ParseError};
pub use poly::Poly;

use std::fmt;
use std::sync::Arc;

use num::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

/// Exact rational number: arbitrary-precision, always reduced, denominator
/// positive. Those invariants are maintained by the underlying
/// representation on every operation.
pub type Rational = num::BigRational;

/// `n` as a [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` as a [`Rational`]. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `r^e` by repeated squaring.
pub fn rat_pow(r: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    let mut base = r.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// Nearest `f64` to an exact rational. Used only at the flows boundary.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// An ordered set of variable names, fixed per ambient space.
///
/// Cheap to clone; compared by content. Operations across mismatched
/// variable sets are contract violations, never implicit embeddings.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vars(Arc<Vec<String>>);

impl Vars {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Vars(Arc::new(names.into_iter().map(Into::into).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.0[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

impl fmt::Debug for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vars({})", self.0.join(","))
    }
}

/// A rational point of the ambient space, one coordinate per variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Point(pub Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| rat(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Errors from the exact-arithmetic layer.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("denominator vanishes at {0}")]
    DenominatorVanishes(Point),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
