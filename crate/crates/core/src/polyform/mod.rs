//! Exact sparse polynomials over the rationals and polynomial differential
//! forms, graded by a positive weighted-homogeneous degree.
//!
//! Every variable `x_i` and its differential `dx_i` carry the same weight
//! `p_i > 0`. The weighted degree of `P dx_{i1}∧..∧dx_{ik}` is
//! `wdeg(P) + p_{i1} + .. + p_{ik}`.

mod form;
mod poly;

pub use form::{subsets, KForm};
pub use poly::{Monomial, Polynomial};

use std::fmt;

use num_rational::BigRational;

use crate::{Error, Result};

pub type Rational = BigRational;

/// Strictly positive weights, one per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weights(Vec<u32>);

impl Weights {
    pub fn new(p: Vec<u32>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidWeights("at least one variable is required".into()));
        }
        if let Some(i) = p.iter().position(|&w| w == 0) {
            return Err(Error::InvalidWeights(format!(
                "weight of variable {i} must be positive"
            )));
        }
        Ok(Weights(p))
    }

    /// All weights equal to one: the standard degree.
    pub fn standard(n: usize) -> Self {
        Weights(vec![1; n.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Weighted degree of an exponent vector.
    pub fn degree_of(&self, exps: &[u32]) -> u32 {
        exps.iter().zip(&self.0).map(|(e, p)| e * p).sum()
    }

    /// Sum of the weights of the differentials `dx_i`, `i ∈ indices`.
    pub fn differential_degree(&self, indices: &[usize]) -> u32 {
        indices.iter().map(|&i| self.0[i]).sum()
    }

    /// Weights extended by one more variable.
    pub fn extended(&self, extra: u32) -> Self {
        let mut p = self.0.clone();
        p.push(extra);
        Weights(p)
    }
}

/// Weighted degree; the zero polynomial or form has degree `NegInfinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WDegree {
    NegInfinity,
    Finite(u32),
}

impl WDegree {
    pub fn finite(self) -> Option<u32> {
        match self {
            WDegree::NegInfinity => None,
            WDegree::Finite(d) => Some(d),
        }
    }

    pub fn is_neg_infinity(self) -> bool {
        matches!(self, WDegree::NegInfinity)
    }

    /// `self ≤ bound`, where a negative bound admits only `NegInfinity`.
    pub fn at_most(self, bound: i64) -> bool {
        match self {
            WDegree::NegInfinity => true,
            WDegree::Finite(d) => i64::from(d) <= bound,
        }
    }

    /// Degree of a product: `-∞` absorbs.
    pub fn plus(self, other: WDegree) -> WDegree {
        match (self, other) {
            (WDegree::Finite(a), WDegree::Finite(b)) => WDegree::Finite(a + b),
            _ => WDegree::NegInfinity,
        }
    }
}

impl fmt::Display for WDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WDegree::NegInfinity => write!(f, "-inf"),
            WDegree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Rational `num/den`; `den` must be nonzero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
