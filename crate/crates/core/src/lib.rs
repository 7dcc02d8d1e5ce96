//! Exact computations on the de Rham cohomology of fibres of a polynomial
//! map `F = (f_1, .., f_q): C^n → C^q`, driven by its fibre at infinity
//! (the zero set of the top weighted-homogeneous components `f̄_i`).
//!
//! Layers, bottom up:
//! - [`polyform`]: rational polynomials and differential forms.
//! - [`groebner`]: Buchberger bases, normal forms, dimensions, elimination.
//! - [`gradedlin`]: exact linear solves over graded or degree-bounded form spaces.
//! - [`infinity`]: the fibre at infinity, Milnor number and its cohomology basis.
//! - [`fibre`]: classes on actual fibres and relative decompositions.
//! - [`cli`]: problem files, command dispatch and JSON witnesses.

pub mod cli;
pub mod fibre;
pub mod gradedlin;
pub mod groebner;
pub mod infinity;
pub mod polyform;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero has no leading term")]
    ZeroLeadingTerm,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("need more variables than components (n = {n}, q = {q})")]
    NotEnoughVariables { n: usize, q: usize },
    #[error("component f_{0} is zero")]
    ZeroComponent(usize),
    #[error("component f_{0} is constant")]
    ConstantComponent(usize),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("quotient is infinite-dimensional")]
    InfiniteQuotient,
    #[error("non-isolated singularity at infinity (dim V(I+J) = {0})")]
    NonIsolatedSingularity(i64),
    #[error("not a complete intersection at infinity")]
    NotCompleteIntersection,
    #[error("form is not weighted homogeneous")]
    NotHomogeneous,
    #[error("incompatible degrees: {0}")]
    IncompatibleDegrees(String),
    #[error("weighted degree must be positive")]
    NonPositiveDegree,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use polyform::{KForm, Monomial, Polynomial, Rational, WDegree, Weights};
