//! Exact scalar, polynomial and rational-function arithmetic.

mod poly;
mod ratfun;
mod rational;

pub use poly::{LinearFactor, Monomial, MultiPoly, Var};
pub use ratfun::RatFun;
pub use rational::{dyadic_ceil, dyadic_floor, int, parse_rational, rat, Rational};

use thiserror::Error;

/// Failures of the exact kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    /// Synthetic division left a nonzero remainder.
    #[error("polynomial is not divisible by {factor}: remainder {remainder}")]
    NotDivisible {
        factor: LinearFactor,
        remainder: MultiPoly,
    },
    /// A denominator evaluated to zero.
    #[error("denominator vanishes at the given bindings")]
    ZeroDenominator,
    /// A substituted denominator factor is no longer monic-linearizable.
    #[error("denominator factor {0} is not linear with a constant leading coefficient")]
    NonLinearFactor(MultiPoly),
    /// A value still depends on a variable that was expected to be bound.
    #[error("expression still depends on unbound variables: {0}")]
    Unbound(MultiPoly),
}
