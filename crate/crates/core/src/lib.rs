//! Exact-arithmetic checks of the posinormality identity `M M* = M* P M` for
//! Cesàro matrices `C(N)` of positive integer order with the diagonal
//! interrupter `P(N) = diag{ (n+1)...(n+N) / ((n+N+1)...(n+2N)) }`.
//!
//! Everything here is `no_std` + `alloc`: rationals are arbitrary precision,
//! polynomials are sparse over the variables `(i, j, k, n)`, and no floating
//! point value is ever produced. Timing, IO and parallel orchestration live in
//! the companion `cesaro-verify` crate.
//!
//! Module map:
//!
//! * [`exact`]: rationals, [`MultiPoly`], [`LinearFactor`], [`RatFun`].
//! * [`cesaro`]: entries of `C(N)`, the interrupter, preimages of `e_n`.
//! * [`linsolve`]: exact Gaussian elimination over `Q[i, j]`.
//! * [`telescope`]: the `M* P M` series and its rational antidifference.
//! * [`finitesum`]: Faulhaber polynomials and the finite `M M*` sums.
//! * [`verify`]: identity, contraction and hyponormality checks.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cesaro;
pub mod exact;
pub mod finitesum;
pub mod linsolve;
pub mod telescope;
pub mod verify;

pub use cesaro::{Order, OrderError, SparseVector};
pub use exact::{ExactError, LinearFactor, Monomial, MultiPoly, RatFun, Rational, Var};
