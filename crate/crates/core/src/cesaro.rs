//! The Cesàro matrix `C(N)`, its diagonal interrupter `P(N)` and finite
//! preimages of the standard basis vectors.
//!
//! For `0 <= j <= i` the entry is `N * prod_{t=1}^{N-1}(i+t-j) / prod_{t=1}^{N}(i+t)`
//! (empty product = 1), and zero above the diagonal. The interrupter is
//! `p_n = prod_{t=1}^{N}(n+t) / prod_{t=N+1}^{2N}(n+t)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{LinearFactor, MultiPoly, RatFun, Rational, Var};

/// Positive integer order `N` of a Cesàro matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Order(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("order must be at least 1")]
    Zero,
}

impl Order {
    pub fn new(n: u32) -> Result<Self, OrderError> {
        if n == 0 {
            Err(OrderError::Zero)
        } else {
            Ok(Order(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    fn as_i64(self) -> i64 {
        self.0 as i64
    }
}

impl TryFrom<u32> for Order {
    type Error = OrderError;
    fn try_from(n: u32) -> Result<Self, OrderError> {
        Order::new(n)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn rising(from: u64, count: u32) -> BigInt {
    (0..count as u64).fold(BigInt::one(), |acc, t| acc * BigInt::from(from + t))
}

/// `m_ij` of `C(N)`.
pub fn entry(order: Order, i: u64, j: u64) -> Rational {
    if j > i {
        return Rational::zero();
    }
    let n = order.get();
    // prod_{t=1}^{N-1} (i - j + t) and prod_{t=1}^{N} (i + t)
    let num = rising(i - j + 1, n - 1) * BigInt::from(n);
    let den = rising(i + 1, n);
    Rational::new(num, den)
}

/// `m_ij` as a rational function of `(i, j)`, valid on `0 <= j <= i`.
pub fn entry_symbolic(order: Order) -> RatFun {
    let n = order.as_i64();
    let i_minus_j = MultiPoly::var(Var::I) - MultiPoly::var(Var::J);
    let numerator = (1..n).fold(MultiPoly::int(n), |acc, t| {
        acc * (&i_minus_j + MultiPoly::int(t))
    });
    let factors = (1..=n).map(|t| LinearFactor::shifted(Var::I, t)).collect();
    RatFun::new(numerator, factors, Rational::one())
}

/// Diagonal entry `p_n` of the interrupter `P(N)`.
pub fn interrupter_entry(order: Order, n: u64) -> Rational {
    let big_n = order.get();
    Rational::new(rising(n + 1, big_n), rising(n + 1 + big_n as u64, big_n))
}

/// `p_n` as a rational function of `n`.
pub fn interrupter_symbolic(order: Order) -> RatFun {
    let big_n = order.as_i64();
    let numerator = MultiPoly::product(
        (1..=big_n)
            .map(|t| MultiPoly::var_plus(Var::N, t))
            .collect::<Vec<_>>()
            .iter(),
    );
    let factors = (big_n + 1..=2 * big_n)
        .map(|t| LinearFactor::shifted(Var::N, t))
        .collect();
    RatFun::new(numerator, factors, Rational::one())
}

/// Finitely supported vector indexed by nonnegative integers; zeros are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SparseVector {
    entries: BTreeMap<u64, Rational>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Standard basis vector `e_n`.
    pub fn unit(n: u64) -> Self {
        let mut v = Self::new();
        v.set(n, Rational::one());
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (u64, Rational)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (idx, x) in pairs {
            v.add(idx, x);
        }
        v
    }

    pub fn get(&self, idx: u64) -> Rational {
        self.entries.get(&idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, idx: u64, x: Rational) {
        if x.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, x);
        }
    }

    pub fn add(&mut self, idx: u64, x: Rational) {
        let sum = self.get(idx) + x;
        self.set(idx, sum);
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> + '_ {
        self.entries.iter().map(|(i, x)| (*i, x))
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    /// Exact squared Euclidean norm.
    pub fn norm_sq(&self) -> Rational {
        self.entries.values().map(|x| x * x).sum()
    }
}

fn binomial(n: u32, r: u32) -> BigInt {
    (0..r).fold(BigInt::one(), |acc, t| acc * BigInt::from(n - t) / BigInt::from(t + 1))
}

/// A finitely supported `v` with `C(N) v = e_n`:
/// `v_{n+r} = (-1)^r binom(N, r) prod_{t=1}^{N}(n+t) / N!` for `r = 0..=N`.
pub fn preimage(order: Order, n: u64) -> SparseVector {
    let big_n = order.get();
    let factorial = rising(1, big_n);
    let scale = Rational::new(rising(n + 1, big_n), factorial);
    SparseVector::from_pairs((0..=big_n).map(|r| {
        let c = Rational::from_integer(binomial(big_n, r));
        let signed = if r % 2 == 0 { c } else { -c };
        (n + r as u64, &scale * signed)
    }))
}

/// Rows `rows` of `C(N) v`.
pub fn apply(order: Order, v: &SparseVector, rows: Range<u64>) -> SparseVector {
    let mut out = SparseVector::new();
    for row in rows {
        let value: Rational = v
            .iter()
            .take_while(|(col, _)| *col <= row)
            .map(|(col, x)| entry(order, row, col) * x)
            .sum();
        out.set(row, value);
    }
    out
}

/// `C(N)* v` in full; its support lies in `0..=max_index(v)`.
pub fn apply_adjoint(order: Order, v: &SparseVector) -> SparseVector {
    let mut out = SparseVector::new();
    let Some(last) = v.max_index() else {
        return out;
    };
    for col in 0..=last {
        let value: Rational = v
            .iter()
            .filter(|(row, _)| *row >= col)
            .map(|(row, x)| entry(order, row, col) * x)
            .sum();
        out.set(col, value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn ord(n: u32) -> Order {
        Order::new(n).unwrap()
    }

    #[test]
    fn order_rejects_zero() {
        assert_eq!(Order::new(0), Err(OrderError::Zero));
    }

    #[test]
    fn entry_examples() {
        for n in 1..=9 {
            assert_eq!(entry(ord(n), 0, 0), int(1));
        }
        assert_eq!(entry(ord(3), 2, 1), rat(3, 10));
        assert_eq!(entry(ord(4), 3, 1), rat(2, 7));
        assert_eq!(entry(ord(3), 1, 3), int(0));
    }

    #[test]
    fn symbolic_entries_for_low_orders() {
        let i = MultiPoly::var(Var::I);
        let j = MultiPoly::var(Var::J);
        let c = MultiPoly::int;
        let one = entry_symbolic(ord(1));
        assert!(one.equals(&RatFun::new(c(1), alloc::vec![LinearFactor::shifted(Var::I, 1)], int(1))));
        let two = entry_symbolic(ord(2));
        let expected = RatFun::new(
            (&i + c(1) - &j).scale(&int(2)),
            alloc::vec![LinearFactor::shifted(Var::I, 1), LinearFactor::shifted(Var::I, 2)],
            int(1),
        );
        assert!(two.equals(&expected));
        let three = entry_symbolic(ord(3));
        let expected = RatFun::new(
            (&i + c(1) - &j) * (&i + c(2) - &j) * c(3),
            (1..=3).map(|t| LinearFactor::shifted(Var::I, t)).collect(),
            int(1),
        );
        assert!(three.equals(&expected));
    }

    #[test]
    fn symbolic_entry_agrees_with_numeric() {
        for n in 1..=6 {
            let sym = entry_symbolic(ord(n));
            for i in 0..8u64 {
                for j in 0..=i {
                    let v = sym
                        .value_at(&[(Var::I, int(i)), (Var::J, int(j))])
                        .unwrap();
                    assert_eq!(v, entry(ord(n), i, j), "N={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn interrupter_examples() {
        for n in 0..20u64 {
            assert_eq!(interrupter_entry(ord(1), n), rat(n as i64 + 1, n as i64 + 2));
            assert_eq!(
                interrupter_entry(ord(2), n),
                Rational::new(
                    BigInt::from((n + 1) * (n + 2)),
                    BigInt::from((n + 3) * (n + 4))
                )
            );
        }
        assert_eq!(interrupter_entry(ord(3), 0), rat(1, 20));
        assert_eq!(interrupter_entry(ord(4), 0), rat(1, 70));
        let sym = interrupter_symbolic(ord(3));
        assert_eq!(sym.value_at(&[(Var::N, int(7))]).unwrap(), interrupter_entry(ord(3), 7));
    }

    #[test]
    fn preimage_examples() {
        let v = preimage(ord(3), 0);
        let coeffs: Vec<_> = (0..4).map(|r| v.get(r)).collect();
        assert_eq!(coeffs, [int(1), int(-3), int(3), int(-1)]);
        let v = preimage(ord(4), 0);
        let coeffs: Vec<_> = (0..5).map(|r| v.get(r)).collect();
        assert_eq!(coeffs, [int(1), int(-4), int(6), int(-4), int(1)]);
        let image = apply(ord(3), &preimage(ord(3), 5), 0..9);
        assert_eq!(image, SparseVector::unit(5));
    }

    #[test]
    fn apply_examples() {
        let e0 = SparseVector::unit(0);
        assert_eq!(apply_adjoint(ord(3), &e0), e0);
        let col = apply(ord(3), &e0, 0..3);
        assert_eq!(
            col,
            SparseVector::from_pairs([(0, int(1)), (1, rat(3, 4)), (2, rat(3, 5))])
        );
        assert!(apply(ord(3), &SparseVector::new(), 0..10).is_zero());
        assert!(apply_adjoint(ord(3), &SparseVector::new()).is_zero());
    }

    #[test]
    fn adjoint_is_transpose() {
        // <Mu, v> = <u, M*v> on finite supports
        let u = SparseVector::from_pairs([(0, rat(1, 2)), (2, int(-3)), (4, rat(2, 7))]);
        let v = SparseVector::from_pairs([(1, int(5)), (3, rat(-1, 3)), (6, int(2))]);
        for n in 1..=5 {
            let mu = apply(ord(n), &u, 0..7);
            let lhs: Rational = v.iter().map(|(r, x)| mu.get(r) * x).sum();
            let mv = apply_adjoint(ord(n), &v);
            let rhs: Rational = u.iter().map(|(c, x)| mv.get(c) * x).sum();
            assert_eq!(lhs, rhs);
        }
    }
}
