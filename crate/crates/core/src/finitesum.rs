//! The `M M*` entries as finite sums.
//!
//! For `j >= i`,
//!
//! ```text
//! (M M*)_{ij} = sum_{k=0}^{i} m_{ik} m_{jk}
//!             = N^2 / (prod_t (i+t) prod_t (j+t)) * sum_{k=0}^{i} prod_{t=1}^{N-1} (i-k+t)(j-k+t).
//! ```
//!
//! The closed form expands the inner product in powers of `k`, replaces each
//! `sum_k k^r` by its Faulhaber polynomial in `i`, and divides the result
//! exactly by `(i+1)...(i+N)`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::cesaro::{entry, Order};
use crate::exact::{int, ExactError, LinearFactor, MultiPoly, RatFun, Rational, Var};

/// `S_p(i) = sum_{k=0}^{i} k^p` with `0^0 = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaulhaberPoly {
    pub p: u32,
    pub poly: MultiPoly,
}

impl FaulhaberPoly {
    pub fn at(&self, i: u64) -> Rational {
        self.poly
            .value_at(&[(Var::I, int(i))])
            .expect("Faulhaber polynomial depends only on i")
    }
}

fn binomial(n: u32, r: u32) -> Rational {
    let b = (0..r).fold(BigInt::one(), |acc, t| acc * BigInt::from(n - t) / BigInt::from(t + 1));
    Rational::from_integer(b)
}

/// `S_0 ..= S_pmax` from `sum_{r=0}^{p} C(p+1, r) S_r(i) = (i+1)^{p+1}`.
pub fn faulhaber_table(pmax: u32) -> Vec<FaulhaberPoly> {
    let i_plus_one = MultiPoly::var_plus(Var::I, 1);
    let mut table: Vec<FaulhaberPoly> = Vec::with_capacity(pmax as usize + 1);
    for p in 0..=pmax {
        let mut acc = i_plus_one.pow(p + 1);
        for (r, prev) in table.iter().enumerate() {
            acc = acc - prev.poly.scale(&binomial(p + 1, r as u32));
        }
        let poly = acc.scale(&Rational::new(BigInt::one(), BigInt::from(p + 1)));
        table.push(FaulhaberPoly { p, poly });
    }
    table
}

pub fn faulhaber(p: u32) -> FaulhaberPoly {
    faulhaber_table(p).pop().expect("table has p + 1 entries")
}

/// `sum_{k=0}^{i} k^p` via the closed form.
pub fn faulhaber_at(p: u32, i: u64) -> Rational {
    faulhaber(p).at(i)
}

/// Coefficients `d_0 ..= d_{2N-3}` of
/// `prod_{t=1}^{N-1}(i-k+t)(j-k+t) = k^{2N-2} - d_{2N-3} k^{2N-3} + d_{2N-4} k^{2N-4} - ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSumExpansion {
    pub order: Order,
    /// `d_r` at index `r`; the implied leading `d_{2N-2}` is 1.
    pub coeffs: Vec<MultiPoly>,
}

impl FiniteSumExpansion {
    /// `d_r`, including the leading 1 at `r = 2N - 2`.
    pub fn d(&self, r: usize) -> MultiPoly {
        let top = 2 * self.order.get() as usize - 2;
        match r {
            r if r == top => MultiPoly::one(),
            r if r < top => self.coeffs[r].clone(),
            _ => MultiPoly::zero(),
        }
    }

    /// `sum_r (-1)^r d_r k^r`.
    pub fn reconstruct(&self) -> MultiPoly {
        let top = 2 * self.order.get() as usize - 2;
        let signed: Vec<MultiPoly> = (0..=top)
            .map(|r| if r % 2 == 0 { self.d(r) } else { -self.d(r) })
            .collect();
        MultiPoly::from_coeffs_in(Var::K, &signed)
    }
}

/// `prod_{t=1}^{N-1}(i-k+t)(j-k+t)`.
pub fn summand_product(order: Order) -> MultiPoly {
    let n = order.get() as i64;
    let k = MultiPoly::var(Var::K);
    let mut p = MultiPoly::one();
    for t in 1..n {
        p = p * (MultiPoly::var_plus(Var::I, t) - &k);
        p = p * (MultiPoly::var_plus(Var::J, t) - &k);
    }
    p
}

pub fn expansion_coeffs(order: Order) -> FiniteSumExpansion {
    let by_power = summand_product(order).coeffs_in(Var::K);
    let top = by_power.len() - 1;
    debug_assert_eq!(top, 2 * order.get() as usize - 2);
    debug_assert_eq!(by_power[top], MultiPoly::one());
    let coeffs = by_power
        .into_iter()
        .take(top)
        .enumerate()
        .map(|(r, c)| if r % 2 == 0 { c } else { -c })
        .collect();
    FiniteSumExpansion { order, coeffs }
}

/// `(M M*)_{ij} = sum_k m_{ik} m_{jk}`, computed term by term.
pub fn mmstar_entry_direct(order: Order, i: u64, j: u64) -> Rational {
    (0..=i.min(j))
        .map(|k| entry(order, i, k) * entry(order, j, k))
        .sum()
}

/// Intermediate results of the Faulhaber route to `(M M*)_{ij}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmStarClosed {
    pub expansion: FiniteSumExpansion,
    /// `sum_{k=0}^{i} prod_{t=1}^{N-1}(i-k+t)(j-k+t)` as a polynomial in `(i, j)`.
    pub sum_polynomial: MultiPoly,
    /// `sum_polynomial / prod_{t=1}^{N}(i+t)`.
    pub quotient: MultiPoly,
    /// `N^2 quotient / prod_{t=1}^{N}(j+t)`, valid for `j >= i`.
    pub closed: RatFun,
}

/// Symbolic `(M M*)_{ij}` for `j >= i`.
pub fn mmstar_entry_closed(order: Order) -> Result<MmStarClosed, ExactError> {
    let n = order.get() as i64;
    let expansion = expansion_coeffs(order);
    let top = 2 * order.get() - 2;
    let table = faulhaber_table(top);
    let mut sum_polynomial = MultiPoly::zero();
    for (r, s) in table.iter().enumerate() {
        let d = expansion.d(r);
        let signed = if r % 2 == 0 { d } else { -d };
        sum_polynomial = sum_polynomial + signed * &s.poly;
    }
    let mut quotient = sum_polynomial.clone();
    for t in 1..=n {
        quotient = quotient.divide_exact(&LinearFactor::shifted(Var::I, t))?;
    }
    let factors = (1..=n).map(|t| LinearFactor::shifted(Var::J, t)).collect();
    let closed = RatFun::new(quotient.clone(), factors, int(n * n));
    Ok(MmStarClosed {
        expansion,
        sum_polynomial,
        quotient,
        closed,
    })
}

/// Evaluates a symbolic closed form on the canonical region, mirroring
/// `i > j` onto `(j, i)`.
pub fn eval_canonical(closed: &RatFun, i: u64, j: u64) -> Result<Rational, ExactError> {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    closed.value_at(&[(Var::I, int(i)), (Var::J, int(j))])
}

/// Brute-force `sum_{k=0}^{i} k^p`, the oracle for [`faulhaber`].
pub fn power_sum_direct(p: u32, i: u64) -> Rational {
    (0..=i)
        .map(|k| {
            if p == 0 {
                Rational::one()
            } else {
                Rational::from_integer(num_traits::pow(BigInt::from(k), p as usize))
            }
        })
        .fold(Rational::zero(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn ord(n: u32) -> Order {
        Order::new(n).unwrap()
    }
    fn i() -> MultiPoly {
        MultiPoly::var(Var::I)
    }
    fn j() -> MultiPoly {
        MultiPoly::var(Var::J)
    }
    fn c(x: i64) -> MultiPoly {
        MultiPoly::int(x)
    }

    #[test]
    fn faulhaber_low_powers() {
        assert_eq!(faulhaber(0).poly, i() + c(1));
        assert_eq!(faulhaber(1).poly, (i() * (i() + c(1))).scale(&rat(1, 2)));
        assert_eq!(faulhaber_at(4, 3), int(98));
    }

    #[test]
    fn faulhaber_invariants() {
        let table = faulhaber_table(14);
        for s in &table {
            assert_eq!(s.poly.degree_in(Var::I), s.p + 1);
            let at_zero = s.at(0);
            assert_eq!(at_zero, if s.p == 0 { int(1) } else { int(0) });
            let prev = s.poly.shift(Var::I, &int(-1));
            let step = &s.poly - &prev;
            assert_eq!(step, i().pow(s.p), "p = {}", s.p);
        }
    }

    #[test]
    fn faulhaber_matches_brute_force() {
        let table = faulhaber_table(14);
        for s in &table {
            for x in 0..=50 {
                assert_eq!(s.at(x), power_sum_direct(s.p, x));
            }
        }
    }

    #[test]
    fn direct_examples() {
        let three = ord(3);
        for x in 0..10 {
            assert_eq!(mmstar_entry_direct(three, 0, x), rat(3, x as i64 + 3));
        }
        assert_eq!(mmstar_entry_direct(three, 1, 1), rat(5, 8));
        for n in 1..=8 {
            assert_eq!(mmstar_entry_direct(ord(n), 0, 0), int(1));
        }
    }

    #[test]
    fn order_three_expansion() {
        let e = expansion_coeffs(ord(3));
        assert_eq!(e.coeffs.len(), 4);
        assert_eq!(e.d(3), (i() + j() + c(3)).scale(&int(2)));
        assert_eq!(
            e.d(2),
            j() * j() + c(4) * i() * j() + c(9) * j() + i() * i() + c(9) * i() + c(13)
        );
        assert_eq!(e.reconstruct(), summand_product(ord(3)));
    }

    #[test]
    fn order_three_sum_factorisation() {
        let closed = mmstar_entry_closed(ord(3)).unwrap();
        let numerator = c(20) - c(6) * i() + i() * i() + c(30) * j() - c(5) * i() * j() + c(10) * j() * j();
        assert_eq!(closed.quotient, numerator.scale(&rat(1, 30)));
        let rebuilt = closed.quotient.clone()
            * MultiPoly::var_plus(Var::I, 1)
            * MultiPoly::var_plus(Var::I, 2)
            * MultiPoly::var_plus(Var::I, 3);
        assert_eq!(rebuilt, closed.sum_polynomial);
        assert_eq!(eval_canonical(&closed.closed, 1, 1).unwrap(), rat(5, 8));
    }

    #[test]
    fn non_factor_is_reported() {
        let closed = mmstar_entry_closed(ord(3)).unwrap();
        let err = closed
            .sum_polynomial
            .divide_exact(&LinearFactor::shifted(Var::I, 4))
            .unwrap_err();
        assert!(matches!(err, ExactError::NotDivisible { .. }));
    }

    #[test]
    fn order_one_is_reciprocal() {
        let closed = mmstar_entry_closed(ord(1)).unwrap();
        assert!(closed.expansion.coeffs.is_empty());
        let expected = RatFun::new(c(1), alloc::vec![LinearFactor::shifted(Var::J, 1)], int(1));
        assert!(closed.closed.equals(&expected));
    }
}
