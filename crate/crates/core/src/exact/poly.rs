use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{ExactError, Rational};

/// The fixed, ordered variable set every polynomial lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    I,
    J,
    K,
    N,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::I, Var::J, Var::K, Var::N];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Var::I => "i",
            Var::J => "j",
            Var::K => "k",
            Var::N => "n",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector over `(i, j, k, n)`.
///
/// Ordering compares `n`, then `k`, then `j`, then `i`, so a polynomial in
/// `(i, j)` lists as `1, i, i^2, ..., j, i*j, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; 4]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 4]);

    pub fn var(v: Var) -> Self {
        Self::power(v, 1)
    }

    pub fn power(v: Var, e: u16) -> Self {
        let mut exps = [0; 4];
        exps[v.index()] = e;
        Monomial(exps)
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 4]
    }

    fn with_exponent(mut self, v: Var, e: u16) -> Self {
        self.0[v.index()] = e;
        self
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut exps = self.0;
        for (e, o) in exps.iter_mut().zip(other.0) {
            *e += o;
        }
        Monomial(exps)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `(i, j, k, n)` with exact rational coefficients.
///
/// No zero coefficient is ever stored, so structural equality is polynomial
/// equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// `v + c` for an integer shift `c`.
    pub fn var_plus(v: Var, c: i64) -> Self {
        Self::var(v) + Self::int(c)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Product of the given polynomials (empty product is 1).
    pub fn product<'a, I: IntoIterator<Item = &'a MultiPoly>>(factors: I) -> Self {
        factors.into_iter().fold(Self::one(), |acc, f| &acc * f)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial, `None` if any variable occurs.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.coefficient(&Monomial::ONE))
        } else {
            None
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Degree in `v`; the zero polynomial has degree 0.
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent(v) as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (*m, x * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients of `self` as a polynomial in `v`: entry `e` multiplies
    /// `v^e` and is free of `v`.
    pub fn coeffs_in(&self, v: Var) -> Vec<MultiPoly> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut out = vec![MultiPoly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            out[e].add_term(m.with_exponent(v, 0), c.clone());
        }
        out
    }

    /// Inverse of [`MultiPoly::coeffs_in`].
    pub fn from_coeffs_in(v: Var, coeffs: &[MultiPoly]) -> Self {
        let mut p = Self::zero();
        for (e, c) in coeffs.iter().enumerate() {
            for (m, x) in &c.terms {
                debug_assert_eq!(m.exponent(v), 0);
                p.add_term(m.with_exponent(v, e as u16), x.clone());
            }
        }
        p
    }

    /// Substitutes constants for the bound variables; unbound variables stay
    /// symbolic.
    pub fn eval(&self, bindings: &[(Var, Rational)]) -> Self {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut mono = *m;
            for (v, value) in bindings {
                let e = m.exponent(*v);
                if e > 0 {
                    coeff *= num_traits::pow(value.clone(), e as usize);
                    mono = mono.with_exponent(*v, 0);
                }
            }
            out.add_term(mono, coeff);
        }
        out
    }

    /// Evaluates with every occurring variable bound.
    pub fn value_at(&self, bindings: &[(Var, Rational)]) -> Result<Rational, ExactError> {
        let p = self.eval(bindings);
        p.as_constant().ok_or(ExactError::Unbound(p))
    }

    /// Replaces `v` by the polynomial `replacement` (Horner in `v`).
    pub fn substitute(&self, v: Var, replacement: &MultiPoly) -> Self {
        let coeffs = self.coeffs_in(v);
        let mut acc = Self::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * replacement) + c;
        }
        acc
    }

    /// `p(v -> v + by)`.
    pub fn shift(&self, v: Var, by: &Rational) -> Self {
        self.substitute(v, &(Self::var(v) + Self::constant(by.clone())))
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients, signed so the first term (in monomial order) of the
    /// quotient is positive. Zero for the zero polynomial.
    pub fn content(&self) -> Rational {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return Rational::zero();
        }
        let content = Rational::new(num_gcd, den_lcm);
        match self.terms.values().next() {
            Some(first) if first.is_negative() => -content,
            _ => content,
        }
    }

    /// `(content, primitive part)` with `self = content * primitive`.
    pub fn split_content(&self) -> (Rational, MultiPoly) {
        let c = self.content();
        if c.is_zero() {
            return (Rational::one(), Self::zero());
        }
        let inv = c.recip();
        (c, self.scale(&inv))
    }

    /// Exact quotient by a monic linear factor, via synthetic division in the
    /// factor's variable.
    pub fn divide_exact(&self, factor: &LinearFactor) -> Result<MultiPoly, ExactError> {
        let (quotient, remainder) = self.divide_linear(factor);
        if remainder.is_zero() {
            Ok(quotient)
        } else {
            Err(ExactError::NotDivisible {
                factor: factor.clone(),
                remainder,
            })
        }
    }

    /// `(q, r)` with `self = q * factor + r` and `r` free of the factor's
    /// variable.
    pub fn divide_linear(&self, factor: &LinearFactor) -> (MultiPoly, MultiPoly) {
        let v = factor.var;
        let coeffs = self.coeffs_in(v);
        if coeffs.len() <= 1 {
            return (Self::zero(), self.clone());
        }
        let deg = coeffs.len() - 1;
        let mut q = vec![MultiPoly::zero(); deg];
        q[deg - 1] = coeffs[deg].clone();
        for e in (1..deg).rev() {
            q[e - 1] = &coeffs[e] - &(&factor.offset * &q[e]);
        }
        let remainder = &coeffs[0] - &(&factor.offset * &q[0]);
        (Self::from_coeffs_in(v, &q), remainder)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl From<Rational> for MultiPoly {
    fn from(c: Rational) -> Self {
        MultiPoly::constant(c)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for v in Var::ALL {
        let e = m.exponent(v);
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "{v}")?;
        } else {
            write!(f, "{v}^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}*")?;
                }
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

/// A monic factor `var + offset`, where `offset` does not involve `var`.
///
/// `k + j + 3` is stored as `var = k`, `offset = j + 3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearFactor {
    var: Var,
    offset: MultiPoly,
}

impl LinearFactor {
    /// Panics if `offset` involves `var`.
    pub fn new(var: Var, offset: MultiPoly) -> Self {
        assert!(
            !offset.contains(var),
            "offset of a linear factor must not involve its variable"
        );
        LinearFactor { var, offset }
    }

    /// `var + shift`.
    pub fn shifted(var: Var, shift: i64) -> Self {
        Self::new(var, MultiPoly::int(shift))
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn offset(&self) -> &MultiPoly {
        &self.offset
    }

    pub fn to_poly(&self) -> MultiPoly {
        MultiPoly::var(self.var) + &self.offset
    }

    /// Writes a linear polynomial as `c * (v + offset)`.
    ///
    /// The chosen variable is the last one in `(i, j, k, n)` order that
    /// occurs with degree one and a constant coefficient and nowhere else.
    pub fn from_linear(p: &MultiPoly) -> Result<(Rational, LinearFactor), ExactError> {
        for v in Var::ALL.into_iter().rev() {
            let coeffs = p.coeffs_in(v);
            if coeffs.len() != 2 {
                continue;
            }
            if let Some(lead) = coeffs[1].as_constant() {
                let offset = coeffs[0].scale(&lead.recip());
                return Ok((lead, LinearFactor { var: v, offset }));
            }
        }
        Err(ExactError::NonLinearFactor(p.clone()))
    }
}

impl fmt::Display for LinearFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset.is_zero() {
            return write!(f, "({})", self.var);
        }
        let offset = alloc::format!("{}", self.offset);
        match offset.strip_prefix('-') {
            Some(rest) => write!(f, "({} - {rest})", self.var),
            None => write!(f, "({} + {offset})", self.var),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use alloc::string::ToString;

    fn i() -> MultiPoly {
        MultiPoly::var(Var::I)
    }
    fn j() -> MultiPoly {
        MultiPoly::var(Var::J)
    }
    fn k() -> MultiPoly {
        MultiPoly::var(Var::K)
    }
    fn c(x: i64) -> MultiPoly {
        MultiPoly::int(x)
    }

    /// 20 - 6i + i^2 + 30j - 5ij + 10j^2
    fn order3_numerator() -> MultiPoly {
        c(20) - c(6) * i() + i() * i() + c(30) * j() - c(5) * i() * j() + c(10) * j() * j()
    }

    #[test]
    fn binomial_product() {
        let p = (i() + c(1)) * (i() + c(2));
        assert_eq!(p, i() * i() + c(3) * i() + c(2));
    }

    #[test]
    fn cubic_product_matches_convolution() {
        let p = (k() + c(1)) * (k() + c(2)) * (k() + c(3));
        // coefficient convolution of [1,1] * [2,1] * [3,1]
        let mut conv = vec![rat(1, 1)];
        for shift in [1, 2, 3] {
            let mut next = vec![rat(0, 1); conv.len() + 1];
            for (e, x) in conv.iter().enumerate() {
                next[e] += x * int(shift);
                next[e + 1] += x.clone();
            }
            conv = next;
        }
        let expected: Vec<_> = conv.into_iter().map(MultiPoly::constant).collect();
        assert_eq!(p.coeffs_in(Var::K), expected);
        assert_eq!(p, k().pow(3) + c(6) * k() * k() + c(11) * k() + c(6));
    }

    #[test]
    fn self_subtraction_is_empty() {
        let p = order3_numerator();
        let d = &p - &p;
        assert!(d.is_zero());
        assert_eq!(d.term_count(), 0);
    }

    #[test]
    fn eval_examples() {
        let p = i() * i() + c(3) * i() + c(2);
        assert!(p.eval(&[(Var::I, int(-1))]).is_zero());
        let q = order3_numerator();
        assert_eq!(q.eval(&[(Var::I, int(1)), (Var::J, int(1))]), c(50));
        assert_eq!(q.eval(&[]), q);
        let partial = q.eval(&[(Var::I, int(0))]);
        assert_eq!(partial, c(20) + c(30) * j() + c(10) * j() * j());
    }

    #[test]
    fn divide_examples() {
        let p = i() * i() + c(3) * i() + c(2);
        let q = p.divide_exact(&LinearFactor::shifted(Var::I, 1)).unwrap();
        assert_eq!(q, i() + c(2));
        match p.divide_exact(&LinearFactor::shifted(Var::I, 4)) {
            Err(ExactError::NotDivisible { remainder, .. }) => assert_eq!(remainder, c(6)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn divide_by_multivariate_offset() {
        let f = LinearFactor::new(Var::K, j() + c(3));
        let q = order3_numerator() * (k() - i());
        let p = &q * &f.to_poly();
        assert_eq!(p.divide_exact(&f).unwrap(), q);
    }

    #[test]
    fn display_follows_monomial_order() {
        assert_eq!(
            order3_numerator().to_string(),
            "20 - 6*i + i^2 + 30*j - 5*i*j + 10*j^2"
        );
        assert_eq!(MultiPoly::zero().to_string(), "0");
        assert_eq!((-i() + MultiPoly::constant(rat(1, 2))).to_string(), "1/2 - i");
    }

    #[test]
    fn content_normalises_sign_and_scale() {
        let p = order3_numerator().scale(&rat(-3, 10));
        let (content, prim) = p.split_content();
        assert_eq!(content, rat(-3, 10));
        assert_eq!(prim, order3_numerator());
    }

    #[test]
    fn substitute_and_shift() {
        let p = k() * k();
        assert_eq!(p.shift(Var::K, &int(1)), k() * k() + c(2) * k() + c(1));
        assert_eq!(p.substitute(Var::K, &(i() - j())), i() * i() - c(2) * i() * j() + j() * j());
    }

    #[test]
    fn from_linear_picks_last_variable() {
        let (lead, f) = LinearFactor::from_linear(&(j() + k() + c(3))).unwrap();
        assert_eq!(lead, int(1));
        assert_eq!(f.var(), Var::K);
        assert_eq!(f.offset(), &(j() + c(3)));
        let (lead, f) = LinearFactor::from_linear(&(c(2) * i() + c(3))).unwrap();
        assert_eq!(lead, int(2));
        assert_eq!(f.offset(), &MultiPoly::constant(rat(3, 2)));
        assert!(LinearFactor::from_linear(&(i() * i())).is_err());
    }

    #[test]
    fn degrees() {
        let p = order3_numerator();
        assert_eq!(p.degree_in(Var::I), 2);
        assert_eq!(p.degree_in(Var::K), 0);
        assert_eq!(p.total_degree(), 2);
    }
}
