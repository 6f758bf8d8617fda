use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use super::{ExactError, LinearFactor, MultiPoly, Rational, Var};

/// `scale * numerator / product(factors)` with a factored, linear denominator.
///
/// Construction canonicalises: every factor that exactly divides the
/// numerator is cancelled, the numerator's rational content moves into
/// `scale`, and factors are sorted. Two canonical values are structurally
/// equal exactly when they are equal as rational functions, but
/// [`RatFun::equals`] decides equality by cross-multiplication and does not
/// rely on that.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    numerator: MultiPoly,
    factors: Vec<LinearFactor>,
    scale: Rational,
}

impl RatFun {
    pub fn new(numerator: MultiPoly, factors: Vec<LinearFactor>, scale: Rational) -> Self {
        if numerator.is_zero() || scale.is_zero() {
            return Self::zero();
        }
        let mut numerator = numerator;
        let mut kept = Vec::with_capacity(factors.len());
        for factor in factors {
            let (q, r) = numerator.divide_linear(&factor);
            if r.is_zero() {
                numerator = q;
            } else {
                kept.push(factor);
            }
        }
        let (content, primitive) = numerator.split_content();
        kept.sort();
        RatFun {
            numerator: primitive,
            factors: kept,
            scale: scale * content,
        }
    }

    pub fn zero() -> Self {
        RatFun {
            numerator: MultiPoly::zero(),
            factors: Vec::new(),
            scale: Rational::zero(),
        }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        Self::new(p, Vec::new(), Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    /// Primitive integer numerator (first term positive).
    pub fn numerator(&self) -> &MultiPoly {
        &self.numerator
    }

    /// Sorted monic denominator factors.
    pub fn factors(&self) -> &[LinearFactor] {
        &self.factors
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// `scale.numer * numerator`, the numerator with integer coefficients.
    pub fn integer_numerator(&self) -> MultiPoly {
        self.numerator
            .scale(&Rational::from_integer(self.scale.numer().clone()))
    }

    /// `scale.denom * product(factors)`, expanded.
    pub fn expanded_denominator(&self) -> MultiPoly {
        product(&self.factors).scale(&Rational::from_integer(self.scale.denom().clone()))
    }

    /// Cross-multiplied difference `a * den(b) - b * den(a)` after removing
    /// the common part of the two factor multisets. Zero iff `a == b`.
    pub fn cross_residual(&self, other: &RatFun) -> MultiPoly {
        let (only_self, only_other) = multiset_difference(&self.factors, &other.factors);
        let lhs = self.numerator.scale(&self.scale) * product(&only_other);
        let rhs = other.numerator.scale(&other.scale) * product(&only_self);
        lhs - rhs
    }

    /// Rational-function equality by cross-multiplication.
    pub fn equals(&self, other: &RatFun) -> bool {
        self.cross_residual(other).is_zero()
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (only_self, only_other) = multiset_difference(&self.factors, &other.factors);
        let lhs = self.numerator.scale(&self.scale) * product(&only_other);
        let rhs = other.numerator.scale(&other.scale) * product(&only_self);
        let mut common = self.factors.clone();
        common.extend(only_other);
        RatFun::new(lhs + rhs, common, Rational::one())
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            numerator: self.numerator.clone(),
            factors: self.factors.clone(),
            scale: -self.scale.clone(),
        }
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        RatFun::new(
            &self.numerator * &other.numerator,
            factors,
            &self.scale * &other.scale,
        )
    }

    pub fn scale_by(&self, c: &Rational) -> RatFun {
        RatFun::new(self.numerator.clone(), self.factors.clone(), &self.scale * c)
    }

    /// Partial evaluation. Denominator factors that become constant are
    /// folded into the scale.
    pub fn eval(&self, bindings: &[(Var, Rational)]) -> Result<RatFun, ExactError> {
        self.map_polys(|p| p.eval(bindings))
    }

    /// Replaces `v` by `v + by`.
    pub fn shift(&self, v: Var, by: &Rational) -> Result<RatFun, ExactError> {
        self.map_polys(|p| p.shift(v, by))
    }

    /// Value with every variable bound.
    pub fn value_at(&self, bindings: &[(Var, Rational)]) -> Result<Rational, ExactError> {
        let r = self.eval(bindings)?;
        if let Some(f) = r.factors.first() {
            return Err(ExactError::Unbound(f.to_poly()));
        }
        let c = r.numerator.as_constant().ok_or(ExactError::Unbound(r.numerator))?;
        Ok(c * r.scale)
    }

    fn map_polys<F: Fn(&MultiPoly) -> MultiPoly>(&self, f: F) -> Result<RatFun, ExactError> {
        let numerator = f(&self.numerator);
        let mut scale = self.scale.clone();
        let mut factors = Vec::with_capacity(self.factors.len());
        for factor in &self.factors {
            let p = f(&factor.to_poly());
            match p.as_constant() {
                Some(c) if c.is_zero() => return Err(ExactError::ZeroDenominator),
                Some(c) => scale /= c,
                None => {
                    let (lead, lf) = LinearFactor::from_linear(&p)?;
                    scale /= lead;
                    factors.push(lf);
                }
            }
        }
        Ok(RatFun::new(numerator, factors, scale))
    }
}

fn product(factors: &[LinearFactor]) -> MultiPoly {
    factors
        .iter()
        .fold(MultiPoly::one(), |acc, f| acc * f.to_poly())
}

/// Elements of `a` not matched in `b`, and of `b` not matched in `a`, both
/// taken as sorted multisets.
fn multiset_difference(
    a: &[LinearFactor],
    b: &[LinearFactor],
) -> (Vec<LinearFactor>, Vec<LinearFactor>) {
    let mut only_a = Vec::new();
    let mut only_b = Vec::new();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            core::cmp::Ordering::Equal => {
                x += 1;
                y += 1;
            }
            core::cmp::Ordering::Less => {
                only_a.push(a[x].clone());
                x += 1;
            }
            core::cmp::Ordering::Greater => {
                only_b.push(b[y].clone());
                y += 1;
            }
        }
    }
    only_a.extend_from_slice(&a[x..]);
    only_b.extend_from_slice(&b[y..]);
    (only_a, only_b)
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let num_scale = self.scale.numer();
        let den_scale = self.scale.denom();
        let bare_num = self.numerator.is_constant();
        match (num_scale.is_one(), bare_num) {
            (true, true) => write!(f, "{}", self.numerator)?,
            (true, false) => write!(f, "({})", self.numerator)?,
            (false, true) => write!(f, "{num_scale}")?,
            (false, false) => write!(f, "{num_scale}*({})", self.numerator)?,
        }
        if self.factors.is_empty() {
            if !den_scale.is_one() {
                write!(f, "/{den_scale}")?;
            }
            return Ok(());
        }
        if let ([only], true) = (self.factors.as_slice(), den_scale.is_one()) {
            return write!(f, "/{only}");
        }
        f.write_str("/(")?;
        let mut first = true;
        if !den_scale.is_one() {
            write!(f, "{den_scale}")?;
            first = false;
        }
        for factor in &self.factors {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{factor}")?;
        }
        f.write_str(")")
    }
}
