use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, Signed};

/// Arbitrary-precision fraction in lowest terms with a positive denominator.
///
/// `Display` renders `p/q`, or just `p` when `q = 1`.
pub type Rational = BigRational;

/// `n / d` reduced. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses `"p"` or `"p/q"` (optional leading sign, `q != 0`).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str_radix(num.strip_prefix('+').unwrap_or(num), 10).ok()?;
    let den = BigInt::from_str_radix(den, 10).ok()?;
    if den == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Largest `m / 2^bits` with `m / 2^bits <= x`, returned as the integer `m`.
pub fn dyadic_floor(x: &Rational, bits: u32) -> BigInt {
    (x.numer() << bits as usize).div_floor(x.denom())
}

/// Smallest `m / 2^bits` with `m / 2^bits >= x`, returned as the integer `m`.
pub fn dyadic_ceil(x: &Rational, bits: u32) -> BigInt {
    let shifted: BigInt = x.numer() << bits as usize;
    let (q, r) = shifted.div_mod_floor(x.denom());
    if r.is_positive() {
        q + 1
    } else {
        q
    }
}
