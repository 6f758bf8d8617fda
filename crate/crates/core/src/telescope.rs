//! The `M* P M` entries as telescoping series.
//!
//! For `j >= i` the `(i, j)` entry of `M* P M` is `sum_{k>=0} term(k)` with
//!
//! ```text
//! term(k) = N^2 prod_{t=1}^{N-1}(j+t-i+k) prod_{t=1}^{N-1}(k+t) / prod_{t=1}^{2N}(j+t+k).
//! ```
//!
//! [`solve_telescope`] finds `s(k) = N^2 c(k) / prod_{t=1}^{2N-1}(j+t+k)` with
//! `deg c = 2N - 2` and `s(k) - s(k+1) = term(k)`. Since `s(k) -> 0`, the
//! series sums to `s(0)`.
//!
//! Writing `c(k) = sum_m c_m k^m`, the difference
//! `c(k)(k+j+2N) - c(k+1)(k+j+1)` maps `k^m` to `(2N-1-m) k^m` plus lower
//! powers, so the coefficient system is triangular with a nonzero integer
//! diagonal; the `k^{2N-1}` row is kept as a consistency check.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cesaro::Order;
use crate::exact::{int, ExactError, LinearFactor, MultiPoly, RatFun, Rational, Var};
use crate::linsolve::{LinearSystem, SolveError};

/// One summand of the `M* P M` series, symbolic in `k` with parameters `i, j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTerm {
    pub order: Order,
    pub term: RatFun,
}

/// Whether `i, j` stay symbolic or are fixed integers with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TelescopeMode {
    Symbolic,
    Numeric { i: u64, j: u64 },
}

impl TelescopeMode {
    fn bindings(self) -> Vec<(Var, Rational)> {
        match self {
            TelescopeMode::Symbolic => Vec::new(),
            TelescopeMode::Numeric { i, j } => vec![(Var::I, int(i)), (Var::J, int(j))],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TelescopeError {
    #[error("coefficient system has no solution: {0}")]
    System(SolveError),
    #[error("s(k) - s(k+1) differs from the summand; cross-multiplied residual {0}")]
    Residual(MultiPoly),
    #[error("antidifference does not decay: numerator degree {numerator} >= denominator degree {denominator}")]
    NoDecay { numerator: u32, denominator: usize },
    #[error(transparent)]
    Exact(ExactError),
    #[error("numeric mode needs i <= j, got ({i}, {j})")]
    Region { i: u64, j: u64 },
}

/// A failed telescoping attempt, carrying the system that was solved.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("telescoping failed for order {order}: {kind}")]
pub struct TelescopeFailure {
    pub order: Order,
    pub mode: TelescopeMode,
    pub kind: TelescopeError,
    pub system: Option<Box<LinearSystem>>,
}

/// The solved antidifference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelescopeSolution {
    pub order: Order,
    pub mode: TelescopeMode,
    /// `c_0 ..= c_{2N-2}`, polynomials in `(i, j)` (constants in numeric mode).
    pub coeffs: Vec<MultiPoly>,
    /// `(k + j + t)` for `t = 1..2N-1`.
    pub denominator: Vec<LinearFactor>,
    /// `s(k) = N^2 c(k) / prod(denominator)`, canonicalised.
    pub antidifference: RatFun,
    /// `s(0)`.
    pub closed_form: RatFun,
    pub system: LinearSystem,
}

impl TelescopeSolution {
    /// Cross-multiplied `s(k) - s(k+1) - term(k)`; zero for a valid solution.
    pub fn residual(&self, term: &SeriesTerm) -> Result<MultiPoly, ExactError> {
        let next = self.antidifference.shift(Var::K, &Rational::one())?;
        let diff = self.antidifference.sub(&next);
        Ok(diff.cross_residual(&term.term))
    }
}

fn k_plus(offset: MultiPoly) -> MultiPoly {
    MultiPoly::var(Var::K) + offset
}

fn j_plus(t: i64) -> MultiPoly {
    MultiPoly::var_plus(Var::J, t)
}

/// `prod_{t=1}^{N-1}(j+t-i+k) prod_{t=1}^{N-1}(k+t)`, the monic summand numerator.
fn summand_numerator(order: Order) -> MultiPoly {
    let n = order.get() as i64;
    let shift = MultiPoly::var(Var::J) - MultiPoly::var(Var::I);
    let mut p = MultiPoly::one();
    for t in 1..n {
        p = p * k_plus(&shift + MultiPoly::int(t));
        p = p * MultiPoly::var_plus(Var::K, t);
    }
    p
}

fn k_factors(count: i64, mode: TelescopeMode) -> Vec<LinearFactor> {
    (1..=count)
        .map(|t| match mode {
            TelescopeMode::Symbolic => LinearFactor::new(Var::K, j_plus(t)),
            TelescopeMode::Numeric { j, .. } => LinearFactor::shifted(Var::K, j as i64 + t),
        })
        .collect()
}

/// The summand of `(M* P M)_{ij}`, `j >= i`.
pub fn mpm_term(order: Order) -> SeriesTerm {
    let n = order.get() as i64;
    let term = RatFun::new(
        summand_numerator(order),
        k_factors(2 * n, TelescopeMode::Symbolic),
        int(n * n),
    );
    SeriesTerm { order, term }
}

/// [`mpm_term`] with `i, j` bound as in `mode`.
pub fn mpm_term_in(order: Order, mode: TelescopeMode) -> Result<SeriesTerm, ExactError> {
    let mut term = mpm_term(order);
    if let TelescopeMode::Numeric { .. } = mode {
        term.term = term.term.eval(&mode.bindings())?;
    }
    Ok(term)
}

fn failure(order: Order, mode: TelescopeMode, kind: TelescopeError, system: Option<Box<LinearSystem>>) -> TelescopeFailure {
    TelescopeFailure {
        order,
        mode,
        kind,
        system,
    }
}

/// Builds the coefficient system for `c(k)(k+j+2N) - c(k+1)(k+j+1) = target(k)`.
fn build_system(order: Order, mode: TelescopeMode) -> LinearSystem {
    let n = order.get() as i64;
    let unknowns = (2 * n - 1) as usize;
    let bindings = mode.bindings();
    let target = summand_numerator(order).eval(&bindings).coeffs_in(Var::K);
    let k = MultiPoly::var(Var::K);
    let upper = k_plus(j_plus(2 * n)).eval(&bindings);
    let lower = k_plus(j_plus(1)).eval(&bindings);
    let k_plus_one = MultiPoly::var_plus(Var::K, 1);

    let rows = unknowns + 1;
    let mut matrix = vec![vec![MultiPoly::zero(); unknowns]; rows];
    // column m is the image of k^m
    #[allow(clippy::needless_range_loop)]
    for m in 0..unknowns {
        let image = k.pow(m as u32) * &upper - k_plus_one.pow(m as u32) * &lower;
        for (r, c) in image.coeffs_in(Var::K).into_iter().enumerate() {
            if r < rows {
                matrix[r][m] = c;
            } else {
                debug_assert!(c.is_zero());
            }
        }
    }
    let rhs = (0..rows)
        .map(|r| target.get(r).cloned().unwrap_or_default())
        .collect();
    LinearSystem { matrix, rhs }
}

/// Finds the rational antidifference `s(k)` of the `M* P M` summand.
pub fn solve_telescope(order: Order, mode: TelescopeMode) -> Result<TelescopeSolution, TelescopeFailure> {
    if let TelescopeMode::Numeric { i, j } = mode {
        if i > j {
            return Err(failure(order, mode, TelescopeError::Region { i, j }, None));
        }
    }
    let n = order.get() as i64;
    let system = build_system(order, mode);
    let coeffs = match system.solve() {
        Ok(c) => c,
        Err(e) => return Err(failure(order, mode, TelescopeError::System(e), Some(Box::new(system)))),
    };
    let denominator = k_factors(2 * n - 1, mode);
    let numerator = MultiPoly::from_coeffs_in(Var::K, &coeffs);
    let antidifference = RatFun::new(numerator, denominator.clone(), int(n * n));

    let numerator_degree = antidifference.numerator().degree_in(Var::K);
    let denominator_degree = antidifference.factors().len();
    if !antidifference.is_zero() && numerator_degree as usize >= denominator_degree {
        return Err(failure(
            order,
            mode,
            TelescopeError::NoDecay {
                numerator: numerator_degree,
                denominator: denominator_degree,
            },
            Some(Box::new(system)),
        ));
    }

    let closed_form = antidifference
        .eval(&[(Var::K, Rational::zero())])
        .map_err(|e| failure(order, mode, TelescopeError::Exact(e), None))?;
    let solution = TelescopeSolution {
        order,
        mode,
        coeffs,
        denominator,
        antidifference,
        closed_form,
        system,
    };

    let term = mpm_term_in(order, mode).map_err(|e| failure(order, mode, TelescopeError::Exact(e), None))?;
    let residual = solution
        .residual(&term)
        .map_err(|e| failure(order, mode, TelescopeError::Exact(e), None))?;
    if !residual.is_zero() {
        return Err(failure(order, mode, TelescopeError::Residual(residual), Some(Box::new(solution.system))));
    }
    Ok(solution)
}

/// `(M* P M)_{ij}` for `j >= i` as a rational function of `(i, j)`.
pub fn mpm_entry_closed(order: Order) -> Result<RatFun, TelescopeFailure> {
    solve_telescope(order, TelescopeMode::Symbolic).map(|s| s.closed_form)
}

/// `(M* P M)_{ij}` exactly, using symmetry for `i > j`.
pub fn mpm_entry_exact(order: Order, i: u64, j: u64) -> Result<Rational, TelescopeFailure> {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    let mode = TelescopeMode::Numeric { i, j };
    let solution = solve_telescope(order, mode)?;
    solution
        .closed_form
        .value_at(&[])
        .map_err(|e| failure(order, mode, TelescopeError::Exact(e), None))
}

// --- independent numeric enclosure -------------------------------------------

/// Certified enclosure of `(M* P M)_{ij}` obtained by direct summation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericEnclosure {
    /// Number of summed terms `K` (`k = 0..K`).
    pub terms: u64,
    /// `sum_{k<K} term(k)`, exact.
    pub partial: Rational,
    /// Upper bound on the tail `sum_{k>=K} term(k)`; the value lies in
    /// `[partial, partial + tail_bound]`.
    pub tail_bound: Rational,
    /// Tighter enclosure `lower <= value <= upper` with `upper - lower <= tol`.
    pub lower: Rational,
    pub upper: Rational,
}

impl NumericEnclosure {
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }
}

/// Dense univariate polynomial, lowest coefficient first.
type UPoly = Vec<Rational>;

fn upoly_mul(a: &[Rational], b: &[Rational]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (x, ca) in a.iter().enumerate() {
        for (y, cb) in b.iter().enumerate() {
            out[x + y] += ca * cb;
        }
    }
    out
}

fn upoly_linear_product<I: IntoIterator<Item = Rational>>(roots_shift: I) -> UPoly {
    roots_shift
        .into_iter()
        .fold(vec![Rational::one()], |acc, s| upoly_mul(&acc, &[s, Rational::one()]))
}

fn upoly_eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// `p(x + a)` by repeated synthetic division.
fn upoly_taylor_shift(p: &[Rational], a: &Rational) -> UPoly {
    let mut coeffs = p.to_vec();
    let n = coeffs.len();
    for start in 0..n {
        for idx in (start..n.saturating_sub(1)).rev() {
            let carry = &coeffs[idx + 1] * a;
            coeffs[idx] += carry;
        }
    }
    coeffs
}

fn trim(p: &mut UPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Rising factorial `x (x+1) ... (x+m-1)` evaluated at a rational.
fn rising_at(x: &Rational, m: u32) -> Rational {
    (0..m).fold(Rational::one(), |acc, l| acc * (x + int(l)))
}

/// Number of inverse-factorial terms used for the tail asymptotics.
const FACTORIAL_SERIES_ORDER: u32 = 16;
const MAX_TERMS: u64 = 1 << 22;

/// Tail model of `f(k) = A(k)/B(k)` in `x = k + 1`:
/// `f = sum_{m=2}^{r} b_m / x^(m) + R(x)` with `|R| <= D / x^(r+1)` for
/// `k >= K`, where `x^(m)` is the rising factorial.
struct TailModel {
    /// `b_m` for `m = 0..=r` (entries 0 and 1 are zero).
    factorial_coeffs: Vec<Rational>,
    /// `Q(x) = B(x - 1)`, monic.
    den: UPoly,
    /// Remainder numerator over `Q(x) x^(r)`.
    rem_num: UPoly,
}

impl TailModel {
    fn new(num: &[Rational], den: &[Rational]) -> Self {
        let r = FACTORIAL_SERIES_ORDER;
        let minus_one = -Rational::one();
        let p = upoly_taylor_shift(num, &minus_one);
        let q = upoly_taylor_shift(den, &minus_one);
        let dq = q.len() - 1;
        let rising_r = upoly_linear_product((0..r).map(int));
        let mut rem = upoly_mul(&p, &rising_r);
        rem.resize(dq + r as usize + 1, Rational::zero());
        let lead = q[dq].clone();
        let mut factorial_coeffs = vec![Rational::zero(); r as usize + 1];
        for m in 1..=r {
            let top = dq + (r - m) as usize;
            let b = &rem[top] / &lead;
            if !b.is_zero() {
                let basis = upoly_mul(&q, &upoly_linear_product((m..r).map(int)));
                for (idx, c) in basis.iter().enumerate() {
                    rem[idx] -= &b * c;
                }
                debug_assert!(rem[top].is_zero());
            }
            factorial_coeffs[m as usize] = b;
        }
        trim(&mut rem);
        TailModel {
            factorial_coeffs,
            den: q,
            rem_num: rem,
        }
    }

    /// `(estimate, radius)` for `sum_{k >= K} f(k)`.
    fn tail(&self, first: u64) -> (Rational, Rational) {
        let r = FACTORIAL_SERIES_ORDER;
        let x0 = int(first + 1);
        let mut estimate = Rational::zero();
        for (m, b) in self.factorial_coeffs.iter().enumerate().skip(2) {
            if !b.is_zero() {
                let m = m as u32;
                estimate += b / (int(m - 1) * rising_at(&x0, m - 1));
            }
        }
        // sup_{x >= x0} |rem(x) (x + r)| / Q(x), bounded coefficientwise in y = x - x0.
        let bound_num = upoly_taylor_shift(&upoly_mul(&self.rem_num, &[int(r), Rational::one()]), &x0);
        let bound_den = upoly_taylor_shift(&self.den, &x0);
        let mut sup = Rational::zero();
        for (l, c) in bound_num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = &bound_den[l];
            debug_assert!(d.is_positive());
            let ratio = c.abs() / d;
            if ratio > sup {
                sup = ratio;
            }
        }
        let radius = sup / (int(r) * rising_at(&x0, r));
        (estimate, radius)
    }
}

/// Sums the `M* P M` series directly and encloses the tail with a
/// factorial-series asymptotic whose remainder is bounded coefficientwise.
///
/// Independent of [`solve_telescope`]: nothing here uses an antidifference of
/// the summand.
pub fn mpm_entry_numeric(order: Order, i: u64, j: u64, tol: &Rational) -> NumericEnclosure {
    assert!(tol.is_positive(), "tolerance must be positive");
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    let n = order.get() as i64;
    let (ii, jj) = (i as i64, j as i64);
    let mut num = vec![int(n * n)];
    for t in 1..n {
        num = upoly_mul(&num, &[int(jj + t - ii), Rational::one()]);
        num = upoly_mul(&num, &[int(t), Rational::one()]);
    }
    let den = upoly_linear_product((1..=2 * n).map(|t| int(jj + t)));
    let model = TailModel::new(&num, &den);

    let mut partial = Rational::zero();
    let mut summed = 0u64;
    let mut target = 4 * n as u64;
    loop {
        while summed < target {
            let k = int(summed);
            partial += upoly_eval(&num, &k) / upoly_eval(&den, &k);
            summed += 1;
        }
        let (estimate, radius) = model.tail(summed);
        let two_radius = &radius + &radius;
        if &two_radius <= tol || summed >= MAX_TERMS {
            let lower_tail = (&estimate - &radius).max(Rational::zero());
            let upper_tail = &estimate + &radius;
            return NumericEnclosure {
                terms: summed,
                lower: &partial + lower_tail,
                upper: &partial + &upper_tail,
                tail_bound: upper_tail,
                partial,
            };
        }
        target *= 2;
    }
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
    fn term_for_low_orders() {
        let t1 = mpm_term(ord(1)).term;
        let expected = RatFun::new(
            c(1),
            vec![
                LinearFactor::new(Var::K, j_plus(1)),
                LinearFactor::new(Var::K, j_plus(2)),
            ],
            int(1),
        );
        assert!(t1.equals(&expected));

        let t3 = mpm_term(ord(3)).term;
        let k = MultiPoly::var(Var::K);
        let num = (&j() + c(1) - i() + &k)
            * (&j() + c(2) - i() + &k)
            * (&k + c(1))
            * (&k + c(2))
            * c(9);
        let factors = (1..=6).map(|t| LinearFactor::new(Var::K, j_plus(t))).collect();
        assert!(t3.equals(&RatFun::new(num, factors, int(1))));
        assert_eq!(t3.factors().len(), 6);
        assert_eq!(t3.numerator().degree_in(Var::K), 4);
        assert_eq!(t3.scale(), &int(9));
    }

    #[test]
    fn order_one_antidifference() {
        let sol = solve_telescope(ord(1), TelescopeMode::Symbolic).unwrap();
        assert_eq!(sol.coeffs, vec![c(1)]);
        let expected_s = RatFun::new(c(1), vec![LinearFactor::new(Var::K, j_plus(1))], int(1));
        assert!(sol.antidifference.equals(&expected_s));
        let expected = RatFun::new(c(1), vec![LinearFactor::shifted(Var::J, 1)], int(1));
        assert!(sol.closed_form.equals(&expected));
    }

    #[test]
    fn order_three_coefficients() {
        let sol = solve_telescope(ord(3), TelescopeMode::Symbolic).unwrap();
        assert_eq!(sol.coeffs.len(), 5);
        assert_eq!(sol.coeffs[4], c(1));
        assert_eq!(sol.coeffs[3], c(8) - i() + c(3) * j());
        let c2 = (c(71) - c(15) * i() + i() * i() + c(57) * j() - c(5) * i() * j() + c(10) * j() * j())
            .scale(&rat(1, 3));
        assert_eq!(sol.coeffs[2], c2);
    }

    #[test]
    fn order_four_leading_coefficients() {
        let sol = solve_telescope(ord(4), TelescopeMode::Symbolic).unwrap();
        assert_eq!(sol.coeffs[6], c(1));
        assert_eq!(sol.coeffs[5], (c(33) - c(3) * i() + c(9) * j()).scale(&rat(1, 2)));
    }

    #[test]
    fn closed_form_order_three() {
        let closed = mpm_entry_closed(ord(3)).unwrap();
        let at_origin = closed.value_at(&[(Var::I, int(0)), (Var::J, int(0))]).unwrap();
        assert_eq!(at_origin, int(1));
        let first_row = closed.eval(&[(Var::I, int(0))]).unwrap();
        let expected = RatFun::new(c(3), vec![LinearFactor::shifted(Var::J, 3)], int(1));
        assert!(first_row.equals(&expected));
    }

    #[test]
    fn numeric_mode_matches_symbolic_specialisation() {
        for n in 1..=4 {
            let sym = solve_telescope(ord(n), TelescopeMode::Symbolic).unwrap();
            for (a, b) in [(0u64, 0u64), (0, 3), (2, 5), (4, 4), (1, 7)] {
                let num = solve_telescope(ord(n), TelescopeMode::Numeric { i: a, j: b }).unwrap();
                let bind = [(Var::I, int(a)), (Var::J, int(b))];
                let specialised: Vec<_> = sym.coeffs.iter().map(|p| p.eval(&bind)).collect();
                assert_eq!(specialised, num.coeffs);
                assert_eq!(
                    sym.closed_form.value_at(&bind).unwrap(),
                    num.closed_form.value_at(&[]).unwrap()
                );
            }
        }
    }

    #[test]
    fn numeric_mode_rejects_lower_region() {
        let err = solve_telescope(ord(2), TelescopeMode::Numeric { i: 3, j: 1 }).unwrap_err();
        assert_eq!(err.kind, TelescopeError::Region { i: 3, j: 1 });
    }

    #[test]
    fn exact_entry_is_symmetric() {
        assert_eq!(mpm_entry_exact(ord(3), 4, 2).unwrap(), mpm_entry_exact(ord(3), 2, 4).unwrap());
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = vec![int(3), int(-2), rat(1, 2), int(5)];
        let a = rat(-3, 2);
        let shifted = upoly_taylor_shift(&p, &a);
        for x in [-2i64, 0, 1, 7] {
            let x = int(x);
            assert_eq!(upoly_eval(&shifted, &x), upoly_eval(&p, &(&x + &a)));
        }
    }

    #[test]
    fn numeric_enclosure_examples() {
        let tol = rat(1, 10_000_000_000);
        let e = mpm_entry_numeric(ord(3), 0, 0, &tol);
        assert!(e.contains(&int(1)), "{e:?}");
        assert!(e.width() <= tol);
        assert!(e.partial <= e.lower);

        let e = mpm_entry_numeric(ord(1), 2, 5, &rat(1, 100_000_000));
        assert!(e.contains(&rat(1, 6)));

        let exact = mpm_entry_closed(ord(4))
            .unwrap()
            .value_at(&[(Var::I, int(3)), (Var::J, int(7))])
            .unwrap();
        let e = mpm_entry_numeric(ord(4), 3, 7, &tol);
        assert!(e.contains(&exact));
        assert!(e.width() <= tol);
        assert!(exact <= &e.partial + &e.tail_bound);
    }
}
