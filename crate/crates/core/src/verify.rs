//! Assembles the posinormality argument for a given order.
//!
//! * [`verify_identity`] compares `M M*` against `M* P M` on `j >= i`, either
//!   as rational functions or cell by cell on a grid. Both sides are symmetric
//!   in `(i, j)` because `P` is diagonal, so the region `i > j` is mirrored.
//! * [`verify_contraction`] checks `0 < p_n < 1` with `p_n` increasing, which
//!   gives `I - P >= 0` and invertibility of `P`.
//! * [`hyponormal_certificate`] exhibits `||M f||^2 >= ||M* f||^2` for one
//!   finitely supported `f` using exact lower bounds on `||M f||^2`.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::time::Duration;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cesaro::{entry, interrupter_entry, Order, SparseVector};
use crate::exact::{dyadic_ceil, dyadic_floor, ExactError, LinearFactor, MultiPoly, RatFun, Rational, Var};
use crate::finitesum::{mmstar_entry_closed, mmstar_entry_direct};
use crate::telescope::{mpm_entry_closed, mpm_entry_exact, TelescopeFailure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerifyMode {
    Symbolic,
    /// Cells `0 <= i <= j` with `i <= imax`, `j <= jmax`.
    Grid { imax: u64, jmax: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    /// A mathematical counterexample or a refuted ansatz.
    Fail,
    /// The pipeline itself broke (for example a factorisation step).
    Error,
}

/// One located problem in a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// `(M M*)_{ij} != (M* P M)_{ij}` at a grid cell.
    Mismatch {
        i: u64,
        j: u64,
        mmstar: Rational,
        mpm: Rational,
    },
    /// `(M M*)_{ij} != (M M*)_{ji}` from the direct sums.
    Asymmetry { i: u64, j: u64 },
    /// The two symbolic closed forms differ.
    SymbolicResidual { residual: MultiPoly },
    /// The telescoping ansatz failed for this order.
    Telescope(TelescopeFailure),
    /// The Faulhaber route did not factor as expected.
    Factorisation(ExactError),
    Contraction(ContractionFailure),
}

impl Failure {
    /// Internal failures are reported as errors rather than counterexamples.
    pub fn is_internal(&self) -> bool {
        matches!(self, Failure::Factorisation(_))
    }

    fn sort_key(&self) -> (u8, u64, u64) {
        match self {
            Failure::Mismatch { i, j, .. } => (0, *i, *j),
            Failure::Asymmetry { i, j } => (1, *i, *j),
            Failure::SymbolicResidual { .. } => (2, 0, 0),
            Failure::Telescope(_) => (3, 0, 0),
            Failure::Factorisation(_) => (4, 0, 0),
            Failure::Contraction(c) => (5, c.n, 0),
        }
    }
}

/// The two closed forms on `j >= i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// `s(0)` from the telescoping solution.
    pub mpm: RatFun,
    /// The Faulhaber-route closed form of `M M*`.
    pub mmstar: RatFun,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionFailure {
    pub n: u64,
    pub reason: ContractionIssue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContractionIssue {
    OutsideUnitInterval(Rational),
    NotIncreasing { current: Rational, next: Rational },
    /// Factor pair `t` of the symbolic product is not strictly ordered.
    Factor { t: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionReport {
    pub order: Order,
    /// Every numerator factor `n + t` is positive on `n >= 0` and smaller than
    /// its partner `n + t + N` by a positive constant.
    pub factorwise: bool,
    /// Number of indices `n` whose `p_n` and `p_{n+1}` were evaluated.
    pub samples: u64,
    /// Largest sampled index.
    pub max_index: u64,
    /// `p_0`, the infimum of the diagonal when the sequence increases.
    pub p0: Rational,
    pub failures: Vec<ContractionFailure>,
}

impl ContractionReport {
    pub fn holds(&self) -> bool {
        self.factorwise && self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub order: Order,
    pub mode: VerifyMode,
    pub identity_holds: bool,
    pub witness: Option<Witness>,
    /// Cross-multiplied difference of the two closed forms; zero on success
    /// and in grid mode.
    pub residual: MultiPoly,
    pub contraction: Option<ContractionReport>,
    /// Grid cells compared (0 in symbolic mode).
    pub cells_checked: u64,
    /// Filled in by callers that can measure time.
    pub elapsed: Option<Duration>,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn contraction_holds(&self) -> Option<bool> {
        self.contraction.as_ref().map(ContractionReport::holds)
    }

    pub fn verdict(&self) -> Verdict {
        if self.failures.iter().any(Failure::is_internal) {
            Verdict::Error
        } else if !self.identity_holds || self.contraction_holds() == Some(false) {
            Verdict::Fail
        } else {
            Verdict::Pass
        }
    }

    /// Assembles a grid report from per-cell outcomes in any order.
    pub fn from_cells<'a, I>(order: Order, imax: u64, jmax: u64, cells: I) -> Self
    where
        I: IntoIterator<Item = &'a CellOutcome>,
    {
        let mut count = 0;
        let mut failures = Vec::new();
        for cell in cells {
            count += 1;
            failures.extend(cell.failures.iter().cloned());
        }
        failures.sort_by_key(Failure::sort_key);
        VerificationReport {
            order,
            mode: VerifyMode::Grid { imax, jmax },
            identity_holds: failures.is_empty(),
            witness: None,
            residual: MultiPoly::zero(),
            contraction: None,
            cells_checked: count,
            elapsed: None,
            failures,
        }
    }

    pub fn with_contraction(mut self, contraction: ContractionReport) -> Self {
        for f in &contraction.failures {
            self.failures.push(Failure::Contraction(f.clone()));
        }
        self.contraction = Some(contraction);
        self
    }
}

/// Canonical grid cells `(i, j)`, `i <= j`, sorted.
pub fn grid_cells(imax: u64, jmax: u64) -> Vec<(u64, u64)> {
    (0..=jmax)
        .flat_map(|j| (0..=imax.min(j)).map(move |i| (i, j)))
        .collect()
}

/// Both entry values at one canonical cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellOutcome {
    pub i: u64,
    pub j: u64,
    pub mmstar: Rational,
    /// `None` when the telescoping solve failed at this cell.
    pub mpm: Option<Rational>,
    pub failures: Vec<Failure>,
}

impl CellOutcome {
    pub fn agrees(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares both entry families at one canonical cell and checks the
/// mirrored `M M*` entry.
pub fn check_cell(order: Order, i: u64, j: u64) -> CellOutcome {
    let mut failures = Vec::new();
    let mmstar = mmstar_entry_direct(order, i, j);
    if i != j && mmstar_entry_direct(order, j, i) != mmstar {
        failures.push(Failure::Asymmetry { i, j });
    }
    let mpm = match mpm_entry_exact(order, i, j) {
        Ok(mpm) => {
            if mpm != mmstar {
                failures.push(Failure::Mismatch {
                    i,
                    j,
                    mmstar: mmstar.clone(),
                    mpm: mpm.clone(),
                });
            }
            Some(mpm)
        }
        Err(e) => {
            failures.push(Failure::Telescope(e));
            None
        }
    };
    CellOutcome {
        i,
        j,
        mmstar,
        mpm,
        failures,
    }
}

fn verify_symbolic(order: Order) -> VerificationReport {
    let mut failures = Vec::new();
    let mpm = mpm_entry_closed(order).map_err(|e| failures.push(Failure::Telescope(e))).ok();
    let mmstar = mmstar_entry_closed(order)
        .map_err(|e| failures.push(Failure::Factorisation(e)))
        .ok();
    let (identity_holds, residual, witness) = match (mpm, mmstar) {
        (Some(mpm), Some(mm)) => {
            let residual = mpm.cross_residual(&mm.closed);
            let holds = residual.is_zero();
            if !holds {
                failures.push(Failure::SymbolicResidual {
                    residual: residual.clone(),
                });
            }
            let witness = Witness {
                mpm,
                mmstar: mm.closed,
            };
            (holds, residual, Some(witness))
        }
        _ => (false, MultiPoly::zero(), None),
    };
    VerificationReport {
        order,
        mode: VerifyMode::Symbolic,
        identity_holds,
        witness,
        residual,
        contraction: None,
        cells_checked: 0,
        elapsed: None,
        failures,
    }
}

/// Checks `M M* = M* P M` for one order.
pub fn verify_identity(order: Order, mode: VerifyMode) -> VerificationReport {
    match mode {
        VerifyMode::Symbolic => verify_symbolic(order),
        VerifyMode::Grid { imax, jmax } => {
            let cells: Vec<CellOutcome> = grid_cells(imax, jmax)
                .into_iter()
                .map(|(i, j)| check_cell(order, i, j))
                .collect();
            VerificationReport::from_cells(order, imax, jmax, &cells)
        }
    }
}

/// Symbolic factor pairs `(n + t, n + t + N)` of the interrupter.
fn factorwise_check(order: Order) -> (bool, Vec<ContractionFailure>) {
    let big_n = order.get() as i64;
    let mut failures = Vec::new();
    for t in 1..=big_n {
        let numerator = LinearFactor::shifted(Var::N, t).to_poly();
        let denominator = LinearFactor::shifted(Var::N, t + big_n).to_poly();
        let gap = (&denominator - &numerator).as_constant();
        let gap_positive = gap.is_some_and(|g| g.is_positive());
        let numerator_positive = numerator.terms().all(|(_, c)| c.is_positive());
        if !(gap_positive && numerator_positive) {
            failures.push(ContractionFailure {
                n: 0,
                reason: ContractionIssue::Factor { t: t as u32 },
            });
        }
    }
    (failures.is_empty(), failures)
}

/// `0 < p_n < 1` and `p_n < p_{n+1}` at each sampled `n`, plus the symbolic
/// factorwise comparison.
pub fn verify_contraction_at<I: IntoIterator<Item = u64>>(order: Order, samples: I) -> ContractionReport {
    let (factorwise, mut failures) = factorwise_check(order);
    let zero = Rational::zero();
    let one = Rational::one();
    let mut count = 0;
    let mut max_index = 0;
    for n in samples {
        count += 1;
        max_index = max_index.max(n);
        let current = interrupter_entry(order, n);
        let next = interrupter_entry(order, n + 1);
        if current <= zero || current >= one {
            failures.push(ContractionFailure {
                n,
                reason: ContractionIssue::OutsideUnitInterval(current.clone()),
            });
        }
        if next <= current {
            failures.push(ContractionFailure {
                n,
                reason: ContractionIssue::NotIncreasing { current, next },
            });
        }
    }
    // failures from the factor check carry n = 0 and stay first
    failures.sort_by_key(|f| f.n);
    ContractionReport {
        order,
        factorwise,
        samples: count,
        max_index,
        p0: interrupter_entry(order, 0),
        failures,
    }
}

/// Dense contraction check on `n = 0..=nmax`.
pub fn verify_contraction(order: Order, nmax: u64) -> ContractionReport {
    verify_contraction_at(order, 0..=nmax)
}

/// Default dense range for contraction checks inside campaigns.
pub const DEFAULT_CONTRACTION_RANGE: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CampaignError {
    #[error("conjecture campaigns need 5 <= from <= to (got {from}..={to}); orders up to 4 are regression checks")]
    Range { from: u32, to: u32 },
}

/// Checks the campaign bounds.
pub fn conjecture_orders(from: u32, to: u32) -> Result<Vec<Order>, CampaignError> {
    if from < 5 || from > to {
        return Err(CampaignError::Range { from, to });
    }
    Ok((from..=to).map(|n| Order::new(n).expect("n >= 5")).collect())
}

/// Symbolic identity plus contraction for one order.
pub fn verify_order(order: Order, mode: VerifyMode, nmax: u64) -> VerificationReport {
    verify_identity(order, mode).with_contraction(verify_contraction(order, nmax))
}

/// Symbolic verification for every order in `from..=to`, `from >= 5`.
pub fn run_conjecture(from: u32, to: u32) -> Result<Vec<VerificationReport>, CampaignError> {
    Ok(conjecture_orders(from, to)?
        .into_iter()
        .map(|order| verify_order(order, VerifyMode::Symbolic, DEFAULT_CONTRACTION_RANGE))
        .collect())
}

// --- per-vector hyponormality certificates -----------------------------------

/// Precision of the dyadic lower/upper bounds on the `||M f||^2` partial sums.
pub const CERTIFICATE_BITS: u32 = 256;
pub const DEFAULT_CERTIFICATE_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyponormalCertificate {
    pub order: Order,
    pub vector: SparseVector,
    /// `<M M* f, f> = ||M* f||^2`, exact.
    pub mmstar_form: Rational,
    /// Lower bound on `sum_{n < terms} (M f)_n^2`, hence on `||M f||^2`.
    pub m_form_lower: Rational,
    /// Upper bound on `sum_{n < terms} p_n (M f)_n^2`.
    pub weighted_form_upper: Rational,
    /// `m_form_lower - mmstar_form`.
    pub margin: Rational,
    pub terms: u64,
    pub certified: bool,
    /// The weighted partial sum stayed at or below `mmstar_form`.
    pub weighted_bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no certificate within {} terms (margin {})", .0.terms, .0.margin)]
pub struct Uncertified(pub Box<HyponormalCertificate>);

/// `<M M* f, f>` as a finite double sum over the support of `f`.
pub fn mmstar_form(order: Order, f: &SparseVector) -> Rational {
    let mut total = Rational::zero();
    for (a, fa) in f.iter() {
        for (b, fb) in f.iter() {
            total += mmstar_entry_direct(order, a, b) * fa * fb;
        }
    }
    total
}

/// `(M f)_n`.
fn image_entry(order: Order, f: &SparseVector, n: u64) -> Rational {
    f.iter()
        .take_while(|(col, _)| *col <= n)
        .map(|(col, x)| entry(order, n, col) * x)
        .sum()
}

/// Accumulates `(M f)_n^2` until the partial sum exceeds `<M M* f, f>`.
pub fn hyponormal_certificate(
    order: Order,
    f: &SparseVector,
    cap: u64,
) -> Result<HyponormalCertificate, Uncertified> {
    let target = mmstar_form(order, f);
    let scale = Rational::from_integer(BigInt::one() << CERTIFICATE_BITS as usize);
    let target_scaled = &target * &scale;
    let mut lower = BigInt::zero();
    let mut weighted = BigInt::zero();
    let mut terms = 0u64;
    // strict excess is required except for f = 0
    let mut certified = f.is_zero();
    while !certified && terms < cap {
        let y = image_entry(order, f, terms);
        let sq = &y * &y;
        let weighted_sq = &sq * interrupter_entry(order, terms);
        lower += dyadic_floor(&sq, CERTIFICATE_BITS);
        weighted += dyadic_ceil(&weighted_sq, CERTIFICATE_BITS);
        terms += 1;
        certified = Rational::from_integer(lower.clone()) > target_scaled;
    }
    let m_form_lower = Rational::from_integer(lower) / &scale;
    let weighted_form_upper = Rational::from_integer(weighted) / &scale;
    let certificate = HyponormalCertificate {
        order,
        vector: f.clone(),
        margin: &m_form_lower - &target,
        weighted_bounded: weighted_form_upper <= target,
        mmstar_form: target,
        m_form_lower,
        weighted_form_upper,
        terms,
        certified,
    };
    if certified {
        Ok(certificate)
    } else {
        Err(Uncertified(Box::new(certificate)))
    }
}
