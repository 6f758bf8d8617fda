//! Serialized report shapes (schema "1").
//!
//! Exact values are strings `"p/q"` (or `"p"`). Polynomials are lists of
//! `[[e_i, e_j, e_k, e_n], "p/q"]` pairs in canonical term order.

use std::time::Duration;

use cesaro_core::cesaro::SparseVector;
use cesaro_core::exact::{parse_rational, LinearFactor, Monomial, MultiPoly, RatFun, Rational, Var};
use cesaro_core::finitesum::MmStarClosed;
use cesaro_core::telescope::{NumericEnclosure, TelescopeFailure, TelescopeMode, TelescopeSolution};
use cesaro_core::verify::{
    CellOutcome, ContractionIssue, ContractionReport, Failure, HyponormalCertificate, Verdict, VerificationReport,
    VerifyMode,
};
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DtoError {
    #[error("malformed rational {0:?}")]
    Rational(String),
    #[error("unknown variable {0:?}")]
    Variable(String),
    #[error("factor offset depends on its own variable")]
    Factor,
}

pub fn rational_string(x: &Rational) -> String {
    x.to_string()
}

pub fn parse_exact(s: &str) -> Result<Rational, DtoError> {
    parse_rational(s).ok_or_else(|| DtoError::Rational(s.to_owned()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyDto(pub Vec<([u16; 4], String)>);

impl From<&MultiPoly> for PolyDto {
    fn from(p: &MultiPoly) -> Self {
        PolyDto(p.terms().map(|(m, c)| (m.0, rational_string(c))).collect())
    }
}

impl PolyDto {
    pub fn to_poly(&self) -> Result<MultiPoly, DtoError> {
        let terms = self
            .0
            .iter()
            .map(|(e, c)| Ok((Monomial(*e), parse_exact(c)?)))
            .collect::<Result<Vec<_>, DtoError>>()?;
        Ok(MultiPoly::from_terms(terms))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDto {
    pub var: String,
    pub offset: PolyDto,
}

/// A canonical rational function: `numerator / denominator` with both
/// expanded over the integers, plus the factored denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RatFunDto {
    pub text: String,
    pub numerator: PolyDto,
    pub denominator: PolyDto,
    /// Integer multiplier of the factored denominator.
    pub denominator_content: String,
    pub factors: Vec<FactorDto>,
}

impl From<&RatFun> for RatFunDto {
    fn from(r: &RatFun) -> Self {
        RatFunDto {
            text: r.to_string(),
            numerator: (&r.integer_numerator()).into(),
            denominator: (&r.expanded_denominator()).into(),
            denominator_content: r.scale().denom().to_string(),
            factors: r
                .factors()
                .iter()
                .map(|f| FactorDto {
                    var: f.var().name().to_owned(),
                    offset: f.offset().into(),
                })
                .collect(),
        }
    }
}

impl RatFunDto {
    pub fn to_ratfun(&self) -> Result<RatFun, DtoError> {
        let numerator = self.numerator.to_poly()?;
        let content = parse_exact(&self.denominator_content)?;
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let var = Var::from_name(&f.var).ok_or_else(|| DtoError::Variable(f.var.clone()))?;
                let offset = f.offset.to_poly()?;
                if offset.contains(var) {
                    return Err(DtoError::Factor);
                }
                Ok(LinearFactor::new(var, offset))
            })
            .collect::<Result<Vec<_>, DtoError>>()?;
        Ok(RatFun::new(numerator, factors, Rational::one() / content))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDto {
    pub imax: u64,
    pub jmax: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDto {
    pub mpm: RatFunDto,
    pub mmstar: RatFunDto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDto {
    pub matrix: Vec<Vec<PolyDto>>,
    pub rhs: Vec<PolyDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FailureDto {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<PolyDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemDto>,
}

impl FailureDto {
    fn new(kind: &str, message: String) -> Self {
        FailureDto {
            kind: kind.to_owned(),
            message,
            i: None,
            j: None,
            n: None,
            residual: None,
            system: None,
        }
    }
}

fn telescope_failure(e: &TelescopeFailure) -> FailureDto {
    let mut dto = FailureDto::new("telescope", e.to_string());
    if let TelescopeMode::Numeric { i, j } = e.mode {
        dto.i = Some(i);
        dto.j = Some(j);
    }
    dto.system = e.system.as_ref().map(|s| SystemDto {
        matrix: s.matrix.iter().map(|row| row.iter().map(PolyDto::from).collect()).collect(),
        rhs: s.rhs.iter().map(PolyDto::from).collect(),
    });
    dto
}

impl From<&Failure> for FailureDto {
    fn from(f: &Failure) -> Self {
        match f {
            Failure::Mismatch { i, j, mmstar, mpm } => {
                let mut dto = FailureDto::new("mismatch", format!("MM* = {mmstar}, M*PM = {mpm}"));
                dto.i = Some(*i);
                dto.j = Some(*j);
                dto
            }
            Failure::Asymmetry { i, j } => {
                let mut dto = FailureDto::new("asymmetry", "MM* entry differs from its mirror".to_owned());
                dto.i = Some(*i);
                dto.j = Some(*j);
                dto
            }
            Failure::SymbolicResidual { residual } => {
                let mut dto = FailureDto::new("residual", format!("closed forms differ: {residual}"));
                dto.residual = Some(residual.into());
                dto
            }
            Failure::Telescope(e) => telescope_failure(e),
            Failure::Factorisation(e) => FailureDto::new("factorisation", e.to_string()),
            Failure::Contraction(c) => {
                let message = match &c.reason {
                    ContractionIssue::OutsideUnitInterval(p) => format!("p_n = {p} is outside (0, 1)"),
                    ContractionIssue::NotIncreasing { current, next } => {
                        format!("p_n = {current} is not below p_(n+1) = {next}")
                    }
                    ContractionIssue::Factor { t } => format!("factor pair t = {t} is not strictly ordered"),
                };
                let mut dto = FailureDto::new("contraction", message);
                dto.n = Some(c.n);
                dto
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContractionDto {
    pub holds: bool,
    pub factorwise: bool,
    pub samples: u64,
    pub max_index: u64,
    pub p0: String,
}

impl From<&ContractionReport> for ContractionDto {
    fn from(c: &ContractionReport) -> Self {
        ContractionDto {
            holds: c.holds(),
            factorwise: c.factorwise,
            samples: c.samples,
            max_index: c.max_index,
            p0: rational_string(&c.p0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CellDto {
    pub i: u64,
    pub j: u64,
    pub mmstar: String,
    pub mpm: Option<String>,
    pub agrees: bool,
}

impl From<&CellOutcome> for CellDto {
    fn from(c: &CellOutcome) -> Self {
        CellDto {
            i: c.i,
            j: c.j,
            mmstar: rational_string(&c.mmstar),
            mpm: c.mpm.as_ref().map(rational_string),
            agrees: c.agrees(),
        }
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Error => "ERROR",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportDto {
    pub order: u32,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDto>,
    pub verdict: String,
    pub identity_holds: bool,
    pub contraction_holds: Option<bool>,
    pub witness: Option<WitnessDto>,
    pub residual: PolyDto,
    pub cells_checked: u64,
    pub contraction: Option<ContractionDto>,
    pub failures: Vec<FailureDto>,
    pub wall_time_micros: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<CellDto>,
}

impl ReportDto {
    pub fn new(report: &VerificationReport, cells: &[CellOutcome]) -> Self {
        let (mode, grid) = match report.mode {
            VerifyMode::Symbolic => ("symbolic", None),
            VerifyMode::Grid { imax, jmax } => ("grid", Some(GridDto { imax, jmax })),
        };
        ReportDto {
            order: report.order.get(),
            mode: mode.to_owned(),
            grid,
            verdict: verdict_name(report.verdict()).to_owned(),
            identity_holds: report.identity_holds,
            contraction_holds: report.contraction_holds(),
            witness: report.witness.as_ref().map(|w| WitnessDto {
                mpm: (&w.mpm).into(),
                mmstar: (&w.mmstar).into(),
            }),
            residual: (&report.residual).into(),
            cells_checked: report.cells_checked,
            contraction: report.contraction.as_ref().map(ContractionDto::from),
            failures: report.failures.iter().map(FailureDto::from).collect(),
            wall_time_micros: report.elapsed.map(micros),
            cells: cells.iter().map(CellDto::from).collect(),
        }
    }
}

fn micros(d: Duration) -> u64 {
    d.as_micros().try_into().unwrap_or(u64::MAX)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificateDto {
    pub order: u32,
    pub vector: Vec<(u64, String)>,
    pub mmstar_form: String,
    pub m_form_lower: String,
    pub weighted_form_upper: String,
    pub margin: String,
    pub terms: u64,
    pub certified: bool,
    pub weighted_bounded: bool,
}

impl From<&HyponormalCertificate> for CertificateDto {
    fn from(c: &HyponormalCertificate) -> Self {
        CertificateDto {
            order: c.order.get(),
            vector: vector_pairs(&c.vector),
            mmstar_form: rational_string(&c.mmstar_form),
            m_form_lower: rational_string(&c.m_form_lower),
            weighted_form_upper: rational_string(&c.weighted_form_upper),
            margin: rational_string(&c.margin),
            terms: c.terms,
            certified: c.certified,
            weighted_bounded: c.weighted_bounded,
        }
    }
}

pub fn vector_pairs(v: &SparseVector) -> Vec<(u64, String)> {
    v.iter().map(|(n, x)| (n, rational_string(x))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffDto {
    pub index: usize,
    pub text: String,
    pub poly: PolyDto,
}

fn coeff_list(coeffs: impl IntoIterator<Item = (usize, MultiPoly)>) -> Vec<CoeffDto> {
    coeffs
        .into_iter()
        .map(|(index, p)| CoeffDto {
            index,
            text: p.to_string(),
            poly: (&p).into(),
        })
        .collect()
}

/// Interval bounds, exact and as decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnclosureDto {
    pub terms: u64,
    pub partial: String,
    pub tail_bound: String,
    pub lower: String,
    pub upper: String,
    pub lower_decimal: f64,
    pub upper_decimal: f64,
}

impl From<&NumericEnclosure> for EnclosureDto {
    fn from(e: &NumericEnclosure) -> Self {
        EnclosureDto {
            terms: e.terms,
            partial: rational_string(&e.partial),
            tail_bound: rational_string(&e.tail_bound),
            lower: rational_string(&e.lower),
            upper: rational_string(&e.upper),
            lower_decimal: e.lower.to_f64().unwrap_or(f64::NAN),
            upper_decimal: e.upper.to_f64().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TelescopeDto {
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<(u64, u64)>,
    /// `c_0 ..= c_{2N-2}`.
    pub coeffs: Vec<CoeffDto>,
    pub denominator: Vec<String>,
    pub antidifference: RatFunDto,
    pub closed_form: RatFunDto,
    pub residual_zero: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enclosure: Option<EnclosureDto>,
}

impl TelescopeDto {
    pub fn new(sol: &TelescopeSolution, residual_zero: bool, enclosure: Option<&NumericEnclosure>) -> Self {
        let cell = match sol.mode {
            TelescopeMode::Symbolic => None,
            TelescopeMode::Numeric { i, j } => Some((i, j)),
        };
        TelescopeDto {
            order: sol.order.get(),
            cell,
            coeffs: coeff_list(sol.coeffs.iter().cloned().enumerate()),
            denominator: sol.denominator.iter().map(|f| f.to_string()).collect(),
            antidifference: (&sol.antidifference).into(),
            closed_form: (&sol.closed_form).into(),
            residual_zero,
            enclosure: enclosure.map(EnclosureDto::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FaulhaberDto {
    pub order: u32,
    /// `d_0 ..= d_{2N-2}` (the last is 1).
    pub expansion: Vec<CoeffDto>,
    /// `S_p(i)` for `p = 0 ..= 2N-2`.
    pub power_sums: Vec<CoeffDto>,
    pub sum_polynomial: CoeffDto,
    pub quotient: CoeffDto,
    pub closed_form: RatFunDto,
}

impl FaulhaberDto {
    pub fn new(closed: &MmStarClosed, power_sums: &[MultiPoly]) -> Self {
        let top = closed.expansion.coeffs.len();
        let single = |p: &MultiPoly| CoeffDto {
            index: 0,
            text: p.to_string(),
            poly: p.into(),
        };
        FaulhaberDto {
            order: closed.expansion.order.get(),
            expansion: coeff_list((0..=top).map(|r| (r, closed.expansion.d(r)))),
            power_sums: coeff_list(power_sums.iter().cloned().enumerate()),
            sum_polynomial: single(&closed.sum_polynomial),
            quotient: single(&closed.quotient),
            closed_form: (&closed.closed).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDto {
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<RatFunDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Payload {
    Entry(EntryDto),
    Verify { reports: Vec<ReportDto> },
    Conjecture { reports: Vec<ReportDto> },
    Certify { certificates: Vec<CertificateDto> },
    Telescope(TelescopeDto),
    Faulhaber(FaulhaberDto),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema: String,
    #[serde(flatten)]
    pub payload: Payload,
}

impl Document {
    pub fn new(payload: Payload) -> Self {
        Document {
            schema: SCHEMA_VERSION.to_owned(),
            payload,
        }
    }
}
