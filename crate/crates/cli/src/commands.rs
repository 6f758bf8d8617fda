use std::fmt::Write as _;
use std::time::{Duration, Instant};

use cesaro_core::cesaro::{entry, entry_symbolic, Order, SparseVector};
use cesaro_core::exact::MultiPoly;
use cesaro_core::finitesum::{faulhaber_table, mmstar_entry_closed};
use cesaro_core::telescope::{mpm_entry_numeric, mpm_term_in, solve_telescope, TelescopeMode};
use cesaro_core::verify::{
    check_cell, conjecture_orders, grid_cells, hyponormal_certificate, verify_contraction, verify_identity,
    CellOutcome, HyponormalCertificate, Verdict, VerificationReport, VerifyMode,
};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::args::{CertifyArgs, EntryArgs, OrderArg, RangeArgs, TelescopeArgs, VerifyArgs};
use crate::config::{parse_tolerance, parse_vector, RunConfig};
use crate::dto::{
    verdict_name, CertificateDto, Document, EntryDto, FaulhaberDto, Payload, RatFunDto, ReportDto, TelescopeDto,
};
use crate::random::random_vectors;
use crate::{CliError, Status};

/// Everything a command produced, before it is written anywhere.
#[derive(Debug)]
pub struct Outcome {
    pub document: Document,
    pub text: String,
    pub csv: String,
    /// Lines worth showing even when the report goes to a file.
    pub summary: Vec<String>,
    pub status: Status,
}

pub fn order(n: u32) -> Result<Order, CliError> {
    Order::new(n).map_err(|e| CliError::Usage(e.to_string()))
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(CliError::internal)?;
    for row in rows {
        w.write_record(&row).map_err(CliError::internal)?;
    }
    let bytes = w.into_inner().map_err(CliError::internal)?;
    String::from_utf8(bytes).map_err(CliError::internal)
}

pub fn format_duration(d: Duration) -> String {
    format!("{d:.2?}")
}

pub fn cmd_entry(args: &EntryArgs) -> Result<Outcome, CliError> {
    let n = order(args.order)?;
    let (dto, text) = if args.symbolic {
        let r = entry_symbolic(n);
        let dto = EntryDto {
            order: n.get(),
            i: None,
            j: None,
            value: None,
            symbolic: Some(RatFunDto::from(&r)),
        };
        (dto, format!("{r}  (0 <= j <= i)"))
    } else {
        let (i, j) = (args.i.unwrap_or_default(), args.j.unwrap_or_default());
        let v = entry(n, i, j).to_string();
        let dto = EntryDto {
            order: n.get(),
            i: Some(i),
            j: Some(j),
            value: Some(v.clone()),
            symbolic: None,
        };
        (dto, v)
    };
    let csv = csv_string(
        &["order", "i", "j", "value"],
        [vec![
            dto.order.to_string(),
            dto.i.map(|x| x.to_string()).unwrap_or_default(),
            dto.j.map(|x| x.to_string()).unwrap_or_default(),
            dto.value.clone().unwrap_or_else(|| text.clone()),
        ]],
    )?;
    Ok(Outcome {
        document: Document::new(Payload::Entry(dto)),
        text: text + "\n",
        csv,
        summary: Vec::new(),
        status: Status::Pass,
    })
}

/// One verified order plus the grid cells behind it.
pub struct Verified {
    pub report: VerificationReport,
    pub cells: Vec<CellOutcome>,
}

/// Identity (in `mode`) plus contraction, timed.
pub fn verify_one(n: Order, mode: VerifyMode, contraction_range: u64) -> Verified {
    let start = Instant::now();
    let (report, cells) = match mode {
        VerifyMode::Symbolic => (verify_identity(n, mode), Vec::new()),
        VerifyMode::Grid { imax, jmax } => {
            let cells: Vec<CellOutcome> = grid_cells(imax, jmax)
                .into_par_iter()
                .map(|(i, j)| check_cell(n, i, j))
                .collect();
            (VerificationReport::from_cells(n, imax, jmax, &cells), cells)
        }
    };
    let mut report = report.with_contraction(verify_contraction(n, contraction_range));
    report.elapsed = Some(start.elapsed());
    Verified { report, cells }
}

pub fn summary_line(report: &VerificationReport) -> String {
    let time = report.elapsed.map(format_duration).unwrap_or_else(|| "-".into());
    format!("N={}: {} ({time})", report.order, verdict_name(report.verdict()))
}

fn render_report(out: &mut String, v: &Verified) {
    let r = &v.report;
    let _ = writeln!(out, "{}", summary_line(r));
    match r.mode {
        VerifyMode::Symbolic => {
            let _ = writeln!(out, "  mode: symbolic");
        }
        VerifyMode::Grid { imax, jmax } => {
            let _ = writeln!(
                out,
                "  mode: grid 0 <= i <= j, i <= {imax}, j <= {jmax} ({} cells)",
                r.cells_checked
            );
        }
    }
    let _ = writeln!(out, "  identity: {}", if r.identity_holds { "holds" } else { "fails" });
    if let Some(c) = &r.contraction {
        let _ = writeln!(
            out,
            "  contraction: {} (p_0 = {}, n <= {}, factorwise {})",
            if c.holds() { "holds" } else { "fails" },
            c.p0,
            c.max_index,
            if c.factorwise { "ok" } else { "fails" },
        );
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "  M*PM: {}", w.mpm);
        let _ = writeln!(out, "  MM*:  {}", w.mmstar);
    }
    for f in &r.failures {
        let dto = crate::dto::FailureDto::from(f);
        let at = match (dto.i, dto.j, dto.n) {
            (Some(i), Some(j), _) => format!(" at ({i}, {j})"),
            (_, _, Some(n)) => format!(" at n = {n}"),
            _ => String::new(),
        };
        let _ = writeln!(out, "  failure [{}]{at}: {}", dto.kind, dto.message);
    }
}

fn reports_outcome(verified: &[Verified], conjecture: bool) -> Result<Outcome, CliError> {
    let reports: Vec<ReportDto> = verified.iter().map(|v| ReportDto::new(&v.report, &v.cells)).collect();
    let mut text = String::new();
    for v in verified {
        render_report(&mut text, v);
    }
    let status = verified
        .iter()
        .map(|v| Status::from(v.report.verdict()))
        .fold(Status::Pass, Status::combine);
    let any_grid = verified.iter().any(|v| !v.cells.is_empty());
    let csv = if any_grid {
        csv_string(
            &["order", "i", "j", "mmstar", "mpm", "agrees"],
            verified.iter().flat_map(|v| {
                v.cells.iter().map(move |c| {
                    vec![
                        v.report.order.to_string(),
                        c.i.to_string(),
                        c.j.to_string(),
                        c.mmstar.to_string(),
                        c.mpm.as_ref().map(|x| x.to_string()).unwrap_or_default(),
                        c.agrees().to_string(),
                    ]
                })
            }),
        )?
    } else {
        csv_string(
            &["order", "mode", "verdict", "identity_holds", "contraction_holds", "wall_time_micros", "witness"],
            reports.iter().map(|r| {
                vec![
                    r.order.to_string(),
                    r.mode.clone(),
                    r.verdict.clone(),
                    r.identity_holds.to_string(),
                    r.contraction_holds.map(|b| b.to_string()).unwrap_or_default(),
                    r.wall_time_micros.map(|t| t.to_string()).unwrap_or_default(),
                    r.witness.as_ref().map(|w| w.mpm.text.clone()).unwrap_or_default(),
                ]
            }),
        )?
    };
    let summary = verified.iter().map(|v| summary_line(&v.report)).collect();
    let payload = if conjecture {
        Payload::Conjecture { reports }
    } else {
        Payload::Verify { reports }
    };
    Ok(Outcome {
        document: Document::new(payload),
        text,
        csv,
        summary,
        status,
    })
}

pub fn cmd_verify(args: &VerifyArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let orders: Vec<Order> = match (args.order, args.from, args.to) {
        (Some(n), _, _) => vec![order(n)?],
        (None, Some(from), Some(to)) if from <= to => (from..=to).map(order).collect::<Result<_, _>>()?,
        (None, Some(from), Some(to)) => {
            return Err(CliError::Usage(format!("empty order range {from}..={to}")));
        }
        _ => return Err(CliError::Usage("give --order or --from/--to".into())),
    };
    let mode = match args.grid {
        Some(g) => VerifyMode::Grid { imax: g, jmax: g },
        None => VerifyMode::Symbolic,
    };
    let verified: Vec<Verified> = orders
        .par_iter()
        .map(|&n| verify_one(n, mode, config.contraction_range))
        .collect();
    reports_outcome(&verified, false)
}

pub fn cmd_conjecture(args: &RangeArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let orders = conjecture_orders(args.from, args.to).map_err(|e| CliError::Usage(e.to_string()))?;
    let verified: Vec<Verified> = orders
        .par_iter()
        .map(|&n| verify_one(n, VerifyMode::Symbolic, config.contraction_range))
        .collect();
    reports_outcome(&verified, true)
}

pub fn cmd_certify(args: &CertifyArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let n = order(args.order)?;
    let cap = args.cap.unwrap_or(config.cap);
    let vectors: Vec<SparseVector> = match (&args.vector, args.seed) {
        (Some(v), _) => vec![parse_vector(v)?],
        (None, Some(seed)) => {
            if args.support == 0 {
                return Err(CliError::Usage("--support must be at least 1".into()));
            }
            random_vectors(seed, args.support, args.count)
        }
        (None, None) => return Err(CliError::Usage("give --vector or --seed".into())),
    };
    let certificates: Vec<HyponormalCertificate> = vectors
        .par_iter()
        .map(|f| hyponormal_certificate(n, f, cap).unwrap_or_else(|e| *e.0))
        .collect();
    let dtos: Vec<CertificateDto> = certificates.iter().map(CertificateDto::from).collect();
    let mut text = String::new();
    for (idx, (c, cert)) in dtos.iter().zip(&certificates).enumerate() {
        let vector: Vec<String> = c.vector.iter().map(|(i, x)| format!("{i}:{x}")).collect();
        let _ = writeln!(
            text,
            "#{idx} N={} f=[{}]: {} after {} terms, margin {} (<MM*f,f> = {}, weighted sum <= {:.6e}{})",
            c.order,
            vector.join(","),
            if c.certified { "certified" } else { "UNCERTIFIED" },
            c.terms,
            c.margin,
            c.mmstar_form,
            cert.weighted_form_upper.to_f64().unwrap_or(f64::NAN),
            if c.weighted_bounded { "" } else { ", exceeds <MM*f,f>" },
        );
    }
    let certified = dtos.iter().filter(|c| c.certified).count();
    let summary = vec![format!("N={n}: {certified}/{} certified", dtos.len())];
    let _ = writeln!(text, "{}", summary[0]);
    let csv = csv_string(
        &["order", "vector", "mmstar_form", "m_form_lower", "margin", "terms", "certified", "weighted_bounded"],
        dtos.iter().map(|c| {
            let vector: Vec<String> = c.vector.iter().map(|(i, x)| format!("{i}:{x}")).collect();
            vec![
                c.order.to_string(),
                vector.join(" "),
                c.mmstar_form.clone(),
                c.m_form_lower.clone(),
                c.margin.clone(),
                c.terms.to_string(),
                c.certified.to_string(),
                c.weighted_bounded.to_string(),
            ]
        }),
    )?;
    let status = if certified == dtos.len() {
        Status::Pass
    } else {
        Status::Uncertified
    };
    Ok(Outcome {
        document: Document::new(Payload::Certify { certificates: dtos }),
        text,
        csv,
        summary,
        status,
    })
}

fn coefficient_csv(rows: &[crate::dto::CoeffDto], name: &str) -> Vec<Vec<String>> {
    rows.iter()
        .map(|c| vec![name.to_owned(), c.index.to_string(), c.text.clone()])
        .collect()
}

pub fn cmd_telescope(args: &TelescopeArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let n = order(args.order)?;
    let mode = match (args.i, args.j) {
        (Some(i), Some(j)) if i <= j => TelescopeMode::Numeric { i, j },
        (Some(i), Some(j)) => return Err(CliError::Usage(format!("telescope needs i <= j, got ({i}, {j})"))),
        _ => TelescopeMode::Symbolic,
    };
    let tol = match &args.tol {
        Some(t) => parse_tolerance(t)?,
        None => config.tol.clone(),
    };
    let sol = match solve_telescope(n, mode) {
        Ok(sol) => sol,
        Err(e) => {
            return Err(CliError::Failed(format!("{e}")));
        }
    };
    let term = mpm_term_in(n, mode).map_err(CliError::internal)?;
    let residual_zero = sol
        .residual(&term)
        .map(|r| r.is_zero())
        .map_err(CliError::internal)?;
    let enclosure = match mode {
        TelescopeMode::Numeric { i, j } => Some(mpm_entry_numeric(n, i, j, &tol)),
        TelescopeMode::Symbolic => None,
    };
    let dto = TelescopeDto::new(&sol, residual_zero, enclosure.as_ref());
    let mut text = String::new();
    let _ = writeln!(text, "N={n}: s(k) = N^2 c(k) / {}", dto.denominator.join(""));
    for c in dto.coeffs.iter().rev() {
        let _ = writeln!(text, "  c_{} = {}", c.index, c.text);
    }
    let _ = writeln!(text, "  s(0) = {}", dto.closed_form.text);
    let _ = writeln!(text, "  residual s(k) - s(k+1) - term(k): {}", if residual_zero { "0" } else { "NONZERO" });
    if let Some(e) = &dto.enclosure {
        let _ = writeln!(
            text,
            "  series over {} terms: [{:.17e}, {:.17e}]",
            e.terms, e.lower_decimal, e.upper_decimal
        );
        let _ = writeln!(text, "  exact bounds: [{}, {}]", e.lower, e.upper);
    }
    let csv = csv_string(&["name", "index", "value"], coefficient_csv(&dto.coeffs, "c"))?;
    let status = if residual_zero { Status::Pass } else { Status::Fail };
    Ok(Outcome {
        document: Document::new(Payload::Telescope(dto)),
        text,
        csv,
        summary: Vec::new(),
        status,
    })
}

pub fn cmd_faulhaber(args: &OrderArg) -> Result<Outcome, CliError> {
    let n = order(args.order)?;
    let closed = mmstar_entry_closed(n).map_err(CliError::internal)?;
    let sums: Vec<MultiPoly> = faulhaber_table(2 * n.get() - 2).into_iter().map(|s| s.poly).collect();
    let dto = FaulhaberDto::new(&closed, &sums);
    let mut text = String::new();
    let _ = writeln!(text, "N={n}: prod_t (i-k+t)(j-k+t) = sum_r (-1)^r d_r k^r");
    for d in dto.expansion.iter().rev() {
        let _ = writeln!(text, "  d_{} = {}", d.index, d.text);
    }
    for s in &dto.power_sums {
        let _ = writeln!(text, "  S_{}(i) = {}", s.index, s.text);
    }
    let _ = writeln!(text, "  sum over k = {}", dto.sum_polynomial.text);
    let _ = writeln!(text, "  divided by prod_t (i+t) = {}", dto.quotient.text);
    let _ = writeln!(text, "  MM* = {}", dto.closed_form.text);
    let mut rows = coefficient_csv(&dto.expansion, "d");
    rows.extend(coefficient_csv(&dto.power_sums, "S"));
    let csv = csv_string(&["name", "index", "value"], rows)?;
    Ok(Outcome {
        document: Document::new(Payload::Faulhaber(dto)),
        text,
        csv,
        summary: Vec::new(),
        status: Status::Pass,
    })
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Status::Pass,
            Verdict::Fail => Status::Fail,
            Verdict::Error => Status::Internal,
        }
    }
}
