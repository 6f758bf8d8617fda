//! Run configuration: command-line flags over an optional TOML file over
//! built-in defaults. The default output directory comes from
//! `CESARO_OUT_DIR` when neither `--out` nor `out_dir` is given.

use std::path::{Path, PathBuf};

use cesaro_core::cesaro::SparseVector;
use cesaro_core::exact::{parse_rational, Rational};
use cesaro_core::verify::{DEFAULT_CERTIFICATE_CAP, DEFAULT_CONTRACTION_RANGE};
use num_traits::{Signed, Zero};
use serde::Deserialize;

use crate::args::{Cli, Format};
use crate::CliError;

pub const OUT_DIR_ENV: &str = "CESARO_OUT_DIR";

/// Tolerance of the numeric oracle unless configured.
pub const DEFAULT_TOLERANCE: &str = "1e-10";

#[derive(Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub out_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub tol: Option<String>,
    pub cap: Option<u64>,
    pub contraction_range: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Settings shared by all subcommands after merging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub format: Format,
    /// Where to write the report; `None` means stdout.
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub tol: Rational,
    pub cap: u64,
    pub contraction_range: u64,
}

impl RunConfig {
    pub fn resolve(cli: &Cli, env_out_dir: Option<PathBuf>) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let jobs = cli.jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        let tol_text = file.tol.as_deref().unwrap_or(DEFAULT_TOLERANCE);
        Ok(RunConfig {
            format: cli.format.or(file.format).unwrap_or(Format::Text),
            out: cli.out.clone().or(file.out_dir).or(env_out_dir),
            jobs,
            tol: parse_tolerance(tol_text)?,
            cap: file.cap.unwrap_or(DEFAULT_CERTIFICATE_CAP),
            contraction_range: file.contraction_range.unwrap_or(DEFAULT_CONTRACTION_RANGE),
        })
    }
}

/// Positive rational from `p/q`, an integer or a decimal such as `1e-10`
/// or `0.001`.
pub fn parse_tolerance(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Usage(format!("invalid tolerance {s:?}"));
    let value = parse_rational(s).or_else(|| parse_decimal(s)).ok_or_else(bad)?;
    if value.is_positive() {
        Ok(value)
    } else {
        Err(CliError::Usage(format!("tolerance must be positive, got {s}")))
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = parse_rational(&format!("{whole}{frac}"))?;
    let shift = exponent - frac.len() as i32;
    let ten = Rational::from_integer(10.into());
    let scale = if shift >= 0 {
        num_traits::pow(ten, shift as usize)
    } else {
        num_traits::pow(ten, shift.unsigned_abs() as usize).recip()
    };
    Some(digits * scale)
}

/// Parses `idx:value` pairs separated by commas, e.g. `0:1,3:-1/2`.
pub fn parse_vector(s: &str) -> Result<SparseVector, CliError> {
    let mut v = SparseVector::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let bad = || CliError::Usage(format!("invalid vector entry {item:?}, expected index:value"));
        let (idx, value) = item.split_once(':').ok_or_else(bad)?;
        let idx: u64 = idx.trim().parse().map_err(|_| bad())?;
        let value = parse_rational(value.trim()).ok_or_else(bad)?;
        if !v.get(idx).is_zero() {
            return Err(CliError::Usage(format!("index {idx} given twice")));
        }
        v.set(idx, value);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cesaro_core::exact::{int, rat};

    #[test]
    fn tolerances() {
        assert_eq!(parse_tolerance("1e-10").unwrap(), rat(1, 10_000_000_000));
        assert_eq!(parse_tolerance("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_tolerance("2.5E1").unwrap(), int(25));
        assert_eq!(parse_tolerance("1/3").unwrap(), rat(1, 3));
        assert!(parse_tolerance("0").is_err());
        assert!(parse_tolerance("-1e-3").is_err());
        assert!(parse_tolerance("abc").is_err());
        assert!(parse_tolerance(".").is_err());
    }

    #[test]
    fn vectors() {
        let v = parse_vector("0:1, 3:-1/2").unwrap();
        assert_eq!(v.get(0), int(1));
        assert_eq!(v.get(3), rat(-1, 2));
        assert_eq!(v.len(), 2);
        assert!(parse_vector("0:1,0:2").is_err());
        assert!(parse_vector("x:1").is_err());
        assert!(parse_vector("1").is_err());
        assert!(parse_vector("").unwrap().is_zero());
    }

    #[test]
    fn file_config_parses() {
        let cfg: FileConfig = toml::from_str("format = \"json\"\njobs = 2\ntol = \"1e-6\"\n").unwrap();
        assert_eq!(cfg.format, Some(Format::Json));
        assert_eq!(cfg.jobs, Some(2));
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
