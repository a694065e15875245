//! The JSON coefficient-table formats read and written by the CLI.

use std::collections::BTreeSet;
use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use siegel_core::arith::ExponentMatrix;
use siegel_core::coeff::{format_rational, parse_rational_strict};
use siegel_core::formal_fj::{FormalFJSeries, JacobiKey, JacobiTable};
use siegel_core::paramodular::ParamodularTable;
use siegel_core::qseries::SiegelFourierSeries;
use siegel_core::GaussianRational;
use thiserror::Error;

/// Exponent keys are always stored in the scale `E = 8T`.
pub const KEY_SCALE: u32 = 8;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid table: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] siegel_core::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientField {
    Rational,
    Gaussian,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientHeader {
    pub genus: usize,
    /// `"p/q"` or `"p"`.
    pub weight: String,
    pub scale: u32,
    pub trunc: u64,
    pub coefficient_field: CoefficientField,
    /// Paramodular level; keys must then lie on the level-`N` lattice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientEntry {
    #[serde(rename = "E")]
    pub e: Vec<Vec<i64>>,
    pub re: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    pub header: CoefficientHeader,
    pub entries: Vec<CoefficientEntry>,
}

fn field_of<'a>(mut coeffs: impl Iterator<Item = &'a GaussianRational>) -> CoefficientField {
    if coeffs.any(|c| !c.is_real()) {
        CoefficientField::Gaussian
    } else {
        CoefficientField::Rational
    }
}

fn entry_value(field: CoefficientField, c: &GaussianRational) -> (String, Option<String>) {
    let im = (field == CoefficientField::Gaussian).then(|| format_rational(&c.im));
    (format_rational(&c.re), im)
}

fn parse_value(
    field: CoefficientField,
    re: &str,
    im: Option<&str>,
) -> Result<GaussianRational, FileError> {
    let re = parse_rational_strict(re)?;
    let im = match (field, im) {
        (CoefficientField::Rational, None) => num_rational::BigRational::zero(),
        (CoefficientField::Rational, Some(_)) => {
            return Err(FileError::Invalid(
                "imaginary part given for a rational table".into(),
            ))
        }
        (CoefficientField::Gaussian, Some(s)) => parse_rational_strict(s)?,
        (CoefficientField::Gaussian, None) => {
            return Err(FileError::Invalid(
                "gaussian entry without an imaginary part".into(),
            ))
        }
    };
    Ok(GaussianRational::new(re, im))
}

impl CoefficientFile {
    pub fn from_series(f: &SiegelFourierSeries, level: Option<u64>) -> Self {
        let field = field_of(f.iter().map(|(_, c)| c));
        let entries = f
            .iter()
            .map(|(e, c)| {
                let (re, im) = entry_value(field, c);
                CoefficientEntry {
                    e: e.rows(),
                    re,
                    im,
                }
            })
            .collect();
        CoefficientFile {
            header: CoefficientHeader {
                genus: f.genus(),
                weight: format_rational(f.weight()),
                scale: KEY_SCALE,
                trunc: f.trunc(),
                coefficient_field: field,
                level,
            },
            entries,
        }
    }

    pub fn from_paramodular(t: &ParamodularTable) -> Self {
        let field = field_of(t.iter().map(|(_, c)| c));
        let entries = t
            .iter()
            .map(|(e, c)| {
                let (re, im) = entry_value(field, c);
                CoefficientEntry {
                    e: e.rows(),
                    re,
                    im,
                }
            })
            .collect();
        CoefficientFile {
            header: CoefficientHeader {
                genus: 2,
                weight: t.weight.to_string(),
                scale: KEY_SCALE,
                trunc: t.trunc,
                coefficient_field: field,
                level: Some(t.level()),
            },
            entries,
        }
    }

    /// Validates the whole file: fixed scale, symmetric psd keys within the
    /// truncation, no duplicates, rationals in lowest terms, and the
    /// paramodular lattice when a level is declared.
    pub fn to_series(&self) -> Result<SiegelFourierSeries, FileError> {
        let h = &self.header;
        if h.scale != KEY_SCALE {
            return Err(FileError::Invalid(format!(
                "scale must be {KEY_SCALE}, got {}",
                h.scale
            )));
        }
        if h.genus == 0 {
            return Err(FileError::Invalid("genus must be positive".into()));
        }
        let weight = parse_rational_strict(&h.weight)?;
        let mut seen = BTreeSet::new();
        let mut terms = Vec::with_capacity(self.entries.len());
        for entry in &self.entries {
            let e = ExponentMatrix::from_rows(&entry.e)?;
            if e.size() != h.genus {
                return Err(FileError::Invalid(format!(
                    "key {e} does not have size {}",
                    h.genus
                )));
            }
            if !seen.insert(e.clone()) {
                return Err(FileError::Invalid(format!("duplicate key {e}")));
            }
            if let Some(level) = h.level {
                if h.genus != 2 || !siegel_core::paramodular::in_index_lattice(&e, level) {
                    return Err(siegel_core::Error::LatticeViolation(e.to_string()).into());
                }
            }
            terms.push((
                e,
                parse_value(h.coefficient_field, &entry.re, entry.im.as_deref())?,
            ));
        }
        Ok(SiegelFourierSeries::from_terms(
            h.genus, weight, h.trunc, terms,
        )?)
    }

    pub fn to_paramodular(&self, level: Option<u64>) -> Result<ParamodularTable, FileError> {
        let level = level.or(self.header.level).ok_or_else(|| {
            FileError::Invalid("no paramodular level in the header or on the command line".into())
        })?;
        let mut file = self.clone();
        file.header.level = Some(level);
        let f = file.to_series()?;
        let weight = integral(f.weight())?;
        let mut t = ParamodularTable::new(level, weight, f.trunc())?;
        for (e, c) in f.iter() {
            t.set(e.clone(), c.clone())?;
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, FileError> {
        load_json(path)
    }

    pub fn save(&self, path: &Path) -> Result<(), FileError> {
        save_json(path, self)
    }
}

fn integral(w: &num_rational::BigRational) -> Result<i64, FileError> {
    if !w.is_integer() {
        return Err(FileError::Invalid(format!("weight {w} is not integral")));
    }
    i64::try_from(w.to_integer())
        .map_err(|_| FileError::Invalid(format!("weight {w} out of range")))
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FileError> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: p.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FileError::Json { path: p, source })
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let p = path.display().to_string();
    let mut text = serde_json::to_string_pretty(value).map_err(|source| FileError::Json {
        path: p.clone(),
        source,
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| FileError::Io { path: p, source })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FjHeader {
    pub weight: i64,
    pub denominator: u32,
    pub trunc: u64,
    pub coefficient_field: CoefficientField,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FjEntry {
    pub n: i64,
    pub r: i64,
    pub re: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FjTableRecord {
    pub index: i64,
    pub n_max: i64,
    pub entries: Vec<FjEntry>,
}

/// A formal Fourier–Jacobi series: one table per index, exponents scaled by
/// the common denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FjFile {
    pub header: FjHeader,
    pub tables: Vec<FjTableRecord>,
}

impl FjFile {
    pub fn from_series(s: &FormalFJSeries) -> Self {
        let field = field_of(s.tables().iter().flat_map(|t| t.iter().map(|(_, c)| c)));
        let tables = s
            .tables()
            .iter()
            .map(|t| FjTableRecord {
                index: t.index(),
                n_max: t.n_max(),
                entries: t
                    .iter()
                    .map(|(k, c)| {
                        let (re, im) = entry_value(field, c);
                        FjEntry {
                            n: k.n,
                            r: k.r,
                            re,
                            im,
                        }
                    })
                    .collect(),
            })
            .collect();
        FjFile {
            header: FjHeader {
                weight: s.weight(),
                denominator: s.denominator(),
                trunc: s.trunc(),
                coefficient_field: field,
            },
            tables,
        }
    }

    pub fn to_series(&self) -> Result<FormalFJSeries, FileError> {
        let h = &self.header;
        let mut tables = Vec::with_capacity(self.tables.len());
        for rec in &self.tables {
            let mut t = JacobiTable::new(rec.index, h.denominator, h.weight, rec.n_max)?;
            let mut seen = BTreeSet::new();
            for e in &rec.entries {
                let key = JacobiKey::new(e.n, e.r);
                if !seen.insert(key) {
                    return Err(FileError::Invalid(format!(
                        "duplicate key ({}, {}) in index {}",
                        e.n, e.r, rec.index
                    )));
                }
                t.set(
                    key,
                    parse_value(h.coefficient_field, &e.re, e.im.as_deref())?,
                )?;
            }
            tables.push(t);
        }
        Ok(FormalFJSeries::from_tables(
            h.weight,
            h.denominator,
            h.trunc,
            tables,
        )?)
    }
}
