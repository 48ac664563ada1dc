//! JSON exchange format for series and expansions, and table output.
//!
//! A series is stored as `{"ram": e, "prec": p, "terms": [[k, [c0, c1, ...]], ...], "text": "..."}`:
//! each term is c x^{k/q^e} with c given by its digits over F_p (low to
//! high), `prec` is the precision in the same scaled units or null for an
//! exact value, and `text` is the human-readable form. On input a plain
//! string in the expression syntax of [`crate::parse`] is accepted too.

use std::io::Write;
use std::sync::Arc;

use carlitz_core::carlitz::CarlitzExpansion;
use carlitz_core::linear::FqLinear;
use carlitz_core::{Context, Series};
use serde::{Deserialize, Serialize};

use crate::config::OutputFormat;
use crate::error::{CliError, Result};
use crate::parse::parse_series;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub ram: u32,
    pub prec: Option<i64>,
    pub terms: Vec<(i64, Vec<u32>)>,
    #[serde(default)]
    pub text: String,
}

impl SeriesRecord {
    pub fn from_series(s: &Series) -> Self {
        let ctx = s.ctx();
        SeriesRecord {
            ram: s.ram(),
            prec: s.scaled_prec(),
            terms: s.terms().iter().map(|&(e, c)| (e, ctx.to_digits(c))).collect(),
            text: s.to_string(),
        }
    }

    pub fn to_series(&self, ctx: &Arc<Context>) -> Result<Series> {
        if self.ram > ctx.params().ram_cap {
            return Err(CliError::input(format!(
                "ramification {} exceeds the cap {}",
                self.ram,
                ctx.params().ram_cap
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, digits) in &self.terms {
            if digits.len() > ctx.m() as usize || digits.iter().any(|&d| d >= ctx.p()) {
                return Err(CliError::input(format!("coefficient digits {digits:?} are not in F_{}^{}", ctx.p(), ctx.m())));
            }
            let mut d = digits.clone();
            d.resize(ctx.m() as usize, 0);
            terms.push((*e, ctx.from_digits(&d)?));
        }
        Ok(Series::from_parts(ctx, self.ram, terms, self.prec))
    }
}

/// A series on input: either the full record or an expression string.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesInput {
    Text(String),
    Record(SeriesRecord),
}

impl SeriesInput {
    pub fn to_series(&self, ctx: &Arc<Context>) -> Result<Series> {
        match self {
            SeriesInput::Text(s) => parse_series(ctx, s),
            SeriesInput::Record(r) => r.to_series(ctx),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// sum c_n t^{q^n}
    Monomial,
    /// sum c_n f_n(t)
    Carlitz,
}

/// An F_q-linear function in either basis. `truncated` marks a series
/// known through the listed coefficients only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub basis: Basis,
    pub truncated: bool,
    pub coeffs: Vec<SeriesRecord>,
}

impl ExpansionRecord {
    pub fn monomial(u: &FqLinear) -> Self {
        ExpansionRecord {
            basis: Basis::Monomial,
            truncated: u.is_truncated(),
            coeffs: u.coeffs().iter().map(SeriesRecord::from_series).collect(),
        }
    }

    pub fn carlitz(c: &CarlitzExpansion) -> Self {
        ExpansionRecord {
            basis: Basis::Carlitz,
            truncated: c.is_truncated(),
            coeffs: c.coeffs().iter().map(SeriesRecord::from_series).collect(),
        }
    }
}

/// Rows keyed by one or more integer indices.
#[derive(Clone, Debug)]
pub struct Table {
    pub kind: String,
    pub key_names: Vec<&'static str>,
    pub rows: Vec<(Vec<i64>, Series)>,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    key: &'a [i64],
    value: SeriesRecord,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    kind: &'a str,
    keys: &'a [&'static str],
    rows: Vec<JsonRow<'a>>,
}

impl Table {
    pub fn write(&self, fmt: OutputFormat, out: &mut dyn Write) -> Result<()> {
        match fmt {
            OutputFormat::Text => {
                for (key, v) in &self.rows {
                    writeln!(out, "{}: {v}", key_label(key))?;
                }
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let mut header: Vec<&str> = self.key_names.clone();
                header.push("value");
                w.write_record(&header).map_err(csv_err)?;
                for (key, v) in &self.rows {
                    let mut rec: Vec<String> = key.iter().map(i64::to_string).collect();
                    rec.push(v.to_string());
                    w.write_record(&rec).map_err(csv_err)?;
                }
                w.flush()?;
            }
            OutputFormat::Json => {
                let t = JsonTable {
                    kind: &self.kind,
                    keys: &self.key_names,
                    rows: self
                        .rows
                        .iter()
                        .map(|(key, v)| JsonRow { key, value: SeriesRecord::from_series(v) })
                        .collect(),
                };
                serde_json::to_writer_pretty(&mut *out, &t)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

/// "3" for one index, "(2,1)" for several.
pub fn key_label(key: &[i64]) -> String {
    if key.len() == 1 {
        key[0].to_string()
    } else {
        let parts: Vec<String> = key.iter().map(i64::to_string).collect();
        format!("({})", parts.join(","))
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
