use std::sync::Arc;

use carlitz_core::{Context, Params};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 20_240_611;
pub const MIN_PRECISION: i64 = 8;
pub const MIN_T_ORDER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Field, precision and output settings shared by every subcommand.
#[derive(Clone, Debug, Args, Serialize)]
pub struct RunConfig {
    /// Characteristic of the constant field
    #[arg(long, global = true, env = "CARLITZ_P", default_value_t = 2)]
    pub p: u32,
    /// Degree of the constant field F_{p^m}
    #[arg(long, global = true, env = "CARLITZ_M", default_value_t = 1)]
    pub m: u32,
    /// Order q = p^v of the base field (defaults to p)
    #[arg(long, global = true, env = "CARLITZ_Q")]
    pub q: Option<u32>,
    /// Modulus of F_{p^m}: "default" or comma separated digits, low to high
    #[arg(long, global = true, env = "CARLITZ_MODULUS", default_value = "default")]
    pub modulus: String,
    /// Relative x-adic precision M
    #[arg(long, global = true, env = "CARLITZ_PREC", default_value_t = 40)]
    pub prec: i64,
    /// Truncation order N in the t-variable
    #[arg(long = "t-order", global = true, env = "CARLITZ_T_ORDER", default_value_t = 8)]
    pub t_order: usize,
    /// Largest ramification exponent e_max
    #[arg(long = "ram-cap", global = true, env = "CARLITZ_RAM_CAP", default_value_t = 4)]
    pub ram_cap: u32,
    #[arg(long, value_enum, global = true, env = "CARLITZ_FORMAT", default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Seed for every randomized check
    #[arg(long, global = true, env = "CARLITZ_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 2,
            m: 1,
            q: None,
            modulus: "default".into(),
            prec: 40,
            t_order: 8,
            ram_cap: 4,
            format: OutputFormat::Text,
            seed: DEFAULT_SEED,
        }
    }
}

impl RunConfig {
    pub fn q(&self) -> u32 {
        self.q.unwrap_or(self.p)
    }

    /// v with q = p^v.
    pub fn upsilon(&self) -> Result<u32> {
        let q = self.q();
        let mut pow = self.p as u64;
        for v in 1..=32 {
            if pow == q as u64 {
                return Ok(v);
            }
            if pow > q as u64 || self.p < 2 {
                break;
            }
            pow *= self.p as u64;
        }
        Err(CliError::input(format!("q={q} is not a power of p={}", self.p)))
    }

    fn modulus_digits(&self) -> Result<Option<Vec<u32>>> {
        let s = self.modulus.trim();
        if s.is_empty() || s == "default" {
            return Ok(None);
        }
        s.split(',')
            .map(|d| d.trim().parse::<u32>().map_err(|_| CliError::input(format!("bad modulus digit {d:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Check the budgets and build the field context.
    pub fn context(&self) -> Result<Arc<Context>> {
        self.context_with_degree(self.m)
    }

    /// The same settings over F_{p^m} for another m (default modulus).
    pub fn context_with_degree(&self, m: u32) -> Result<Arc<Context>> {
        if self.prec < MIN_PRECISION {
            return Err(CliError::Resource {
                resource: "x-adic precision",
                message: format!("M={} is below the minimum {MIN_PRECISION}", self.prec),
            });
        }
        if self.t_order < MIN_T_ORDER {
            return Err(CliError::Resource {
                resource: "t-order",
                message: format!("N={} is below the minimum {MIN_T_ORDER}", self.t_order),
            });
        }
        let v = self.upsilon()?;
        let modulus = if m == self.m { self.modulus_digits()? } else { None };
        self.build(m, v, modulus, self.prec, self.ram_cap)
    }

    /// Context with explicitly chosen precision and ramification cap.
    pub fn context_with(&self, prec: i64, ram_cap: u32) -> Result<Arc<Context>> {
        let v = self.upsilon()?;
        self.build(self.m, v, self.modulus_digits()?, prec, ram_cap)
    }

    fn build(&self, m: u32, v: u32, modulus: Option<Vec<u32>>, prec: i64, ram_cap: u32) -> Result<Arc<Context>> {
        let params = Params { precision: prec, ram_cap, ..Params::default() };
        Ok(Context::with_params(self.p, m, v, modulus, params)?)
    }
}
