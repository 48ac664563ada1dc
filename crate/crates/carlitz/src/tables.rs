use carlitz_core::carlitz::{bracket, Quantities};
use carlitz_core::special::{coefficient_a, l1_branches, ZetaTable};
use carlitz_core::umbral::kbinom;
use carlitz_core::Series;
use clap::ValueEnum;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::format::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    /// [i] = x^{q^i} - x
    Brackets,
    /// Carlitz factorials D_i
    #[value(name = "D")]
    D,
    /// least common multiples L_i
    #[value(name = "L")]
    L,
    /// coefficient of t^{q^j} in e_i
    #[value(name = "carlitz_polys")]
    CarlitzPolys,
    /// K-binomial coefficients (i, n), 0 <= n <= i
    Kbinom,
    /// coefficients A_{i,r}, 1 <= r <= i
    #[value(name = "A")]
    A,
    /// zeta(x^e) on each branch of l_1
    Zeta,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::Brackets => "brackets",
            TableKind::D => "D",
            TableKind::L => "L",
            TableKind::CarlitzPolys => "carlitz_polys",
            TableKind::Kbinom => "kbinom",
            TableKind::A => "A",
            TableKind::Zeta => "zeta",
        }
    }
}

/// Inclusive index range: "n", "a..b" or "a..=b".
pub fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || CliError::input(format!("bad range {s:?}: expected n, a..b or a..=b"));
    let num = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        None => {
            let n = num(s)?;
            (n, n)
        }
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn nonneg(lo: i64, kind: TableKind) -> Result<()> {
    if lo < 0 {
        return Err(CliError::input(format!("table {} takes nonnegative indices", kind.name())));
    }
    Ok(())
}

pub fn cmd_table(kind: TableKind, range: (i64, i64), cfg: &RunConfig) -> Result<Table> {
    let ctx = cfg.context()?;
    let (lo, hi) = range;
    let top = hi.max(0) as usize;
    let tb = Quantities::new(&ctx, top + cfg.t_order + 2);
    let mut rows: Vec<(Vec<i64>, Series)> = Vec::new();
    let key_names: Vec<&'static str> = match kind {
        TableKind::Brackets => {
            for i in lo..=hi {
                rows.push((vec![i], bracket(&ctx, i)?));
            }
            vec!["i"]
        }
        TableKind::D | TableKind::L => {
            nonneg(lo, kind)?;
            for i in lo..=hi {
                let v = if kind == TableKind::D { tb.d(i as usize) } else { tb.l(i as usize) };
                rows.push((vec![i], v));
            }
            vec!["i"]
        }
        TableKind::CarlitzPolys => {
            nonneg(lo, kind)?;
            for i in lo..=hi {
                let e = tb.carlitz_e(i as usize);
                for (j, c) in e.coeffs().iter().enumerate() {
                    rows.push((vec![i, j as i64], c.clone()));
                }
            }
            vec!["i", "j"]
        }
        TableKind::Kbinom => {
            nonneg(lo, kind)?;
            for i in lo..=hi {
                for n in 0..=i {
                    rows.push((vec![i, n], kbinom(&tb, i as usize, n as usize)?));
                }
            }
            vec!["i", "n"]
        }
        TableKind::A => {
            nonneg(lo, kind)?;
            for i in lo.max(1)..=hi {
                for r in 1..=i {
                    rows.push((vec![i, r], coefficient_a(&tb, i as usize, r as usize)?));
                }
            }
            vec!["i", "r"]
        }
        TableKind::Zeta => {
            let branches = l1_branches(&tb, cfg.t_order)?;
            let max_neg = (-lo).max(1) as usize;
            for (b, br) in branches.iter().enumerate() {
                let zt = ZetaTable::new(&tb, br, max_neg)?;
                for e in lo..=hi {
                    rows.push((vec![b as i64, e], zt.at_power(&tb, e)?));
                }
            }
            vec!["branch", "e"]
        }
    };
    Ok(Table { kind: kind.name().into(), key_names, rows })
}
