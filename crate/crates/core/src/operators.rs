//! The operators tau (q-th power), Delta, d and Delta^{(n)} on both bases,
//! coefficient recovery, the antiderivative, the integral and the
//! smoothness/analyticity window diagnostics.

use alloc::vec;
use alloc::vec::Vec;

use crate::carlitz::{CarlitzExpansion, Quantities};
use crate::error::{Error, Result};
use crate::hyperdiff::fractional_eigenvalue;
use crate::linear::FqLinear;
use crate::series::{Series, Valuation};

/// Operators acting on F_q-linear functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    /// u -> u^q
    Tau,
    /// u -> u(xt) - x u(t)
    Delta,
    /// the q-th root of Delta
    D,
    /// Delta^{(n)}, with Delta^{(0)} the identity and Delta^{(1)} = Delta
    DeltaN(usize),
    /// Delta^{(alpha)} for alpha in F_q[[x]]
    FracDelta(Series),
}

/// Eigenvalue of Delta^{(l)} on t^{q^n}: [n][n-1]^q ... [n-l+1]^{q^{l-1}}.
pub fn delta_n_eigenvalue(tables: &Quantities, l: usize, n: usize) -> Series {
    if n < l {
        return Series::zero(tables.ctx());
    }
    (0..l).fold(Series::one(tables.ctx()), |acc, k| {
        acc.mul(&tables.bracket(n - k).frob_pow(k as u32))
    })
}

/// Apply an operator to sum a_n t^{q^n}.
pub fn apply_operator(tables: &Quantities, op: &Operator, u: &FqLinear) -> Result<FqLinear> {
    match op {
        Operator::Tau => Ok(u.frob()),
        Operator::Delta => Ok(diagonal(u, |n| tables.bracket(n))),
        Operator::DeltaN(l) => Ok(diagonal(u, |n| delta_n_eigenvalue(tables, *l, n))),
        Operator::FracDelta(alpha) => {
            let mut err = None;
            let r = diagonal(u, |n| match fractional_eigenvalue(tables, alpha, n) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    Series::zero(tables.ctx())
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(r),
            }
        }
        Operator::D => {
            let c = u
                .coeffs()
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, a)| tables.bracket(n).mul(a).qth_root())
                .collect::<Result<Vec<_>>>()?;
            Ok(if u.is_truncated() { FqLinear::truncated(c) } else { FqLinear::poly(c) })
        }
    }
}

fn diagonal(u: &FqLinear, mut eig: impl FnMut(usize) -> Series) -> FqLinear {
    let c: Vec<Series> = u.coeffs().iter().enumerate().map(|(n, a)| eig(n).mul(a)).collect();
    if u.is_truncated() {
        FqLinear::truncated(c)
    } else {
        FqLinear::poly(c)
    }
}

/// Actions on the Carlitz coefficient basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisAction {
    /// tau d = Delta
    TauD,
    /// d, with d f_i = f_{i-1}
    D,
    /// u -> u^q
    QPower,
}

/// Apply a basis action to sum c_i f_i.
pub fn carlitz_action(
    tables: &Quantities,
    action: BasisAction,
    c: &CarlitzExpansion,
) -> Result<CarlitzExpansion> {
    let ctx = tables.ctx();
    let n = c.len();
    let trunc = c.is_truncated();
    let get = |i: usize| c.get(i, ctx);
    let out: Vec<Series> = match action {
        BasisAction::D => {
            let len = n.saturating_sub(1);
            (0..len).map(|i| get(i + 1).unwrap().qth_root()).collect::<Result<_>>()?
        }
        BasisAction::TauD => {
            let len = if trunc { n.saturating_sub(1) } else { n };
            (0..len)
                .map(|j| {
                    let next = get(j + 1).unwrap();
                    tables.bracket(j).mul(&get(j).unwrap()).add(&next)
                })
                .collect()
        }
        BasisAction::QPower => {
            let len = if trunc { n } else { n + 1 };
            (0..len)
                .map(|j| {
                    let own = get(j).unwrap().frob();
                    if j == 0 {
                        own
                    } else {
                        own.add(&tables.bracket(j).mul(&get(j - 1).unwrap().frob()))
                    }
                })
                .collect()
        }
    };
    Ok(if trunc { CarlitzExpansion::truncated(out) } else { CarlitzExpansion::poly(out) })
}

/// Delta^{(l)} on the Carlitz basis, as (Delta - [l-1]) ... (Delta - [0]).
pub fn carlitz_delta_n(
    tables: &Quantities,
    l: usize,
    c: &CarlitzExpansion,
) -> Result<CarlitzExpansion> {
    let mut cur = c.clone();
    for k in 0..l {
        let moved = carlitz_action(tables, BasisAction::TauD, &cur)?;
        let shift = cur.scale(&tables.bracket(k).neg());
        cur = moved.add(&shift);
    }
    Ok(cur)
}

/// The coefficient a_n of u = sum a_m t^{q^m} / D_m, read off as the
/// t^{q^n}-coefficient of Delta^{(n)} u (all lower ones vanish).
pub fn recover_coefficient(tables: &Quantities, u: &FqLinear, n: usize) -> Result<Series> {
    if u.len() <= n {
        if u.is_truncated() {
            return Err(Error::InvalidParameter("t-order below requested index".into()));
        }
        return Ok(Series::zero(tables.ctx()));
    }
    let r = apply_operator(tables, &Operator::DeltaN(n), &u.truncate_order(n + 1))?;
    Ok(r.coeffs()[n].clone())
}

/// Antiderivative S with d(Sf) = f and (Sf)(1) = 0.
pub fn antiderivative(c: &CarlitzExpansion) -> CarlitzExpansion {
    if c.is_empty() && !c.is_truncated() {
        return c.clone();
    }
    let ctx = c.coeffs()[0].ctx();
    let mut out = vec![Series::zero(ctx)];
    out.extend(c.coeffs().iter().map(|a| a.frob()));
    if c.is_truncated() {
        CarlitzExpansion::truncated(out)
    } else {
        CarlitzExpansion::poly(out)
    }
}

/// kappa_i = (d/dt) f_i at 0 = (-1)^i / L_i.
pub fn kappa(tables: &Quantities, i: usize) -> Result<Series> {
    let sign = if i.is_multiple_of(2) { 1 } else { -1 };
    Series::from_int(tables.ctx(), sign).div(&tables.l(i))
}

/// The integral (Sf)'(0) = sum_{i>=1} c_{i-1}^q kappa_i over the known
/// coefficients.
pub fn integral(tables: &Quantities, c: &CarlitzExpansion) -> Result<Series> {
    let mut acc = Series::zero(tables.ctx());
    for (i, a) in c.coeffs().iter().enumerate() {
        if a.is_exact_zero() {
            continue;
        }
        acc = acc.add(&a.frob().mul(&kappa(tables, i + 1)?));
    }
    Ok(acc)
}

/// Integral over s of sum_k g_k(s) c_k(z), with c_k F_q-linear in another
/// variable; the scalar twist turns each c_k into c_k^q.
pub fn integrate_family(
    tables: &Quantities,
    family: &[(FqLinear, CarlitzExpansion)],
) -> Result<FqLinear> {
    let mut acc: Option<FqLinear> = None;
    for (ck, gk) in family {
        let term = ck.frob().scale_series(&integral(tables, gk)?);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    Ok(acc.unwrap_or_else(|| FqLinear::poly(Vec::new())))
}

/// Finite-window smoothness diagnostic for sum c_n f_n at order k.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessReport {
    /// log_q of sup_{k<=n<=N} q^{(n-k)q^k} |c_n|; -inf when all vanish
    pub log_norm: f64,
    /// q^{log_norm}
    pub norm: f64,
    /// q^{n q^k}|c_n| nonincreasing over the tail half and lower at the end
    pub decaying: bool,
    /// the window (k, N) the report covers
    pub window: (usize, usize),
}

fn log_abs(c: &Series) -> f64 {
    -c.valuation_bound().to_f64()
}

/// Window version of the order-k smoothness test.
pub fn smoothness_profile(tables: &Quantities, c: &CarlitzExpansion, k: usize) -> SmoothnessReport {
    let q = tables.ctx().q() as f64;
    let qk = libm::pow(q, k as f64);
    let n_max = c.len().saturating_sub(1).max(k);
    let w = |n: usize| -> f64 {
        match c.coeffs().get(n) {
            Some(a) => n as f64 * qk + log_abs(a),
            None => f64::NEG_INFINITY,
        }
    };
    let log_norm = (k..=n_max)
        .map(|n| match c.coeffs().get(n) {
            Some(a) => (n - k) as f64 * qk + log_abs(a),
            None => f64::NEG_INFINITY,
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let mid = k + (n_max - k) / 2;
    let tail: Vec<f64> = (mid..=n_max).map(w).collect();
    let nonincreasing = tail.windows(2).all(|p| p[1] <= p[0]);
    let last = *tail.last().unwrap();
    // a finite expansion has only zeros past its end
    let decaying =
        !c.is_truncated() || (nonincreasing && (last == f64::NEG_INFINITY || last < w(k)));
    SmoothnessReport { log_norm, norm: libm::pow(q, log_norm), decaying, window: (k, n_max) }
}

/// Finite-window local analyticity diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticityReport {
    /// min over the tail window of -q^{-n} log_q |c_n| (inf for polynomials)
    pub gamma: f64,
    /// analytic on balls of radius q^{-l}; None when gamma <= 0
    pub l: Option<u32>,
    /// the tail window (from, to)
    pub window: (usize, usize),
}

/// Estimate gamma on the tail half of the truncation and apply
/// l = max(0, floor(-(log(q-1) + log gamma)/log q) + 1).
pub fn analyticity_radius(tables: &Quantities, c: &CarlitzExpansion) -> Result<AnalyticityReport> {
    let n_max = c.len().saturating_sub(1);
    if c.is_truncated() && n_max < 4 {
        return Err(Error::InvalidParameter("analyticity window needs N >= 4".into()));
    }
    let q = tables.ctx().q() as f64;
    let from = n_max / 2;
    let gamma = if c.is_truncated() {
        (from..=n_max)
            .map(|n| c.coeffs()[n].valuation_bound().to_f64() / libm::pow(q, n as f64))
            .fold(f64::INFINITY, f64::min)
    } else {
        f64::INFINITY
    };
    let l = if gamma <= 0.0 {
        None
    } else if gamma.is_infinite() {
        Some(0)
    } else {
        let v = libm::floor(-(libm::log(q - 1.0) + libm::log(gamma)) / libm::log(q)) + 1.0;
        Some(if v <= 0.0 { 0 } else { v as u32 })
    };
    Ok(AnalyticityReport { gamma, l, window: (from, n_max) })
}

/// Valuation of a coefficient sequence entry, as a convenience for reports.
pub fn coefficient_valuations(c: &CarlitzExpansion) -> Vec<Valuation> {
    c.coeffs().iter().map(|a| a.valuation_bound()).collect()
}
