//! The Weyl-Carlitz ring generated over F_q((x)) by τ, d_s and Δ_1..Δ_n,
//! its action on F_q-linear series in s, t_1..t_n, and a few diagnostics
//! for holonomic functions.
//!
//! Elements are kept in the normal form Σ c τ^l d^μ Δ_1^{i_1}..Δ_n^{i_n}
//! with scalars on the left.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::carlitz::{bracket, Quantities};
use crate::error::{Error, Result};
use crate::field::Context;
use crate::series::{Series, Valuation};
use crate::umbral::kbinom;

/// Largest number of t-variables supported.
pub const MAX_VARS: usize = 2;

/// Exponents of τ^l d^μ Δ_1^{i_1}..Δ_n^{i_n}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub tau: u32,
    pub d: u32,
    pub delta: Vec<u32>,
}

impl Word {
    pub fn new(tau: u32, d: u32, delta: Vec<u32>) -> Self {
        Word { tau, d, delta }
    }

    pub fn one(n: usize) -> Self {
        Word { tau: 0, d: 0, delta: vec![0; n] }
    }

    /// l + μ + Σ i_j.
    pub fn len(&self) -> u32 {
        self.tau + self.d + self.delta.iter().sum::<u32>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Tau,
    D,
    Delta(usize),
}

#[derive(Clone, Debug)]
pub struct WeylElement {
    ctx: Arc<Context>,
    n: usize,
    terms: BTreeMap<Word, Series>,
}

fn check_vars(n: usize) -> Result<()> {
    if n > MAX_VARS {
        return Err(Error::InvalidParameter(format!("at most {MAX_VARS} t-variables (got {n})")));
    }
    Ok(())
}

impl WeylElement {
    pub fn zero(ctx: &Arc<Context>, n: usize) -> Result<Self> {
        check_vars(n)?;
        Ok(WeylElement { ctx: ctx.clone(), n, terms: BTreeMap::new() })
    }

    pub fn scalar(ctx: &Arc<Context>, n: usize, c: Series) -> Result<Self> {
        let mut e = Self::zero(ctx, n)?;
        e.push(Word::one(n), c);
        Ok(e)
    }

    pub fn one(ctx: &Arc<Context>, n: usize) -> Result<Self> {
        Self::scalar(ctx, n, Series::one(ctx))
    }

    /// c τ^l d^μ Δ^I.
    pub fn monomial(ctx: &Arc<Context>, c: Series, w: Word) -> Result<Self> {
        let n = w.delta.len();
        let mut e = Self::zero(ctx, n)?;
        e.push(w, c);
        Ok(e)
    }

    pub fn generator(ctx: &Arc<Context>, n: usize, g: Generator) -> Result<Self> {
        let mut w = Word::one(n);
        match g {
            Generator::Tau => w.tau = 1,
            Generator::D => w.d = 1,
            Generator::Delta(j) => {
                if j >= n {
                    return Err(Error::InvalidParameter(format!("no variable t_{}", j + 1)));
                }
                w.delta[j] = 1;
            }
        }
        Self::monomial(ctx, Series::one(ctx), w)
    }

    pub fn tau(ctx: &Arc<Context>, n: usize) -> Result<Self> {
        Self::generator(ctx, n, Generator::Tau)
    }

    pub fn d(ctx: &Arc<Context>, n: usize) -> Result<Self> {
        Self::generator(ctx, n, Generator::D)
    }

    pub fn delta(ctx: &Arc<Context>, n: usize, j: usize) -> Result<Self> {
        Self::generator(ctx, n, Generator::Delta(j))
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Word, Series> {
        &self.terms
    }

    pub fn coeff(&self, w: &Word) -> Series {
        self.terms.get(w).cloned().unwrap_or_else(|| Series::zero(&self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, w: Word, c: Series) {
        let v = match self.terms.remove(&w) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(w, v);
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Mismatch(format!("{} vs {} t-variables", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut r = self.clone();
        for (w, c) in &other.terms {
            r.push(w.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = c.neg();
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// λ·self (scalar on the left).
    pub fn scale_left(&self, c: &Series) -> Self {
        let mut r = WeylElement { ctx: self.ctx.clone(), n: self.n, terms: BTreeMap::new() };
        for (w, v) in &self.terms {
            r.push(w.clone(), c.mul(v));
        }
        r
    }

    /// g·self, re-normalized.
    pub fn left_mul_generator(&self, g: Generator) -> Result<Self> {
        let ctx = &self.ctx;
        let mut r = WeylElement { ctx: ctx.clone(), n: self.n, terms: BTreeMap::new() };
        for (w, c) in &self.terms {
            match g {
                Generator::Tau => {
                    let mut w2 = w.clone();
                    w2.tau += 1;
                    r.push(w2, c.frob());
                }
                Generator::D => {
                    // d τ^l = τ^l d + [l]^{1/q} τ^{l-1}
                    let mut w2 = w.clone();
                    w2.d += 1;
                    r.push(w2, c.qth_root()?);
                    if w.tau > 0 {
                        let mut w3 = w.clone();
                        w3.tau -= 1;
                        r.push(w3, c.mul(&bracket(ctx, w.tau as i64)?).qth_root()?);
                    }
                }
                Generator::Delta(j) => {
                    if j >= self.n {
                        return Err(Error::InvalidParameter(format!("no variable t_{}", j + 1)));
                    }
                    // Δ τ^l d^μ = τ^l d^μ Δ + ([-μ]^{q^l} + [l]) τ^l d^μ
                    let mut w2 = w.clone();
                    w2.delta[j] += 1;
                    r.push(w2, c.clone());
                    let shift = bracket(ctx, -(w.d as i64))?
                        .frob_pow(w.tau)
                        .add(&bracket(ctx, w.tau as i64)?);
                    r.push(w.clone(), c.mul(&shift));
                }
            }
        }
        Ok(r)
    }

    /// Normal form of self·other.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = WeylElement { ctx: self.ctx.clone(), n: self.n, terms: BTreeMap::new() };
        for (w, c) in &self.terms {
            let mut acc = other.clone();
            for (j, &e) in w.delta.iter().enumerate() {
                for _ in 0..e {
                    acc = acc.left_mul_generator(Generator::Delta(j))?;
                }
            }
            for _ in 0..w.d {
                acc = acc.left_mul_generator(Generator::D)?;
            }
            for _ in 0..w.tau {
                acc = acc.left_mul_generator(Generator::Tau)?;
            }
            out = out.add(&acc.scale_left(c))?;
        }
        Ok(out)
    }

    /// Product of a sequence of generators and scalars, left to right.
    pub fn product(ctx: &Arc<Context>, n: usize, factors: &[Factor]) -> Result<Self> {
        let mut acc = Self::one(ctx, n)?;
        for f in factors.iter().rev() {
            acc = match f {
                Factor::Gen(g) => acc.left_mul_generator(*g)?,
                Factor::Scalar(c) => acc.scale_left(c),
            };
        }
        Ok(acc)
    }

    pub fn eq_to_precision(&self, other: &Self) -> bool {
        if self.n != other.n {
            return false;
        }
        let keys: Vec<&Word> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|w| self.coeff(w).eq_to_precision(&other.coeff(w)))
    }

    /// The element applied to f.
    pub fn apply(&self, f: &MultiSeries) -> Result<MultiSeries> {
        if f.nvars != self.n {
            return Err(Error::Mismatch(format!("operator on {} t-variables, series in {}", self.n, f.nvars)));
        }
        let mut out: Option<MultiSeries> = None;
        for (w, c) in &self.terms {
            let g = f.apply_word(w)?.scale(c);
            out = Some(match out {
                None => g,
                Some(o) => o.add(&g)?,
            });
        }
        Ok(out.unwrap_or_else(|| MultiSeries::zero_like(f)))
    }
}

/// A factor in a written-out product of generators and scalars.
#[derive(Clone, Debug)]
pub enum Factor {
    Gen(Generator),
    Scalar(Series),
}

/// Σ a_{m,k} s^{q^m} t_1^{q^{k_1}}..t_n^{q^{k_n}} with m <= min k_j, known
/// for every k_j <= bounds[j] (for n = 0, for m <= bounds[0]).
#[derive(Clone, Debug)]
pub struct MultiSeries {
    ctx: Arc<Context>,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Series>,
    bounds: Vec<i64>,
}

fn in_region(key: &[u32], bounds: &[i64]) -> bool {
    if key.len() == 1 {
        return (key[0] as i64) <= bounds[0];
    }
    key[1..].iter().zip(bounds).all(|(&k, &b)| (k as i64) <= b)
}

impl MultiSeries {
    /// Builds a series from keys [m, k_1..k_n]. Keys outside the known
    /// region are dropped; keys with m > min k_j are rejected.
    pub fn new(
        ctx: &Arc<Context>,
        nvars: usize,
        bounds: Vec<i64>,
        terms: impl IntoIterator<Item = (Vec<u32>, Series)>,
    ) -> Result<Self> {
        check_vars(nvars)?;
        if bounds.len() != nvars.max(1) {
            return Err(Error::InvalidParameter("one truncation bound per variable".into()));
        }
        let mut map = BTreeMap::new();
        for (key, c) in terms {
            if key.len() != nvars + 1 {
                return Err(Error::InvalidParameter(format!("key {key:?} has the wrong length")));
            }
            if key[1..].iter().any(|&k| k < key[0]) {
                return Err(Error::InvalidParameter(format!("key {key:?} has m > min k")));
            }
            if in_region(&key, &bounds) && !c.is_exact_zero() {
                map.insert(key, c);
            }
        }
        Ok(MultiSeries { ctx: ctx.clone(), nvars, terms: map, bounds })
    }

    fn zero_like(f: &MultiSeries) -> MultiSeries {
        MultiSeries { ctx: f.ctx.clone(), nvars: f.nvars, terms: BTreeMap::new(), bounds: f.bounds.clone() }
    }

    pub fn ctx(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bounds(&self) -> &[i64] {
        &self.bounds
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Series> {
        &self.terms
    }

    pub fn coeff(&self, key: &[u32]) -> Series {
        self.terms.get(key).cloned().unwrap_or_else(|| Series::zero(&self.ctx))
    }

    /// Every known coefficient is zero to precision.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(Series::is_zero)
    }

    /// Smallest valuation among the known coefficients.
    pub fn valuation(&self) -> Valuation {
        self.terms.values().map(Series::valuation_bound).min().unwrap_or(Valuation::Infinite)
    }

    pub fn add(&self, other: &MultiSeries) -> Result<MultiSeries> {
        if self.nvars != other.nvars {
            return Err(Error::Mismatch("different variable counts".into()));
        }
        let bounds: Vec<i64> = self.bounds.iter().zip(&other.bounds).map(|(a, b)| *a.min(b)).collect();
        let mut terms = BTreeMap::new();
        for key in self.terms.keys().chain(other.terms.keys()) {
            if in_region(key, &bounds) && !terms.contains_key(key) {
                terms.insert(key.clone(), self.coeff(key).add(&other.coeff(key)));
            }
        }
        Ok(MultiSeries { ctx: self.ctx.clone(), nvars: self.nvars, terms, bounds })
    }

    pub fn scale(&self, c: &Series) -> MultiSeries {
        let mut r = self.clone();
        for v in r.terms.values_mut() {
            *v = c.mul(v);
        }
        r
    }

    /// τ: every coefficient to its q-th power, every index up by one.
    pub fn tau(&self) -> MultiSeries {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.iter().map(|e| e + 1).collect(), c.frob()))
            .collect();
        let bounds = self.bounds.iter().map(|b| b + 1).collect();
        MultiSeries { ctx: self.ctx.clone(), nvars: self.nvars, terms, bounds }
    }

    /// d_s, treating the t-monomials as scalars: a_{m,k} s^{q^m} t^{q^k}
    /// goes to ([m] a_{m,k})^{1/q} s^{q^{m-1}} t^{q^{k-1}}.
    pub fn d_s(&self) -> Result<MultiSeries> {
        let bounds: Vec<i64> = self.bounds.iter().map(|b| b - 1).collect();
        if bounds.iter().any(|&b| b < 0) {
            return Err(Error::TruncationExhausted("d_s needs one more known index".into()));
        }
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if k[0] == 0 {
                continue;
            }
            let v = c.mul(&bracket(&self.ctx, k[0] as i64)?).qth_root()?;
            terms.insert(k.iter().map(|e| e - 1).collect(), v);
        }
        Ok(MultiSeries { ctx: self.ctx.clone(), nvars: self.nvars, terms, bounds })
    }

    /// Δ_j: multiplies the coefficient of t_j^{q^k} by [k].
    pub fn delta(&self, j: usize) -> Result<MultiSeries> {
        if j >= self.nvars {
            return Err(Error::InvalidParameter(format!("no variable t_{}", j + 1)));
        }
        let mut r = self.clone();
        for (k, c) in r.terms.iter_mut() {
            *c = c.mul(&bracket(&self.ctx, k[j + 1] as i64)?);
        }
        Ok(r)
    }

    /// τ^l d^μ Δ^I applied to self.
    pub fn apply_word(&self, w: &Word) -> Result<MultiSeries> {
        if w.delta.len() != self.nvars {
            return Err(Error::Mismatch("word and series variable counts differ".into()));
        }
        let mut g = self.clone();
        for (j, &e) in w.delta.iter().enumerate() {
            for _ in 0..e {
                g = g.delta(j)?;
            }
        }
        for _ in 0..w.d {
            g = g.d_s()?;
        }
        for _ in 0..w.tau {
            g = g.tau();
        }
        Ok(g)
    }

    /// Restriction to k_j <= r (m <= r when n = 0).
    pub fn restrict(&self, r: i64) -> MultiSeries {
        let bounds: Vec<i64> = self.bounds.iter().map(|b| (*b).min(r)).collect();
        let terms = self.terms.iter().filter(|(k, _)| in_region(k, &bounds)).map(|(k, c)| (k.clone(), c.clone())).collect();
        MultiSeries { ctx: self.ctx.clone(), nvars: self.nvars, terms, bounds }
    }
}

/// Outcome of applying a candidate annihilator.
#[derive(Clone, Debug)]
pub struct AnnihilatorReport {
    pub annihilates: bool,
    pub residual: MultiSeries,
}

pub fn annihilator_check(a: &WeylElement, f: &MultiSeries) -> Result<AnnihilatorReport> {
    let residual = a.apply(f)?;
    Ok(AnnihilatorReport { annihilates: residual.is_zero(), residual })
}

/// Coefficient of s^{q^m} in f_k = e_k / D_k, namely
/// (-1)^{k-m} / (D_m L_{k-m}^{q^m}).
pub fn carlitz_f_coefficient(tables: &Quantities, m: usize, k: usize) -> Result<Series> {
    if m > k {
        return Ok(Series::zero(tables.ctx()));
    }
    let ctx = tables.ctx();
    let denom = tables.d(m).mul(&tables.l(k - m).frob_pow(m as u32));
    let sign = if (k - m).is_multiple_of(2) { 1 } else { -1 };
    Series::from_int(ctx, sign).div(&denom)
}

/// C_s(t) = Σ_k f_k(s) t^{q^k}, known for k <= order.
pub fn carlitz_module_function(tables: &Quantities, order: usize) -> Result<MultiSeries> {
    let mut terms = Vec::new();
    for k in 0..=order {
        for m in 0..=k {
            terms.push((vec![m as u32, k as u32], carlitz_f_coefficient(tables, m, k)?));
        }
    }
    MultiSeries::new(tables.ctx(), 1, vec![order as i64], terms)
}

/// Σ_{k,ν} F(-k; -ν; s) t^{q^k} u^{q^ν} with the terminating one-by-one
/// hypergeometric polynomials, known for k, ν <= order.
pub fn hypergeometric_generating_function(tables: &Quantities, order: usize) -> Result<MultiSeries> {
    let mut terms = Vec::new();
    for k in 0..=order {
        for nu in 0..=order {
            let f = crate::special::hypergeometric_series(tables, &[-(k as i64)], &[-(nu as i64)], k.min(nu) + 1)?;
            for (m, c) in f.coeffs().iter().enumerate() {
                terms.push((vec![m as u32, k as u32, nu as u32], c.clone()));
            }
        }
    }
    MultiSeries::new(tables.ctx(), 2, vec![order as i64, order as i64], terms)
}

/// Σ_k Σ_{m<=k} binom(k, m)_K s^{q^m} t^{q^k}, known for k <= order.
pub fn kbinomial_function(tables: &Quantities, order: usize) -> Result<MultiSeries> {
    let mut terms = Vec::new();
    for k in 0..=order {
        for m in 0..=k {
            terms.push((vec![m as u32, k as u32], kbinom(tables, k, m)?));
        }
    }
    MultiSeries::new(tables.ctx(), 1, vec![order as i64], terms)
}

/// g(st) with g the Carlitz exponential: only diagonal coefficients 1/D_k.
pub fn diagonal_exponential(tables: &Quantities, order: usize) -> Result<MultiSeries> {
    let ctx = tables.ctx();
    let terms = (0..=order)
        .map(|k| Ok((vec![k as u32, k as u32], Series::one(ctx).div(&tables.d(k))?)))
        .collect::<Result<Vec<_>>>()?;
    MultiSeries::new(ctx, 1, vec![order as i64], terms)
}

/// Number of words τ^l d^μ Δ^I with total degree <= ν in 2 + n generators.
pub fn free_word_count(n: usize, nu: u64) -> u64 {
    let g = 2 + n as u64;
    // binomial(nu + g, g)
    (1..=g).fold(1u64, |acc, i| acc * (nu + i) / i)
}

/// All words of total degree exactly ν.
pub fn words_of_degree(n: usize, nu: u32) -> Vec<Word> {
    fn rec(slots: usize, total: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=total {
            cur.push(a);
            rec(slots - 1, total - a, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(2 + n, nu, &mut Vec::new(), &mut raw);
    raw.into_iter().map(|v| Word::new(v[0], v[1], v[2..].to_vec())).collect()
}

/// Empirical growth of dim Γ_ν f, where Γ_ν is spanned by words of total
/// degree <= ν.
#[derive(Clone, Debug)]
pub struct FiltrationReport {
    /// dims[ν] for ν = 0..=ν_max.
    pub dims: Vec<usize>,
    /// Word counts of the free module, for comparison.
    pub free_counts: Vec<u64>,
    /// Least-squares slope of log dim against log ν over the upper half.
    pub growth_exponent: f64,
    /// Truncation index r of the coordinate window k_j <= r.
    pub window: i64,
}

/// Default number of relative digits a pivot must carry.
pub const DEFAULT_PIVOT_MARGIN: i64 = 5;

fn shift_to_zero(entries: &mut [&mut Series]) {
    let low = entries.iter().filter_map(|e| e.valuation().finite()).min();
    if let Some(v) = low {
        for e in entries.iter_mut() {
            **e = e.shift(-v);
        }
    }
}

/// Rank over F_q((x)) by full pivoting on minimal valuation after scaling
/// every row and column to minimal valuation 0. Pivots need `margin`
/// relative digits, and a vanishing remainder must be known to `margin`
/// digits at the normalized scale.
pub fn rank_to_precision(mut rows: Vec<Vec<Series>>, margin: i64) -> Result<usize> {
    let margin = Ratio::from_integer(margin);
    let ncols = rows.first().map_or(0, Vec::len);
    for j in 0..ncols {
        let mut col: Vec<&mut Series> = rows.iter_mut().map(|r| &mut r[j]).collect();
        shift_to_zero(&mut col);
    }
    for r in rows.iter_mut() {
        let mut row: Vec<&mut Series> = r.iter_mut().collect();
        shift_to_zero(&mut row);
    }
    let mut live_rows: Vec<usize> = (0..rows.len()).collect();
    let mut live_cols: Vec<usize> = (0..ncols).collect();
    let mut rank = 0;
    loop {
        let mut best: Option<(usize, usize, Ratio<i64>)> = None;
        for (ri, &i) in live_rows.iter().enumerate() {
            for (cj, &j) in live_cols.iter().enumerate() {
                if let Some(v) = rows[i][j].valuation().finite() {
                    if best.as_ref().is_none_or(|b| v < b.2) {
                        best = Some((ri, cj, v));
                    }
                }
            }
        }
        let Some((ri, cj, v)) = best else {
            for &i in &live_rows {
                for &j in &live_cols {
                    if let Some(p) = rows[i][j].precision() {
                        if p < margin {
                            return Err(Error::PrecisionExhausted(format!(
                                "remainder known only to O(x^{p}) at rank {rank} (floor {margin})"
                            )));
                        }
                    }
                }
            }
            return Ok(rank);
        };
        let (pi, pj) = (live_rows.swap_remove(ri), live_cols.swap_remove(cj));
        let pivot = rows[pi][pj].clone();
        if let Some(p) = pivot.precision() {
            if p - v < margin {
                return Err(Error::PrecisionExhausted(format!(
                    "pivot carries only {} relative digits (floor {margin})",
                    p - v
                )));
            }
        }
        let prow = rows[pi].clone();
        for &i in &live_rows {
            if rows[i][pj].is_zero() {
                continue;
            }
            let f = rows[i][pj].div(&pivot)?;
            for &j in &live_cols {
                if !prow[j].is_exact_zero() {
                    rows[i][j] = rows[i][j].sub(&f.mul(&prow[j]));
                }
            }
            rows[i][pj] = Series::zero(pivot.ctx());
        }
        rank += 1;
    }
}

/// Working precision at which words with d^{ν_max} still leave `margin`
/// relative digits: each q-th root divides the x-adic relative precision
/// by q.
pub fn estimator_precision(q: u32, nu_max: u32, margin: i64) -> i64 {
    margin * (q as i64).pow(nu_max)
}

/// Runs the filtration estimator with the given pivot margin. The
/// coordinate window is the largest one every word of degree <= ν_max
/// leaves fully known.
pub fn filtration_dimension_estimate(f: &MultiSeries, nu_max: u32, margin: i64) -> Result<FiltrationReport> {
    let low = *f.bounds.iter().min().unwrap_or(&0);
    let window = low - nu_max as i64;
    if window < 0 {
        return Err(Error::TruncationExhausted(format!(
            "series known to index {low}, cannot apply words of degree {nu_max}"
        )));
    }
    let mut coords: Vec<Vec<u32>> = Vec::new();
    let r = window as u32;
    match f.nvars {
        0 => coords.extend((0..=r).map(|m| vec![m])),
        1 => {
            for k in 0..=r {
                coords.extend((0..=k).map(|m| vec![m, k]));
            }
        }
        _ => {
            for k1 in 0..=r {
                for k2 in 0..=r {
                    coords.extend((0..=k1.min(k2)).map(|m| vec![m, k1, k2]));
                }
            }
        }
    }
    let mut vectors: Vec<Vec<Series>> = Vec::new();
    let mut dims = Vec::new();
    for nu in 0..=nu_max {
        for w in words_of_degree(f.nvars, nu) {
            let g = f.apply_word(&w)?;
            vectors.push(coords.iter().map(|c| g.coeff(c)).collect());
        }
        dims.push(rank_to_precision(vectors.clone(), margin)?);
    }
    let from = (nu_max as usize).div_ceil(2).max(1);
    let pts: Vec<(f64, f64)> = (from..=nu_max as usize)
        .filter(|&nu| dims[nu] > 0)
        .map(|nu| (libm::log(nu as f64), libm::log(dims[nu] as f64)))
        .collect();
    let growth_exponent = least_squares_slope(&pts);
    let free_counts = (0..=nu_max as u64).map(|nu| free_word_count(f.nvars, nu)).collect();
    Ok(FiltrationReport { dims, free_counts, growth_exponent, window })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Window-limited non-sparseness test. An index m counts when some nonzero
/// a_{m,k} has every k_j in [m + window/2, window]; f passes when such an m
/// exists in the upper half of the admissible range. For n = 0 an index m
/// counts when a_m is nonzero.
pub fn nonsparse_check(f: &MultiSeries, window: u32) -> bool {
    let w = window as i64;
    if f.bounds.iter().any(|&b| b < w) {
        return false;
    }
    let gap = if f.nvars == 0 { 0 } else { window / 2 };
    let top = window - gap;
    let counts = |m: u32| {
        f.terms.iter().any(|(k, c)| {
            k[0] == m && !c.is_zero() && k[1..].iter().all(|&kj| kj >= m + gap && kj <= window)
        })
    };
    (top.div_ceil(2)..=top).any(counts)
}
