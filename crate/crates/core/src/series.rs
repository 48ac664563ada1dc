//! Truncated Laurent series over F_{p^m} with exponents in q^{-e} Z.
//!
//! A value stores its ramification exponent `e`, a sorted list of
//! (scaled exponent, coefficient) pairs and either no precision (an exact
//! Laurent polynomial) or a scaled cutoff below which every coefficient is
//! known. Precision is propagated pessimistically; inexact results are
//! additionally capped at the context's relative precision.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{Context, Fe};

/// x-adic valuation: a rational number or +infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Ratio<i64>),
    Infinite,
}

impl Valuation {
    pub fn int(v: i64) -> Self {
        Valuation::Finite(Ratio::from_integer(v))
    }

    pub fn finite(self) -> Option<Ratio<i64>> {
        match self {
            Valuation::Finite(r) => Some(r),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Value as f64 (`f64::INFINITY` for +infinity).
    pub fn to_f64(self) -> f64 {
        match self {
            Valuation::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Valuation::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Infinite => write!(f, "inf"),
            Valuation::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Valuation::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

/// Element of F_{p^m}((x^{1/q^e})) known to a finite or infinite precision.
#[derive(Clone)]
pub struct Series {
    ctx: Arc<Context>,
    ram: u32,
    terms: Vec<(i64, Fe)>,
    prec: Option<i64>,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.ram == other.ram && self.terms == other.terms && self.prec == other.prec
    }
}

impl Eq for Series {}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self})")
    }
}

impl Series {
    // ---- construction -------------------------------------------------

    /// Builds a value from raw parts, normalizing it.
    pub fn from_parts(
        ctx: &Arc<Context>,
        ram: u32,
        terms: impl IntoIterator<Item = (i64, Fe)>,
        prec: Option<i64>,
    ) -> Series {
        let mut map: BTreeMap<i64, Fe> = BTreeMap::new();
        for (e, c) in terms {
            let slot = map.entry(e).or_insert(Fe::ZERO);
            *slot = ctx.add(*slot, c);
        }
        let terms = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Series { ctx: ctx.clone(), ram, terms, prec }.normalized()
    }

    pub fn zero(ctx: &Arc<Context>) -> Series {
        Series { ctx: ctx.clone(), ram: 0, terms: Vec::new(), prec: None }
    }

    /// The element O(x^n): zero known to precision n.
    pub fn zero_to(ctx: &Arc<Context>, n: i64) -> Series {
        Series { ctx: ctx.clone(), ram: 0, terms: Vec::new(), prec: Some(n) }
    }

    pub fn one(ctx: &Arc<Context>) -> Series {
        Series::constant(ctx, Fe::ONE)
    }

    pub fn constant(ctx: &Arc<Context>, c: Fe) -> Series {
        Series::monomial(ctx, c, 0)
    }

    pub fn from_int(ctx: &Arc<Context>, n: i64) -> Series {
        Series::constant(ctx, ctx.from_int(n))
    }

    /// c x^n.
    pub fn monomial(ctx: &Arc<Context>, c: Fe, n: i64) -> Series {
        let terms = if c.is_zero() { Vec::new() } else { vec![(n, c)] };
        Series { ctx: ctx.clone(), ram: 0, terms, prec: None }
    }

    /// x^n.
    pub fn x_pow(ctx: &Arc<Context>, n: i64) -> Series {
        Series::monomial(ctx, Fe::ONE, n)
    }

    /// x^{num / q^e}.
    pub fn x_ramified(ctx: &Arc<Context>, num: i64, e: u32) -> Series {
        Series::from_parts(ctx, e, [(num, Fe::ONE)], None)
    }

    /// Polynomial sum c_i x^i from prime-field integers.
    pub fn from_ints(ctx: &Arc<Context>, coeffs: &[i64]) -> Series {
        Series::from_parts(
            ctx,
            0,
            coeffs.iter().enumerate().map(|(i, &c)| (i as i64, ctx.from_int(c))),
            None,
        )
    }

    /// Polynomial sum c_i x^i from field elements.
    pub fn from_coeffs(ctx: &Arc<Context>, coeffs: &[Fe]) -> Series {
        Series::from_parts(ctx, 0, coeffs.iter().enumerate().map(|(i, &c)| (i as i64, c)), None)
    }

    // ---- accessors ----------------------------------------------------

    pub fn ctx(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn ram(&self) -> u32 {
        self.ram
    }

    /// (scaled exponent, coefficient) pairs, ascending, no zeros.
    pub fn terms(&self) -> &[(i64, Fe)] {
        &self.terms
    }

    /// Scaled precision cutoff (None when exact).
    pub fn scaled_prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Precision as a rational exponent (None when exact).
    pub fn precision(&self) -> Option<Ratio<i64>> {
        self.prec.map(|p| Ratio::new(p, self.ctx.q_pow(self.ram)))
    }

    /// Valuation of the known part; +infinity for (possibly inexact) zero.
    pub fn valuation(&self) -> Valuation {
        match self.terms.first() {
            Some(&(e, _)) => Valuation::Finite(Ratio::new(e, self.ctx.q_pow(self.ram))),
            None => Valuation::Infinite,
        }
    }

    /// Lower bound on the true valuation: the valuation if a term is known,
    /// else the precision, else infinity.
    pub fn valuation_bound(&self) -> Valuation {
        match (self.terms.first(), self.prec) {
            (Some(_), _) => self.valuation(),
            (None, Some(p)) => Valuation::Finite(Ratio::new(p, self.ctx.q_pow(self.ram))),
            (None, None) => Valuation::Infinite,
        }
    }

    /// No known nonzero coefficient (exact zero or zero to precision).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec.is_none()
    }

    /// Leading coefficient.
    pub fn lead(&self) -> Option<Fe> {
        self.terms.first().map(|t| t.1)
    }

    /// Coefficient of x^r (zero if absent; None if r is at or beyond precision).
    pub fn coeff(&self, r: Ratio<i64>) -> Option<Fe> {
        if let Some(p) = self.precision() {
            if r >= p {
                return None;
            }
        }
        let scale = Ratio::from_integer(self.ctx.q_pow(self.ram));
        let s = r * scale;
        if !s.is_integer() {
            return Some(Fe::ZERO);
        }
        let s = s.to_integer();
        Some(
            self.terms
                .binary_search_by_key(&s, |t| t.0)
                .map(|i| self.terms[i].1)
                .unwrap_or(Fe::ZERO),
        )
    }

    /// Stored terms as (rational exponent, coefficient).
    pub fn rational_terms(&self) -> impl Iterator<Item = (Ratio<i64>, Fe)> + '_ {
        let d = self.ctx.q_pow(self.ram);
        self.terms.iter().map(move |&(e, c)| (Ratio::new(e, d), c))
    }

    /// True when every coefficient lies in F_q and the value is an exact
    /// polynomial in x (an element of F_q[x]).
    pub fn is_fq_polynomial(&self) -> bool {
        self.prec.is_none()
            && self.ram == 0
            && self.terms.iter().all(|&(e, c)| e >= 0 && self.ctx.in_fq(c))
    }

    /// Degree of an exact polynomial (None for zero or non-exact).
    pub fn degree(&self) -> Option<Ratio<i64>> {
        if self.prec.is_some() {
            return None;
        }
        self.terms.last().map(|&(e, _)| Ratio::new(e, self.ctx.q_pow(self.ram)))
    }

    // ---- normalization ------------------------------------------------

    fn same_ctx(&self, other: &Series) {
        debug_assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.modulus() == other.ctx.modulus(),
            "series from different contexts"
        );
    }

    fn rescaled(&self, e: u32) -> Series {
        if e == self.ram {
            return self.clone();
        }
        let f = self.ctx.q_pow(e - self.ram);
        Series {
            ctx: self.ctx.clone(),
            ram: e,
            terms: self.terms.iter().map(|&(x, c)| (x * f, c)).collect(),
            prec: self.prec.map(|p| p * f),
        }
    }

    fn rel_cap(&self) -> i64 {
        self.ctx.params().precision * self.ctx.q_pow(self.ram)
    }

    fn normalized(mut self) -> Series {
        if let Some(p) = self.prec {
            let cut = self.terms.partition_point(|t| t.0 < p);
            self.terms.truncate(cut);
        }
        let limit = self.ctx.params().exact_limit;
        if self.prec.is_none() && self.terms.len() > limit {
            let v = self.terms[0].0;
            self.prec = Some(v + self.rel_cap());
        }
        if let (Some(p), Some(&(v, _))) = (self.prec, self.terms.first()) {
            let cap = v + self.rel_cap();
            if p > cap {
                self.prec = Some(cap);
                let cut = self.terms.partition_point(|t| t.0 < cap);
                self.terms.truncate(cut);
            }
        }
        let q = self.ctx.q() as i64;
        while self.ram > 0
            && self.terms.iter().all(|t| t.0 % q == 0)
            && self.prec.is_none_or(|p| p % q == 0)
        {
            for t in self.terms.iter_mut() {
                t.0 /= q;
            }
            self.prec = self.prec.map(|p| p / q);
            self.ram -= 1;
        }
        if self.terms.is_empty()
            && self.prec.is_none() {
                self.ram = 0;
            }
        self
    }

    /// Drop everything at or beyond x^r (never increases precision).
    pub fn truncate(&self, r: Ratio<i64>) -> Series {
        let scale = self.ctx.q_pow(self.ram);
        let s = (r * Ratio::from_integer(scale)).ceil().to_integer();
        let prec = Some(self.prec.map_or(s, |p| p.min(s)));
        Series { ctx: self.ctx.clone(), ram: self.ram, terms: self.terms.clone(), prec }
            .normalized()
    }

    // ---- ring operations ----------------------------------------------

    fn add_impl(&self, other: &Series, negate: bool) -> Series {
        self.same_ctx(other);
        let e = self.ram.max(other.ram);
        let a = self.rescaled(e);
        let b = other.rescaled(e);
        let prec = match (a.prec, b.prec) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        };
        let ctx = &self.ctx;
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() || j < b.terms.len() {
            let take_a = j >= b.terms.len() || (i < a.terms.len() && a.terms[i].0 < b.terms[j].0);
            let take_b = i >= a.terms.len() || (j < b.terms.len() && b.terms[j].0 < a.terms[i].0);
            if take_a {
                out.push(a.terms[i]);
                i += 1;
            } else if take_b {
                let c = if negate { ctx.neg(b.terms[j].1) } else { b.terms[j].1 };
                out.push((b.terms[j].0, c));
                j += 1;
            } else {
                let bc = if negate { ctx.neg(b.terms[j].1) } else { b.terms[j].1 };
                let c = ctx.add(a.terms[i].1, bc);
                if !c.is_zero() {
                    out.push((a.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Series { ctx: ctx.clone(), ram: e, terms: out, prec }.normalized()
    }

    pub fn add(&self, other: &Series) -> Series {
        self.add_impl(other, false)
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add_impl(other, true)
    }

    pub fn neg(&self) -> Series {
        let ctx = &self.ctx;
        Series {
            ctx: ctx.clone(),
            ram: self.ram,
            terms: self.terms.iter().map(|&(e, c)| (e, ctx.neg(c))).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by a constant.
    pub fn scale(&self, c: Fe) -> Series {
        let ctx = &self.ctx;
        if c.is_zero() {
            return match self.prec {
                None => Series::zero(ctx),
                Some(p) => {
                    Series { ctx: ctx.clone(), ram: self.ram, terms: Vec::new(), prec: Some(p) }
                        .normalized()
                }
            };
        }
        Series {
            ctx: ctx.clone(),
            ram: self.ram,
            terms: self.terms.iter().map(|&(e, x)| (e, ctx.mul(x, c))).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by x^r (r rational with denominator a power of q).
    pub fn shift(&self, r: Ratio<i64>) -> Series {
        let mut e = self.ram;
        let q = self.ctx.q() as i64;
        while self.ctx.q_pow(e) % r.denom() != 0 {
            e += 1;
            assert!(e < 40, "shift by a non q-power denominator");
            let _ = q;
        }
        let a = self.rescaled(e);
        let s = (r * Ratio::from_integer(self.ctx.q_pow(e))).to_integer();
        Series {
            ctx: a.ctx.clone(),
            ram: e,
            terms: a.terms.iter().map(|&(x, c)| (x + s, c)).collect(),
            prec: a.prec.map(|p| p + s),
        }
        .normalized()
    }

    pub fn mul(&self, other: &Series) -> Series {
        self.same_ctx(other);
        let e = self.ram.max(other.ram);
        let a = self.rescaled(e);
        let b = other.rescaled(e);
        let ctx = &self.ctx;
        let va = a.terms.first().map(|t| t.0).or(a.prec);
        let vb = b.terms.first().map(|t| t.0).or(b.prec);
        // a = A + O(x^pa), b = B + O(x^pb) => ab = AB + O(x^{min(pa+vb, pb+va)})
        let prec = match (a.prec, b.prec) {
            (None, None) => None,
            (Some(pa), None) => vb.map(|v| pa + v),
            (None, Some(pb)) => va.map(|v| pb + v),
            (Some(pa), Some(pb)) => {
                let x = vb.map_or(i64::MAX, |v| pa + v);
                let y = va.map_or(i64::MAX, |v| pb + v);
                Some(x.min(y))
            }
        };
        // exact zero times anything is exact zero
        if (a.terms.is_empty() && a.prec.is_none()) || (b.terms.is_empty() && b.prec.is_none()) {
            return Series::zero(ctx);
        }
        let terms = if a.terms.is_empty() || b.terms.is_empty() {
            Vec::new()
        } else {
            let mut cutoff = a.terms.last().unwrap().0 + b.terms.last().unwrap().0 + 1;
            if let Some(p) = prec {
                cutoff = cutoff.min(p);
            }
            // inexact products are capped at the relative precision anyway
            let lo = a.terms[0].0 + b.terms[0].0;
            if prec.is_some() {
                cutoff = cutoff.min(lo + ctx.params().precision * ctx.q_pow(e));
            }
            mul_terms(ctx, &a.terms, &b.terms, lo, cutoff)
        };
        Series { ctx: ctx.clone(), ram: e, terms, prec }.normalized()
    }

    pub fn square(&self) -> Series {
        self.mul(self)
    }

    pub fn pow(&self, mut n: u64) -> Series {
        let mut base = self.clone();
        let mut acc = Series::one(&self.ctx);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// a^q: exponents and precision scale by q, coefficients go through
    /// Frobenius. Exact in characteristic p.
    pub fn frob(&self) -> Series {
        let q = self.ctx.q() as i64;
        let ctx = &self.ctx;
        Series {
            ctx: ctx.clone(),
            ram: self.ram,
            terms: self.terms.iter().map(|&(e, c)| (e * q, ctx.frob(c))).collect(),
            prec: self.prec.map(|p| p * q),
        }
        .normalized()
    }

    /// a^{q^k}.
    pub fn frob_pow(&self, k: u32) -> Series {
        (0..k).fold(self.clone(), |acc, _| acc.frob())
    }

    /// The unique r with r^q = a (exists in the perfect closure).
    pub fn qth_root(&self) -> Result<Series> {
        let ctx = &self.ctx;
        let r = Series {
            ctx: ctx.clone(),
            ram: self.ram + 1,
            terms: self.terms.iter().map(|&(e, c)| (e, ctx.inv_frob(c))).collect(),
            prec: self.prec,
        }
        .normalized();
        let cap = ctx.params().ram_cap;
        if r.ram > cap {
            return Err(Error::RamificationCap { needed: r.ram, cap });
        }
        Ok(r)
    }

    /// a^{q^{-k}}.
    pub fn root_pow(&self, k: u32) -> Result<Series> {
        let mut r = self.clone();
        for _ in 0..k {
            r = r.qth_root()?;
        }
        Ok(r)
    }

    /// a^{q^k} for k of either sign.
    pub fn frob_signed(&self, k: i64) -> Result<Series> {
        if k >= 0 {
            Ok(self.frob_pow(k as u32))
        } else {
            self.root_pow((-k) as u32)
        }
    }

    pub fn inv(&self) -> Result<Series> {
        Series::one(&self.ctx).div(self)
    }

    pub fn div(&self, other: &Series) -> Result<Series> {
        self.same_ctx(other);
        if other.terms.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let ctx = &self.ctx;
        if self.is_exact_zero() {
            return Ok(Series::zero(ctx));
        }
        let e = self.ram.max(other.ram);
        let a = self.rescaled(e);
        let b = other.rescaled(e);
        if a.prec.is_none() && b.prec.is_none() {
            if let Some(qt) = exact_divide(ctx, &a.terms, &b.terms) {
                return Ok(Series { ctx: ctx.clone(), ram: e, terms: qt, prec: None }.normalized());
            }
        }
        let vb = b.terms[0].0;
        let cap = ctx.params().precision * ctx.q_pow(e);
        let rel_b = b.prec.map_or(i64::MAX, |p| p - vb);
        if a.terms.is_empty() {
            let pa = a.prec.unwrap();
            let p = pa - vb;
            return Ok(Series { ctx: ctx.clone(), ram: e, terms: Vec::new(), prec: Some(p) }
                .normalized());
        }
        let va = a.terms[0].0;
        let rel_a = a.prec.map_or(i64::MAX, |p| p - va);
        let rel = rel_a.min(rel_b).min(cap);
        if rel <= 0 {
            return Err(Error::PrecisionExhausted("quotient known to no terms".into()));
        }
        let len = rel as usize;
        let u0inv = ctx.inv(b.terms[0].1).unwrap();
        let mut work = vec![Fe::ZERO; len];
        for &(x, c) in &a.terms {
            let k = x - va;
            if k < rel {
                work[k as usize] = c;
            }
        }
        let tail: Vec<(usize, Fe)> = b.terms[1..]
            .iter()
            .map(|&(x, c)| ((x - vb) as usize, c))
            .take_while(|&(k, _)| k < len)
            .collect();
        let mut out = Vec::new();
        for n in 0..len {
            let c = ctx.mul(work[n], u0inv);
            if c.is_zero() {
                continue;
            }
            out.push((n as i64 + va - vb, c));
            for &(k, uk) in &tail {
                if n + k >= len {
                    break;
                }
                work[n + k] = ctx.sub(work[n + k], ctx.mul(c, uk));
            }
        }
        Ok(Series { ctx: ctx.clone(), ram: e, terms: out, prec: Some(va - vb + rel) }.normalized())
    }

    // ---- comparisons --------------------------------------------------

    /// Valuation bound of the difference: how far two values provably agree.
    pub fn agreement(&self, other: &Series) -> Valuation {
        self.sub(other).valuation_bound()
    }

    /// Equal on every coefficient both sides know.
    pub fn eq_to_precision(&self, other: &Series) -> bool {
        self.sub(other).is_zero()
    }

    /// Evaluate an integer power of x times this value at x = element of
    /// nothing: helper for display.
    fn fmt_term(&self, s: &mut String, e: i64, c: Fe, first: bool) {
        use core::fmt::Write;
        let ctx = &self.ctx;
        let d = ctx.q_pow(self.ram);
        let r = Ratio::new(e, d);
        let cs = ctx.format(c);
        let coef_is_one = c == Fe::ONE;
        let needs_paren = ctx.m() > 1 && cs.contains('+');
        if !first {
            s.push('+');
        }
        let exp_str = if *r.denom() == 1 {
            alloc::format!("{}", r.numer())
        } else {
            alloc::format!("({}/{})", r.numer(), r.denom())
        };
        if e == 0 {
            if needs_paren {
                let _ = write!(s, "({cs})");
            } else {
                s.push_str(&cs);
            }
            return;
        }
        if !coef_is_one {
            if needs_paren {
                let _ = write!(s, "({cs})*");
            } else {
                let _ = write!(s, "{cs}*");
            }
        }
        if r == Ratio::from_integer(1) {
            s.push('x');
        } else {
            let _ = write!(s, "x^{exp_str}");
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let mut first = true;
        match self.prec {
            None => {
                for &(e, c) in self.terms.iter().rev() {
                    self.fmt_term(&mut s, e, c, first);
                    first = false;
                }
                if first {
                    s.push('0');
                }
            }
            Some(p) => {
                for &(e, c) in self.terms.iter() {
                    self.fmt_term(&mut s, e, c, first);
                    first = false;
                }
                if !first {
                    s.push('+');
                }
                let r = Ratio::new(p, self.ctx.q_pow(self.ram));
                if *r.denom() == 1 {
                    s.push_str(&alloc::format!("O(x^{})", r.numer()));
                } else {
                    s.push_str(&alloc::format!("O(x^({}/{}))", r.numer(), r.denom()));
                }
            }
        }
        f.write_str(&s)
    }
}

fn mul_terms(ctx: &Context, a: &[(i64, Fe)], b: &[(i64, Fe)], lo: i64, cutoff: i64) -> Vec<(i64, Fe)> {
    if cutoff <= lo {
        return Vec::new();
    }
    let span = (cutoff - lo) as u64;
    let work = (a.len() as u64) * (b.len() as u64);
    if span <= (1 << 22) && span <= work.saturating_mul(8).max(1024) {
        let mut buf = vec![Fe::ZERO; span as usize];
        for &(ea, ca) in a {
            if ea + b[0].0 >= cutoff {
                break;
            }
            for &(eb, cb) in b {
                let k = ea + eb;
                if k >= cutoff {
                    break;
                }
                let slot = &mut buf[(k - lo) as usize];
                *slot = ctx.add(*slot, ctx.mul(ca, cb));
            }
        }
        buf.into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64 + lo, c))
            .collect()
    } else {
        let mut map: BTreeMap<i64, Fe> = BTreeMap::new();
        for &(ea, ca) in a {
            for &(eb, cb) in b {
                let k = ea + eb;
                if k >= cutoff {
                    break;
                }
                let slot = map.entry(k).or_insert(Fe::ZERO);
                *slot = ctx.add(*slot, ctx.mul(ca, cb));
            }
        }
        map.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

/// Exact quotient of Laurent polynomials, if the division is exact.
fn exact_divide(ctx: &Context, a: &[(i64, Fe)], b: &[(i64, Fe)]) -> Option<Vec<(i64, Fe)>> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    let (bt, bc) = *b.last().unwrap();
    let blo = b[0].0;
    let lead_inv = ctx.inv(bc)?;
    let mut rem: BTreeMap<i64, Fe> = a.iter().copied().collect();
    let mut quot = Vec::new();
    let alo = a[0].0;
    loop {
        let (&top, &c) = match rem.iter().next_back() {
            Some(x) => x,
            None => break,
        };
        let shift = top - bt;
        // quotient terms below this would leave a remainder under a's lowest term
        if shift + blo < alo {
            return None;
        }
        let k = ctx.mul(c, lead_inv);
        quot.push((shift, k));
        for &(e, x) in b {
            let key = e + shift;
            let slot = rem.entry(key).or_insert(Fe::ZERO);
            *slot = ctx.sub(*slot, ctx.mul(k, x));
            if slot.is_zero() {
                rem.remove(&key);
            }
        }
        if quot.len() > 1 << 20 {
            return None;
        }
    }
    quot.reverse();
    Some(quot)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&Series> for &Series {
            type Output = Series;
            fn $method(self, rhs: &Series) -> Series {
                Series::$imp(self, rhs)
            }
        }
        impl $tr<Series> for Series {
            type Output = Series;
            fn $method(self, rhs: Series) -> Series {
                Series::$imp(&self, &rhs)
            }
        }
        impl $tr<&Series> for Series {
            type Output = Series;
            fn $method(self, rhs: &Series) -> Series {
                Series::$imp(&self, rhs)
            }
        }
        impl $tr<Series> for &Series {
            type Output = Series;
            fn $method(self, rhs: Series) -> Series {
                Series::$imp(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::neg(self)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::neg(&self)
    }
}
