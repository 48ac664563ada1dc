//! Carlitz factorials, Carlitz polynomials, the exponential, logarithm and
//! module function, and the Carlitz coefficient basis.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Context;
use crate::linear::FqLinear;
use crate::series::{Series, Valuation};

/// [k] = x^{q^k} - x for any integer k ([0] = 0; negative k is ramified).
pub fn bracket(ctx: &Arc<Context>, k: i64) -> Result<Series> {
    let x = Series::x_pow(ctx, 1);
    if k >= 0 {
        Ok(x.frob_pow(k as u32).sub(&x))
    } else {
        Ok(x.root_pow((-k) as u32)?.sub(&x))
    }
}

/// Cached [i], D_i and L_i for 0 <= i <= n.
///
/// D_i = [i] D_{i-1}^q and L_i = [i] L_{i-1} with D_0 = L_0 = 1. Lookups
/// beyond the cached range are computed on demand.
#[derive(Clone, Debug)]
pub struct Quantities {
    ctx: Arc<Context>,
    brackets: Vec<Series>,
    d: Vec<Series>,
    l: Vec<Series>,
}

impl Quantities {
    pub fn new(ctx: &Arc<Context>, n: usize) -> Self {
        let mut s = Quantities {
            ctx: ctx.clone(),
            brackets: vec![Series::zero(ctx)],
            d: vec![Series::one(ctx)],
            l: vec![Series::one(ctx)],
        };
        s.extend(n);
        s
    }

    pub fn ctx(&self) -> &Arc<Context> {
        &self.ctx
    }

    /// Largest cached index.
    pub fn cached(&self) -> usize {
        self.brackets.len() - 1
    }

    /// Grow the cache through index n.
    pub fn extend(&mut self, n: usize) {
        while self.brackets.len() <= n {
            let i = self.brackets.len();
            let b = bracket(&self.ctx, i as i64).expect("nonnegative bracket");
            let d = b.mul(&self.d[i - 1].frob());
            let l = b.mul(&self.l[i - 1]);
            self.brackets.push(b);
            self.d.push(d);
            self.l.push(l);
        }
    }

    fn grown(&self, n: usize) -> Option<Quantities> {
        if n <= self.cached() {
            None
        } else {
            let mut c = self.clone();
            c.extend(n);
            Some(c)
        }
    }

    pub fn bracket(&self, i: usize) -> Series {
        match self.grown(i) {
            None => self.brackets[i].clone(),
            Some(c) => c.brackets[i].clone(),
        }
    }

    pub fn d(&self, i: usize) -> Series {
        match self.grown(i) {
            None => self.d[i].clone(),
            Some(c) => c.d[i].clone(),
        }
    }

    pub fn l(&self, i: usize) -> Series {
        match self.grown(i) {
            None => self.l[i].clone(),
            Some(c) => c.l[i].clone(),
        }
    }

    /// [k] for signed k.
    pub fn bracket_signed(&self, k: i64) -> Result<Series> {
        if k >= 0 {
            Ok(self.bracket(k as usize))
        } else {
            bracket(&self.ctx, k)
        }
    }

    /// Carlitz polynomial e_i as sum_n a_n t^{q^n}, exact.
    ///
    /// Built by e_i = e_{i-1}^q - D_{i-1}^{q-1} e_{i-1}.
    pub fn carlitz_e(&self, i: usize) -> FqLinear {
        let ctx = &self.ctx;
        let mut e = FqLinear::poly(vec![Series::one(ctx)]);
        for k in 1..=i {
            let dq1 = self.d(k - 1).pow(ctx.q() as u64 - 1);
            e = e.frob().sub(&e.scale_series(&dq1));
        }
        e
    }

    /// Normalized Carlitz polynomial f_i = e_i / D_i.
    pub fn carlitz_f(&self, i: usize) -> Result<FqLinear> {
        let di = self.d(i);
        self.carlitz_e(i).try_map(|a| a.div(&di))
    }

    /// Values f_0(s), ..., f_n(s).
    pub fn carlitz_values(&self, s: &Series, n: usize) -> Result<Vec<Series>> {
        let ctx = &self.ctx;
        let mut out = Vec::with_capacity(n + 1);
        let mut e = s.clone();
        out.push(e.clone());
        for i in 1..=n {
            let dq1 = self.d(i - 1).pow(ctx.q() as u64 - 1);
            e = e.frob().sub(&dq1.mul(&e));
            out.push(e.div(&self.d(i))?);
        }
        Ok(out)
    }

    /// Carlitz exponential sum t^{q^n} / D_n, n <= order.
    pub fn carlitz_exp(&self, order: usize) -> Result<FqLinear> {
        let one = Series::one(&self.ctx);
        let c = (0..=order).map(|n| one.div(&self.d(n))).collect::<Result<_>>()?;
        Ok(FqLinear::truncated(c))
    }

    /// Carlitz logarithm sum (-1)^n t^{q^n} / L_n, n <= order.
    pub fn carlitz_log(&self, order: usize) -> Result<FqLinear> {
        let ctx = &self.ctx;
        let c = (0..=order)
            .map(|n| Series::from_int(ctx, if n % 2 == 0 { 1 } else { -1 }).div(&self.l(n)))
            .collect::<Result<_>>()?;
        Ok(FqLinear::truncated(c))
    }

    /// C_s(z) = sum_i f_i(s) z^{q^i}. Exact when s lies in F_q[x], where only
    /// i <= deg s contribute; otherwise truncated at `order`.
    pub fn carlitz_module(&self, s: &Series, order: usize) -> Result<FqLinear> {
        if s.valuation_bound() < Valuation::int(0) {
            return Err(Error::InvalidParameter("Carlitz module needs |s| <= 1".into()));
        }
        if s.is_fq_polynomial() {
            let deg = match s.degree() {
                Some(d) => d.to_integer() as usize,
                None => return Ok(FqLinear::poly(Vec::new())),
            };
            return Ok(FqLinear::poly(self.carlitz_values(s, deg)?));
        }
        Ok(FqLinear::truncated(self.carlitz_values(s, order)?))
    }

    /// Coefficients c_0..c_N of a polynomial against f_0..f_N (exact for
    /// exact input).
    pub fn to_carlitz(&self, u: &FqLinear) -> Result<CarlitzExpansion> {
        if u.is_truncated() {
            return Err(Error::InvalidParameter("basis conversion needs a polynomial".into()));
        }
        let ctx = &self.ctx;
        let n = u.len();
        if n == 0 {
            return Ok(CarlitzExpansion::poly(Vec::new()));
        }
        let mut rest: Vec<Series> = u.coeffs().to_vec();
        let mut b = vec![Series::zero(ctx); n];
        for i in (0..n).rev() {
            let lead = rest[i].clone();
            if lead.is_exact_zero() {
                continue;
            }
            let e = self.carlitz_e(i);
            for (k, a) in e.coeffs().iter().enumerate() {
                rest[k] = rest[k].sub(&lead.mul(a));
            }
            b[i] = lead;
        }
        let c = b.iter().enumerate().map(|(i, bi)| bi.mul(&self.d(i))).collect();
        Ok(CarlitzExpansion::poly(c))
    }

    /// Monomial coefficients of sum c_i f_i.
    pub fn from_carlitz(&self, c: &CarlitzExpansion) -> Result<FqLinear> {
        let ctx = &self.ctx;
        let n = c.len();
        let mut out = vec![Series::zero(ctx); n];
        for (i, ci) in c.coeffs().iter().enumerate() {
            if ci.is_exact_zero() {
                continue;
            }
            let bi = ci.div(&self.d(i))?;
            for (k, a) in self.carlitz_e(i).coeffs().iter().enumerate() {
                out[k] = out[k].add(&bi.mul(a));
            }
        }
        Ok(if c.is_truncated() { FqLinear::truncated(out) } else { FqLinear::poly(out) })
    }
}

/// Coefficients c_0..c_N of sum c_i f_i(t). When `truncated`, coefficients
/// past N are unknown; otherwise they vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct CarlitzExpansion {
    coeffs: Vec<Series>,
    truncated: bool,
}

impl CarlitzExpansion {
    pub fn poly(coeffs: Vec<Series>) -> Self {
        let mut s = CarlitzExpansion { coeffs, truncated: false };
        while s.coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            s.coeffs.pop();
        }
        s
    }

    pub fn truncated(coeffs: Vec<Series>) -> Self {
        CarlitzExpansion { coeffs, truncated: true }
    }

    /// The basis element f_i.
    pub fn basis(ctx: &Arc<Context>, i: usize) -> Self {
        let mut c = vec![Series::zero(ctx); i + 1];
        c[i] = Series::one(ctx);
        CarlitzExpansion::poly(c)
    }

    pub fn coeffs(&self) -> &[Series] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// c_i, with zero past a finite expansion and None past a truncation.
    pub fn get(&self, i: usize, ctx: &Arc<Context>) -> Option<Series> {
        match self.coeffs.get(i) {
            Some(c) => Some(c.clone()),
            None if self.truncated => None,
            None => Some(Series::zero(ctx)),
        }
    }

    /// Value at t given f_0(t), f_1(t), ... (at least len() of them).
    pub fn eval_with(&self, values: &[Series], ctx: &Arc<Context>) -> Series {
        self.coeffs
            .iter()
            .zip(values)
            .fold(Series::zero(ctx), |acc, (c, f)| acc.add(&c.mul(f)))
    }

    /// Value at t in F_q[x], where f_i(t) = 0 for i > deg t.
    pub fn eval_at(&self, tables: &Quantities, t: &Series) -> Result<Series> {
        let n = self.coeffs.len().saturating_sub(1);
        let deg = t.degree().map_or(0, |d| d.to_integer().max(0) as usize);
        let vals = tables.carlitz_values(t, n.min(deg))?;
        Ok(self.eval_with(&vals, tables.ctx()))
    }

    pub fn add(&self, other: &CarlitzExpansion) -> CarlitzExpansion {
        let ctx = match self.coeffs.first().or(other.coeffs.first()) {
            Some(s) => s.ctx().clone(),
            None => return self.clone(),
        };
        let n = match (self.truncated, other.truncated) {
            (true, true) => self.len().min(other.len()),
            (true, false) => self.len(),
            (false, true) => other.len(),
            (false, false) => self.len().max(other.len()),
        };
        let c: Vec<Series> = (0..n)
            .map(|i| {
                let a = self.get(i, &ctx).unwrap();
                let b = other.get(i, &ctx).unwrap();
                a.add(&b)
            })
            .collect();
        if self.truncated || other.truncated {
            CarlitzExpansion::truncated(c)
        } else {
            CarlitzExpansion::poly(c)
        }
    }

    pub fn scale(&self, s: &Series) -> CarlitzExpansion {
        let c = self.coeffs.iter().map(|a| a.mul(s)).collect();
        if self.truncated {
            CarlitzExpansion::truncated(c)
        } else {
            CarlitzExpansion::poly(c)
        }
    }

    /// Agreement to precision on every index both sides know.
    pub fn eq_to_precision(&self, other: &CarlitzExpansion) -> bool {
        let ctx = match self.coeffs.first().or(other.coeffs.first()) {
            Some(s) => s.ctx().clone(),
            None => return true,
        };
        let n = self.len().max(other.len());
        (0..n).all(|i| match (self.get(i, &ctx), other.get(i, &ctx)) {
            (Some(a), Some(b)) => a.eq_to_precision(&b),
            _ => true,
        })
    }
}

/// The literal product prod_{deg m < i} (t - m) as dense coefficients in t
/// (index = power of t). Cost grows like q^{2i}; meant as an oracle.
pub fn carlitz_e_product(ctx: &Arc<Context>, i: usize) -> Vec<Series> {
    let mut poly = vec![Series::one(ctx)];
    for m in fq_polys_below(ctx, i) {
        let mut next = vec![Series::zero(ctx); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] = next[k + 1].add(c);
            next[k] = next[k].sub(&c.mul(&m));
        }
        poly = next;
    }
    poly
}

/// All polynomials in F_q[x] of degree < n (including 0).
pub fn fq_polys_below(ctx: &Arc<Context>, n: usize) -> Vec<Series> {
    let fq = ctx.fq_elements();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * fq.len());
        for p in &out {
            for &c in &fq {
                let mut v: Vec<_> = Clone::clone(p);
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(|c| Series::from_coeffs(ctx, &c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn f2() -> Arc<Context> {
        Context::new(2, 1, 1).unwrap()
    }

    #[test]
    fn factorial_values() {
        let ctx = f2();
        let t = Quantities::new(&ctx, 4);
        assert_eq!(t.d(0), Series::one(&ctx));
        assert_eq!(t.bracket(1), Series::from_ints(&ctx, &[0, 1, 1]));
        assert_eq!(t.d(2), Series::from_ints(&ctx, &[0, 0, 0, 1, 0, 1, 1, 0, 1]));
        assert_eq!(t.d(3).valuation(), Valuation::int(7));
    }

    #[test]
    fn small_carlitz_polynomials() {
        let ctx = f2();
        let t = Quantities::new(&ctx, 4);
        let one = Series::one(&ctx);
        assert_eq!(t.carlitz_e(0), FqLinear::poly(vec![one.clone()]));
        assert_eq!(t.carlitz_e(1), FqLinear::poly(vec![one.clone(), one.clone()]));
        assert_eq!(
            t.carlitz_e(2),
            FqLinear::poly(vec![
                Series::from_ints(&ctx, &[0, 1, 1]),
                Series::from_ints(&ctx, &[1, 1, 1]),
                one.clone()
            ])
        );
    }

    #[test]
    fn basis_conversion_of_t_squared() {
        let ctx = f2();
        let t = Quantities::new(&ctx, 4);
        let u = FqLinear::poly(vec![Series::zero(&ctx), Series::one(&ctx)]);
        let c = t.to_carlitz(&u).unwrap();
        assert_eq!(c.coeffs()[0], Series::one(&ctx));
        assert_eq!(c.coeffs()[1], t.d(1));
        assert_eq!(t.from_carlitz(&c).unwrap(), u);
    }

    #[test]
    fn module_at_x() {
        let ctx = f2();
        let t = Quantities::new(&ctx, 4);
        let x = Series::x_pow(&ctx, 1);
        let cx = t.carlitz_module(&x, 5).unwrap();
        assert_eq!(cx, FqLinear::poly(vec![x.clone(), Series::one(&ctx)]));
        let c1 = t.carlitz_module(&Series::one(&ctx), 5).unwrap();
        assert_eq!(c1, FqLinear::poly(vec![Series::one(&ctx)]));
    }

    #[test]
    fn log_coefficient() {
        let ctx = f2();
        let t = Quantities::new(&ctx, 4);
        let lg = t.carlitz_log(4).unwrap();
        let expect = Series::one(&ctx).div(&t.bracket(1)).unwrap();
        assert!(lg.coeffs()[1].eq_to_precision(&expect));
        assert_eq!(lg.coeffs()[1].valuation(), Valuation::Finite(Ratio::from_integer(-1)));
    }
}
