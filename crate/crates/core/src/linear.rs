//! F_q-linear functions sum a_n t^{q^n} with series coefficients.

use alloc::vec::Vec;

use crate::error::Result;
use crate::series::Series;

/// sum_n a_n t^{q^n}. When `truncated`, coefficients past the stored ones
/// are unknown; otherwise they are zero and the value is a polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct FqLinear {
    coeffs: Vec<Series>,
    truncated: bool,
}

impl FqLinear {
    /// An exact polynomial.
    pub fn poly(coeffs: Vec<Series>) -> Self {
        let mut s = FqLinear { coeffs, truncated: false };
        s.trim();
        s
    }

    /// A series known through index `coeffs.len() - 1`.
    pub fn truncated(coeffs: Vec<Series>) -> Self {
        FqLinear { coeffs, truncated: true }
    }

    fn trim(&mut self) {
        if !self.truncated {
            while self.coeffs.last().is_some_and(|c| c.is_exact_zero()) {
                self.coeffs.pop();
            }
        }
    }

    pub fn coeffs(&self) -> &[Series] {
        &self.coeffs
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Number of known coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored coefficient of t^{q^n}.
    pub fn coeff(&self, n: usize) -> Option<&Series> {
        self.coeffs.get(n)
    }

    /// Coefficient of t^{q^n}, cloning zero for indices past a polynomial.
    pub fn coeff_or_zero(&self, n: usize, zero: &Series) -> Option<Series> {
        match self.coeffs.get(n) {
            Some(c) => Some(c.clone()),
            None if self.truncated => None,
            None => Some(zero.clone()),
        }
    }

    /// Keep the first n coefficients, marking the rest unknown.
    pub fn truncate_order(&self, n: usize) -> FqLinear {
        let mut c = self.coeffs.clone();
        if c.len() > n {
            c.truncate(n);
            return FqLinear { coeffs: c, truncated: true };
        }
        if self.truncated {
            return self.clone();
        }
        let zero = Series::zero(self.coeffs.first().map(|s| s.ctx()).expect("nonempty"));
        c.resize(n, zero);
        FqLinear { coeffs: c, truncated: true }
    }

    pub fn add(&self, other: &FqLinear) -> FqLinear {
        let n = combined_len(self, other);
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        let mut r = FqLinear { coeffs, truncated: self.truncated || other.truncated };
        r.trim();
        r
    }

    pub fn sub(&self, other: &FqLinear) -> FqLinear {
        self.add(&other.map(|c| c.neg()))
    }

    /// Multiply every coefficient by a constant series.
    pub fn scale_series(&self, c: &Series) -> FqLinear {
        let mut r = FqLinear {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
            truncated: self.truncated,
        };
        r.trim();
        r
    }

    /// (sum a_n t^{q^n})^q = sum a_n^q t^{q^{n+1}}.
    pub fn frob(&self) -> FqLinear {
        let ctx = self.coeffs.first().map(|s| s.ctx().clone());
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        if let Some(ctx) = ctx {
            coeffs.push(Series::zero(&ctx));
        }
        coeffs.extend(self.coeffs.iter().map(|a| a.frob()));
        FqLinear { coeffs, truncated: self.truncated }
    }

    /// (f o g)(t) = f(g(t)); coefficient k is sum_{n+m=k} a_n b_m^{q^n}.
    pub fn compose(&self, g: &FqLinear) -> FqLinear {
        let ctx = match self.coeffs.first().or(g.coeffs.first()) {
            Some(s) => s.ctx().clone(),
            None => return self.clone(),
        };
        let trunc = self.truncated || g.truncated;
        let len = if trunc {
            let a = if self.truncated { self.len() } else { usize::MAX };
            let b = if g.truncated { g.len() } else { usize::MAX };
            a.min(b).min(self.len() + g.len())
        } else {
            (self.len() + g.len()).saturating_sub(1)
        };
        let mut coeffs: Vec<Series> = (0..len).map(|_| Series::zero(&ctx)).collect();
        for (n, a) in self.coeffs.iter().enumerate() {
            let mut bpow: Vec<Series> = g.coeffs.iter().map(|b| b.frob_pow(n as u32)).collect();
            for (m, b) in bpow.drain(..).enumerate() {
                if n + m < len {
                    coeffs[n + m] = coeffs[n + m].add(&a.mul(&b));
                }
            }
        }
        let mut r = FqLinear { coeffs, truncated: trunc };
        r.trim();
        r
    }

    /// Evaluate at t: sum of the known terms (no tail estimate).
    pub fn eval(&self, t: &Series) -> Series {
        let mut acc = Series::zero(t.ctx());
        let mut tp = t.clone();
        for a in &self.coeffs {
            acc = acc.add(&a.mul(&tp));
            tp = tp.frob();
        }
        acc
    }

    /// Apply a map to every coefficient.
    pub fn map(&self, f: impl FnMut(&Series) -> Series) -> FqLinear {
        FqLinear { coeffs: self.coeffs.iter().map(f).collect(), truncated: self.truncated }
    }

    /// Fallible variant of [`FqLinear::map`].
    pub fn try_map(&self, f: impl FnMut(&Series) -> Result<Series>) -> Result<FqLinear> {
        Ok(FqLinear {
            coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()?,
            truncated: self.truncated,
        })
    }

    /// Agreement to precision on every index both sides know.
    pub fn eq_to_precision(&self, other: &FqLinear) -> bool {
        let n = combined_len(self, other);
        (0..n).all(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
            (Some(a), Some(b)) => a.eq_to_precision(b),
            (Some(a), None) => other.truncated || a.is_zero(),
            (None, Some(b)) => self.truncated || b.is_zero(),
            (None, None) => true,
        })
    }
}

fn combined_len(a: &FqLinear, b: &FqLinear) -> usize {
    match (a.truncated, b.truncated) {
        (true, true) => a.len().min(b.len()),
        (true, false) => a.len(),
        (false, true) => b.len(),
        (false, false) => a.len().max(b.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Context;

    #[test]
    fn compose_linear_polys() {
        let ctx = Context::new(2, 1, 1).unwrap();
        let x = Series::x_pow(&ctx, 1);
        let one = Series::one(&ctx);
        // f = x t + t^2, g = t^2 ; f(g) = x t^2 + t^4
        let f = FqLinear::poly(alloc::vec![x.clone(), one.clone()]);
        let g = FqLinear::poly(alloc::vec![Series::zero(&ctx), one.clone()]);
        let h = f.compose(&g);
        assert_eq!(h, FqLinear::poly(alloc::vec![Series::zero(&ctx), x.clone(), one.clone()]));
        let t = Series::from_ints(&ctx, &[1, 1]);
        assert_eq!(h.eval(&t), f.eval(&g.eval(&t)));
    }
}
