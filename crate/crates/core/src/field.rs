//! The constant field F_{p^m} and the shared arithmetic context.
//!
//! Elements are encoded as integers whose base-p digits are the coefficients
//! of the class of `y` modulo the defining polynomial. Multiplication goes
//! through exp/log tables built once per context.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};

/// Largest constant field for which tables (and exhaustive searches) are built.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// An element of the constant field, encoded by its base-p digit vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Parameters controlling precision and ramification for every value built
/// from a context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    /// Relative x-adic precision kept for inexact values.
    pub precision: i64,
    /// Largest allowed ramification exponent e (exponents in q^{-e} Z).
    pub ram_cap: u32,
    /// Exact values with more stored terms than this are truncated to
    /// `precision` relative digits.
    pub exact_limit: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { precision: 40, ram_cap: 4, exact_limit: 8192 }
    }
}

/// Constant field F_{p^m} together with q = p^upsilon and the precision
/// parameters shared by all series over it.
pub struct Context {
    p: u32,
    m: u32,
    upsilon: u32,
    q: u32,
    modulus: Vec<u32>,
    size: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    frob: Vec<u32>,
    inv_frob: Vec<u32>,
    params: Params,
}

impl core::fmt::Debug for Context {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Context")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .field("params", &self.params)
            .finish()
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

// Polynomials over F_p, coefficient vectors low -> high, trimmed.
fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p);
    while r.len() > db {
        let top = r.len() - 1;
        let c = (r[top] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = top - db;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (c as u64 * bi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                cand.push((x % p as u64) as u32);
                x /= p as u64;
            }
            cand.push(1);
            if poly_rem(modulus, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// First monic irreducible polynomial of degree m in lexicographic order of
/// its lower coefficients (read as a base-p number).
pub fn default_modulus(p: u32, m: u32) -> Vec<u32> {
    let count = (p as u64).pow(m);
    for idx in 0..count {
        let mut cand = Vec::with_capacity(m as usize + 1);
        let mut x = idx;
        for _ in 0..m {
            cand.push((x % p as u64) as u32);
            x /= p as u64;
        }
        cand.push(1);
        if is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Context {
    /// Context over F_{p^m} with q = p^upsilon and the default modulus.
    pub fn new(p: u32, m: u32, upsilon: u32) -> Result<Arc<Context>> {
        Self::with_params(p, m, upsilon, None, Params::default())
    }

    /// Fully specified constructor. `modulus` is low-to-high and must be
    /// monic of degree m.
    pub fn with_params(
        p: u32,
        m: u32,
        upsilon: u32,
        modulus: Option<Vec<u32>>,
        params: Params,
    ) -> Result<Arc<Context>> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(alloc::format!("p={p} is not prime")));
        }
        if m == 0 || upsilon == 0 || !m.is_multiple_of(upsilon) {
            return Err(Error::InvalidParameter(alloc::format!(
                "need upsilon | m with m, upsilon >= 1 (m={m}, upsilon={upsilon})"
            )));
        }
        let size = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if size > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge { size });
        }
        if params.precision < 1 {
            return Err(Error::InvalidParameter("precision must be positive".into()));
        }
        let modulus = match modulus {
            Some(v) => {
                if v.len() != m as usize + 1 || v[m as usize] != 1 || v.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidParameter(
                        "modulus must be monic of degree m with digits < p".into(),
                    ));
                }
                if !is_irreducible(&v, p) {
                    return Err(Error::ReducibleModulus);
                }
                v
            }
            None => default_modulus(p, m),
        };
        let size = size as u32;
        let q = p.pow(upsilon);
        let mut ctx = Context {
            p,
            m,
            upsilon,
            q,
            modulus,
            size,
            exp: Vec::new(),
            log: Vec::new(),
            frob: Vec::new(),
            inv_frob: Vec::new(),
            params,
        };
        ctx.build_tables();
        Ok(Arc::new(ctx))
    }

    fn digits(&self, a: u32) -> Vec<u32> {
        let mut d = vec![0u32; self.m as usize];
        let mut x = a;
        for slot in d.iter_mut() {
            *slot = x % self.p;
            x /= self.p;
        }
        d
    }

    fn encode(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u32; da.len() + db.len()];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % self.p as u64) as u32;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.m as usize, 0);
        self.encode(&r)
    }

    fn build_tables(&mut self) {
        let order = self.size - 1;
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; self.size as usize];
        if order == 1 {
            exp[0] = 1;
            exp[1] = 1;
        } else {
            for g in 2..self.size {
                let mut x = 1u32;
                let mut ok = true;
                for k in 0..order {
                    if k > 0 && x == 1 {
                        ok = false;
                        break;
                    }
                    exp[k as usize] = x;
                    x = self.slow_mul(x, g);
                }
                if ok && x == 1 {
                    break;
                }
            }
            for k in 0..order as usize {
                exp[k + order as usize] = exp[k];
            }
        }
        for k in 0..order {
            log[exp[k as usize] as usize] = k;
        }
        self.exp = exp;
        self.log = log;
        let q = self.q as u64;
        // x -> x^{p^m / q} inverts x -> x^q
        let inv_e = (self.size as u64) / q;
        let mut frob = vec![0u32; self.size as usize];
        let mut inv_frob = vec![0u32; self.size as usize];
        for a in 1..self.size {
            let l = self.log[a as usize] as u64;
            frob[a as usize] = self.exp[((l * q) % order as u64) as usize];
            inv_frob[a as usize] = self.exp[((l * inv_e) % order as u64) as usize];
        }
        self.frob = frob;
        self.inv_frob = inv_frob;
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn upsilon(&self) -> u32 {
        self.upsilon
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn size(&self) -> u32 {
        self.size
    }
    pub fn params(&self) -> Params {
        self.params
    }

    /// Same field, different precision parameters.
    pub fn with_new_params(&self, params: Params) -> Result<Arc<Context>> {
        Context::with_params(self.p, self.m, self.upsilon, Some(self.modulus.clone()), params)
    }

    /// q^e as i64.
    pub fn q_pow(&self, e: u32) -> i64 {
        (self.q as i64).pow(e)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut r = 0u32;
        let mut place = 1u32;
        while x > 0 || y > 0 {
            r += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        Fe(r)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        let mut x = a.0;
        let mut r = 0u32;
        let mut place = 1u32;
        while x > 0 {
            r += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        Fe(r)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let l = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fe(self.exp[l as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        let order = self.size - 1;
        let l = self.log[a.0 as usize];
        Some(Fe(self.exp[((order - l) % order) as usize]))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let order = (self.size - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l * (e % order)) % order) as usize])
    }

    /// a^q.
    #[inline]
    pub fn frob(&self, a: Fe) -> Fe {
        Fe(self.frob[a.0 as usize])
    }

    /// The unique b with b^q = a.
    #[inline]
    pub fn inv_frob(&self, a: Fe) -> Fe {
        Fe(self.inv_frob[a.0 as usize])
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    /// Element from its coefficient digits in the basis 1, y, y^2, ...
    pub fn from_digits(&self, d: &[u32]) -> Result<Fe> {
        if d.len() > self.m as usize || d.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidParameter("bad field element digits".into()));
        }
        Ok(Fe(self.encode(d)))
    }

    pub fn to_digits(&self, a: Fe) -> Vec<u32> {
        self.digits(a.0)
    }

    /// True for elements of the subfield F_q.
    pub fn in_fq(&self, a: Fe) -> bool {
        self.frob(a) == a
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.size).map(Fe)
    }

    /// The q elements of F_q, in increasing encoding order.
    pub fn fq_elements(&self) -> Vec<Fe> {
        self.elements().filter(|&a| self.in_fq(a)).collect()
    }

    /// Human readable element: digits as a polynomial in `w`.
    pub fn format(&self, a: Fe) -> String {
        if self.m == 1 {
            return alloc::format!("{}", a.0);
        }
        let d = self.digits(a.0);
        let mut s = String::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !s.is_empty() {
                s.push('+');
            }
            match (i, c) {
                (0, c) => {
                    let _ = write!(s, "{c}");
                }
                (1, 1) => s.push('w'),
                (1, c) => {
                    let _ = write!(s, "{c}w");
                }
                (i, 1) => {
                    let _ = write!(s, "w^{i}");
                }
                (i, c) => {
                    let _ = write!(s, "{c}w^{i}");
                }
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_arithmetic() {
        let ctx = Context::new(2, 2, 1).unwrap();
        assert_eq!(ctx.modulus(), &[1, 1, 1]);
        let w = Fe(2);
        // w^2 = w + 1
        assert_eq!(ctx.mul(w, w), Fe(3));
        for a in ctx.elements() {
            assert_eq!(ctx.pow(a, 4), a);
            assert_eq!(ctx.frob(ctx.inv_frob(a)), a);
        }
        assert_eq!(ctx.fq_elements(), vec![Fe(0), Fe(1)]);
    }

    #[test]
    fn odd_characteristic() {
        let ctx = Context::new(3, 2, 1).unwrap();
        for a in ctx.elements() {
            assert_eq!(ctx.add(a, ctx.neg(a)), Fe::ZERO);
            if let Some(b) = ctx.inv(a) {
                assert_eq!(ctx.mul(a, b), Fe::ONE);
            }
            assert_eq!(ctx.pow(a, 9), a);
        }
        assert_eq!(ctx.fq_elements().len(), 3);
    }

    #[test]
    fn q_larger_than_p() {
        let ctx = Context::new(2, 4, 2).unwrap();
        assert_eq!(ctx.q(), 4);
        assert_eq!(ctx.fq_elements().len(), 4);
        for a in ctx.elements() {
            assert_eq!(ctx.frob(ctx.inv_frob(a)), a);
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        let r = Context::with_params(2, 2, 1, Some(vec![1, 0, 1]), Params::default());
        assert_eq!(r.unwrap_err(), Error::ReducibleModulus);
        assert!(Context::new(4, 1, 1).is_err());
        assert!(Context::new(2, 3, 2).is_err());
    }
}
