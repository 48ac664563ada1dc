//! Hyperdifferentiations D_k(x^n) = C(n,k) x^{n-k} and the fractional
//! operator Delta^{(alpha)}.

use num_rational::Ratio;

use crate::carlitz::Quantities;
use crate::error::{Error, Result};
use crate::linear::FqLinear;
use crate::series::{Series, Valuation};

/// C(n, k) mod p via Lucas' theorem.
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..kd {
            c = c * (nd - i) % p;
        }
        for i in 1..=kd {
            c = c * mod_inv(i % p, p) % p;
        }
        acc = acc * c % p;
        n /= p;
        k /= p;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn check_integral(a: &Series) -> Result<()> {
    if a.ram() != 0 || a.valuation_bound() < Valuation::int(0) {
        return Err(Error::InvalidParameter(
            "hyperdifferentiation needs an unramified integral argument".into(),
        ));
    }
    Ok(())
}

/// D_k applied termwise; precision drops by k.
pub fn hyperdiff(k: u64, a: &Series) -> Result<Series> {
    check_integral(a)?;
    let ctx = a.ctx();
    let p = ctx.p() as u64;
    let terms = a.terms().iter().filter_map(|&(n, c)| {
        let n = n as u64;
        if n < k {
            return None;
        }
        let b = binomial_mod_p(n, k, p);
        if b == 0 {
            None
        } else {
            Some(((n - k) as i64, ctx.mul(c, ctx.from_int(b as i64))))
        }
    });
    let prec = a.scaled_prec().map(|pr| pr - k as i64);
    Ok(Series::from_parts(ctx, 0, terms.collect::<alloc::vec::Vec<_>>(), prec))
}

/// The sign-flipped digits sum (-1)^n alpha_n x^n; alpha must have digits in F_q.
pub fn alternate_digits(alpha: &Series) -> Result<Series> {
    check_integral(alpha)?;
    let ctx = alpha.ctx();
    if alpha.terms().iter().any(|&(_, c)| !ctx.in_fq(c)) {
        return Err(Error::InvalidParameter("fractional order needs F_q digits".into()));
    }
    let terms = alpha
        .terms()
        .iter()
        .map(|&(n, c)| (n, if n % 2 == 0 { c } else { ctx.neg(c) }));
    Ok(Series::from_parts(ctx, 0, terms.collect::<alloc::vec::Vec<_>>(), alpha.scaled_prec()))
}

/// Eigenvalue of Delta^{(alpha)} on t^{q^j}: alpha with x replaced by [j].
pub fn fractional_eigenvalue(tables: &Quantities, alpha: &Series, j: usize) -> Result<Series> {
    alternate_digits(alpha)?;
    let ctx = tables.ctx();
    let b = tables.bracket(j);
    let prec = alpha.precision();
    let mut acc = Series::zero(ctx);
    let mut pw = Series::one(ctx);
    let mut last = 0i64;
    for &(n, c) in alpha.terms() {
        let step = b.pow((n - last) as u64);
        pw = pw.mul(&step);
        if let Some(pr) = prec {
            pw = pw.truncate(pr);
        }
        last = n;
        acc = acc.add(&pw.scale(c));
    }
    Ok(match prec {
        // the unknown digits contribute terms of valuation >= P (|[j]| < 1 for
        // j >= 1; for j = 0 only the constant digit survives)
        Some(pr) if j > 0 => acc.truncate(pr),
        _ => acc,
    })
}

/// (Delta^{(alpha)} u)(t) = sum_k (-1)^k D_k(alpha-hat) u(x^k t) for a
/// polynomial u and an integral point t.
pub fn fractional_delta(alpha: &Series, u: &FqLinear, t: &Series) -> Result<Series> {
    let ctx = t.ctx();
    if u.is_truncated() {
        return Err(Error::InvalidParameter("fractional operator needs a polynomial u".into()));
    }
    if t.valuation_bound() < Valuation::int(0) {
        return Err(Error::InvalidParameter("point must lie in O".into()));
    }
    let hat = alternate_digits(alpha)?;
    let known = Series::from_parts(ctx, 0, hat.terms().to_vec(), None);
    let top = known.terms().last().map_or(0, |t| t.0);
    let mut acc = Series::zero(ctx);
    let mut point = t.clone();
    let x = Series::x_pow(ctx, 1);
    for k in 0..=top {
        let dk = hyperdiff(k as u64, &known)?;
        if !dk.is_zero() {
            let term = dk.mul(&u.eval(&point));
            acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        point = point.mul(&x);
    }
    if let Some(p) = alpha.precision() {
        let vt = t.valuation_bound();
        let mut bound = Valuation::Infinite;
        for (j, a) in u.coeffs().iter().enumerate() {
            let (Valuation::Finite(va), Valuation::Finite(vt)) = (a.valuation_bound(), vt) else {
                continue;
            };
            let qj = Ratio::from_integer(ctx.q_pow(j as u32));
            bound = bound.min(Valuation::Finite(va + qj * vt));
        }
        if let Valuation::Finite(b) = bound {
            acc = acc.truncate(p + b);
        }
    }
    Ok(acc)
}

/// Eigenvalue-side Delta^{(alpha)} at a point: sum_j alpha([j]) a_j t^{q^j}.
pub fn fractional_delta_eigen(
    tables: &Quantities,
    alpha: &Series,
    u: &FqLinear,
    t: &Series,
) -> Result<Series> {
    let mut acc = Series::zero(tables.ctx());
    let mut tp = t.clone();
    for (j, a) in u.coeffs().iter().enumerate() {
        acc = acc.add(&fractional_eigenvalue(tables, alpha, j)?.mul(a).mul(&tp));
        tp = tp.frob();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Context;

    #[test]
    fn lucas() {
        assert_eq!(binomial_mod_p(2, 1, 2), 0);
        assert_eq!(binomial_mod_p(3, 1, 2), 1);
        assert_eq!(binomial_mod_p(10, 3, 3), 120 % 3);
        assert_eq!(binomial_mod_p(7, 3, 5), 35 % 5);
        assert_eq!(binomial_mod_p(2, 5, 3), 0);
    }

    #[test]
    fn hyperdiff_examples() {
        let ctx = Context::new(2, 1, 1).unwrap();
        let x3 = Series::x_pow(&ctx, 3);
        assert_eq!(hyperdiff(0, &x3).unwrap(), x3);
        assert!(hyperdiff(1, &Series::x_pow(&ctx, 2)).unwrap().is_exact_zero());
        assert_eq!(hyperdiff(1, &x3).unwrap(), Series::x_pow(&ctx, 2));
        assert!(hyperdiff(1, &Series::one(&ctx)).unwrap().is_exact_zero());
    }
}
