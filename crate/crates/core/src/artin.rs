//! Artin–Schreier equations: z^{1/q} - z = v for small v, and c^q - c = a
//! over the constant field.

use alloc::vec::Vec;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{Context, Fe};
use crate::series::{Series, Valuation};

/// The small solution z0 = sum_{j>=1} v^{q^j} of z^{1/q} - z = v, |z0| <= |v|.
///
/// Requires v(v) > 0. The sum is taken until the next term falls below the
/// working precision, which is q*v(v) plus the relative precision.
pub fn artin_schreier_small(v: &Series) -> Result<Series> {
    let ctx = v.ctx().clone();
    if v.is_exact_zero() {
        return Ok(Series::zero(&ctx));
    }
    let val = match v.valuation_bound() {
        Valuation::Finite(r) => r,
        Valuation::Infinite => return Ok(Series::zero(&ctx)),
    };
    if val <= Ratio::from_integer(0) {
        return Err(Error::NotSmall { step: None });
    }
    let q = Ratio::from_integer(ctx.q() as i64);
    let mut target = val * q + Ratio::from_integer(ctx.params().precision);
    if let Some(p) = v.precision() {
        target = target.min(p * q);
    }
    let mut acc_terms = Series::zero(&ctx);
    let mut term = v.frob();
    loop {
        let bound = term.valuation_bound();
        if bound >= Valuation::Finite(target) {
            break;
        }
        acc_terms = acc_terms.add(&term.truncate(target));
        term = term.frob();
    }
    Ok(acc_terms.truncate(target))
}

/// All solutions z0 + c, c in F_q, of z^{1/q} - z = v.
pub fn artin_schreier_solutions(v: &Series) -> Result<Vec<Series>> {
    let z0 = artin_schreier_small(v)?;
    let ctx = v.ctx().clone();
    Ok(ctx
        .fq_elements()
        .into_iter()
        .map(|c| z0.add(&Series::constant(&ctx, c)))
        .collect())
}

/// All c in the constant field with c^q - c = a (empty or exactly q of them).
pub fn constant_artin_schreier(ctx: &Context, a: Fe) -> Result<Vec<Fe>> {
    let size = ctx.size();
    if size > 1 << 20 {
        return Err(Error::FieldTooLarge { size: size as u64 });
    }
    Ok(ctx
        .elements()
        .filter(|&c| ctx.sub(ctx.frob(c), c) == a)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_solution_for_x() {
        let ctx = Context::new(2, 1, 1).unwrap();
        let x = Series::x_pow(&ctx, 1);
        let z = artin_schreier_small(&x).unwrap();
        for k in 0..6 {
            let e = 1i64 << k;
            let expect = if k >= 1 { Fe::ONE } else { Fe::ZERO };
            assert_eq!(z.coeff(e.into()), Some(expect));
        }
        let resid = z.qth_root().unwrap().sub(&z).sub(&x);
        assert!(resid.is_zero());
        assert_eq!(artin_schreier_solutions(&x).unwrap().len(), 2);
    }

    #[test]
    fn zero_and_large_inputs() {
        let ctx = Context::new(3, 1, 1).unwrap();
        assert!(artin_schreier_small(&Series::zero(&ctx)).unwrap().is_exact_zero());
        assert!(artin_schreier_small(&Series::one(&ctx)).is_err());
    }

    #[test]
    fn constant_equation() {
        let f4 = Context::new(2, 2, 1).unwrap();
        let sols = constant_artin_schreier(&f4, Fe::ONE).unwrap();
        assert_eq!(sols.len(), 2);
        for c in &sols {
            assert!(!f4.in_fq(*c));
        }
        let f2 = Context::new(2, 1, 1).unwrap();
        assert!(constant_artin_schreier(&f2, Fe::ONE).unwrap().is_empty());
        assert_eq!(constant_artin_schreier(&f2, Fe::ZERO).unwrap().len(), 2);
    }
}
