//! Hypergeometric functions, the logarithm analog l_1 and its branches,
//! polylogarithms, zeta values and the A_{n,r} coefficients.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::artin::{artin_schreier_small, constant_artin_schreier};
use crate::carlitz::{CarlitzExpansion, Quantities};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::linear::FqLinear;
use crate::operators::{apply_operator, carlitz_action, BasisAction, Operator};
use crate::series::{Series, Valuation};

/// (a)_n: D_{n+a-1}^{q^{-(a-1)}} for a >= 1, L_{-a-n}^{-q^n} for a <= 0 and
/// n <= -a, zero otherwise.
pub fn pochhammer(tables: &Quantities, a: i64, n: usize) -> Result<Series> {
    if a >= 1 {
        let d = tables.d(n + a as usize - 1);
        d.frob_signed(-(a - 1))
    } else if (n as i64) <= -a {
        let l = tables.l((-a) as usize - n).frob_pow(n as u32);
        Series::one(tables.ctx()).div(&l)
    } else {
        Ok(Series::zero(tables.ctx()))
    }
}

/// Cached (a)_0, (a)_1, ... for one integer parameter.
#[derive(Clone, Debug)]
pub struct Pochhammer {
    a: i64,
    values: Vec<Series>,
}

impl Pochhammer {
    pub fn new(tables: &Quantities, a: i64, n: usize) -> Result<Self> {
        let values = (0..=n).map(|i| pochhammer(tables, a, i)).collect::<Result<_>>()?;
        Ok(Pochhammer { a, values })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn get(&self, n: usize) -> Option<&Series> {
        self.values.get(n)
    }

    /// First index with (a)_n = 0, if any.
    pub fn vanishes_from(&self) -> Option<usize> {
        (self.a <= 0).then(|| (-self.a) as usize + 1)
    }
}

/// sum_n (a_1)_n ... (a_r)_n / ((b_1)_n ... (b_s)_n D_n) z^{q^n} through n = N.
///
/// A nonpositive parameter p (upper or lower) ends the sum after n = -p:
/// only those terms are defined and nonzero.
pub fn hypergeometric_series(tables: &Quantities, a: &[i64], b: &[i64], n: usize) -> Result<FqLinear> {
    let stop = a.iter().chain(b).filter(|&&p| p <= 0).map(|&p| (-p) as usize).min();
    let last = stop.map_or(n, |s| s.min(n));
    let mut coeffs = Vec::with_capacity(last + 1);
    for m in 0..=last {
        let mut num = Series::one(tables.ctx());
        for &p in a {
            num = num.mul(&pochhammer(tables, p, m)?);
        }
        let mut den = tables.d(m);
        for &p in b {
            den = den.mul(&pochhammer(tables, p, m)?);
        }
        if den.is_zero() {
            if num.is_zero() {
                break;
            }
            return Err(Error::UndefinedTerm { n: m });
        }
        coeffs.push(num.div(&den)?);
    }
    Ok(match stop {
        Some(s) if s <= n => FqLinear::poly(coeffs),
        _ => FqLinear::truncated(coeffs),
    })
}

fn minus_const(tables: &Quantities, u: &FqLinear, k: i64) -> Result<FqLinear> {
    let du = apply_operator(tables, &Operator::Delta, u)?;
    Ok(du.sub(&u.scale_series(&tables.bracket_signed(k)?)))
}

/// (Delta - [-a])(Delta - [-b]) y - d (Delta - [1-c]) y.
pub fn hypergeom_operator_residual(
    tables: &Quantities,
    a: i64,
    b: i64,
    c: i64,
    y: &FqLinear,
) -> Result<FqLinear> {
    let lhs = minus_const(tables, &minus_const(tables, y, -b)?, -a)?;
    let rhs = apply_operator(tables, &Operator::D, &minus_const(tables, y, 1 - c)?)?;
    let r = lhs.sub(&rhs);
    Ok(if y.is_truncated() { r.truncate_order(rhs.len()) } else { r })
}

/// Residual of the hypergeometric equation on 2F1(a,b;c;z) through t^{q^{N-1}}.
pub fn hypergeom_equation_residual(
    tables: &Quantities,
    a: i64,
    b: i64,
    c: i64,
    n: usize,
) -> Result<FqLinear> {
    let y = hypergeometric_series(tables, &[a, b], &[c], n)?;
    hypergeom_operator_residual(tables, a, b, c, &y)
}

/// d_s lF_lambda(-k; -nu; s) against the all-shifted function, or against
/// zero when some parameter is zero.
pub fn contiguous_shift_check(tables: &Quantities, k: &[u64], nu: &[u64]) -> Result<bool> {
    let neg = |v: &[u64], shift: i64| -> Vec<i64> { v.iter().map(|&p| shift - p as i64).collect() };
    let horizon = k.iter().chain(nu).copied().min().unwrap_or(0) as usize + 1;
    let f = hypergeometric_series(tables, &neg(k, 0), &neg(nu, 0), horizon)?;
    let lhs = apply_operator(tables, &Operator::D, &f)?;
    if k.iter().chain(nu).any(|&p| p == 0) {
        return Ok(lhs.coeffs().iter().all(Series::is_zero));
    }
    let rhs = hypergeometric_series(tables, &neg(k, 1), &neg(nu, 1), horizon)?;
    Ok(lhs.eq_to_precision(&rhs))
}

/// One continuous extension of l_1, labelled by its root c_1 of c^q - c + 1 = 0.
#[derive(Clone, Debug)]
pub struct L1Branch {
    pub root: Fe,
    pub expansion: CarlitzExpansion,
}

/// c_0 = sum_{i>=1} (-1)^{i+1} c_i / L_i over the known coefficients, with
/// precision capped at the size of the first omitted term.
fn close_constant(tables: &Quantities, c: &[Series]) -> Result<Series> {
    let ctx = tables.ctx();
    let mut acc = Series::zero(ctx);
    for (i, ci) in c.iter().enumerate().skip(1) {
        let sign = if i % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&ci.mul(&Series::from_int(ctx, sign)).div(&tables.l(i))?);
    }
    let n = c.len();
    match c.last().map(|x| x.valuation_bound()) {
        Some(Valuation::Finite(v)) => Ok(acc.truncate(v - Ratio::from_integer(n as i64))),
        _ => Ok(acc),
    }
}

/// The q branches of the continuous extension of l_1, through index N.
///
/// c_1 runs over the roots of c^q - c + 1 = 0 and
/// c_{i+1}^{1/q} - c_{i+1} = [i] c_i selects the small solution.
pub fn l1_branches(tables: &Quantities, n: usize) -> Result<Vec<L1Branch>> {
    let ctx = tables.ctx();
    let roots = constant_artin_schreier(ctx, ctx.neg(Fe::ONE))?;
    if roots.is_empty() {
        return Err(Error::MissingRoots("c^q - c + 1 has no roots in the constant field".into()));
    }
    roots
        .into_iter()
        .map(|root| {
            let mut c = vec![Series::zero(ctx), Series::constant(ctx, root)];
            for i in 1..n.max(1) {
                let v = tables.bracket(i).mul(&c[i]);
                c.push(artin_schreier_small(&v)?);
            }
            let mut tail = c.clone();
            let v = tables.bracket(n.max(1)).mul(&c[n.max(1)]);
            tail.push(artin_schreier_small(&v)?);
            c[0] = close_constant(tables, &tail)?;
            c.truncate(n + 1);
            Ok(L1Branch { root, expansion: CarlitzExpansion::truncated(c) })
        })
        .collect()
}

/// The next polylogarithm: Delta l_n = l_{n-1}, so c_1 = v_0 and
/// c_{j+1} = v_j - [j] c_j, with c_0 fixed by the L_i relation.
pub fn polylog_next(tables: &Quantities, prev: &CarlitzExpansion) -> Result<CarlitzExpansion> {
    let ctx = tables.ctx();
    let v = prev.coeffs();
    if v.is_empty() {
        return Err(Error::TruncationExhausted("empty expansion".into()));
    }
    let mut c = vec![Series::zero(ctx), v[0].clone()];
    for j in 1..v.len() {
        let next = v[j].sub(&tables.bracket(j).mul(&c[j]));
        c.push(next);
    }
    c[0] = close_constant(tables, &c)?;
    c.truncate(v.len());
    Ok(CarlitzExpansion::truncated(c))
}

/// l_n on the chosen branch of l_1.
pub fn polylog(tables: &Quantities, n: usize, branch: &L1Branch) -> Result<CarlitzExpansion> {
    if n == 0 {
        return Err(Error::InvalidParameter("polylog index starts at 1".into()));
    }
    let mut cur = branch.expansion.clone();
    for _ in 1..n {
        cur = polylog_next(tables, &cur)?;
    }
    Ok(cur)
}

/// The analytic part sum_{j>=1} t^{q^j}/[j]^n at |t| < 1, summed until the
/// terms pass the working precision.
pub fn polylog_analytic(tables: &Quantities, n: u32, t: &Series) -> Result<Series> {
    let ctx = tables.ctx();
    let vt = match t.valuation_bound() {
        Valuation::Finite(v) if v > Ratio::from_integer(0) => v,
        Valuation::Infinite => return Ok(Series::zero(ctx)),
        _ => return Err(Error::InvalidParameter("need |t| < 1".into())),
    };
    let m = ctx.params().precision;
    let target = vt * Ratio::from_integer(ctx.q() as i64) + Ratio::from_integer(m);
    let mut acc = Series::zero(ctx);
    let mut tp = t.frob();
    let mut j = 1usize;
    loop {
        let bound = Valuation::Finite(target + Ratio::from_integer(n as i64));
        if tp.valuation_bound() >= bound {
            return Ok(acc.truncate(target));
        }
        acc = acc.add(&tp.div(&tables.bracket(j).pow(n as u64))?);
        tp = tp.frob();
        j += 1;
    }
}

/// Smallest k with v(c_i) >= q^{i-1} - k over the window 1 <= i <= N, i.e.
/// the constant C = q^k in the decay bound. Coefficients that are zero to
/// working precision carry no information and are skipped.
pub fn polylog_decay_exponent(tables: &Quantities, c: &CarlitzExpansion) -> Option<i64> {
    let q = tables.ctx().q() as i64;
    c.coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, ci)| !ci.is_zero())
        .filter_map(|(i, ci)| match ci.valuation_bound() {
            Valuation::Finite(v) => Some(q.pow(i as u32 - 1) - v.floor().to_integer()),
            Valuation::Infinite => None,
        })
        .max()
}

/// zeta values on a fixed branch: zeta(x^{-n}) = l_n(1), zeta(x^m) = (Delta^{m+1} l_1)(1).
#[derive(Clone, Debug)]
pub struct ZetaTable {
    pub branch: Fe,
    /// l_1, ..., l_n
    pub polylogs: Vec<CarlitzExpansion>,
}

impl ZetaTable {
    pub fn new(tables: &Quantities, branch: &L1Branch, max_neg: usize) -> Result<ZetaTable> {
        let mut polylogs = vec![branch.expansion.clone()];
        for _ in 1..max_neg.max(1) {
            let next = polylog_next(tables, polylogs.last().unwrap())?;
            polylogs.push(next);
        }
        Ok(ZetaTable { branch: branch.root, polylogs })
    }

    /// Value at 1 of Delta^j l_n, read off as the f_0 coefficient.
    fn delta_power_at_one(&self, tables: &Quantities, n: usize, j: usize) -> Result<Series> {
        let base = self
            .polylogs
            .get(n - 1)
            .ok_or_else(|| Error::TruncationExhausted("polylog not tabulated".into()))?;
        let mut cur = base.clone();
        for _ in 0..j {
            if cur.len() < 2 {
                return Err(Error::TruncationExhausted("Delta iterations used up the truncation".into()));
            }
            cur = carlitz_action(tables, BasisAction::TauD, &cur)?;
        }
        cur.coeffs()
            .first()
            .cloned()
            .ok_or_else(|| Error::TruncationExhausted("no coefficients left".into()))
    }

    /// zeta(x^e) for any integer e.
    pub fn at_power(&self, tables: &Quantities, e: i64) -> Result<Series> {
        if e < 0 {
            self.delta_power_at_one(tables, (-e) as usize, 0)
        } else {
            self.delta_power_at_one(tables, 1, e as usize + 1)
        }
    }

    /// zeta(t) for a Laurent polynomial t with coefficients in F_q, by
    /// F_q-linearity of alpha -> Delta^{(alpha)}.
    pub fn zeta(&self, tables: &Quantities, t: &Series) -> Result<Series> {
        let ctx = tables.ctx();
        if t.is_exact_zero() {
            return Ok(Series::zero(ctx));
        }
        if !t.is_exact() || t.ram() != 0 {
            return Err(Error::InvalidParameter("zeta needs an exact Laurent polynomial".into()));
        }
        let mut acc = Series::zero(ctx);
        for (e, c) in t.rational_terms() {
            if !ctx.in_fq(c) {
                return Err(Error::InvalidParameter("digits must lie in F_q".into()));
            }
            let v = self.at_power(tables, e.to_integer())?;
            acc = acc.add(&v.scale(c));
        }
        Ok(acc)
    }
}

/// A_{n,r} = (-1)^{n+r} L_{n-1} sum 1/([i_1]...[i_{r-1}]) over
/// 0 < i_1 < ... < i_{r-1} < n, computed as (-1)^{n+r} e_{n-r}([1], ..., [n-1]).
pub fn coefficient_a(tables: &Quantities, n: usize, r: usize) -> Result<Series> {
    if n == 0 || r == 0 || r > n {
        return Err(Error::InvalidParameter("need 1 <= r <= n".into()));
    }
    let ctx = tables.ctx();
    // elementary symmetric polynomials of [1..n-1]
    let mut e = vec![Series::one(ctx)];
    for i in 1..n {
        let b = tables.bracket(i);
        e.push(Series::zero(ctx));
        for k in (1..e.len()).rev() {
            e[k] = e[k].add(&e[k - 1].mul(&b));
        }
    }
    let sign = if (n + r).is_multiple_of(2) { 1 } else { -1 };
    Ok(e[n - r].mul(&Series::from_int(ctx, sign)))
}

/// Valuations of the differences in the zeta identities.
#[derive(Clone, Debug)]
pub struct ZetaIdentityReport {
    /// v(c_i - sum_r A_{i,r} zeta(x^{r-1})) for i = 1..
    pub coefficient: Vec<Valuation>,
    /// v(zeta(x^{-n}) - sum_i (-1)^{i+1} L_i^{-1} sum_r A_{i,r} zeta(x^{r-n})) for n = 1..
    pub functional: Vec<Valuation>,
    /// v(c_i - sum_j z_i^{q^j}) for i = 2..
    pub geometric: Vec<Valuation>,
}

impl ZetaIdentityReport {
    pub fn min_coefficient(&self) -> Valuation {
        self.coefficient.iter().copied().min().unwrap_or(Valuation::Infinite)
    }

    pub fn min_functional(&self) -> Valuation {
        self.functional.iter().copied().min().unwrap_or(Valuation::Infinite)
    }

    pub fn min_geometric(&self) -> Valuation {
        self.geometric.iter().copied().min().unwrap_or(Valuation::Infinite)
    }
}

fn diff_valuation(a: &Series, b: &Series) -> Valuation {
    a.sub(b).valuation_bound()
}

/// sum_{j>=0} z^{q^j} for |z| < 1, by direct summation.
pub fn geometric_frobenius_sum(z: &Series) -> Result<Series> {
    let ctx = z.ctx();
    let vz = match z.valuation_bound() {
        Valuation::Infinite => return Ok(Series::zero(ctx)),
        Valuation::Finite(v) if v > Ratio::from_integer(0) => v,
        _ => return Err(Error::NotSmall { step: None }),
    };
    let target = vz + Ratio::from_integer(ctx.params().precision);
    let mut acc = Series::zero(ctx);
    let mut term = z.clone();
    while term.valuation_bound() < Valuation::Finite(target) {
        acc = acc.add(&term);
        term = term.frob();
    }
    Ok(acc.truncate(target))
}

/// Check the zeta identities: coefficient expansion for i <= imax, the
/// functional equation for n <= nmax summed over i <= N, and the
/// geometric form of c_i for 2 <= i <= imax.
pub fn zeta_identity_checks(
    tables: &Quantities,
    zt: &ZetaTable,
    imax: usize,
    nmax: usize,
) -> Result<ZetaIdentityReport> {
    let l1 = &zt.polylogs[0];
    let n_trunc = l1.len() - 1;
    let mut coefficient = Vec::new();
    for i in 1..=imax.min(n_trunc) {
        let mut s = Series::zero(tables.ctx());
        for r in 1..=i {
            s = s.add(&coefficient_a(tables, i, r)?.mul(&zt.at_power(tables, r as i64 - 1)?));
        }
        coefficient.push(diff_valuation(&l1.coeffs()[i], &s));
    }
    let mut functional = Vec::new();
    for n in 1..=nmax {
        let mut total = Series::zero(tables.ctx());
        // terms with r - n >= 0 consume r - n + 1 Delta steps of l_1
        let top = n_trunc + n - 1;
        for i in 1..=top {
            let mut inner = Series::zero(tables.ctx());
            for r in 1..=i {
                inner = inner
                    .add(&coefficient_a(tables, i, r)?.mul(&zt.at_power(tables, r as i64 - n as i64)?));
            }
            let sign = if i % 2 == 1 { 1 } else { -1 };
            let term = inner.mul(&Series::from_int(tables.ctx(), sign)).div(&tables.l(i))?;
            total = total.add(&term);
        }
        functional.push(diff_valuation(&zt.at_power(tables, -(n as i64))?, &total));
    }
    let mut geometric = Vec::new();
    for i in 2..=imax.min(n_trunc) {
        let z = l1.coeffs()[i - 1].mul(&tables.bracket(i - 1)).frob();
        geometric.push(diff_valuation(&l1.coeffs()[i], &geometric_frobenius_sum(&z)?));
    }
    Ok(ZetaIdentityReport { coefficient, functional, geometric })
}

/// Residual of (1 - tau) d u = t on a Carlitz expansion.
pub fn l1_equation_residual(tables: &Quantities, u: &CarlitzExpansion) -> Result<CarlitzExpansion> {
    let du = carlitz_action(tables, BasisAction::D, u)?;
    let tdu = carlitz_action(tables, BasisAction::QPower, &du)?;
    let ctx = tables.ctx();
    let mut t = vec![Series::zero(ctx); du.len()];
    if let Some(first) = t.first_mut() {
        *first = Series::one(ctx);
    }
    let rhs = CarlitzExpansion::truncated(t);
    Ok(du.add(&tdu.scale(&Series::from_int(ctx, -1))).add(&rhs.scale(&Series::from_int(ctx, -1))))
}
