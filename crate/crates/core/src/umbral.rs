//! Umbral calculus for F_q-linear polynomials: K-binomial coefficients,
//! delta operators given by their eigenvalues on t^{q^j}, basic
//! sequences, the Taylor formula and orthonormal expansions.
//!
//! Linear invariant operators commute with every multiplicative shift
//! t -> lambda t, so they act diagonally on the monomials t^{q^j} and are
//! stored as eigenvalue lists.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::carlitz::{fq_polys_below, Quantities};
use crate::error::{Error, Result};
use crate::linear::FqLinear;
use crate::operators::delta_n_eigenvalue;
use crate::series::{Series, Valuation};

/// D_i / (D_n D_{i-n}^{q^n}), a polynomial in x.
pub fn kbinom(tables: &Quantities, i: usize, n: usize) -> Result<Series> {
    if n > i {
        return Ok(Series::zero(tables.ctx()));
    }
    let den = tables.d(n).mul(&tables.d(i - n).frob_pow(n as u32));
    tables.d(i).div(&den)
}

/// Rows 0..=imax of K-binomial coefficients.
#[derive(Clone, Debug)]
pub struct KBinom {
    rows: Vec<Vec<Series>>,
}

impl KBinom {
    pub fn new(tables: &Quantities, imax: usize) -> Result<KBinom> {
        let rows = (0..=imax)
            .map(|i| (0..=i).map(|n| kbinom(tables, i, n)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(KBinom { rows })
    }

    pub fn get(&self, i: usize, n: usize) -> Option<&Series> {
        self.rows.get(i).and_then(|r| r.get(n))
    }

    pub fn rows(&self) -> &[Vec<Series>] {
        &self.rows
    }

    /// Every entry is an exact polynomial of valuation 0 (a unit at x).
    pub fn all_units(&self) -> bool {
        self.rows.iter().flatten().all(|b| {
            b.is_exact() && b.valuation() == Valuation::int(0) && b.is_fq_polynomial()
        })
    }
}

/// binom(k,m) = binom(k-1,m-1)^q + binom(k-1,m)^q D_m^{q-1} for all m <= k.
pub fn pascal_check(tables: &Quantities, k: usize) -> Result<bool> {
    if k == 0 {
        return Ok(kbinom(tables, 0, 0)? == Series::one(tables.ctx()));
    }
    let q = tables.ctx().q() as u64;
    for m in 0..=k {
        let left = if m == 0 { Series::zero(tables.ctx()) } else { kbinom(tables, k - 1, m - 1)?.frob() };
        let right = kbinom(tables, k - 1, m)?.frob().mul(&tables.d(m).pow(q - 1));
        if kbinom(tables, k, m)? != left.add(&right) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A delta operator tau^{-1} delta_0, with delta_0 t^{q^j} = mu_j t^{q^j}.
#[derive(Clone, Debug)]
pub struct DeltaOperator {
    mu: Vec<Series>,
    /// coefficients sigma_l of delta_0 = sum sigma_l Delta^{(l)}, when known
    sigma: Option<Vec<Series>>,
}

impl DeltaOperator {
    /// The Carlitz derivative d: mu_j = [j].
    pub fn carlitz(tables: &Quantities, n: usize) -> DeltaOperator {
        let ctx = tables.ctx();
        let mut sigma = vec![Series::zero(ctx); n + 1];
        if n >= 1 {
            sigma[1] = Series::one(ctx);
        }
        DeltaOperator { mu: (0..=n).map(|j| tables.bracket(j)).collect(), sigma: Some(sigma) }
    }

    /// From eigenvalues directly; mu_0 = 0 and mu_j != 0 otherwise.
    pub fn from_eigenvalues(mu: Vec<Series>) -> Result<DeltaOperator> {
        check_mu(&mu)?;
        Ok(DeltaOperator { mu, sigma: None })
    }

    pub fn mu(&self) -> &[Series] {
        &self.mu
    }

    pub fn sigma(&self) -> Option<&[Series]> {
        self.sigma.as_deref()
    }

    /// Largest index with a known eigenvalue.
    pub fn order(&self) -> usize {
        self.mu.len() - 1
    }

    /// Eigenvalue of delta_0^{(l)} = tau^l delta^l on t^{q^j}:
    /// mu_j mu_{j-1}^q ... mu_{j-l+1}^{q^{l-1}}.
    pub fn nu(&self, j: usize, l: usize) -> Series {
        let ctx = self.mu[0].ctx();
        if l > j {
            return Series::zero(ctx);
        }
        (0..l).fold(Series::one(ctx), |acc, k| acc.mul(&self.mu[j - k].frob_pow(k as u32)))
    }

    /// delta u = (delta_0 u)^{1/q} on a polynomial.
    pub fn apply(&self, u: &FqLinear) -> Result<FqLinear> {
        let c = u
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, a)| self.eigen(j)?.mul(a).qth_root())
            .collect::<Result<Vec<_>>>()?;
        Ok(FqLinear::poly(c))
    }

    /// Apply delta_0^{(l)} diagonally.
    pub fn apply_power(&self, l: usize, u: &FqLinear) -> Result<FqLinear> {
        let c = u
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, a)| {
                self.eigen(j)?;
                Ok(self.nu(j, l).mul(a))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FqLinear::poly(c))
    }

    fn eigen(&self, j: usize) -> Result<&Series> {
        self.mu
            .get(j)
            .ok_or_else(|| Error::TruncationExhausted("eigenvalue index past the known range".into()))
    }
}

fn check_mu(mu: &[Series]) -> Result<()> {
    match mu.first() {
        None => return Err(Error::InvalidParameter("empty eigenvalue list".into())),
        Some(m0) if !m0.is_zero() => {
            return Err(Error::InvalidParameter("delta_0 must kill t".into()))
        }
        _ => {}
    }
    if let Some(n) = mu.iter().skip(1).position(Series::is_zero) {
        return Err(Error::NotDeltaOperator { n: n + 1 });
    }
    Ok(())
}

/// S_n = sum_{l=1}^n sigma_l / D_{n-l}^{q^l}.
pub fn s_value(tables: &Quantities, sigma: &[Series], n: usize) -> Result<Series> {
    let mut acc = Series::zero(tables.ctx());
    for l in 1..=n.min(sigma.len().saturating_sub(1)) {
        acc = acc.add(&sigma[l].div(&tables.d(n - l).frob_pow(l as u32))?);
    }
    Ok(acc)
}

/// delta_0 = sum_{l>=1} sigma_l Delta^{(l)} (sigma indexed from 0, sigma_0 = 0),
/// with mu_n = D_n S_n = sum_l sigma_l [n][n-1]^q ... [n-l+1]^{q^{l-1}}.
pub fn delta_from_sigma(tables: &Quantities, sigma: &[Series], n: usize) -> Result<DeltaOperator> {
    if sigma.len() <= n {
        return Err(Error::InvalidParameter("sigma list shorter than N + 1".into()));
    }
    if !sigma[0].is_zero() {
        return Err(Error::InvalidParameter("sigma_0 must vanish for a delta operator".into()));
    }
    let mu: Vec<Series> = (0..=n)
        .map(|j| {
            (1..=j).fold(Series::zero(tables.ctx()), |acc, l| {
                acc.add(&sigma[l].mul(&delta_n_eigenvalue(tables, l, j)))
            })
        })
        .collect();
    check_mu(&mu)?;
    Ok(DeltaOperator { mu, sigma: Some(sigma[..=n].to_vec()) })
}

/// The basic sequence P_0, ..., P_N of a delta operator.
#[derive(Clone, Debug)]
pub struct BasicSequence {
    p: Vec<FqLinear>,
}

impl BasicSequence {
    pub fn polys(&self) -> &[FqLinear] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Q_n = P_n / D_n.
    pub fn normalized(&self, tables: &Quantities) -> Result<Vec<FqLinear>> {
        self.p
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let d = tables.d(n);
                p.try_map(|c| c.div(&d))
            })
            .collect()
    }
}

/// P_0 = t; b_{n,j} = [n] b_{n-1,j-1}^q / mu_j for j >= 1 and
/// b_{n,0} = -sum_{j>=1} b_{n,j}, so that P_n(1) = 0.
pub fn basic_sequence(tables: &Quantities, delta: &DeltaOperator, n: usize) -> Result<BasicSequence> {
    let ctx = tables.ctx();
    if n > delta.order() {
        return Err(Error::TruncationExhausted("delta operator known to lower order".into()));
    }
    let mut p = vec![FqLinear::poly(vec![Series::one(ctx)])];
    for i in 1..=n {
        let prev = p[i - 1].coeffs();
        let mut c = vec![Series::zero(ctx); i + 1];
        let bi = tables.bracket(i);
        for j in 1..=i {
            let below = prev.get(j - 1).cloned().unwrap_or_else(|| Series::zero(ctx));
            c[j] = bi.mul(&below.frob()).div(&delta.mu[j])?;
        }
        c[0] = c[1..].iter().fold(Series::zero(ctx), |acc, x| acc.sub(x));
        p.push(FqLinear::poly(c));
    }
    Ok(BasicSequence { p })
}

/// A polynomial in two variables, F_q-linear in each: (j_s, j_t) -> coefficient
/// of s^{q^{j_s}} t^{q^{j_t}}.
pub type Bivariate = BTreeMap<(usize, usize), Series>;

fn bi_add(acc: &mut Bivariate, key: (usize, usize), v: Series) {
    if v.is_exact_zero() {
        return;
    }
    match acc.remove(&key) {
        Some(old) => {
            let s = old.add(&v);
            acc.insert(key, s);
        }
        None => {
            acc.insert(key, v);
        }
    }
}

/// f(st) as a bivariate polynomial.
pub fn at_product(f: &FqLinear) -> Bivariate {
    let mut out = Bivariate::new();
    for (j, a) in f.coeffs().iter().enumerate() {
        bi_add(&mut out, (j, j), a.clone());
    }
    out
}

/// g(s) h(t).
pub fn outer(g: &FqLinear, h: &FqLinear) -> Bivariate {
    let mut out = Bivariate::new();
    for (a, ga) in g.coeffs().iter().enumerate() {
        for (b, hb) in h.coeffs().iter().enumerate() {
            bi_add(&mut out, (a, b), ga.mul(hb));
        }
    }
    out
}

/// Every coefficient of a - b is zero to precision.
pub fn bivariate_eq(a: &Bivariate, b: &Bivariate) -> bool {
    let keys: alloc::collections::BTreeSet<_> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter().all(|k| match (a.get(&k), b.get(&k)) {
        (Some(x), Some(y)) => x.eq_to_precision(y),
        (Some(x), None) | (None, Some(x)) => x.is_zero(),
        (None, None) => true,
    })
}

fn frob_poly(f: &FqLinear, k: usize) -> FqLinear {
    (0..k).fold(f.clone(), |acc, _| acc.frob())
}

/// u_i(st) = sum_n binom(i,n)_K u_n(t) u_{i-n}(s)^{q^n}.
pub fn binomial_type_check(tables: &Quantities, u: &[FqLinear], i: usize) -> Result<bool> {
    let mut rhs = Bivariate::new();
    for n in 0..=i {
        let b = kbinom(tables, i, n)?;
        let s_part = frob_poly(&u[i - n], n).scale_series(&b);
        for (k, v) in outer(&s_part, &u[n]) {
            bi_add(&mut rhs, k, v);
        }
    }
    Ok(bivariate_eq(&at_product(&u[i]), &rhs))
}

/// Q_i(st) = sum_n Q_n(t) Q_{i-n}(s)^{q^n}.
pub fn normalized_binomial_check(q: &[FqLinear], i: usize) -> bool {
    let mut rhs = Bivariate::new();
    for n in 0..=i {
        for (k, v) in outer(&frob_poly(&q[i - n], n), &q[n]) {
            bi_add(&mut rhs, k, v);
        }
    }
    bivariate_eq(&at_product(&q[i]), &rhs)
}

/// delta_0^{(l)} P_j = (D_j / D_{j-l}^{q^l}) P_{j-l}^{q^l} for l <= j.
pub fn lowering_check(tables: &Quantities, delta: &DeltaOperator, seq: &BasicSequence, j: usize, l: usize) -> Result<bool> {
    let lhs = delta.apply_power(l, &seq.p[j])?;
    let factor = tables.d(j).div(&tables.d(j - l).frob_pow(l as u32))?;
    let rhs = frob_poly(&seq.p[j - l], l).scale_series(&factor);
    Ok(lhs.eq_to_precision(&rhs))
}

/// tau^l delta^l applied literally agrees with the diagonal eigenvalues.
pub fn nu_certificate(delta: &DeltaOperator, f: &FqLinear, l: usize) -> Result<bool> {
    let mut cur = f.clone();
    for _ in 0..l {
        cur = delta.apply(&cur)?;
    }
    let direct = frob_poly(&cur, l);
    Ok(direct.eq_to_precision(&delta.apply_power(l, f)?))
}

/// Generalized Taylor formula: the functionals (delta_0^{(l)} f)(s)/D_l, and
/// whether f(st) = sum_l those times P_l(t) holds as a bivariate identity.
pub fn taylor_expand(
    tables: &Quantities,
    f: &FqLinear,
    delta: &DeltaOperator,
    seq: &BasicSequence,
) -> Result<(Vec<FqLinear>, bool)> {
    let n = f.len().saturating_sub(1);
    if n >= seq.len() {
        return Err(Error::TruncationExhausted("basic sequence too short for deg f".into()));
    }
    let mut parts = Vec::with_capacity(n + 1);
    let mut rhs = Bivariate::new();
    for l in 0..=n {
        let d = tables.d(l);
        let g = delta.apply_power(l, f)?.try_map(|c| c.div(&d))?;
        for (k, v) in outer(&g, &seq.p[l]) {
            bi_add(&mut rhs, k, v);
        }
        parts.push(g);
    }
    let ok = bivariate_eq(&at_product(f), &rhs);
    Ok((parts, ok))
}

/// sigma_l = (T P_l)(1) / D_l for T with eigenvalues `eig` on t^{q^j}.
pub fn operator_expand(tables: &Quantities, eig: &[Series], seq: &BasicSequence, n: usize) -> Result<Vec<Series>> {
    if n >= seq.len() || n >= eig.len() {
        return Err(Error::TruncationExhausted("expansion order beyond the data".into()));
    }
    (0..=n)
        .map(|l| {
            let at_one = seq.p[l]
                .coeffs()
                .iter()
                .enumerate()
                .fold(Series::zero(tables.ctx()), |acc, (j, b)| acc.add(&b.mul(&eig[j])));
            at_one.div(&tables.d(l))
        })
        .collect()
}

/// Eigenvalues of sum_l sigma_l delta_0^{(l)} on t^{q^j}, j <= N.
pub fn synthesize(delta: &DeltaOperator, sigma: &[Series], n: usize) -> Vec<Series> {
    (0..=n)
        .map(|j| {
            sigma.iter().enumerate().take(j + 1).fold(Series::zero(sigma[0].ctx()), |acc, (l, s)| {
                acc.add(&s.mul(&delta.nu(j, l)))
            })
        })
        .collect()
}

/// Coefficients psi_n = (delta_0^{(n)} f)(1) and the norm comparison.
#[derive(Clone, Debug)]
pub struct OrthoReport {
    pub psi: Vec<Series>,
    /// sum psi_n Q_n reproduces f
    pub reconstructs: bool,
    /// min_n v(psi_n), i.e. -log_q max |psi_n|
    pub psi_valuation: Valuation,
    /// min v(f(t)) over sampled t in F_q[x] of degree <= 4
    pub sampled_valuation: Valuation,
    /// |sigma_1| = 1 and |sigma_l| <= 1
    pub theorem_applies: bool,
}

pub fn orthonormal_expand(
    tables: &Quantities,
    f: &FqLinear,
    delta: &DeltaOperator,
    seq: &BasicSequence,
) -> Result<OrthoReport> {
    let ctx = tables.ctx();
    let n = f.len().saturating_sub(1);
    if n >= seq.len() {
        return Err(Error::TruncationExhausted("basic sequence too short for deg f".into()));
    }
    let psi: Vec<Series> = (0..=n)
        .map(|l| {
            let g = delta.apply_power(l, f)?;
            Ok(g.coeffs().iter().fold(Series::zero(ctx), |acc, c| acc.add(c)))
        })
        .collect::<Result<_>>()?;
    let q = seq.normalized(tables)?;
    let mut rebuilt = FqLinear::poly(vec![]);
    for (p, qn) in psi.iter().zip(&q) {
        rebuilt = rebuilt.add(&qn.scale_series(p));
    }
    let reconstructs = rebuilt.eq_to_precision(f);
    let psi_valuation = psi.iter().map(Series::valuation_bound).min().unwrap_or(Valuation::Infinite);
    let sampled_valuation = fq_polys_below(ctx, 5)
        .iter()
        .map(|t| f.eval(t).valuation_bound())
        .min()
        .unwrap_or(Valuation::Infinite);
    let theorem_applies = match delta.sigma() {
        Some(s) if s.len() > 1 => {
            s[1].valuation_bound() == Valuation::int(0)
                && s[2..].iter().all(|x| x.valuation_bound() >= Valuation::int(0))
        }
        _ => false,
    };
    Ok(OrthoReport { psi, reconstructs, psi_valuation, sampled_valuation, theorem_applies })
}
