//! Carlitz differential equations: regular systems, formal solutions of
//! higher-order scalar equations, the power function, regular-singular
//! systems and the singular hypergeometric recursion.

use alloc::vec;
use alloc::vec::Vec;

use crate::artin::{artin_schreier_small, artin_schreier_solutions};
use crate::carlitz::{CarlitzExpansion, Quantities};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::linear::FqLinear;
use crate::matrix::Matrix;
use crate::operators::{apply_operator, Operator};
use crate::series::{Series, Valuation};

/// [n+1]^{q^{k-1}} [n+2]^{q^{k-2}} ... [n+k]: the factor picked up by
/// tau^k on the divided monomial t^{q^n}/D_n (empty product for k = 0).
pub fn shift_factor(tables: &Quantities, n: usize, k: usize) -> Series {
    (1..=k).fold(Series::one(tables.ctx()), |acc, r| {
        acc.mul(&tables.bracket(n + r).frob_pow((k - r) as u32))
    })
}

fn mat_vec(m: &Matrix, v: &[Series]) -> Vec<Series> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols()).fold(Series::zero(v[0].ctx()), |acc, j| acc.add(&m.get(i, j).mul(&v[j])))
        })
        .collect()
}

fn vec_add(a: &[Series], b: &[Series]) -> Vec<Series> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

/// dy = P(tau) y + f with P(tau) z = sum_k pi_k z^{q^k} and
/// f = sum_j phi_j t^{q^j}/D_j; y is sought as sum_i y_i t^{q^i}/D_i.
#[derive(Clone, Debug)]
pub struct RegularSystem {
    pub pi: Vec<Matrix>,
    pub phi: Vec<Vec<Series>>,
    pub y0: Vec<Series>,
}

impl RegularSystem {
    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    fn check(&self) -> Result<()> {
        let m = self.dim();
        if m == 0
            || self.pi.iter().any(|p| p.rows() != m || p.cols() != m)
            || self.phi.iter().any(|f| f.len() != m)
        {
            return Err(Error::InvalidParameter("inconsistent system dimensions".into()));
        }
        Ok(())
    }
}

/// Divided-form coefficients y_0..y_N of the solution of a regular system.
///
/// Matching t^{q^l}/D_l: since d(c t^{q^i}/D_i) = c^{1/q} t^{q^{i-1}}/D_{i-1},
/// y_{l+1} = (phi_l + sum_k pi_k F(l-k,k) y_{l-k}^{q^k})^q.
pub fn solve_regular(tables: &Quantities, sys: &RegularSystem, n: usize) -> Result<Vec<Vec<Series>>> {
    sys.check()?;
    let ctx = tables.ctx();
    let m = sys.dim();
    let mut y = vec![sys.y0.clone()];
    for l in 0..n {
        let mut acc = sys.phi.get(l).cloned().unwrap_or_else(|| vec![Series::zero(ctx); m]);
        for (k, pk) in sys.pi.iter().enumerate().take(l + 1) {
            let f = shift_factor(tables, l - k, k);
            let yk: Vec<Series> = y[l - k].iter().map(|c| c.frob_pow(k as u32).mul(&f)).collect();
            acc = vec_add(&acc, &mat_vec(pk, &yk));
        }
        y.push(acc.iter().map(Series::frob).collect());
    }
    Ok(y)
}

/// Monomial-basis residual dy - P(tau)y - f for each component, computed
/// with the generic operator code on y_i/D_i. Known through index N-1.
pub fn regular_residual(
    tables: &Quantities,
    sys: &RegularSystem,
    y: &[Vec<Series>],
) -> Result<Vec<FqLinear>> {
    let ctx = tables.ctx();
    let m = sys.dim();
    let n = y.len() - 1;
    let comp = |c: usize| -> Result<FqLinear> {
        let coeffs = (0..=n).map(|i| y[i][c].div(&tables.d(i))).collect::<Result<Vec<_>>>()?;
        Ok(FqLinear::truncated(coeffs))
    };
    let ys: Vec<FqLinear> = (0..m).map(comp).collect::<Result<_>>()?;
    let f: Vec<FqLinear> = (0..m)
        .map(|c| {
            let coeffs = (0..n)
                .map(|j| match sys.phi.get(j) {
                    Some(v) => v[c].div(&tables.d(j)),
                    None => Ok(Series::zero(ctx)),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FqLinear::truncated(coeffs))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(m);
    for c in 0..m {
        let mut r = apply_operator(tables, &Operator::D, &ys[c])?.sub(&f[c]);
        for (k, pk) in sys.pi.iter().enumerate() {
            for (j, yj) in ys.iter().enumerate() {
                let entry = pk.get(c, j);
                if entry.is_exact_zero() {
                    continue;
                }
                let tk = (0..k).fold(yj.clone(), |acc, _| acc.frob()).truncate_order(n);
                r = r.sub(&tk.scale_series(entry));
            }
        }
        out.push(r.truncate_order(n));
    }
    Ok(out)
}

/// The same residual multiplied by D_l at index l, with the ratios
/// D_l / D_{l-k}^{q^k} obtained by exact long division: an exact check
/// for polynomial data.
pub fn regular_residual_scaled(
    tables: &Quantities,
    sys: &RegularSystem,
    y: &[Vec<Series>],
) -> Result<Vec<Vec<Series>>> {
    let n = y.len() - 1;
    let mut out = Vec::with_capacity(n);
    for l in 0..n {
        let mut r: Vec<Series> = y[l + 1].iter().map(Series::qth_root).collect::<Result<_>>()?;
        if let Some(phi) = sys.phi.get(l) {
            r = r.iter().zip(phi).map(|(a, b)| a.sub(b)).collect();
        }
        for (k, pk) in sys.pi.iter().enumerate().take(l + 1) {
            let ratio = tables.d(l).div(&tables.d(l - k).frob_pow(k as u32))?;
            let yk: Vec<Series> =
                y[l - k].iter().map(|c| c.frob_pow(k as u32).mul(&ratio)).collect();
            let py = mat_vec(pk, &yk);
            r = r.iter().zip(&py).map(|(a, b)| a.sub(b)).collect();
        }
        out.push(r);
    }
    Ok(out)
}

/// sum_j A_j(tau) d^j u = f with A_j(tau) = sum_k alpha[j][k] tau^k.
#[derive(Clone, Debug)]
pub struct SingularEquation {
    pub alpha: Vec<Vec<Series>>,
    pub phi: Vec<Series>,
    /// u_0..u_{h-1}, where h = max(j - k) over nonzero alpha[j][k]
    pub initial: Vec<Series>,
}

/// Formal divided-form solution and the window growth of its coefficients.
#[derive(Clone, Debug)]
pub struct FormalSolution {
    pub coeffs: Vec<Series>,
    /// v(u_n)/q^n
    pub growth: Vec<f64>,
    /// minimum of the growth over the tail half of the window
    pub tail_min: f64,
    /// the tail does not sink more than one unit below the head minimum
    pub bounded_below: bool,
}

/// Solve a scalar equation formally in the divided basis.
///
/// The highest shift h = max(j-k) fixes the unknown at step l to be
/// u_{l+h}, entering as u_{l+h}^{q^{-h}} with coefficient
/// Lambda_l = sum_{j-k=h, k<=l} alpha[j][k] F(l-k,k).
pub fn formal_solve_singular(
    tables: &Quantities,
    eq: &SingularEquation,
    n: usize,
) -> Result<FormalSolution> {
    let ctx = tables.ctx();
    let mut h: Option<i64> = None;
    for (j, row) in eq.alpha.iter().enumerate() {
        for (k, a) in row.iter().enumerate() {
            if !a.is_zero() {
                let s = j as i64 - k as i64;
                h = Some(h.map_or(s, |x: i64| x.max(s)));
            }
        }
    }
    let h = h.ok_or_else(|| Error::InvalidParameter("equation has no terms".into()))?;
    if h < 0 {
        return Err(Error::InvalidParameter("no derivative term dominates the shifts".into()));
    }
    let h = h as usize;
    if eq.initial.len() != h {
        return Err(Error::InvalidParameter("need exactly h initial coefficients".into()));
    }
    let mut u: Vec<Series> = eq.initial.clone();
    let mut l = 0usize;
    while u.len() <= n {
        let target = l + h;
        let mut lambda = Series::zero(ctx);
        let mut rest = eq.phi.get(l).cloned().unwrap_or_else(|| Series::zero(ctx));
        for (j, row) in eq.alpha.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() || k > l {
                    continue;
                }
                let f = shift_factor(tables, l - k, k).mul(a);
                if j + l - k == target {
                    lambda = lambda.add(&f);
                } else {
                    let idx = l + j - k;
                    let term = u[idx].frob_signed(k as i64 - j as i64)?.mul(&f);
                    rest = rest.sub(&term);
                }
            }
        }
        if lambda.is_zero() {
            return Err(Error::Degenerate { index: target });
        }
        let w = rest.div(&lambda)?;
        u.push(w.frob_pow(h as u32));
        l += 1;
    }
    let q = ctx.q() as f64;
    let growth: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, c)| c.valuation_bound().to_f64() / libm::pow(q, i as f64))
        .collect();
    let mid = growth.len() / 2;
    let fmin = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
    let head = fmin(&growth[..mid.max(1)]);
    let tail_min = fmin(&growth[mid..]);
    let bounded_below = tail_min >= head - 1.0 || tail_min.is_infinite();
    Ok(FormalSolution { coeffs: u, growth, tail_min, bounded_below })
}

/// Carlitz coefficients c_n = prod_{j<n} (lambda - [j]) of the solution of
/// tau d u = lambda u with u(1) = 1. Finite when lambda = [j].
pub fn power_function(tables: &Quantities, lambda: &Series, n: usize) -> Result<CarlitzExpansion> {
    if lambda.valuation_bound() <= Valuation::int(0) {
        return Err(Error::NoContinuousSolution("|lambda| >= 1".into()));
    }
    let mut c = vec![Series::one(tables.ctx())];
    for j in 0..n {
        let next = c[j].mul(&lambda.sub(&tables.bracket(j)));
        if next.is_exact_zero() {
            return Ok(CarlitzExpansion::poly(c));
        }
        c.push(next);
    }
    Ok(CarlitzExpansion::truncated(c))
}

/// Matrix power function: c_i = prod_{j<i} (Lambda - [j] I), |Lambda| < 1.
pub fn power_function_matrix(tables: &Quantities, lambda: &Matrix, n: usize) -> Result<Vec<Matrix>> {
    if lambda.rows() != lambda.cols() {
        return Err(Error::InvalidParameter("square matrix required".into()));
    }
    if lambda.valuation() <= Valuation::int(0) {
        return Err(Error::NoContinuousSolution("max |lambda_ij| >= 1".into()));
    }
    let ctx = tables.ctx();
    let m = lambda.rows();
    let mut c = vec![Matrix::identity(ctx, m)];
    for j in 0..n {
        let shifted = lambda.sub(&Matrix::scalar(ctx, m, &tables.bracket(j)));
        c.push(shifted.mul(&c[j]));
    }
    Ok(c)
}

/// Solution u = W(g) = sum_k w_k g^{q^k} of tau d u = P(tau) u.
#[derive(Clone, Debug)]
pub struct RegularSingularSolution {
    pub w: Vec<Matrix>,
    /// Carlitz coefficients of g, the power function of pi_0
    pub g: Vec<Matrix>,
}

/// Solve tau d u = sum_k pi_k u^{q^k} for scalar or upper-triangular pi_0.
///
/// Since Delta(g^{q^n}) = (pi_0^{(q^n)} + [n]) g^{q^n}, matching powers of
/// g gives pi_0 w_n - w_n (pi_0^{(q^n)} + [n] I) = -sum_{j>=1} pi_j w_{n-j}^{(q^j)},
/// solved entry by entry by triangular substitution.
pub fn solve_regular_singular(
    tables: &Quantities,
    pi: &[Matrix],
    n: usize,
) -> Result<RegularSingularSolution> {
    let ctx = tables.ctx();
    let p0 = pi.first().ok_or_else(|| Error::InvalidParameter("pi_0 missing".into()))?;
    let m = p0.rows();
    if !p0.is_upper_triangular() {
        return Err(Error::InvalidParameter("pi_0 must be scalar or upper triangular".into()));
    }
    if pi.iter().any(|p| p.rows() != m || p.cols() != m) {
        return Err(Error::InvalidParameter("inconsistent matrix sizes".into()));
    }
    if p0.valuation() <= Valuation::int(0) {
        return Err(Error::InvalidParameter("need |pi_0| < 1".into()));
    }
    let diag = p0.diagonal();
    let mut w = vec![Matrix::identity(ctx, m)];
    for k in 1..=n {
        let b = p0.frob_pow(k as u32).add(&Matrix::scalar(ctx, m, &tables.bracket(k)));
        let mut rhs = Matrix::zero(ctx, m, m);
        for (j, pj) in pi.iter().enumerate().skip(1).take(k) {
            rhs = rhs.sub(&pj.mul(&w[k - j].frob_pow(j as u32)));
        }
        let mut x = Matrix::zero(ctx, m, m);
        for i in (0..m).rev() {
            for jj in 0..m {
                let coef = diag[i].sub(&b.get(jj, jj).clone());
                let mut val = rhs.get(i, jj).clone();
                for kk in i + 1..m {
                    val = val.sub(&p0.get(i, kk).mul(x.get(kk, jj)));
                }
                for kk in 0..jj {
                    val = val.add(&x.get(i, kk).mul(b.get(kk, jj)));
                }
                if coef.is_zero() {
                    return Err(Error::Resonance { i, j: jj, k });
                }
                x.set(i, jj, val.div(&coef)?);
            }
        }
        w.push(x);
    }
    let g = power_function_matrix(tables, p0, n)?;
    Ok(RegularSingularSolution { w, g })
}

fn matrix_expansion_qpower(tables: &Quantities, c: &[Matrix]) -> Vec<Matrix> {
    (0..c.len())
        .map(|j| {
            let own = c[j].frob();
            if j == 0 {
                own
            } else {
                own.add(&c[j - 1].frob().scale(&tables.bracket(j)))
            }
        })
        .collect()
}

fn matrix_expansion_tau_d(tables: &Quantities, c: &[Matrix]) -> Vec<Matrix> {
    (0..c.len().saturating_sub(1))
        .map(|j| c[j].scale(&tables.bracket(j)).add(&c[j + 1]))
        .collect()
}

/// Carlitz-coefficient residual tau d u - P(tau) u of u = sum_{k<=N} w_k g^{q^k}
/// on indices 0..N-1. Meaningful when w_k tends to 0 so that the
/// neglected terms k > N fall below precision.
pub fn regular_singular_residual(
    tables: &Quantities,
    pi: &[Matrix],
    sol: &RegularSingularSolution,
) -> Vec<Matrix> {
    let ctx = tables.ctx();
    let m = sol.w[0].rows();
    let len = sol.g.len();
    let mut u: Vec<Matrix> = vec![Matrix::zero(ctx, m, m); len];
    let mut gpow = sol.g.clone();
    for wk in &sol.w {
        for i in 0..len {
            u[i] = u[i].add(&wk.mul(&gpow[i]));
        }
        gpow = matrix_expansion_qpower(tables, &gpow);
    }
    let lhs = matrix_expansion_tau_d(tables, &u);
    let mut upow = u.clone();
    let mut rhs: Vec<Matrix> = vec![Matrix::zero(ctx, m, m); len];
    for pk in pi {
        for i in 0..len {
            rhs[i] = rhs[i].add(&pk.mul(&upow[i]));
        }
        upow = matrix_expansion_qpower(tables, &upow);
    }
    lhs.iter().zip(&rhs).map(|(a, b)| a.sub(b)).collect()
}

/// Residual u(xt) - x u(t) - sum_k pi_k u(t)^{(q^k)} at a point t of F_q[x],
/// where g(t) is a finite sum and the series in g(t) converges x-adically
/// once |g(t)| < 1.
pub fn regular_singular_point_residual(
    tables: &Quantities,
    pi: &[Matrix],
    sol: &RegularSingularSolution,
    t: &Series,
) -> Result<Matrix> {
    let ctx = tables.ctx();
    let x = Series::x_pow(ctx, 1);
    let xt = x.mul(t);
    let need = xt.degree().map_or(0, |d| d.to_integer().max(0) as usize);
    let lambda = &pi[0];
    let g = power_function_matrix(tables, lambda, need)?;
    let eval_g = |s: &Series| -> Result<Matrix> {
        let deg = s.degree().map_or(0, |d| d.to_integer().max(0) as usize);
        let vals = tables.carlitz_values(s, deg)?;
        let m = lambda.rows();
        let mut acc = Matrix::zero(ctx, m, m);
        for (i, v) in vals.iter().enumerate() {
            acc = acc.add(&g[i].scale(v));
        }
        Ok(acc)
    };
    let eval_u = |gv: &Matrix| -> Matrix {
        let m = gv.rows();
        let mut acc = Matrix::zero(ctx, m, m);
        let mut p = gv.clone();
        for wk in &sol.w {
            acc = acc.add(&wk.mul(&p));
            p = p.frob();
        }
        acc
    };
    let ut = eval_u(&eval_g(t)?);
    let uxt = eval_u(&eval_g(&xt)?);
    let mut r = uxt.sub(&ut.scale(&x));
    let mut up = ut.clone();
    for pk in pi {
        r = r.sub(&pk.mul(&up));
        up = up.frob();
    }
    Ok(r)
}

/// Which Artin–Schreier solution z0 + c (c in F_q) to take at each step.
#[derive(Clone, Debug, PartialEq)]
pub enum BranchPolicy {
    /// always the small solution z0
    Zero,
    /// always z0 + c
    Constant(Fe),
    /// z0 + c_i at step i (z0 past the end)
    PerStep(Vec<Fe>),
}

impl BranchPolicy {
    pub fn at(&self, i: usize) -> Fe {
        match self {
            BranchPolicy::Zero => Fe::ZERO,
            BranchPolicy::Constant(c) => *c,
            BranchPolicy::PerStep(v) => v.get(i).copied().unwrap_or(Fe::ZERO),
        }
    }

    fn check(&self, tables: &Quantities) -> Result<()> {
        let ctx = tables.ctx();
        let ok = match self {
            BranchPolicy::Zero => true,
            BranchPolicy::Constant(c) => ctx.in_fq(*c),
            BranchPolicy::PerStep(v) => v.iter().all(|c| ctx.in_fq(*c)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("branch constants must lie in F_q".into()))
        }
    }
}

/// Coefficients of a formal solution of (Delta - [-a])(Delta - [-b]) u = d Delta u
/// and the strong-singularity window flag.
#[derive(Clone, Debug)]
pub struct SingularRecursion {
    pub coeffs: CarlitzExpansion,
    /// |c_i| >= 1 for every i in [2, N]
    pub strongly_singular: bool,
}

fn recursion_rhs(
    tables: &Quantities,
    a: i64,
    b: i64,
    i: usize,
    ci: &Series,
    ci1: &Series,
) -> Result<Series> {
    let ba = tables.bracket_signed(-a)?;
    let bb = tables.bracket_signed(-b)?;
    let bi = tables.bracket(i);
    let bi1 = tables.bracket(i + 1);
    let first = bi1.mul(ci1).qth_root()?.neg();
    let second = ci1.mul(&bi.add(&bi1).sub(&ba).sub(&bb));
    let third = ci.mul(&bi.sub(&ba)).mul(&bi.sub(&bb));
    Ok(first.add(&second).add(&third))
}

/// Run c_{i+2}^{1/q} - c_{i+2} = v_i with the chosen branches.
pub fn recursion_48(
    tables: &Quantities,
    a: i64,
    b: i64,
    c0: &Series,
    c1: &Series,
    policy: &BranchPolicy,
    n: usize,
) -> Result<SingularRecursion> {
    policy.check(tables)?;
    if c0.valuation_bound() < Valuation::int(0) || c1.valuation_bound() < Valuation::int(0) {
        return Err(Error::InvalidParameter("need |c_0|, |c_1| <= 1".into()));
    }
    let ctx = tables.ctx();
    let mut c = vec![c0.clone(), c1.clone()];
    for i in 0..n.saturating_sub(1) {
        let v = recursion_rhs(tables, a, b, i, &c[i], &c[i + 1])?;
        if v.valuation_bound() <= Valuation::int(0) {
            return Err(Error::NotSmall { step: Some(i) });
        }
        let z0 = artin_schreier_small(&v)?;
        c.push(z0.add(&Series::constant(ctx, policy.at(i))));
    }
    let strongly_singular =
        c.len() > 2 && c[2..].iter().all(|x| x.valuation_bound() <= Valuation::int(0));
    Ok(SingularRecursion { coeffs: CarlitzExpansion::truncated(c), strongly_singular })
}

/// The q candidate values for c_{i+2} given c_i, c_{i+1}.
pub fn recursion_48_candidates(
    tables: &Quantities,
    a: i64,
    b: i64,
    i: usize,
    ci: &Series,
    ci1: &Series,
) -> Result<Vec<Series>> {
    let v = recursion_rhs(tables, a, b, i, ci, ci1)?;
    if v.valuation_bound() <= Valuation::int(0) {
        return Err(Error::NotSmall { step: Some(i) });
    }
    artin_schreier_solutions(&v)
}

/// Residual of the recursion on a coefficient list (index i from 0).
pub fn recursion_48_residual(
    tables: &Quantities,
    a: i64,
    b: i64,
    c: &CarlitzExpansion,
) -> Result<Vec<Series>> {
    let cs = c.coeffs();
    (0..cs.len().saturating_sub(2))
        .map(|i| {
            let v = recursion_rhs(tables, a, b, i, &cs[i], &cs[i + 1])?;
            Ok(cs[i + 2].qth_root()?.sub(&cs[i + 2]).sub(&v))
        })
        .collect()
}
