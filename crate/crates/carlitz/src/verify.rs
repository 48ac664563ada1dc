//! Verification suites. Each suite checks one family of identities over
//! fixed index ranges and returns one record per check.

use std::io::Write;
use std::sync::Arc;

use carlitz_core::artin::{artin_schreier_small, artin_schreier_solutions, constant_artin_schreier};
use carlitz_core::carlitz::{fq_polys_below, CarlitzExpansion, Quantities};
use carlitz_core::linear::FqLinear;
use carlitz_core::matrix::Matrix;
use carlitz_core::ode::{
    power_function, regular_residual, regular_residual_scaled, regular_singular_residual, solve_regular,
    solve_regular_singular, RegularSystem,
};
use carlitz_core::operators::{
    apply_operator, carlitz_action, integral, integrate_family, recover_coefficient, BasisAction, Operator,
};
use carlitz_core::special::{
    contiguous_shift_check, hypergeom_equation_residual, l1_branches, l1_equation_residual, polylog_analytic,
    zeta_identity_checks, ZetaTable,
};
use carlitz_core::umbral::{
    basic_sequence, binomial_type_check, delta_from_sigma, pascal_check, s_value, DeltaOperator, KBinom,
};
use carlitz_core::weyl::{
    annihilator_check, carlitz_module_function, estimator_precision, filtration_dimension_estimate,
    free_word_count, hypergeometric_generating_function, kbinomial_function, Factor, Generator, WeylElement,
    DEFAULT_PIVOT_MARGIN,
};
use carlitz_core::{Context, Error as CoreError, Fe, Series, Valuation};
use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Exponential,
    Commutation,
    Eigenstructure,
    Recovery,
    Integrals,
    Regular,
    Power,
    RegularSingular,
    Hypergeometric,
    ZetaIdentities,
    Umbral,
    Pascal,
    Weyl,
    Arithmetic,
    All,
}

impl Suite {
    /// The suites run by `All`, in order.
    pub const EACH: [Suite; 13] = [
        Suite::Exponential,
        Suite::Commutation,
        Suite::Eigenstructure,
        Suite::Recovery,
        Suite::Integrals,
        Suite::Regular,
        Suite::Power,
        Suite::RegularSingular,
        Suite::Hypergeometric,
        Suite::ZetaIdentities,
        Suite::Umbral,
        Suite::Weyl,
        Suite::Arithmetic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Exponential => "exponential",
            Suite::Commutation => "commutation",
            Suite::Eigenstructure => "eigenstructure",
            Suite::Recovery => "recovery",
            Suite::Integrals => "integrals",
            Suite::Regular => "regular",
            Suite::Power => "power",
            Suite::RegularSingular => "regular-singular",
            Suite::Hypergeometric => "hypergeometric",
            Suite::ZetaIdentities => "zeta-identities",
            Suite::Umbral => "umbral",
            Suite::Pascal => "pascal",
            Suite::Weyl => "weyl",
            Suite::Arithmetic => "arithmetic",
            Suite::All => "all",
        }
    }
}

/// What a residual must satisfy for its check to pass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Floor {
    /// identically zero, no precision involved
    Exact,
    /// zero to the precision it is known to
    ToPrecision,
    /// valuation at least this
    AtLeast(i64),
    /// valuation at least this above the valuation of the expected value
    RelativeAtLeast(i64),
    /// a yes/no property, no residual
    Holds,
}

impl Floor {
    fn label(self) -> String {
        match self {
            Floor::Exact => "exact".into(),
            Floor::ToPrecision => "zero to precision".into(),
            Floor::AtLeast(v) => format!(">= {v}"),
            Floor::RelativeAtLeast(v) => format!(">= {v} relative"),
            Floor::Holds => "holds".into(),
        }
    }

    fn accepts(self, s: &Series) -> bool {
        match self {
            Floor::Exact => s.is_exact_zero(),
            Floor::ToPrecision => s.is_zero(),
            Floor::AtLeast(v) | Floor::RelativeAtLeast(v) => s.valuation_bound() >= Valuation::int(v),
            Floor::Holds => true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    /// the identity being checked
    pub anchor: String,
    pub range: String,
    pub floor: String,
    /// smallest residual valuation ("inf" for exact zero)
    pub min_valuation: String,
    pub residuals: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.passed).count()
    }

    pub fn write(&self, fmt: OutputFormat, out: &mut dyn Write) -> Result<()> {
        match fmt {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
                w.write_record(["suite", "check", "anchor", "range", "floor", "min_valuation", "passed"])
                    .map_err(io)?;
                for r in &self.records {
                    w.write_record([
                        r.suite.as_str(),
                        &r.check,
                        &r.anchor,
                        &r.range,
                        &r.floor,
                        &r.min_valuation,
                        if r.passed { "true" } else { "false" },
                    ])
                    .map_err(io)?;
                }
                w.flush()?;
            }
            OutputFormat::Text => {
                for r in &self.records {
                    let status = if r.passed { "PASS" } else { "FAIL" };
                    write!(
                        out,
                        "{status} {}/{}: {} [{}] floor {} min {}",
                        r.suite, r.check, r.anchor, r.range, r.floor, r.min_valuation
                    )?;
                    match &r.detail {
                        Some(d) => writeln!(out, " ({d})")?,
                        None => writeln!(out)?,
                    }
                }
                let verdict = if self.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{verdict} {}: {} checks, {} failed", self.suite, self.records.len(), self.failures())?;
            }
        }
        Ok(())
    }
}

/// Record builder for one suite.
struct Recorder {
    suite: &'static str,
    records: Vec<CheckRecord>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Recorder { suite, records: Vec::new() }
    }

    /// A check whose residuals must all meet `floor`; `extra` must hold too.
    fn series(&mut self, check: &str, anchor: &str, range: &str, floor: Floor, residuals: &[Series], extra: bool) {
        let mut vals: Vec<Valuation> = residuals.iter().map(Series::valuation_bound).collect();
        if vals.is_empty() {
            // the difference is the zero polynomial
            vals.push(Valuation::Infinite);
        }
        let passed = extra && residuals.iter().all(|s| floor.accepts(s));
        self.push(check, anchor, range, floor, &vals, None, passed);
    }

    /// Residuals a - b measured against v(b); absolute where b vanishes.
    fn relative(&mut self, check: &str, anchor: &str, range: &str, floor: i64, pairs: &[(Series, Series)]) {
        let vals: Vec<Valuation> = pairs
            .iter()
            .map(|(a, b)| {
                let d = a.sub(b).valuation_bound();
                match (d, b.valuation_bound()) {
                    (Valuation::Finite(x), Valuation::Finite(y)) if !b.is_zero() => Valuation::Finite(x - y),
                    _ => d,
                }
            })
            .collect();
        let passed = vals.iter().all(|v| *v >= Valuation::int(floor));
        self.push(check, anchor, range, Floor::RelativeAtLeast(floor), &vals, None, passed);
    }

    fn holds(&mut self, check: &str, anchor: &str, range: &str, passed: bool, detail: Option<String>) {
        self.push(check, anchor, range, Floor::Holds, &[], detail, passed);
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        check: &str,
        anchor: &str,
        range: &str,
        floor: Floor,
        vals: &[Valuation],
        detail: Option<String>,
        passed: bool,
    ) {
        let min = vals.iter().copied().min().unwrap_or(Valuation::Infinite);
        self.records.push(CheckRecord {
            suite: self.suite.into(),
            check: check.into(),
            anchor: anchor.into(),
            range: range.into(),
            floor: floor.label(),
            min_valuation: min.to_string(),
            residuals: vals.iter().map(Valuation::to_string).collect(),
            detail,
            passed,
        });
    }

    fn finish(self) -> Vec<CheckRecord> {
        self.records
    }
}

fn rng_for(cfg: &RunConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Random polynomial in x of degree <= deg with coefficients in F_q.
fn rand_poly(ctx: &Arc<Context>, rng: &mut ChaCha8Rng, deg: usize) -> Series {
    let fq = ctx.fq_elements();
    let c: Vec<Fe> = (0..=deg).map(|_| fq[rng.gen_range(0..fq.len())]).collect();
    Series::from_coeffs(ctx, &c)
}

fn coeffs_of(u: &FqLinear) -> Vec<Series> {
    u.coeffs().to_vec()
}

/// Coefficient pairs of two expansions, padded with zeros.
fn pairs(a: &FqLinear, b: &FqLinear) -> Vec<(Series, Series)> {
    let ctx = a.coeffs().first().or(b.coeffs().first()).map(|s| s.ctx().clone());
    let Some(ctx) = ctx else { return Vec::new() };
    let zero = Series::zero(&ctx);
    (0..a.len().max(b.len()))
        .map(|i| (a.coeff(i).unwrap_or(&zero).clone(), b.coeff(i).unwrap_or(&zero).clone()))
        .collect()
}

fn monomial(ctx: &Arc<Context>, n: usize) -> FqLinear {
    let mut c = vec![Series::zero(ctx); n + 1];
    c[n] = Series::one(ctx);
    FqLinear::poly(c)
}

fn sign(ctx: &Arc<Context>, odd: bool) -> Series {
    Series::from_int(ctx, if odd { -1 } else { 1 })
}

pub fn cmd_verify(suite: Suite, cfg: &RunConfig) -> Result<Report> {
    cfg.context()?;
    let records = if suite == Suite::All {
        let mut all = Vec::new();
        for s in Suite::EACH {
            all.extend(run_suite(s, cfg)?);
        }
        all
    } else {
        run_suite(suite, cfg)?
    };
    let passed = records.iter().all(|r| r.passed);
    Ok(Report { suite: suite.name().into(), passed, records })
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    match suite {
        Suite::Exponential => exponential(cfg),
        Suite::Commutation => commutation(cfg),
        Suite::Eigenstructure => eigenstructure(cfg),
        Suite::Recovery => recovery(cfg),
        Suite::Integrals => integrals(cfg),
        Suite::Regular => regular(cfg),
        Suite::Power => power(cfg),
        Suite::RegularSingular => regular_singular(cfg),
        Suite::Hypergeometric => hypergeometric(cfg),
        Suite::ZetaIdentities => zeta_identities(cfg),
        Suite::Umbral => umbral(cfg),
        Suite::Pascal => pascal(cfg),
        Suite::Weyl => weyl(cfg),
        Suite::Arithmetic => arithmetic(cfg),
        Suite::All => cmd_verify(Suite::All, cfg).map(|r| r.records),
    }
}

pub fn exponential(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, 10);
    let mut rec = Recorder::new("exponential");
    let order = 7;
    let e = tb.carlitz_exp(order + 1)?;
    let de = apply_operator(&tb, &Operator::D, &e)?;
    let diff = de.sub(&e.truncate_order(order + 1));
    rec.series(
        "monomial",
        "d e_C(t) = e_C(t), e_C = sum t^{q^n}/D_n",
        "t^{q^n}, n <= 7",
        Floor::ToPrecision,
        &coeffs_of(&diff),
        de.len() == order + 1,
    );
    // divided form: every coefficient of e_C is exactly 1
    let sys = RegularSystem { pi: vec![Matrix::identity(&ctx, 1)], phi: vec![], y0: vec![Series::one(&ctx)] };
    let y = solve_regular(&tb, &sys, order + 1)?;
    let ones: Vec<Series> = y.iter().map(|v| v[0].sub(&Series::one(&ctx))).collect();
    let scaled: Vec<Series> = regular_residual_scaled(&tb, &sys, &y)?.into_iter().flatten().collect();
    rec.series(
        "divided",
        "d e_C = e_C in divided coefficients: y_n = 1",
        "n <= 8",
        Floor::Exact,
        &[ones, scaled].concat(),
        true,
    );
    Ok(rec.finish())
}

pub fn commutation(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, 10);
    let mut rng = rng_for(cfg, 2);
    let mut rec = Recorder::new("commutation");
    let root = tb.bracket(1).qth_root()?;
    let mut residuals = Vec::new();
    for _ in 0..50 {
        let deg = rng.gen_range(0..=5usize);
        let u = FqLinear::poly((0..=deg).map(|_| rand_poly(&ctx, &mut rng, 3)).collect());
        let up = |v: &FqLinear| v.frob().sub(v);
        let down = |v: &FqLinear| apply_operator(&tb, &Operator::D, v);
        let lhs = down(&up(&u))?.sub(&up(&down(&u)?));
        residuals.extend(coeffs_of(&lhs.sub(&u.scale_series(&root))));
    }
    rec.series(
        "ladder",
        "a^- a^+ - a^+ a^- = [1]^{1/q} I with a^- = d, a^+ = tau - 1",
        "50 random polynomials of t-degree <= q^5",
        Floor::Exact,
        &residuals,
        true,
    );
    let mut ring_res = Vec::new();
    for n in 0..=2 {
        let one = WeylElement::one(&ctx, n)?;
        let up = WeylElement::tau(&ctx, n)?.sub(&one)?;
        let down = WeylElement::d(&ctx, n)?;
        let c = down.mul(&up)?.sub(&up.mul(&down)?)?;
        let diff = c.sub(&WeylElement::scalar(&ctx, n, root.clone())?)?;
        ring_res.extend(diff.terms().values().cloned());
        ring_res.push(c.coeff(&carlitz_core::weyl::Word::one(n)).sub(&root));
    }
    rec.series(
        "ring",
        "d(tau - 1) - (tau - 1)d = [1]^{1/q} in normal form",
        "0 to 2 extra t-variables",
        Floor::ToPrecision,
        &ring_res,
        true,
    );
    Ok(rec.finish())
}

pub fn eigenstructure(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, 10);
    let mut rec = Recorder::new("eigenstructure");
    let mut eig = Vec::new();
    let mut ladder = Vec::new();
    for i in 0..=6 {
        let f = CarlitzExpansion::basis(&ctx, i);
        let df = carlitz_action(&tb, BasisAction::D, &f)?;
        let tdf = carlitz_action(&tb, BasisAction::QPower, &df)?;
        let lhs = tdf.add(&df.scale(&Series::from_int(&ctx, -1)));
        eig.extend(lhs.add(&f.scale(&tb.bracket(i).neg())).coeffs().to_vec());
        if i >= 1 {
            let below = CarlitzExpansion::basis(&ctx, i - 1);
            ladder.extend(df.add(&below.scale(&Series::from_int(&ctx, -1))).coeffs().to_vec());
        }
    }
    rec.series("eigen", "(tau - 1) d f_i = [i] f_i", "i <= 6", Floor::Exact, &eig, true);
    rec.series("lowering", "d f_i = f_{i-1}", "1 <= i <= 6", Floor::Exact, &ladder, true);
    Ok(rec.finish())
}

pub fn recovery(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, 10);
    let mut rng = rng_for(cfg, 4);
    let mut rec = Recorder::new("recovery");
    let mut residuals = Vec::new();
    for _ in 0..20 {
        let a: Vec<Series> = (0..=6).map(|_| rand_poly(&ctx, &mut rng, 3)).collect();
        let u = FqLinear::poly(a.iter().enumerate().map(|(m, c)| c.div(&tb.d(m))).collect::<carlitz_core::Result<_>>()?);
        for (n, an) in a.iter().enumerate() {
            residuals.push(recover_coefficient(&tb, &u, n)?.sub(an));
        }
    }
    rec.series(
        "planted",
        "a_n read off from Delta^{(n)} u for u = sum a_m t^{q^m}/D_m",
        "20 random series, n <= 6",
        Floor::ToPrecision,
        &residuals,
        true,
    );
    Ok(rec.finish())
}

pub fn integrals(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, 10);
    let m = cfg.prec;
    let mut rec = Recorder::new("integrals");
    let mut mono = Vec::new();
    let mut basis = Vec::new();
    for n in 0..=5 {
        let cx = tb.to_carlitz(&monomial(&ctx, n))?;
        let expect = Series::from_int(&ctx, -1).div(&tb.bracket(n + 1))?;
        mono.push(integral(&tb, &cx)?.sub(&expect));
        let v = integral(&tb, &CarlitzExpansion::basis(&ctx, n))?;
        let expect = sign(&ctx, n % 2 == 0).div(&tb.l(n + 1))?;
        basis.push(v.sub(&expect));
    }
    rec.series("monomials", "integral of t^{q^n} = -1/[n+1]", "n <= 5", Floor::ToPrecision, &mono, true);
    rec.series("basis", "integral of f_n = (-1)^{n+1}/L_{n+1}", "n <= 5", Floor::ToPrecision, &basis, true);

    let order = 5;
    let family: Vec<_> = (0..=order).map(|i| (monomial(&ctx, i), CarlitzExpansion::basis(&ctx, i))).collect();
    let lhs = integrate_family(&tb, &family)?;
    let rhs = tb.carlitz_log(order + 1)?.sub(&monomial(&ctx, 0));
    rec.relative("module", "integral over s of C_s(z) = log_C(z) - z", "order 5", m - 5, &pairs(&lhs, &rhs));
    let family: Vec<_> = (0..=order)
        .map(|n| {
            let c = monomial(&ctx, n).scale_series(&Series::one(&ctx).div(&tb.d(n))?);
            Ok((c, tb.to_carlitz(&monomial(&ctx, n))?))
        })
        .collect::<carlitz_core::Result<_>>()?;
    let lhs = integrate_family(&tb, &family)?;
    let rhs = monomial(&ctx, 0).sub(&tb.carlitz_exp(order + 1)?);
    rec.relative("exponential", "integral over s of e_C(st) = t - e_C(t)", "order 5", m - 5, &pairs(&lhs, &rhs));
    Ok(rec.finish())
}

fn rand_matrix(ctx: &Arc<Context>, rng: &mut ChaCha8Rng, m: usize) -> Result<Matrix> {
    let rows = (0..m).map(|_| (0..m).map(|_| rand_poly(ctx, rng, 2)).collect()).collect();
    Ok(Matrix::from_rows(rows)?)
}

pub fn regular(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, 10);
    let mut rng = rng_for(cfg, 6);
    let mut rec = Recorder::new("regular");
    let n = 6;
    let mut scaled = Vec::new();
    let mut monomial_form = Vec::new();
    let mut lengths_ok = true;
    for _ in 0..20 {
        let m = rng.gen_range(1..=3);
        let pi = (0..rng.gen_range(1..=3)).map(|_| rand_matrix(&ctx, &mut rng, m)).collect::<Result<_>>()?;
        let phi = (0..3).map(|_| (0..m).map(|_| rand_poly(&ctx, &mut rng, 2)).collect()).collect();
        let y0 = (0..m).map(|_| rand_poly(&ctx, &mut rng, 1)).collect();
        let sys = RegularSystem { pi, phi, y0 };
        let y = solve_regular(&tb, &sys, n)?;
        scaled.extend(regular_residual_scaled(&tb, &sys, &y)?.into_iter().flatten());
        for comp in regular_residual(&tb, &sys, &y)? {
            lengths_ok &= comp.len() == n;
            monomial_form.extend(coeffs_of(&comp));
        }
    }
    rec.series(
        "divided",
        "dy = P(tau)y + f, scaled by D_l at index l",
        "20 random systems of size <= 3, order q^6",
        Floor::Exact,
        &scaled,
        true,
    );
    rec.series(
        "monomial",
        "dy - P(tau)y - f in the monomial basis",
        "20 random systems of size <= 3, order q^6",
        Floor::ToPrecision,
        &monomial_form,
        lengths_ok,
    );
    Ok(rec.finish())
}

pub fn power(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, 16);
    let mut rng = rng_for(cfg, 7);
    let mut rec = Recorder::new("power");
    let mut res = Vec::new();
    let mut finite = true;
    for j in 0..=3usize {
        let u = power_function(&tb, &tb.bracket(j), 8)?;
        finite &= !u.is_truncated();
        let expect = tb.to_carlitz(&monomial(&ctx, j))?;
        let len = u.len().max(expect.len());
        for i in 0..len {
            let a = u.get(i, &ctx).unwrap_or_else(|| Series::zero(&ctx));
            let b = expect.get(i, &ctx).unwrap_or_else(|| Series::zero(&ctx));
            res.push(a.sub(&b));
        }
    }
    rec.series("brackets", "u(t, [j]) = t^{q^j}", "j <= 3", Floor::Exact, &res, finite);

    let x = Series::x_pow(&ctx, 1);
    let mut twist = Vec::new();
    for _ in 0..5 {
        let lam = rand_poly(&ctx, &mut rng, 3).mul(&x);
        let lam2 = lam.frob().add(&tb.bracket(1));
        let u1 = power_function(&tb, &lam, 8)?;
        let u2 = power_function(&tb, &lam2, 4)?;
        for t in fq_polys_below(&ctx, 4) {
            twist.push(u1.eval_at(&tb, &t.frob())?.sub(&u2.eval_at(&tb, &t)?));
        }
    }
    rec.series(
        "twist",
        "u(t^q, lambda) = u(t, lambda^q + [1])",
        "5 random lambda with |lambda| < 1, all t of degree <= 3",
        Floor::Exact,
        &twist,
        true,
    );
    let u = power_function(&tb, &x.neg(), 6)?;
    let mut vanish = Vec::new();
    for t in fq_polys_below(&ctx, 3) {
        vanish.push(u.eval_at(&tb, &t.mul(&x))?);
    }
    rec.series(
        "minus-x",
        "u(t, -x) = 0 on x F_q[x]",
        "xs with deg s <= 2",
        Floor::ToPrecision,
        &vanish,
        true,
    );
    Ok(rec.finish())
}

pub fn regular_singular(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let n = cfg.t_order;
    let tb = Quantities::new(&ctx, n + 4);
    let mut rec = Recorder::new("regular-singular");
    let x = Series::x_pow(&ctx, 1);
    let cases = [
        vec![x.square(), x.pow(3)],
        vec![x.square().add(&x.pow(3)), x.square()],
        vec![x.pow(3), x.square(), x.pow(4)],
        vec![x.square(), x.square()],
        vec![x.pow(4), x.pow(2), x.pow(3)],
    ];
    for (c_no, c) in cases.iter().enumerate() {
        let pi: Vec<Matrix> = c.iter().map(|s| Matrix::scalar(&ctx, 1, s)).collect();
        let sol = solve_regular_singular(&tb, &pi, n)?;
        let r = regular_singular_residual(&tb, &pi, &sol);
        let k = pi.len() - 1;
        let kept: Vec<Series> = r.iter().take(n - k).flat_map(|m| m.entries().to_vec()).collect();
        rec.series(
            &format!("instance-{}", c_no + 1),
            "tau d u = sum_k pi_k u^{q^k}, u = sum w_k g^{q^k}",
            &format!("index < N - K = {}", n - k),
            Floor::ToPrecision,
            &kept,
            r.len() == n,
        );
    }
    let resonant = [Matrix::scalar(&ctx, 1, &x.neg())];
    let outcome = solve_regular_singular(&tb, &resonant, 4);
    let (ok, detail) = match &outcome {
        Err(e @ CoreError::Resonance { .. }) => (true, e.to_string()),
        Err(e) => (false, format!("unexpected error: {e}")),
        Ok(_) => (false, "accepted".to_string()),
    };
    rec.holds("resonance", "pi_0 = -x violates non-resonance and is rejected", "pi_0 = -x", ok, Some(detail));
    Ok(rec.finish())
}

pub fn hypergeometric(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, 10);
    let mut rec = Recorder::new("hypergeometric");
    let mut res = Vec::new();
    let mut lens = true;
    for a in 1..=2 {
        for b in 1..=2 {
            for c in 1..=2 {
                let r = hypergeom_equation_residual(&tb, a, b, c, 6)?;
                lens &= r.len() == 6;
                res.extend(coeffs_of(&r));
            }
        }
    }
    rec.series(
        "equation",
        "hypergeometric difference equation for F(a, b; c)",
        "(a, b, c) in {1,2}^3, order q^5",
        Floor::ToPrecision,
        &res,
        lens,
    );
    let mut ok = true;
    let mut count = 0;
    for k in 0..=3u64 {
        for nu in 0..=3u64 {
            ok &= contiguous_shift_check(&tb, &[k], &[nu])?;
            count += 1;
            for k2 in 0..=3u64 {
                ok &= contiguous_shift_check(&tb, &[k, k2], &[nu])?;
                count += 1;
            }
        }
    }
    rec.holds(
        "contiguous",
        "contiguous relation under parameter shift",
        "parameters <= 3",
        ok,
        Some(format!("{count} parameter sets")),
    );
    Ok(rec.finish())
}

/// Context whose constant field contains the roots of c^q - c = 1.
fn context_with_roots(cfg: &RunConfig, n: usize) -> Result<(Quantities, Vec<carlitz_core::special::L1Branch>)> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, n + 4);
    match l1_branches(&tb, n) {
        Ok(b) => Ok((tb, b)),
        Err(CoreError::MissingRoots(_)) => {
            let wide = cfg.context_with_degree(cfg.m * cfg.p)?;
            let tb = Quantities::new(&wide, n + 4);
            let b = l1_branches(&tb, n)?;
            Ok((tb, b))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn zeta_identities(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let n = cfg.t_order;
    let m = cfg.prec;
    let (tb, branches) = context_with_roots(cfg, n)?;
    let ctx = tb.ctx().clone();
    let mut rec = Recorder::new("zeta-identities");
    rec.holds(
        "branches",
        "l_1 has exactly q branches",
        "all roots of c^q - c = 1",
        branches.len() == ctx.q() as usize,
        Some(format!("{} branches over F_{}^{}", branches.len(), ctx.p(), ctx.m())),
    );
    let x = Series::x_pow(&ctx, 1);
    for (b, br) in branches.iter().enumerate() {
        let r = l1_equation_residual(&tb, &br.expansion)?;
        rec.series(
            &format!("equation-{b}"),
            "(1 - tau) d l_1 = t",
            "index <= N - 1",
            Floor::ToPrecision,
            r.coeffs(),
            r.len() == n,
        );
        let mut point = Vec::new();
        for s in fq_polys_below(&ctx, 3) {
            if s.is_zero() {
                continue;
            }
            let t = s.mul(&x);
            point.push(br.expansion.eval_at(&tb, &t)?.sub(&polylog_analytic(&tb, 1, &t)?));
        }
        rec.series(
            &format!("analytic-{b}"),
            "l_1(t) = analytic polylogarithm part at t",
            "t = xs, deg s <= 2",
            Floor::AtLeast(m - 5),
            &point,
            true,
        );
        let zt = ZetaTable::new(&tb, br, 4)?;
        let rep = zeta_identity_checks(&tb, &zt, 5, 4)?;
        let floor = Valuation::int(m - 10);
        let mut push = |name: &str, anchor: &str, range: &str, vals: &[Valuation]| {
            let ok = vals.iter().all(|v| *v >= floor);
            rec.push(name, anchor, range, Floor::AtLeast(m - 10), vals, None, ok);
        };
        let coeff = &rep.coefficient[..rep.coefficient.len().min(4)];
        push(&format!("coefficients-{b}"), "c_i = sum_r A_{i,r} zeta(x^{r-1})", "i <= 4", coeff);
        push(
            &format!("functional-{b}"),
            "zeta(x^{-n}) = sum_i (-1)^{i+1}/L_i sum_r A_{i,r} zeta(x^{r-n})",
            "n <= 4",
            &rep.functional,
        );
        push(&format!("geometric-{b}"), "c_i = sum_j z_i^{q^j}", "i in [2, 5]", &rep.geometric);
        if rep.coefficient.len() < 4 || rep.functional.len() < 4 || rep.geometric.len() < 4 {
            return Err(CliError::Resource {
                resource: "t-order",
                message: format!("N={n} is too small for the zeta identity ranges"),
            });
        }
    }
    Ok(rec.finish())
}

fn laguerre_sigma(ctx: &Arc<Context>, n: usize) -> Vec<Series> {
    let mut s = vec![Series::one(ctx); n + 1];
    s[0] = Series::zero(ctx);
    s
}

pub fn umbral(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let q = ctx.q() as i64;
    let tb = Quantities::new(&ctx, 12);
    let mut rec = Recorder::new("umbral");
    let d = DeltaOperator::carlitz(&tb, 6);
    let seq = basic_sequence(&tb, &d, 5)?;
    let mut res = Vec::new();
    for n in 0..=4 {
        res.extend(coeffs_of(&seq.polys()[n].sub(&tb.carlitz_e(n))));
    }
    rec.series("basic-sequence", "basic sequence of d is e_n", "n <= 4", Floor::Exact, &res, true);

    let mut sigma = vec![Series::zero(&ctx)];
    for l in 1..=5 {
        sigma.push(sign(&ctx, l % 2 == 0).div(&tb.l(l))?);
    }
    let delta = delta_from_sigma(&tb, &sigma, 5)?;
    let seq2 = basic_sequence(&tb, &delta, 4)?;
    let mut res = Vec::new();
    for n in 1..=4 {
        let mut c = vec![Series::zero(&ctx); n + 1];
        c[n] = tb.d(n);
        c[n - 1] = tb.d(n).neg();
        res.extend(coeffs_of(&seq2.polys()[n].sub(&FqLinear::poly(c))));
    }
    rec.series(
        "example-two",
        "P_n = D_n (t^{q^n} - t^{q^{n-1}}) for sigma_l = (-1)^{l+1}/L_l",
        "1 <= n <= 4",
        Floor::ToPrecision,
        &res,
        true,
    );
    rec.records.extend(pascal(cfg)?);
    let ok = (0..=5).map(|i| binomial_type_check(&tb, seq.polys(), i)).collect::<carlitz_core::Result<Vec<_>>>()?;
    rec.holds(
        "binomial-type",
        "e_i(st) = sum_n binom(i,n)_K e_n(t) e_{i-n}(s)^{q^n}",
        "i <= 5, exact bivariate identity",
        ok.iter().all(|&b| b),
        None,
    );
    let units = KBinom::new(&tb, 8)?.all_units();
    rec.holds("units", "|binom(i,n)_K| = 1", "i <= 8", units, None);

    let lag = laguerre_sigma(&ctx, 6);
    let mut vals = Vec::new();
    let mut ok = true;
    for n in 1..=4u32 {
        let s = s_value(&tb, &lag, n as usize)?;
        let expect = -(q.pow(n) - q) / (q - 1);
        ok &= s.valuation_bound() == Valuation::int(expect);
        vals.push(format!("{}", s.valuation_bound()));
    }
    rec.holds(
        "example-one",
        "|S_n| = q^{(q^n - q)/(q - 1)} for sigma_l = 1",
        "1 <= n <= 4",
        ok,
        Some(format!("v(S_n) = {}", vals.join(", "))),
    );
    Ok(rec.finish())
}

pub fn pascal(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let tb = Quantities::new(&ctx, 12);
    let mut rec = Recorder::new("pascal");
    let ok = (0..=8).map(|i| pascal_check(&tb, i)).collect::<carlitz_core::Result<Vec<_>>>()?;
    rec.holds("pascal", "Pascal recursion for K-binomial coefficients", "i <= 8", ok.iter().all(|&b| b), None);
    Ok(rec.finish())
}

fn random_word_element(rng: &mut ChaCha8Rng, ctx: &Arc<Context>, n: usize) -> Result<WeylElement> {
    let mut e = WeylElement::zero(ctx, n)?;
    for _ in 0..rng.gen_range(1..=2) {
        let mut factors = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let g = match rng.gen_range(0..2 + n) {
                0 => Generator::Tau,
                1 => Generator::D,
                j => Generator::Delta(j - 2),
            };
            factors.push(Factor::Gen(g));
        }
        let scalar = rand_poly(ctx, rng, 2).add(&Series::one(ctx));
        factors.insert(0, Factor::Scalar(scalar));
        e = e.add(&WeylElement::product(ctx, n, &factors)?)?;
    }
    Ok(e)
}

pub fn weyl(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut rec = Recorder::new("weyl");
    // q-th roots of the scalars nest, so products need room to ramify
    let ctx = cfg.context_with(cfg.prec, cfg.ram_cap.max(12))?;
    let mut rng = rng_for(cfg, 12);
    let mut ok = true;
    for i in 0..50 {
        let n = i % 3;
        let a = random_word_element(&mut rng, &ctx, n)?;
        let b = random_word_element(&mut rng, &ctx, n)?;
        let c = random_word_element(&mut rng, &ctx, n)?;
        let left = a.mul(&b)?.mul(&c)?;
        let right = a.mul(&b.mul(&c)?)?;
        ok &= left.eq_to_precision(&right);
    }
    rec.holds("associativity", "(ab)c = a(bc) in normal form", "50 random triples", ok, None);

    let ctx = cfg.context_with(cfg.prec, cfg.ram_cap.max(6))?;
    let tb = Quantities::new(&ctx, 10);
    let root = tb.bracket(1).qth_root()?;
    let mut annihilator = |name: &str, anchor: &str, op: WeylElement, f: carlitz_core::weyl::MultiSeries, order: usize| -> Result<()> {
        let r = annihilator_check(&op, &f)?;
        let v = r.residual.valuation();
        rec.push(name, anchor, &format!("order {order}"), Floor::ToPrecision, &[v], None, r.annihilates);
        Ok(())
    };
    let d1 = WeylElement::d(&ctx, 1)?;
    annihilator(
        "carlitz-module",
        "d_s C_s(t) = C_s(t)",
        d1.sub(&WeylElement::one(&ctx, 1)?)?,
        carlitz_module_function(&tb, 6)?,
        6,
    )?;
    annihilator(
        "hypergeometric",
        "d_s F = F for the hypergeometric generating function",
        WeylElement::d(&ctx, 2)?.sub(&WeylElement::one(&ctx, 2)?)?,
        hypergeometric_generating_function(&tb, 5)?,
        5,
    )?;
    annihilator(
        "k-binomial",
        "d_s f = Delta_t f + [1]^{1/q} f for the K-binomial generating function",
        d1.sub(&WeylElement::delta(&ctx, 1, 0)?)?.sub(&WeylElement::scalar(&ctx, 1, root)?)?,
        kbinomial_function(&tb, 6)?,
        6,
    )?;

    let nu_max = 8u32;
    let prec = estimator_precision(ctx.q(), nu_max, DEFAULT_PIVOT_MARGIN);
    let hi = cfg.context_with(prec, cfg.ram_cap.max(8))?;
    let tb = Quantities::new(&hi, 20);
    let c = carlitz_module_function(&tb, 2 * nu_max as usize + 2)?;
    let rep = filtration_dimension_estimate(&c, nu_max, DEFAULT_PIVOT_MARGIN)?;
    let free: Vec<u64> = (0..=nu_max as u64).map(|nu| free_word_count(0, nu)).collect();
    let formula: Vec<u64> = (0..=nu_max as u64).map(|nu| (nu + 1) * (nu + 2) / 2).collect();
    let dims: Vec<u64> = rep.dims.iter().map(|&d| d as u64).collect();
    rec.holds(
        "free-count",
        "words tau^a d^b of degree <= nu number (nu+1)(nu+2)/2",
        "nu <= 8",
        free == formula && dims == formula,
        Some(format!("dims on C_s(t): {dims:?}")),
    );
    rec.holds(
        "growth",
        "growth exponent of the filtration on C_s(t) in [1.5, 2.5]",
        "nu_max = 8",
        (1.5..=2.5).contains(&rep.growth_exponent),
        Some(format!("exponent {:.4}, working precision {prec}, window {}", rep.growth_exponent, rep.window)),
    );
    Ok(rec.finish())
}

fn rand_series(ctx: &Arc<Context>, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Series {
    let size = ctx.size();
    let n = rng.gen_range(0..6);
    let terms: Vec<(i64, Fe)> = (0..n).map(|_| (rng.gen_range(lo..hi), Fe(rng.gen_range(0..size)))).collect();
    Series::from_parts(ctx, 0, terms, None)
}

pub fn arithmetic(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let ctx = cfg.context()?;
    let q = ctx.q() as usize;
    let mut rng = rng_for(cfg, 13);
    let mut rec = Recorder::new("arithmetic");
    let cases = 200;
    let (mut roots, mut ultra, mut counts, mut constant) = (true, true, true, true);
    let mut as_res = Vec::new();
    for _ in 0..cases {
        let a = rand_series(&ctx, &mut rng, -4, 12);
        let b = rand_series(&ctx, &mut rng, -4, 12);
        roots &= a.frob().qth_root()? == a;
        if let Ok(r) = a.qth_root() {
            roots &= r.frob() == a;
        }
        let (va, vb) = (a.valuation(), b.valuation());
        let s = a.add(&b);
        ultra &= s.valuation() >= va.min(vb);
        if va != vb {
            ultra &= s.valuation() == va.min(vb);
        }

        let v = rand_series(&ctx, &mut rng, 1, 10);
        if !v.is_zero() {
            let z = artin_schreier_small(&v)?;
            as_res.push(z.qth_root()?.sub(&z).sub(&v));
            let sols = artin_schreier_solutions(&v)?;
            counts &= sols.len() == q;
            for (i, zi) in sols.iter().enumerate() {
                counts &= zi.qth_root()?.sub(zi).sub(&v).is_zero();
                counts &= sols[..i].iter().all(|zj| !zj.eq_to_precision(zi));
            }
        }
        let c = Fe(rng.gen_range(0..ctx.size()));
        let target = ctx.sub(ctx.frob(c), c);
        constant &= constant_artin_schreier(&ctx, target)?.len() == q;
    }
    let range = format!("{cases} random cases");
    rec.holds("roots", "(a^q)^{1/q} = a and (a^{1/q})^q = a", &range, roots, None);
    rec.holds("ultrametric", "v(a + b) >= min(v(a), v(b)), equality when they differ", &range, ultra, None);
    rec.series("artin-schreier", "z^{1/q} - z = v for the small solution", &range, Floor::ToPrecision, &as_res, true);
    rec.holds("solution-count", "z^{1/q} - z = v has exactly q solutions", &range, counts, None);
    rec.holds("constant-count", "c^q - c = a has exactly q solutions when solvable", &range, constant, None);
    Ok(rec.finish())
}
