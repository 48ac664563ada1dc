//! Solvers driven by JSON problem files.
//!
//! Problem files (series may be expression strings or full records):
//!
//! * regular: `{"pi": [matrix, ...], "phi": [[s, ...], ...], "y0": [s, ...]}`
//!   with a matrix given as a list of rows, for dy = sum_k pi_k y^{q^k} + f
//!   and f = sum_l phi_l t^{q^l}/D_l.
//! * singular: `{"alpha": [[s, ...], ...], "phi": [s, ...], "initial": [s, ...]}`
//!   for sum_j sum_k alpha[j][k] tau^k d^j u = f.
//! * power: `{"lambda": s}` for tau d u = lambda u, u(1) = 1.
//! * recursion48: `{"a": int, "b": int, "c0": s, "c1": s, "policy": p}` with
//!   p one of "zero", "generic", `{"constant": digits}`, `{"per_step": [digits, ...]}`.

use std::sync::Arc;

use carlitz_core::carlitz::Quantities;
use carlitz_core::linear::FqLinear;
use carlitz_core::matrix::Matrix;
use carlitz_core::ode::{
    formal_solve_singular, power_function, recursion_48, recursion_48_residual, regular_residual,
    regular_residual_scaled, solve_regular, BranchPolicy, RegularSystem, SingularEquation,
};
use carlitz_core::operators::{apply_operator, carlitz_action, BasisAction, Operator};
use carlitz_core::{Context, Fe, Series, Valuation};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::format::{ExpansionRecord, SeriesInput, SeriesRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Regular,
    Singular,
    Power,
    Recursion48,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegularInput {
    pi: Vec<Vec<Vec<SeriesInput>>>,
    #[serde(default)]
    phi: Vec<Vec<SeriesInput>>,
    y0: Vec<SeriesInput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingularInput {
    alpha: Vec<Vec<SeriesInput>>,
    #[serde(default)]
    phi: Vec<SeriesInput>,
    #[serde(default)]
    initial: Vec<SeriesInput>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PowerInput {
    lambda: Option<SeriesInput>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum PolicyInput {
    Zero,
    /// the constant branch 1 at every step
    Generic,
    Constant(Vec<u32>),
    PerStep(Vec<Vec<u32>>),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RecursionInput {
    a: Option<i64>,
    b: Option<i64>,
    c0: Option<SeriesInput>,
    c1: Option<SeriesInput>,
    policy: Option<PolicyInput>,
}

/// Values given on the command line, overriding the file.
#[derive(Clone, Debug, Default)]
pub struct SolveOverrides {
    pub lambda: Option<String>,
    pub policy: Option<PolicyInput>,
}

/// Certificate attached to every solution.
#[derive(Serialize)]
struct Certificate {
    identity: String,
    range: String,
    min_valuation: String,
    residuals: Vec<String>,
}

impl Certificate {
    fn new(identity: &str, range: String, residuals: &[Series]) -> Self {
        let vals: Vec<Valuation> = residuals.iter().map(Series::valuation_bound).collect();
        Certificate {
            identity: identity.into(),
            range,
            min_valuation: vals.iter().copied().min().unwrap_or(Valuation::Infinite).to_string(),
            residuals: vals.iter().map(Valuation::to_string).collect(),
        }
    }
}

fn series_list(ctx: &Arc<Context>, v: &[SeriesInput]) -> Result<Vec<Series>> {
    v.iter().map(|s| s.to_series(ctx)).collect()
}

fn matrix(ctx: &Arc<Context>, rows: &[Vec<SeriesInput>]) -> Result<Matrix> {
    let rows = rows.iter().map(|r| series_list(ctx, r)).collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows).map_err(|e| CliError::input(format!("bad matrix: {e}")))
}

fn fq_digits(ctx: &Arc<Context>, d: &[u32]) -> Result<Fe> {
    let c = ctx.from_digits(d).map_err(|e| CliError::input(format!("bad branch constant {d:?}: {e}")))?;
    if !ctx.in_fq(c) {
        return Err(CliError::input(format!("branch constant {d:?} is not in F_q")));
    }
    Ok(c)
}

fn parse_input<T: for<'de> Deserialize<'de> + Default>(input: Option<&str>) -> Result<T> {
    match input {
        Some(s) => Ok(serde_json::from_str(s)?),
        None => Ok(T::default()),
    }
}

fn require<'a>(input: Option<&'a str>, problem: &str) -> Result<&'a str> {
    input.ok_or_else(|| CliError::input(format!("solve {problem} needs an input file (--in)")))
}

/// Solve `problem` from the JSON text `input`; returns the solution document.
pub fn cmd_solve(problem: Problem, input: Option<&str>, over: &SolveOverrides, cfg: &RunConfig) -> Result<Value> {
    let ctx = cfg.context()?;
    let n = cfg.t_order;
    let tb = Quantities::new(&ctx, n + 4);
    let header = json!({
        "p": ctx.p(), "m": ctx.m(), "q": ctx.q(), "prec": cfg.prec, "t_order": n, "ram_cap": cfg.ram_cap,
    });
    let body = match problem {
        Problem::Regular => {
            let inp: RegularInput = serde_json::from_str(require(input, "regular")?)?;
            let sys = RegularSystem {
                pi: inp.pi.iter().map(|m| matrix(&ctx, m)).collect::<Result<_>>()?,
                phi: inp.phi.iter().map(|v| series_list(&ctx, v)).collect::<Result<_>>()?,
                y0: series_list(&ctx, &inp.y0)?,
            };
            let y = solve_regular(&tb, &sys, n)?;
            let dim = sys.dim();
            let components: Vec<ExpansionRecord> = (0..dim)
                .map(|c| {
                    let coeffs = (0..=n).map(|i| y[i][c].div(&tb.d(i))).collect::<carlitz_core::Result<Vec<_>>>()?;
                    Ok(ExpansionRecord::monomial(&FqLinear::truncated(coeffs)))
                })
                .collect::<Result<_>>()?;
            let divided: Vec<Vec<SeriesRecord>> =
                y.iter().map(|v| v.iter().map(SeriesRecord::from_series).collect()).collect();
            let scaled: Vec<Series> = regular_residual_scaled(&tb, &sys, &y)?.into_iter().flatten().collect();
            let mono: Vec<Series> =
                regular_residual(&tb, &sys, &y)?.iter().flat_map(|r| r.coeffs().to_vec()).collect();
            json!({
                "divided": divided,
                "components": components,
                "certificate": [
                    Certificate::new("dy - P(tau)y - f, scaled by D_l", format!("index < {n}"), &scaled),
                    Certificate::new("dy - P(tau)y - f", format!("index < {n}"), &mono),
                ],
            })
        }
        Problem::Singular => {
            let inp: SingularInput = serde_json::from_str(require(input, "singular")?)?;
            let eq = SingularEquation {
                alpha: inp.alpha.iter().map(|r| series_list(&ctx, r)).collect::<Result<_>>()?,
                phi: series_list(&ctx, &inp.phi)?,
                initial: series_list(&ctx, &inp.initial)?,
            };
            let sol = formal_solve_singular(&tb, &eq, n)?;
            let residual = singular_residual(&tb, &eq, &sol.coeffs)?;
            let u = FqLinear::truncated(
                sol.coeffs.iter().enumerate().map(|(i, c)| c.div(&tb.d(i))).collect::<carlitz_core::Result<_>>()?,
            );
            json!({
                "divided": sol.coeffs.iter().map(SeriesRecord::from_series).collect::<Vec<_>>(),
                "solution": ExpansionRecord::monomial(&u),
                "growth": sol.growth.iter().map(|g| if g.is_finite() { json!(g) } else { json!(null) }).collect::<Vec<_>>(),
                "bounded_below": sol.bounded_below,
                "certificate": Certificate::new(
                    "sum_j A_j(tau) d^j u - f",
                    format!("index < {}", residual.len()),
                    &residual,
                ),
            })
        }
        Problem::Power => {
            let inp: PowerInput = parse_input(input)?;
            let lambda = match (&over.lambda, &inp.lambda) {
                (Some(s), _) => crate::parse::parse_series(&ctx, s)?,
                (None, Some(l)) => l.to_series(&ctx)?,
                (None, None) => return Err(CliError::input("solve power needs lambda (--lambda or the input file)")),
            };
            let u = power_function(&tb, &lambda, n)?;
            let tdu = carlitz_action(&tb, BasisAction::TauD, &u)?;
            let residual: Vec<Series> = (0..tdu.len())
                .map(|i| tdu.coeffs()[i].sub(&u.coeffs()[i].mul(&lambda)))
                .collect();
            let mono = tb.from_carlitz(&u)?;
            json!({
                "lambda": SeriesRecord::from_series(&lambda),
                "finite": !u.is_truncated(),
                "carlitz": ExpansionRecord::carlitz(&u),
                "monomial": ExpansionRecord::monomial(&mono),
                "certificate": Certificate::new("tau d u - lambda u", format!("index < {}", residual.len()), &residual),
            })
        }
        Problem::Recursion48 => {
            let inp: RecursionInput = parse_input(input)?;
            let policy_in = over.policy.clone().or(inp.policy).unwrap_or(PolicyInput::Zero);
            let generic = policy_in == PolicyInput::Generic;
            let policy = match &policy_in {
                PolicyInput::Zero => BranchPolicy::Zero,
                PolicyInput::Generic => BranchPolicy::Constant(Fe::ONE),
                PolicyInput::Constant(d) => BranchPolicy::Constant(fq_digits(&ctx, d)?),
                PolicyInput::PerStep(v) => {
                    BranchPolicy::PerStep(v.iter().map(|d| fq_digits(&ctx, d)).collect::<Result<_>>()?)
                }
            };
            let a = inp.a.unwrap_or(if generic { 1 } else { 0 });
            let b = inp.b.unwrap_or(0);
            let one = Series::one(&ctx);
            let c0 = inp.c0.map(|s| s.to_series(&ctx)).transpose()?.unwrap_or_else(|| one.clone());
            let c1 = match inp.c1 {
                Some(s) => s.to_series(&ctx)?,
                None if generic => one.clone(),
                None => Series::zero(&ctx),
            };
            let rec = recursion_48(&tb, a, b, &c0, &c1, &policy, n)?;
            let residual = recursion_48_residual(&tb, a, b, &rec.coeffs)?;
            json!({
                "a": a,
                "b": b,
                "policy": policy_in,
                "carlitz": ExpansionRecord::carlitz(&rec.coeffs),
                "strongly-singular": rec.strongly_singular,
                "certificate": Certificate::new(
                    "c_{i+2}^{1/q} - c_{i+2} = v_i(c_i, c_{i+1})",
                    format!("i < {}", residual.len()),
                    &residual,
                ),
            })
        }
    };
    let mut doc = json!({ "problem": problem_name(problem), "config": header });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    Ok(doc)
}

fn problem_name(p: Problem) -> &'static str {
    match p {
        Problem::Regular => "regular",
        Problem::Singular => "singular",
        Problem::Power => "power",
        Problem::Recursion48 => "recursion48",
    }
}

/// sum_j sum_k alpha[j][k] tau^k d^j u - f on u = sum u_n t^{q^n}/D_n.
fn singular_residual(tb: &Quantities, eq: &SingularEquation, u: &[Series]) -> Result<Vec<Series>> {
    let ctx = tb.ctx();
    let mono = FqLinear::truncated(u.iter().enumerate().map(|(i, c)| c.div(&tb.d(i))).collect::<carlitz_core::Result<_>>()?);
    let mut acc: Option<FqLinear> = None;
    let mut dj = mono;
    for row in &eq.alpha {
        for (k, a) in row.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            let term = (0..k).fold(dj.clone(), |v, _| v.frob()).scale_series(a);
            acc = Some(match acc {
                None => term,
                Some(s) => s.add(&term),
            });
        }
        dj = apply_operator(tb, &Operator::D, &dj)?;
    }
    let mut r = acc.unwrap_or_else(|| FqLinear::poly(vec![]));
    let known = r.len();
    let f: Vec<Series> = (0..known)
        .map(|l| match eq.phi.get(l) {
            Some(p) => p.div(&tb.d(l)),
            None => Ok(Series::zero(ctx)),
        })
        .collect::<carlitz_core::Result<_>>()?;
    r = r.sub(&FqLinear::poly(f));
    Ok(r.coeffs().to_vec())
}
