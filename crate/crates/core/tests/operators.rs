use std::sync::Arc;

use carlitz_core::carlitz::{fq_polys_below, CarlitzExpansion, Quantities};
use carlitz_core::hyperdiff::{fractional_delta, fractional_delta_eigen};
use carlitz_core::linear::FqLinear;
use carlitz_core::operators::*;
use carlitz_core::{Context, Fe, Series, Valuation};
use proptest::prelude::*;

fn ctx(p: u32) -> Arc<Context> {
    Context::new(p, 1, 1).unwrap()
}

fn poly_from(ctx: &Arc<Context>, digits: &[u32]) -> Series {
    let c: Vec<Fe> = digits.iter().map(|&d| ctx.from_int(d as i64)).collect();
    Series::from_coeffs(ctx, &c)
}

fn linear_from(ctx: &Arc<Context>, rows: &[Vec<u32>]) -> FqLinear {
    FqLinear::poly(rows.iter().map(|r| poly_from(ctx, r)).collect())
}

fn delta_pointwise(u: &FqLinear, t: &Series) -> Series {
    let x = Series::x_pow(t.ctx(), 1);
    u.eval(&x.mul(t)).sub(&x.mul(&u.eval(t)))
}

#[test]
fn delta_kills_t_and_scales_monomials() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 6);
    let t = FqLinear::poly(vec![Series::one(&k)]);
    let r = apply_operator(&tb, &Operator::Delta, &t).unwrap();
    assert!(r.is_empty());
    let t4 = FqLinear::poly(vec![Series::zero(&k), Series::zero(&k), Series::one(&k)]);
    let r = apply_operator(&tb, &Operator::DeltaN(2), &t4).unwrap();
    assert_eq!(r.coeffs()[2], tb.d(2));
}

#[test]
fn d_fixes_exponential() {
    for p in [2, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 8);
        let e = tb.carlitz_exp(6).unwrap();
        let de = apply_operator(&tb, &Operator::D, &e).unwrap();
        assert_eq!(de.len(), 6);
        assert!(de.eq_to_precision(&e.truncate_order(6)));
    }
}

#[test]
fn delta_matches_pointwise_definition() {
    for p in [2, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 6);
        let u = linear_from(&k, &[vec![1, 1], vec![0, 1, 1], vec![1]]);
        let du = apply_operator(&tb, &Operator::Delta, &u).unwrap();
        for t in fq_polys_below(&k, 3) {
            assert_eq!(du.eval(&t), delta_pointwise(&u, &t));
        }
    }
}

#[test]
fn basis_actions_match_pointwise_evaluation() {
    for p in [2, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 8);
        let points = fq_polys_below(&k, 4);
        let x = Series::x_pow(&k, 1);
        let samples = [
            CarlitzExpansion::basis(&k, 1),
            CarlitzExpansion::poly(vec![poly_from(&k, &[1, 1]), Series::zero(&k), x.clone()]),
            CarlitzExpansion::poly(vec![Series::one(&k), x.clone(), Series::one(&k), x.square()]),
        ];
        for c in &samples {
            let dc = carlitz_action(&tb, BasisAction::TauD, c).unwrap();
            let qc = carlitz_action(&tb, BasisAction::QPower, c).unwrap();
            for t in &points {
                let xt = x.mul(t);
                let lhs = c.eval_at(&tb, &xt).unwrap().sub(&x.mul(&c.eval_at(&tb, t).unwrap()));
                assert_eq!(dc.eval_at(&tb, t).unwrap(), lhs);
                assert_eq!(qc.eval_at(&tb, t).unwrap(), c.eval_at(&tb, t).unwrap().frob());
            }
            // d agrees with the monomial action after conversion
            let dd = carlitz_action(&tb, BasisAction::D, c).unwrap();
            let mono = tb.from_carlitz(c).unwrap();
            let dm = apply_operator(&tb, &Operator::D, &mono).unwrap();
            assert!(tb.from_carlitz(&dd).unwrap().eq_to_precision(&dm));
        }
    }
}

#[test]
fn basis_action_examples() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 8);
    let f3 = CarlitzExpansion::basis(&k, 3);
    assert_eq!(carlitz_action(&tb, BasisAction::D, &f3).unwrap(), CarlitzExpansion::basis(&k, 2));
    let f1 = CarlitzExpansion::basis(&k, 1);
    let r = carlitz_action(&tb, BasisAction::TauD, &f1).unwrap();
    assert_eq!(r, CarlitzExpansion::poly(vec![Series::one(&k), tb.bracket(1)]));
    let f0 = CarlitzExpansion::basis(&k, 0);
    let r = carlitz_action(&tb, BasisAction::QPower, &f0).unwrap();
    assert_eq!(r, CarlitzExpansion::poly(vec![Series::one(&k), tb.bracket(1)]));
    let t2 = FqLinear::poly(vec![Series::zero(&k), Series::one(&k)]);
    assert_eq!(tb.to_carlitz(&t2).unwrap(), r);
}

#[test]
fn eigenrelation_for_basis() {
    for p in [2, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 8);
        for i in 0..=6 {
            let f = CarlitzExpansion::basis(&k, i);
            let df = carlitz_action(&tb, BasisAction::D, &f).unwrap();
            let tdf = carlitz_action(&tb, BasisAction::QPower, &df).unwrap();
            let lhs = tdf.add(&df.scale(&Series::from_int(&k, -1)));
            assert_eq!(lhs, f.scale(&tb.bracket(i)), "i = {i}");
        }
    }
}

#[test]
fn divided_basis_ladder() {
    for p in [2, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 8);
        let divided = |i: usize| {
            let mut c = vec![Series::zero(&k); i + 1];
            c[i] = Series::one(&k).div(&tb.d(i)).unwrap();
            FqLinear::poly(c)
        };
        for i in 1..=6 {
            let up = apply_operator(&tb, &Operator::Tau, &divided(i - 1)).unwrap();
            assert!(up.eq_to_precision(&divided(i).scale_series(&tb.bracket(i))));
            let down = apply_operator(&tb, &Operator::D, &divided(i)).unwrap();
            assert!(down.eq_to_precision(&divided(i - 1)));
        }
    }
}

#[test]
fn coefficient_recovery() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 8);
    let one = Series::one(&k);
    let t = FqLinear::poly(vec![one.clone()]);
    assert_eq!(recover_coefficient(&tb, &t, 0).unwrap(), one);
    let u = FqLinear::poly(vec![one.clone(), one.div(&tb.d(1)).unwrap()]);
    assert!(recover_coefficient(&tb, &u, 1).unwrap().eq_to_precision(&one));
    let e = tb.carlitz_exp(6).unwrap();
    for n in 0..=6 {
        assert!(recover_coefficient(&tb, &e, n).unwrap().eq_to_precision(&one));
    }
    assert!(recover_coefficient(&tb, &e, 7).is_err());
}

#[test]
fn kappa_is_the_derivative_at_zero() {
    // e_i(x^n)/x^n - (-1)^i D_i/L_i vanishes to order n(q-1): the limit
    // defining f_i'(0) equals (-1)^i/L_i.
    for p in [2, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 8);
        for i in 1..=5usize {
            let ratio = tb.d(i).div(&tb.l(i)).unwrap();
            assert!(ratio.is_exact());
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let target = ratio.mul(&Series::from_int(&k, sign));
            for n in [8i64, 10, 12] {
                let xn = Series::x_pow(&k, n);
                let vals = tb.carlitz_values(&xn, i).unwrap();
                let ei = vals[i].mul(&tb.d(i));
                let diff = ei.div(&xn).unwrap().sub(&target);
                let bound = Valuation::int(n * (p as i64 - 1));
                assert!(diff.valuation_bound() >= bound, "i={i} n={n}");
            }
            let kap = kappa(&tb, i).unwrap();
            assert!(kap.mul(&tb.d(i)).eq_to_precision(&target));
        }
    }
}

#[test]
fn integrals_of_basis_and_monomials() {
    for p in [2, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 8);
        for n in 0..=5 {
            let v = integral(&tb, &CarlitzExpansion::basis(&k, n)).unwrap();
            let sign = if (n + 1) % 2 == 0 { 1 } else { -1 };
            let expect = Series::from_int(&k, sign).div(&tb.l(n + 1)).unwrap();
            assert!(v.eq_to_precision(&expect));
        }
        for n in 0..=4 {
            let mut c = vec![Series::zero(&k); n + 1];
            c[n] = Series::one(&k);
            let cx = tb.to_carlitz(&FqLinear::poly(c)).unwrap();
            let v = integral(&tb, &cx).unwrap();
            let expect = Series::from_int(&k, -1).div(&tb.bracket(n + 1)).unwrap();
            assert!(v.eq_to_precision(&expect), "n = {n}");
        }
    }
}

#[test]
fn integral_of_module_is_log_minus_identity() {
    for p in [2, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 8);
        let order = 5;
        let family: Vec<_> = (0..=order)
            .map(|i| {
                let mut z = vec![Series::zero(&k); i + 1];
                z[i] = Series::one(&k);
                (FqLinear::poly(z), CarlitzExpansion::basis(&k, i))
            })
            .collect();
        let lhs = integrate_family(&tb, &family).unwrap();
        let log = tb.carlitz_log(order + 1).unwrap();
        let z = FqLinear::poly(vec![Series::one(&k)]);
        let rhs = log.sub(&z);
        assert!(lhs.eq_to_precision(&rhs));
    }
}

#[test]
fn integral_of_exponential_family() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 10);
    let order = 5;
    let family: Vec<_> = (0..=order)
        .map(|n| {
            let mut c = vec![Series::zero(&k); n + 1];
            c[n] = Series::one(&k).div(&tb.d(n)).unwrap();
            let mut s = vec![Series::zero(&k); n + 1];
            s[n] = Series::one(&k);
            (FqLinear::poly(c), tb.to_carlitz(&FqLinear::poly(s)).unwrap())
        })
        .collect();
    let lhs = integrate_family(&tb, &family).unwrap();
    let rhs = FqLinear::poly(vec![Series::one(&k)]).sub(&tb.carlitz_exp(order + 1).unwrap());
    assert!(lhs.eq_to_precision(&rhs));
}

#[test]
fn antiderivative_examples() {
    let k = ctx(3);
    let tb = Quantities::new(&k, 6);
    assert!(antiderivative(&CarlitzExpansion::poly(vec![])).is_empty());
    let f0 = CarlitzExpansion::basis(&k, 0);
    assert_eq!(antiderivative(&f0), CarlitzExpansion::basis(&k, 1));
    let f = CarlitzExpansion::poly(vec![Series::x_pow(&k, 2), Series::one(&k), Series::x_pow(&k, 1)]);
    let s = antiderivative(&f);
    assert_eq!(carlitz_action(&tb, BasisAction::D, &s).unwrap(), f);
    assert!(s.eval_at(&tb, &Series::one(&k)).unwrap().is_exact_zero());
}

#[test]
fn smoothness_and_analyticity_windows() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 12);
    let t = CarlitzExpansion::basis(&k, 0);
    for order in 0..3 {
        let r = smoothness_profile(&tb, &t, order);
        assert!(r.decaying);
    }
    assert_eq!(smoothness_profile(&tb, &t, 0).norm, 1.0);
    let ones = CarlitzExpansion::truncated(vec![Series::one(&k); 9]);
    let r = smoothness_profile(&tb, &ones, 0);
    assert!(!r.decaying);
    assert_eq!(r.log_norm, 8.0);

    let poly = tb.to_carlitz(&FqLinear::poly(vec![Series::zero(&k), Series::zero(&k), Series::one(&k)]));
    let a = analyticity_radius(&tb, &poly.unwrap()).unwrap();
    assert_eq!(a.l, Some(0));

    for p in [2u32, 3] {
        let k = ctx(p);
        let q = p as i64;
        // |c_n| = q^{-q^{n-1}}
        let tb = Quantities::new(&k, 4);
        let c: Vec<Series> = (0..8u32).map(|n| Series::x_pow(&k, q.pow(n) / q)).collect();
        let a = analyticity_radius(&tb, &CarlitzExpansion::truncated(c)).unwrap();
        assert!((a.gamma - 1.0 / p as f64).abs() < 1e-12);
        assert_eq!(a.l, Some(if p == 2 { 2 } else { 1 }));
    }
}

#[test]
fn fractional_operator_examples() {
    for p in [2, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 8);
        let u = linear_from(&k, &[vec![1, 1], vec![0, 0, 1], vec![1, 0, 1]]);
        for n in 1..=3usize {
            let alpha = Series::x_pow(&k, n as i64);
            let mut iter = u.clone();
            for _ in 0..n {
                iter = apply_operator(&tb, &Operator::Delta, &iter).unwrap();
            }
            for t in fq_polys_below(&k, 2) {
                let lit = fractional_delta(&alpha, &u, &t).unwrap();
                assert_eq!(lit, iter.eval(&t));
                assert_eq!(fractional_delta_eigen(&tb, &alpha, &u, &t).unwrap(), lit);
            }
        }
        let zero = fractional_delta(&Series::zero(&k), &u, &Series::x_pow(&k, 1)).unwrap();
        assert!(zero.is_exact_zero());
    }
}

fn arb_digits(p: u32, len: usize) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0..p, 1..=len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn commutator_is_root_of_bracket(rows in proptest::collection::vec(arb_digits(2, 4), 1..=6)) {
        let k = ctx(2);
        let tb = Quantities::new(&k, 8);
        let u = linear_from(&k, &rows);
        let tau_minus = |v: &FqLinear| v.frob().sub(v);
        let d = |v: &FqLinear| apply_operator(&tb, &Operator::D, v).unwrap();
        let lhs = d(&tau_minus(&u)).sub(&tau_minus(&d(&u)));
        let root = tb.bracket(1).qth_root().unwrap();
        prop_assert_eq!(lhs, u.scale_series(&root));
    }

    #[test]
    fn integral_invariance(digits in proptest::collection::vec(arb_digits(3, 3), 1..=5)) {
        let k = ctx(3);
        let tb = Quantities::new(&k, 8);
        let f = CarlitzExpansion::poly(digits.iter().map(|d| poly_from(&k, d)).collect());
        let x = Series::x_pow(&k, 1);
        // f(xt) = Delta f + x f
        let fx = carlitz_action(&tb, BasisAction::TauD, &f).unwrap().add(&f.scale(&x));
        let lhs = integral(&tb, &fx).unwrap();
        let f1 = f.eval_at(&tb, &Series::one(&k)).unwrap();
        let rhs = x.mul(&integral(&tb, &f).unwrap()).sub(&f1.frob());
        prop_assert!(lhs.eq_to_precision(&rhs));
    }

    #[test]
    fn antiderivative_inverts_d(digits in proptest::collection::vec(arb_digits(2, 3), 1..=6)) {
        let k = ctx(2);
        let tb = Quantities::new(&k, 8);
        let f = CarlitzExpansion::truncated(digits.iter().map(|d| poly_from(&k, d)).collect());
        let s = antiderivative(&f);
        let back = carlitz_action(&tb, BasisAction::D, &s).unwrap();
        prop_assert!(back.eq_to_precision(&f));
    }

    #[test]
    fn fractional_semigroup(a in arb_digits(2, 4), b in arb_digits(2, 4), tdig in arb_digits(2, 3)) {
        let k = ctx(2);
        let tb = Quantities::new(&k, 8);
        let alpha = poly_from(&k, &a);
        let beta = poly_from(&k, &b);
        let u = linear_from(&k, &[vec![1], vec![0, 1], vec![1, 1]]);
        let t = poly_from(&k, &tdig);
        let inner = apply_operator(&tb, &Operator::FracDelta(beta.clone()), &u).unwrap();
        let lhs = fractional_delta(&alpha, &inner, &t).unwrap();
        let rhs = fractional_delta(&alpha.mul(&beta), &u, &t).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
