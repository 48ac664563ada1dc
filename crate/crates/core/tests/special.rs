use std::sync::Arc;

use carlitz_core::carlitz::{fq_polys_below, Quantities};
use carlitz_core::error::Error;
use carlitz_core::linear::FqLinear;
use carlitz_core::special::*;
use carlitz_core::{Context, Fe, Series, Valuation};
use proptest::prelude::*;

fn f2() -> Arc<Context> {
    Context::new(2, 1, 1).unwrap()
}

fn f4() -> Arc<Context> {
    Context::new(2, 2, 1).unwrap()
}

#[test]
fn pochhammer_cases() {
    let k = f2();
    let tb = Quantities::new(&k, 8);
    for n in 0..=4 {
        assert_eq!(pochhammer(&tb, 1, n).unwrap(), tb.d(n));
        // (2)_n is the q-th root of D_{n+1}
        assert_eq!(pochhammer(&tb, 2, n).unwrap().frob(), tb.d(n + 1));
    }
    assert!(pochhammer(&tb, 0, 1).unwrap().is_exact_zero());
    assert_eq!(pochhammer(&tb, -1, 1).unwrap(), Series::one(&k));
    let m2 = pochhammer(&tb, -2, 1).unwrap();
    assert!(m2.mul(&tb.l(1).frob()).eq_to_precision(&Series::one(&k)));
    let p = Pochhammer::new(&tb, -3, 5).unwrap();
    assert_eq!(p.vanishes_from(), Some(4));
    assert!(p.get(4).unwrap().is_exact_zero() && !p.get(3).unwrap().is_zero());
}

#[test]
fn hypergeometric_examples() {
    let k = f2();
    let tb = Quantities::new(&k, 8);
    let y = hypergeometric_series(&tb, &[1, 1], &[1], 5).unwrap();
    assert!(y.coeffs().iter().all(|c| c.eq_to_precision(&Series::one(&k))));
    let t = hypergeometric_series(&tb, &[-1], &[-1], 5).unwrap();
    assert!(!t.is_truncated());
    assert_eq!(t.len(), 2);
    let e = hypergeometric_series(&tb, &[], &[], 4).unwrap();
    let exp = tb.carlitz_exp(4).unwrap();
    assert!(e.eq_to_precision(&exp));
}

#[test]
fn hypergeometric_equation_holds() {
    for p in [2u32, 3] {
        let k = Context::new(p, 1, 1).unwrap();
        let tb = Quantities::new(&k, 8);
        for a in 1..=2 {
            for b in 1..=2 {
                for c in 1..=2 {
                    let r = hypergeom_equation_residual(&tb, a, b, c, 6).unwrap();
                    assert_eq!(r.len(), 6, "a={a} b={b} c={c}");
                    assert!(r.coeffs().iter().all(Series::is_zero), "p={p} a={a} b={b} c={c}");
                }
            }
        }
        // polynomial case with c = 1
        for (a, b) in [(-1, -2), (-3, -1), (-2, -2), (0, -3)] {
            let r = hypergeom_equation_residual(&tb, a, b, 1, 6).unwrap();
            assert!(r.coeffs().iter().all(Series::is_zero), "a={a} b={b}");
        }
        let zero = FqLinear::poly(vec![]);
        assert!(hypergeom_operator_residual(&tb, 1, 1, 1, &zero).unwrap().is_empty());
    }
}

#[test]
fn residual_detects_wrong_function() {
    let k = f2();
    let tb = Quantities::new(&k, 8);
    let y = hypergeometric_series(&tb, &[1, 2], &[1], 5).unwrap();
    let r = hypergeom_operator_residual(&tb, 1, 1, 1, &y).unwrap();
    assert!(!r.coeffs().iter().all(Series::is_zero));
}

#[test]
fn contiguous_relation() {
    let k = Context::new(3, 1, 1).unwrap();
    let tb = Quantities::new(&k, 8);
    for kk in 0..=3u64 {
        for nu in 0..=3u64 {
            assert!(contiguous_shift_check(&tb, &[kk], &[nu]).unwrap(), "k={kk} nu={nu}");
            for k2 in 0..=3u64 {
                assert!(contiguous_shift_check(&tb, &[kk, k2], &[nu]).unwrap());
            }
        }
    }
}

#[test]
fn l1_needs_roots() {
    let k = f2();
    let tb = Quantities::new(&k, 6);
    assert!(matches!(l1_branches(&tb, 5), Err(Error::MissingRoots(_))));
}

#[test]
fn l1_branches_solve_equation() {
    let k = f4();
    let tb = Quantities::new(&k, 10);
    let br = l1_branches(&tb, 8).unwrap();
    assert_eq!(br.len(), 2);
    for b in &br {
        let r = l1_equation_residual(&tb, &b.expansion).unwrap();
        assert_eq!(r.len(), 8);
        assert!(r.coeffs().iter().all(Series::is_zero));
        assert_eq!(k.add(k.frob(b.root), Fe::ONE), b.root);
    }
    let diff = br[0].expansion.add(&br[1].expansion.scale(&Series::from_int(&k, -1)));
    let rd = l1_equation_residual(&tb, &diff).unwrap();
    // the difference solves the homogeneous equation: only the t term cancels
    assert!(rd.coeffs()[0].eq_to_precision(&Series::from_int(&k, -1)));
    assert!(rd.coeffs()[1..].iter().all(Series::is_zero));
}

#[test]
fn l1_matches_analytic_part() {
    let k = f4();
    let tb = Quantities::new(&k, 10);
    let m = k.params().precision;
    let x = Series::x_pow(&k, 1);
    for b in l1_branches(&tb, 8).unwrap() {
        for s in fq_polys_below(&k, 3) {
            let t = s.mul(&x);
            if t.is_zero() {
                continue;
            }
            let lhs = b.expansion.eval_at(&tb, &t).unwrap();
            let rhs = polylog_analytic(&tb, 1, &t).unwrap();
            assert!(lhs.sub(&rhs).valuation_bound() >= Valuation::int(m - 5));
        }
    }
}

#[test]
fn polylog_chain() {
    let k = f4();
    let tb = Quantities::new(&k, 10);
    let br = l1_branches(&tb, 8).unwrap();
    let l2 = polylog(&tb, 2, &br[0]).unwrap();
    let back = carlitz_core::operators::carlitz_action(
        &tb,
        carlitz_core::operators::BasisAction::TauD,
        &l2,
    )
    .unwrap();
    for (a, b) in back.coeffs().iter().zip(br[0].expansion.coeffs()) {
        assert!(a.eq_to_precision(b));
    }
    let x = Series::x_pow(&k, 1);
    let lhs = l2.eval_at(&tb, &x).unwrap();
    let rhs = polylog_analytic(&tb, 2, &x).unwrap();
    assert!(lhs.sub(&rhs).valuation_bound() >= Valuation::int(k.params().precision - 5));
    let kexp = polylog_decay_exponent(&tb, &l2).unwrap();
    assert!(kexp <= 2, "{kexp}");
    assert!(polylog(&tb, 0, &br[0]).is_err());
}

#[test]
fn a_coefficients() {
    let k = f2();
    let tb = Quantities::new(&k, 8);
    assert_eq!(coefficient_a(&tb, 2, 1).unwrap(), tb.l(1));
    assert_eq!(coefficient_a(&tb, 2, 2).unwrap(), Series::one(&k));
    assert_eq!(coefficient_a(&tb, 1, 1).unwrap(), Series::one(&k));
    // direct subset sum with division for n = 4
    let k3 = Context::new(3, 1, 1).unwrap();
    let tb3 = Quantities::new(&k3, 8);
    let b = |i| tb3.bracket(i);
    let l3 = tb3.l(3);
    let pair = [(1, 2), (1, 3), (2, 3)]
        .iter()
        .fold(Series::zero(&k3), |acc, &(i, j)| acc.add(&l3.div(&b(i).mul(&b(j))).unwrap()));
    assert!(coefficient_a(&tb3, 4, 3).unwrap().neg().eq_to_precision(&pair));
    assert!(coefficient_a(&tb, 2, 3).is_err());
}

#[test]
fn zeta_values_and_identities() {
    let k = f4();
    let tb = Quantities::new(&k, 10);
    let m = k.params().precision;
    let br = l1_branches(&tb, 8).unwrap();
    let zt = ZetaTable::new(&tb, &br[0], 4).unwrap();
    assert!(zt.zeta(&tb, &Series::zero(&k)).unwrap().is_exact_zero());
    let xm1 = Series::x_pow(&k, -1);
    let xm2 = Series::x_pow(&k, -2);
    assert_eq!(zt.zeta(&tb, &xm1).unwrap(), br[0].expansion.coeffs()[0]);
    let lin = zt.zeta(&tb, &xm1.add(&xm2)).unwrap();
    let sep = zt.zeta(&tb, &xm1).unwrap().add(&zt.zeta(&tb, &xm2).unwrap());
    assert_eq!(lin, sep);
    assert!(zt.zeta(&tb, &Series::x_pow(&k, 9)).is_err());
    let rep = zeta_identity_checks(&tb, &zt, 4, 4).unwrap();
    assert!(rep.min_coefficient() >= Valuation::int(m - 10));
    assert!(rep.min_functional() >= Valuation::int(m - 10));
    assert!(rep.min_geometric() >= Valuation::int(m - 10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zeta_is_linear(d1 in proptest::collection::vec(0i64..2, 1..5),
                      d2 in proptest::collection::vec(0i64..2, 1..5),
                      s1 in -3i64..2, s2 in -3i64..2) {
        let k = f4();
        let tb = Quantities::new(&k, 10);
        let br = l1_branches(&tb, 8).unwrap();
        let zt = ZetaTable::new(&tb, &br[1], 3).unwrap();
        let a = Series::from_ints(&k, &d1).shift(s1.into());
        let b = Series::from_ints(&k, &d2).shift(s2.into());
        let (za, zb) = (zt.zeta(&tb, &a), zt.zeta(&tb, &b));
        if let (Ok(za), Ok(zb)) = (za, zb) {
            prop_assert!(zt.zeta(&tb, &a.add(&b)).unwrap().eq_to_precision(&za.add(&zb)));
        }
    }
}
