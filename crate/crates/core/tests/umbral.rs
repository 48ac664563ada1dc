use std::sync::Arc;

use carlitz_core::carlitz::Quantities;
use carlitz_core::error::Error;
use carlitz_core::linear::FqLinear;
use carlitz_core::umbral::*;
use carlitz_core::{Context, Series, Valuation};
use proptest::prelude::*;

fn ctx(p: u32) -> Arc<Context> {
    Context::new(p, 1, 1).unwrap()
}

fn laguerre_sigma(k: &Arc<Context>, n: usize) -> Vec<Series> {
    let mut s = vec![Series::one(k); n + 1];
    s[0] = Series::zero(k);
    s
}

fn example2_sigma(tb: &Quantities, n: usize) -> Vec<Series> {
    let k = tb.ctx();
    let mut s = vec![Series::zero(k)];
    for l in 1..=n {
        let sign = if l % 2 == 1 { 1 } else { -1 };
        s.push(Series::from_int(k, sign).div(&tb.l(l)).unwrap());
    }
    s
}

#[test]
fn kbinom_values() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 10);
    assert_eq!(kbinom(&tb, 2, 1).unwrap(), Series::from_ints(&k, &[1, 1, 1]));
    for i in 0..=8 {
        assert_eq!(kbinom(&tb, i, 0).unwrap(), Series::one(&k));
        assert_eq!(kbinom(&tb, i, i).unwrap(), Series::one(&k));
        assert!(pascal_check(&tb, i).unwrap(), "i={i}");
    }
    assert!(KBinom::new(&tb, 8).unwrap().all_units());
    let k3 = ctx(3);
    let tb3 = Quantities::new(&k3, 8);
    let kb = KBinom::new(&tb3, 5).unwrap();
    assert!(kb.all_units());
    assert!((0..=5).all(|i| pascal_check(&tb3, i).unwrap()));
}

#[test]
fn carlitz_basic_sequence() {
    for p in [2u32, 3] {
        let k = ctx(p);
        let tb = Quantities::new(&k, 8);
        let d = DeltaOperator::carlitz(&tb, 5);
        let seq = basic_sequence(&tb, &d, 4).unwrap();
        for n in 0..=4 {
            assert_eq!(seq.polys()[n], tb.carlitz_e(n), "p={p} n={n}");
        }
        for i in 0..=4 {
            assert!(binomial_type_check(&tb, seq.polys(), i).unwrap());
            for l in 0..=i {
                assert!(lowering_check(&tb, &d, &seq, i, l).unwrap());
            }
        }
        let q = seq.normalized(&tb).unwrap();
        assert!((0..=4).all(|i| normalized_binomial_check(&q, i)));
    }
}

#[test]
fn example_one_laguerre() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 10);
    let sigma = laguerre_sigma(&k, 6);
    for n in 1..=4usize {
        let s = s_value(&tb, &sigma, n).unwrap();
        let expect = -((1i64 << n) - 2);
        assert_eq!(s.valuation_bound(), Valuation::int(expect), "n={n}");
    }
    let delta = delta_from_sigma(&tb, &sigma, 6).unwrap();
    let seq = basic_sequence(&tb, &delta, 5).unwrap();
    for i in 0..=5 {
        assert!(binomial_type_check(&tb, seq.polys(), i).unwrap(), "i={i}");
    }
    for p in seq.polys().iter().skip(1) {
        // P_n(1) = 0
        let at_one = p.coeffs().iter().fold(Series::zero(&k), |a, c| a.add(c));
        assert!(at_one.is_zero());
    }
    // sigma refers to the Delta^{(l)}, i.e. to the basic sequence of d
    let dseq = basic_sequence(&tb, &DeltaOperator::carlitz(&tb, 6), 5).unwrap();
    let back = operator_expand(&tb, delta.mu(), &dseq, 5).unwrap();
    for (a, b) in back.iter().zip(&sigma) {
        assert!(a.eq_to_precision(b));
    }
    // against its own sequence, delta_0 is the first basis operator
    let own = operator_expand(&tb, delta.mu(), &seq, 5).unwrap();
    assert!(own[1].eq_to_precision(&Series::one(&k)));
    assert!(own.iter().enumerate().all(|(l, s)| l == 1 || s.is_zero()));
}

#[test]
fn example_two() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 10);
    let sigma = example2_sigma(&tb, 5);
    for n in 1..=5 {
        let s = s_value(&tb, &sigma, n).unwrap();
        assert!(s.mul(&tb.d(n)).eq_to_precision(&Series::one(&k)));
    }
    let delta = delta_from_sigma(&tb, &sigma, 5).unwrap();
    assert!(delta.mu()[1..].iter().all(|m| m.eq_to_precision(&Series::one(&k))));
    let seq = basic_sequence(&tb, &delta, 4).unwrap();
    for n in 1..=4 {
        let mut c = vec![Series::zero(&k); n + 1];
        c[n] = tb.d(n);
        c[n - 1] = tb.d(n).neg();
        assert!(seq.polys()[n].eq_to_precision(&FqLinear::poly(c)), "n={n}");
    }
    let f = FqLinear::poly(vec![Series::zero(&k), Series::one(&k)]);
    let rep = orthonormal_expand(&tb, &f, &delta, &seq).unwrap();
    assert!(!rep.theorem_applies);
}

#[test]
fn first_basic_polynomial() {
    let k = ctx(3);
    let tb = Quantities::new(&k, 6);
    let x = Series::x_pow(&k, 1);
    let mu = vec![Series::zero(&k), tb.bracket(1), x.add(&Series::one(&k)), x.square()];
    let d = DeltaOperator::from_eigenvalues(mu).unwrap();
    let seq = basic_sequence(&tb, &d, 3).unwrap();
    assert_eq!(seq.polys()[1], FqLinear::poly(vec![Series::from_int(&k, -1), Series::one(&k)]));
    for i in 0..=3 {
        assert!(binomial_type_check(&tb, seq.polys(), i).unwrap());
    }
    assert!(matches!(
        DeltaOperator::from_eigenvalues(vec![Series::zero(&k), Series::zero(&k)]),
        Err(Error::NotDeltaOperator { n: 1 })
    ));
}

#[test]
fn taylor_formula() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 10);
    let d = DeltaOperator::carlitz(&tb, 6);
    let seq = basic_sequence(&tb, &d, 5).unwrap();
    let t = FqLinear::poly(vec![Series::one(&k)]);
    let (parts, ok) = taylor_expand(&tb, &t, &d, &seq).unwrap();
    assert!(ok && parts.len() == 1);
    // f = t^q: s^q t + s^q (t^q - t)
    let tq = FqLinear::poly(vec![Series::zero(&k), Series::one(&k)]);
    let (parts, ok) = taylor_expand(&tb, &tq, &d, &seq).unwrap();
    assert!(ok);
    assert_eq!(parts[0], tq);
    assert_eq!(parts[1], tq);
    let lag = delta_from_sigma(&tb, &laguerre_sigma(&k, 6), 6).unwrap();
    let lseq = basic_sequence(&tb, &lag, 5).unwrap();
    let f = FqLinear::poly(vec![
        Series::x_pow(&k, 1),
        Series::one(&k),
        Series::zero(&k),
        Series::from_ints(&k, &[1, 1]),
    ]);
    assert!(taylor_expand(&tb, &f, &lag, &lseq).unwrap().1);
    for l in 0..=3 {
        assert!(nu_certificate(&d, &f, l).unwrap());
        assert!(nu_certificate(&lag, &f, l).unwrap());
    }
}

#[test]
fn operator_expansions() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 10);
    let d = DeltaOperator::carlitz(&tb, 6);
    let seq = basic_sequence(&tb, &d, 5).unwrap();
    let s = operator_expand(&tb, d.mu(), &seq, 5).unwrap();
    assert!(s[1] == Series::one(&k) && [0, 2, 3, 4, 5].iter().all(|&i| s[i].is_zero()));
    let eig2: Vec<Series> = (0..=5).map(|j| carlitz_core::operators::delta_n_eigenvalue(&tb, 2, j)).collect();
    let s2 = operator_expand(&tb, &eig2, &seq, 5).unwrap();
    assert!(s2[2] == Series::one(&k) && [0, 1, 3, 4, 5].iter().all(|&i| s2[i].is_zero()));
    let mut proj = vec![Series::one(&k); 6];
    proj[0] = Series::zero(&k);
    let s3 = operator_expand(&tb, &proj, &seq, 5).unwrap();
    for (a, b) in s3.iter().zip(example2_sigma(&tb, 5)) {
        assert!(a.eq_to_precision(&b));
    }
    let re = synthesize(&d, &s3, 5);
    for (a, b) in re.iter().zip(&proj) {
        assert!(a.eq_to_precision(b));
    }
}

#[test]
fn orthonormal_expansion() {
    let k = ctx(2);
    let tb = Quantities::new(&k, 10);
    let d = DeltaOperator::carlitz(&tb, 6);
    let seq = basic_sequence(&tb, &d, 5).unwrap();
    let tq2 = FqLinear::poly(vec![Series::zero(&k), Series::zero(&k), Series::one(&k)]);
    let rep = orthonormal_expand(&tb, &tq2, &d, &seq).unwrap();
    assert_eq!(rep.psi, vec![Series::one(&k), tb.bracket(2), tb.d(2)]);
    assert!(rep.reconstructs && rep.theorem_applies);
    assert!(rep.sampled_valuation >= rep.psi_valuation);

    let lag = delta_from_sigma(&tb, &laguerre_sigma(&k, 6), 6).unwrap();
    let lseq = basic_sequence(&tb, &lag, 5).unwrap();
    let q3 = lseq.normalized(&tb).unwrap()[3].clone();
    let rep = orthonormal_expand(&tb, &q3, &lag, &lseq).unwrap();
    assert!(rep.theorem_applies && rep.reconstructs);
    for (n, p) in rep.psi.iter().enumerate() {
        if n == 3 {
            assert!(p.eq_to_precision(&Series::one(&k)));
        } else {
            assert!(p.is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sigma_round_trip(digits in proptest::collection::vec(proptest::collection::vec(0i64..3, 1..3), 4)) {
        let k = ctx(3);
        let tb = Quantities::new(&k, 8);
        let mut sigma = vec![Series::zero(&k), Series::one(&k)];
        sigma.extend(digits.iter().map(|d| Series::from_ints(&k, d)));
        let delta = delta_from_sigma(&tb, &sigma, 4).unwrap();
        let seq = basic_sequence(&tb, &delta, 4).unwrap();
        let dseq = basic_sequence(&tb, &DeltaOperator::carlitz(&tb, 4), 4).unwrap();
        let back = operator_expand(&tb, delta.mu(), &dseq, 4).unwrap();
        for (a, b) in back.iter().zip(&sigma) {
            prop_assert!(a.eq_to_precision(b));
        }
        for i in 0..=3 {
            prop_assert!(binomial_type_check(&tb, seq.polys(), i).unwrap());
        }
    }
}
