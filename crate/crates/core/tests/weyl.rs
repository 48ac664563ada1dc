use std::sync::Arc;

use carlitz_core::carlitz::{bracket, Quantities};
use carlitz_core::weyl::*;
use carlitz_core::{Context, Params, Series};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(p: u32, ram_cap: u32) -> Arc<Context> {
    Context::with_params(p, 1, 1, None, Params { ram_cap, ..Params::default() }).unwrap()
}

fn root1(k: &Arc<Context>) -> Series {
    bracket(k, 1).unwrap().qth_root().unwrap()
}

#[test]
fn defining_relations() {
    let k = ctx(2, 8);
    let n = 1;
    let tau = WeylElement::tau(&k, n).unwrap();
    let d = WeylElement::d(&k, n).unwrap();
    let delta = WeylElement::delta(&k, n, 0).unwrap();
    let x = Series::x_pow(&k, 1);
    let xs = WeylElement::scalar(&k, n, x.clone()).unwrap();

    // dτ = τd + [1]^{1/q}
    let dt = d.mul(&tau).unwrap();
    let expect = tau.mul(&d).unwrap().add(&WeylElement::scalar(&k, n, root1(&k)).unwrap()).unwrap();
    assert!(dt.eq_to_precision(&expect));
    // τx = x^q τ
    let tx = tau.mul(&xs).unwrap();
    assert!(tx.eq_to_precision(&tau.scale_left(&x.frob())));
    // dx = x^{1/q} d
    assert!(d.mul(&xs).unwrap().eq_to_precision(&d.scale_left(&x.qth_root().unwrap())));
    // Δτ = τΔ + [1]τ
    let lhs = delta.mul(&tau).unwrap();
    let rhs = tau.mul(&delta).unwrap().add(&tau.scale_left(&bracket(&k, 1).unwrap())).unwrap();
    assert!(lhs.eq_to_precision(&rhs));
    // dΔ - Δd = [1]^{1/q} d
    let c = d.mul(&delta).unwrap().sub(&delta.mul(&d).unwrap()).unwrap();
    assert!(c.eq_to_precision(&d.scale_left(&root1(&k))));
    // Δ commutes with scalars
    assert!(delta.mul(&xs).unwrap().eq_to_precision(&delta.scale_left(&x)));
}

#[test]
fn distinct_deltas_commute() {
    let k = ctx(3, 6);
    let a = WeylElement::delta(&k, 2, 0).unwrap();
    let b = WeylElement::delta(&k, 2, 1).unwrap();
    assert!(a.mul(&b).unwrap().eq_to_precision(&b.mul(&a).unwrap()));
    let f = hypergeometric_generating_function(&Quantities::new(&k, 8), 4).unwrap();
    let ab = a.apply(&b.apply(&f).unwrap()).unwrap();
    let ba = b.apply(&a.apply(&f).unwrap()).unwrap();
    assert!(ab.add(&ba.scale(&Series::from_int(&k, -1))).unwrap().is_zero());
}

#[test]
fn ladder_commutator() {
    for p in [2u32, 3] {
        let k = ctx(p, 6);
        for n in 0..=2 {
            let one = WeylElement::one(&k, n).unwrap();
            let up = WeylElement::tau(&k, n).unwrap().sub(&one).unwrap();
            let down = WeylElement::d(&k, n).unwrap();
            let c = down.mul(&up).unwrap().sub(&up.mul(&down).unwrap()).unwrap();
            assert!(c.eq_to_precision(&WeylElement::scalar(&k, n, root1(&k)).unwrap()));
        }
    }
}

fn random_word_element(rng: &mut ChaCha8Rng, k: &Arc<Context>, n: usize) -> WeylElement {
    let mut e = WeylElement::zero(k, n).unwrap();
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
        let digits: Vec<i64> = (0..3).map(|_| rng.gen_range(0..k.q() as i64)).collect();
        factors.insert(0, Factor::Scalar(Series::from_ints(k, &digits).add(&Series::one(k))));
        e = e.add(&WeylElement::product(k, n, &factors).unwrap()).unwrap();
    }
    e
}

#[test]
fn associativity_on_random_triples() {
    let k = ctx(2, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..50 {
        let n = i % 3;
        let a = random_word_element(&mut rng, &k, n);
        let b = random_word_element(&mut rng, &k, n);
        let c = random_word_element(&mut rng, &k, n);
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        assert!(left.eq_to_precision(&right), "triple {i}");
    }
}

#[test]
fn normal_form_is_unique() {
    // τ d Δ written as Δ d τ corrected by the relations
    let k = ctx(3, 6);
    let n = 1;
    let tau = WeylElement::tau(&k, n).unwrap();
    let d = WeylElement::d(&k, n).unwrap();
    let delta = WeylElement::delta(&k, n, 0).unwrap();
    let a = delta.mul(&d).unwrap().mul(&tau).unwrap();
    let b = delta.mul(&d.mul(&tau).unwrap()).unwrap();
    assert!(a.eq_to_precision(&b));
    let w = a.terms().keys().max().unwrap().clone();
    assert_eq!(w, Word::new(1, 1, vec![1]));
    assert!(a.terms().values().all(|c| !c.is_zero()));
}

#[test]
fn carlitz_function_coefficients() {
    let k = ctx(2, 4);
    let tb = Quantities::new(&k, 8);
    for kk in 0..=4 {
        let f = tb.carlitz_f(kk).unwrap();
        for m in 0..=kk {
            assert!(carlitz_f_coefficient(&tb, m, kk).unwrap().eq_to_precision(&f.coeffs()[m]), "m={m} k={kk}");
        }
    }
}

#[test]
fn generator_actions() {
    let k = ctx(2, 6);
    let tb = Quantities::new(&k, 10);
    let n = 1;
    let c = carlitz_module_function(&tb, 7).unwrap();
    let d = WeylElement::d(&k, n).unwrap();
    let dc = d.apply(&c).unwrap();
    assert_eq!(dc.bounds(), &[6]);
    for (key, v) in dc.terms() {
        assert!(v.eq_to_precision(&c.coeff(key)), "{key:?}");
    }
    let st = MultiSeries::new(&k, 1, vec![3], [(vec![0, 0], Series::one(&k))]).unwrap();
    let t = WeylElement::tau(&k, n).unwrap().apply(&st).unwrap();
    assert_eq!(t.terms().len(), 1);
    assert_eq!(t.coeff(&[1, 1]), Series::one(&k));
    let single = MultiSeries::new(&k, 1, vec![5], [(vec![1, 3], Series::x_pow(&k, 2))]).unwrap();
    let dl = WeylElement::delta(&k, n, 0).unwrap().apply(&single).unwrap();
    assert_eq!(dl.coeff(&[1, 3]), Series::x_pow(&k, 2).mul(&tb.bracket(3)));
    assert!(MultiSeries::new(&k, 1, vec![3], [(vec![2, 1], Series::one(&k))]).is_err());
}

#[test]
fn annihilators() {
    for p in [2u32, 3] {
        let k = ctx(p, 6);
        let tb = Quantities::new(&k, 10);
        let one1 = WeylElement::one(&k, 1).unwrap();
        let d1 = WeylElement::d(&k, 1).unwrap();
        let op = d1.sub(&one1).unwrap();
        let c = carlitz_module_function(&tb, 6).unwrap();
        let rep = annihilator_check(&op, &c).unwrap();
        assert!(rep.annihilates, "p={p}");
        assert!(!rep.residual.terms().is_empty());

        let one2 = WeylElement::one(&k, 2).unwrap();
        let op2 = WeylElement::d(&k, 2).unwrap().sub(&one2).unwrap();
        let h = hypergeometric_generating_function(&tb, 5).unwrap();
        assert!(annihilator_check(&op2, &h).unwrap().annihilates, "p={p}");

        let kb = kbinomial_function(&tb, 6).unwrap();
        let op3 = d1
            .sub(&WeylElement::delta(&k, 1, 0).unwrap())
            .unwrap()
            .sub(&WeylElement::scalar(&k, 1, root1(&k)).unwrap())
            .unwrap();
        assert!(annihilator_check(&op3, &kb).unwrap().annihilates, "p={p}");
        // the K-binomial function is not fixed by d_s
        assert!(!annihilator_check(&op, &kb).unwrap().annihilates);
    }
}

#[test]
fn free_counts() {
    for nu in 0..10u64 {
        assert_eq!(free_word_count(0, nu), (nu + 1) * (nu + 2) / 2);
        assert_eq!(words_of_degree(0, nu as u32).len() as u64, nu + 1);
    }
    let total: usize = (0..=4).map(|nu| words_of_degree(2, nu).len()).sum();
    assert_eq!(total as u64, free_word_count(2, 4));
}

#[test]
fn nonsparse_windows() {
    let k = ctx(2, 4);
    let tb = Quantities::new(&k, 10);
    assert!(nonsparse_check(&carlitz_module_function(&tb, 6).unwrap(), 6));
    assert!(!nonsparse_check(&diagonal_exponential(&tb, 6).unwrap(), 6));
    let zero = MultiSeries::new(&k, 1, vec![6], []).unwrap();
    assert!(!nonsparse_check(&zero, 6));
    assert!(nonsparse_check(&kbinomial_function(&tb, 6).unwrap(), 6));
}

#[test]
fn estimator_on_monomial() {
    let k = ctx(2, 8);
    let s = MultiSeries::new(&k, 0, vec![12], [(vec![0], Series::one(&k))]).unwrap();
    let rep = filtration_dimension_estimate(&s, 6, DEFAULT_PIVOT_MARGIN).unwrap();
    assert_eq!(rep.dims, (1..=7).collect::<Vec<_>>());
    assert!(rep.growth_exponent > 0.0 && rep.growth_exponent <= 1.0, "{}", rep.growth_exponent);
}

#[test]
fn estimator_on_carlitz_function() {
    let prec = estimator_precision(2, 8, DEFAULT_PIVOT_MARGIN);
    let k = Context::with_params(2, 1, 1, None, Params { ram_cap: 8, precision: prec, ..Params::default() }).unwrap();
    let tb = Quantities::new(&k, 20);
    let c = carlitz_module_function(&tb, 18).unwrap();
    let rep = filtration_dimension_estimate(&c, 8, DEFAULT_PIVOT_MARGIN).unwrap();
    // d_s C = C leaves the words τ^l Δ^i
    let expect: Vec<usize> = (0..=8).map(|nu| (nu + 1) * (nu + 2) / 2).collect();
    assert_eq!(rep.dims, expect);
    assert!((1.5..=2.5).contains(&rep.growth_exponent), "{}", rep.growth_exponent);
    assert_eq!(rep.free_counts[8], 165);
}

#[test]
fn estimator_reports_precision_floor() {
    let k = ctx(2, 8);
    let tb = Quantities::new(&k, 12);
    let c = carlitz_module_function(&tb, 10).unwrap();
    assert!(matches!(
        filtration_dimension_estimate(&c, 6, DEFAULT_PIVOT_MARGIN),
        Err(carlitz_core::Error::PrecisionExhausted(_))
    ));
    assert!(matches!(
        filtration_dimension_estimate(&c, 11, DEFAULT_PIVOT_MARGIN),
        Err(carlitz_core::Error::TruncationExhausted(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn action_is_a_ring_action(seed in 0u64..1000) {
        let k = ctx(2, 8);
        let tb = Quantities::new(&k, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_word_element(&mut rng, &k, 1);
        let b = random_word_element(&mut rng, &k, 1);
        let f = kbinomial_function(&tb, 8).unwrap();
        let lhs = a.mul(&b).unwrap().apply(&f).unwrap();
        let rhs = a.apply(&b.apply(&f).unwrap()).unwrap();
        prop_assert!(lhs.add(&rhs.scale(&Series::from_int(&k, -1))).unwrap().is_zero());
    }
}
