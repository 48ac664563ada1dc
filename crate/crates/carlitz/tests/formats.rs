use std::sync::Arc;

use carlitz::format::{SeriesInput, SeriesRecord};
use carlitz::parse::parse_series;
use carlitz_core::carlitz::Quantities;
use carlitz_core::{Context, Fe, Params, Series};
use proptest::prelude::*;

fn field(p: u32, m: u32) -> Arc<Context> {
    Context::with_params(p, m, 1, None, Params { precision: 12, ..Params::default() }).unwrap()
}

#[test]
fn expressions() {
    let k = field(2, 1);
    let tb = Quantities::new(&k, 6);
    assert_eq!(parse_series(&k, "x^2+x").unwrap(), tb.bracket(1));
    assert_eq!(parse_series(&k, "[2]").unwrap(), tb.bracket(2));
    assert_eq!(parse_series(&k, "D_3").unwrap(), tb.d(3));
    assert_eq!(parse_series(&k, "L_3").unwrap(), tb.l(3));
    assert_eq!(parse_series(&k, "-(x+1)^2").unwrap(), Series::from_ints(&k, &[1, 0, 1]));
    assert_eq!(parse_series(&k, "x^(1/2)").unwrap().frob(), Series::x_pow(&k, 1));
    assert_eq!(parse_series(&k, "x^-2 x^3").unwrap(), Series::x_pow(&k, 1));
    let inv = parse_series(&k, "1/(1+x)").unwrap();
    assert!(inv.mul(&Series::from_ints(&k, &[1, 1])).eq_to_precision(&Series::one(&k)));
    let o = parse_series(&k, "1+x+O(x^5)").unwrap();
    assert_eq!(o.precision(), Some(5.into()));
    assert_eq!(parse_series(&k, "[-1]").unwrap().frob(), Series::x_pow(&k, 1).sub(&Series::x_pow(&k, 2)));
}

#[test]
fn rejects_bad_syntax() {
    let k = field(2, 1);
    for bad in ["", "x^", "(x", "x+)", "w", "2^(1/2)", "O(x+1)", "x^(1/3)", "y"] {
        assert!(parse_series(&k, bad).is_err(), "{bad:?}");
    }
}

#[test]
fn extension_field_elements() {
    let k = field(3, 2);
    let w = Series::constant(&k, k.from_digits(&[0, 1]).unwrap());
    let s = parse_series(&k, "(w+1)*x^2+2w").unwrap();
    let expect = Series::x_pow(&k, 2).mul(&w.add(&Series::one(&k))).add(&w.add(&w));
    assert_eq!(s, expect);
}

#[test]
fn record_validation() {
    let k = field(2, 1);
    let bad_digit = SeriesRecord { ram: 0, prec: None, terms: vec![(1, vec![2])], text: String::new() };
    assert!(bad_digit.to_series(&k).is_err());
    let too_ramified = SeriesRecord { ram: 9, prec: None, terms: vec![], text: String::new() };
    assert!(too_ramified.to_series(&k).is_err());
    let input: SeriesInput = serde_json::from_str("\"x^2+1\"").unwrap();
    assert_eq!(input.to_series(&k).unwrap(), Series::from_ints(&k, &[1, 0, 1]));
}

fn arb_series(k: Arc<Context>) -> impl Strategy<Value = Series> {
    let size = k.size();
    (
        0u32..3,
        proptest::collection::vec((-20i64..40, 1u32..size), 0..6),
        proptest::option::of(-10i64..60),
    )
        .prop_map(move |(ram, terms, prec)| {
            let prec = prec.map(|p| p.max(terms.iter().map(|t| t.0 + 1).max().unwrap_or(p)));
            Series::from_parts(&k, ram, terms.into_iter().map(|(e, c)| (e, Fe(c))), prec)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_parses_back(s in arb_series(field(2, 2))) {
        let back = parse_series(s.ctx(), &s.to_string()).unwrap();
        prop_assert_eq!(back.to_string(), s.to_string());
        prop_assert!(back.eq_to_precision(&s));
        prop_assert_eq!(back.precision(), s.precision());
    }

    #[test]
    fn display_parses_back_mod_three(s in arb_series(field(3, 2))) {
        let back = parse_series(s.ctx(), &s.to_string()).unwrap();
        prop_assert_eq!(back.to_string(), s.to_string());
    }

    #[test]
    fn record_round_trip(s in arb_series(field(3, 2))) {
        let rec = SeriesRecord::from_series(&s);
        let json = serde_json::to_string(&rec).unwrap();
        let back: SeriesRecord = serde_json::from_str(&json).unwrap();
        let t = back.to_series(s.ctx()).unwrap();
        prop_assert_eq!(t.to_string(), s.to_string());
        prop_assert_eq!(t.scaled_prec(), s.scaled_prec());
    }
}
