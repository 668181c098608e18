//! Property tests for the Novikov field: axioms up to window, valuation
//! laws, and canonical-form round trips.

use novcap_core::exponent::{Exponent, Level};
use novcap_core::novikov::NovikovScalar;

use proptest::prelude::*;

fn arb_exponent() -> impl Strategy<Value = Exponent> {
    (-16i64..=16, 1i64..=4).prop_map(|(p, q)| Exponent::ratio(p, q))
}

fn arb_scalar() -> impl Strategy<Value = NovikovScalar> {
    proptest::collection::vec(arb_exponent(), 0..4)
        .prop_map(NovikovScalar::from_exponents)
}

fn arb_nonzero() -> impl Strategy<Value = NovikovScalar> {
    proptest::collection::vec(arb_exponent(), 1..4)
        .prop_map(NovikovScalar::from_exponents)
        .prop_filter("nonzero", |s| !s.is_visibly_zero())
}

fn arb_windowed() -> impl Strategy<Value = NovikovScalar> {
    (arb_scalar(), proptest::option::of(1i64..=10)).prop_map(|(s, w)| match w {
        None => s,
        Some(w) => s.truncated(&Exponent::from_int(w)),
    })
}

const HORIZON: i64 = 40;

fn agree(a: &NovikovScalar, b: &NovikovScalar) -> bool {
    a.agrees_below(b, &Exponent::from_int(HORIZON))
}

proptest! {
    #[test]
    fn addition_commutes(a in arb_windowed(), b in arb_windowed()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
    }

    #[test]
    fn addition_associates(a in arb_windowed(), b in arb_windowed(), c in arb_windowed()) {
        prop_assert!(agree(&a.add(&b).add(&c), &a.add(&b.add(&c))));
    }

    #[test]
    fn multiplication_commutes(a in arb_windowed(), b in arb_windowed()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }

    #[test]
    fn multiplication_associates(a in arb_windowed(), b in arb_windowed(), c in arb_windowed()) {
        prop_assert!(agree(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
    }

    #[test]
    fn multiplication_distributes(a in arb_windowed(), b in arb_windowed(), c in arb_windowed()) {
        prop_assert!(agree(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
    }

    #[test]
    fn characteristic_two(a in arb_windowed()) {
        prop_assert!(a.add(&a).is_visibly_zero());
    }

    #[test]
    fn units_are_neutral(a in arb_windowed()) {
        prop_assert_eq!(a.add(&NovikovScalar::zero()), a.clone());
        prop_assert!(agree(&a.mul(&NovikovScalar::one()), &a));
    }

    #[test]
    fn valuation_is_additive(a in arb_nonzero(), b in arb_nonzero()) {
        let va = a.valuation().expect_finite("valuation");
        let vb = b.valuation().expect_finite("valuation");
        prop_assert_eq!(a.mul(&b).valuation(), Level::Finite(&va + &vb));
    }

    #[test]
    fn valuation_of_sums(a in arb_nonzero(), b in arb_nonzero()) {
        let va = a.valuation();
        let vb = b.valuation();
        let vsum = a.add(&b).valuation();
        prop_assert!(vsum >= va.clone().min(vb.clone()));
        if va != vb {
            prop_assert_eq!(vsum, va.min(vb));
        }
    }

    #[test]
    fn inverse_inverts_below_the_window(x in arb_nonzero(), w in 1i64..=8) {
        let window = Exponent::from_int(w);
        let inv = x.inverse(&window).expect("nonzero");
        let product = x.mul(&inv);
        prop_assert!(product.agrees_below(&NovikovScalar::one(), &window));
    }

    #[test]
    fn textual_form_round_trips(x in arb_windowed()) {
        let text = x.to_string();
        let back: NovikovScalar = text.parse().expect("printable scalars parse");
        prop_assert_eq!(back, x);
    }
}
