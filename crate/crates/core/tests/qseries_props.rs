use std::sync::Arc;

use borcherds_core::json::{parse_series, series_to_json};
use borcherds_core::lattice::standard;
use borcherds_core::num::{frac, rat};
use borcherds_core::qseries::{QSeries, VVQSeries};
use borcherds_core::{CosetSign, DiscriminantForm, EvenLattice, Rational};
use proptest::prelude::*;

fn disc() -> Arc<DiscriminantForm> {
    EvenLattice::new(standard::an_gram(2)).unwrap().disc_arc()
}

fn series(sign: CosetSign) -> impl Strategy<Value = VVQSeries> {
    proptest::collection::vec((0usize..3, -2i64..4, -50i64..50, 1i64..9), 0..12).prop_map(move |terms| {
        let d = disc();
        let mut f = VVQSeries::zero(d.clone(), sign, rat(4, 1));
        for (mu, k, p, q) in terms {
            let base = match sign {
                CosetSign::Plus => frac(d.q(mu)),
                CosetSign::Minus => frac(&-d.q(mu).clone()),
            };
            let e = base + rat(k, 1);
            let cur = f.get(&e, mu).unwrap();
            f.set(&e, mu, cur + rat(p, q)).unwrap();
        }
        f
    })
}

fn scalar() -> impl Strategy<Value = QSeries> {
    (-1i64..2, proptest::collection::vec(-20i64..20, 1..6))
        .prop_map(|(start, c)| QSeries { start, coeffs: c.into_iter().map(|x| rat(x, 1)).collect() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_a_group(f in series(CosetSign::Plus), g in series(CosetSign::Plus), h in series(CosetSign::Plus)) {
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.add(&g).unwrap().add(&h).unwrap(), f.add(&g.add(&h).unwrap()).unwrap());
        prop_assert!(f.sub(&f).unwrap().is_empty());
    }

    #[test]
    fn scalar_product_distributes(f in series(CosetSign::Minus), g in series(CosetSign::Minus), s in scalar(), t in scalar()) {
        let lhs = f.add(&g).unwrap().mul_scalar(&s);
        let rhs = f.mul_scalar(&s).add(&g.mul_scalar(&s)).unwrap();
        let tr = lhs.trunc().clone().min(rhs.trunc().clone());
        prop_assert_eq!(lhs.truncate(&tr), rhs.truncate(&tr));
        let a = f.mul_scalar(&s).mul_scalar(&t);
        let b = f.mul_scalar(&s.mul(&t));
        let tr = a.trunc().clone().min(b.trunc().clone());
        prop_assert_eq!(a.truncate(&tr), b.truncate(&tr));
    }

    #[test]
    fn scaling_is_linear(f in series(CosetSign::Plus), p in -9i64..9, q in 1i64..9) {
        let r = rat(p, q);
        let twice = f.scale(&r).add(&f.scale(&r)).unwrap();
        prop_assert_eq!(twice, f.scale(&(r * rat(2, 1))));
    }

    #[test]
    fn json_round_trip(f in series(CosetSign::Plus), g in series(CosetSign::Minus)) {
        for s in [f, g] {
            let text = series_to_json(&s);
            let back = parse_series(&text, disc()).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(series_to_json(&back), text);
        }
    }
}

#[test]
fn delta_inverse_round_trip() {
    let d = disc();
    let mut f = VVQSeries::zero(d, CosetSign::Plus, rat(3, 1));
    f.set(&Rational::from_integer(0.into()), 0, rat(1, 1)).unwrap();
    f.set(&rat(1, 3), 1, rat(5, 2)).unwrap();
    let back = f.mul_delta_pow(-1).unwrap().mul_delta_pow(1).unwrap();
    prop_assert_eq_helper(&back.truncate(f.trunc()), &f.truncate(back.trunc()));
}

fn prop_assert_eq_helper(a: &VVQSeries, b: &VVQSeries) {
    let tr = a.trunc().clone().min(b.trunc().clone());
    assert_eq!(a.truncate(&tr), b.truncate(&tr));
}
