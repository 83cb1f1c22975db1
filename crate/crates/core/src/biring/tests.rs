use proptest::prelude::*;

use super::*;
use crate::exactalg::{Field, Scalar};
use crate::series::{mul_series, OrdValue, TruncatedSeries};

const Q: Field = Field::Rational;

fn cantor(n: usize) -> TruncatedSeries {
    let mut c = vec![0i64; n];
    let mut k = 1;
    while k < n {
        c[k] = 1;
        k *= 2;
    }
    TruncatedSeries::from_i64(Q, &c).unwrap()
}

fn point(series: Vec<TruncatedSeries>) -> FunctionalPoint {
    FunctionalPoint::new(Q, series, None).unwrap()
}

#[test]
fn evaluate_examples() {
    let f = point(vec![TruncatedSeries::monomial(Q, 1, 12)]);
    let p = parse_affine("X1 - z", Q, 1).unwrap();
    assert_eq!(evaluate_affine(&p, &f).unwrap().ord(), OrdValue::AtLeast(12));
    let pb = parse_bi("X1 - X1'*X0", Q, 1).unwrap();
    assert_eq!(evaluate_bi(&pb, &f).unwrap().ord(), OrdValue::AtLeast(12));

    let g = point(vec![cantor(20)]);
    let x1 = parse_affine("X1", Q, 1).unwrap();
    assert_eq!(evaluate_affine(&x1, &g).unwrap(), cantor(20));

    let p = parse_bi("X1*X0' - X1'*X0 - X1'^2*X0", Q, 1).unwrap();
    let v = evaluate_bi(&p, &g).unwrap();
    assert_eq!(v.ord(), OrdValue::Finite(4));
}

#[test]
fn bihomogenize_examples() {
    let p = parse_affine("X1 - z", Q, 1).unwrap();
    assert_eq!(p.bihomogenize(), parse_bi("X1*X0' - X1'*X0", Q, 1).unwrap());

    let one = parse_affine("1", Q, 1).unwrap();
    assert_eq!(one.bihomogenize().bidegree(), Some((0, 0)));

    let p = parse_affine("z^2*X1 + X2^2", Q, 2).unwrap();
    let h = p.bihomogenize();
    assert_eq!(h, parse_bi("X1'^2*X1*X0 + X0'^2*X2^2", Q, 2).unwrap());
    assert_eq!(h.bidegree(), Some((2, 2)));
    assert_eq!(p.height(), 2);
}

#[test]
fn arity_and_field_errors() {
    let f = point(vec![cantor(8)]);
    let p = parse_affine("X2", Q, 2).unwrap();
    assert!(matches!(evaluate_affine(&p, &f), Err(crate::Error::ArityMismatch { .. })));
    let f5 = Field::prime(5).unwrap();
    let p = parse_affine("X1", f5, 1).unwrap();
    assert!(matches!(evaluate_affine(&p, &f), Err(crate::Error::FieldMismatch(..))));
}

#[test]
fn point_json_roundtrip() {
    let f = point(vec![cantor(10), TruncatedSeries::from_i64(Q, &[1, -2, 3]).unwrap()]);
    assert_eq!(f.precision(), 3);
    let j = serde_json::to_string(&f.to_json()).unwrap();
    let back = FunctionalPoint::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
    assert_eq!(f, back);
}

fn arb_affine(n: usize) -> impl Strategy<Value = AffinePolynomial> {
    prop::collection::vec((prop::collection::vec(0u32..4, n + 1), -5i64..6), 0..8).prop_map(
        move |terms| {
            AffinePolynomial::from_terms(
                Q,
                n,
                terms.into_iter().map(|(e, c)| (e, Scalar::from_i64(Q, c))),
            )
            .unwrap()
        },
    )
}

fn arb_series(len: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(-4i64..5, len)
        .prop_map(|c| TruncatedSeries::from_i64(Field::Rational, &c).unwrap())
}

proptest! {
    #[test]
    fn dehomogenize_inverts_bihomogenize(p in arb_affine(2)) {
        let h = p.bihomogenize();
        prop_assert!(h.is_bihomogeneous());
        prop_assert_eq!(h.dehomogenize(), p);
    }

    #[test]
    fn evaluation_is_a_ring_map(p in arb_affine(2), q in arb_affine(2),
                                f1 in arb_series(10), f2 in arb_series(10)) {
        let f = point(vec![f1, f2]);
        let ep = evaluate_affine(&p, &f).unwrap();
        let eq = evaluate_affine(&q, &f).unwrap();
        let sum = evaluate_affine(&p.add(&q).unwrap(), &f).unwrap();
        prop_assert_eq!(sum, ep.add(&eq).unwrap());
        let prod = evaluate_affine(&p.mul(&q).unwrap(), &f).unwrap();
        prop_assert_eq!(prod, mul_series(&ep, &eq).unwrap());
    }

    #[test]
    fn bidegree_of_product_adds(p in arb_affine(2), q in arb_affine(2)) {
        prop_assume!(!p.is_zero() && !q.is_zero());
        let (hp, hq) = (p.bihomogenize(), q.bihomogenize());
        let (a, b) = hp.bidegree().unwrap();
        let (c, d) = hq.bidegree().unwrap();
        prop_assert_eq!(hp.mul(&hq).unwrap().bidegree(), Some((a + c, b + d)));
    }

    #[test]
    fn printing_roundtrips(p in arb_affine(2)) {
        prop_assert_eq!(parse_affine(&p.to_string(), Q, 2).unwrap(), p.clone());
        let h = p.bihomogenize();
        prop_assert_eq!(parse_bi(&h.to_string(), Q, 2).unwrap(), h);
    }
}
