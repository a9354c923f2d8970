//! Dataset-level properties of the rationalizability test.

use proptest::prelude::*;

use spherical::rationalize::{certificate_lp, rationalize, rationalize_restricted, verify_certificate, verify_witness};
use spherical::scalar::Zero;
use spherical::{ObservationSet, Rational, Restriction, SphericalParams, Vector};

type Point = Vec<i64>;
type Pairs = Vec<(Point, Point)>;

fn v(p: &[i64]) -> Vector<Rational> {
    Vector::from_i64s(p).unwrap()
}

fn build(n: usize, weak: &[(Point, Point)], strict: &[(Point, Point)], map: impl Fn(&[i64]) -> Vector<Rational>) -> ObservationSet<Rational> {
    let mut data = ObservationSet::new(n).unwrap();
    for (a, b) in weak {
        data.add_weak(map(a), map(b)).unwrap();
    }
    for (a, b) in strict {
        data.add_strict(map(a), map(b)).unwrap();
    }
    data
}

/// Searches a small integer grid of parameters for a strict witness.
fn grid_witness(data: &ObservationSet<Rational>) -> Option<SphericalParams<Rational>> {
    let n = data.dim();
    let range: Vec<i64> = (-3..=3).collect();
    let mut candidates: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..=n {
        candidates = candidates
            .into_iter()
            .flat_map(|c| range.iter().map(move |&r| [c.clone(), vec![r]].concat()))
            .collect();
    }
    candidates.into_iter().map(|e| SphericalParams::new(Rational::from(e[0]), v(&e[1..]))).find(|p| verify_witness(data, p).unwrap())
}

fn pairs(n: usize, max: usize) -> impl Strategy<Value = Pairs> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, n), prop::collection::vec(-3i64..=3, n)), 0..=max)
}

fn dataset() -> impl Strategy<Value = (usize, Pairs, Pairs)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), pairs(n, 3), pairs(n, 4)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verdict_is_consistent_with_grid_search((n, weak, strict) in dataset()) {
        let data = build(n, &weak, &strict, v);
        let verdict = rationalize(&data).unwrap();
        if grid_witness(&data).is_some() {
            prop_assert!(verdict.rationalizable);
        }
        if verdict.rationalizable {
            prop_assert!(verify_witness(&data, verdict.witness.as_ref().unwrap()).unwrap());
        } else {
            prop_assert!(verify_certificate(&data, verdict.certificate.as_ref().unwrap(), None));
        }
        let (pmass, _) = certificate_lp(&data).unwrap();
        prop_assert_eq!(verdict.rationalizable, pmass.is_zero());
    }

    #[test]
    fn verdict_is_invariant_under_translation_and_scaling(
        (n, weak, strict) in dataset(),
        shift in prop::collection::vec(-5i64..=5, 3),
        k in 1i64..=4,
    ) {
        let base = rationalize(&build(n, &weak, &strict, v)).unwrap().rationalizable;
        let moved = build(n, &weak, &strict, |p| {
            v(&p.iter().zip(&shift).map(|(a, s)| k * a + s).collect::<Vec<_>>())
        });
        prop_assert_eq!(rationalize(&moved).unwrap().rationalizable, base);
    }

    #[test]
    fn verdict_is_invariant_under_coordinate_reversal((n, weak, strict) in dataset()) {
        let base = rationalize(&build(n, &weak, &strict, v)).unwrap().rationalizable;
        let flipped = build(n, &weak, &strict, |p| v(&p.iter().rev().copied().collect::<Vec<_>>()));
        prop_assert_eq!(rationalize(&flipped).unwrap().rationalizable, base);
    }

    #[test]
    fn extra_pairs_never_restore_rationalizability(
        (n, weak, strict) in dataset(),
        more in prop::collection::vec((prop::collection::vec(-3i64..=3, 3), prop::collection::vec(-3i64..=3, 3)), 1..=3),
    ) {
        let data = build(n, &weak, &strict, v);
        let verdict = rationalize(&data).unwrap();
        prop_assume!(!verdict.rationalizable);
        let cut = |p: &Point| p[..n].to_vec();
        let more: Pairs = more.iter().map(|(a, b)| (cut(a), cut(b))).collect();
        let bigger = build(n, &[weak.clone(), more.clone()].concat(), &[strict.clone(), more].concat(), v);
        prop_assert!(!rationalize(&bigger).unwrap().rationalizable);
    }

    #[test]
    fn restrictions_only_shrink_the_class((n, weak, strict) in dataset()) {
        let data = build(n, &weak, &strict, v);
        let free = rationalize(&data).unwrap().rationalizable;
        for r in [Restriction::Linear, Restriction::Euclidean, Restriction::AntiEuclidean] {
            let verdict = rationalize_restricted(&data, r).unwrap();
            if verdict.rationalizable {
                prop_assert!(free);
                prop_assert!(verify_witness(&data, verdict.witness.as_ref().unwrap()).unwrap());
            } else {
                prop_assert!(verify_certificate(&data, verdict.certificate.as_ref().unwrap(), Some(r)));
            }
        }
    }

    #[test]
    fn float_and_exact_agree_on_integer_data((n, weak, strict) in dataset()) {
        let exact = rationalize(&build(n, &weak, &strict, v)).unwrap().rationalizable;
        let mut data = ObservationSet::<f64>::new(n).unwrap();
        let f = |p: &[i64]| Vector::from_i64s(p).unwrap();
        for (a, b) in &weak {
            data.add_weak(f(a), f(b)).unwrap();
        }
        for (a, b) in &strict {
            data.add_strict(f(a), f(b)).unwrap();
        }
        prop_assert_eq!(rationalize(&data).unwrap().rationalizable, exact);
    }
}
