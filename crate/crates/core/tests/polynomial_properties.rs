mod common;

use common::{point, poly_spec, rational, vars, PolySpec};
use hornmc::{naive_op_count, parse_polynomial, Workspace};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_identity(spec in poly_spec(5, 12, 4)) {
        let ws = Workspace::new();
        let p = spec.build(&ws);
        let text = p.display(&ws).to_string();
        let back = parse_polynomial(&text, &ws).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.display(&ws).to_string(), text);
    }

    #[test]
    fn evaluation_respects_sum_and_product(
        a in poly_spec(4, 8, 3),
        b in poly_spec(4, 8, 3),
        pt in prop::collection::vec(rational(), 4),
    ) {
        let ws = Workspace::new();
        let (p, q) = (a.build(&ws), b.build(&ws));
        let at = point(&vars(&ws, 4), &pt);
        let (vp, vq) = (p.evaluate(&at, &ws).unwrap(), q.evaluate(&at, &ws).unwrap());
        prop_assert_eq!((&p + &q).evaluate(&at, &ws).unwrap(), &vp + &vq);
        prop_assert_eq!((&p - &q).evaluate(&at, &ws).unwrap(), &vp - &vq);
        prop_assert_eq!((&p * &q).evaluate(&at, &ws).unwrap(), &vp * &vq);
    }

    #[test]
    fn arithmetic_stays_canonical(a in poly_spec(3, 8, 3), b in poly_spec(3, 8, 3)) {
        let ws = Workspace::new();
        let (p, q) = (a.build(&ws), b.build(&ws));
        for r in [&p + &q, &p - &q, &p * &q, &p - &p] {
            prop_assert!(r.terms().all(|(_, c)| *c != 0.into()));
            let monomials: Vec<_> = r.terms().map(|(m, _)| m.clone()).collect();
            let mut dedup = monomials.clone();
            dedup.dedup();
            prop_assert_eq!(monomials.len(), dedup.len());
        }
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn naive_count_matches_term_by_term_rule(spec in poly_spec(4, 10, 4)) {
        let ws = Workspace::new();
        let p = spec.build(&ws);
        let count = naive_op_count(&p);
        let mut muls = 0u64;
        for (m, c) in p.terms() {
            let degree: u64 = m.factors().iter().map(|&(_, e)| u64::from(e)).sum();
            let unit = *c == 1.into() || *c == (-1).into();
            // Count the factors of the written-out product, then the joins.
            let factors = degree + if unit { 0 } else { 1 };
            muls += factors.saturating_sub(1);
        }
        prop_assert_eq!(count.adds, (p.len() as u64).saturating_sub(1));
        prop_assert_eq!(count.muls, muls);
        prop_assert_eq!(count.total(), count.adds + count.muls);
    }
}

#[test]
fn duplicate_and_cancelling_terms_merge() {
    let ws = Workspace::new();
    let spec =
        PolySpec { num_vars: 2, terms: vec![(3, vec![1, 2]), (-3, vec![1, 2]), (2, vec![0, 1]), (5, vec![0, 1])] };
    let p = spec.build(&ws);
    assert_eq!(p.display(&ws).to_string(), "7*v1");
}
