mod common;

use std::collections::BTreeSet;

use cohact_core::instances::{
    as_whoop, boolean_product_algebra, boolean_product_hoop, l2, lukasiewicz, lukasiewicz_hoop, null_algebra,
    prime_field_square,
};
use cohact_core::morphism::{find_isomorphism, homomorphisms, HomSearch};
use cohact_core::varieties::{
    bc_decompose, bc_sets, builtin, hoop_to_mv, is_filter, is_mv_ideal, kernel_class, mv_to_hoop, natural_order,
    quotient_by_filter, regular_dense, variety_membership,
};
use cohact_core::{Error, FiniteAlgebra, FunctionMap};
use common::hoop_chain;

fn goedel_chain(n: usize) -> FiniteAlgebra {
    let sig = builtin("hoop").unwrap().signature;
    let top = n - 1;
    FiniteAlgebra::from_fn(
        sig.clone(),
        n,
        |op, a| match sig.ops()[op].name.as_str() {
            "mul" => a[0].min(a[1]),
            _ if a[0] <= a[1] => top,
            _ => a[1],
        },
        vec![top],
    )
    .unwrap()
}

#[test]
fn membership_examples() {
    let c = builtin("alg:cassoc").unwrap();
    let f22 = prime_field_square(2).reduct(&c.signature).unwrap();
    let r = variety_membership(&f22, &c).unwrap();
    assert!(r.member);
    assert!(builtin("alg:assoc").unwrap().is_member(&f22).unwrap());
    assert!(variety_membership(&null_algebra(2, 1), &builtin("alg:ab").unwrap()).unwrap().member);
    assert!(builtin("whoop").unwrap().is_member(&hoop_chain(3)).unwrap());
}

#[test]
fn membership_reports_the_failing_identity() {
    let r = variety_membership(&goedel_chain(3), &builtin("whoop").unwrap()).unwrap();
    assert!(!r.member);
    let (id, verdict) = r.first_failure().unwrap();
    assert!(id.contains("(imp (imp x y) y)"));
    assert!(!verdict.holds());
    assert!(matches!(
        variety_membership(&l2(), &builtin("hoop").unwrap()),
        Err(Error::SignatureMismatch(_))
    ));
}

#[test]
fn natural_order_examples() {
    let l3 = natural_order(&hoop_chain(3)).unwrap();
    assert!(l3.is_total());
    assert!(l3.leq(0, 1) && l3.leq(1, 2) && !l3.leq(2, 1));
    for h in [hoop_chain(4), goedel_chain(4), boolean_product_hoop(2)] {
        let o = natural_order(&h).unwrap();
        let one = h.constant_named("one").unwrap();
        assert!((0..h.size()).all(|x| o.leq(x, one)));
    }
    // L₂ × L₂: 0 = (0,0) below (0,1) and (1,0), incomparable, below (1,1)
    let diamond = natural_order(&l2().product(&l2()).unwrap()).unwrap();
    assert!(!diamond.is_total());
    assert!(!diamond.leq(1, 2) && !diamond.leq(2, 1));
    assert_eq!(diamond.minimum(), Some(0));
    assert_eq!(diamond.maximum(), Some(3));
    assert!(natural_order(&null_algebra(2, 1)).is_err());
}

#[test]
fn natural_order_is_partial_with_mv_lattice_terms() {
    let mut pool = Vec::new();
    for n in 1..=6 {
        pool.extend(builtin("mv").unwrap().models(n, false).unwrap());
    }
    pool.extend((7..=8).map(lukasiewicz));
    for a in &pool {
        let o = natural_order(a).unwrap();
        assert!(o.is_partial_order());
        let h = mv_to_hoop(a).unwrap();
        let n = a.size();
        for x in 0..n {
            for y in 0..n {
                let xy = h.call("imp", &[x, y]);
                assert!(o.is_join(x, y, h.call("imp", &[xy, y])));
                assert!(o.is_meet(x, y, h.call("mul", &[x, xy])));
            }
        }
    }
    for n in 1..=4 {
        for h in builtin("hoop").unwrap().models(n, false).unwrap() {
            assert!(natural_order(&h).unwrap().is_partial_order());
        }
    }
}

#[test]
fn kernel_examples() {
    let mv = builtin("mv").unwrap();
    let l3 = lukasiewicz(3);
    assert_eq!(kernel_class(&l3, &l3, &FunctionMap::identity(3), &mv).unwrap(), [0].into());

    // {0} ↦ 0 and {½, 1} ↦ 1 on the idempotent chain
    let hoop = builtin("hoop").unwrap();
    let g3 = goedel_chain(3);
    let g2 = goedel_chain(2);
    let f = FunctionMap::new(3, 2, vec![0, 1, 1]).unwrap();
    assert_eq!(kernel_class(&g3, &g2, &f, &hoop).unwrap(), [1, 2].into());

    // π₁: A × A → A has kernel {0} × A
    let square = l3.product(&l3).unwrap();
    let pi1 = FunctionMap::new(9, 3, (0..9).map(|x| x / 3).collect()).unwrap();
    assert_eq!(kernel_class(&square, &l3, &pi1, &mv).unwrap(), [0, 1, 2].into());

    let not_hom = FunctionMap::new(3, 3, vec![0, 0, 2]).unwrap();
    assert!(matches!(kernel_class(&l3, &l3, &not_hom, &mv), Err(Error::InvalidMap(_))));
}

#[test]
fn kernels_are_filters_and_ideals_on_the_pool() {
    let whoop = builtin("whoop").unwrap();
    let mv = builtin("mv").unwrap();
    let hoops: Vec<_> = (1..=4).flat_map(|n| whoop.models(n, false).unwrap()).collect();
    for (s, t) in common::pairs(&hoops) {
        for f in homomorphisms(s, t, &HomSearch::default()).unwrap() {
            let k = kernel_class(s, t, &f, &whoop).unwrap();
            assert!(is_filter(s, &k).unwrap());
        }
    }
    let mvs: Vec<_> = (1..=4).flat_map(|n| mv.models(n, false).unwrap()).collect();
    for (s, t) in common::pairs(&mvs) {
        for f in homomorphisms(s, t, &HomSearch::default()).unwrap() {
            let k = kernel_class(s, t, &f, &mv).unwrap();
            assert!(is_mv_ideal(s, &k).unwrap());
        }
    }
}

#[test]
fn quotient_by_filter_examples() {
    let h = hoop_chain(4);
    let (q, proj) = quotient_by_filter(&h, &[3].into()).unwrap();
    assert!(find_isomorphism(&h, &q).is_some());
    assert_eq!(kernel_class(&h, &q, &proj, &builtin("whoop").unwrap()).unwrap(), [3].into());
    let (q, _) = quotient_by_filter(&h, &(0..4).collect()).unwrap();
    assert_eq!(q.size(), 1);
    let g3 = goedel_chain(3);
    let (q, proj) = quotient_by_filter(&g3, &[1, 2].into()).unwrap();
    assert_eq!(q.size(), 2);
    assert_eq!(kernel_class(&g3, &q, &proj, &builtin("hoop").unwrap()).unwrap(), [1, 2].into());
    // ½·½ = 0 in the Łukasiewicz chain
    assert!(matches!(quotient_by_filter(&hoop_chain(3), &[1, 2].into()), Err(Error::NotFilter(_))));
}

#[test]
fn bc_decomposition_examples() {
    let h = boolean_product_hoop(2);
    let one = h.constant_named("one").unwrap();
    assert_eq!(bc_decompose(&h, one).unwrap(), (one, one));
    for x in 0..h.size() {
        assert_eq!(bc_decompose(&h, x).unwrap(), (x, one));
    }
    let phoop = builtin("phoop").unwrap();
    for n in 1..=4 {
        for h in phoop.models(n, false).unwrap() {
            let one = h.constant_named("one").unwrap();
            let (g, c) = bc_sets(&h).unwrap();
            assert_eq!(g, (0..n).collect::<BTreeSet<_>>());
            assert_eq!(c, [one].into());
            for x in 0..n {
                let (b, c) = bc_decompose(&h, x).unwrap();
                assert_eq!(bc_decompose(&h, b).unwrap().0, b);
                assert_eq!(bc_decompose(&h, c).unwrap().1, one);
                assert_eq!(h.call("mul", &[b, b]), b);
            }
        }
    }
    assert!(bc_sets(&goedel_chain(3)).is_err());
}

#[test]
fn regular_dense_examples() {
    let rd = regular_dense(&boolean_product_algebra(1)).unwrap();
    assert_eq!(rd.regular, [0, 1].into());
    assert_eq!(rd.dense, [1].into());
    assert!(rd.degenerate);
    let rd = regular_dense(&boolean_product_algebra(2)).unwrap();
    assert_eq!(rd.regular.len(), 4);
    assert_eq!(rd.dense, [3].into());
    assert_eq!(rd.point.p, FunctionMap::identity(4));
    assert!(regular_dense(&lukasiewicz_hoop(3)).is_err());
}

#[test]
fn finite_product_algebras_are_boolean() {
    let pralg = builtin("pralg").unwrap();
    for n in 1..=4 {
        for a in pralg.models(n, false).unwrap() {
            let rd = regular_dense(&a).unwrap();
            assert!(rd.degenerate);
            assert_eq!(rd.dense.len(), 1);
        }
    }
}

#[test]
fn mv_hoop_round_trip_examples() {
    for a in [l2(), lukasiewicz(3)] {
        let h = mv_to_hoop(&a).unwrap();
        assert!(builtin("bwhoop").unwrap().is_member(&h).unwrap());
        let back = hoop_to_mv(&h, h.constant_named("zero").unwrap()).unwrap();
        assert_eq!(back, a);
    }
    assert_eq!(mv_to_hoop(&lukasiewicz(3)).unwrap(), lukasiewicz_hoop(3));
    for n in 1..=5 {
        for a in builtin("mv").unwrap().models(n, false).unwrap() {
            let h = mv_to_hoop(&a).unwrap();
            assert_eq!(hoop_to_mv(&h, h.constant_named("zero").unwrap()).unwrap(), a);
        }
    }
}

#[test]
fn hoop_to_mv_needs_a_bottom() {
    let h = lukasiewicz_hoop(3);
    assert!(matches!(hoop_to_mv(&h, 1), Err(Error::NotInVariety { .. })));
    assert!(hoop_to_mv(&as_whoop(&h), 0).is_ok());
}

#[test]
fn every_constructed_algebra_stays_in_its_variety() {
    for a in [lukasiewicz(5), l2().product(&lukasiewicz(3)).unwrap()] {
        assert!(builtin("mv").unwrap().is_member(&a).unwrap());
    }
    let (sub, _) = lukasiewicz(5).subalgebra(&[0, 2, 4].into()).unwrap();
    assert!(builtin("mv").unwrap().is_member(&sub).unwrap());
    let (q, _) = quotient_by_filter(&boolean_product_hoop(2), &[2, 3].into()).unwrap();
    assert!(builtin("phoop").unwrap().is_member(&q).unwrap());
}
