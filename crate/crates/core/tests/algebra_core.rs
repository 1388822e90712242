mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use cohact_core::closures::{mv_closure, unitalize};
use cohact_core::congruence::{quotient, Partition};
use cohact_core::instances::{self, l2, lukasiewicz, lukasiewicz_hoop, null_algebra};
use cohact_core::linear::{decode, encode};
use cohact_core::morphism::{
    extend_homomorphism, find_isomorphism, generated_subuniverse, greedy_generators, is_homomorphism, ConstantFlags,
    Extension, HomFailure,
};
use cohact_core::points::kernel_object;
use cohact_core::varieties::builtin;
use cohact_core::{check_identity, eval_term, parse_term, Error, FiniteAlgebra, FunctionMap, Identity, Signature};
use common::{map, ut2_point};
use proptest::prelude::*;

fn mv_axioms() -> Vec<Identity> {
    builtin("mv").unwrap().identities
}

#[test]
fn double_negation_of_top_in_l2() {
    let a = l2();
    let t = parse_term(a.signature(), "(neg (neg x))").unwrap();
    assert_eq!(eval_term(&a, &t, &[1]).unwrap(), 1);
}

#[test]
fn hoop_term_on_two_element_hoop() {
    // {a, 1} with a = 0 and a·a = a
    let h = instances::as_whoop(&lukasiewicz_hoop(2));
    assert_eq!(h.call("mul", &[0, 0]), 0);
    let t = parse_term(h.signature(), "(mul x (imp x y))").unwrap();
    assert_eq!(eval_term(&h, &t, &[0, 1]).unwrap(), 0);
}

#[test]
fn eval_errors_are_distinct() {
    let a = l2();
    let t = parse_term(a.signature(), "(oplus x y)").unwrap();
    assert!(matches!(eval_term(&a, &t, &[0]), Err(Error::UnboundVariable(_))));
    assert!(matches!(parse_term(a.signature(), "(times x y)"), Err(Error::Parse { .. })));
    let foreign = cohact_core::Term::app("times", vec![cohact_core::Term::var(0)]);
    assert!(matches!(eval_term(&a, &foreign, &[0]), Err(Error::UnknownSymbol(_))));
    assert!(matches!(parse_term(a.signature(), "(neg x y)"), Err(Error::ArityMismatch { .. })));
}

#[test]
fn semidirect_product_formula_over_f2() {
    let x = null_algebra(2, 1);
    let r = unitalize(&x, 2).unwrap();
    let fx = &r.closed;
    let t = parse_term(fx.signature(), "(mul x y)").unwrap();
    let n = x.size();
    for e in 0..fx.size() {
        for f in 0..fx.size() {
            let (a, u) = (e / n, e % n);
            let (b, v) = (f / n, f % n);
            let uv = x.call("mul", &[u, v]);
            let expected_x = (uv + a * v + b * u) % 2;
            let expected = ((a * b) % 2) * n + expected_x;
            assert_eq!(eval_term(fx, &t, &[e, f]).unwrap(), expected);
        }
    }
    // (1, x)(1, x) = (1, 0)
    assert_eq!(fx.call("mul", &[3, 3]), 2);
}

#[test]
fn mv4_holds_in_l2_and_all_axioms_in_l3() {
    let mv4 = Identity::parse(
        l2().signature(),
        "(oplus (neg (oplus (neg x) y)) y) = (oplus (neg (oplus (neg y) x)) x)",
    )
    .unwrap();
    assert!(check_identity(&l2(), &mv4).unwrap().holds());
    let l3 = lukasiewicz(3);
    for id in mv_axioms() {
        assert!(check_identity(&l3, &id).unwrap().holds(), "{id}");
    }
}

#[test]
fn corrupted_l2_fails_mv3_at_one() {
    let sig = l2().signature().clone();
    let broken = FiniteAlgebra::new(sig.clone(), 2, vec![vec![0, 1, 1, 0], vec![1, 0]], vec![0]).unwrap();
    let mv3 = Identity::parse(&sig, "(oplus x (neg zero)) = (neg zero)").unwrap();
    match check_identity(&broken, &mv3).unwrap() {
        cohact_core::IdentityVerdict::Failed { assignment, lhs, rhs } => {
            assert_eq!(assignment, vec![1]);
            assert_eq!((lhs, rhs), (0, 1));
        }
        v => panic!("expected failure, got {v:?}"),
    }
}

#[test]
fn identity_on_foreign_signature_is_rejected() {
    let id = Identity::parse(l2().signature(), "(neg x) = x").unwrap();
    let h = lukasiewicz_hoop(2);
    assert!(matches!(check_identity(&h, &id), Err(Error::SignatureMismatch(_))));
}

#[test]
fn identity_map_is_homomorphism() {
    for a in [l2(), lukasiewicz(4), instances::ut2_f2(), lukasiewicz_hoop(3)] {
        let id = FunctionMap::identity(a.size());
        assert_eq!(is_homomorphism(&a, &a, &id, &ConstantFlags::All).unwrap(), None);
    }
}

#[test]
fn ut2_set_map_fails_on_the_paper_pair() {
    let (c, point) = ut2_point();
    let ext = kernel_object(&c, &point).unwrap();
    assert_eq!(ext.x.size(), 4);
    let fx = unitalize(&ext.x, 2).unwrap().closed.reduct(&c.v.signature).unwrap();
    // f(a, [[0,b],[0,c]]) = [[a,b],[0,c]]
    let f = FunctionMap::new(8, 8, (0..8).map(|e| 4 * (e / 4) + ext.k.get(e % 4)).collect()).unwrap();
    let witness = is_homomorphism(&fx, &point.a, &f, &ConstantFlags::All).unwrap();
    assert!(matches!(witness, Some(HomFailure::Operation { ref op, .. }) if op == "mul"));
    // (0, [[0,1],[0,1]]) and (1, [[0,1],[0,0]])
    let first = 2 + 1;
    let second = 4 + 2;
    let lhs = point.a.call("mul", &[f.get(first), f.get(second)]);
    let rhs = f.get(fx.call("mul", &[first, second]));
    assert_eq!(lhs, 0);
    assert_eq!(decode(rhs, 2, 3), vec![0, 1, 1]);
}

#[test]
fn generated_subuniverse_examples() {
    let a = lukasiewicz(4);
    let all: BTreeSet<_> = (0..4).collect();
    assert_eq!(generated_subuniverse(&a, &all), all);
    assert_eq!(generated_subuniverse(&l2(), &BTreeSet::new()), [0, 1].into());
    let x = null_algebra(2, 1);
    let r = unitalize(&x, 2).unwrap();
    let seeds: BTreeSet<_> = (0..x.size())
        .map(|e| r.unit.get(e))
        .chain((0..2).map(|alpha| r.initial_map.get(alpha)))
        .collect();
    assert_eq!(generated_subuniverse(&r.closed, &seeds).len(), r.closed.size());
}

#[test]
fn extension_from_identity_partial() {
    let a = lukasiewicz(5);
    let partial: Vec<_> = (0..5).map(|e| (e, e)).collect();
    match extend_homomorphism(&a, &a, &partial, &ConstantFlags::All).unwrap() {
        Extension::Extended(f) => assert_eq!(f, FunctionMap::identity(5)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn extension_requires_generation() {
    let a = lukasiewicz(5);
    // the constants of Ł₅ generate {0, 4} only
    match extend_homomorphism(&a, &a, &[], &ConstantFlags::All) {
        Err(Error::NotGenerating { generated, size }) => assert_eq!((generated, size), (2, 5)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn extension_conflict_reports_two_derivations() {
    let a = lukasiewicz(3);
    // ½ ↦ 0 forces ¬½ = ½ ↦ ¬0 = 1
    match extend_homomorphism(&a, &a, &[(1, 0)], &ConstantFlags::All).unwrap() {
        Extension::Conflict(w) => {
            assert!(w.element < 3);
            assert_ne!(w.first_image, w.second_image);
            assert_ne!(w.first, w.second);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn quotient_by_trivial_partitions() {
    let a = lukasiewicz(4);
    let (fine, proj) = quotient(&a, &Partition::finest(4)).unwrap();
    assert!(find_isomorphism(&a, &fine).is_some());
    assert!(proj.is_bijective());
    let (coarse, _) = quotient(&a, &Partition::coarsest(4)).unwrap();
    assert_eq!(coarse.size(), 1);
}

fn goedel_chain() -> FiniteAlgebra {
    let sig = builtin("hoop").unwrap().signature;
    FiniteAlgebra::from_fn(
        sig.clone(),
        3,
        |op, a| match sig.ops()[op].name.as_str() {
            "mul" => a[0].min(a[1]),
            _ => if a[0] <= a[1] { 2 } else { a[1] },
        },
        vec![2],
    )
    .unwrap()
}

#[test]
fn filter_congruence_on_three_element_chains() {
    // {½, 1} is not closed under the Łukasiewicz product: ½·½ = 0
    let l3 = instances::as_whoop(&lukasiewicz_hoop(3));
    assert_eq!(l3.call("mul", &[1, 1]), 0);
    // on the idempotent chain it is a filter and collapses to two elements
    let h = goedel_chain();
    assert!(builtin("hoop").unwrap().is_member(&h).unwrap());
    let filter: BTreeSet<_> = [1, 2].into();
    let labels: Vec<Vec<bool>> = (0..3)
        .map(|x| {
            (0..3)
                .map(|y| filter.contains(&h.call("imp", &[x, y])) && filter.contains(&h.call("imp", &[y, x])))
                .collect()
        })
        .collect();
    let (q, proj) = quotient(&h, &Partition::from_labels(&labels)).unwrap();
    assert_eq!(q.size(), 2);
    assert_eq!(is_homomorphism(&h, &q, &proj, &ConstantFlags::All).unwrap(), None);
    for x in 0..3 {
        for y in 0..3 {
            for op in ["mul", "imp"] {
                assert_eq!(q.call(op, &[proj.get(x), proj.get(y)]), proj.get(h.call(op, &[x, y])));
            }
        }
    }
}

#[test]
fn non_congruence_is_refused() {
    let a = lukasiewicz(3);
    let part = Partition::from_blocks(3, &[vec![0, 1], vec![2]]).unwrap();
    assert!(matches!(quotient(&a, &part), Err(Error::NotCongruence(_))));
}

#[test]
fn isomorphism_examples() {
    let a = lukasiewicz(4);
    assert_eq!(find_isomorphism(&a, &a), Some(FunctionMap::identity(4)));
    let trivial = instances::as_whoop(&lukasiewicz_hoop(1));
    let m = mv_closure(&trivial).unwrap().closed;
    let iso = find_isomorphism(&m, &lukasiewicz_hoop(2)).unwrap();
    // M(1) = {(1,1), (1,0)}: top first, bottom second
    assert_eq!(iso.table(), &[1, 0]);
    let square = l2().product(&l2()).unwrap();
    assert!(find_isomorphism(&lukasiewicz(3), &square).is_none());
}

#[test]
fn least_isomorphism_among_automorphic_copies() {
    // L₂ × L₂ has the swap automorphism; the identity is the least table
    let square = l2().product(&l2()).unwrap();
    assert_eq!(find_isomorphism(&square, &square).unwrap(), FunctionMap::identity(4));
    let swapped = square.relabel(&[0, 2, 1, 3]);
    let iso = find_isomorphism(&square, &swapped).unwrap();
    assert_eq!(iso.table(), &[0, 1, 2, 3]);
}

#[test]
fn f2_square_encoding_is_row_major() {
    assert_eq!(encode(&[1, 0], 2), 2);
    assert_eq!(decode(2, 2, 2), vec![1, 0]);
    assert_eq!(map(2, 2, &[1, 0]).inverse().unwrap().table(), &[1, 0]);
}

fn small_sig() -> Arc<Signature> {
    Arc::new(Signature::new([("f", 2), ("g", 1)], ["c"]).unwrap())
}

fn arb_algebra() -> impl Strategy<Value = FiniteAlgebra> {
    (1usize..=4).prop_flat_map(|n| {
        (
            proptest::collection::vec(0..n, n * n),
            proptest::collection::vec(0..n, n),
            0..n,
        )
            .prop_map(move |(f, g, c)| FiniteAlgebra::new(small_sig(), n, vec![f, g], vec![c]).unwrap())
    })
}

fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

const SMALL_IDENTITIES: &[&str] = &[
    "(f x y) = (f y x)",
    "(f x (f y z)) = (f (f x y) z)",
    "(g (g x)) = x",
    "(f x c) = x",
    "(f x x) = x",
    "(g (f x y)) = (f (g y) (g x))",
];

fn all_assignments(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n.pow(k as u32)).map(|code| decode(code, n, k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_witnesses_are_valid_and_least(a in arb_algebra(), which in 0..SMALL_IDENTITIES.len()) {
        let id = Identity::parse(a.signature(), SMALL_IDENTITIES[which]).unwrap();
        let (lhs, rhs, k) = (id.lhs.clone(), id.rhs.clone(), id.vars);
        let first_bad = all_assignments(a.size(), k)
            .into_iter()
            .find(|env| eval_term(&a, &lhs, env).unwrap() != eval_term(&a, &rhs, env).unwrap());
        match check_identity(&a, &id).unwrap() {
            cohact_core::IdentityVerdict::Satisfied => prop_assert!(first_bad.is_none()),
            cohact_core::IdentityVerdict::Failed { assignment, lhs: l, rhs: r } => {
                prop_assert_eq!(Some(assignment.clone()), first_bad);
                prop_assert_eq!(eval_term(&a, &lhs, &assignment).unwrap(), l);
                prop_assert_eq!(eval_term(&a, &rhs, &assignment).unwrap(), r);
                prop_assert_ne!(l, r);
            }
        }
    }

    #[test]
    fn extensions_are_homomorphisms_and_unique(a in arb_algebra(), seed in proptest::collection::vec(0usize..4, 4)) {
        let gens = greedy_generators(&a);
        let partial: Vec<_> = gens.iter().zip(&seed).map(|(&g, &y)| (g, y % a.size())).collect();
        let first = extend_homomorphism(&a, &a, &partial, &ConstantFlags::All).unwrap();
        let second = extend_homomorphism(&a, &a, &partial, &ConstantFlags::All).unwrap();
        prop_assert_eq!(&first, &second);
        if let Extension::Extended(f) = first {
            prop_assert_eq!(is_homomorphism(&a, &a, &f, &ConstantFlags::All).unwrap(), None);
            for &(x, y) in &partial {
                prop_assert_eq!(f.get(x), y);
            }
        }
    }

    #[test]
    fn transported_generators_extend_to_the_relabelling(a in arb_algebra(), shuffle in arb_perm(4)) {
        let n = a.size();
        let perm: Vec<usize> = shuffle.into_iter().filter(|&x| x < n).collect();
        let b = a.relabel(&perm);
        let partial: Vec<_> = greedy_generators(&a).into_iter().map(|g| (g, perm[g])).collect();
        match extend_homomorphism(&a, &b, &partial, &ConstantFlags::All).unwrap() {
            Extension::Extended(f) => prop_assert_eq!(f.table(), &perm[..]),
            Extension::Conflict(w) => prop_assert!(false, "conflict {w}"),
        }
    }

    #[test]
    fn quotient_projection_and_sections(a in arb_algebra(), labels in proptest::collection::vec(0usize..2, 4)) {
        let part = Partition::from_labels(&labels[..a.size()]);
        let (fine, _) = quotient(&a, &Partition::finest(a.size())).unwrap();
        prop_assert!(find_isomorphism(&a, &fine).is_some());
        if let Ok((q, proj)) = quotient(&a, &part) {
            prop_assert_eq!(is_homomorphism(&a, &q, &proj, &ConstantFlags::All).unwrap(), None);
            let reps = part.representatives();
            for block in 0..q.size() {
                prop_assert_eq!(proj.get(reps[block]), block);
            }
        }
    }

    #[test]
    fn isomorphism_is_an_equivalence(a in arb_algebra(), p1 in arb_perm(4), p2 in arb_perm(4)) {
        let n = a.size();
        let perm1: Vec<usize> = p1.into_iter().filter(|&x| x < n).collect();
        let perm2: Vec<usize> = p2.into_iter().filter(|&x| x < n).collect();
        let b = a.relabel(&perm1);
        let c = b.relabel(&perm2);
        let ab = find_isomorphism(&a, &b);
        prop_assert!(ab.is_some());
        prop_assert!(find_isomorphism(&b, &a).is_some());
        prop_assert!(find_isomorphism(&a, &c).is_some());
        let f = ab.unwrap();
        prop_assert_eq!(is_homomorphism(&a, &b, &f, &ConstantFlags::All).unwrap(), None);
        prop_assert!(f.is_bijective());
    }

    #[test]
    fn isomorphism_verdicts_are_symmetric(a in arb_algebra(), b in arb_algebra()) {
        prop_assert_eq!(find_isomorphism(&a, &b).is_some(), find_isomorphism(&b, &a).is_some());
    }
}
