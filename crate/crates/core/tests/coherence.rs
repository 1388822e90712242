mod common;

use cohact_core::coherence::{
    all_lifts, canonical_point, coherence_by_criterion, coherence_by_extension, coherence_report, ideal_morphism_test,
    ideality_test, lift_classes, ExtensionFailure, ExtensionVerdict, SigmaCase,
};
use cohact_core::instances::boolean_product_algebra;
use cohact_core::points::{enumerate_points, make_split_point, point_morphisms, v_models, PointBounds};
use cohact_core::varieties::regular_dense;
use cohact_core::morphism::automorphisms;
use cohact_core::FunctionMap;
use common::{ctx, f2_square_point, map, mv_square_point, pset_two_point, ut2_point};

#[test]
fn canonical_points_are_coherent_and_ideal() {
    for name in ["alg:cassoc", "alg:assoc", "mv", "product", "pset"] {
        let c = ctx(name);
        for n in 1..=3 {
            for x in v_models(&c, n, false).unwrap() {
                let point = canonical_point(&c, &x).unwrap();
                let report = coherence_report(&c, &point).unwrap();
                assert!(report.coherent(), "{name}");
                assert_eq!(report.agreement, Some(true), "{name}");
                assert!(ideality_test(&c, &point).unwrap().ideal(), "{name}");
            }
        }
    }
}

#[test]
fn diagonal_point_of_f2_squared_is_coherent() {
    let (c, diag) = f2_square_point(true);
    let f = match coherence_by_extension(&c, &diag).unwrap() {
        ExtensionVerdict::Present { f } => f,
        other => panic!("{other:?}"),
    };
    // f(α, x) = s(α·1) + k(x) with (α, x) at 2α + x and k(x) = (0, x)
    for alpha in 0..2 {
        for x in 0..2 {
            assert_eq!(f.get(2 * alpha + x), 2 * alpha + (alpha ^ x));
        }
    }
    let crit = coherence_by_criterion(&c, &diag).unwrap();
    assert!(crit.coherent);
    assert!(crit.detail.contains("unit 3"));
    let lift = ideality_test(&c, &diag).unwrap().lift.unwrap();
    assert_eq!(lift.sigma_case, SigmaCase::Identity);
    assert_eq!(lift.a_lift.constant_named("one"), Some(3));
}

#[test]
fn injection_point_of_f2_squared_is_not_coherent() {
    let (c, inj) = f2_square_point(false);
    assert!(matches!(
        coherence_by_extension(&c, &inj).unwrap(),
        ExtensionVerdict::Absent(ExtensionFailure::Conflict(_))
    ));
    let crit = coherence_by_criterion(&c, &inj).unwrap();
    assert!(!crit.coherent);
    assert_eq!(crit.witness, Some(2));
    assert!(!ideality_test(&c, &inj).unwrap().ideal());
}

#[test]
fn upper_triangular_point_is_not_coherent() {
    let (c, ut2) = ut2_point();
    let report = coherence_report(&c, &ut2).unwrap();
    assert!(!report.coherent());
    assert_eq!(report.agreement, Some(true));
    // s(1) = e₁₁ while the unit is e₁₁ + e₂₂
    let crit = report.by_criterion.unwrap();
    assert_eq!(crit.witness, Some(4));
    assert!(crit.detail.contains("unit 5"));
    let trace = ideality_test(&c, &ut2).unwrap().trace;
    assert!(trace.last().unwrap().contains("none lifts"));
}

#[test]
fn diagonal_mv_point_is_coherent_with_negation() {
    let (c, diag) = mv_square_point(true);
    let f = coherence_by_extension(&c, &diag).unwrap().map().cloned().unwrap();
    // M(X) puts (a, 1) at a and (a, 0) at 3 + a; X = {(1, a)} via k(a) = 6 + a
    for a in 0..3 {
        assert_eq!(f.get(a), 6 + a);
        // (0, ¬a) with ¬a = 2 - a on the chain
        assert_eq!(f.get(3 + a), 2 - a);
    }
    assert!(coherence_by_criterion(&c, &diag).unwrap().coherent);
    assert!(ideality_test(&c, &diag).unwrap().ideal());
}

#[test]
fn shifted_mv_section_is_not_coherent() {
    let (c, shifted) = mv_square_point(false);
    let crit = coherence_by_criterion(&c, &shifted).unwrap();
    assert!(!crit.coherent);
    // s′(0) = (0, 1)
    assert_eq!(crit.witness, Some(2));
    assert!(crit.detail.contains("bottom 0"));
    assert!(!coherence_by_extension(&c, &shifted).unwrap().coherent());
    assert!(!ideality_test(&c, &shifted).unwrap().ideal());
}

#[test]
fn regular_dense_points_are_coherent() {
    let c = ctx("product");
    for n in 1..=3 {
        let rd = regular_dense(&boolean_product_algebra(n)).unwrap();
        let report = coherence_report(&c, &rd.point).unwrap();
        assert!(report.coherent());
        assert_eq!(report.agreement, Some(true));
        assert!(ideality_test(&c, &rd.point).unwrap().ideal());
    }
}

#[test]
fn pset_point_with_a_stray_element_is_not_coherent() {
    let (c, point) = pset_two_point();
    match coherence_by_extension(&c, &point).unwrap() {
        ExtensionVerdict::Absent(ExtensionFailure::OutsidePoint { element, .. }) => assert_eq!(element, 1),
        other => panic!("{other:?}"),
    }
    let crit = coherence_by_criterion(&c, &point).unwrap();
    assert_eq!(crit.witness, Some(1));
    let outcome = ideality_test(&c, &point).unwrap();
    assert!(!outcome.ideal());
    assert!(outcome.trace[0].contains("B is empty"));
}

#[test]
fn ring_context_decides_by_criterion_only() {
    let c = ctx("ring");
    let (_, diag) = f2_square_point(true);
    let b = diag.b.reduct(&c.u.signature).unwrap();
    let a = diag.a.reduct(&c.v.signature).unwrap();
    let point = make_split_point(&c, &b, &a, diag.p.clone(), diag.s.clone()).unwrap();
    let report = coherence_report(&c, &point).unwrap();
    assert!(report.by_extension.is_none());
    assert_eq!(report.agreement, None);
    assert!(report.coherent());
}

#[test]
fn morphisms_between_ideal_points_lift() {
    for (name, max) in [("alg:cassoc", 4), ("mv", 5), ("product", 4), ("pset", 4)] {
        let c = ctx(name);
        let mut lifted = 0;
        for b in cohact_core::harness::default_bases(&c).unwrap() {
            let ideal: Vec<_> = enumerate_points(&c, &b, &PointBounds::new(max))
                .unwrap()
                .into_iter()
                .filter(|p| ideality_test(&c, p).unwrap().ideal())
                .collect();
            for (x, y) in common::pairs(&ideal) {
                for m in point_morphisms(&c, x, y).unwrap() {
                    assert!(ideal_morphism_test(&c, &m).unwrap().lifted(), "{name}");
                    lifted += 1;
                }
            }
        }
        assert!(lifted > 0, "{name}");
    }
}

#[test]
fn ideal_morphism_test_needs_ideal_endpoints() {
    let (c, diag) = f2_square_point(true);
    let (_, inj) = f2_square_point(false);
    let m = point_morphisms(&c, &diag, &inj).unwrap().remove(0);
    assert!(ideal_morphism_test(&c, &m).is_err());
}

#[test]
fn lifts_are_unique_up_to_isomorphism() {
    for (name, max) in [("alg:cassoc", 4), ("mv", 5), ("pset", 4)] {
        let c = ctx(name);
        for b in cohact_core::harness::default_bases(&c).unwrap() {
            for p in enumerate_points(&c, &b, &PointBounds::new(max)).unwrap() {
                let lifts = all_lifts(&c, &p).unwrap();
                let ideal = ideality_test(&c, &p).unwrap().ideal();
                assert_eq!(!lifts.is_empty(), ideal, "{name}");
                if ideal {
                    assert_eq!(lift_classes(&lifts, c.direction).unwrap(), 1, "{name}");
                }
            }
        }
    }
}

#[test]
fn verdicts_are_invariant_under_relabelling() {
    for (c, p) in [f2_square_point(true), f2_square_point(false), mv_square_point(true), mv_square_point(false)] {
        let n = p.a.size();
        let reversed = map(n, n, &(0..n).rev().collect::<Vec<_>>());
        for perm in automorphisms(&p.a).into_iter().chain([reversed]) {
            let moved = p.transport(&perm).unwrap();
            let Ok(moved) = make_split_point(&c, &moved.b, &moved.a, moved.p, moved.s) else {
                panic!("transport broke a point");
            };
            let before = coherence_report(&c, &p).unwrap();
            let after = coherence_report(&c, &moved).unwrap();
            assert_eq!(before.coherent(), after.coherent());
            assert_eq!(
                before.by_criterion.map(|v| v.witness.map(|w| perm.get(w))),
                after.by_criterion.map(|v| v.witness)
            );
            if let (Some(f), Some(g)) = (
                before.by_extension.as_ref().and_then(|e| e.map()),
                after.by_extension.as_ref().and_then(|e| e.map()),
            ) {
                // UF(X) is rebuilt from the relabelled kernel, so only the image is comparable
                let image: std::collections::BTreeSet<_> = f.image().iter().map(|&e| perm.get(e)).collect();
                assert_eq!(image, g.image());
            }
            assert_eq!(
                ideality_test(&c, &p).unwrap().ideal(),
                ideality_test(&c, &moved).unwrap().ideal()
            );
        }
    }
}

#[test]
fn extension_is_deterministic() {
    let (c, diag) = mv_square_point(true);
    let first = coherence_by_extension(&c, &diag).unwrap();
    assert_eq!(first, coherence_by_extension(&c, &diag).unwrap());
    assert_eq!(first.map().unwrap().domain(), 6);
    assert_ne!(first.map().unwrap(), &FunctionMap::identity(6));
}
