mod common;

use std::collections::BTreeSet;

use cohact_core::closures::{
    closure_on_morphism, maybe_closure, maybe_point, mv_closure, product_closure, unitalize, verify_cartesian_unit,
    ContextSpec, Direction,
};
use cohact_core::instances::{
    boolean_product_algebra, boolean_product_hoop, lukasiewicz_hoop, null_algebra, pointed_set, prime_field,
};
use cohact_core::morphism::{find_isomorphism, homomorphisms, is_homomorphism, ConstantFlags, HomSearch};
use cohact_core::points::v_models;
use cohact_core::varieties::{builtin, hoop_to_mv};
use cohact_core::{Error, FiniteAlgebra};
use common::{ctx, hoop_chain};

fn pool(c: &ContextSpec, max: usize) -> Vec<FiniteAlgebra> {
    (1..=max).flat_map(|n| v_models(c, n, false).unwrap()).collect()
}

#[test]
fn unitalization_of_the_zero_algebra_is_the_field() {
    for p in [2, 3] {
        let r = unitalize(&null_algebra(p, 0), p).unwrap();
        assert!(find_isomorphism(&r.closed, &prime_field(p)).is_some());
    }
}

#[test]
fn unitalization_of_a_null_line() {
    let c = ctx("alg:cassoc");
    let x = null_algebra(2, 1);
    let r = c.closure(&x).unwrap();
    assert_eq!(r.closed.size(), 4);
    // (1, x)(1, x) = (1, 0) with (a, x) at 2a + x
    assert_eq!(r.closed.call("mul", &[3, 3]), 2);
    assert_eq!(r.closed.constant_named("one"), Some(2));
    assert!(c.u.is_member(&r.closed).unwrap());
    assert!(builtin("ring").unwrap().is_member(&r.closed.reduct(&builtin("ring").unwrap().signature).unwrap()).unwrap());
}

#[test]
fn non_unit_closed_varieties_are_rejected() {
    for name in ["alg:lie", "alg:leib", "alg:ab"] {
        match ContextSpec::builtin(name) {
            Err(Error::NotUnitClosed { variety, identity }) => {
                assert_eq!(variety, name);
                assert!(!identity.is_empty());
            }
            other => panic!("{name}: {other:?}"),
        }
    }
    match ContextSpec::builtin("alg:lie") {
        Err(Error::NotUnitClosed { identity, .. }) => assert!(identity.starts_with("(mul x x) = zero")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn mv_closure_examples() {
    let trivial = hoop_chain(1);
    let m = mv_closure(&trivial).unwrap();
    assert!(find_isomorphism(&m.closed, &lukasiewicz_hoop(2)).is_some());

    let h = hoop_chain(3);
    let m = mv_closure(&h).unwrap();
    assert_eq!(m.closed.size(), 6);
    let mv = hoop_to_mv(&m.closed, m.closed.constant_named("zero").unwrap()).unwrap();
    assert!(builtin("mv").unwrap().is_member(&mv).unwrap());
    // (a, 1) → (b, 0) = (a·b, 0); (a, 0) sits at 3 + a
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(m.closed.call("imp", &[a, 3 + b]), 3 + h.call("mul", &[a, b]));
        }
    }
    assert!(matches!(mv_closure(&goedel_hoop()), Err(Error::NotInVariety { .. })));
}

fn goedel_hoop() -> FiniteAlgebra {
    let sig = builtin("whoop").unwrap().signature;
    FiniteAlgebra::from_fn(
        sig.clone(),
        3,
        |op, a| match sig.ops()[op].name.as_str() {
            "mul" => a[0].min(a[1]),
            _ if a[0] <= a[1] => 2,
            _ => a[1],
        },
        vec![2],
    )
    .unwrap()
}

#[test]
fn mv_closure_restricted_to_the_top_layer_is_the_hoop() {
    for h in pool(&ctx("mv"), 4) {
        let m = mv_closure(&h).unwrap();
        let top: BTreeSet<_> = (0..h.size()).collect();
        let (sub, _) = m.closed.reduct(h.signature()).unwrap().subalgebra(&top).unwrap();
        assert_eq!(sub, h);
    }
}

#[test]
fn product_closure_examples() {
    let trivial = boolean_product_hoop(0);
    let k = product_closure(&trivial).unwrap();
    assert!(find_isomorphism(&k.closed, &boolean_product_algebra(1)).is_some());

    let h = boolean_product_hoop(1);
    let k = product_closure(&h).unwrap();
    assert_eq!(k.closed.size(), 4);
    assert!(builtin("pralg").unwrap().is_member(&k.closed).unwrap());
    assert!(builtin("bl").unwrap().is_member(&k.closed).unwrap());
    assert!(find_isomorphism(&k.closed, &boolean_product_algebra(2)).is_some());

    for h in pool(&ctx("product"), 4) {
        assert_eq!(product_closure(&h).unwrap().closed.size(), 2 * h.size());
    }
}

#[test]
fn maybe_examples() {
    let (one, _) = maybe_point(0);
    assert_eq!(one.size(), 1);
    let (two, eps) = maybe_point(1);
    assert_eq!(two.size(), 2);
    assert_eq!(eps.table(), &[0]);
    assert!(eps.is_injective());
    let r = maybe_closure(&pointed_set(3)).unwrap();
    assert_eq!(r.closed.size(), 4);
    assert_eq!(r.closed.constant(0), 3);
    assert_eq!(r.direction, Direction::Opposite);
}

#[test]
fn closures_land_in_u_and_units_are_v_morphisms() {
    for name in ["alg:cassoc", "alg:assoc", "alg:alt", "mv", "product", "pset"] {
        let c = ctx(name);
        for x in pool(&c, 4) {
            let r = c.closure(&x).unwrap();
            assert!(c.u.is_member(&r.closed).unwrap(), "{name}");
            if r.direction == Direction::Normal {
                let ufx = r.closed.reduct(&c.v.signature).unwrap();
                assert_eq!(is_homomorphism(&x, &ufx, &r.unit, &ConstantFlags::All).unwrap(), None);
                // the unit is the first block of the layout, so restriction is literal
                let (sub, _) = ufx.subalgebra(&r.unit.image()).unwrap();
                assert_eq!(sub, x, "{name}");
            }
            assert!(verify_cartesian_unit(&c, &x).unwrap().passed(), "{name} on {:?}", x.table_string());
        }
    }
}

#[test]
fn cartesian_unit_over_f3() {
    let c = ctx("alg:cassoc:3");
    for x in pool(&c, 3) {
        assert!(verify_cartesian_unit(&c, &x).unwrap().passed());
    }
}

#[test]
fn ring_context_has_no_closure() {
    let c = ctx("ring");
    let x = prime_field(2).reduct(&c.v.signature).unwrap();
    assert!(matches!(c.closure(&x), Err(Error::ClosureUnavailable(_))));
}

#[test]
fn closure_is_functorial_on_the_pool() {
    for name in ["alg:cassoc", "alg:assoc", "mv", "product", "pset"] {
        let c = ctx(name);
        let xs = pool(&c, 4);
        let mut checked = 0;
        for (x, y) in common::pairs(&xs) {
            let fx = c.closure(x).unwrap();
            let fy = c.closure(y).unwrap();
            for g in homomorphisms(x, y, &HomSearch::default()).unwrap() {
                let fg = closure_on_morphism(&c, x, y, &g).unwrap();
                match c.direction {
                    Direction::Normal => {
                        assert_eq!(
                            is_homomorphism(&fx.closed, &fy.closed, &fg, &ConstantFlags::All).unwrap(),
                            None,
                            "{name}"
                        );
                        assert_eq!(fx.unit.then(&fg).unwrap(), g.then(&fy.unit).unwrap(), "{name}");
                    }
                    Direction::Opposite => {
                        assert_eq!(
                            is_homomorphism(&fx.closed, &fy.closed, &fg, &ConstantFlags::All).unwrap(),
                            None
                        );
                        assert_eq!(fg.then(&fy.unit).unwrap(), fx.unit.then(&g).unwrap());
                    }
                }
                checked += 1;
            }
        }
        assert!(checked > 0, "{name}");
    }
}
