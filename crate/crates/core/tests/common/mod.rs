#![allow(dead_code)]

use cohact_core::closures::ContextSpec;
use cohact_core::instances;
use cohact_core::linear::encode;
use cohact_core::points::{make_split_point, SplitPoint};
use cohact_core::{FiniteAlgebra, FunctionMap};

pub fn ctx(name: &str) -> ContextSpec {
    ContextSpec::builtin(name).unwrap()
}

pub fn map(dom: usize, cod: usize, table: &[usize]) -> FunctionMap {
    FunctionMap::new(dom, cod, table.to_vec()).unwrap()
}

/// `F_2 x F_2 ⇄ F_2` in CAssoc with `p = π₁`; `diagonal` picks `a ↦ (a, a)`
/// over `a ↦ (a, 0)`.
pub fn f2_square_point(diagonal: bool) -> (ContextSpec, SplitPoint) {
    let c = ctx("alg:cassoc");
    let b = instances::prime_field(2).reduct(&c.u.signature).unwrap();
    let a = instances::prime_field_square(2).reduct(&c.v.signature).unwrap();
    let p = (0..4).map(|x| x / 2).collect::<Vec<_>>();
    let s = [0, if diagonal { encode(&[1, 1], 2) } else { encode(&[1, 0], 2) }];
    let point = make_split_point(&c, &b, &a, map(4, 2, &p), map(2, 4, &s)).unwrap();
    (c, point)
}

/// `UT₂(F₂) ⇄ F₂` in Assoc with `p` reading the upper-left entry.
pub fn ut2_point() -> (ContextSpec, SplitPoint) {
    let c = ctx("alg:assoc");
    let b = instances::prime_field(2).reduct(&c.u.signature).unwrap();
    let a = instances::ut2_f2();
    let p = (0..8).map(|x| x / 4).collect::<Vec<_>>();
    let point = make_split_point(&c, &b, &a, map(8, 2, &p), map(2, 8, &[0, 4])).unwrap();
    (c, point)
}

/// `Ł₃ x Ł₃ ⇄ Ł₃` in the MV context with `p = π₁`; `diagonal` picks
/// `a ↦ (a, a)` over `a ↦ (a, 1)`.
pub fn mv_square_point(diagonal: bool) -> (ContextSpec, SplitPoint) {
    let c = ctx("mv");
    let b = instances::lukasiewicz_hoop(3);
    let h = instances::as_whoop(&b);
    let a = h.product(&h).unwrap();
    let p = (0..9).map(|x| x / 3).collect::<Vec<_>>();
    let s = (0..3).map(|x| 3 * x + if diagonal { x } else { 2 }).collect::<Vec<_>>();
    let point = make_split_point(&c, &b, &a, map(9, 3, &p), map(3, 9, &s)).unwrap();
    (c, point)
}

/// `{a, *}` over `{*}`: `p` includes the point, `s` collapses everything.
pub fn pset_two_point() -> (ContextSpec, SplitPoint) {
    let c = ctx("pset");
    let b = instances::maybe_set(0);
    let a = instances::pointed_set(2);
    let point = make_split_point(&c, &b, &a, map(1, 2, &[0]), map(2, 1, &[0, 0])).unwrap();
    (c, point)
}

/// Every algebra in `pool` paired with every other, including itself.
pub fn pairs<T>(pool: &[T]) -> impl Iterator<Item = (&T, &T)> {
    pool.iter().flat_map(move |x| pool.iter().map(move |y| (x, y)))
}

pub fn hoop_chain(n: usize) -> FiniteAlgebra {
    instances::as_whoop(&instances::lukasiewicz_hoop(n))
}
