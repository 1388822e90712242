//! Canonical forms of finite algebras up to isomorphism.
//!
//! For every generating tuple of least length, the carrier is renumbered in
//! discovery order: constants, then the generators, then elements as the
//! closure reaches them. The least resulting table string is the canonical
//! form. Discovery order depends only on the structure, so isomorphic
//! algebras produce the same candidate set.

use crate::algebra::{Elem, FiniteAlgebra};
use crate::morphism::close_list;

/// The canonical copy of `alg` and a relabelling `perm` (old -> new) with
/// `alg.relabel(&perm) == canonical`.
pub fn canonical_form(alg: &FiniteAlgebra) -> (FiniteAlgebra, Vec<Elem>) {
    let n = alg.size();
    let mut best: Option<(Vec<Elem>, FiniteAlgebra, Vec<Elem>)> = None;
    for k in 0..=n {
        let mut tuple = vec![0; k];
        loop {
            if let Some(order) = discovery_order(alg, &tuple) {
                let mut perm = vec![0; n];
                for (new, &old) in order.iter().enumerate() {
                    perm[old] = new;
                }
                let relabeled = alg.relabel(&perm);
                let key = relabeled.table_string();
                if best.as_ref().is_none_or(|(k0, _, _)| key < *k0) {
                    best = Some((key, relabeled, perm));
                }
            }
            if !advance(&mut tuple, n) {
                break;
            }
        }
        if let Some((_, canon, perm)) = best {
            return (canon, perm);
        }
    }
    unreachable!("the full carrier generates")
}

/// The canonical table string, usable as an isomorphism-class key.
pub fn canonical_key(alg: &FiniteAlgebra) -> Vec<Elem> {
    canonical_form(alg).0.table_string()
}

fn advance(tuple: &mut [usize], n: usize) -> bool {
    let mut j = tuple.len();
    loop {
        if j == 0 {
            return false;
        }
        j -= 1;
        tuple[j] += 1;
        if tuple[j] < n {
            return true;
        }
        tuple[j] = 0;
    }
}

/// Discovery order from constants and `gens`, or `None` if they do not generate.
fn discovery_order(alg: &FiniteAlgebra, gens: &[Elem]) -> Option<Vec<Elem>> {
    let mut seen = vec![false; alg.size()];
    let mut list = Vec::with_capacity(alg.size());
    for &c in alg.constants().iter().chain(gens) {
        if !std::mem::replace(&mut seen[c], true) {
            list.push(c);
        }
    }
    close_list(alg, &mut list, &mut seen, 0);
    (list.len() == alg.size()).then_some(list)
}
