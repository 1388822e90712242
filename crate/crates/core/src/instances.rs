//! Named small algebras used throughout: Łukasiewicz chains, Boolean product
//! algebras, prime fields and their squares, null algebras, upper triangular
//! matrices over F_2, and pointed sets.

use std::sync::Arc;

use crate::algebra::{Elem, FiniteAlgebra, Signature};
use crate::linear::{decode, encode, Structure};
use crate::varieties::{algebra_signature, builtin};

fn sig_of(name: &str) -> Arc<Signature> {
    builtin(name).expect("built-in variety").signature
}

/// The `n`-element Łukasiewicz chain as an MV-algebra; element `i` is `i/(n-1)`.
pub fn lukasiewicz(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let top = n - 1;
    FiniteAlgebra::from_fn(
        sig_of("mv"),
        n,
        |op, a| if op == 0 { (a[0] + a[1]).min(top) } else { top - a[0] },
        vec![0],
    )
    .expect("chain tables")
}

/// The two-element Boolean MV-algebra.
pub fn l2() -> FiniteAlgebra {
    lukasiewicz(2)
}

/// The `n`-element Łukasiewicz chain as a bounded Wajsberg hoop.
pub fn lukasiewicz_hoop(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let top = n - 1;
    let sig = sig_of("bwhoop");
    let consts = sig
        .constants()
        .iter()
        .map(|c| if c == "one" { top } else { 0 })
        .collect();
    FiniteAlgebra::from_fn(
        sig.clone(),
        n,
        |op, a| match sig.ops()[op].name.as_str() {
            "mul" => (a[0] + a[1]).saturating_sub(top),
            _ => (top - a[0] + a[1]).min(top),
        },
        consts,
    )
    .expect("chain tables")
}

/// Reduct of a hoop-like algebra to the Wajsberg hoop signature.
pub fn as_whoop(h: &FiniteAlgebra) -> FiniteAlgebra {
    h.reduct(&sig_of("whoop")).expect("hoop operations present")
}

/// The Boolean algebra with `2^k` elements as a product algebra; elements are bitmasks.
pub fn boolean_product_algebra(k: usize) -> FiniteAlgebra {
    let mask = (1usize << k) - 1;
    let sig = sig_of("pralg");
    let consts = sig
        .constants()
        .iter()
        .map(|c| if c == "one" { mask } else { 0 })
        .collect();
    FiniteAlgebra::from_fn(
        sig.clone(),
        1 << k,
        |op, a| match sig.ops()[op].name.as_str() {
            "join" => a[0] | a[1],
            "imp" => (!a[0] | a[1]) & mask,
            _ => a[0] & a[1],
        },
        consts,
    )
    .expect("boolean tables")
}

/// The product hoop reduct of [`boolean_product_algebra`].
pub fn boolean_product_hoop(k: usize) -> FiniteAlgebra {
    boolean_product_algebra(k)
        .reduct(&sig_of("phoop"))
        .expect("phoop reduct")
}

/// `F_p` as a one-dimensional unital algebra.
pub fn prime_field(p: usize) -> FiniteAlgebra {
    let mut s = Structure::null(p, 1);
    s.consts[0] = 1;
    with_unit(&s.to_algebra().expect("field tables"), p, 1)
}

/// `F_p x F_p` with componentwise operations and unit `(1, 1)`.
pub fn prime_field_square(p: usize) -> FiniteAlgebra {
    let mut s = Structure::null(p, 2);
    // e0 e0 = e0, e1 e1 = e1
    s.consts[0] = 1;
    s.consts[(3 * 2) + 1] = 1;
    with_unit(&s.to_algebra().expect("tables"), p, encode(&[1, 1], p))
}

/// The `d`-dimensional algebra over `F_p` with zero product.
pub fn null_algebra(p: usize, d: usize) -> FiniteAlgebra {
    Structure::null(p, d).to_algebra().expect("null tables")
}

/// Adds the constant `one` to an algebra in the `F_p` signature.
pub fn with_unit(a: &FiniteAlgebra, p: usize, one: Elem) -> FiniteAlgebra {
    let sig = Arc::new(algebra_signature(p, true).expect("signature"));
    a.expand(&sig, &[("one", one)]).expect("expansion")
}

/// Upper triangular 2x2 matrices over `F_2`: `[[a, b], [0, c]]` is `4a + 2b + c`.
pub fn ut2_f2() -> FiniteAlgebra {
    let sig = Arc::new(algebra_signature(2, false).expect("signature"));
    FiniteAlgebra::from_fn(
        sig.clone(),
        8,
        |op, args| {
            let u = decode(args[0], 2, 3);
            let r = match sig.ops()[op].name.as_str() {
                "add" => {
                    let v = decode(args[1], 2, 3);
                    vec![(u[0] + v[0]) % 2, (u[1] + v[1]) % 2, (u[2] + v[2]) % 2]
                }
                "mul" => {
                    let v = decode(args[1], 2, 3);
                    vec![u[0] * v[0], (u[0] * v[1] + u[1] * v[2]) % 2, u[2] * v[2]]
                }
                "neg" | "scale1" => u,
                _ => vec![0, 0, 0],
            };
            encode(&r, 2)
        },
        vec![0],
    )
    .expect("matrix tables")
}

/// The pointed set with `n` elements and base point 0.
pub fn pointed_set(n: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(sig_of("pset"), n, Vec::new(), vec![0]).expect("pointed set")
}

/// `(1 + B, 1)` for a set `B` of `m` elements: elements of `B` first, the
/// adjoined point last.
pub fn maybe_set(m: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(sig_of("pset"), m + 1, Vec::new(), vec![m]).expect("pointed set")
}
