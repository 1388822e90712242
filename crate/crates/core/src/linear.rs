//! Finite-dimensional algebras over a prime field, handled through structure
//! constants and turned into operation tables on `F_p^d`.
//!
//! A vector `(v0, .., v(d-1))` is the element `v0 * p^(d-1) + .. + v(d-1)`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::canonical::canonical_form;
use crate::error::{Error, Result};
use crate::varieties::{algebra_signature, variety_membership, VarietySpec};

/// Largest number of raw structure-constant tensors scanned in one call.
pub const MAX_STRUCTURES: usize = 1 << 22;

/// Structure constants `c[(i*d + j)*d + k]`: `e_i e_j = sum_k c_ijk e_k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Structure {
    pub prime: usize,
    pub dim: usize,
    pub consts: Vec<u8>,
}

impl Structure {
    pub fn null(prime: usize, dim: usize) -> Structure {
        Structure {
            prime,
            dim,
            consts: vec![0; dim * dim * dim],
        }
    }

    fn product(&self, u: &[usize], v: &[usize], out: &mut [usize]) {
        let (p, d) = (self.prime, self.dim);
        out.iter_mut().for_each(|x| *x = 0);
        for i in 0..d {
            if u[i] == 0 {
                continue;
            }
            for j in 0..d {
                let s = u[i] * v[j] % p;
                if s == 0 {
                    continue;
                }
                for k in 0..d {
                    out[k] = (out[k] + s * self.consts[(i * d + j) * d + k] as usize) % p;
                }
            }
        }
    }

    fn is_commutative(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| (0..d).all(|j| (0..d).all(|k| self.consts[(i * d + j) * d + k] == self.consts[(j * d + i) * d + k])))
    }

    /// Associativity on basis triples, which suffices by bilinearity.
    pub fn is_associative(&self) -> bool {
        let d = self.dim;
        let mut ab = vec![0; d];
        let mut bc = vec![0; d];
        let mut l = vec![0; d];
        let mut r = vec![0; d];
        let e = |i: usize| -> Vec<usize> { (0..d).map(|k| usize::from(k == i)).collect() };
        for a in 0..d {
            for b in 0..d {
                self.product(&e(a), &e(b), &mut ab);
                for c in 0..d {
                    self.product(&e(b), &e(c), &mut bc);
                    self.product(&ab, &e(c), &mut l);
                    self.product(&e(a), &bc, &mut r);
                    if l != r {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Structure constants after the change of basis `m` (columns are the new basis).
    fn transform(&self, m: &[usize], minv: &[usize]) -> Structure {
        let (p, d) = (self.prime, self.dim);
        let col = |j: usize| -> Vec<usize> { (0..d).map(|i| m[i * d + j]).collect() };
        let mut consts = vec![0u8; d * d * d];
        let mut w = vec![0; d];
        for i in 0..d {
            for j in 0..d {
                self.product(&col(i), &col(j), &mut w);
                for k in 0..d {
                    let mut s = 0;
                    for t in 0..d {
                        s += minv[k * d + t] * w[t];
                    }
                    consts[(i * d + j) * d + k] = (s % p) as u8;
                }
            }
        }
        Structure {
            prime: p,
            dim: d,
            consts,
        }
    }

    pub fn to_algebra(&self) -> Result<FiniteAlgebra> {
        let (p, d) = (self.prime, self.dim);
        let sig = std::sync::Arc::new(algebra_signature(p, false)?);
        let n = p.pow(d as u32);
        let mut w = vec![0; d];
        FiniteAlgebra::from_fn(
            sig.clone(),
            n,
            |op, args| {
                let name = sig.ops()[op].name.as_str();
                let u = decode(args[0], p, d);
                let r: Vec<usize> = match name {
                    "add" => {
                        let v = decode(args[1], p, d);
                        (0..d).map(|k| (u[k] + v[k]) % p).collect()
                    }
                    "mul" => {
                        let v = decode(args[1], p, d);
                        self.product(&u, &v, &mut w);
                        w.clone()
                    }
                    "neg" => u.iter().map(|&x| (p - x) % p).collect(),
                    s => {
                        let a: usize = s.trim_start_matches("scale").parse().expect("scale op");
                        u.iter().map(|&x| a * x % p).collect()
                    }
                };
                encode(&r, p)
            },
            vec![0],
        )
    }
}

pub fn decode(x: Elem, p: usize, d: usize) -> Vec<usize> {
    let mut v = vec![0; d];
    let mut x = x;
    for slot in v.iter_mut().rev() {
        *slot = x % p;
        x /= p;
    }
    v
}

pub fn encode(v: &[usize], p: usize) -> Elem {
    v.iter().fold(0, |acc, &x| acc * p + x)
}

fn general_linear(p: usize, d: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let total = p.pow((d * d) as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let m = decode(code, p, d * d);
        if let Some(inv) = invert(&m, p, d) {
            out.push((m, inv));
        }
    }
    out
}

fn invert(m: &[usize], p: usize, d: usize) -> Option<Vec<usize>> {
    let mut a: Vec<Vec<usize>> = (0..d)
        .map(|i| {
            let mut row: Vec<usize> = m[i * d..(i + 1) * d].to_vec();
            row.extend((0..d).map(|j| usize::from(i == j)));
            row
        })
        .collect();
    for c in 0..d {
        let piv = (c..d).find(|&r| a[r][c] != 0)?;
        a.swap(c, piv);
        let inv = (1..p).find(|&x| x * a[c][c] % p == 1)?;
        for x in a[c].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..d {
            if r != c && a[r][c] != 0 {
                let f = a[r][c];
                let row_c = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(row_c) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
    }
    Some(a.into_iter().flat_map(|row| row[d..].to_vec()).collect())
}

/// The element `u` with `u*x = x*u = x` for all `x`, if any.
pub fn two_sided_unit(alg: &FiniteAlgebra) -> Option<Elem> {
    let mul = alg.op_named("mul")?;
    (0..alg.size()).find(|&u| (0..alg.size()).all(|x| alg.apply2(mul, u, x) == x && alg.apply2(mul, x, u) == x))
}

fn has_identity(v: &VarietySpec, text: &str) -> bool {
    v.identities.iter().any(|id| id.to_string() == text)
}

/// All algebras of `v` with `size` elements up to isomorphism, in canonical
/// form and sorted by canonical table string. Empty unless `size` is a power of `prime`.
pub fn algebras_of_size(v: &VarietySpec, prime: usize, size: usize, parallel: bool) -> Result<Vec<FiniteAlgebra>> {
    let mut d = 0;
    let mut n = 1;
    while n < size {
        n *= prime;
        d += 1;
    }
    if n != size {
        return Ok(Vec::new());
    }
    let commutative = has_identity(v, "(mul x y) = (mul y x)");
    let associative = has_identity(v, "(mul x (mul y z)) = (mul (mul x y) z)");
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|&(i, j)| !commutative || i <= j)
        .collect();
    let free = pairs.len() * d;
    let count = prime
        .checked_pow(free as u32)
        .filter(|&c| c <= MAX_STRUCTURES)
        .ok_or_else(|| Error::BoundExceeded {
            what: format!("structure-constant tensors for `{}` of size {size}", v.name),
            requested: prime.checked_pow(free as u32).unwrap_or(usize::MAX),
            ceiling: MAX_STRUCTURES,
        })?;
    let gl = general_linear(prime, d);
    let build = |code: usize| -> Option<Structure> {
        let digits = decode(code, prime, free);
        let mut consts = vec![0u8; d * d * d];
        for (t, &(i, j)) in pairs.iter().enumerate() {
            for k in 0..d {
                let c = digits[t * d + k] as u8;
                consts[(i * d + j) * d + k] = c;
                if commutative {
                    consts[(j * d + i) * d + k] = c;
                }
            }
        }
        let s = Structure { prime, dim: d, consts };
        if associative && !s.is_associative() {
            return None;
        }
        // keep only the least tensor of each basis-change orbit
        if gl.iter().any(|(m, minv)| s.transform(m, minv).consts < s.consts) {
            return None;
        }
        Some(s)
    };
    let reps: BTreeSet<Structure> = if parallel {
        (0..count).into_par_iter().filter_map(build).collect()
    } else {
        (0..count).filter_map(build).collect()
    };
    let unital = v.signature.constant_index("one").is_some();
    let convert = |s: &Structure| -> Result<Option<(Vec<Elem>, FiniteAlgebra)>> {
        let mut alg = s.to_algebra()?;
        if unital {
            match two_sided_unit(&alg) {
                Some(u) => alg = alg.expand(&v.signature, &[("one", u)])?,
                None => return Ok(None),
            }
        }
        if !variety_membership(&alg, v)?.member {
            return Ok(None);
        }
        debug_assert!(!commutative || s.is_commutative());
        let (canon, _) = canonical_form(&alg);
        Ok(Some((canon.table_string(), canon)))
    };
    let mut out = BTreeMap::new();
    for s in &reps {
        if let Some((k, a)) = convert(s)? {
            out.insert(k, a);
        }
    }
    Ok(out.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varieties::builtin;

    #[test]
    fn gl2_over_f2_has_six_elements() {
        assert_eq!(general_linear(2, 2).len(), 6);
        assert_eq!(general_linear(3, 2).len(), 48);
    }

    #[test]
    fn one_dimensional_commutative_algebras_over_f2() {
        // e*e = 0 or e*e = e
        let v = builtin("alg:cassoc").unwrap();
        assert_eq!(algebras_of_size(&v, 2, 2, false).unwrap().len(), 2);
        assert!(algebras_of_size(&v, 2, 3, false).unwrap().is_empty());
    }
}
