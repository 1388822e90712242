//! Finite algebras given by explicit operation tables.
//!
//! Elements of an algebra of size `n` are the integers `0..n`. A `k`-ary
//! operation is stored row-major: the tuple `(a0, .., a(k-1))` lives at index
//! `a0 * n^(k-1) + .. + a(k-1)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of a finite carrier.
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

/// Operation symbols with arities plus constant symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    ops: Vec<OpSymbol>,
    constants: Vec<String>,
}

impl Signature {
    pub fn new<S: Into<String>>(
        ops: impl IntoIterator<Item = (S, usize)>,
        constants: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let ops: Vec<OpSymbol> = ops
            .into_iter()
            .map(|(name, arity)| OpSymbol {
                name: name.into(),
                arity,
            })
            .collect();
        let constants: Vec<String> = constants.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for name in ops.iter().map(|o| &o.name).chain(constants.iter()) {
            if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == '(' || c == ')' || c == '=') {
                return Err(Error::InvalidSignature(format!("bad symbol name `{name}`")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidSignature(format!("duplicate symbol `{name}`")));
            }
        }
        if let Some(op) = ops.iter().find(|o| o.arity == 0) {
            return Err(Error::InvalidSignature(format!(
                "operation `{}` has arity 0; list it as a constant",
                op.name
            )));
        }
        Ok(Signature { ops, constants })
    }

    pub fn ops(&self) -> &[OpSymbol] {
        &self.ops
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    pub fn arity(&self, op: usize) -> usize {
        self.ops[op].arity
    }

    /// The same operations with additional constants appended.
    pub fn with_constants<S: AsRef<str>>(&self, extra: &[S]) -> Result<Self> {
        let ops = self.ops.iter().map(|o| (o.name.clone(), o.arity));
        let consts = self
            .constants
            .iter()
            .cloned()
            .chain(extra.iter().map(|s| s.as_ref().to_string()));
        Signature::new(ops, consts)
    }

    /// True when every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.ops
            .iter()
            .all(|o| other.op_index(&o.name).map(|i| other.arity(i)) == Some(o.arity))
            && self.constants.iter().all(|c| other.constant_index(c).is_some())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ops: Vec<String> = self
            .ops
            .iter()
            .map(|o| format!("{}/{}", o.name, o.arity))
            .collect();
        write!(f, "({}; {})", ops.join(", "), self.constants.join(", "))
    }
}

/// A finite algebra: carrier `0..size`, total operation tables, constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAlgebra {
    signature: Arc<Signature>,
    size: usize,
    tables: Vec<Vec<Elem>>,
    constants: Vec<Elem>,
}

pub(crate) fn table_len(size: usize, arity: usize) -> usize {
    size.pow(arity as u32)
}

impl FiniteAlgebra {
    pub fn new(
        signature: Arc<Signature>,
        size: usize,
        tables: Vec<Vec<Elem>>,
        constants: Vec<Elem>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidAlgebra("carrier must be non-empty".into()));
        }
        if tables.len() != signature.ops().len() {
            return Err(Error::InvalidAlgebra(format!(
                "expected {} tables, got {}",
                signature.ops().len(),
                tables.len()
            )));
        }
        for (op, table) in signature.ops().iter().zip(&tables) {
            let want = table_len(size, op.arity);
            if table.len() != want {
                return Err(Error::InvalidAlgebra(format!(
                    "table of `{}` has {} entries, expected {}",
                    op.name,
                    table.len(),
                    want
                )));
            }
            if let Some(pos) = table.iter().position(|&v| v >= size) {
                return Err(Error::InvalidAlgebra(format!(
                    "table of `{}` entry {} is {} (carrier size {})",
                    op.name, pos, table[pos], size
                )));
            }
        }
        if constants.len() != signature.constants().len() {
            return Err(Error::InvalidAlgebra(format!(
                "expected {} constants, got {}",
                signature.constants().len(),
                constants.len()
            )));
        }
        for (name, &v) in signature.constants().iter().zip(&constants) {
            if v >= size {
                return Err(Error::InvalidAlgebra(format!(
                    "constant `{name}` = {v} is outside the carrier of size {size}"
                )));
            }
        }
        Ok(FiniteAlgebra {
            signature,
            size,
            tables,
            constants,
        })
    }

    /// Builds an algebra by evaluating a closure on every argument tuple.
    pub fn from_fn(
        signature: Arc<Signature>,
        size: usize,
        mut op: impl FnMut(usize, &[Elem]) -> Elem,
        constants: Vec<Elem>,
    ) -> Result<Self> {
        let mut tables = Vec::with_capacity(signature.ops().len());
        let mut args = Vec::new();
        for (i, sym) in signature.ops().iter().enumerate() {
            let len = table_len(size, sym.arity);
            let mut table = Vec::with_capacity(len);
            for idx in 0..len {
                decode_tuple(idx, size, sym.arity, &mut args);
                table.push(op(i, &args));
            }
            tables.push(table);
        }
        FiniteAlgebra::new(signature, size, tables, constants)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tables(&self) -> &[Vec<Elem>] {
        &self.tables
    }

    pub fn table(&self, op: usize) -> &[Elem] {
        &self.tables[op]
    }

    pub fn constants(&self) -> &[Elem] {
        &self.constants
    }

    pub fn constant(&self, idx: usize) -> Elem {
        self.constants[idx]
    }

    pub fn constant_named(&self, name: &str) -> Option<Elem> {
        self.signature.constant_index(name).map(|i| self.constants[i])
    }

    pub fn op_named(&self, name: &str) -> Option<usize> {
        self.signature.op_index(name)
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let mut idx = 0;
        for &a in args {
            idx = idx * self.size + a;
        }
        self.tables[op][idx]
    }

    #[inline]
    pub fn apply1(&self, op: usize, a: Elem) -> Elem {
        self.tables[op][a]
    }

    #[inline]
    pub fn apply2(&self, op: usize, a: Elem, b: Elem) -> Elem {
        self.tables[op][a * self.size + b]
    }

    /// Applies the operation called `name`; panics if it is absent.
    pub fn call(&self, name: &str, args: &[Elem]) -> Elem {
        let op = self
            .op_named(name)
            .unwrap_or_else(|| panic!("no operation `{name}` in {}", self.signature));
        self.apply(op, args)
    }

    /// Restriction to the symbols of `sig`, which must all be present here.
    pub fn reduct(&self, sig: &Arc<Signature>) -> Result<FiniteAlgebra> {
        let mut tables = Vec::with_capacity(sig.ops().len());
        for o in sig.ops() {
            let i = self
                .signature
                .op_index(&o.name)
                .ok_or_else(|| Error::SignatureMismatch(format!("missing operation `{}`", o.name)))?;
            if self.signature.arity(i) != o.arity {
                return Err(Error::SignatureMismatch(format!("arity of `{}` differs", o.name)));
            }
            tables.push(self.tables[i].clone());
        }
        let mut constants = Vec::with_capacity(sig.constants().len());
        for c in sig.constants() {
            constants.push(
                self.constant_named(c)
                    .ok_or_else(|| Error::SignatureMismatch(format!("missing constant `{c}`")))?,
            );
        }
        FiniteAlgebra::new(sig.clone(), self.size, tables, constants)
    }

    /// Expansion to `sig` (which extends this signature by constants only).
    pub fn expand(&self, sig: &Arc<Signature>, extra: &[(&str, Elem)]) -> Result<FiniteAlgebra> {
        let mut tables = Vec::with_capacity(sig.ops().len());
        for o in sig.ops() {
            let i = self
                .signature
                .op_index(&o.name)
                .ok_or_else(|| Error::SignatureMismatch(format!("operation `{}` is not in the source", o.name)))?;
            tables.push(self.tables[i].clone());
        }
        let mut constants = Vec::with_capacity(sig.constants().len());
        for c in sig.constants() {
            let v = match self.constant_named(c) {
                Some(v) => v,
                None => extra
                    .iter()
                    .find(|(n, _)| n == c)
                    .map(|&(_, v)| v)
                    .ok_or_else(|| Error::SignatureMismatch(format!("no value for constant `{c}`")))?,
            };
            constants.push(v);
        }
        FiniteAlgebra::new(sig.clone(), self.size, tables, constants)
    }

    /// Transports the structure along the bijection `perm` (old element -> new element).
    pub fn relabel(&self, perm: &[Elem]) -> FiniteAlgebra {
        debug_assert_eq!(perm.len(), self.size);
        let n = self.size;
        let mut inv = vec![0; n];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let mut args = Vec::new();
        let mut old_args = Vec::new();
        let tables = self
            .signature
            .ops()
            .iter()
            .enumerate()
            .map(|(op, sym)| {
                (0..table_len(n, sym.arity))
                    .map(|idx| {
                        decode_tuple(idx, n, sym.arity, &mut args);
                        old_args.clear();
                        old_args.extend(args.iter().map(|&a| inv[a]));
                        perm[self.apply(op, &old_args)]
                    })
                    .collect()
            })
            .collect();
        let constants = self.constants.iter().map(|&c| perm[c]).collect();
        FiniteAlgebra {
            signature: self.signature.clone(),
            size: n,
            tables,
            constants,
        }
    }

    /// The induced subalgebra on `elements` (sorted, closed) and its inclusion map.
    pub fn subalgebra(&self, elements: &BTreeSet<Elem>) -> Result<(FiniteAlgebra, FunctionMap)> {
        let members: Vec<Elem> = elements.iter().copied().collect();
        let mut index = vec![usize::MAX; self.size];
        for (i, &e) in members.iter().enumerate() {
            index[e] = i;
        }
        let mut args = Vec::new();
        let mut tables = Vec::new();
        for (op, sym) in self.signature.ops().iter().enumerate() {
            let m = members.len();
            let mut table = Vec::with_capacity(table_len(m, sym.arity));
            for idx in 0..table_len(m, sym.arity) {
                decode_tuple(idx, m, sym.arity, &mut args);
                let outer: Vec<Elem> = args.iter().map(|&a| members[a]).collect();
                let v = self.apply(op, &outer);
                if index[v] == usize::MAX {
                    return Err(Error::InvalidAlgebra(format!(
                        "subset is not closed under `{}`: {:?} -> {}",
                        sym.name, outer, v
                    )));
                }
                table.push(index[v]);
            }
            tables.push(table);
        }
        let mut constants = Vec::new();
        for (name, &c) in self.signature.constants().iter().zip(&self.constants) {
            if index[c] == usize::MAX {
                return Err(Error::InvalidAlgebra(format!(
                    "subset does not contain constant `{name}`"
                )));
            }
            constants.push(index[c]);
        }
        let sub = FiniteAlgebra::new(self.signature.clone(), members.len(), tables, constants)?;
        let inclusion = FunctionMap::new(members.len(), self.size, members)?;
        Ok((sub, inclusion))
    }

    /// Direct product; element `(a, b)` is encoded as `a * other.size + b`.
    pub fn product(&self, other: &FiniteAlgebra) -> Result<FiniteAlgebra> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch("product factors differ in signature".into()));
        }
        let m = other.size;
        let mut left = Vec::new();
        let mut right = Vec::new();
        FiniteAlgebra::from_fn(
            self.signature.clone(),
            self.size * m,
            |op, args| {
                left.clear();
                right.clear();
                left.extend(args.iter().map(|&x| x / m));
                right.extend(args.iter().map(|&x| x % m));
                self.apply(op, &left) * m + other.apply(op, &right)
            },
            self.constants
                .iter()
                .zip(&other.constants)
                .map(|(&a, &b)| a * m + b)
                .collect(),
        )
    }

    /// Concatenated tables and constants, used for canonical comparisons.
    pub fn table_string(&self) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.constants.len() + self.tables.iter().map(Vec::len).sum::<usize>());
        out.extend_from_slice(&self.constants);
        for t in &self.tables {
            out.extend_from_slice(t);
        }
        out
    }
}

/// Decodes a row-major table index into an argument tuple.
pub(crate) fn decode_tuple(mut idx: usize, size: usize, arity: usize, out: &mut Vec<Elem>) {
    out.clear();
    out.resize(arity, 0);
    for slot in out.iter_mut().rev() {
        *slot = idx % size;
        idx /= size;
    }
}

/// A total function between two finite carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunctionMap {
    domain: usize,
    codomain: usize,
    table: Vec<Elem>,
}

impl FunctionMap {
    pub fn new(domain: usize, codomain: usize, table: Vec<Elem>) -> Result<Self> {
        if table.len() != domain {
            return Err(Error::InvalidMap(format!(
                "table has {} entries for a domain of size {}",
                table.len(),
                domain
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v >= codomain) {
            return Err(Error::InvalidMap(format!(
                "value {v} outside codomain of size {codomain}"
            )));
        }
        Ok(FunctionMap {
            domain,
            codomain,
            table,
        })
    }

    pub fn identity(size: usize) -> Self {
        FunctionMap {
            domain: size,
            codomain: size,
            table: (0..size).collect(),
        }
    }

    pub fn constant(domain: usize, codomain: usize, value: Elem) -> Self {
        FunctionMap {
            domain,
            codomain,
            table: vec![value; domain],
        }
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    #[inline]
    pub fn get(&self, x: Elem) -> Elem {
        self.table[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FunctionMap) -> Result<FunctionMap> {
        if self.codomain != other.domain {
            return Err(Error::InvalidMap(format!(
                "cannot compose: codomain {} vs domain {}",
                self.codomain, other.domain
            )));
        }
        Ok(FunctionMap {
            domain: self.domain,
            codomain: other.codomain,
            table: self.table.iter().map(|&x| other.table[x]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain];
        self.table.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.codomain
    }

    pub fn is_bijective(&self) -> bool {
        self.domain == self.codomain && self.is_injective()
    }

    pub fn image(&self) -> BTreeSet<Elem> {
        self.table.iter().copied().collect()
    }

    pub fn preimage(&self, value: Elem) -> BTreeSet<Elem> {
        (0..self.domain).filter(|&x| self.table[x] == value).collect()
    }

    pub fn inverse(&self) -> Option<FunctionMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut table = vec![0; self.domain];
        for (x, &y) in self.table.iter().enumerate() {
            table[y] = x;
        }
        Some(FunctionMap {
            domain: self.domain,
            codomain: self.codomain,
            table,
        })
    }
}

impl fmt::Display for FunctionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.table)
    }
}
