//! Homomorphism checks, subuniverse generation, forced extension of partial
//! maps, and backtracking search for homomorphisms and isomorphisms.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{decode_tuple, Elem, FiniteAlgebra, FunctionMap};
use crate::error::{Error, Result};

/// Which constants a homomorphism is required to preserve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantFlags {
    All,
    None,
    Named(Vec<String>),
}

impl ConstantFlags {
    fn resolve(&self, source: &FiniteAlgebra, target: &FiniteAlgebra) -> Result<Vec<(String, Elem, Elem)>> {
        let names: Vec<String> = match self {
            ConstantFlags::All => source.signature().constants().to_vec(),
            ConstantFlags::None => Vec::new(),
            ConstantFlags::Named(v) => v.clone(),
        };
        names
            .into_iter()
            .map(|c| {
                let a = source
                    .constant_named(&c)
                    .ok_or_else(|| Error::SignatureMismatch(format!("source lacks constant `{c}`")))?;
                let b = target
                    .constant_named(&c)
                    .ok_or_else(|| Error::SignatureMismatch(format!("target lacks constant `{c}`")))?;
                Ok((c, a, b))
            })
            .collect()
    }
}

fn op_mapping(source: &FiniteAlgebra, target: &FiniteAlgebra) -> Result<Vec<usize>> {
    source
        .signature()
        .ops()
        .iter()
        .map(|o| {
            let j = target
                .op_named(&o.name)
                .ok_or_else(|| Error::SignatureMismatch(format!("target lacks operation `{}`", o.name)))?;
            if target.signature().arity(j) != o.arity {
                return Err(Error::SignatureMismatch(format!("arity of `{}` differs", o.name)));
            }
            Ok(j)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HomFailure {
    Operation {
        op: String,
        args: Vec<Elem>,
        /// f(op(args))
        image_of_value: Elem,
        /// op(f(args))
        value_of_images: Elem,
    },
    Constant {
        name: String,
        image: Elem,
        expected: Elem,
    },
}

impl fmt::Display for HomFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomFailure::Operation {
                op,
                args,
                image_of_value,
                value_of_images,
            } => write!(
                f,
                "f({op}{args:?}) = {image_of_value} but {op}(f{args:?}) = {value_of_images}"
            ),
            HomFailure::Constant { name, image, expected } => {
                write!(f, "f({name}) = {image} but {name} = {expected} in the target")
            }
        }
    }
}

/// Checks `f: source -> target` against every operation of `source` and the
/// flagged constants. The witness is the first failure: constants in order,
/// then operations in signature order with argument tuples in lexicographic order.
pub fn is_homomorphism(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    f: &FunctionMap,
    constants: &ConstantFlags,
) -> Result<Option<HomFailure>> {
    if f.domain() != source.size() || f.codomain() != target.size() {
        return Err(Error::InvalidMap(format!(
            "map {}->{} does not fit algebras of sizes {} and {}",
            f.domain(),
            f.codomain(),
            source.size(),
            target.size()
        )));
    }
    let ops = op_mapping(source, target)?;
    for (name, a, b) in constants.resolve(source, target)? {
        if f.get(a) != b {
            return Ok(Some(HomFailure::Constant {
                name,
                image: f.get(a),
                expected: b,
            }));
        }
    }
    let n = source.size();
    let mut args = Vec::new();
    let mut imgs = Vec::new();
    for (i, sym) in source.signature().ops().iter().enumerate() {
        let table = source.table(i);
        for (idx, &v) in table.iter().enumerate() {
            decode_tuple(idx, n, sym.arity, &mut args);
            imgs.clear();
            imgs.extend(args.iter().map(|&a| f.get(a)));
            let w = target.apply(ops[i], &imgs);
            if f.get(v) != w {
                return Ok(Some(HomFailure::Operation {
                    op: sym.name.clone(),
                    args: args.clone(),
                    image_of_value: f.get(v),
                    value_of_images: w,
                }));
            }
        }
    }
    Ok(None)
}

/// Least subset containing `seeds` and all constants, closed under all operations.
pub fn generated_subuniverse(alg: &FiniteAlgebra, seeds: &BTreeSet<Elem>) -> BTreeSet<Elem> {
    let mut seen = vec![false; alg.size()];
    let mut list = Vec::new();
    for &c in alg.constants().iter().chain(seeds.iter()) {
        if !std::mem::replace(&mut seen[c], true) {
            list.push(c);
        }
    }
    close_list(alg, &mut list, &mut seen, 0);
    list.into_iter().collect()
}

/// Semi-naive closure of `list` under every operation; elements from index
/// `processed` on are treated as new. Discovery order is deterministic.
pub(crate) fn close_list(alg: &FiniteAlgebra, list: &mut Vec<Elem>, seen: &mut [bool], mut processed: usize) {
    let mut idx = Vec::new();
    while processed < list.len() {
        let cur = list.len();
        for op in 0..alg.signature().ops().len() {
            let k = alg.signature().arity(op);
            for_each_new_tuple(k, processed, cur, &mut idx, |t| {
                let mut code = 0;
                for &i in t {
                    code = code * alg.size() + list[i];
                }
                let v = alg.table(op)[code];
                if !seen[v] {
                    seen[v] = true;
                    list.push(v);
                }
            });
        }
        processed = cur;
    }
}

/// Calls `f` on every `k`-tuple of indices below `cur` in lexicographic order,
/// skipping tuples whose entries are all below `old`.
pub(crate) fn for_each_new_tuple(k: usize, old: usize, cur: usize, idx: &mut Vec<usize>, mut f: impl FnMut(&[usize])) {
    if cur == 0 || old >= cur {
        return;
    }
    idx.clear();
    idx.resize(k, 0);
    loop {
        if idx.iter().any(|&i| i >= old) {
            f(idx);
        }
        let mut j = k;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < cur {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// How an element's image was forced during extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Derivation {
    /// Supplied by the partial map.
    Seed,
    /// The named constant is preserved.
    Constant(String),
    /// The element equals `op(args)` for elements whose images were known.
    Operation { op: String, args: Vec<Elem> },
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Derivation::Seed => write!(f, "seed"),
            Derivation::Constant(c) => write!(f, "constant {c}"),
            Derivation::Operation { op, args } => write!(f, "{op}{args:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictWitness {
    pub element: Elem,
    pub first: Derivation,
    pub first_image: Elem,
    pub second: Derivation,
    pub second_image: Elem,
}

impl fmt::Display for ConflictWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "element {} is forced to {} by {} and to {} by {}",
            self.element, self.first_image, self.first, self.second_image, self.second
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extension {
    Extended(FunctionMap),
    Conflict(ConflictWitness),
}

impl Extension {
    pub fn map(&self) -> Option<&FunctionMap> {
        match self {
            Extension::Extended(f) => Some(f),
            Extension::Conflict(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Rule {
    Seed,
    Constant(usize),
    Operation(usize, usize),
}

/// Incremental forced extension of a partial map along the operations.
#[derive(Clone)]
pub(crate) struct Extender<'a> {
    src: &'a FiniteAlgebra,
    tgt: &'a FiniteAlgebra,
    ops: Vec<usize>,
    map: Vec<Option<Elem>>,
    rule: Vec<Rule>,
    known: Vec<Elem>,
    processed: usize,
    injective: bool,
    used: Vec<bool>,
}

pub(crate) enum Clash {
    Mismatch {
        element: Elem,
        old: Elem,
        new: Elem,
        rule: Rule,
    },
    NotInjective,
}

impl<'a> Extender<'a> {
    pub(crate) fn new(
        src: &'a FiniteAlgebra,
        tgt: &'a FiniteAlgebra,
        constants: &ConstantFlags,
        injective: bool,
    ) -> Result<std::result::Result<Self, Clash>> {
        let ops = op_mapping(src, tgt)?;
        let consts = constants.resolve(src, tgt)?;
        let mut e = Extender {
            src,
            tgt,
            ops,
            map: vec![None; src.size()],
            rule: vec![Rule::Seed; src.size()],
            known: Vec::new(),
            processed: 0,
            injective,
            used: vec![false; tgt.size()],
        };
        for (name, a, b) in consts {
            let ci = src.signature().constant_index(&name).unwrap_or(0);
            if let Err(c) = e.assign(a, b, Rule::Constant(ci)) {
                return Ok(Err(c));
            }
        }
        Ok(Ok(e))
    }

    pub(crate) fn image(&self, x: Elem) -> Option<Elem> {
        self.map[x]
    }

    fn assign(&mut self, x: Elem, y: Elem, rule: Rule) -> std::result::Result<(), Clash> {
        match self.map[x] {
            Some(old) if old == y => Ok(()),
            Some(old) => Err(Clash::Mismatch {
                element: x,
                old,
                new: y,
                rule,
            }),
            None => {
                if self.injective && std::mem::replace(&mut self.used[y], true) {
                    return Err(Clash::NotInjective);
                }
                self.map[x] = Some(y);
                self.rule[x] = rule;
                self.known.push(x);
                Ok(())
            }
        }
    }

    /// Assigns a seed and closes; on failure the extender is left unusable.
    pub(crate) fn seed(&mut self, x: Elem, y: Elem) -> std::result::Result<(), Clash> {
        self.assign(x, y, Rule::Seed)?;
        self.close()
    }

    pub(crate) fn close(&mut self) -> std::result::Result<(), Clash> {
        let n = self.src.size();
        let m = self.tgt.size();
        let mut idx = Vec::new();
        while self.processed < self.known.len() {
            let old = self.processed;
            let cur = self.known.len();
            for op in 0..self.ops.len() {
                let k = self.src.signature().arity(op);
                let mut res = Ok(());
                let known = &self.known;
                let map = &self.map;
                let mut pending: Vec<(Elem, Elem, usize)> = Vec::new();
                for_each_new_tuple(k, old, cur, &mut idx, |t| {
                    let mut sc = 0;
                    let mut tc = 0;
                    for &i in t {
                        let a = known[i];
                        sc = sc * n + a;
                        tc = tc * m + map[a].unwrap_or(0);
                    }
                    pending.push((self.src.table(op)[sc], self.tgt.table(self.ops[op])[tc], sc));
                });
                for (x, y, sc) in pending {
                    res = self.assign(x, y, Rule::Operation(op, sc));
                    if res.is_err() {
                        break;
                    }
                }
                res?;
            }
            self.processed = cur;
        }
        Ok(())
    }

    pub(crate) fn is_total(&self) -> bool {
        self.known.len() == self.src.size()
    }

    pub(crate) fn to_map(&self) -> FunctionMap {
        FunctionMap::new(
            self.src.size(),
            self.tgt.size(),
            self.map.iter().map(|v| v.expect("total map")).collect(),
        )
        .expect("images lie in the target")
    }

    fn derivation(&self, rule: Rule) -> Derivation {
        match rule {
            Rule::Seed => Derivation::Seed,
            Rule::Constant(c) => Derivation::Constant(self.src.signature().constants()[c].clone()),
            Rule::Operation(op, code) => {
                let mut args = Vec::new();
                decode_tuple(code, self.src.size(), self.src.signature().arity(op), &mut args);
                Derivation::Operation {
                    op: self.src.signature().ops()[op].name.clone(),
                    args,
                }
            }
        }
    }

    fn witness(&self, clash: &Clash) -> Option<ConflictWitness> {
        match *clash {
            Clash::Mismatch { element, old, new, rule } => Some(ConflictWitness {
                element,
                first: self.derivation(self.rule[element]),
                first_image: old,
                second: self.derivation(rule),
                second_image: new,
            }),
            Clash::NotInjective => None,
        }
    }
}

/// Extends `partial` (pairs source -> target) to a homomorphism, if possible.
///
/// The seeds together with the flagged constants must generate the source;
/// the extension is then unique when it exists.
pub fn extend_homomorphism(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    partial: &[(Elem, Elem)],
    constants: &ConstantFlags,
) -> Result<Extension> {
    for &(x, y) in partial {
        if x >= source.size() || y >= target.size() {
            return Err(Error::InvalidMap(format!("partial pair ({x}, {y}) out of range")));
        }
    }
    let mut seen = vec![false; source.size()];
    let mut list = Vec::new();
    for (_, a, _) in constants.resolve(source, target)? {
        if !std::mem::replace(&mut seen[a], true) {
            list.push(a);
        }
    }
    for &(x, _) in partial {
        if !std::mem::replace(&mut seen[x], true) {
            list.push(x);
        }
    }
    close_list(source, &mut list, &mut seen, 0);
    if list.len() != source.size() {
        return Err(Error::NotGenerating {
            generated: list.len(),
            size: source.size(),
        });
    }
    let mut ext = match Extender::new(source, target, constants, false)? {
        Ok(e) => e,
        Err(c) => return Err(Error::Internal(format!("constant clash without seeds: {}", clash_text(&c)))),
    };
    for &(x, y) in partial {
        if let Err(c) = ext.assign(x, y, Rule::Seed) {
            return Ok(Extension::Conflict(ext.witness(&c).expect("mismatch")));
        }
    }
    if let Err(c) = ext.close() {
        return Ok(Extension::Conflict(ext.witness(&c).expect("mismatch")));
    }
    if !ext.is_total() {
        return Err(Error::Internal("closure stopped before covering a generated source".into()));
    }
    Ok(Extension::Extended(ext.to_map()))
}

fn clash_text(c: &Clash) -> String {
    match c {
        Clash::Mismatch { element, old, new, .. } => format!("element {element}: {old} vs {new}"),
        Clash::NotInjective => "not injective".into(),
    }
}

/// A small generating set: constants' closure, then greedily the least
/// element not yet reached.
pub fn greedy_generators(alg: &FiniteAlgebra) -> Vec<Elem> {
    let mut seen = vec![false; alg.size()];
    let mut list = Vec::new();
    for &c in alg.constants() {
        if !std::mem::replace(&mut seen[c], true) {
            list.push(c);
        }
    }
    close_list(alg, &mut list, &mut seen, 0);
    let mut gens = Vec::new();
    while list.len() < alg.size() {
        let g = (0..alg.size()).find(|&x| !seen[x]).expect("unreached element");
        gens.push(g);
        let processed = list.len();
        seen[g] = true;
        list.push(g);
        close_list(alg, &mut list, &mut seen, processed);
    }
    gens
}

/// Options for [`homomorphisms`].
#[derive(Debug, Clone)]
pub struct HomSearch {
    pub constants: ConstantFlags,
    pub injective: bool,
    pub surjective: bool,
    /// Pairs that every returned map must contain.
    pub fixed: Vec<(Elem, Elem)>,
}

impl Default for HomSearch {
    fn default() -> Self {
        HomSearch {
            constants: ConstantFlags::All,
            injective: false,
            surjective: false,
            fixed: Vec::new(),
        }
    }
}

/// All homomorphisms `source -> target` satisfying `opts`, in lexicographic
/// order of their tables.
pub fn homomorphisms(source: &FiniteAlgebra, target: &FiniteAlgebra, opts: &HomSearch) -> Result<Vec<FunctionMap>> {
    let mut out = Vec::new();
    if opts.injective && source.size() > target.size() {
        return Ok(out);
    }
    if opts.surjective && source.size() < target.size() {
        return Ok(out);
    }
    let mut root = match Extender::new(source, target, &opts.constants, opts.injective)? {
        Ok(e) => e,
        Err(_) => return Ok(out),
    };
    for &(x, y) in &opts.fixed {
        if root.assign(x, y, Rule::Seed).is_err() {
            return Ok(out);
        }
    }
    if root.close().is_err() {
        return Ok(out);
    }
    let gens = greedy_generators(source);
    search(&root, &gens, 0, opts, &mut out);
    out.sort();
    Ok(out)
}

fn search(ext: &Extender<'_>, gens: &[Elem], i: usize, opts: &HomSearch, out: &mut Vec<FunctionMap>) {
    if ext.is_total() {
        let f = ext.to_map();
        if !opts.surjective || f.is_surjective() {
            out.push(f);
        }
        return;
    }
    let g = gens[i];
    if ext.image(g).is_some() {
        search(ext, gens, i + 1, opts, out);
        return;
    }
    for y in 0..ext.tgt.size() {
        if opts.injective && ext.used[y] {
            continue;
        }
        let mut next = ext.clone();
        if next.seed(g, y).is_ok() {
            search(&next, gens, i + 1, opts, out);
        }
    }
}

/// All automorphisms, identity first.
pub fn automorphisms(alg: &FiniteAlgebra) -> Vec<FunctionMap> {
    homomorphisms(
        alg,
        alg,
        &HomSearch {
            injective: true,
            ..HomSearch::default()
        },
    )
    .expect("an algebra shares its own signature")
}

/// The isomorphism with lexicographically least table, if any.
pub fn find_isomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<FunctionMap> {
    if a.size() != b.size() || a.signature() != b.signature() {
        return None;
    }
    let mut root = Extender::new(a, b, &ConstantFlags::All, true).ok()?.ok()?;
    root.close().ok()?;
    let gens = greedy_generators(a);
    first_iso(&root, &gens, 0)
}

fn first_iso(ext: &Extender<'_>, gens: &[Elem], i: usize) -> Option<FunctionMap> {
    if ext.is_total() {
        return Some(ext.to_map());
    }
    let g = gens[i];
    if ext.image(g).is_some() {
        return first_iso(ext, gens, i + 1);
    }
    let mut best: Option<FunctionMap> = None;
    for y in 0..ext.tgt.size() {
        if ext.used[y] {
            continue;
        }
        let mut next = ext.clone();
        if next.seed(g, y).is_ok() {
            if let Some(f) = first_iso(&next, gens, i + 1) {
                if best.as_ref().is_none_or(|b| f < *b) {
                    best = Some(f);
                }
            }
        }
    }
    best
}
