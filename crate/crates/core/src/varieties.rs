//! Built-in varieties and the structure derived from them: natural order,
//! filters and ideals, kernels, regular and dense elements, the b/c
//! decomposition, and the MV / bounded Wajsberg hoop term equivalence.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, FiniteAlgebra, FunctionMap, Signature};
use crate::congruence::{quotient, Partition};
use crate::error::{Error, Result};
use crate::morphism::{is_homomorphism, ConstantFlags};
use crate::search::{find_models, ModelQuery};
use crate::term::{check_identity, Identity, IdentityVerdict};

/// How models of a variety are enumerated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Enumeration {
    /// Generic operation-table search.
    Tables,
    /// Structure constants over `F_p`; carriers are powers of `p`.
    Linear { prime: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietySpec {
    pub name: String,
    pub signature: Arc<Signature>,
    pub identities: Vec<Identity>,
    /// Consequences of the identities that only steer enumeration.
    pub hints: Vec<Identity>,
    /// Operations filled last during enumeration.
    pub late_ops: Vec<String>,
    /// The constant whose preimage is a kernel (1 for hoops, 0 for MV and rings).
    pub kernel_constant: Option<String>,
    pub enumeration: Enumeration,
}

impl VarietySpec {
    pub fn new(name: &str, signature: Arc<Signature>, identities: &[&str]) -> Result<VarietySpec> {
        let identities = identities
            .iter()
            .map(|s| Identity::parse(&signature, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(VarietySpec {
            name: name.to_string(),
            signature,
            identities,
            hints: Vec::new(),
            late_ops: Vec::new(),
            kernel_constant: None,
            enumeration: Enumeration::Tables,
        })
    }

    fn kernel(mut self, c: &str) -> Self {
        self.kernel_constant = Some(c.to_string());
        self
    }

    fn hints(mut self, hints: &[&str]) -> Result<Self> {
        for h in hints {
            self.hints.push(Identity::parse(&self.signature, h)?);
        }
        Ok(self)
    }

    fn late(mut self, ops: &[&str]) -> Self {
        self.late_ops = ops.iter().map(|s| s.to_string()).collect();
        self
    }

    /// The same variety with more constants and identities over the enlarged signature.
    pub fn extend(&self, name: &str, constants: &[&str], identities: &[&str]) -> Result<VarietySpec> {
        let sig = Arc::new(self.signature.with_constants(constants)?);
        let mut out = VarietySpec {
            name: name.to_string(),
            signature: sig.clone(),
            identities: Vec::new(),
            hints: Vec::new(),
            late_ops: self.late_ops.clone(),
            kernel_constant: self.kernel_constant.clone(),
            enumeration: self.enumeration.clone(),
        };
        for id in self.identities.iter() {
            out.identities.push(Identity::parse(&sig, &id.to_string())?);
        }
        for id in self.hints.iter() {
            out.hints.push(Identity::parse(&sig, &id.to_string())?);
        }
        for s in identities {
            out.identities.push(Identity::parse(&sig, s)?);
        }
        Ok(out)
    }

    pub fn is_member(&self, alg: &FiniteAlgebra) -> Result<bool> {
        Ok(variety_membership(alg, self)?.member)
    }

    /// All members of the given size up to isomorphism, in canonical form.
    pub fn models(&self, size: usize, parallel: bool) -> Result<Vec<FiniteAlgebra>> {
        match self.enumeration {
            Enumeration::Tables => {
                let mut q = ModelQuery::new(self.signature.clone(), self.identities.clone(), size);
                q.hints = self.hints.clone();
                q.late_ops = self.late_ops.clone();
                q.parallel = parallel;
                find_models(&q)
            }
            Enumeration::Linear { prime } => crate::linear::algebras_of_size(self, prime, size, parallel),
        }
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "rng",
    "ring",
    "alg:assoc",
    "alg:cassoc",
    "alg:alt",
    "alg:lie",
    "alg:leib",
    "alg:ab",
    "hoop",
    "whoop",
    "bwhoop",
    "mv",
    "basic-hoop",
    "phoop",
    "bl",
    "pralg",
    "pset",
];

/// Looks up a built-in variety. Algebra varieties take an optional prime
/// suffix, `alg:cassoc:3`; the default field is `F_2`. A `+1` suffix,
/// `alg:cassoc+1`, selects the unital variety.
pub fn builtin(name: &str) -> Result<VarietySpec> {
    if let Some(rest) = name.strip_prefix("alg:") {
        let (rest, unital) = match rest.strip_suffix("+1") {
            Some(r) => (r, true),
            None => (rest, false),
        };
        let (kind, prime) = match rest.split_once(':') {
            Some((k, p)) => (
                k,
                p.parse::<usize>()
                    .map_err(|_| Error::UnknownSymbol(name.to_string()))?,
            ),
            None => (rest, 2),
        };
        let v = algebra_variety(kind, prime)?;
        return if unital { unital_variety(&v) } else { Ok(v) };
    }
    match name {
        "rng" => rng(),
        "ring" => rng()?.extend("ring", &["one"], &["(mul one x) = x", "(mul x one) = x"]),
        "hoop" => hoop(),
        "whoop" => whoop(),
        "bwhoop" => bounded_whoop(),
        "mv" => mv(),
        "basic-hoop" => basic_hoop(),
        "phoop" => product_hoop(),
        "bl" => bl(),
        "pralg" => product_algebra(),
        "pset" => Ok(VarietySpec::new(
            "pset",
            Arc::new(Signature::new(Vec::<(&str, usize)>::new(), ["pt"])?),
            &[],
        )?
        .kernel("pt")),
        _ => Err(Error::UnknownSymbol(name.to_string())),
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Signature of non-associative algebras over `F_p`: addition, product,
/// negation, one scalar operation per field element, and zero.
pub fn algebra_signature(prime: usize, unital: bool) -> Result<Signature> {
    let scales: Vec<String> = (0..prime).map(|a| format!("scale{a}")).collect();
    let mut ops: Vec<(String, usize)> = vec![("add".into(), 2), ("mul".into(), 2), ("neg".into(), 1)];
    ops.extend(scales.into_iter().map(|s| (s, 1)));
    let mut consts = vec!["zero".to_string()];
    if unital {
        consts.push("one".to_string());
    }
    Signature::new(ops, consts)
}

fn algebra_variety(kind: &str, prime: usize) -> Result<VarietySpec> {
    if !is_prime(prime) || prime > 7 {
        return Err(Error::InvalidSignature(format!("field order {prime} is not a supported prime")));
    }
    let sig = Arc::new(algebra_signature(prime, false)?);
    let mut ids: Vec<String> = vec![
        "(add x (add y z)) = (add (add x y) z)".into(),
        "(add x y) = (add y x)".into(),
        "(add x zero) = x".into(),
        "(add x (neg x)) = zero".into(),
        "(scale1 x) = x".into(),
        "(mul (add x y) z) = (add (mul x z) (mul y z))".into(),
        "(mul x (add y z)) = (add (mul x y) (mul x z))".into(),
    ];
    for a in 0..prime {
        ids.push(format!("(scale{a} (add x y)) = (add (scale{a} x) (scale{a} y))"));
        ids.push(format!("(mul (scale{a} x) y) = (scale{a} (mul x y))"));
        ids.push(format!("(mul x (scale{a} y)) = (scale{a} (mul x y))"));
        for b in 0..prime {
            ids.push(format!(
                "(scale{} x) = (add (scale{a} x) (scale{b} x))",
                (a + b) % prime
            ));
            ids.push(format!("(scale{} x) = (scale{a} (scale{b} x))", (a * b) % prime));
        }
    }
    let extra: &[&str] = match kind {
        "ab" => &["(mul x y) = zero"],
        "assoc" => &["(mul x (mul y z)) = (mul (mul x y) z)"],
        "cassoc" => &["(mul x (mul y z)) = (mul (mul x y) z)", "(mul x y) = (mul y x)"],
        "lie" => &[
            "(mul x x) = zero",
            "(add (add (mul x (mul y z)) (mul y (mul z x))) (mul z (mul x y))) = zero",
        ],
        "leib" => &["(add (mul (mul x y) z) (neg (add (mul (mul x z) y) (mul x (mul y z))))) = zero"],
        "alt" => &[
            "(add (mul (mul y x) x) (neg (mul y (mul x x)))) = zero",
            "(add (mul x (mul x y)) (neg (mul (mul x x) y))) = zero",
        ],
        _ => return Err(Error::UnknownSymbol(format!("alg:{kind}"))),
    };
    ids.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let name = if prime == 2 {
        format!("alg:{kind}")
    } else {
        format!("alg:{kind}:{prime}")
    };
    let mut v = VarietySpec::new(&name, sig, &refs)?.kernel("zero");
    v.enumeration = Enumeration::Linear { prime };
    Ok(v)
}

/// The unital members of an algebra variety, with `one` as a constant.
pub fn unital_variety(v: &VarietySpec) -> Result<VarietySpec> {
    v.extend(&format!("{}+1", v.name), &["one"], &["(mul one x) = x", "(mul x one) = x"])
}

fn rng() -> Result<VarietySpec> {
    let sig = Arc::new(Signature::new([("add", 2), ("mul", 2), ("neg", 1)], ["zero"])?);
    Ok(VarietySpec::new(
        "rng",
        sig,
        &[
            "(add x (add y z)) = (add (add x y) z)",
            "(add x y) = (add y x)",
            "(add x zero) = x",
            "(add x (neg x)) = zero",
            "(mul x (mul y z)) = (mul (mul x y) z)",
            "(mul (add x y) z) = (add (mul x z) (mul y z))",
            "(mul x (add y z)) = (add (mul x y) (mul x z))",
        ],
    )?
    .kernel("zero"))
}

const HOOP: &[&str] = &[
    "(mul x (mul y z)) = (mul (mul x y) z)",
    "(mul x y) = (mul y x)",
    "(mul x one) = x",
    "(imp x x) = one",
    "(mul x (imp x y)) = (mul y (imp y x))",
    "(imp (mul x y) z) = (imp x (imp y z))",
];

const HOOP_HINTS: &[&str] = &["(imp x one) = one", "(imp one x) = x"];

fn hoop() -> Result<VarietySpec> {
    let sig = Arc::new(Signature::new([("mul", 2), ("imp", 2)], ["one"])?);
    VarietySpec::new("hoop", sig, HOOP)?.kernel("one").hints(HOOP_HINTS)
}

fn whoop() -> Result<VarietySpec> {
    let mut ids = HOOP.to_vec();
    ids.push("(imp (imp x y) y) = (imp (imp y x) x)");
    let sig = Arc::new(Signature::new([("mul", 2), ("imp", 2)], ["one"])?);
    VarietySpec::new("whoop", sig, &ids)?.kernel("one").hints(HOOP_HINTS)
}

fn bounded_whoop() -> Result<VarietySpec> {
    let mut v = whoop()?.extend("bwhoop", &["zero"], &["(imp zero x) = one"])?;
    v.hints.push(Identity::parse(&v.signature, "(mul zero x) = zero")?);
    Ok(v)
}

fn mv() -> Result<VarietySpec> {
    let sig = Arc::new(Signature::new([("oplus", 2), ("neg", 1)], ["zero"])?);
    VarietySpec::new(
        "mv",
        sig,
        &[
            "(oplus x (oplus y z)) = (oplus (oplus x y) z)",
            "(oplus x y) = (oplus y x)",
            "(oplus x zero) = x",
            "(neg (neg x)) = x",
            "(oplus x (neg zero)) = (neg zero)",
            "(oplus (neg (oplus (neg x) y)) y) = (oplus (neg (oplus (neg y) x)) x)",
        ],
    )?
    .kernel("zero")
    .hints(&["(oplus x (neg x)) = (neg zero)"])
}

/// Join given by the lattice term valid in every basic hoop and BL-algebra.
const JOIN_HINT: &str = "(join x y) = (meet (imp (imp x y) y) (imp (imp y x) x))";

fn basic_hoop() -> Result<VarietySpec> {
    let sig = Arc::new(Signature::new([("join", 2), ("meet", 2), ("mul", 2), ("imp", 2)], ["one"])?);
    let mut ids = HOOP.to_vec();
    ids.extend_from_slice(&[
        "(meet x y) = (mul x (imp x y))",
        "(imp x (join x y)) = one",
        "(imp y (join x y)) = one",
        "(imp (join x y) z) = (meet (imp x z) (imp y z))",
        "(imp (imp (imp x y) z) (imp (imp (imp y x) z) z)) = one",
    ]);
    let mut hints = HOOP_HINTS.to_vec();
    hints.push(JOIN_HINT);
    Ok(VarietySpec::new("basic-hoop", sig, &ids)?
        .kernel("one")
        .hints(&hints)?
        .late(&["join", "meet"]))
}

fn product_hoop() -> Result<VarietySpec> {
    let mut v = basic_hoop()?.extend(
        "phoop",
        &[],
        &["(join (imp y z) (imp (imp y (mul x y)) x)) = one"],
    )?;
    v.name = "phoop".into();
    Ok(v)
}

fn bl() -> Result<VarietySpec> {
    let sig = Arc::new(Signature::new(
        [("join", 2), ("meet", 2), ("mul", 2), ("imp", 2)],
        ["zero", "one"],
    )?);
    let ids = [
        "(join x y) = (join y x)",
        "(meet x y) = (meet y x)",
        "(join x (join y z)) = (join (join x y) z)",
        "(meet x (meet y z)) = (meet (meet x y) z)",
        "(join x (meet x y)) = x",
        "(meet x (join x y)) = x",
        "(mul x (mul y z)) = (mul (mul x y) z)",
        "(mul x y) = (mul y x)",
        "(mul x one) = x",
        "(mul x (join y z)) = (join (mul x y) (mul x z))",
        "(meet (imp x y) (imp x (join y z))) = (imp x y)",
        "(meet (mul x (imp x y)) y) = (mul x (imp x y))",
        "(meet y (imp x (mul x y))) = y",
        "(meet x one) = x",
        "(meet zero x) = zero",
        "(meet x y) = (mul x (imp x y))",
        "(join (imp x y) (imp y x)) = one",
    ];
    let mut hints = HOOP_HINTS.to_vec();
    hints.extend_from_slice(&[JOIN_HINT, "(imp zero x) = one", "(mul zero x) = zero"]);
    Ok(VarietySpec::new("bl", sig, &ids)?
        .kernel("one")
        .hints(&hints)?
        .late(&["join", "meet"]))
}

fn product_algebra() -> Result<VarietySpec> {
    let mut v = bl()?.extend(
        "pralg",
        &[],
        &["(join (imp x zero) (imp (imp x (mul x y)) y)) = one"],
    )?;
    v.name = "pralg".into();
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub variety: String,
    pub verdicts: Vec<(String, IdentityVerdict)>,
    pub member: bool,
}

impl MembershipReport {
    pub fn first_failure(&self) -> Option<&(String, IdentityVerdict)> {
        self.verdicts.iter().find(|(_, v)| !v.holds())
    }
}

/// Checks every identity of `v` on `alg`, whose signature must contain `v`'s.
pub fn variety_membership(alg: &FiniteAlgebra, v: &VarietySpec) -> Result<MembershipReport> {
    if !v.signature.is_subsignature_of(alg.signature()) {
        return Err(Error::SignatureMismatch(format!(
            "algebra signature {} does not contain {} of `{}`",
            alg.signature(),
            v.signature,
            v.name
        )));
    }
    let mut verdicts = Vec::with_capacity(v.identities.len());
    for id in &v.identities {
        verdicts.push((id.to_string(), check_identity(alg, id)?));
    }
    let member = verdicts.iter().all(|(_, r)| r.holds());
    Ok(MembershipReport {
        variety: v.name.clone(),
        verdicts,
        member,
    })
}

pub(crate) fn require_member(alg: &FiniteAlgebra, v: &VarietySpec) -> Result<()> {
    let r = variety_membership(alg, v)?;
    match r.first_failure() {
        None => Ok(()),
        Some((id, verdict)) => Err(Error::NotInVariety {
            variety: v.name.clone(),
            detail: format!("`{id}` fails: {verdict}"),
        }),
    }
}

/// A binary relation on `0..size`, stored densely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRelation {
    size: usize,
    leq: Vec<bool>,
}

impl OrderRelation {
    pub fn from_fn(size: usize, f: impl Fn(Elem, Elem) -> bool) -> Self {
        let mut leq = Vec::with_capacity(size * size);
        for x in 0..size {
            for y in 0..size {
                leq.push(f(x, y));
            }
        }
        OrderRelation { size, leq }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.leq[x * self.size + y]
    }

    pub fn is_partial_order(&self) -> bool {
        let n = self.size;
        (0..n).all(|x| self.leq(x, x))
            && (0..n).all(|x| (0..n).all(|y| x == y || !(self.leq(x, y) && self.leq(y, x))))
            && (0..n).all(|x| {
                (0..n).all(|y| !self.leq(x, y) || (0..n).all(|z| !self.leq(y, z) || self.leq(x, z)))
            })
    }

    pub fn is_total(&self) -> bool {
        (0..self.size).all(|x| (0..self.size).all(|y| self.leq(x, y) || self.leq(y, x)))
    }

    pub fn minimum(&self) -> Option<Elem> {
        (0..self.size).find(|&x| (0..self.size).all(|y| self.leq(x, y)))
    }

    pub fn maximum(&self) -> Option<Elem> {
        (0..self.size).find(|&x| (0..self.size).all(|y| self.leq(y, x)))
    }

    /// Whether `j` is the least upper bound of `x` and `y`.
    pub fn is_join(&self, x: Elem, y: Elem, j: Elem) -> bool {
        self.leq(x, j)
            && self.leq(y, j)
            && (0..self.size).all(|u| !(self.leq(x, u) && self.leq(y, u)) || self.leq(j, u))
    }

    pub fn is_meet(&self, x: Elem, y: Elem, m: Elem) -> bool {
        self.leq(m, x)
            && self.leq(m, y)
            && (0..self.size).all(|l| !(self.leq(l, x) && self.leq(l, y)) || self.leq(l, m))
    }

    pub fn is_upset(&self, set: &BTreeSet<Elem>) -> bool {
        set.iter().all(|&x| (0..self.size).all(|y| !self.leq(x, y) || set.contains(&y)))
    }

    pub fn is_downset(&self, set: &BTreeSet<Elem>) -> bool {
        set.iter().all(|&x| (0..self.size).all(|y| !self.leq(y, x) || set.contains(&y)))
    }
}

/// Which residuated structure an algebra carries, detected from its signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    Hoop { mul: usize, imp: usize, one: Elem },
    Mv { oplus: usize, neg: usize, zero: Elem },
}

pub fn order_kind(alg: &FiniteAlgebra) -> Option<OrderKind> {
    if let (Some(mul), Some(imp), Some(one)) = (alg.op_named("mul"), alg.op_named("imp"), alg.constant_named("one")) {
        if alg.signature().arity(mul) == 2 && alg.signature().arity(imp) == 2 {
            return Some(OrderKind::Hoop { mul, imp, one });
        }
    }
    if let (Some(oplus), Some(neg), Some(zero)) = (alg.op_named("oplus"), alg.op_named("neg"), alg.constant_named("zero")) {
        if alg.signature().arity(oplus) == 2 && alg.signature().arity(neg) == 1 {
            return Some(OrderKind::Mv { oplus, neg, zero });
        }
    }
    None
}

/// The natural order `x <= y iff x -> y = 1` (for MV: `neg x + y = neg 0`).
/// The divisibility characterization is recomputed and must agree.
pub fn natural_order(alg: &FiniteAlgebra) -> Result<OrderRelation> {
    let kind = order_kind(alg).ok_or_else(|| Error::NotInVariety {
        variety: "hoop or mv".into(),
        detail: "signature has neither (mul, imp, one) nor (oplus, neg, zero)".into(),
    })?;
    let n = alg.size();
    let (order, divides) = match kind {
        OrderKind::Hoop { mul, imp, one } => {
            require_member(&alg.reduct(&builtin("hoop")?.signature)?, &builtin("hoop")?)?;
            (
                OrderRelation::from_fn(n, |x, y| alg.apply2(imp, x, y) == one),
                OrderRelation::from_fn(n, |x, y| (0..n).any(|z| alg.apply2(mul, z, y) == x)),
            )
        }
        OrderKind::Mv { oplus, neg, zero } => {
            require_member(&alg.reduct(&builtin("mv")?.signature)?, &builtin("mv")?)?;
            let top = alg.apply1(neg, zero);
            (
                OrderRelation::from_fn(n, |x, y| alg.apply2(oplus, alg.apply1(neg, x), y) == top),
                OrderRelation::from_fn(n, |x, y| (0..n).any(|z| alg.apply2(oplus, x, z) == y)),
            )
        }
    };
    if order != divides || !order.is_partial_order() {
        return Err(Error::Internal(
            "natural order and divisibility order disagree on a valid input".into(),
        ));
    }
    Ok(order)
}

/// Filters of a hoop: upward closed submonoids containing 1.
pub fn is_filter(h: &FiniteAlgebra, f: &BTreeSet<Elem>) -> Result<bool> {
    let Some(OrderKind::Hoop { mul, one, .. }) = order_kind(h) else {
        return Err(Error::NotFilter("not a hoop signature".into()));
    };
    let order = natural_order(h)?;
    Ok(f.contains(&one)
        && order.is_upset(f)
        && f.iter().all(|&x| f.iter().all(|&y| f.contains(&h.apply2(mul, x, y)))))
}

/// Ideals of an MV-algebra: downward closed, contain 0, closed under sum.
pub fn is_mv_ideal(a: &FiniteAlgebra, i: &BTreeSet<Elem>) -> Result<bool> {
    let Some(OrderKind::Mv { oplus, zero, .. }) = order_kind(a) else {
        return Err(Error::NotFilter("not an MV signature".into()));
    };
    let order = natural_order(a)?;
    Ok(i.contains(&zero)
        && order.is_downset(i)
        && i.iter().all(|&x| i.iter().all(|&y| i.contains(&a.apply2(oplus, x, y)))))
}

/// Preimage of the kernel constant under a homomorphism of `v`, checked to
/// be a filter, an ideal, or a ring ideal as appropriate.
pub fn kernel_class(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    f: &FunctionMap,
    v: &VarietySpec,
) -> Result<BTreeSet<Elem>> {
    let flags = ConstantFlags::Named(v.signature.constants().to_vec());
    let src = source.reduct(&v.signature)?;
    let tgt = target.reduct(&v.signature)?;
    if let Some(w) = is_homomorphism(&src, &tgt, f, &flags)? {
        return Err(Error::InvalidMap(format!("not a homomorphism of `{}`: {w}", v.name)));
    }
    let k = v
        .kernel_constant
        .as_ref()
        .ok_or_else(|| Error::InvalidContext(format!("`{}` has no kernel constant", v.name)))?;
    let c = tgt
        .constant_named(k)
        .ok_or_else(|| Error::UnknownSymbol(k.clone()))?;
    let kernel = f.preimage(c);
    let ok = match order_kind(&src) {
        Some(OrderKind::Hoop { .. }) => is_filter(&src, &kernel)?,
        Some(OrderKind::Mv { .. }) => is_mv_ideal(&src, &kernel)?,
        None => match (src.op_named("add"), src.op_named("mul")) {
            (Some(add), Some(mul)) => kernel.iter().all(|&x| {
                kernel.iter().all(|&y| kernel.contains(&src.apply2(add, x, y)))
                    && (0..src.size())
                        .all(|a| kernel.contains(&src.apply2(mul, a, x)) && kernel.contains(&src.apply2(mul, x, a)))
            }),
            _ => true,
        },
    };
    if !ok {
        return Err(Error::Internal(format!(
            "kernel {kernel:?} of a homomorphism is not a filter or ideal"
        )));
    }
    Ok(kernel)
}

/// Quotient of a hoop by the congruence `x ~ y iff x -> y, y -> x in F`.
pub fn quotient_by_filter(h: &FiniteAlgebra, f: &BTreeSet<Elem>) -> Result<(FiniteAlgebra, FunctionMap)> {
    if !is_filter(h, f)? {
        return Err(Error::NotFilter(format!("{f:?} is not a filter")));
    }
    let imp = h.op_named("imp").expect("hoop signature");
    let n = h.size();
    let class: Vec<Vec<bool>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| f.contains(&h.apply2(imp, x, y)) && f.contains(&h.apply2(imp, y, x)))
                .collect()
        })
        .collect();
    let part = Partition::from_labels(&class);
    quotient(h, &part)
}

/// `b(x) = (x -> x^2) -> x` and `c(x) = x -> x^2` in a product hoop.
pub fn bc_decompose(h: &FiniteAlgebra, x: Elem) -> Result<(Elem, Elem)> {
    let (mul, imp) = hoop_ops(h)?;
    Ok(bc_raw(h, mul, imp, x))
}

fn bc_raw(h: &FiniteAlgebra, mul: usize, imp: usize, x: Elem) -> (Elem, Elem) {
    let c = h.apply2(imp, x, h.apply2(mul, x, x));
    (h.apply2(imp, c, x), c)
}

fn hoop_ops(h: &FiniteAlgebra) -> Result<(usize, usize)> {
    match (h.op_named("mul"), h.op_named("imp")) {
        (Some(m), Some(i)) => Ok((m, i)),
        _ => Err(Error::NotInVariety {
            variety: "phoop".into(),
            detail: "no mul/imp operations".into(),
        }),
    }
}

/// `G(H) = {b(x)}` and `C(H) = {c(x)}` of a product hoop.
pub fn bc_sets(h: &FiniteAlgebra) -> Result<(BTreeSet<Elem>, BTreeSet<Elem>)> {
    require_member(h, &builtin("phoop")?)?;
    let (mul, imp) = hoop_ops(h)?;
    let mut g = BTreeSet::new();
    let mut c = BTreeSet::new();
    for x in 0..h.size() {
        let (b, cc) = bc_raw(h, mul, imp, x);
        g.insert(b);
        c.insert(cc);
    }
    Ok((g, c))
}

/// Bounded Wajsberg hoop of an MV-algebra: `x*y = neg(neg x + neg y)`,
/// `x -> y = neg x + y`, `one = neg zero`.
pub fn mv_to_hoop(a: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    let mv = builtin("mv")?;
    require_member(a, &mv)?;
    let (oplus, neg) = (a.op_named("oplus").expect("mv"), a.op_named("neg").expect("mv"));
    let zero = a.constant_named("zero").expect("mv");
    let target = builtin("bwhoop")?;
    let h = FiniteAlgebra::from_fn(
        target.signature.clone(),
        a.size(),
        |op, args| match target.signature.ops()[op].name.as_str() {
            "mul" => a.apply1(neg, a.apply2(oplus, a.apply1(neg, args[0]), a.apply1(neg, args[1]))),
            _ => a.apply2(oplus, a.apply1(neg, args[0]), args[1]),
        },
        target
            .signature
            .constants()
            .iter()
            .map(|c| if c == "one" { a.apply1(neg, zero) } else { zero })
            .collect(),
    )?;
    require_member(&h, &target).map_err(|e| Error::Internal(format!("MV to hoop output: {e}")))?;
    Ok(h)
}

/// MV-algebra of a Wajsberg hoop with bottom `bottom`: `neg x = x -> bottom`,
/// `x + y = neg x -> y`.
pub fn hoop_to_mv(h: &FiniteAlgebra, bottom: Elem) -> Result<FiniteAlgebra> {
    let w = builtin("whoop")?;
    require_member(&h.reduct(&w.signature)?, &w)?;
    let imp = h.op_named("imp").expect("hoop");
    let one = h.constant_named("one").expect("hoop");
    if (0..h.size()).any(|x| h.apply2(imp, bottom, x) != one) {
        return Err(Error::NotInVariety {
            variety: "bwhoop".into(),
            detail: format!("element {bottom} is not a bottom"),
        });
    }
    let mv = builtin("mv")?;
    let negate = |x: Elem| h.apply2(imp, x, bottom);
    let a = FiniteAlgebra::from_fn(
        mv.signature.clone(),
        h.size(),
        |op, args| match mv.signature.ops()[op].name.as_str() {
            "oplus" => h.apply2(imp, negate(args[0]), args[1]),
            _ => negate(args[0]),
        },
        vec![bottom],
    )?;
    require_member(&a, &mv).map_err(|e| Error::Internal(format!("hoop to MV output: {e}")))?;
    Ok(a)
}

/// Whether `alg` (in `v`) stays in `v` after formally adjoining a unit:
/// the unitalization over the field is checked against `v`'s identities.
/// Returns the first identity that breaks, with its witness.
pub fn unit_closure_probe(v: &VarietySpec, pool: &[FiniteAlgebra]) -> Result<Option<(String, IdentityVerdict)>> {
    let Enumeration::Linear { prime } = v.enumeration else {
        return Err(Error::InvalidContext(format!("`{}` is not an algebra variety", v.name)));
    };
    for x in pool {
        let (fx, _, _) = crate::closures::unitalization_raw(x, prime)?;
        let r = variety_membership(&fx.reduct(&v.signature)?, v)?;
        if let Some(f) = r.first_failure() {
            return Ok(Some(f.clone()));
        }
    }
    Ok(None)
}

/// The regular/dense split extension of a product algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularDense {
    /// `B(A) = {x | ¬¬x = x}`.
    pub regular: BTreeSet<Elem>,
    /// `D(A) = {x | ¬¬x = 1}`.
    pub dense: BTreeSet<Elem>,
    /// The point `A ⇄ B(A)` of the product context with `p(a) = ¬¬a`.
    pub point: crate::points::SplitPoint,
    /// Every element is regular, as happens for all finite product algebras.
    pub degenerate: bool,
}

pub fn regular_dense(a: &FiniteAlgebra) -> Result<RegularDense> {
    let ctx = crate::closures::ContextSpec::builtin("product")?;
    require_member(a, &ctx.u)?;
    let imp = a.op_named("imp").expect("product algebra");
    let (zero, one) = (a.constant_named("zero").expect("bounded"), a.constant_named("one").expect("bounded"));
    let nn = |x: Elem| a.apply2(imp, a.apply2(imp, x, zero), zero);
    let regular: BTreeSet<Elem> = (0..a.size()).filter(|&x| nn(x) == x).collect();
    let dense: BTreeSet<Elem> = (0..a.size()).filter(|&x| nn(x) == one).collect();
    let (b, inclusion) = a.subalgebra(&regular)?;
    let boolean = builtin("pralg")?.extend("boolean", &[], &["(mul x x) = x"])?;
    require_member(&b, &boolean).map_err(|e| Error::Internal(format!("regular elements are not Boolean: {e}")))?;
    if !is_filter(&a.reduct(&ctx.v.signature)?, &dense)? {
        return Err(Error::Internal("dense elements do not form a filter".into()));
    }
    let members: Vec<Elem> = regular.iter().copied().collect();
    let p = FunctionMap::new(
        a.size(),
        b.size(),
        (0..a.size())
            .map(|x| members.iter().position(|&r| r == nn(x)).expect("double negation is regular"))
            .collect(),
    )?;
    let point = crate::points::make_split_point(&ctx, &b, &a.reduct(&ctx.v.signature)?, p, inclusion)?;
    Ok(RegularDense {
        degenerate: regular.len() == a.size(),
        regular,
        dense,
        point,
    })
}
