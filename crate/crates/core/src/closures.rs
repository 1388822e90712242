//! Closure constructions `F(X)` for each context, the contexts themselves,
//! and the cartesian-unit check.
//!
//! In the normal direction a [`ClosureResult`] holds `F(X)` as a U-algebra,
//! the unit `X -> UF(X)`, the comparison `F(X) -> F(0)` and `UF(iota): F(0) -> F(X)`.
//! In the opposite (pointed set) direction the same fields hold the pointed
//! maps of the dual picture: `UF(X) = 1 + X` with the adjoined point last,
//! the unit `1 + X -> X`, the comparison `UF(0) -> UF(X)` and
//! `UF(iota): UF(X) -> UF(0)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, FiniteAlgebra, FunctionMap};
use crate::congruence::Partition;
use crate::error::{Error, Result};
use crate::instances;
use crate::morphism::{is_homomorphism, ConstantFlags};
use crate::varieties::{algebra_signature, builtin, require_member, unit_closure_probe, unital_variety, VarietySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Normal,
    Opposite,
}

/// How coherence is decided without building `F(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// `A` has a two-sided unit and it is `s(1_B)`.
    Unit,
    /// The least element of `A` is `s(0_B)`.
    Bottom,
    /// `s` sends only the base point of `A` to the base point of `U(B)`.
    PointPreimage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureKind {
    Unitalization { prime: usize },
    MvClosure,
    ProductClosure,
    Maybe,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSpec {
    pub name: String,
    pub v: VarietySpec,
    pub u: VarietySpec,
    pub closure: Option<ClosureKind>,
    pub direction: Direction,
    pub criterion: Option<Criterion>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureResult {
    pub closed: FiniteAlgebra,
    pub unit: FunctionMap,
    pub comparison: FunctionMap,
    pub initial: FiniteAlgebra,
    pub initial_map: FunctionMap,
    pub direction: Direction,
}

/// Names accepted by [`ContextSpec::builtin`]; `alg:<kind>[:p]` is also accepted.
pub const BUILTIN_CONTEXTS: &[&str] = &["pset", "mv", "product", "ring", "alg:cassoc", "alg:assoc", "alg:alt"];

impl ContextSpec {
    pub fn builtin(name: &str) -> Result<ContextSpec> {
        if name.starts_with("alg:") {
            return algebra_context(name);
        }
        match name {
            "pset" => {
                let v = builtin("pset")?;
                let mut u = v.clone();
                u.name = "set".into();
                Ok(ContextSpec {
                    name: "pset".into(),
                    v,
                    u,
                    closure: Some(ClosureKind::Maybe),
                    direction: Direction::Opposite,
                    criterion: Some(Criterion::PointPreimage),
                })
            }
            "mv" => Ok(ContextSpec {
                name: "mv".into(),
                v: builtin("whoop")?,
                u: builtin("bwhoop")?,
                closure: Some(ClosureKind::MvClosure),
                direction: Direction::Normal,
                criterion: Some(Criterion::Bottom),
            }),
            "product" => Ok(ContextSpec {
                name: "product".into(),
                v: builtin("phoop")?,
                u: builtin("pralg")?,
                closure: Some(ClosureKind::ProductClosure),
                direction: Direction::Normal,
                criterion: Some(Criterion::Bottom),
            }),
            "ring" => Ok(ContextSpec {
                name: "ring".into(),
                v: builtin("rng")?,
                u: builtin("ring")?,
                closure: None,
                direction: Direction::Normal,
                criterion: Some(Criterion::Unit),
            }),
            _ => Err(Error::InvalidContext(format!("unknown context `{name}`"))),
        }
    }

    /// Constants of U that V does not have.
    pub fn extra_constants(&self) -> Vec<String> {
        self.u
            .signature
            .constants()
            .iter()
            .filter(|c| self.v.signature.constant_index(c).is_none())
            .cloned()
            .collect()
    }

    pub fn kernel_constant(&self) -> Result<&str> {
        self.v
            .kernel_constant
            .as_deref()
            .ok_or_else(|| Error::InvalidContext(format!("`{}` has no kernel constant", self.v.name)))
    }

    /// Checks that `b` is a U-object in this context's representation.
    pub fn validate_base(&self, b: &FiniteAlgebra) -> Result<()> {
        if b.signature() != &self.u.signature {
            return Err(Error::SignatureMismatch(format!(
                "base has signature {} but `{}` needs {}",
                b.signature(),
                self.u.name,
                self.u.signature
            )));
        }
        require_member(b, &self.u)?;
        if self.direction == Direction::Opposite && b.constants().first() != Some(&(b.size() - 1)) {
            return Err(Error::InvalidAlgebra(
                "a set B is stored as 1 + B with the adjoined point last".into(),
            ));
        }
        Ok(())
    }

    /// `U(B)` as a V-algebra.
    pub fn forget(&self, b: &FiniteAlgebra) -> Result<FiniteAlgebra> {
        self.validate_base(b)?;
        b.reduct(&self.v.signature)
    }

    pub fn closure(&self, x: &FiniteAlgebra) -> Result<ClosureResult> {
        let kind = self
            .closure
            .ok_or_else(|| Error::ClosureUnavailable(self.name.clone()))?;
        require_member(x, &self.v)?;
        let r = match kind {
            ClosureKind::Unitalization { prime } => unitalize(x, prime)?,
            ClosureKind::MvClosure => mv_closure(x)?,
            ClosureKind::ProductClosure => product_closure(x)?,
            ClosureKind::Maybe => maybe_closure(x)?,
        };
        if r.closed.signature() != &self.u.signature {
            return Err(Error::InvalidContext(format!(
                "closure produces signature {} but U is {}",
                r.closed.signature(),
                self.u.signature
            )));
        }
        Ok(r)
    }

    /// `F(0)` as a U-algebra.
    pub fn initial(&self) -> Result<FiniteAlgebra> {
        match self.closure {
            Some(ClosureKind::Unitalization { prime }) => Ok(instances::prime_field(prime)),
            Some(ClosureKind::MvClosure) => Ok(instances::lukasiewicz_hoop(2)),
            Some(ClosureKind::ProductClosure) => Ok(instances::boolean_product_algebra(1)),
            Some(ClosureKind::Maybe) => Ok(instances::maybe_set(1)),
            None => Err(Error::ClosureUnavailable(self.name.clone())),
        }
    }
}

fn algebra_context(name: &str) -> Result<ContextSpec> {
    let v = builtin(name)?;
    if v.signature.constant_index("one").is_some() {
        return Err(Error::InvalidContext(format!("`{name}` is already unital")));
    }
    let crate::varieties::Enumeration::Linear { prime } = v.enumeration else {
        return Err(Error::InvalidContext(format!("`{name}` is not an algebra variety")));
    };
    let pool = unit_probe_pool(&v, prime)?;
    if let Some((identity, verdict)) = unit_closure_probe(&v, &pool)? {
        return Err(Error::NotUnitClosed {
            variety: v.name.clone(),
            identity: format!("{identity} ({verdict})"),
        });
    }
    let u = unital_variety(&v)?;
    Ok(ContextSpec {
        name: v.name.clone(),
        v,
        u,
        closure: Some(ClosureKind::Unitalization { prime }),
        direction: Direction::Normal,
        criterion: Some(Criterion::Unit),
    })
}

fn unit_probe_pool(v: &VarietySpec, prime: usize) -> Result<Vec<FiniteAlgebra>> {
    let mut pool = Vec::new();
    let mut size = 1;
    while size <= prime * prime && size <= 9 {
        pool.extend(v.models(size, false)?);
        size *= prime;
    }
    Ok(pool)
}

/// `F_p ⋉ X` on the algebra signature with `one`, the unit `x -> (0, x)`
/// and the comparison `(a, x) -> a`. Element `(a, x)` is `a * |X| + x`.
pub fn unitalization_raw(x: &FiniteAlgebra, prime: usize) -> Result<(FiniteAlgebra, FunctionMap, FunctionMap)> {
    let plain = Arc::new(algebra_signature(prime, false)?);
    let x = x.reduct(&plain)?;
    let n = x.size();
    let (add, mul, neg) = (
        x.op_named("add").expect("algebra signature"),
        x.op_named("mul").expect("algebra signature"),
        x.op_named("neg").expect("algebra signature"),
    );
    let scale: Vec<usize> = (0..prime)
        .map(|a| x.op_named(&format!("scale{a}")).expect("algebra signature"))
        .collect();
    let zero = x.constant_named("zero").expect("algebra signature");
    let sig = Arc::new(algebra_signature(prime, true)?);
    let split = |e: Elem| (e / n, e % n);
    let fx = FiniteAlgebra::from_fn(
        sig.clone(),
        prime * n,
        |op, args| {
            let (a, u) = split(args[0]);
            let (a2, u2) = match sig.ops()[op].name.as_str() {
                "add" => {
                    let (b, v) = split(args[1]);
                    ((a + b) % prime, x.apply2(add, u, v))
                }
                "mul" => {
                    let (b, v) = split(args[1]);
                    let xy = x.apply2(mul, u, v);
                    let av = x.apply1(scale[a], v);
                    let bu = x.apply1(scale[b], u);
                    ((a * b) % prime, x.apply2(add, x.apply2(add, xy, av), bu))
                }
                "neg" => ((prime - a) % prime, x.apply1(neg, u)),
                s => {
                    let c: usize = s.trim_start_matches("scale").parse().expect("scale op");
                    ((c * a) % prime, x.apply1(scale[c], u))
                }
            };
            a2 * n + u2
        },
        sig.constants()
            .iter()
            .map(|c| if c == "one" { n + zero } else { zero })
            .collect(),
    )?;
    let unit = FunctionMap::new(n, prime * n, (0..n).collect())?;
    let comparison = FunctionMap::new(prime * n, prime, (0..prime * n).map(|e| e / n).collect())?;
    Ok((fx, unit, comparison))
}

/// The unitalization as a closure result; `UF(iota)` sends `a` to `(a, 0)`.
pub fn unitalize(x: &FiniteAlgebra, prime: usize) -> Result<ClosureResult> {
    let (closed, unit, comparison) = unitalization_raw(x, prime)?;
    let n = x.size();
    let zero = x.constant_named("zero").expect("algebra signature");
    Ok(ClosureResult {
        initial_map: FunctionMap::new(prime, closed.size(), (0..prime).map(|a| a * n + zero).collect())?,
        closed,
        unit,
        comparison,
        initial: instances::prime_field(prime),
        direction: Direction::Normal,
    })
}

/// `M(H)` for a Wajsberg hoop `H`: `(a, 1)` is `a`, `(a, 0)` is `|H| + a`.
pub fn mv_closure(h: &FiniteAlgebra) -> Result<ClosureResult> {
    require_member(h, &builtin("whoop")?)?;
    let n = h.size();
    let (mul, imp) = (h.op_named("mul").expect("hoop"), h.op_named("imp").expect("hoop"));
    let one = h.constant_named("one").expect("hoop");
    let m = |a, b| h.apply2(mul, a, b);
    let i = |a, b| h.apply2(imp, a, b);
    let split = |e: Elem| if e < n { (e, 1) } else { (e - n, 0) };
    let join = |(a, k): (Elem, usize)| if k == 1 { a } else { n + a };
    let target = builtin("bwhoop")?;
    let sig = target.signature.clone();
    let closed = FiniteAlgebra::from_fn(
        sig.clone(),
        2 * n,
        |op, args| {
            let (a, x) = split(args[0]);
            let (b, y) = split(args[1]);
            let r = if sig.ops()[op].name == "mul" {
                match (x, y) {
                    (1, 1) => (m(a, b), 1),
                    (1, 0) => (i(a, b), 0),
                    (0, 1) => (i(b, a), 0),
                    _ => (i(i(a, m(a, b)), b), 0),
                }
            } else {
                match (x, y) {
                    (1, 1) => (i(a, b), 1),
                    (1, 0) => (m(a, b), 0),
                    (0, 1) => (i(i(a, m(a, b)), b), 1),
                    _ => (i(b, a), 1),
                }
            };
            join(r)
        },
        sig.constants()
            .iter()
            .map(|c| if c == "one" { one } else { n + one })
            .collect(),
    )?;
    Ok(ClosureResult {
        unit: FunctionMap::new(n, 2 * n, (0..n).collect())?,
        comparison: FunctionMap::new(2 * n, 2, (0..2 * n).map(|e| usize::from(e < n)).collect())?,
        initial: instances::lukasiewicz_hoop(2),
        initial_map: FunctionMap::new(2, 2 * n, vec![n + one, one])?,
        closed,
        direction: Direction::Normal,
    })
}

#[derive(Clone, Copy)]
enum Side {
    Plain(Elem),
    Dot(Elem),
}

/// `K(H) = H ∪ H•/∼` for a product hoop `H`: elements of `H` first, then the
/// classes of `H•` in order of least representative.
pub fn product_closure(h: &FiniteAlgebra) -> Result<ClosureResult> {
    require_member(h, &builtin("phoop")?)?;
    let n = h.size();
    let (mul, imp) = (h.op_named("mul").expect("hoop"), h.op_named("imp").expect("hoop"));
    let one = h.constant_named("one").expect("hoop");
    let m = |a, b| h.apply2(mul, a, b);
    let i = |a, b| h.apply2(imp, a, b);
    let meet = |a, b| m(a, i(a, b));
    let joinh = |a, b| meet(i(i(a, b), b), i(i(b, a), a));
    let bc: Vec<(Elem, Elem)> = (0..n)
        .map(|x| {
            let c = i(x, m(x, x));
            (i(c, x), c)
        })
        .collect();
    let part = dot_classes(h);
    let reps = part.representatives();
    let classes = part.block_count();
    let dot = |x: Elem| n + part.block_of(x);
    // Case formulas on representatives of H•.
    let op_value = |name: &str, l: Side, r: Side| -> Elem {
        // Side::Plain(x) is x in H, Side::Dot(x) is x• for a representative x.
        let pick = |v: Side| match v {
            Side::Plain(x) | Side::Dot(x) => x,
        };
        let (b, c) = bc[pick(l)];
        let (b2, c2) = bc[pick(r)];
        match (name, l, r) {
            ("mul", Side::Plain(x), Side::Plain(y)) => m(x, y),
            ("mul", Side::Plain(_), Side::Dot(_)) => dot(meet(i(b, b2), m(c, c2))),
            ("mul", Side::Dot(_), Side::Plain(_)) => dot(meet(i(b2, b), m(c2, c))),
            ("mul", Side::Dot(_), Side::Dot(_)) => dot(meet(joinh(b, b2), m(c, c2))),
            ("imp", Side::Plain(x), Side::Plain(y)) => i(x, y),
            ("imp", Side::Dot(_), Side::Dot(_)) => meet(i(b2, b), joinh(b, i(c, c2))),
            ("imp", Side::Dot(_), Side::Plain(_)) => meet(joinh(b, b2), joinh(b, i(c, c2))),
            ("imp", Side::Plain(_), Side::Dot(_)) => dot(meet(meet(b, b2), i(m(b, c), c2))),
            _ => unreachable!("only mul and imp are case-defined"),
        }
    };
    let size = n + classes;
    let tag = |e: Elem, rep: &dyn Fn(usize) -> Elem| if e < n { Side::Plain(e) } else { Side::Dot(rep(e - n)) };
    // Every representative choice must give the same value.
    let members = part.blocks();
    for name in ["mul", "imp"] {
        for l in 0..size {
            for r in 0..size {
                let choices_l: Vec<Side> =
                    if l < n { vec![Side::Plain(l)] } else { members[l - n].iter().map(|&x| Side::Dot(x)).collect() };
                let choices_r: Vec<Side> =
                    if r < n { vec![Side::Plain(r)] } else { members[r - n].iter().map(|&x| Side::Dot(x)).collect() };
                let first = op_value(name, choices_l[0], choices_r[0]);
                for &cl in &choices_l {
                    for &cr in &choices_r {
                        if op_value(name, cl, cr) != first {
                            return Err(Error::Internal(format!(
                                "`{name}` on K(H) depends on the representative at ({l}, {r})"
                            )));
                        }
                    }
                }
            }
        }
    }
    let base: Vec<Vec<Elem>> = ["mul", "imp"]
        .iter()
        .map(|name| {
            let mut t = Vec::with_capacity(size * size);
            for l in 0..size {
                for r in 0..size {
                    t.push(op_value(name, tag(l, &|k| reps[k]), tag(r, &|k| reps[k])));
                }
            }
            t
        })
        .collect();
    let bm = |x: Elem, y: Elem| base[0][x * size + y];
    let bi = |x: Elem, y: Elem| base[1][x * size + y];
    let kmeet = |x, y| bm(x, bi(x, y));
    let target = builtin("pralg")?;
    let sig = target.signature.clone();
    let zero = dot(one);
    let closed = FiniteAlgebra::from_fn(
        sig.clone(),
        size,
        |op, a| match sig.ops()[op].name.as_str() {
            "mul" => bm(a[0], a[1]),
            "imp" => bi(a[0], a[1]),
            "meet" => kmeet(a[0], a[1]),
            _ => kmeet(bi(bi(a[0], a[1]), a[1]), bi(bi(a[1], a[0]), a[0])),
        },
        sig.constants()
            .iter()
            .map(|c| if c == "one" { one } else { zero })
            .collect(),
    )?;
    Ok(ClosureResult {
        unit: FunctionMap::new(n, size, (0..n).collect())?,
        comparison: FunctionMap::new(size, 2, (0..size).map(|e| usize::from(e < n)).collect())?,
        initial: instances::boolean_product_algebra(1),
        initial_map: FunctionMap::new(2, size, vec![zero, one])?,
        closed,
        direction: Direction::Normal,
    })
}

/// The classes of `H•` under `x• ∼ y•` iff `b(x) = b(y)` and `b(x) -> c(x) = b(y) -> c(y)`.
fn dot_classes(h: &FiniteAlgebra) -> Partition {
    let (mul, imp) = (h.op_named("mul").expect("hoop"), h.op_named("imp").expect("hoop"));
    let labels: Vec<(Elem, Elem)> = (0..h.size())
        .map(|x| {
            let c = h.apply2(imp, x, h.apply2(mul, x, x));
            let b = h.apply2(imp, c, x);
            (b, h.apply2(imp, b, c))
        })
        .collect();
    Partition::from_labels(&labels)
}

/// The dual pointed-set closure of a pointed set `X`: `UF(X) = 1 + X`.
pub fn maybe_closure(x: &FiniteAlgebra) -> Result<ClosureResult> {
    let n = x.size();
    let pt = x.constant_named("pt").ok_or_else(|| Error::SignatureMismatch("not a pointed set".into()))?;
    let closed = instances::maybe_set(n);
    Ok(ClosureResult {
        unit: FunctionMap::new(n + 1, n, (0..n).chain([pt]).collect())?,
        comparison: FunctionMap::new(2, n + 1, vec![pt, n])?,
        initial: instances::maybe_set(1),
        initial_map: FunctionMap::new(n + 1, 2, (0..n).map(|_| 0).chain([1]).collect())?,
        closed,
        direction: Direction::Opposite,
    })
}

/// The pointed set `(1 + A, 1)` for a finite set `A` of `size` elements,
/// with `A` first and the adjoined point last, plus the inclusion `A -> 1 + A`.
pub fn maybe_point(size: usize) -> (FiniteAlgebra, FunctionMap) {
    let inclusion = FunctionMap::new(size, size + 1, (0..size).collect()).expect("inclusion");
    (instances::maybe_set(size), inclusion)
}

/// Outcome of [`verify_cartesian_unit`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CartesianVerdict {
    Pass,
    Fail(String),
}

impl CartesianVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, CartesianVerdict::Pass)
    }
}

/// Checks that the unit is a kernel of the comparison map (in the opposite
/// direction: a cokernel of it, collapsing exactly its image).
pub fn verify_cartesian_unit(ctx: &ContextSpec, x: &FiniteAlgebra) -> Result<CartesianVerdict> {
    let r = ctx.closure(x)?;
    let fail = |s: String| Ok(CartesianVerdict::Fail(s));
    match r.direction {
        Direction::Normal => {
            let ufx = r.closed.reduct(&ctx.v.signature)?;
            if let Some(w) = is_homomorphism(x, &ufx, &r.unit, &ConstantFlags::All)? {
                return fail(format!("unit is not a homomorphism: {w}"));
            }
            if let Some(w) = is_homomorphism(&r.closed, &r.initial, &r.comparison, &ConstantFlags::All)? {
                return fail(format!("comparison is not a homomorphism: {w}"));
            }
            if let Some(w) = is_homomorphism(&r.initial, &r.closed, &r.initial_map, &ConstantFlags::All)? {
                return fail(format!("UF(iota) is not a homomorphism: {w}"));
            }
            if !r.unit.is_injective() {
                return fail("unit is not injective".into());
            }
            let k = ctx.kernel_constant()?;
            let c = r.initial.constant_named(k).expect("kernel constant in F(0)");
            let kernel = r.comparison.preimage(c);
            if kernel != r.unit.image() {
                return fail(format!("kernel {:?} differs from unit image {:?}", kernel, r.unit.image()));
            }
        }
        Direction::Opposite => {
            let image = r.comparison.image();
            if !r.unit.is_surjective() {
                return fail("unit is not surjective".into());
            }
            for u in 0..r.closed.size() {
                for v in 0..r.closed.size() {
                    let same = r.unit.get(u) == r.unit.get(v);
                    let expected = u == v || (image.contains(&u) && image.contains(&v));
                    if same != expected {
                        return fail(format!("unit identifies {u} and {v}: {same}, expected {expected}"));
                    }
                }
            }
            let back = r.comparison.then(&r.initial_map)?;
            if back != FunctionMap::identity(r.initial.size()) {
                return fail("comparison is not split by UF(iota)".into());
            }
        }
    }
    Ok(CartesianVerdict::Pass)
}

/// `UF(g)` for a V-morphism `g: X -> Y`, defined componentwise.
pub fn closure_on_morphism(ctx: &ContextSpec, x: &FiniteAlgebra, y: &FiniteAlgebra, g: &FunctionMap) -> Result<FunctionMap> {
    let (nx, ny) = (x.size(), y.size());
    if g.domain() != nx || g.codomain() != ny {
        return Err(Error::InvalidMap("morphism does not match the algebras".into()));
    }
    let fx = ctx.closure(x)?;
    let fy = ctx.closure(y)?;
    let table: Vec<Elem> = match ctx.closure {
        Some(ClosureKind::Unitalization { .. }) => {
            (0..fx.closed.size()).map(|e| (e / nx) * ny + g.get(e % nx)).collect()
        }
        Some(ClosureKind::MvClosure) => (0..fx.closed.size())
            .map(|e| if e < nx { g.get(e) } else { ny + g.get(e - nx) })
            .collect(),
        Some(ClosureKind::ProductClosure) => {
            let px = dot_classes(x);
            let py = dot_classes(y);
            let reps = px.representatives();
            (0..fx.closed.size())
                .map(|e| if e < nx { g.get(e) } else { ny + py.block_of(g.get(reps[e - nx])) })
                .collect()
        }
        Some(ClosureKind::Maybe) => (0..=nx).map(|e| if e < nx { g.get(e) } else { ny }).collect(),
        None => return Err(Error::ClosureUnavailable(ctx.name.clone())),
    };
    FunctionMap::new(fx.closed.size(), fy.closed.size(), table)
}
