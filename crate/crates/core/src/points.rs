//! Split points over `U(B)`, their kernels, morphisms between them, and
//! exhaustive enumeration up to isomorphism.
//!
//! In the normal direction `p: A -> U(B)` and `s: U(B) -> A` with `p∘s = 1`.
//! In the opposite direction the arrows are pointed maps `p: U(B) -> A` and
//! `s: A -> U(B)` with `s∘p = 1`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, FiniteAlgebra, FunctionMap};
use crate::closures::{ContextSpec, Direction};
use crate::congruence::{quotient, Partition};
use crate::error::{Error, Result};
use crate::instances::pointed_set;
use crate::morphism::{automorphisms, homomorphisms, is_homomorphism, ConstantFlags, HomSearch};
use crate::varieties::{kernel_class, require_member};

/// Largest `|A|` enumerated without `unsafe_bounds`.
pub const MAX_POINT_SIZE: usize = 9;
/// Ceiling for signatures with four or more binary operations.
pub const MAX_POINT_SIZE_WIDE: usize = 6;
/// Hard limit even with `unsafe_bounds`.
pub const MAX_SEARCH_SIZE: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPoint {
    pub context: String,
    pub direction: Direction,
    pub b: FiniteAlgebra,
    pub ub: FiniteAlgebra,
    pub a: FiniteAlgebra,
    pub p: FunctionMap,
    pub s: FunctionMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitExtension {
    pub point: SplitPoint,
    pub x: FiniteAlgebra,
    /// Normal: the kernel inclusion `X -> A`. Opposite: the quotient `A -> X`.
    pub k: FunctionMap,
    /// Opposite only: the splitting `X -> A` of the quotient.
    pub delta: Option<FunctionMap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMorphism {
    pub source: SplitPoint,
    pub target: SplitPoint,
    /// Normal: `A1 -> A2`. Opposite: `A2 -> A1`.
    pub h: FunctionMap,
}

fn invalid(msg: String) -> Error {
    Error::InvalidPoint(msg)
}

fn first_difference(f: &FunctionMap, g: &FunctionMap) -> Option<Elem> {
    (0..f.domain()).find(|&x| f.get(x) != g.get(x))
}

/// Validates raw data as a point of `ctx` over `b`.
pub fn make_split_point(
    ctx: &ContextSpec,
    b: &FiniteAlgebra,
    a: &FiniteAlgebra,
    p: FunctionMap,
    s: FunctionMap,
) -> Result<SplitPoint> {
    let ub = ctx.forget(b)?;
    if a.signature() != &ctx.v.signature {
        return Err(Error::SignatureMismatch(format!(
            "A has signature {} but `{}` needs {}",
            a.signature(),
            ctx.v.name,
            ctx.v.signature
        )));
    }
    require_member(a, &ctx.v)?;
    let (n, m) = (a.size(), ub.size());
    let (p_dom, p_cod, s_dom, s_cod) = match ctx.direction {
        Direction::Normal => (n, m, m, n),
        Direction::Opposite => (m, n, n, m),
    };
    if (p.domain(), p.codomain(), s.domain(), s.codomain()) != (p_dom, p_cod, s_dom, s_cod) {
        return Err(invalid(format!(
            "maps have shapes p: {} -> {}, s: {} -> {}; expected p: {p_dom} -> {p_cod}, s: {s_dom} -> {s_cod}",
            p.domain(),
            p.codomain(),
            s.domain(),
            s.codomain()
        )));
    }
    let (pa, pb, sa, sb) = match ctx.direction {
        Direction::Normal => (a, &ub, &ub, a),
        Direction::Opposite => (&ub, a, a, &ub),
    };
    if let Some(w) = is_homomorphism(pa, pb, &p, &ConstantFlags::All)? {
        return Err(invalid(format!("p is not a homomorphism: {w}")));
    }
    if let Some(w) = is_homomorphism(sa, sb, &s, &ConstantFlags::All)? {
        return Err(invalid(format!("s is not a homomorphism: {w}")));
    }
    let composite = match ctx.direction {
        Direction::Normal => s.then(&p)?,
        Direction::Opposite => p.then(&s)?,
    };
    if let Some(x) = first_difference(&composite, &FunctionMap::identity(m)) {
        return Err(invalid(format!(
            "retraction law fails at {x}: composite gives {}",
            composite.get(x)
        )));
    }
    if ctx.direction == Direction::Opposite && !p.is_injective() {
        return Err(invalid("p is not injective".into()));
    }
    Ok(SplitPoint {
        context: ctx.name.clone(),
        direction: ctx.direction,
        b: b.clone(),
        ub,
        a: a.clone(),
        p,
        s,
    })
}

impl SplitPoint {
    /// The same point with `A` relabelled along the bijection `perm` (old -> new).
    pub fn transport(&self, perm: &FunctionMap) -> Result<SplitPoint> {
        let inv = perm
            .inverse()
            .ok_or_else(|| Error::InvalidMap("transport needs a bijection".into()))?;
        let a = self.a.relabel(perm.table());
        let (p, s) = match self.direction {
            Direction::Normal => (inv.then(&self.p)?, self.s.then(perm)?),
            Direction::Opposite => (self.p.then(perm)?, inv.then(&self.s)?),
        };
        Ok(SplitPoint {
            a,
            p,
            s,
            ..self.clone()
        })
    }

    /// `(p, s)` tables as one key, used to compare points on the same `A`.
    pub fn map_key(&self) -> (Vec<Elem>, Vec<Elem>) {
        (self.p.table().to_vec(), self.s.table().to_vec())
    }
}

/// The kernel `X` of a point together with `k` (and `delta` when opposite).
pub fn kernel_object(ctx: &ContextSpec, point: &SplitPoint) -> Result<SplitExtension> {
    match point.direction {
        Direction::Normal => {
            let kernel = kernel_class(&point.a, &point.ub, &point.p, &ctx.v)?;
            let (x, k) = point.a.subalgebra(&kernel)?;
            Ok(SplitExtension {
                point: point.clone(),
                x,
                k,
                delta: None,
            })
        }
        Direction::Opposite => {
            let image = point.p.image();
            let labels: Vec<Option<Elem>> = (0..point.a.size())
                .map(|e| if image.contains(&e) { None } else { Some(e) })
                .collect();
            let part = Partition::from_labels(&labels);
            let (x, k) = quotient(&point.a, &part)?;
            let pt_a = point.a.constant(0);
            let delta = (0..x.size())
                .map(|c| {
                    let members = part.blocks()[c].clone();
                    if members.len() == 1 && !image.contains(&members[0]) {
                        members[0]
                    } else {
                        pt_a
                    }
                })
                .collect();
            Ok(SplitExtension {
                point: point.clone(),
                delta: Some(FunctionMap::new(x.size(), point.a.size(), delta)?),
                x,
                k,
            })
        }
    }
}

/// Bounds for [`enumerate_points`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointBounds {
    pub max_size: usize,
    pub unsafe_bounds: bool,
    pub parallel: bool,
}

impl PointBounds {
    pub fn new(max_size: usize) -> Self {
        PointBounds {
            max_size,
            unsafe_bounds: false,
            parallel: false,
        }
    }
}

/// The configured ceiling on `|A|` for a context.
pub fn size_ceiling(ctx: &ContextSpec) -> usize {
    let binary = ctx.v.signature.ops().iter().filter(|o| o.arity >= 2).count();
    if binary >= 4 {
        MAX_POINT_SIZE_WIDE
    } else {
        MAX_POINT_SIZE
    }
}

pub(crate) fn check_bound(ctx: &ContextSpec, bounds: &PointBounds) -> Result<()> {
    let ceiling = if bounds.unsafe_bounds { MAX_SEARCH_SIZE } else { size_ceiling(ctx) };
    if bounds.max_size > ceiling {
        return Err(Error::BoundExceeded {
            what: format!("|A| for context `{}`", ctx.name),
            requested: bounds.max_size,
            ceiling,
        });
    }
    Ok(())
}

/// V-algebras of a given size up to isomorphism.
pub fn v_models(ctx: &ContextSpec, size: usize, parallel: bool) -> Result<Vec<FiniteAlgebra>> {
    let sig = &ctx.v.signature;
    if sig.ops().is_empty() && sig.constants().len() == 1 && ctx.v.identities.is_empty() {
        return Ok(if size == 0 { Vec::new() } else { vec![pointed_set(size).expand(sig, &[])?] });
    }
    ctx.v.models(size, parallel)
}

/// Every point over `b` with `|A| <= bounds.max_size`, one per isomorphism
/// class, ordered by size, canonical `A`, then `(p, s)`.
pub fn enumerate_points(ctx: &ContextSpec, b: &FiniteAlgebra, bounds: &PointBounds) -> Result<Vec<SplitPoint>> {
    check_bound(ctx, bounds)?;
    let ub = ctx.forget(b)?;
    let mut out = Vec::new();
    for n in ub.size()..=bounds.max_size {
        let models = v_models(ctx, n, bounds.parallel)?;
        let per_model = |a: &FiniteAlgebra| points_on(ctx, b, &ub, a);
        let found: Vec<Vec<SplitPoint>> = if bounds.parallel {
            models.par_iter().map(per_model).collect::<Result<_>>()?
        } else {
            models.iter().map(per_model).collect::<Result<_>>()?
        };
        out.extend(found.into_iter().flatten());
    }
    Ok(out)
}

/// All points on a fixed `A`, one per orbit of `Aut(A)`.
fn points_on(ctx: &ContextSpec, b: &FiniteAlgebra, ub: &FiniteAlgebra, a: &FiniteAlgebra) -> Result<Vec<SplitPoint>> {
    let into_a = homomorphisms(ub, a, &HomSearch::default())?;
    let onto_b = homomorphisms(a, ub, &HomSearch::default())?;
    let auts = automorphisms(a);
    let inverses: Vec<FunctionMap> = auts.iter().map(|h| h.inverse().expect("automorphism")).collect();
    let mut keys = BTreeSet::new();
    for u in &onto_b {
        for v in &into_a {
            let (p, s) = match ctx.direction {
                Direction::Normal => (u, v),
                Direction::Opposite => (v, u),
            };
            let composite = match ctx.direction {
                Direction::Normal => s.then(p)?,
                Direction::Opposite => p.then(s)?,
            };
            if composite != FunctionMap::identity(ub.size()) {
                continue;
            }
            let mut best = (p.table().to_vec(), s.table().to_vec());
            for (h, hinv) in auts.iter().zip(&inverses) {
                let key = match ctx.direction {
                    Direction::Normal => (hinv.then(p)?.table().to_vec(), s.then(h)?.table().to_vec()),
                    Direction::Opposite => (p.then(h)?.table().to_vec(), hinv.then(s)?.table().to_vec()),
                };
                if key < best {
                    best = key;
                }
            }
            keys.insert(best);
        }
    }
    keys.into_iter()
        .map(|(p, s)| {
            let (pd, sd) = match ctx.direction {
                Direction::Normal => (a.size(), ub.size()),
                Direction::Opposite => (ub.size(), a.size()),
            };
            let p = FunctionMap::new(pd, sd, p)?;
            let s = FunctionMap::new(sd, pd, s)?;
            Ok(SplitPoint {
                context: ctx.name.clone(),
                direction: ctx.direction,
                b: b.clone(),
                ub: ub.clone(),
                a: a.clone(),
                p,
                s,
            })
        })
        .collect()
}

/// Validates `h` as a morphism of points `source -> target`.
pub fn make_point_morphism(
    ctx: &ContextSpec,
    source: &SplitPoint,
    target: &SplitPoint,
    h: FunctionMap,
) -> Result<PointMorphism> {
    if source.b != target.b {
        return Err(Error::InvalidMorphism("points lie over different bases".into()));
    }
    let bad = |m: String| Err(Error::InvalidMorphism(m));
    match ctx.direction {
        Direction::Normal => {
            if let Some(w) = is_homomorphism(&source.a, &target.a, &h, &ConstantFlags::All)? {
                return bad(format!("h is not a homomorphism: {w}"));
            }
            let hs = source.s.then(&h)?;
            if let Some(b) = first_difference(&hs, &target.s) {
                return bad(format!("h∘s1 differs from s2 at {b}: {} vs {}", hs.get(b), target.s.get(b)));
            }
            let ph = h.then(&target.p)?;
            if let Some(a) = first_difference(&ph, &source.p) {
                return bad(format!("p2∘h differs from p1 at {a}: {} vs {}", ph.get(a), source.p.get(a)));
            }
        }
        Direction::Opposite => {
            if let Some(w) = is_homomorphism(&target.a, &source.a, &h, &ConstantFlags::All)? {
                return bad(format!("h is not a pointed map: {w}"));
            }
            let hp = target.p.then(&h)?;
            if let Some(b) = first_difference(&hp, &source.p) {
                return bad(format!("h∘p2 differs from p1 at {b}: {} vs {}", hp.get(b), source.p.get(b)));
            }
            let sh = h.then(&source.s)?;
            if let Some(a) = first_difference(&sh, &target.s) {
                return bad(format!("s1∘h differs from s2 at {a}: {} vs {}", sh.get(a), target.s.get(a)));
            }
        }
    }
    Ok(PointMorphism {
        source: source.clone(),
        target: target.clone(),
        h,
    })
}

/// Every morphism of points `source -> target`.
pub fn point_morphisms(ctx: &ContextSpec, source: &SplitPoint, target: &SplitPoint) -> Result<Vec<PointMorphism>> {
    if source.b != target.b {
        return Ok(Vec::new());
    }
    let candidates = match ctx.direction {
        Direction::Normal => {
            let fixed = (0..source.ub.size()).map(|b| (source.s.get(b), target.s.get(b))).collect();
            homomorphisms(&source.a, &target.a, &HomSearch { fixed, ..HomSearch::default() })?
        }
        Direction::Opposite => {
            let fixed = (0..source.ub.size()).map(|b| (target.p.get(b), source.p.get(b))).collect();
            homomorphisms(&target.a, &source.a, &HomSearch { fixed, ..HomSearch::default() })?
        }
    };
    let mut out = Vec::new();
    for h in candidates {
        if let Ok(m) = make_point_morphism(ctx, source, target, h) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Whether two points over the same base are isomorphic.
pub fn points_isomorphic(ctx: &ContextSpec, x: &SplitPoint, y: &SplitPoint) -> Result<bool> {
    if x.a.size() != y.a.size() {
        return Ok(false);
    }
    Ok(point_morphisms(ctx, x, y)?.iter().any(|m| m.h.is_bijective()))
}
