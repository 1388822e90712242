//! Coherence of points, decided by extending along the canonical point and by
//! the per-context criterion, plus ideality (structure lifting) and lifting
//! of point morphisms.

use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, FiniteAlgebra, FunctionMap};
use crate::closures::{ContextSpec, Criterion, Direction};
use crate::error::{Error, Result};
use crate::instances::maybe_set;
use crate::linear::two_sided_unit;
use crate::morphism::{
    automorphisms, extend_homomorphism, homomorphisms, is_homomorphism, ConflictWitness, ConstantFlags, Extension,
    HomSearch,
};
use crate::points::{kernel_object, make_split_point, PointMorphism, SplitPoint};
use crate::varieties::{natural_order, variety_membership};

/// The canonical point `UF(X) ⇄ UF(0)` of a V-algebra `X`.
pub fn canonical_point(ctx: &ContextSpec, x: &FiniteAlgebra) -> Result<SplitPoint> {
    let r = ctx.closure(x)?;
    match r.direction {
        Direction::Normal => {
            let a = r.closed.reduct(&ctx.v.signature)?;
            make_split_point(ctx, &r.initial, &a, r.comparison, r.initial_map)
        }
        Direction::Opposite => make_split_point(ctx, &r.initial, &r.closed, r.comparison, r.initial_map),
    }
}

/// Why no extension exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtensionFailure {
    /// Two derivations force different images of one element of `UF(X)`.
    Conflict(ConflictWitness),
    /// Opposite direction: `s(a)` is the base point for some `a` outside the
    /// image of `p`, so `f(a)` would have to be both the adjoined point and `k(a)`.
    OutsidePoint { element: Elem, class: Elem },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtensionVerdict {
    Present { f: FunctionMap },
    Absent(ExtensionFailure),
}

impl ExtensionVerdict {
    pub fn coherent(&self) -> bool {
        matches!(self, ExtensionVerdict::Present { .. })
    }

    pub fn map(&self) -> Option<&FunctionMap> {
        match self {
            ExtensionVerdict::Present { f } => Some(f),
            ExtensionVerdict::Absent(_) => None,
        }
    }
}

/// The unique U-morphism `F(0) -> B`.
pub fn initial_map_to(ctx: &ContextSpec, b: &FiniteAlgebra) -> Result<FunctionMap> {
    let f0 = ctx.initial()?;
    let maps = homomorphisms(&f0, b, &HomSearch::default())?;
    match maps.len() {
        1 => Ok(maps.into_iter().next().expect("one map")),
        k => Err(Error::InvalidContext(format!(
            "F(0) is not initial for this base: {k} morphisms into it"
        ))),
    }
}

/// Coherence by building the comparison `f` out of the canonical point of the kernel.
pub fn coherence_by_extension(ctx: &ContextSpec, point: &SplitPoint) -> Result<ExtensionVerdict> {
    let ext = kernel_object(ctx, point)?;
    let r = ctx.closure(&ext.x)?;
    match point.direction {
        Direction::Normal => {
            let iota_b = initial_map_to(ctx, &point.b)?;
            let ufx = r.closed.reduct(&ctx.v.signature)?;
            let mut partial: Vec<(Elem, Elem)> = (0..ext.x.size()).map(|x| (r.unit.get(x), ext.k.get(x))).collect();
            partial.extend((0..r.initial.size()).map(|e| (r.initial_map.get(e), point.s.get(iota_b.get(e)))));
            let f = match extend_homomorphism(&ufx, &point.a, &partial, &ConstantFlags::All) {
                Ok(Extension::Extended(f)) => f,
                Ok(Extension::Conflict(w)) => return Ok(ExtensionVerdict::Absent(ExtensionFailure::Conflict(w))),
                Err(Error::NotGenerating { generated, size }) => {
                    return Err(Error::Internal(format!(
                        "unit and UF(iota) generate only {generated} of {size} elements of UF(X)"
                    )))
                }
                Err(e) => return Err(e),
            };
            check_equal(&r.unit.then(&f)?, &ext.k, "f∘η = k")?;
            check_equal(&f.then(&point.p)?, &r.comparison.then(&iota_b)?, "p∘f = U(iota_B)∘comparison")?;
            check_equal(&r.initial_map.then(&f)?, &iota_b.then(&point.s)?, "f∘UF(iota) = s∘U(iota_B)")?;
            Ok(ExtensionVerdict::Present { f })
        }
        Direction::Opposite => {
            let pt_b = point.ub.size() - 1;
            let pt_x = ext.x.constant(0);
            let last = r.closed.size() - 1;
            for a in 0..point.a.size() {
                if point.s.get(a) == pt_b && ext.k.get(a) != pt_x {
                    return Ok(ExtensionVerdict::Absent(ExtensionFailure::OutsidePoint {
                        element: a,
                        class: ext.k.get(a),
                    }));
                }
            }
            let table = (0..point.a.size())
                .map(|a| if point.s.get(a) == pt_b { last } else { ext.k.get(a) })
                .collect();
            let f = FunctionMap::new(point.a.size(), r.closed.size(), table)?;
            // U(iota_B): 1 + B -> 1 + 1
            let iota_b = FunctionMap::new(
                point.ub.size(),
                2,
                (0..point.ub.size()).map(|b| usize::from(b == pt_b)).collect(),
            )?;
            if let Some(w) = is_homomorphism(&point.a, &r.closed.reduct(&ctx.v.signature)?, &f, &ConstantFlags::All)? {
                return Err(Error::Internal(format!("forced f is not pointed: {w}")));
            }
            check_equal(&f.then(&r.unit)?, &ext.k, "η∘f = k")?;
            check_equal(&point.p.then(&f)?, &iota_b.then(&r.comparison)?, "f∘p = comparison∘U(iota_B)")?;
            check_equal(&f.then(&r.initial_map)?, &point.s.then(&iota_b)?, "UF(iota)∘f = U(iota_B)∘s")?;
            Ok(ExtensionVerdict::Present { f })
        }
    }
}

fn check_equal(lhs: &FunctionMap, rhs: &FunctionMap, what: &str) -> Result<()> {
    if lhs != rhs {
        return Err(Error::Internal(format!("extension breaks {what}: {lhs} vs {rhs}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub coherent: bool,
    /// The element that breaks the criterion, if any.
    pub witness: Option<Elem>,
    pub detail: String,
}

/// Coherence by the context's characterization.
pub fn coherence_by_criterion(ctx: &ContextSpec, point: &SplitPoint) -> Result<CriterionVerdict> {
    let criterion = ctx
        .criterion
        .ok_or_else(|| Error::NoCriterion(ctx.name.clone()))?;
    let verdict = |coherent: bool, witness: Option<Elem>, detail: String| CriterionVerdict {
        coherent,
        witness,
        detail,
    };
    match criterion {
        Criterion::Unit => {
            let one_b = constant_of(&point.b, "one")?;
            let target = point.s.get(one_b);
            Ok(match two_sided_unit(&point.a) {
                Some(u) if u == target => verdict(true, None, format!("unit {u} = s(1_B)")),
                Some(u) => verdict(false, Some(target), format!("unit {u} differs from s(1_B) = {target}")),
                None => verdict(false, Some(target), format!("A has no two-sided unit; s(1_B) = {target}")),
            })
        }
        Criterion::Bottom => {
            let zero_b = constant_of(&point.b, "zero")?;
            let target = point.s.get(zero_b);
            let order = natural_order(&point.a)?;
            Ok(match order.minimum() {
                Some(m) if m == target => verdict(true, None, format!("bottom {m} = s(0_B)")),
                Some(m) => verdict(false, Some(target), format!("bottom {m} differs from s(0_B) = {target}")),
                None => verdict(false, Some(target), format!("A has no bottom; s(0_B) = {target}")),
            })
        }
        Criterion::PointPreimage => {
            let pt_b = point.ub.size() - 1;
            let pt_a = point.a.constant(0);
            let stray = (0..point.a.size()).find(|&a| a != pt_a && point.s.get(a) == pt_b);
            Ok(match stray {
                None => verdict(true, None, "s⁻¹(pt) = {pt_A}".into()),
                Some(a) => verdict(false, Some(a), format!("s({a}) is the base point but {a} is not")),
            })
        }
    }
}

fn constant_of(b: &FiniteAlgebra, name: &str) -> Result<Elem> {
    b.constant_named(name)
        .ok_or_else(|| Error::UnknownSymbol(format!("base has no constant `{name}`")))
}

/// Both coherence verdicts side by side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub by_criterion: Option<CriterionVerdict>,
    pub by_extension: Option<ExtensionVerdict>,
    /// `None` when only one method applies.
    pub agreement: Option<bool>,
}

impl CoherenceReport {
    pub fn coherent(&self) -> bool {
        match (&self.by_extension, &self.by_criterion) {
            (Some(e), _) => e.coherent(),
            (None, Some(c)) => c.coherent,
            (None, None) => false,
        }
    }
}

pub fn coherence_report(ctx: &ContextSpec, point: &SplitPoint) -> Result<CoherenceReport> {
    let by_criterion = match ctx.criterion {
        Some(_) => Some(coherence_by_criterion(ctx, point)?),
        None => None,
    };
    let by_extension = match ctx.closure {
        Some(_) => Some(coherence_by_extension(ctx, point)?),
        None => None,
    };
    if by_criterion.is_none() && by_extension.is_none() {
        return Err(Error::NoCriterion(ctx.name.clone()));
    }
    let agreement = match (&by_criterion, &by_extension) {
        (Some(c), Some(e)) => Some(c.coherent == e.coherent()),
        _ => None,
    };
    Ok(CoherenceReport {
        by_criterion,
        by_extension,
        agreement,
    })
}

/// Which isomorphism `sigma` a lift uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaCase {
    Identity,
    Automorphism,
    /// The pointed-set bijection `1 + (A minus pt) -> A`.
    Reindexing,
}

/// A point of U whose image under U is the given point, up to `sigma`.
///
/// In the opposite direction `a_lift` holds `U(A')` with the adjoined point
/// last, and `p_lift`, `s_lift` hold `U(p')`, `U(s')`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealLift {
    pub a_lift: FiniteAlgebra,
    pub p_lift: FunctionMap,
    pub s_lift: FunctionMap,
    pub sigma: FunctionMap,
    pub sigma_case: SigmaCase,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealityOutcome {
    pub lift: Option<IdealLift>,
    /// What was tried, in order.
    pub trace: Vec<String>,
}

impl IdealityOutcome {
    pub fn ideal(&self) -> bool {
        self.lift.is_some()
    }
}

/// Searches for a lift of the point to U.
pub fn ideality_test(ctx: &ContextSpec, point: &SplitPoint) -> Result<IdealityOutcome> {
    let mut trace = Vec::new();
    match point.direction {
        Direction::Normal => {
            let extras = ctx.extra_constants();
            let forced: Vec<(String, Elem)> = extras
                .iter()
                .map(|c| Ok((c.clone(), point.s.get(constant_of(&point.b, c)?))))
                .collect::<Result<_>>()?;
            let sigma = FunctionMap::identity(point.a.size());
            match lift_with(ctx, point, &sigma, &forced)? {
                Ok(lift) => {
                    return Ok(IdealityOutcome {
                        lift: Some(IdealLift {
                            sigma_case: SigmaCase::Identity,
                            ..lift
                        }),
                        trace,
                    })
                }
                Err(why) => trace.push(format!("sigma = identity, constants {forced:?}: {why}")),
            }
            let auts = automorphisms(&point.a);
            for sigma in auts.iter().skip(1) {
                // U(A') is A transported along sigma⁻¹, with p' = p∘sigma and s' = sigma⁻¹∘s
                let inv = sigma.inverse().expect("automorphism");
                let moved: Vec<(String, Elem)> = forced.iter().map(|(c, e)| (c.clone(), inv.get(*e))).collect();
                if let Ok(lift) = lift_with(ctx, point, sigma, &moved)? {
                    trace.push("an automorphism sigma succeeded".into());
                    return Ok(IdealityOutcome {
                        lift: Some(IdealLift {
                            sigma_case: SigmaCase::Automorphism,
                            ..lift
                        }),
                        trace,
                    });
                }
            }
            trace.push(format!("{} non-identity automorphisms tried, none lifts", auts.len().saturating_sub(1)));
            Ok(IdealityOutcome { lift: None, trace })
        }
        Direction::Opposite => {
            let pt_a = point.a.constant(0);
            let sigma = reindexing(&point.a);
            match opposite_lift(point, &sigma)? {
                Some(lift) => Ok(IdealityOutcome { lift: Some(lift), trace }),
                None => {
                    let pt_b = point.ub.size() - 1;
                    let stray = (0..point.a.size())
                        .find(|&a| a != pt_a && point.s.get(a) == pt_b)
                        .expect("a failed opposite lift has a stray element");
                    trace.push(format!(
                        "A' = A minus {{{pt_a}}}; s' must send {stray} into B, but s({stray}) is the base point{}",
                        if pt_b == 0 { " and B is empty" } else { "" }
                    ));
                    Ok(IdealityOutcome { lift: None, trace })
                }
            }
        }
    }
}

/// `sigma: 1 + (A minus pt) -> A`, listing non-point elements in order, point last.
fn reindexing(a: &FiniteAlgebra) -> FunctionMap {
    let pt = a.constant(0);
    let table: Vec<Elem> = (0..a.size()).filter(|&e| e != pt).chain([pt]).collect();
    FunctionMap::new(a.size(), a.size(), table).expect("bijection")
}

fn opposite_lift(point: &SplitPoint, sigma: &FunctionMap) -> Result<Option<IdealLift>> {
    let n = point.a.size();
    let m = point.ub.size();
    let inv = sigma.inverse().expect("bijection");
    let up = point.p.then(&inv)?;
    let us = sigma.then(&point.s)?;
    let last_a = n - 1;
    let last_b = m - 1;
    let keeps = |f: &FunctionMap, dom_last: Elem, cod_last: Elem| {
        (0..f.domain()).all(|x| (x == dom_last) == (f.get(x) == cod_last))
    };
    if !keeps(&up, last_b, last_a) || !keeps(&us, last_a, last_b) {
        return Ok(None);
    }
    Ok(Some(IdealLift {
        a_lift: maybe_set(n - 1),
        p_lift: up,
        s_lift: us,
        sigma: sigma.clone(),
        sigma_case: SigmaCase::Reindexing,
    }))
}

/// Tries the lift with `sigma: U(A') -> A` and constants of `A'` given on the `A'` side.
fn lift_with(
    ctx: &ContextSpec,
    point: &SplitPoint,
    sigma: &FunctionMap,
    constants: &[(String, Elem)],
) -> Result<std::result::Result<IdealLift, String>> {
    let inv = sigma.inverse().ok_or_else(|| Error::InvalidMap("sigma is not a bijection".into()))?;
    let moved = point.a.relabel(inv.table());
    let pairs: Vec<(&str, Elem)> = constants.iter().map(|(c, e)| (c.as_str(), *e)).collect();
    let lifted = moved.expand(&ctx.u.signature, &pairs)?;
    let p_lift = sigma.then(&point.p)?;
    let s_lift = point.s.then(&inv)?;
    if let Some(w) = is_homomorphism(&lifted, &point.b, &p_lift, &ConstantFlags::All)? {
        return Ok(Err(format!("p' is not a U-morphism: {w}")));
    }
    if let Some(w) = is_homomorphism(&point.b, &lifted, &s_lift, &ConstantFlags::All)? {
        return Ok(Err(format!("s' is not a U-morphism: {w}")));
    }
    let report = variety_membership(&lifted, &ctx.u)?;
    if let Some((id, v)) = report.first_failure() {
        return Ok(Err(format!("A' leaves `{}`: {id} fails ({v})", ctx.u.name)));
    }
    Ok(Ok(IdealLift {
        a_lift: lifted,
        p_lift,
        s_lift,
        sigma: sigma.clone(),
        sigma_case: SigmaCase::Identity,
    }))
}

/// Every lift: in the normal direction all constant assignments with
/// `sigma = 1`, in the opposite direction all pointed bijections `sigma`.
pub fn all_lifts(ctx: &ContextSpec, point: &SplitPoint) -> Result<Vec<IdealLift>> {
    let mut out = Vec::new();
    match point.direction {
        Direction::Normal => {
            let extras = ctx.extra_constants();
            let n = point.a.size();
            let total = n.checked_pow(extras.len() as u32).unwrap_or(usize::MAX);
            let sigma = FunctionMap::identity(n);
            for code in 0..total {
                let mut c = code;
                let assignment: Vec<(String, Elem)> = extras
                    .iter()
                    .map(|name| {
                        let e = c % n;
                        c /= n;
                        (name.clone(), e)
                    })
                    .collect();
                if let Ok(lift) = lift_with(ctx, point, &sigma, &assignment)? {
                    out.push(lift);
                }
            }
        }
        Direction::Opposite => {
            let pt = point.a.constant(0);
            let others: Vec<Elem> = (0..point.a.size()).filter(|&e| e != pt).collect();
            for perm in permutations(&others) {
                let table: Vec<Elem> = perm.into_iter().chain([pt]).collect();
                let sigma = FunctionMap::new(point.a.size(), point.a.size(), table)?;
                if let Some(lift) = opposite_lift(point, &sigma)? {
                    out.push(lift);
                }
            }
        }
    }
    Ok(out)
}

fn permutations(items: &[Elem]) -> Vec<Vec<Elem>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// Whether two lifts of the same point are isomorphic over it: the map
/// `sigma2⁻¹∘sigma1` is a U-isomorphism commuting with the lifted maps.
pub fn lifts_isomorphic(l1: &IdealLift, l2: &IdealLift, direction: Direction) -> Result<bool> {
    let inv2 = l2.sigma.inverse().ok_or_else(|| Error::InvalidMap("sigma".into()))?;
    let tau = l1.sigma.then(&inv2)?;
    if is_homomorphism(&l1.a_lift, &l2.a_lift, &tau, &ConstantFlags::All)?.is_some() {
        return Ok(false);
    }
    Ok(match direction {
        Direction::Normal => tau.then(&l2.p_lift)? == l1.p_lift && l1.s_lift.then(&tau)? == l2.s_lift,
        Direction::Opposite => l1.p_lift.then(&tau)? == l2.p_lift && tau.then(&l2.s_lift)? == l1.s_lift,
    })
}

/// Number of lifts up to isomorphism over the point.
pub fn lift_classes(lifts: &[IdealLift], direction: Direction) -> Result<usize> {
    let mut reps: Vec<&IdealLift> = Vec::new();
    for l in lifts {
        let mut found = false;
        for r in &reps {
            if lifts_isomorphic(l, r, direction)? {
                found = true;
                break;
            }
        }
        if !found {
            reps.push(l);
        }
    }
    Ok(reps.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorphismLift {
    /// The U-morphism between the lifted objects.
    Lifted(FunctionMap),
    /// Normal direction: `h` moves a lifted constant.
    MovesConstant { name: String, image: Elem, expected: Elem },
    /// Opposite direction: `h` sends a non-point element to the point.
    HitsPoint { element: Elem },
}

impl MorphismLift {
    pub fn lifted(&self) -> bool {
        matches!(self, MorphismLift::Lifted(_))
    }
}

/// Whether a morphism between ideal points is the image of a U-morphism.
pub fn ideal_morphism_test(ctx: &ContextSpec, m: &PointMorphism) -> Result<MorphismLift> {
    let l1 = ideality_test(ctx, &m.source)?.lift;
    let l2 = ideality_test(ctx, &m.target)?.lift;
    let (Some(l1), Some(l2)) = (l1, l2) else {
        return Err(Error::InvalidMorphism("both endpoints must be ideal".into()));
    };
    lift_morphism(ctx, m, &l1, &l2)
}

/// [`ideal_morphism_test`] with the endpoint lifts already known.
pub fn lift_morphism(ctx: &ContextSpec, m: &PointMorphism, l1: &IdealLift, l2: &IdealLift) -> Result<MorphismLift> {
    match ctx.direction {
        Direction::Normal => {
            // h' = sigma2⁻¹∘h∘sigma1
            let inv2 = l2.sigma.inverse().expect("bijection");
            let h_lift = l1.sigma.then(&m.h)?.then(&inv2)?;
            for name in ctx.extra_constants() {
                let c1 = l1.a_lift.constant_named(&name).expect("lifted constant");
                let c2 = l2.a_lift.constant_named(&name).expect("lifted constant");
                if h_lift.get(c1) != c2 {
                    return Ok(MorphismLift::MovesConstant {
                        name,
                        image: h_lift.get(c1),
                        expected: c2,
                    });
                }
            }
            if let Some(w) = is_homomorphism(&l1.a_lift, &l2.a_lift, &h_lift, &ConstantFlags::All)? {
                return Err(Error::Internal(format!("constant-preserving h fails to lift: {w}")));
            }
            Ok(MorphismLift::Lifted(h_lift))
        }
        Direction::Opposite => {
            let pt1 = m.source.a.constant(0);
            let pt2 = m.target.a.constant(0);
            if let Some(a) = (0..m.target.a.size()).find(|&a| a != pt2 && m.h.get(a) == pt1) {
                return Ok(MorphismLift::HitsPoint { element: a });
            }
            let inv1 = l1.sigma.inverse().expect("bijection");
            Ok(MorphismLift::Lifted(l2.sigma.then(&m.h)?.then(&inv1)?))
        }
    }
}
