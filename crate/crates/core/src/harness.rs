//! Exhaustive verification of the coherence theorems over enumerated points,
//! and the search for coherent points that are not ideal.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteAlgebra, FunctionMap};
use crate::closures::{verify_cartesian_unit, ClosureKind, ContextSpec, Direction};
use crate::coherence::{
    all_lifts, coherence_by_extension, coherence_report, ideality_test, initial_map_to, lift_classes, lift_morphism,
    CoherenceReport, ExtensionVerdict, IdealityOutcome,
};
use crate::error::{Error, Result};
use crate::instances;
use crate::points::{check_bound, enumerate_points, make_split_point, point_morphisms, v_models, PointBounds, SplitPoint};
use crate::varieties::variety_membership;

/// The bases each built-in context is verified over by default.
pub fn default_bases(ctx: &ContextSpec) -> Result<Vec<FiniteAlgebra>> {
    match ctx.closure {
        Some(ClosureKind::Maybe) => Ok((0..=3).map(instances::maybe_set).collect()),
        Some(ClosureKind::MvClosure) => Ok(vec![instances::lukasiewicz_hoop(2), instances::lukasiewicz_hoop(3)]),
        Some(ClosureKind::ProductClosure) => Ok(vec![instances::boolean_product_algebra(1)]),
        Some(ClosureKind::Unitalization { prime }) => {
            let mut out = vec![instances::prime_field(prime)];
            if prime == 2 {
                out.push(instances::prime_field_square(prime));
            }
            out.into_iter().map(|b| b.reduct(&ctx.u.signature)).collect()
        }
        None => {
            let f2 = instances::prime_field(2).reduct(&ctx.u.signature)?;
            Ok(vec![f2])
        }
    }
}

/// Everything computed about one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointAnalysis {
    pub point: SplitPoint,
    pub coherence: CoherenceReport,
    pub ideality: IdealityOutcome,
}

impl PointAnalysis {
    pub fn coherent(&self) -> bool {
        self.coherence.coherent()
    }
}

pub fn analyze_point(ctx: &ContextSpec, point: &SplitPoint) -> Result<PointAnalysis> {
    Ok(PointAnalysis {
        point: point.clone(),
        coherence: coherence_report(ctx, point)?,
        ideality: ideality_test(ctx, point)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub base: usize,
    pub point: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionResult {
    pub name: String,
    /// `false` when the assertion does not apply in this context.
    pub applicable: bool,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl AssertionResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub context: String,
    pub bases: Vec<String>,
    pub max_size: usize,
    pub points: usize,
    pub coherent: usize,
    pub ideal: usize,
    pub morphisms: usize,
    pub assertions: Vec<AssertionResult>,
    pub violation_points: Vec<SplitPoint>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(AssertionResult::passed)
    }

    /// A plain-text rendering that contains no timing and is stable across runs.
    pub fn verdict_text(&self) -> String {
        let mut out = format!(
            "context {} | bases {} | max |A| {} | points {} | coherent {} | ideal {} | morphisms {}\n",
            self.context,
            self.bases.join(", "),
            self.max_size,
            self.points,
            self.coherent,
            self.ideal,
            self.morphisms
        );
        for a in &self.assertions {
            let status = if !a.applicable {
                "n/a"
            } else if a.passed() {
                "PASS"
            } else {
                "FAIL"
            };
            out.push_str(&format!("  {status} {} (checked {})\n", a.name, a.checked));
            for v in &a.violations {
                out.push_str(&format!("    base {} point {}: {}\n", v.base, v.point, v.detail));
            }
        }
        out
    }
}

fn describe_base(b: &FiniteAlgebra) -> String {
    format!("|B|={} {:?}", b.size(), b.table_string())
}

/// Runs assertions (a) ideal ⇒ coherent, (b) criterion ⇔ extension,
/// (c) coherent ⇔ ideal, (d) morphisms between coherent points lift.
pub fn verify_context_theorems(ctx: &ContextSpec, bases: &[FiniteAlgebra], bounds: &PointBounds) -> Result<TheoremReport> {
    check_bound(ctx, bounds)?;
    let mut per_base: Vec<Vec<PointAnalysis>> = Vec::new();
    for b in bases {
        let points = enumerate_points(ctx, b, bounds)?;
        let analyses: Vec<PointAnalysis> = if bounds.parallel {
            points.par_iter().map(|p| analyze_point(ctx, p)).collect::<Result<_>>()?
        } else {
            points.iter().map(|p| analyze_point(ctx, p)).collect::<Result<_>>()?
        };
        per_base.push(analyses);
    }
    let has_ext = ctx.closure.is_some();
    let has_crit = ctx.criterion.is_some();
    let mut a = AssertionResult {
        name: "(a) ideal implies coherent by extension".into(),
        applicable: has_ext,
        checked: 0,
        violations: Vec::new(),
    };
    let mut b_ = AssertionResult {
        name: "(b) criterion agrees with extension".into(),
        applicable: has_ext && has_crit,
        checked: 0,
        violations: Vec::new(),
    };
    let mut c = AssertionResult {
        name: "(c) coherent iff ideal".into(),
        applicable: true,
        checked: 0,
        violations: Vec::new(),
    };
    let mut d = AssertionResult {
        name: "(d) morphisms between coherent points lift".into(),
        applicable: true,
        checked: 0,
        violations: Vec::new(),
    };
    let mut violation_points = Vec::new();
    let (mut points, mut coherent, mut ideal) = (0, 0, 0);
    for (bi, analyses) in per_base.iter().enumerate() {
        for (pi, an) in analyses.iter().enumerate() {
            points += 1;
            let coh = an.coherent();
            let idl = an.ideality.ideal();
            coherent += usize::from(coh);
            ideal += usize::from(idl);
            let mut bad = false;
            if let Some(ext) = &an.coherence.by_extension {
                a.checked += 1;
                if idl && !ext.coherent() {
                    a.violations.push(Violation {
                        base: bi,
                        point: pi,
                        detail: "ideal point without an extension".into(),
                    });
                    bad = true;
                }
            }
            if let Some(agree) = an.coherence.agreement {
                b_.checked += 1;
                if !agree {
                    b_.violations.push(Violation {
                        base: bi,
                        point: pi,
                        detail: format!(
                            "criterion says {:?}, extension says {}",
                            an.coherence.by_criterion.as_ref().map(|v| &v.detail),
                            an.coherence.by_extension.as_ref().is_some_and(ExtensionVerdict::coherent)
                        ),
                    });
                    bad = true;
                }
            }
            c.checked += 1;
            if coh != idl {
                c.violations.push(Violation {
                    base: bi,
                    point: pi,
                    detail: format!("coherent {coh}, ideal {idl}: {:?}", an.ideality.trace),
                });
                bad = true;
            }
            if bad {
                violation_points.push(an.point.clone());
            }
        }
    }
    // (d): ordered pairs of coherent and ideal points over the same base
    let mut morphisms = 0;
    for (bi, analyses) in per_base.iter().enumerate() {
        let good: Vec<(usize, &PointAnalysis)> = analyses
            .iter()
            .enumerate()
            .filter(|(_, an)| an.coherent() && an.ideality.ideal())
            .collect();
        let pairs: Vec<(usize, usize)> = (0..good.len()).flat_map(|i| (0..good.len()).map(move |j| (i, j))).collect();
        let check = |&(i, j): &(usize, usize)| -> Result<(usize, Vec<Violation>)> {
            let (pi, p1) = good[i];
            let (_, p2) = good[j];
            let l1 = p1.ideality.lift.as_ref().expect("ideal");
            let l2 = p2.ideality.lift.as_ref().expect("ideal");
            let ms = point_morphisms(ctx, &p1.point, &p2.point)?;
            let mut v = Vec::new();
            for m in &ms {
                let r = lift_morphism(ctx, m, l1, l2)?;
                if !r.lifted() {
                    v.push(Violation {
                        base: bi,
                        point: pi,
                        detail: format!("morphism {} to point {} does not lift: {r:?}", m.h, good[j].0),
                    });
                }
            }
            Ok((ms.len(), v))
        };
        let results: Vec<(usize, Vec<Violation>)> = if bounds.parallel {
            pairs.par_iter().map(check).collect::<Result<_>>()?
        } else {
            pairs.iter().map(check).collect::<Result<_>>()?
        };
        for (count, v) in results {
            morphisms += count;
            d.checked += count;
            d.violations.extend(v);
        }
    }
    Ok(TheoremReport {
        context: ctx.name.clone(),
        bases: bases.iter().map(describe_base).collect(),
        max_size: bounds.max_size,
        points,
        coherent,
        ideal,
        morphisms,
        assertions: vec![a, b_, c, d],
        violation_points,
    })
}

/// Uniqueness checks on every enumerated point: re-deriving `f` gives the same
/// table, and every ideal point has exactly one lift up to isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub extensions_rederived: usize,
    pub lifts_checked: usize,
    pub exceptions: Vec<String>,
}

pub fn verify_uniqueness(ctx: &ContextSpec, bases: &[FiniteAlgebra], bounds: &PointBounds) -> Result<UniquenessReport> {
    let mut report = UniquenessReport {
        extensions_rederived: 0,
        lifts_checked: 0,
        exceptions: Vec::new(),
    };
    for (bi, b) in bases.iter().enumerate() {
        for (pi, point) in enumerate_points(ctx, b, bounds)?.iter().enumerate() {
            if ctx.closure.is_some() {
                let first = coherence_by_extension(ctx, point)?;
                if first.coherent() {
                    let again = coherence_by_extension(ctx, point)?;
                    report.extensions_rederived += 1;
                    if again != first {
                        report.exceptions.push(format!("base {bi} point {pi}: f differs on re-derivation"));
                    }
                }
            }
            if ideality_test(ctx, point)?.ideal() {
                let lifts = all_lifts(ctx, point)?;
                report.lifts_checked += 1;
                let classes = lift_classes(&lifts, ctx.direction)?;
                if classes != 1 {
                    report
                        .exceptions
                        .push(format!("base {bi} point {pi}: {} lifts in {classes} classes", lifts.len()));
                }
            }
        }
    }
    Ok(report)
}

/// A coherent point with no ideal lift, with everything needed to re-check it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleCertificate {
    pub context: ContextSpec,
    pub point: SplitPoint,
    pub f: FunctionMap,
    pub ideality_trace: Vec<String>,
}

impl CounterexampleCertificate {
    /// Re-runs both tests from the raw data and compares with the record.
    pub fn revalidate(&self) -> Result<bool> {
        let ctx = &self.context;
        let p = &self.point;
        let point = make_split_point(ctx, &p.b, &p.a, p.p.clone(), p.s.clone())?;
        let ext = coherence_by_extension(ctx, &point)?;
        let ideal = ideality_test(ctx, &point)?;
        Ok(ext.map() == Some(&self.f) && !ideal.ideal() && ideal.trace == self.ideality_trace)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuntOutcome {
    pub context: String,
    pub max_size: usize,
    pub points_checked: usize,
    pub probes: Vec<String>,
    pub skipped_bases: Vec<String>,
    pub certificate: Option<CounterexampleCertificate>,
}

impl HuntOutcome {
    pub fn summary(&self) -> String {
        match &self.certificate {
            Some(_) => format!(
                "counterexample found in `{}`: a coherent point that is not ideal",
                self.context
            ),
            None => format!(
                "no counterexample within bounds (|A| <= {}, {} points checked)",
                self.max_size, self.points_checked
            ),
        }
    }
}

/// Sizes used for validation probes.
const PROBE_SIZES: std::ops::RangeInclusive<usize> = 1..=3;

/// Checks that U-algebras are V-algebras and that the unit is cartesian on small V-algebras.
pub fn validate_context(ctx: &ContextSpec) -> Result<Vec<String>> {
    let mut notes = Vec::new();
    let mut u_pool = 0;
    let mut v_pool = 0;
    for n in PROBE_SIZES {
        for b in ctx.u.models(n, false)? {
            u_pool += 1;
            let reduct = b.reduct(&ctx.v.signature)?;
            let r = variety_membership(&reduct, &ctx.v)?;
            if let Some((id, v)) = r.first_failure() {
                return Err(Error::InvalidContext(format!(
                    "a U-algebra of size {n} is not in V: {id} fails ({v})"
                )));
            }
        }
        for x in v_models(ctx, n, false)? {
            v_pool += 1;
            if ctx.closure.is_some() {
                if let crate::closures::CartesianVerdict::Fail(why) = verify_cartesian_unit(ctx, &x)? {
                    return Err(Error::InvalidContext(format!("unit is not cartesian at size {n}: {why}")));
                }
            }
        }
    }
    notes.push(format!("U-algebras of size <= 3 lie in V ({u_pool} checked)"));
    notes.push(format!("unit is cartesian on V-algebras of size <= 3 ({v_pool} checked)"));
    Ok(notes)
}

/// Default bases for a custom context: all U-algebras of size at most 2.
pub fn custom_bases(ctx: &ContextSpec) -> Result<Vec<FiniteAlgebra>> {
    let mut out = Vec::new();
    for n in 1..=2 {
        out.extend(ctx.u.models(n, false)?);
    }
    if ctx.direction == Direction::Opposite {
        out.retain(|b| b.constants().first() == Some(&(b.size() - 1)));
    }
    Ok(out)
}

/// Looks for a point that is coherent by extension but not ideal.
pub fn hunt_counterexample(ctx: &ContextSpec, bases: &[FiniteAlgebra], bounds: &PointBounds) -> Result<HuntOutcome> {
    if ctx.closure.is_none() {
        return Err(Error::ClosureUnavailable(ctx.name.clone()));
    }
    let probes = validate_context(ctx)?;
    let mut outcome = HuntOutcome {
        context: ctx.name.clone(),
        max_size: bounds.max_size,
        points_checked: 0,
        probes,
        skipped_bases: Vec::new(),
        certificate: None,
    };
    if bounds.max_size == 0 {
        return Ok(outcome);
    }
    check_bound(ctx, bounds)?;
    for b in bases {
        if let Err(e) = initial_map_to(ctx, b) {
            outcome.skipped_bases.push(format!("{}: {e}", describe_base(b)));
            continue;
        }
        let points = enumerate_points(ctx, b, bounds)?;
        let test = |p: &SplitPoint| -> Result<Option<CounterexampleCertificate>> {
            let ext = coherence_by_extension(ctx, p)?;
            let Some(f) = ext.map() else { return Ok(None) };
            let ideal = ideality_test(ctx, p)?;
            if ideal.ideal() {
                return Ok(None);
            }
            Ok(Some(CounterexampleCertificate {
                context: ctx.clone(),
                point: p.clone(),
                f: f.clone(),
                ideality_trace: ideal.trace,
            }))
        };
        let found: Vec<Option<CounterexampleCertificate>> = if bounds.parallel {
            points.par_iter().map(test).collect::<Result<_>>()?
        } else {
            points.iter().map(test).collect::<Result<_>>()?
        };
        outcome.points_checked += points.len();
        if let Some(cert) = found.into_iter().flatten().next() {
            outcome.certificate = Some(cert);
            return Ok(outcome);
        }
    }
    Ok(outcome)
}
