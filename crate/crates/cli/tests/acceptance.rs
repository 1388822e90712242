//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::time::{Duration, Instant};

use cohact_cli::repro::{run_suite, Toolkit};
use cohact_core::closures::{mv_closure, product_closure, verify_cartesian_unit, ContextSpec};
use cohact_core::harness::{custom_bases, default_bases, hunt_counterexample, verify_context_theorems, verify_uniqueness};
use cohact_core::points::PointBounds;
use cohact_core::varieties::{builtin, hoop_to_mv, mv_to_hoop, regular_dense};
use cohact_core::{FiniteAlgebra, Result};

struct Outcome {
    passed: bool,
    /// Stable text compared across serial and parallel runs.
    verdict: String,
    summary: String,
}

fn bounds(max: usize, parallel: bool) -> PointBounds {
    PointBounds {
        parallel,
        ..PointBounds::new(max)
    }
}

fn theorems(name: &str, bases: Option<Vec<FiniteAlgebra>>, max: usize, parallel: bool) -> Result<Outcome> {
    let ctx = ContextSpec::builtin(name)?;
    let bases = match bases {
        Some(b) => b,
        None => default_bases(&ctx)?,
    };
    let r = verify_context_theorems(&ctx, &bases, &bounds(max, parallel))?;
    Ok(Outcome {
        passed: r.passed(),
        summary: format!("{name}: {} points, {} morphisms", r.points, r.morphisms),
        verdict: r.verdict_text(),
    })
}

fn criterion_1() -> Result<Outcome> {
    let suite = run_suite(&Toolkit::default());
    let text = suite.verdict_text();
    Ok(Outcome {
        passed: suite.passed(),
        summary: text.lines().last().unwrap_or_default().to_string(),
        verdict: text,
    })
}

fn criterion_2(parallel: bool) -> Result<Outcome> {
    theorems("pset", None, 5, parallel)
}

fn criterion_3(parallel: bool) -> Result<Outcome> {
    let f2 = theorems("alg:cassoc", None, 8, parallel)?;
    let f3 = theorems("alg:cassoc:3", None, 9, parallel)?;
    Ok(Outcome {
        passed: f2.passed && f3.passed,
        summary: format!("{}; {}", f2.summary, f3.summary),
        verdict: f2.verdict + &f3.verdict,
    })
}

fn closure_checks(ctx: &ContextSpec, models: &[FiniteAlgebra], check: impl Fn(&FiniteAlgebra) -> Result<Option<String>>) -> Result<(bool, String)> {
    let mut text = String::new();
    let mut ok = true;
    for (i, h) in models.iter().enumerate() {
        let unit = verify_cartesian_unit(ctx, h)?;
        let member = check(h)?;
        let good = unit.passed() && member.is_none();
        ok &= good;
        if !good {
            text.push_str(&format!("    model {i} (|H|={}): {unit:?} {member:?}\n", h.size()));
        }
    }
    Ok((ok, text))
}

fn criterion_4(parallel: bool) -> Result<Outcome> {
    let harness = theorems("mv", None, 6, parallel)?;
    let ctx = ContextSpec::builtin("mv")?;
    let whoop = builtin("whoop")?;
    let mv = builtin("mv")?;
    let mut hoops = Vec::new();
    for n in 1..=4 {
        hoops.extend(whoop.models(n, parallel)?);
    }
    let (ok, detail) = closure_checks(&ctx, &hoops, |h| {
        let r = mv_closure(h)?;
        let bottom = r.closed.constant_named("zero").expect("bounded");
        let m = hoop_to_mv(&r.closed, bottom)?;
        Ok((!mv.is_member(&m)?).then(|| "closure is not an MV-algebra".to_string()))
    })?;
    Ok(Outcome {
        passed: harness.passed && ok,
        summary: format!("{}; {} Wajsberg hoops closed", harness.summary, hoops.len()),
        verdict: format!("{}  closures of {} Wajsberg hoops: {}\n{detail}", harness.verdict, hoops.len(), if ok { "PASS" } else { "FAIL" }),
    })
}

fn criterion_5(parallel: bool) -> Result<Outcome> {
    let ctx = ContextSpec::builtin("product")?;
    let phoop = builtin("phoop")?;
    let pralg = builtin("pralg")?;
    let mut hoops = Vec::new();
    for n in 1..=4 {
        hoops.extend(phoop.models(n, parallel)?);
    }
    let (ok, detail) = closure_checks(&ctx, &hoops, |h| {
        let r = product_closure(h)?;
        Ok((!pralg.is_member(&r.closed)?).then(|| "closure is not a product algebra".to_string()))
    })?;
    let mut verdict = format!("  closures of {} product hoops: {}\n{detail}", hoops.len(), if ok { "PASS" } else { "FAIL" });
    let mut rd_ok = true;
    let (mut algebras, mut degenerate) = (0, 0);
    for n in 1..=8 {
        for a in pralg.models(n, parallel)? {
            let rd = regular_dense(&a)?;
            let coh = cohact_core::coherence::coherence_report(&ctx, &rd.point)?;
            let ideal = cohact_core::coherence::ideality_test(&ctx, &rd.point)?.ideal();
            algebras += 1;
            degenerate += usize::from(rd.degenerate);
            if !(coh.coherent() && ideal) {
                rd_ok = false;
                verdict.push_str(&format!("    regular/dense of |A|={n}: coherent {} ideal {ideal}\n", coh.coherent()));
            }
        }
    }
    verdict.push_str(&format!(
        "  regular/dense on {algebras} product algebras: {} ({degenerate} degenerate-Boolean)\n",
        if rd_ok { "PASS" } else { "FAIL" }
    ));
    Ok(Outcome {
        passed: ok && rd_ok,
        summary: format!(
            "{} product hoops closed; {algebras} product algebras split, {degenerate} degenerate-Boolean",
            hoops.len()
        ),
        verdict,
    })
}

fn criterion_6() -> Result<Outcome> {
    let mv = builtin("mv")?;
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in 1..=6 {
        for a in mv.models(n, false)? {
            let zero = a.constant_named("zero").expect("mv");
            let back = hoop_to_mv(&mv_to_hoop(&a)?, zero)?;
            checked += 1;
            if back != a {
                bad.push(format!("|A|={n}: {:?}", a.table_string()));
            }
        }
    }
    Ok(Outcome {
        passed: bad.is_empty(),
        summary: format!("{checked} MV-algebras round-tripped"),
        verdict: bad.join("\n"),
    })
}

fn criterion_7() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    let mut verdict = String::new();
    for (name, max) in [("pset", 5), ("mv", 6), ("product", 6), ("alg:cassoc", 8)] {
        let ctx = ContextSpec::builtin(name)?;
        let r = verify_uniqueness(&ctx, &default_bases(&ctx)?, &bounds(max, true))?;
        passed &= r.exceptions.is_empty();
        parts.push(format!("{name}: {} f, {} lifts", r.extensions_rederived, r.lifts_checked));
        for e in &r.exceptions {
            verdict.push_str(&format!("    {name} {e}\n"));
        }
    }
    Ok(Outcome {
        passed,
        summary: parts.join("; "),
        verdict,
    })
}

fn criterion_8() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, max) in [("pset", 5), ("mv", 6), ("product", 6), ("alg:cassoc", 8)] {
        let ctx = ContextSpec::builtin(name)?;
        let h = hunt_counterexample(&ctx, &default_bases(&ctx)?, &bounds(max, true))?;
        passed &= h.certificate.is_none();
        parts.push(format!("{name}: {}", h.points_checked));
    }
    let mut ctx = ContextSpec::builtin("mv")?;
    ctx.name = "mv-unbounded".into();
    ctx.u = builtin("whoop")?.extend("whoop0", &["zero"], &[])?;
    let h = hunt_counterexample(&ctx, &custom_bases(&ctx)?, &bounds(6, true))?;
    let revalidated = match &h.certificate {
        Some(c) => c.revalidate()?,
        None => true,
    };
    passed &= revalidated;
    parts.push(format!("mutated mv: {}", h.summary()));
    Ok(Outcome {
        passed,
        summary: parts.join("; "),
        verdict: String::new(),
    })
}

fn report(n: usize, limit: Duration, run: impl FnOnce() -> Result<Outcome>) -> Option<Outcome> {
    let start = Instant::now();
    let out = run();
    let elapsed = start.elapsed();
    match out {
        Ok(o) => {
            let in_time = elapsed <= limit;
            let ok = o.passed && in_time;
            println!(
                "criterion {n}: {} ({}; {:.1}s of {}s)",
                if ok { "PASS" } else { "FAIL" },
                o.summary,
                elapsed.as_secs_f64(),
                limit.as_secs()
            );
            if !o.passed {
                print!("{}", o.verdict);
            }
            Some(Outcome { passed: ok, ..o })
        }
        Err(e) => {
            println!("criterion {n}: FAIL (error: {e})");
            None
        }
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut all = true;
    let mut pass = |o: &Option<Outcome>| all &= o.as_ref().is_some_and(|o| o.passed);

    let c1 = report(1, secs(10), criterion_1);
    pass(&c1);
    let c2 = report(2, secs(60), || criterion_2(true));
    pass(&c2);
    let c3 = report(3, secs(600), || criterion_3(true));
    pass(&c3);
    let c4 = report(4, secs(300), || criterion_4(true));
    pass(&c4);
    let c5 = report(5, secs(120), || criterion_5(true));
    pass(&c5);
    pass(&report(6, secs(60), criterion_6));
    pass(&report(7, secs(600), criterion_7));
    pass(&report(8, secs(600), criterion_8));

    let c9 = report(9, secs(1200), || {
        let parallel = [&c2, &c3, &c4, &c5];
        let serial = [criterion_2(false)?, criterion_3(false)?, criterion_4(false)?, criterion_5(false)?];
        let mut differing = Vec::new();
        for (i, (p, s)) in parallel.iter().zip(&serial).enumerate() {
            if p.as_ref().map(|p| &p.verdict) != Some(&s.verdict) {
                differing.push(i + 2);
            }
        }
        Ok(Outcome {
            passed: differing.is_empty(),
            summary: if differing.is_empty() {
                "criteria 2-5 byte-identical serial and parallel".into()
            } else {
                format!("criteria {differing:?} differ")
            },
            verdict: String::new(),
        })
    });
    pass(&c9);

    if !all {
        std::process::exit(1);
    }
}

