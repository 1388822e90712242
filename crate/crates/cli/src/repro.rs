//! The worked examples, replayed and compared with their stated outcomes.
//!
//! The constructions the examples lean on are taken from a [`Toolkit`] so a
//! test can swap in a broken one and watch the right item fail.

use std::sync::Arc;

use cohact_core::closures::{unitalize, ClosureResult, ContextSpec};
use cohact_core::coherence::{
    coherence_by_criterion, coherence_by_extension, ideality_test, ExtensionFailure, ExtensionVerdict,
};
use cohact_core::instances;
use cohact_core::linear::decode;
use cohact_core::points::{kernel_object, make_split_point, SplitPoint};
use cohact_core::varieties::{hoop_to_mv, regular_dense};
use cohact_core::{Elem, FiniteAlgebra, FunctionMap};
use serde::{Deserialize, Serialize};

/// Constructions the suite depends on.
#[derive(Clone, Copy)]
pub struct Toolkit {
    /// `F_p ⋉ X` with its unit and comparison maps.
    pub unitalize: fn(&FiniteAlgebra, usize) -> cohact_core::Result<ClosureResult>,
    /// The `n`-element Łukasiewicz chain as a bounded Wajsberg hoop.
    pub mv_chain: fn(usize) -> FiniteAlgebra,
}

impl Default for Toolkit {
    fn default() -> Self {
        Toolkit {
            unitalize,
            mv_chain: instances::lukasiewicz_hoop,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproItem {
    pub index: usize,
    pub name: String,
    pub expected: String,
    pub passed: bool,
    pub notes: Vec<String>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub items: Vec<ReproItem>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn first_failure(&self) -> Option<&ReproItem> {
        self.items.iter().find(|i| !i.passed)
    }

    pub fn verdict_text(&self) -> String {
        let mut out = String::new();
        let total = self.items.len();
        for item in &self.items {
            let status = if item.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{}/{total}] {status} {}: {}\n", item.index, item.name, item.expected));
            for n in &item.notes {
                out.push_str(&format!("    {n}\n"));
            }
            for f in &item.failures {
                out.push_str(&format!("    MISMATCH {f}\n"));
            }
        }
        let passed = self.items.iter().filter(|i| i.passed).count();
        out.push_str(&format!(
            "{} {passed}/{total}\n",
            if passed == total { "PASS" } else { "FAIL" }
        ));
        out
    }
}

struct Item {
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Item {
    fn new() -> Self {
        Item {
            notes: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }
}

type Step = fn(&Toolkit, &mut Item) -> cohact_core::Result<()>;

const ITEMS: [(&str, &str, Step); 7] = [
    ("F² with diagonal section", "coherent, f(α,x) = s(α·1) + k(x)", f2_diagonal),
    ("F² with first injection", "not coherent, i₁(1) = (1,0) ≠ (1,1)", f2_injection),
    ("UT₂(F₂) over upper-left scalars", "not coherent, f fails on the stated product", ut2),
    ("MV A×A with diagonal section", "coherent, f((1,a),0) = (0,¬a)", mv_diagonal),
    ("MV A×A with section a ↦ (a,1)", "not coherent, (1,y) against (1,x⊕y)", mv_shifted),
    ("product algebra regular/dense split", "coherent, s(0) = 0", regular_dense_item),
    ("pointed sets {a,*} over {*}", "not coherent, no map {*} → ∅", pset_item),
];

pub fn run_suite(tk: &Toolkit) -> SuiteReport {
    let items = ITEMS
        .iter()
        .enumerate()
        .map(|(i, (name, expected, step))| {
            let mut item = Item::new();
            if let Err(e) = step(tk, &mut item) {
                item.failures.push(format!("error: {e}"));
            }
            ReproItem {
                index: i + 1,
                name: name.to_string(),
                expected: expected.to_string(),
                passed: item.failures.is_empty(),
                notes: item.notes,
                failures: item.failures,
            }
        })
        .collect();
    SuiteReport { items }
}

fn ctx(name: &str) -> cohact_core::Result<ContextSpec> {
    ContextSpec::builtin(name)
}

fn map(dom: usize, cod: usize, table: Vec<Elem>) -> cohact_core::Result<FunctionMap> {
    FunctionMap::new(dom, cod, table)
}

fn f2_square_point(c: &ContextSpec, section: [Elem; 2]) -> cohact_core::Result<SplitPoint> {
    let b = instances::prime_field(2).reduct(&c.u.signature)?;
    let a = instances::prime_field_square(2).reduct(&c.v.signature)?;
    make_split_point(c, &b, &a, map(4, 2, (0..4).map(|x| x / 2).collect())?, map(2, 4, section.to_vec())?)
}

/// `F_p ⋉ X` straight from `(α,x)(β,y) = (αβ, αy + βx + xy)`, laid out at `α|X| + x`.
fn expected_unitalization(x: &FiniteAlgebra, p: usize) -> cohact_core::Result<FiniteAlgebra> {
    let n = x.size();
    let sig = Arc::new(x.signature().with_constants(&["one"])?);
    let scale = |c: usize, e: Elem| x.call(&format!("scale{}", c % p), &[e]);
    let add = |a: Elem, b: Elem| x.call("add", &[a, b]);
    FiniteAlgebra::from_fn(
        sig.clone(),
        p * n,
        |op, args| {
            let (a, u) = (args[0] / n, args[0] % n);
            let name = sig.ops()[op].name.as_str();
            let (alpha, v) = match name {
                "add" => {
                    let (b, w) = (args[1] / n, args[1] % n);
                    ((a + b) % p, add(u, w))
                }
                "mul" => {
                    let (b, w) = (args[1] / n, args[1] % n);
                    (a * b % p, add(add(scale(a, w), scale(b, u)), x.call("mul", &[u, w])))
                }
                "neg" => ((p - a) % p, x.call("neg", &[u])),
                s => {
                    let c: usize = s.trim_start_matches("scale").parse().expect("scale op");
                    (c * a % p, scale(c, u))
                }
            };
            alpha * n + v
        },
        sig.constants()
            .iter()
            .map(|c| if c == "one" { n + x.constant_named("zero").expect("zero") } else { x.constant_named(c).expect("constant") })
            .collect(),
    )
}

fn table_diff(expected: &FiniteAlgebra, got: &FiniteAlgebra) -> Vec<String> {
    if expected.signature() != got.signature() || expected.size() != got.size() {
        return vec![format!(
            "closure has signature {} and size {}, expected {} and {}",
            got.signature(),
            got.size(),
            expected.signature(),
            expected.size()
        )];
    }
    let mut out = Vec::new();
    let n = expected.size();
    for (i, op) in expected.signature().ops().iter().enumerate() {
        for (idx, (e, g)) in expected.table(i).iter().zip(got.table(i)).enumerate() {
            if e != g {
                let args: Vec<String> = decode(idx, n, op.arity).iter().map(usize::to_string).collect();
                out.push(format!("{}({}) expected {e} got {g}", op.name, args.join(",")));
            }
        }
    }
    for (c, (e, g)) in expected.signature().constants().iter().zip(expected.constants().iter().zip(got.constants())) {
        if e != g {
            out.push(format!("constant {c} expected {e} got {g}"));
        }
    }
    out
}

fn f2_diagonal(tk: &Toolkit, it: &mut Item) -> cohact_core::Result<()> {
    let c = ctx("alg:cassoc")?;
    let point = f2_square_point(&c, [0, 3])?;
    let crit = coherence_by_criterion(&c, &point)?;
    it.expect(crit.coherent, format!("criterion: {}", crit.detail));
    it.note(format!("criterion: {}", crit.detail));

    let ext = kernel_object(&c, &point)?;
    let closed = (tk.unitalize)(&ext.x, 2)?.closed;
    let diff = table_diff(&expected_unitalization(&ext.x, 2)?, &closed);
    it.expect(diff.is_empty(), format!("F₂ ⋉ X table differs: {}", diff.join("; ")));

    match coherence_by_extension(&c, &point)? {
        ExtensionVerdict::Present { f } => {
            let n = ext.x.size();
            for alpha in 0..2 {
                for x in 0..n {
                    let want = point.a.call("add", &[point.s.get(alpha), ext.k.get(x)]);
                    it.expect(
                        f.get(alpha * n + x) == want,
                        format!("f({alpha},{x}) = {} but s(α·1)+k(x) = {want}", f.get(alpha * n + x)),
                    );
                }
            }
            it.note(format!("f = {f}"));
        }
        ExtensionVerdict::Absent(w) => it.expect(false, format!("no extension: {w:?}")),
    }
    it.expect(ideality_test(&c, &point)?.ideal(), "no ideal lift");
    Ok(())
}

fn f2_injection(_: &Toolkit, it: &mut Item) -> cohact_core::Result<()> {
    let c = ctx("alg:cassoc")?;
    let point = f2_square_point(&c, [0, 2])?;
    let crit = coherence_by_criterion(&c, &point)?;
    it.expect(!crit.coherent && crit.witness == Some(2), format!("criterion: {}", crit.detail));
    it.note(format!("criterion: {}", crit.detail));
    let ext = coherence_by_extension(&c, &point)?;
    it.expect(!ext.coherent(), "an extension exists");
    if let ExtensionVerdict::Absent(ExtensionFailure::Conflict(w)) = &ext {
        it.note(format!("extension: {w}"));
    }
    Ok(())
}

fn ut2(tk: &Toolkit, it: &mut Item) -> cohact_core::Result<()> {
    let c = ctx("alg:assoc")?;
    let b = instances::prime_field(2).reduct(&c.u.signature)?;
    let a = instances::ut2_f2();
    let point = make_split_point(&c, &b, &a, map(8, 2, (0..8).map(|x| x / 4).collect())?, map(2, 8, vec![0, 4])?)?;
    let crit = coherence_by_criterion(&c, &point)?;
    it.expect(!crit.coherent && crit.witness == Some(4), format!("criterion: {}", crit.detail));
    it.note(format!("criterion: {}", crit.detail));
    let verdict = coherence_by_extension(&c, &point)?;
    it.expect(!verdict.coherent(), "an extension exists");
    if let ExtensionVerdict::Absent(ExtensionFailure::Conflict(w)) = &verdict {
        it.note(format!("extension: {w}"));
    }

    // X = {[[0,b],[0,c]]} sits at 2b + c, and F ⋉ X at 4α + x
    let ext = kernel_object(&c, &point)?;
    let fx = (tk.unitalize)(&ext.x, 2)?.closed;
    let f = |e: Elem| 4 * (e / 4) + ext.k.get(e % 4);
    let (u, v) = (3, 6);
    let lhs = a.call("mul", &[f(u), f(v)]);
    let rhs = f(fx.call("mul", &[u, v]));
    let shown = |e: Elem| {
        let d = decode(e, 2, 3);
        format!("[[{},{}],[0,{}]]", d[0], d[1], d[2])
    };
    it.expect(lhs == 0, format!("f(u)·f(v) = {} instead of the zero matrix", shown(lhs)));
    it.expect(rhs == 3, format!("f(u·v) = {} instead of [[0,1],[0,1]]", shown(rhs)));
    it.note(format!(
        "u = (0,[[0,1],[0,1]]), v = (1,[[0,1],[0,0]]): f(u)·f(v) = {} while f(u·v) = {}",
        shown(lhs),
        shown(rhs)
    ));
    Ok(())
}

fn mv_square(tk: &Toolkit, shifted: bool) -> cohact_core::Result<(ContextSpec, SplitPoint)> {
    let c = ctx("mv")?;
    let b = (tk.mv_chain)(3);
    let h = instances::as_whoop(&b);
    let a = h.product(&h)?;
    let s = (0..3).map(|x| 3 * x + if shifted { 2 } else { x }).collect();
    let point = make_split_point(&c, &b, &a, map(9, 3, (0..9).map(|x| x / 3).collect())?, map(3, 9, s)?)?;
    Ok((c, point))
}

fn mv_diagonal(tk: &Toolkit, it: &mut Item) -> cohact_core::Result<()> {
    let (c, point) = mv_square(tk, false)?;
    let crit = coherence_by_criterion(&c, &point)?;
    it.expect(crit.coherent, format!("criterion: {}", crit.detail));
    it.note(format!("criterion: {}", crit.detail));
    let mv = hoop_to_mv(&(tk.mv_chain)(3), 0)?;
    match coherence_by_extension(&c, &point)? {
        ExtensionVerdict::Present { f } => {
            // M(X) holds (x,1) at x and (x,0) at 3 + x; X = {(1,a)} with (1,a) at 6 + a
            for x in 0..3 {
                let one_a = 6 + x;
                it.expect(f.get(x) == one_a, format!("f((1,{x}),1) = {} not (1,{x})", f.get(x)));
                let want = mv.call("neg", &[x]);
                let via_imp = point.a.call("imp", &[one_a, 0]);
                it.expect(
                    f.get(3 + x) == want && via_imp == want,
                    format!("f((1,{x}),0) = {}, (1,{x})→(0,0) = {via_imp}, (0,¬{x}) = {want}", f.get(3 + x)),
                );
            }
            it.note(format!("f = {f}"));
        }
        ExtensionVerdict::Absent(w) => it.expect(false, format!("no extension: {w:?}")),
    }
    Ok(())
}

fn mv_shifted(tk: &Toolkit, it: &mut Item) -> cohact_core::Result<()> {
    let (c, point) = mv_square(tk, true)?;
    let crit = coherence_by_criterion(&c, &point)?;
    it.expect(!crit.coherent && crit.witness == Some(2), format!("criterion: {}", crit.detail));
    it.note(format!("criterion: {}; s′(0) = (0,1) ≠ (0,0)", crit.detail));
    it.expect(!coherence_by_extension(&c, &point)?.coherent(), "an extension exists");

    // the set map f(a,1) = (1,a), f(a,0) = (1,a)→(0,1) on M(X)
    let ext = kernel_object(&c, &point)?;
    let m = c.closure(&ext.x)?.closed;
    let mv = hoop_to_mv(&(tk.mv_chain)(3), 0)?;
    let f = |e: Elem| {
        let k = ext.k.get(e % 3);
        if e < 3 {
            k
        } else {
            point.a.call("imp", &[k, 2])
        }
    };
    let mut broken = None;
    for x in 0..3 {
        for y in 0..3 {
            let lhs = point.a.call("imp", &[f(3 + x), f(y)]);
            let rhs = f(m.call("imp", &[3 + x, y]));
            let sum = mv.call("oplus", &[x, y]);
            it.expect(lhs == 6 + y, format!("f(({x},0))→f(({y},1)) = {lhs}, not (1,{y})"));
            it.expect(rhs == 6 + sum, format!("f(({x},0)→({y},1)) = {rhs}, not (1,{x}⊕{y})"));
            if lhs != rhs && broken.is_none() {
                broken = Some((x, y));
            }
        }
    }
    match broken {
        Some((x, y)) => it.note(format!(
            "x = {x}, y = {y}: f(x,0)→f(y,1) = (1,{y}) while f((x,0)→(y,1)) = (1,{})",
            mv.call("oplus", &[x, y])
        )),
        None => it.expect(false, "the set map preserves →"),
    }
    Ok(())
}

fn regular_dense_item(_: &Toolkit, it: &mut Item) -> cohact_core::Result<()> {
    let c = ctx("product")?;
    let a = instances::boolean_product_algebra(2);
    let rd = regular_dense(&a)?;
    let crit = coherence_by_criterion(&c, &rd.point)?;
    it.expect(crit.coherent, format!("criterion: {}", crit.detail));
    it.note(format!("criterion: {}", crit.detail));
    it.expect(coherence_by_extension(&c, &rd.point)?.coherent(), "no extension");
    it.expect(ideality_test(&c, &rd.point)?.ideal(), "no ideal lift");
    let ext = kernel_object(&c, &rd.point)?;
    it.expect(ext.k.image() == rd.dense, "kernel is not D(A)");
    if rd.degenerate {
        it.note("degenerate: every finite product algebra is Boolean, so B(A) = A and D(A) = {1}");
    }
    Ok(())
}

fn pset_item(_: &Toolkit, it: &mut Item) -> cohact_core::Result<()> {
    let c = ctx("pset")?;
    let b = instances::maybe_set(0);
    let a = instances::pointed_set(2);
    let point = make_split_point(&c, &b, &a, map(1, 2, vec![0])?, map(2, 1, vec![0, 0])?)?;
    let crit = coherence_by_criterion(&c, &point)?;
    it.expect(!crit.coherent && crit.witness == Some(1), format!("criterion: {}", crit.detail));
    it.note(format!("criterion: {}", crit.detail));
    match coherence_by_extension(&c, &point)? {
        ExtensionVerdict::Absent(ExtensionFailure::OutsidePoint { element, .. }) => {
            it.expect(element == 1, format!("obstruction at {element}, not a"));
        }
        other => it.expect(false, format!("extension: {other:?}")),
    }
    let ideal = ideality_test(&c, &point)?;
    it.expect(!ideal.ideal(), "an ideal lift exists");
    let empty = ideal.trace.iter().any(|t| t.contains("B is empty"));
    it.expect(empty, format!("trace does not name the empty codomain: {:?}", ideal.trace));
    for t in &ideal.trace {
        it.note(format!("ideality: {t}"));
    }
    Ok(())
}
