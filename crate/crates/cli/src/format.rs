//! Text formats: algebra files, point files and custom context files.
//!
//! All three are JSON. An algebra file looks like
//!
//! ```json
//! {
//!   "signature": {"ops": [{"name": "oplus", "arity": 2}, {"name": "neg", "arity": 1}], "constants": ["zero"]},
//!   "size": 2,
//!   "tables": {
//!     "neg": [1, 0],
//!     "oplus": [
//!       [0, 1],
//!       [1, 1]
//!     ]
//!   },
//!   "constants": {"zero": 0},
//!   "labels": ["0", "1"]
//! }
//! ```
//!
//! A table of arity `k` is nested `k` deep, first argument outermost. Labels
//! are optional and only used for display.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cohact_core::closures::{ContextSpec, Criterion};
use cohact_core::points::{make_split_point, SplitPoint};
use cohact_core::term::Identity;
use cohact_core::varieties::{builtin, VarietySpec};
use cohact_core::{FiniteAlgebra, FunctionMap, Signature};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: syntax error at line {line}, column {column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Shape { path: String, message: String },
    #[error("{path}: {source}")]
    Core {
        path: String,
        source: cohact_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpDecl {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureBlock {
    #[serde(default)]
    pub ops: Vec<OpDecl>,
    #[serde(default)]
    pub constants: Vec<String>,
}

impl SignatureBlock {
    fn of(sig: &Signature) -> Self {
        SignatureBlock {
            ops: sig
                .ops()
                .iter()
                .map(|o| OpDecl {
                    name: o.name.clone(),
                    arity: o.arity,
                })
                .collect(),
            constants: sig.constants().to_vec(),
        }
    }

    fn build(&self) -> cohact_core::Result<Signature> {
        Signature::new(self.ops.iter().map(|o| (o.name.clone(), o.arity)), self.constants.clone())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    signature: SignatureBlock,
    size: usize,
    #[serde(default)]
    tables: BTreeMap<String, Value>,
    #[serde(default)]
    constants: BTreeMap<String, usize>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// A parsed algebra file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraFile {
    pub algebra: FiniteAlgebra,
    pub labels: Option<Vec<String>>,
}

fn syntax(path: &str, e: serde_json::Error) -> FormatError {
    FormatError::Syntax {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn shape(path: &str, message: impl Into<String>) -> FormatError {
    FormatError::Shape {
        path: path.to_string(),
        message: message.into(),
    }
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses an algebra document; `origin` names it in error messages.
pub fn parse_algebra(text: &str, origin: &str) -> Result<AlgebraFile, FormatError> {
    let raw: RawAlgebra = serde_json::from_str(text).map_err(|e| syntax(origin, e))?;
    algebra_from_raw(raw, origin)
}

fn algebra_from_value(v: Value, origin: &str) -> Result<AlgebraFile, FormatError> {
    let raw: RawAlgebra = serde_json::from_value(v).map_err(|e| shape(origin, e.to_string()))?;
    algebra_from_raw(raw, origin)
}

fn algebra_from_raw(raw: RawAlgebra, origin: &str) -> Result<AlgebraFile, FormatError> {
    let core = |source| FormatError::Core {
        path: origin.to_string(),
        source,
    };
    let sig = Arc::new(raw.signature.build().map_err(core)?);
    let n = raw.size;
    if n == 0 {
        return Err(shape(origin, "size must be at least 1"));
    }
    let mut tables = Vec::new();
    for op in sig.ops() {
        let value = raw
            .tables
            .get(&op.name)
            .ok_or_else(|| shape(origin, format!("missing table for `{}`", op.name)))?;
        let mut flat = Vec::with_capacity(n.pow(op.arity as u32));
        flatten(value, op.arity, n, &op.name, &mut Vec::new(), &mut flat).map_err(|m| shape(origin, m))?;
        tables.push(flat);
    }
    if let Some(extra) = raw.tables.keys().find(|k| sig.op_index(k).is_none()) {
        return Err(shape(origin, format!("table for undeclared operation `{extra}`")));
    }
    let mut constants = Vec::new();
    for c in sig.constants() {
        let v = raw
            .constants
            .get(c)
            .ok_or_else(|| shape(origin, format!("missing value for constant `{c}`")))?;
        constants.push(*v);
    }
    if let Some(extra) = raw.constants.keys().find(|k| sig.constant_index(k).is_none()) {
        return Err(shape(origin, format!("value for undeclared constant `{extra}`")));
    }
    if let Some(labels) = &raw.labels {
        if labels.len() != n {
            return Err(shape(origin, format!("{} labels for {n} elements", labels.len())));
        }
    }
    let algebra = FiniteAlgebra::new(sig, n, tables, constants).map_err(core)?;
    Ok(AlgebraFile {
        algebra,
        labels: raw.labels,
    })
}

fn row_name(op: &str, prefix: &[usize]) -> String {
    if prefix.is_empty() {
        format!("table `{op}`")
    } else {
        let idx: Vec<String> = prefix.iter().map(usize::to_string).collect();
        format!("table `{op}` row [{}]", idx.join("]["))
    }
}

fn flatten(
    v: &Value,
    depth: usize,
    n: usize,
    op: &str,
    prefix: &mut Vec<usize>,
    out: &mut Vec<usize>,
) -> Result<(), String> {
    let items = v
        .as_array()
        .ok_or_else(|| format!("{} is not an array", row_name(op, prefix)))?;
    if items.len() != n {
        return Err(format!("{} has {} entries, expected {n}", row_name(op, prefix), items.len()));
    }
    for (i, item) in items.iter().enumerate() {
        if depth == 1 {
            let e = item
                .as_u64()
                .ok_or_else(|| format!("{} entry {i} is not an element index", row_name(op, prefix)))?
                as usize;
            if e >= n {
                return Err(format!("{} entry {i} is {e}, outside the carrier of size {n}", row_name(op, prefix)));
            }
            out.push(e);
        } else {
            prefix.push(i);
            flatten(item, depth - 1, n, op, prefix, out)?;
            prefix.pop();
        }
    }
    Ok(())
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

fn nested(table: &[usize], n: usize, depth: usize, indent: usize) -> String {
    if depth == 1 {
        let items: Vec<String> = table.iter().map(usize::to_string).collect();
        return format!("[{}]", items.join(", "));
    }
    let step = table.len() / n;
    let pad = " ".repeat(indent + 2);
    let rows: Vec<String> = table
        .chunks(step)
        .map(|c| format!("{pad}{}", nested(c, n, depth - 1, indent + 2)))
        .collect();
    format!("[\n{}\n{}]", rows.join(",\n"), " ".repeat(indent))
}

/// Canonical text of an algebra file: sorted tables, one row per line.
pub fn emit_algebra(alg: &FiniteAlgebra, labels: Option<&[String]>) -> String {
    let sig = alg.signature();
    let block = SignatureBlock::of(sig);
    let ops: Vec<String> = block
        .ops
        .iter()
        .map(|o| format!("{{\"name\": {}, \"arity\": {}}}", json_str(&o.name), o.arity))
        .collect();
    let consts: Vec<String> = block.constants.iter().map(|c| json_str(c)).collect();
    let mut out = String::from("{\n");
    out.push_str(&format!(
        "  \"signature\": {{\"ops\": [{}], \"constants\": [{}]}},\n",
        ops.join(", "),
        consts.join(", ")
    ));
    out.push_str(&format!("  \"size\": {},\n", alg.size()));
    let mut by_name: Vec<(usize, &str)> = sig.ops().iter().enumerate().map(|(i, o)| (i, o.name.as_str())).collect();
    by_name.sort_by_key(|(_, name)| *name);
    let tables: Vec<String> = by_name
        .iter()
        .map(|&(i, name)| format!("    {}: {}", json_str(name), nested(alg.table(i), alg.size(), sig.arity(i), 4)))
        .collect();
    if tables.is_empty() {
        out.push_str("  \"tables\": {},\n");
    } else {
        out.push_str(&format!("  \"tables\": {{\n{}\n  }},\n", tables.join(",\n")));
    }
    let mut cvals: Vec<(&String, usize)> = sig.constants().iter().zip(alg.constants().iter().copied()).collect();
    cvals.sort();
    let cvals: Vec<String> = cvals.iter().map(|(c, v)| format!("{}: {v}", json_str(c))).collect();
    out.push_str(&format!("  \"constants\": {{{}}}", cvals.join(", ")));
    if let Some(labels) = labels {
        let ls: Vec<String> = labels.iter().map(|l| json_str(l)).collect();
        out.push_str(&format!(",\n  \"labels\": [{}]", ls.join(", ")));
    }
    out.push_str("\n}\n");
    out
}

pub fn load_algebra(path: &Path) -> Result<AlgebraFile, FormatError> {
    parse_algebra(&read_file(path)?, &path.display().to_string())
}

/// An algebra given inline or as a path relative to the referring file.
fn algebra_ref(v: Value, dir: &Path, origin: &str, files: &mut Vec<PathBuf>) -> Result<FiniteAlgebra, FormatError> {
    match v {
        Value::String(rel) => {
            let path = dir.join(rel);
            let alg = load_algebra(&path)?.algebra;
            files.push(path);
            Ok(alg)
        }
        other => Ok(algebra_from_value(other, origin)?.algebra),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    base: Value,
    a: Value,
    p: Vec<usize>,
    s: Vec<usize>,
}

/// Reads a point file `{"base": .., "a": .., "p": [..], "s": [..]}`; also
/// returns the algebra files it refers to.
pub fn load_point(ctx: &ContextSpec, path: &Path) -> Result<(SplitPoint, Vec<PathBuf>), FormatError> {
    let origin = path.display().to_string();
    let raw: RawPoint = serde_json::from_str(&read_file(path)?).map_err(|e| syntax(&origin, e))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut files = Vec::new();
    let b = algebra_ref(raw.base, dir, &format!("{origin} (base)"), &mut files)?;
    let a = algebra_ref(raw.a, dir, &format!("{origin} (a)"), &mut files)?;
    let core = |source| FormatError::Core {
        path: origin.clone(),
        source,
    };
    let b = b.reduct(&ctx.u.signature).map_err(core)?;
    let a = a.reduct(&ctx.v.signature).map_err(core)?;
    let ub = b.size();
    let p = FunctionMap::new(
        if ctx.direction == cohact_core::closures::Direction::Normal { a.size() } else { ub },
        if ctx.direction == cohact_core::closures::Direction::Normal { ub } else { a.size() },
        raw.p,
    )
    .map_err(core)?;
    let s = FunctionMap::new(p.codomain(), p.domain(), raw.s).map_err(core)?;
    let point = make_split_point(ctx, &b, &a, p, s).map_err(core)?;
    Ok((point, files))
}

/// A variety in a context file: a built-in name, a built-in with edits, or
/// a full inline definition.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum VarietyDecl {
    Named(String),
    Edited(EditedVariety),
    Inline(InlineVariety),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditedVariety {
    pub base: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub constants: Vec<String>,
    #[serde(default)]
    pub remove: Vec<String>,
    #[serde(default)]
    pub add: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineVariety {
    pub name: String,
    pub signature: SignatureBlock,
    pub identities: Vec<String>,
    #[serde(default)]
    pub kernel_constant: Option<String>,
}

impl VarietyDecl {
    pub fn build(&self) -> cohact_core::Result<VarietySpec> {
        match self {
            VarietyDecl::Named(name) => builtin(name),
            VarietyDecl::Edited(e) => {
                let base = builtin(&e.base)?;
                let name = e.name.clone().unwrap_or_else(|| format!("{}*", e.base));
                let constants: Vec<&str> = e.constants.iter().map(String::as_str).collect();
                let add: Vec<&str> = e.add.iter().map(String::as_str).collect();
                let mut v = base.extend(&name, &constants, &add)?;
                if !e.remove.is_empty() {
                    for r in &e.remove {
                        let target = Identity::parse(&v.signature, r)?.to_string();
                        let before = v.identities.len();
                        v.identities.retain(|id| id.to_string() != target);
                        if v.identities.len() == before {
                            return Err(cohact_core::Error::UnknownSymbol(format!(
                                "identity `{r}` is not among the axioms of `{}`",
                                e.base
                            )));
                        }
                    }
                    // hints may depend on the removed axioms
                    v.hints.clear();
                }
                Ok(v)
            }
            VarietyDecl::Inline(i) => {
                let sig = Arc::new(i.signature.build()?);
                let ids: Vec<&str> = i.identities.iter().map(String::as_str).collect();
                let mut v = VarietySpec::new(&i.name, sig, &ids)?;
                v.kernel_constant = i.kernel_constant.clone();
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextFile {
    pub name: String,
    /// Built-in context supplying the closure and direction.
    pub template: String,
    #[serde(default)]
    pub v: Option<VarietyDecl>,
    #[serde(default)]
    pub u: Option<VarietyDecl>,
    /// `unit`, `bottom` or `point-preimage`; custom contexts have none by default.
    #[serde(default)]
    pub criterion: Option<String>,
}

impl ContextFile {
    pub fn build(&self) -> cohact_core::Result<ContextSpec> {
        let mut ctx = ContextSpec::builtin(&self.template)?;
        ctx.name = self.name.clone();
        if let Some(v) = &self.v {
            ctx.v = v.build()?;
        }
        if let Some(u) = &self.u {
            ctx.u = u.build()?;
        }
        ctx.criterion = match self.criterion.as_deref() {
            None => None,
            Some("unit") => Some(Criterion::Unit),
            Some("bottom") => Some(Criterion::Bottom),
            Some("point-preimage") => Some(Criterion::PointPreimage),
            Some(other) => return Err(cohact_core::Error::UnknownSymbol(format!("criterion `{other}`"))),
        };
        if !ctx.v.signature.is_subsignature_of(&ctx.u.signature) {
            return Err(cohact_core::Error::InvalidContext(format!(
                "U signature {} does not extend V signature {}",
                ctx.u.signature, ctx.v.signature
            )));
        }
        Ok(ctx)
    }
}

pub fn load_context_file(path: &Path) -> Result<ContextSpec, FormatError> {
    let origin = path.display().to_string();
    let file: ContextFile = serde_json::from_str(&read_file(path)?).map_err(|e| syntax(&origin, e))?;
    file.build().map_err(|source| FormatError::Core { path: origin, source })
}
