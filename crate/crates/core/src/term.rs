//! Terms, identities and their evaluation on finite algebras.
//!
//! Identities are written as s-expressions, `(mul x (imp x y)) = (mul y (imp y x))`.
//! A bare identifier naming a constant of the signature is that constant;
//! any other bare identifier is a variable. Variables are numbered by first
//! appearance, left side before right side.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, FiniteAlgebra, Signature};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(usize),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(op: &str, args: Vec<Term>) -> Term {
        Term::App(op.to_string(), args)
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Const(_) => 0,
            Term::App(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Replaces every variable `i` by `subst[i]`.
    pub fn substitute(&self, subst: &[Term]) -> Term {
        match self {
            Term::Var(i) => subst[*i].clone(),
            Term::Const(c) => Term::Const(c.clone()),
            Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| a.substitute(subst)).collect()),
        }
    }

    pub fn compile(&self, sig: &Signature) -> Result<CompiledTerm> {
        let mut code = Vec::new();
        self.emit(sig, &mut code)?;
        Ok(CompiledTerm {
            code,
            vars: self.var_bound(),
        })
    }

    fn emit(&self, sig: &Signature, code: &mut Vec<Instr>) -> Result<()> {
        match self {
            Term::Var(i) => code.push(Instr::Var(*i)),
            Term::Const(c) => {
                let idx = sig
                    .constant_index(c)
                    .ok_or_else(|| Error::UnknownSymbol(c.clone()))?;
                code.push(Instr::Const(idx));
            }
            Term::App(op, args) => {
                let idx = sig.op_index(op).ok_or_else(|| Error::UnknownSymbol(op.clone()))?;
                let arity = sig.arity(idx);
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        op: op.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                for a in args {
                    a.emit(sig, code)?;
                }
                code.push(Instr::Op(idx, arity));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "{}", var_name(*i)),
            Term::Const(c) => write!(f, "{c}"),
            Term::App(op, args) => {
                write!(f, "({op}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Display name of variable `i`: x, y, z, w, then v4, v5, ...
pub fn var_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        3 => "w".into(),
        _ => format!("v{i}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instr {
    Var(usize),
    Const(usize),
    Op(usize, usize),
}

/// A term resolved against a signature, evaluated with an explicit stack.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompiledTerm {
    pub code: Vec<Instr>,
    pub vars: usize,
}

impl CompiledTerm {
    /// Evaluates without bounds checks on `env`; callers guarantee coverage.
    #[inline]
    pub fn eval(&self, alg: &FiniteAlgebra, env: &[Elem], stack: &mut Vec<Elem>) -> Elem {
        stack.clear();
        let n = alg.size();
        for ins in &self.code {
            match *ins {
                Instr::Var(i) => stack.push(env[i]),
                Instr::Const(c) => stack.push(alg.constant(c)),
                Instr::Op(op, arity) => {
                    let base = stack.len() - arity;
                    let mut idx = 0;
                    for &a in &stack[base..] {
                        idx = idx * n + a;
                    }
                    stack.truncate(base);
                    stack.push(alg.table(op)[idx]);
                }
            }
        }
        stack[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
    pub vars: usize,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Identity {
        let vars = lhs.var_bound().max(rhs.var_bound());
        Identity { lhs, rhs, vars }
    }

    /// Parses `lhs = rhs` against `sig`.
    pub fn parse(sig: &Signature, text: &str) -> Result<Identity> {
        let mut p = Parser::new(text, sig);
        let lhs = p.term()?;
        p.skip_ws();
        if !p.eat('=') {
            return Err(p.error("expected `=`"));
        }
        let rhs = p.term()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(Identity {
            lhs,
            rhs,
            vars: p.vars.len(),
        })
    }

    pub fn compile(&self, sig: &Signature) -> Result<(CompiledTerm, CompiledTerm)> {
        Ok((self.lhs.compile(sig)?, self.rhs.compile(sig)?))
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Parses a single term; variables are numbered by first appearance.
pub fn parse_term(sig: &Signature, text: &str) -> Result<Term> {
    let mut p = Parser::new(text, sig);
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    sig: &'a Signature,
    vars: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, sig: &'a Signature) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            sig,
            vars: Vec::new(),
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.src.get(self.pos) == Some(&(c as u8)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b'=' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        if self.eat('(') {
            let at = self.pos;
            let head = self.ident()?;
            let op = self.sig.op_index(&head).ok_or(Error::Parse {
                offset: at,
                message: format!("unknown operation `{head}`"),
            })?;
            let mut args = Vec::new();
            loop {
                self.skip_ws();
                if self.eat(')') {
                    break;
                }
                if self.pos >= self.src.len() {
                    return Err(self.error("unclosed parenthesis"));
                }
                args.push(self.term()?);
            }
            let arity = self.sig.arity(op);
            if args.len() != arity {
                return Err(Error::ArityMismatch {
                    op: head,
                    expected: arity,
                    found: args.len(),
                });
            }
            Ok(Term::App(head, args))
        } else {
            let at = self.pos;
            let name = self.ident()?;
            if self.sig.constant_index(&name).is_some() {
                Ok(Term::Const(name))
            } else if self.sig.op_index(&name).is_some() {
                Err(Error::Parse {
                    offset: at,
                    message: format!("operation `{name}` used without arguments"),
                })
            } else {
                let i = match self.vars.iter().position(|v| *v == name) {
                    Some(i) => i,
                    None => {
                        self.vars.push(name);
                        self.vars.len() - 1
                    }
                };
                Ok(Term::Var(i))
            }
        }
    }
}

/// Evaluates `t` in `alg` under `env`.
pub fn eval_term(alg: &FiniteAlgebra, t: &Term, env: &[Elem]) -> Result<Elem> {
    match t {
        Term::Var(i) => env.get(*i).copied().ok_or(Error::UnboundVariable(*i)),
        Term::Const(c) => alg
            .constant_named(c)
            .ok_or_else(|| Error::UnknownSymbol(c.clone())),
        Term::App(op, args) => {
            let idx = alg.op_named(op).ok_or_else(|| Error::UnknownSymbol(op.clone()))?;
            let arity = alg.signature().arity(idx);
            if arity != args.len() {
                return Err(Error::ArityMismatch {
                    op: op.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            let mut vals = Vec::with_capacity(arity);
            for a in args {
                let v = eval_term(alg, a, env)?;
                if v >= alg.size() {
                    return Err(Error::InvalidAlgebra(format!("environment value {v} out of range")));
                }
                vals.push(v);
            }
            Ok(alg.apply(idx, &vals))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityVerdict {
    Satisfied,
    Failed {
        assignment: Vec<Elem>,
        lhs: Elem,
        rhs: Elem,
    },
}

impl fmt::Display for IdentityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentityVerdict::Satisfied => write!(f, "holds"),
            IdentityVerdict::Failed { assignment, lhs, rhs } => {
                write!(f, "at {assignment:?} the sides are {lhs} and {rhs}")
            }
        }
    }
}

impl IdentityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, IdentityVerdict::Satisfied)
    }
}

/// Exhaustive check; the first failing assignment in lexicographic order
/// (variable 0 most significant) is returned as the witness.
pub fn check_identity(alg: &FiniteAlgebra, id: &Identity) -> Result<IdentityVerdict> {
    let (l, r) = id
        .compile(alg.signature())
        .map_err(|e| Error::SignatureMismatch(format!("identity `{id}`: {e}")))?;
    Ok(check_compiled(alg, &l, &r, id.vars))
}

pub(crate) fn check_compiled(
    alg: &FiniteAlgebra,
    l: &CompiledTerm,
    r: &CompiledTerm,
    vars: usize,
) -> IdentityVerdict {
    let n = alg.size();
    let mut env = vec![0; vars];
    let mut stack = Vec::new();
    loop {
        let a = l.eval(alg, &env, &mut stack);
        let b = r.eval(alg, &env, &mut stack);
        if a != b {
            return IdentityVerdict::Failed {
                assignment: env,
                lhs: a,
                rhs: b,
            };
        }
        let mut i = vars;
        loop {
            if i == 0 {
                return IdentityVerdict::Satisfied;
            }
            i -= 1;
            env[i] += 1;
            if env[i] < n {
                break;
            }
            env[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn mv_sig() -> Arc<Signature> {
        Arc::new(Signature::new([("oplus", 2), ("neg", 1)], ["zero"]).unwrap())
    }

    fn l2() -> FiniteAlgebra {
        FiniteAlgebra::new(mv_sig(), 2, vec![vec![0, 1, 1, 1], vec![1, 0]], vec![0]).unwrap()
    }

    #[test]
    fn double_negation_of_top() {
        let t = parse_term(&mv_sig(), "(neg (neg x))").unwrap();
        assert_eq!(eval_term(&l2(), &t, &[1]).unwrap(), 1);
    }

    #[test]
    fn parse_numbers_variables_by_first_appearance() {
        let id = Identity::parse(&mv_sig(), "(oplus y x) = (oplus x zero)").unwrap();
        assert_eq!(id.vars, 2);
        assert_eq!(id.lhs, Term::app("oplus", vec![Term::Var(0), Term::Var(1)]));
        assert_eq!(id.rhs, Term::app("oplus", vec![Term::Var(1), Term::constant("zero")]));
    }

    #[test]
    fn parse_errors() {
        let sig = mv_sig();
        assert!(matches!(Identity::parse(&sig, "(oplus x) = x"), Err(Error::ArityMismatch { .. })));
        assert!(matches!(Identity::parse(&sig, "(foo x) = x"), Err(Error::Parse { .. })));
        assert!(matches!(Identity::parse(&sig, "(oplus x y"), Err(Error::Parse { .. })));
        assert!(matches!(Identity::parse(&sig, "x y"), Err(Error::Parse { .. })));
    }

    #[test]
    fn eval_errors() {
        let a = l2();
        assert_eq!(eval_term(&a, &Term::Var(2), &[0]), Err(Error::UnboundVariable(2)));
        assert!(matches!(eval_term(&a, &Term::constant("one"), &[]), Err(Error::UnknownSymbol(_))));
        assert!(matches!(
            eval_term(&a, &Term::app("neg", vec![]), &[]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn corrupted_sum_fails_at_one() {
        let bad = FiniteAlgebra::new(mv_sig(), 2, vec![vec![0, 1, 1, 0], vec![1, 0]], vec![0]).unwrap();
        let id = Identity::parse(&mv_sig(), "(oplus x (neg zero)) = (neg zero)").unwrap();
        assert!(check_identity(&l2(), &id).unwrap().holds());
        assert_eq!(
            check_identity(&bad, &id).unwrap(),
            IdentityVerdict::Failed {
                assignment: vec![1],
                lhs: 0,
                rhs: 1
            }
        );
    }

    #[test]
    fn display_round_trips() {
        let sig = mv_sig();
        let id = Identity::parse(&sig, "(oplus (neg (oplus (neg x) y)) y) = (oplus (neg (oplus (neg y) x)) x)").unwrap();
        let again = Identity::parse(&sig, &id.to_string()).unwrap();
        assert_eq!(id, again);
    }
}
