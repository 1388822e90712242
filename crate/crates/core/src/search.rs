//! Enumeration of finite models of an equational theory up to isomorphism.
//!
//! Operation tables are filled cell by cell. Every ground instance of every
//! identity is evaluated against the partial tables: an instance either holds,
//! fails, forces the single unknown cell at the root of one side, or waits on
//! the first unknown cell it meets. Symmetry is broken with the least number
//! heuristic, and surviving models are deduplicated by canonical form.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{table_len, Elem, FiniteAlgebra, Signature};
use crate::canonical::canonical_form;
use crate::error::{Error, Result};
use crate::term::{check_identity, Identity, Instr};

const UNKNOWN: u8 = u8::MAX;

/// Largest carrier the table search accepts.
pub const MAX_SEARCH_SIZE: usize = 32;

#[derive(Debug, Clone)]
pub struct ModelQuery {
    pub signature: Arc<Signature>,
    /// Identities every model must satisfy.
    pub identities: Vec<Identity>,
    /// Consequences of `identities` used only to prune the search.
    pub hints: Vec<Identity>,
    /// Operations whose cells are decided after all others.
    pub late_ops: Vec<String>,
    pub size: usize,
    pub parallel: bool,
}

impl ModelQuery {
    pub fn new(signature: Arc<Signature>, identities: Vec<Identity>, size: usize) -> Self {
        ModelQuery {
            signature,
            identities,
            hints: Vec::new(),
            late_ops: Vec::new(),
            size,
            parallel: false,
        }
    }
}

/// All models of the query's size, one per isomorphism class, each in
/// canonical form, sorted by canonical table string.
pub fn find_models(q: &ModelQuery) -> Result<Vec<FiniteAlgebra>> {
    if q.size == 0 {
        return Ok(Vec::new());
    }
    if q.size > MAX_SEARCH_SIZE {
        return Err(Error::BoundExceeded {
            what: "model search carrier".into(),
            requested: q.size,
            ceiling: MAX_SEARCH_SIZE,
        });
    }
    let problem = Problem::build(q)?;
    let consts = constant_assignments(q.signature.constants().len(), q.size);
    let mut tasks = Vec::new();
    for c in consts {
        let mut st = State::root(&problem, c);
        if !st.initial(&problem) {
            continue;
        }
        let mx = st.consts.iter().copied().max().map_or(0, |m| m as usize);
        if q.parallel {
            st.frontier(&problem, 0, mx, 0, &mut tasks);
        } else {
            tasks.push(Task { state: st, pos: 0, mx });
        }
    }
    let run = |t: Task| -> BTreeMap<Vec<Elem>, FiniteAlgebra> {
        let mut found = BTreeMap::new();
        let mut st = t.state;
        st.dfs(&problem, t.pos, t.mx, &mut |s: &State| {
            let alg = s.to_algebra(&problem);
            let (canon, _) = canonical_form(&alg);
            found.entry(canon.table_string()).or_insert(canon);
        });
        found
    };
    let merged: BTreeMap<Vec<Elem>, FiniteAlgebra> = if q.parallel {
        tasks
            .into_par_iter()
            .map(run)
            .reduce(BTreeMap::new, |mut a, b| {
                a.extend(b);
                a
            })
    } else {
        let mut all = BTreeMap::new();
        for t in tasks {
            all.extend(run(t));
        }
        all
    };
    let models: Vec<FiniteAlgebra> = merged.into_values().collect();
    for m in &models {
        for id in &q.identities {
            if !check_identity(m, id)?.holds() {
                return Err(Error::Internal(format!("model search emitted a table violating `{id}`")));
            }
        }
    }
    Ok(models)
}

/// Restricted growth strings: constant `i` takes a value at most one above
/// the largest value used before it.
fn constant_assignments(k: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(k: usize, n: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let hi = cur.iter().map(|&v| v as usize + 1).max().unwrap_or(0).min(n - 1);
        for v in 0..=hi {
            cur.push(v as u8);
            go(k, n, cur, out);
            cur.pop();
        }
    }
    go(k, n, &mut cur, &mut out);
    out
}

struct Problem {
    sig: Arc<Signature>,
    n: usize,
    offsets: Vec<usize>,
    arity: Vec<usize>,
    total: usize,
    code: Vec<(Vec<Instr>, Vec<Instr>)>,
    width: usize,
    inst_ident: Vec<u32>,
    inst_env: Vec<u8>,
    order: Vec<u32>,
    max_arg: Vec<u8>,
}

impl Problem {
    fn build(q: &ModelQuery) -> Result<Problem> {
        let n = q.size;
        let sig = q.signature.clone();
        let mut offsets = Vec::new();
        let mut arity = Vec::new();
        let mut total = 0;
        for o in sig.ops() {
            offsets.push(total);
            arity.push(o.arity);
            total += table_len(n, o.arity);
        }
        let mut code = Vec::new();
        let mut width = 0;
        for id in q.identities.iter().chain(&q.hints) {
            let (l, r) = id.compile(&sig)?;
            if l.code == r.code {
                continue;
            }
            width = width.max(id.vars);
            code.push((l.code, r.code));
        }
        let mut inst_ident = Vec::new();
        let mut inst_env = Vec::new();
        let mut env = vec![0u8; width];
        for (i, (l, r)) in code.iter().enumerate() {
            let vars = l
                .iter()
                .chain(r.iter())
                .filter_map(|ins| match ins {
                    Instr::Var(v) => Some(v + 1),
                    _ => None,
                })
                .max()
                .unwrap_or(0);
            let count = n.pow(vars as u32);
            for idx in 0..count {
                let mut x = idx;
                for slot in env[..vars].iter_mut().rev() {
                    *slot = (x % n) as u8;
                    x /= n;
                }
                inst_ident.push(i as u32);
                inst_env.extend_from_slice(&env);
            }
        }
        let mut max_arg = vec![0u8; total];
        let mut keys = Vec::with_capacity(total);
        let mut args = Vec::new();
        for (op, o) in sig.ops().iter().enumerate() {
            let phase = usize::from(q.late_ops.contains(&o.name));
            for t in 0..table_len(n, o.arity) {
                crate::algebra::decode_tuple(t, n, o.arity, &mut args);
                let m = args.iter().copied().max().unwrap_or(0);
                let cell = offsets[op] + t;
                max_arg[cell] = m as u8;
                keys.push((phase, m, op, t, cell as u32));
            }
        }
        keys.sort_unstable();
        let order = keys.into_iter().map(|k| k.4).collect();
        Ok(Problem {
            sig,
            n,
            offsets,
            arity,
            total,
            code,
            width,
            inst_ident,
            inst_env,
            order,
            max_arg,
        })
    }
}

#[derive(Clone, Copy)]
enum Event {
    Assign(u32),
    Watch(u32),
}

enum Eval {
    Val(u8),
    Blocked { cell: u32, root: bool },
}

#[derive(Clone)]
struct State {
    cells: Vec<u8>,
    consts: Vec<u8>,
    watches: Vec<Vec<u32>>,
    trail: Vec<Event>,
    queue: Vec<u32>,
    stack: Vec<u8>,
}

struct Task {
    state: State,
    pos: usize,
    mx: usize,
}

impl State {
    fn root(p: &Problem, consts: Vec<u8>) -> State {
        State {
            cells: vec![UNKNOWN; p.total],
            consts,
            watches: vec![Vec::new(); p.total],
            trail: Vec::new(),
            queue: Vec::new(),
            stack: Vec::new(),
        }
    }

    fn initial(&mut self, p: &Problem) -> bool {
        for inst in 0..p.inst_ident.len() {
            if !self.visit(p, inst as u32) {
                return false;
            }
        }
        self.propagate(p)
    }

    fn eval(&mut self, p: &Problem, code: &[Instr], env: &[u8]) -> Eval {
        self.stack.clear();
        let last = code.len() - 1;
        for (i, ins) in code.iter().enumerate() {
            match *ins {
                Instr::Var(v) => self.stack.push(env[v]),
                Instr::Const(c) => self.stack.push(self.consts[c]),
                Instr::Op(op, k) => {
                    let base = self.stack.len() - k;
                    let mut t = 0;
                    for &a in &self.stack[base..] {
                        t = t * p.n + a as usize;
                    }
                    let cell = p.offsets[op] + t;
                    let v = self.cells[cell];
                    if v == UNKNOWN {
                        return Eval::Blocked {
                            cell: cell as u32,
                            root: i == last,
                        };
                    }
                    self.stack.truncate(base);
                    self.stack.push(v);
                }
            }
        }
        Eval::Val(self.stack[0])
    }

    fn assign(&mut self, cell: u32, v: u8) {
        self.cells[cell as usize] = v;
        self.trail.push(Event::Assign(cell));
        self.queue.push(cell);
    }

    fn watch(&mut self, cell: u32, inst: u32) {
        self.watches[cell as usize].push(inst);
        self.trail.push(Event::Watch(cell));
    }

    fn visit(&mut self, p: &Problem, inst: u32) -> bool {
        let id = p.inst_ident[inst as usize] as usize;
        let env_start = inst as usize * p.width;
        let (l, r) = &p.code[id];
        let env = &p.inst_env[env_start..env_start + p.width];
        let a = self.eval(p, l, env);
        let b = self.eval(p, r, env);
        match (a, b) {
            (Eval::Val(x), Eval::Val(y)) => x == y,
            (Eval::Val(x), Eval::Blocked { cell, root: true }) | (Eval::Blocked { cell, root: true }, Eval::Val(x)) => {
                self.assign(cell, x);
                true
            }
            (Eval::Blocked { cell, .. }, _) | (_, Eval::Blocked { cell, .. }) => {
                self.watch(cell, inst);
                true
            }
        }
    }

    fn propagate(&mut self, p: &Problem) -> bool {
        while let Some(cell) = self.queue.pop() {
            let mut i = 0;
            while i < self.watches[cell as usize].len() {
                let inst = self.watches[cell as usize][i];
                i += 1;
                if !self.visit(p, inst) {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail above mark") {
                Event::Assign(c) => self.cells[c as usize] = UNKNOWN,
                Event::Watch(c) => {
                    self.watches[c as usize].pop();
                }
            }
        }
    }

    fn next_cell(&self, p: &Problem, mut pos: usize) -> usize {
        while pos < p.order.len() && self.cells[p.order[pos] as usize] != UNKNOWN {
            pos += 1;
        }
        pos
    }

    fn candidates(&self, p: &Problem, cell: usize, mx: usize) -> usize {
        (mx.max(p.max_arg[cell] as usize) + 1).min(p.n - 1)
    }

    fn dfs(&mut self, p: &Problem, pos: usize, mx: usize, out: &mut dyn FnMut(&State)) {
        let pos = self.next_cell(p, pos);
        if pos == p.order.len() {
            out(self);
            return;
        }
        let cell = p.order[pos];
        let hi = self.candidates(p, cell as usize, mx);
        let base = mx.max(p.max_arg[cell as usize] as usize);
        for v in 0..=hi {
            let mark = self.trail.len();
            self.assign(cell, v as u8);
            if self.propagate(p) {
                self.dfs(p, pos + 1, base.max(v), out);
            }
            self.undo(mark);
        }
    }

    /// Splits the search below this state into independent tasks.
    fn frontier(&mut self, p: &Problem, pos: usize, mx: usize, depth: usize, out: &mut Vec<Task>) {
        let pos = self.next_cell(p, pos);
        if pos == p.order.len() || depth >= 6 {
            out.push(Task {
                state: self.clone(),
                pos,
                mx,
            });
            return;
        }
        let cell = p.order[pos];
        let hi = self.candidates(p, cell as usize, mx);
        let base = mx.max(p.max_arg[cell as usize] as usize);
        for v in 0..=hi {
            let mark = self.trail.len();
            self.assign(cell, v as u8);
            if self.propagate(p) {
                self.frontier(p, pos + 1, base.max(v), depth + 1, out);
            }
            self.undo(mark);
        }
    }

    fn to_algebra(&self, p: &Problem) -> FiniteAlgebra {
        let tables = (0..p.offsets.len())
            .map(|op| {
                let len = table_len(p.n, p.arity[op]);
                self.cells[p.offsets[op]..p.offsets[op] + len]
                    .iter()
                    .map(|&v| v as Elem)
                    .collect()
            })
            .collect();
        let consts = self.consts.iter().map(|&v| v as Elem).collect();
        FiniteAlgebra::new(p.sig.clone(), p.n, tables, consts).expect("complete tables")
    }
}
