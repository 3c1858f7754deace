//! Integer-coded grammar used by the search routines.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::grammar::{IndexedGrammar, Production, ProductionClass};
use crate::symbol::{Symbol, Word};

pub(crate) const INF: u32 = u32::MAX;

pub(crate) type Stack = Arc<[u32]>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Cell {
    T(u32),
    V(u32, Stack),
}

pub(crate) type Form = Vec<Cell>;

#[derive(Clone, Copy, Debug)]
enum Sym {
    T(u32),
    V(u32),
}

#[derive(Clone, Debug)]
enum CProd {
    Plain { rhs: Vec<Sym>, terminals: u32 },
    Push { var: u32, index: u32 },
    Consume { index: u32, rhs: Vec<Sym>, terminals: u32 },
}

pub(crate) struct Compiled<'g> {
    pub g: &'g IndexedGrammar,
    term_id: HashMap<Symbol, u32>,
    var_id: HashMap<Symbol, u32>,
    index_names: Vec<Symbol>,
    prods: Vec<CProd>,
    /// Production ids per left-hand-side variable, in list order.
    by_lhs: Vec<Vec<usize>>,
    pub special: Vec<bool>,
    /// `abs[v][t]`: lower bound on the yield of `v` whose stack is empty
    /// (`t = 0`) or has top index `t - 1`, with the rest unknown.
    abs: Vec<Vec<u32>>,
    /// Minimum of `abs[v]` over all tops.
    any: Vec<u32>,
    lb_cache: RefCell<HashMap<Stack, Arc<[u32]>>>,
    empty: Stack,
    /// Productions whose symbols all resolve; others never fire.
    valid: Vec<bool>,
}

fn sat_add(a: u32, b: u32) -> u32 {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b).min(INF - 1)
    }
}

impl<'g> Compiled<'g> {
    pub fn new(g: &'g IndexedGrammar) -> Self {
        let term_id: HashMap<Symbol, u32> =
            g.terminals.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let var_id: HashMap<Symbol, u32> =
            g.variables.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let index_id: HashMap<Symbol, u32> =
            g.indices.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let code = |rhs: &[Symbol]| -> (Vec<Sym>, u32) {
            let syms: Vec<Sym> = rhs
                .iter()
                .map(|s| match var_id.get(s) {
                    Some(&v) => Sym::V(v),
                    None => Sym::T(*term_id.get(s).unwrap_or(&u32::MAX)),
                })
                .collect();
            let n = syms.iter().filter(|s| matches!(s, Sym::T(_))).count() as u32;
            (syms, n)
        };
        let mut prods = Vec::with_capacity(g.productions.len());
        let mut by_lhs = vec![Vec::new(); g.variables.len()];
        for (i, p) in g.productions.iter().enumerate() {
            let cp = match p {
                Production::Plain { rhs, .. } => {
                    let (rhs, terminals) = code(rhs);
                    CProd::Plain { rhs, terminals }
                }
                Production::Push { var, index, .. } => CProd::Push {
                    var: *var_id.get(var).unwrap_or(&u32::MAX),
                    index: *index_id.get(index).unwrap_or(&u32::MAX),
                },
                Production::Consume { index, rhs, .. } => {
                    let (rhs, terminals) = code(rhs);
                    CProd::Consume { index: *index_id.get(index).unwrap_or(&u32::MAX), rhs, terminals }
                }
            };
            prods.push(cp);
            if let Some(&v) = var_id.get(p.lhs()) {
                by_lhs[v as usize].push(i);
            }
        }
        let special = g.productions.iter().map(|p| g.classify(p) == ProductionClass::Special).collect();
        let mut c = Compiled {
            g,
            term_id,
            var_id,
            index_names: g.indices.clone(),
            prods,
            by_lhs,
            special,
            abs: Vec::new(),
            any: Vec::new(),
            lb_cache: RefCell::new(HashMap::new()),
            empty: Arc::from(Vec::new()),
            valid: Vec::new(),
        };
        c.valid = (0..c.prods.len()).map(|i| c.check_prod(i)).collect();
        c.compute_abstract_bounds();
        c
    }

    fn valid_prod(&self, id: usize) -> bool {
        self.valid[id]
    }

    fn check_prod(&self, id: usize) -> bool {
        let vars = self.g.variables.len() as u32;
        let idx = self.index_names.len() as u32;
        let ok_rhs = |rhs: &[Sym]| {
            rhs.iter().all(|s| match s {
                Sym::T(t) => *t != u32::MAX,
                Sym::V(v) => *v < vars,
            })
        };
        match &self.prods[id] {
            CProd::Plain { rhs, .. } => ok_rhs(rhs),
            CProd::Push { var, index } => *var < vars && *index < idx,
            CProd::Consume { index, rhs, .. } => *index < idx && ok_rhs(rhs),
        }
    }

    fn compute_abstract_bounds(&mut self) {
        let nv = self.g.variables.len();
        let nt = self.index_names.len() + 1;
        let mut abs = vec![vec![INF; nt]; nv];
        let mut any = vec![INF; nv];
        loop {
            let mut changed = false;
            for v in 0..nv {
                for t in 0..nt {
                    let mut best = abs[v][t];
                    for &pid in &self.by_lhs[v] {
                        if !self.valid_prod(pid) {
                            continue;
                        }
                        let cand = match &self.prods[pid] {
                            CProd::Plain { rhs, terminals } => rhs.iter().fold(*terminals, |acc, s| match s {
                                Sym::V(c) => sat_add(acc, abs[*c as usize][t]),
                                Sym::T(_) => acc,
                            }),
                            CProd::Push { var, index } => abs[*var as usize][*index as usize + 1],
                            CProd::Consume { index, rhs, terminals } => {
                                if t != *index as usize + 1 {
                                    continue;
                                }
                                rhs.iter().fold(*terminals, |acc, s| match s {
                                    Sym::V(c) => sat_add(acc, any[*c as usize]),
                                    Sym::T(_) => acc,
                                })
                            }
                        };
                        best = best.min(cand);
                    }
                    if best < abs[v][t] {
                        abs[v][t] = best;
                        changed = true;
                    }
                }
                let m = abs[v].iter().copied().min().unwrap_or(INF);
                if m < any[v] {
                    any[v] = m;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.abs = abs;
        self.any = any;
    }

    /// Per-variable lower bounds on the yield of a variable carrying `stack`.
    fn stack_bounds(&self, stack: &Stack) -> Arc<[u32]> {
        if let Some(v) = self.lb_cache.borrow().get(stack) {
            return v.clone();
        }
        let nv = self.g.variables.len();
        let rest: Option<Arc<[u32]>> = if stack.is_empty() {
            None
        } else {
            let tail: Stack = Arc::from(&stack[1..]);
            Some(self.stack_bounds(&tail))
        };
        let top = stack.first().copied();
        let mut cur = vec![INF; nv];
        loop {
            let mut changed = false;
            for v in 0..nv {
                let mut best = cur[v];
                for &pid in &self.by_lhs[v] {
                    if !self.valid_prod(pid) {
                        continue;
                    }
                    let cand = match &self.prods[pid] {
                        CProd::Plain { rhs, terminals } => rhs.iter().fold(*terminals, |acc, s| match s {
                            Sym::V(c) => sat_add(acc, cur[*c as usize]),
                            Sym::T(_) => acc,
                        }),
                        CProd::Push { var, index } => self.abs[*var as usize][*index as usize + 1],
                        CProd::Consume { index, rhs, terminals } => match (&rest, top) {
                            (Some(rest), Some(t)) if t == *index => rhs.iter().fold(*terminals, |acc, s| match s {
                                Sym::V(c) => sat_add(acc, rest[*c as usize]),
                                Sym::T(_) => acc,
                            }),
                            _ => continue,
                        },
                    };
                    best = best.min(cand);
                }
                if best < cur[v] {
                    cur[v] = best;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let out: Arc<[u32]> = Arc::from(cur);
        self.lb_cache.borrow_mut().insert(stack.clone(), out.clone());
        out
    }

    /// Sound lower bound on the length of any terminal word derivable from
    /// `form`; `INF` when the form can never terminate.
    pub fn yield_lower_bound(&self, form: &Form) -> u32 {
        let mut total = 0u32;
        for cell in form {
            match cell {
                Cell::T(_) => total = sat_add(total, 1),
                Cell::V(v, stack) => {
                    let b = self.stack_bounds(stack)[*v as usize];
                    total = sat_add(total, b);
                }
            }
            if total == INF {
                return INF;
            }
        }
        total
    }

    /// False only when `v` derives no terminal word under any stack.
    pub fn may_terminate(&self, v: usize) -> bool {
        self.any[v] != INF
    }

    pub fn start(&self) -> Option<Form> {
        self.var_id.get(&self.g.start).map(|&s| vec![Cell::V(s, self.empty.clone())])
    }

    pub fn width(form: &Form) -> usize {
        form.iter().filter(|c| matches!(c, Cell::V(..))).count()
    }

    pub fn max_stack(form: &Form) -> usize {
        form.iter()
            .map(|c| match c {
                Cell::V(_, s) => s.len(),
                Cell::T(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_terminal(form: &Form) -> bool {
        form.iter().all(|c| matches!(c, Cell::T(_)))
    }

    /// Calls `f(position, production, next)` for every one-step derivative
    /// in canonical order. With `leftmost`, only the first variable is
    /// rewritten.
    pub fn for_each_successor(&self, form: &Form, leftmost: bool, mut f: impl FnMut(usize, usize, Form)) {
        for (pos, cell) in form.iter().enumerate() {
            let (v, stack) = match cell {
                Cell::V(v, s) => (*v, s),
                Cell::T(_) => continue,
            };
            for &pid in &self.by_lhs[v as usize] {
                if !self.valid_prod(pid) {
                    continue;
                }
                let replace = |rhs: &[Sym], inherited: &Stack| -> Form {
                    let mut out = Vec::with_capacity(form.len() + rhs.len());
                    out.extend_from_slice(&form[..pos]);
                    for s in rhs {
                        out.push(match s {
                            Sym::T(t) => Cell::T(*t),
                            Sym::V(c) => Cell::V(*c, inherited.clone()),
                        });
                    }
                    out.extend_from_slice(&form[pos + 1..]);
                    out
                };
                match &self.prods[pid] {
                    CProd::Plain { rhs, .. } => f(pos, pid, replace(rhs, stack)),
                    CProd::Push { var, index } => {
                        let mut pushed = Vec::with_capacity(stack.len() + 1);
                        pushed.push(*index);
                        pushed.extend_from_slice(stack);
                        let mut out = form.clone();
                        out[pos] = Cell::V(*var, Arc::from(pushed));
                        f(pos, pid, out)
                    }
                    CProd::Consume { index, rhs, .. } => {
                        if stack.first() == Some(index) {
                            let popped: Stack = Arc::from(&stack[1..]);
                            f(pos, pid, replace(rhs, &popped))
                        }
                    }
                }
            }
            if leftmost {
                break;
            }
        }
    }

    /// Codes a terminal word; `None` if it uses a symbol outside `T`.
    pub fn code_word(&self, w: &Word) -> Option<Vec<u32>> {
        w.iter().map(|s| self.term_id.get(s).copied()).collect()
    }

    pub fn decode_word(&self, form: &Form) -> Word {
        form.iter()
            .filter_map(|c| match c {
                Cell::T(t) => Some(self.g.terminals[*t as usize].clone()),
                Cell::V(..) => None,
            })
            .collect()
    }
}

/// Whether `form` can still derive exactly `target`, judged by its terminal
/// segments and the yield lower bound.
pub(crate) fn consistent_with_target(form: &Form, target: &[u32], lower_bound: u32) -> bool {
    if lower_bound as usize > target.len() {
        return false;
    }
    let mut segs: Vec<Vec<u32>> = vec![Vec::new()];
    for c in form {
        match c {
            Cell::T(t) => segs.last_mut().unwrap().push(*t),
            Cell::V(..) => segs.push(Vec::new()),
        }
    }
    if segs.len() == 1 {
        return segs[0] == target;
    }
    let first = &segs[0];
    let last = &segs[segs.len() - 1];
    if first.len() + last.len() > target.len() || !target.starts_with(first) || !target.ends_with(last) {
        return false;
    }
    let mut at = first.len();
    let end = target.len() - last.len();
    for seg in &segs[1..segs.len() - 1] {
        if seg.is_empty() {
            continue;
        }
        let hay = &target[at..end];
        match hay.windows(seg.len()).position(|w| w == seg.as_slice()) {
            Some(i) => at += i + seg.len(),
            None => return false,
        }
    }
    true
}
