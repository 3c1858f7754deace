//! Search over sentential forms with form-level deduplication.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use super::compiled::{consistent_with_target, Compiled, Form, INF};
use super::{EngineError, SearchStats};

#[derive(Clone, Debug)]
pub(crate) struct Limits {
    pub max_steps: usize,
    pub max_width: Option<usize>,
    pub max_stack: Option<usize>,
    /// Forms whose yield lower bound exceeds this are discarded.
    pub yield_bound: Option<usize>,
    /// When set, only forms that can still derive this word are kept.
    pub target: Option<Vec<u32>>,
    pub frontier_cap: usize,
    /// Rewrite only the leftmost variable. Complete for the language and
    /// for tree measures, not for width.
    pub leftmost: bool,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    parent: u32,
    prod: u32,
    pos: u32,
    depth: u32,
}

const ROOT: u32 = u32::MAX;

/// Discovered forms with back-pointers for witness reconstruction.
pub(crate) struct Tree {
    nodes: Vec<Node>,
    index: HashMap<Form, u32>,
}

impl Tree {
    fn new() -> Self {
        Tree { nodes: Vec::new(), index: HashMap::new() }
    }

    fn add(&mut self, form: Form, parent: u32, prod: usize, pos: usize, depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { parent, prod: prod as u32, pos: pos as u32, depth: depth as u32 });
        self.index.insert(form, id);
        id
    }

    pub fn depth(&self, id: u32) -> usize {
        self.nodes[id as usize].depth as usize
    }

    /// `(production, position)` moves from the root to `id`.
    pub fn path(&self, mut id: u32) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while id != ROOT {
            let n = self.nodes[id as usize];
            if n.parent != ROOT {
                out.push((n.prod as usize, n.pos as usize));
            }
            id = n.parent;
        }
        out.reverse();
        out
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }
}

pub(crate) enum Admit {
    Keep,
    Prune,
    TooWide,
    TooDeep,
}

pub(crate) fn admit(c: &Compiled<'_>, form: &Form, lim: &Limits) -> Admit {
    if let Some(w) = lim.max_width {
        if Compiled::width(form) > w {
            return Admit::TooWide;
        }
    }
    if let Some(s) = lim.max_stack {
        if Compiled::max_stack(form) > s {
            return Admit::TooDeep;
        }
    }
    let lb = c.yield_lower_bound(form);
    if lb == INF {
        return Admit::Prune;
    }
    if let Some(y) = lim.yield_bound {
        if lb as usize > y {
            return Admit::Prune;
        }
    }
    if let Some(t) = &lim.target {
        if !consistent_with_target(form, t, lb) {
            return Admit::Prune;
        }
    }
    Admit::Keep
}

fn note(stats: &mut SearchStats, a: &Admit) {
    match a {
        Admit::TooWide => stats.truncated_width = true,
        Admit::TooDeep => stats.truncated_stack = true,
        _ => {}
    }
}

pub(crate) struct BfsResult {
    pub tree: Tree,
    pub stats: SearchStats,
    pub hit: Option<u32>,
}

/// Breadth-first search from `start`. `on_terminal` is called for every
/// newly discovered terminal form and returns `true` to stop the search.
pub(crate) fn bfs(
    c: &Compiled<'_>,
    start: Form,
    lim: &Limits,
    mut on_terminal: impl FnMut(&Form) -> bool,
) -> Result<BfsResult, EngineError> {
    let mut tree = Tree::new();
    let mut stats = SearchStats::default();
    let a = admit(c, &start, lim);
    note(&mut stats, &a);
    if !matches!(a, Admit::Keep) {
        return Ok(BfsResult { tree, stats, hit: None });
    }
    let root = tree.add(start.clone(), ROOT, 0, 0, 0);
    if Compiled::is_terminal(&start) && on_terminal(&start) {
        stats.forms = 1;
        return Ok(BfsResult { tree, stats, hit: Some(root) });
    }
    let mut queue: VecDeque<(Form, u32)> = VecDeque::new();
    queue.push_back((start, root));
    let mut hit = None;
    'outer: while let Some((form, id)) = queue.pop_front() {
        let depth = tree.depth(id);
        if Compiled::is_terminal(&form) {
            continue;
        }
        if depth >= lim.max_steps {
            stats.truncated_steps = true;
            continue;
        }
        let mut found = Vec::new();
        c.for_each_successor(&form, lim.leftmost, |pos, pid, next| found.push((pos, pid, next)));
        for (pos, pid, next) in found {
            if tree.index.contains_key(&next) {
                continue;
            }
            let a = admit(c, &next, lim);
            note(&mut stats, &a);
            if !matches!(a, Admit::Keep) {
                continue;
            }
            let nid = tree.add(next.clone(), id, pid, pos, depth + 1);
            if tree.len() > lim.frontier_cap {
                return Err(EngineError::BudgetOverflow(lim.frontier_cap));
            }
            if Compiled::is_terminal(&next) {
                if on_terminal(&next) {
                    hit = Some(nid);
                    break 'outer;
                }
            } else {
                queue.push_back((next, nid));
            }
        }
    }
    stats.forms = tree.len();
    Ok(BfsResult { tree, stats, hit })
}

/// 0-1 breadth-first search minimising the number of special steps on a
/// path to a terminal form accepted by `goal`.
pub(crate) fn min_special(
    c: &Compiled<'_>,
    start: Form,
    lim: &Limits,
    goal: impl Fn(&Form) -> bool,
) -> Result<(Option<(usize, Vec<(usize, usize)>)>, SearchStats), EngineError> {
    let mut stats = SearchStats::default();
    let a = admit(c, &start, lim);
    note(&mut stats, &a);
    if !matches!(a, Admit::Keep) {
        return Ok((None, stats));
    }
    // Per form: best cost seen and its back-pointer.
    let mut best: HashMap<Form, (usize, u32)> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut settled: Vec<bool> = Vec::new();
    let mut deque: VecDeque<(Form, u32, usize)> = VecDeque::new();
    nodes.push(Node { parent: ROOT, prod: 0, pos: 0, depth: 0 });
    settled.push(false);
    best.insert(start.clone(), (0, 0));
    deque.push_back((start, 0, 0));
    let path_of = |nodes: &Vec<Node>, mut id: u32| {
        let mut out = Vec::new();
        while nodes[id as usize].parent != ROOT {
            let n = nodes[id as usize];
            out.push((n.prod as usize, n.pos as usize));
            id = n.parent;
        }
        out.reverse();
        out
    };
    while let Some((form, id, cost)) = deque.pop_front() {
        if settled[id as usize] || best.get(&form).map_or(false, |&(c0, i0)| c0 < cost || i0 != id) {
            continue;
        }
        settled[id as usize] = true;
        if Compiled::is_terminal(&form) {
            if goal(&form) {
                stats.forms = nodes.len();
                return Ok((Some((cost, path_of(&nodes, id))), stats));
            }
            continue;
        }
        let depth = nodes[id as usize].depth as usize;
        if depth >= lim.max_steps {
            stats.truncated_steps = true;
            continue;
        }
        let mut found = Vec::new();
        c.for_each_successor(&form, lim.leftmost, |pos, pid, next| found.push((pos, pid, next)));
        for (pos, pid, next) in found {
            let step = usize::from(c.special[pid]);
            let ncost = cost + step;
            if let Some(&(c0, _)) = best.get(&next) {
                if c0 <= ncost {
                    continue;
                }
            }
            let a = admit(c, &next, lim);
            note(&mut stats, &a);
            if !matches!(a, Admit::Keep) {
                continue;
            }
            let nid = nodes.len() as u32;
            nodes.push(Node { parent: id, prod: pid as u32, pos: pos as u32, depth: depth as u32 + 1 });
            settled.push(false);
            if nodes.len() > lim.frontier_cap {
                return Err(EngineError::BudgetOverflow(lim.frontier_cap));
            }
            best.insert(next.clone(), (ncost, nid));
            if step == 0 {
                deque.push_front((next, nid, ncost));
            } else {
                deque.push_back((next, nid, ncost));
            }
        }
    }
    stats.forms = nodes.len();
    Ok((None, stats))
}

/// Outcome of the widest-first search for a successful derivation that
/// passes through a form wider than `k`.
pub(crate) struct WideSearch {
    pub witness: Option<Vec<(usize, usize)>>,
    pub stats: SearchStats,
    /// Some wide form could not be decided within the budget.
    pub undecided: bool,
}

pub(crate) fn widest_first(c: &Compiled<'_>, start: Form, k: usize, lim: &Limits) -> Result<WideSearch, EngineError> {
    let mut stats = SearchStats::default();
    let mut undecided = false;
    let mut tree = Tree::new();
    let a = admit(c, &start, lim);
    note(&mut stats, &a);
    if !matches!(a, Admit::Keep) {
        return Ok(WideSearch { witness: None, stats, undecided });
    }
    let root = tree.add(start.clone(), ROOT, 0, 0, 0);
    // Widest first, then shallowest, then discovery order.
    let mut heap: BinaryHeap<(usize, Reverse<usize>, Reverse<u32>)> = BinaryHeap::new();
    let mut forms: HashMap<u32, Form> = HashMap::new();
    heap.push((Compiled::width(&start), Reverse(0), Reverse(root)));
    forms.insert(root, start);
    while let Some((width, Reverse(depth), Reverse(id))) = heap.pop() {
        let form = forms.remove(&id).expect("queued form");
        if Compiled::is_terminal(&form) {
            continue;
        }
        if width > k {
            let remaining = lim.max_steps.saturating_sub(depth);
            let sub = Limits { max_steps: remaining, max_width: None, leftmost: true, ..lim.clone() };
            let r = bfs(c, form, &sub, |_| true)?;
            stats.forms += r.stats.forms;
            if let Some(hit) = r.hit {
                let mut moves = tree.path(id);
                moves.extend(r.tree.path(hit));
                stats.forms += tree.len();
                return Ok(WideSearch { witness: Some(moves), stats, undecided });
            }
            // Every completion of a descendant is a completion of this form,
            // so the subtree needs no further exploration.
            if r.stats.truncated_steps || r.stats.truncated_stack {
                undecided = true;
                stats.truncated_steps |= r.stats.truncated_steps;
                stats.truncated_stack |= r.stats.truncated_stack;
            }
            continue;
        }
        if depth >= lim.max_steps {
            stats.truncated_steps = true;
            continue;
        }
        let mut found = Vec::new();
        c.for_each_successor(&form, lim.leftmost, |pos, pid, next| found.push((pos, pid, next)));
        for (pos, pid, next) in found {
            if tree.index.contains_key(&next) {
                continue;
            }
            let a = admit(c, &next, lim);
            note(&mut stats, &a);
            if !matches!(a, Admit::Keep) {
                continue;
            }
            let nid = tree.add(next.clone(), id, pid, pos, depth + 1);
            if tree.len() > lim.frontier_cap {
                return Err(EngineError::BudgetOverflow(lim.frontier_cap));
            }
            heap.push((Compiled::width(&next), Reverse(depth + 1), Reverse(nid)));
            forms.insert(nid, next);
        }
    }
    stats.forms += tree.len();
    Ok(WideSearch { witness: None, stats, undecided })
}
