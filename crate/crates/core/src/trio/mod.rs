//! Closure constructions on indexed grammars.
//!
//! Generated names: chain variables `Z#n`, interleavers `Y#p#i#j`, triple
//! variables `<p|A|q>`, primed index copies `f'`. A generated name that
//! would clash with an existing one gets a `#n` suffix.

mod intersect;
mod projection;
mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::automata::AutomatonError;
use crate::derivation::live_variables;
use crate::grammar::{IndexedGrammar, Production};
use crate::symbol::{Symbol, Word};
use crate::text::SyntaxError;

pub use intersect::{intersect_dfa, is_normalized};
pub use projection::{inverse_morphism, inverse_projection, nivat_transduce, Label, NivatTransducer};
pub use text::{parse_morphism, parse_transducer, serialize_morphism, serialize_transducer};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrioError {
    #[error("production {0} is not in normalized form (run normalize first)")]
    NotNormalized(usize),
    #[error("morphism undefined on `{0}`")]
    MorphismNotTotal(Symbol),
    #[error("automaton alphabet lacks terminal `{0}`")]
    AlphabetMismatch(Symbol),
    #[error("extended alphabet lacks terminal `{0}`")]
    NotSuperset(Symbol),
    #[error("transducer: {0}")]
    Transducer(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
}

/// A letter-to-word morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub map: BTreeMap<Symbol, Word>,
    /// Target alphabet; contains every letter of every image.
    pub target: Vec<Symbol>,
}

impl Morphism {
    pub fn new<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let map: BTreeMap<Symbol, Word> = pairs.into_iter().map(|(a, w)| (Symbol::new(a), Word::parse(w))).collect();
        let mut m = Morphism { map, target: Vec::new() };
        m.extend_target(&[]);
        m
    }

    pub fn identity(alphabet: &[Symbol]) -> Self {
        Morphism {
            map: alphabet.iter().map(|a| (a.clone(), Word(vec![a.clone()]))).collect(),
            target: alphabet.to_vec(),
        }
    }

    /// Adds `extra` and all image letters to the target alphabet.
    pub fn extend_target(&mut self, extra: &[Symbol]) {
        let mut seen: BTreeSet<Symbol> = self.target.iter().cloned().collect();
        for s in extra.iter().chain(self.map.values().flat_map(|w| w.iter())) {
            if seen.insert(s.clone()) {
                self.target.push(s.clone());
            }
        }
    }

    pub fn image(&self, a: &Symbol) -> Option<&Word> {
        self.map.get(a)
    }

    pub fn apply(&self, w: &Word) -> Option<Word> {
        let mut out = Vec::new();
        for a in w.iter() {
            out.extend(self.map.get(a)?.iter().cloned());
        }
        Some(Word(out))
    }

    pub fn is_total_on(&self, alphabet: &[Symbol]) -> Result<(), TrioError> {
        match alphabet.iter().find(|a| !self.map.contains_key(*a)) {
            Some(a) => Err(TrioError::MorphismNotTotal(a.clone())),
            None => Ok(()),
        }
    }
}

/// Allocates names not used so far.
pub(crate) struct Names {
    taken: BTreeSet<Symbol>,
}

impl Names {
    pub fn new(taken: impl IntoIterator<Item = Symbol>) -> Self {
        Names { taken: taken.into_iter().collect() }
    }

    /// `base` itself when free, otherwise `base#n` for the least free `n`.
    pub fn fresh(&mut self, base: &str) -> Symbol {
        let mut cand = Symbol::new(base);
        let mut n = 1;
        while self.taken.contains(&cand) {
            cand = Symbol::from(format!("{}#{}", base, n));
            n += 1;
        }
        self.taken.insert(cand.clone());
        cand
    }
}

fn sym_map(m: &HashMap<Symbol, Symbol>, s: &Symbol) -> Symbol {
    m.get(s).cloned().unwrap_or_else(|| s.clone())
}

/// Renames variables and indices by the given maps; terminals are kept.
pub(crate) fn rename(g: &IndexedGrammar, vars: &HashMap<Symbol, Symbol>, idx: &HashMap<Symbol, Symbol>) -> IndexedGrammar {
    let rhs = |r: &[Symbol]| r.iter().map(|s| sym_map(vars, s)).collect();
    let productions = g
        .productions
        .iter()
        .map(|p| match p {
            Production::Plain { lhs, rhs: r } => Production::Plain { lhs: sym_map(vars, lhs), rhs: rhs(r) },
            Production::Push { lhs, var, index } => Production::Push {
                lhs: sym_map(vars, lhs),
                var: sym_map(vars, var),
                index: sym_map(idx, index),
            },
            Production::Consume { lhs, index, rhs: r } => Production::Consume {
                lhs: sym_map(vars, lhs),
                index: sym_map(idx, index),
                rhs: rhs(r),
            },
        })
        .collect();
    IndexedGrammar {
        name: g.name.clone(),
        variables: g.variables.iter().map(|v| sym_map(vars, v)).collect(),
        terminals: g.terminals.clone(),
        indices: g.indices.iter().map(|i| sym_map(idx, i)).collect(),
        productions,
        start: sym_map(vars, &g.start),
    }
}

/// Renames the variables and indices of `g` that occur in `avoid`.
pub(crate) fn rename_apart(g: &IndexedGrammar, avoid: &BTreeSet<Symbol>) -> IndexedGrammar {
    let mut names = Names::new(g.all_names().into_iter().chain(avoid.iter().cloned()));
    let mut vars = HashMap::new();
    let mut idx = HashMap::new();
    for v in &g.variables {
        if avoid.contains(v) {
            vars.insert(v.clone(), names.fresh(v.as_str()));
        }
    }
    for i in &g.indices {
        if avoid.contains(i) {
            idx.insert(i.clone(), names.fresh(i.as_str()));
        }
    }
    if vars.is_empty() && idx.is_empty() {
        g.clone()
    } else {
        rename(g, &vars, &idx)
    }
}

fn merge_symbols(a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
    let mut out = a.to_vec();
    for s in b {
        if !out.contains(s) {
            out.push(s.clone());
        }
    }
    out
}

/// Fresh start `S` with `S -> S1` and `S -> S2`; the inputs are renamed
/// apart first.
pub fn union(g1: &IndexedGrammar, g2: &IndexedGrammar) -> IndexedGrammar {
    union_many(&[g1.clone(), g2.clone()])
}

pub fn union_many(gs: &[IndexedGrammar]) -> IndexedGrammar {
    let terminals: BTreeSet<Symbol> = gs.iter().flat_map(|g| g.terminals.iter().cloned()).collect();
    let mut used: BTreeSet<Symbol> = terminals.clone();
    let mut parts = Vec::new();
    for g in gs {
        let h = rename_apart(g, &used);
        used.extend(h.variables.iter().cloned());
        used.extend(h.indices.iter().cloned());
        used.insert(h.start.clone());
        parts.push(h);
    }
    let start = Names::new(used).fresh("S");
    let mut out = IndexedGrammar {
        name: gs.iter().map(|g| g.name.as_str()).collect::<Vec<_>>().join("+"),
        variables: vec![start.clone()],
        terminals: Vec::new(),
        indices: Vec::new(),
        productions: Vec::new(),
        start: start.clone(),
    };
    for h in &parts {
        out.productions.push(Production::Plain { lhs: start.clone(), rhs: vec![h.start.clone()] });
    }
    for h in parts {
        out.variables = merge_symbols(&out.variables, &h.variables);
        out.terminals = merge_symbols(&out.terminals, &h.terminals);
        out.indices = merge_symbols(&out.indices, &h.indices);
        out.productions.extend(h.productions);
    }
    out
}

/// Replaces every terminal on a right-hand side by its image.
pub fn morphism_image(g: &IndexedGrammar, h: &Morphism) -> Result<IndexedGrammar, TrioError> {
    h.is_total_on(&g.terminals)?;
    let target: BTreeSet<Symbol> = h.target.iter().cloned().collect();
    let g = rename_apart(g, &target);
    let is_term: BTreeSet<&Symbol> = g.terminals.iter().collect();
    let image = |rhs: &[Symbol]| -> Vec<Symbol> {
        rhs.iter()
            .flat_map(|s| {
                if is_term.contains(s) {
                    h.map[s].0.clone()
                } else {
                    vec![s.clone()]
                }
            })
            .collect()
    };
    let productions = g
        .productions
        .iter()
        .map(|p| match p.rhs() {
            Some(rhs) => p.with_rhs(image(rhs)),
            None => p.clone(),
        })
        .collect();
    Ok(IndexedGrammar { terminals: h.target.clone(), productions, ..g })
}

/// Splits every right-hand side with two or more variables, except those
/// already of the shape `u X Z`, into a chain through fresh `Z` variables.
pub fn normalize_rhs(g: &IndexedGrammar) -> IndexedGrammar {
    let mut names = Names::new(g.all_names());
    let mut counter = 0usize;
    let mut variables = g.variables.clone();
    let mut productions = Vec::new();
    for p in &g.productions {
        let Some(rhs) = p.rhs() else {
            productions.push(p.clone());
            continue;
        };
        let (segments, vars) = split_rhs(g, rhs);
        let k = vars.len();
        if k < 2 || (k == 2 && segments[1].is_empty() && segments[2].is_empty()) {
            productions.push(p.clone());
            continue;
        }
        let zs: Vec<Symbol> = (1..k)
            .map(|_| {
                counter += 1;
                names.fresh(&format!("Z#{}", counter))
            })
            .collect();
        variables.extend(zs.iter().cloned());
        let mut first = segments[0].clone();
        first.push(vars[0].clone());
        first.push(zs[0].clone());
        productions.push(p.with_rhs(first));
        for j in 1..k - 1 {
            let mut r = segments[j].clone();
            r.push(vars[j].clone());
            r.push(zs[j].clone());
            productions.push(Production::Plain { lhs: zs[j - 1].clone(), rhs: r });
        }
        let mut last = segments[k - 1].clone();
        last.push(vars[k - 1].clone());
        last.extend(segments[k].iter().cloned());
        productions.push(Production::Plain { lhs: zs[k - 2].clone(), rhs: last });
    }
    IndexedGrammar { variables, productions, ..g.clone() }
}

/// `u1 X1 ... uk Xk u(k+1)` as the `k + 1` terminal segments and `k` variables.
pub(crate) fn split_rhs(g: &IndexedGrammar, rhs: &[Symbol]) -> (Vec<Vec<Symbol>>, Vec<Symbol>) {
    let mut segments = vec![Vec::new()];
    let mut vars = Vec::new();
    for s in rhs {
        if g.is_variable(s.as_str()) {
            vars.push(s.clone());
            segments.push(Vec::new());
        } else {
            segments.last_mut().expect("nonempty").push(s.clone());
        }
    }
    (segments, vars)
}

/// Drops productions that are unreachable from the start variable or that
/// mention a variable deriving no terminal word.
pub fn prune(g: &IndexedGrammar) -> IndexedGrammar {
    let live: HashMap<&Symbol, bool> = g.variables.iter().zip(live_variables(g)).collect();
    let is_live = |s: &Symbol| live.get(s).copied().unwrap_or(true);
    let usable: Vec<&Production> = g
        .productions
        .iter()
        .filter(|p| {
            is_live(p.lhs())
                && match p {
                    Production::Push { var, .. } => is_live(var),
                    _ => p.rhs().unwrap_or(&[]).iter().filter(|s| g.is_variable(s.as_str())).all(is_live),
                }
        })
        .collect();
    let mut reach: BTreeSet<Symbol> = [g.start.clone()].into();
    loop {
        let before = reach.len();
        for p in &usable {
            if reach.contains(p.lhs()) {
                match p {
                    Production::Push { var, .. } => {
                        reach.insert(var.clone());
                    }
                    _ => reach.extend(p.rhs().unwrap_or(&[]).iter().filter(|s| g.is_variable(s.as_str())).cloned()),
                }
            }
        }
        if reach.len() == before {
            break;
        }
    }
    let productions: Vec<Production> = usable.into_iter().filter(|p| reach.contains(p.lhs())).cloned().collect();
    let used_idx: BTreeSet<&Symbol> = productions
        .iter()
        .filter_map(|p| match p {
            Production::Push { index, .. } | Production::Consume { index, .. } => Some(index),
            Production::Plain { .. } => None,
        })
        .collect();
    IndexedGrammar {
        name: g.name.clone(),
        variables: g.variables.iter().filter(|v| reach.contains(*v)).cloned().collect(),
        terminals: g.terminals.clone(),
        indices: g.indices.iter().filter(|i| used_idx.contains(i)).cloned().collect(),
        start: g.start.clone(),
        productions,
    }
}
