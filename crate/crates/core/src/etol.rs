//! ET0L systems: parallel table rewriting, the active-normal-form check,
//! and conversion to indexed grammars.
//!
//! File format:
//!
//! ```text
//! axiom: S
//! terminals: a, b
//! strict: false        # optional; true disables identity defaults
//! table f1:
//! rule: S -> aSb
//! table f2:
//! rule: S -> _
//! ```
//!
//! Right-hand sides follow the word syntax: single characters, or
//! whitespace-separated names, `_` for the empty word.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::grammar::{IndexedGrammar, Production};
use crate::symbol::{Symbol, Word};
use crate::text::{self, SyntaxError};
use crate::trio::Names;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EtolError {
    #[error("table `{table}` has no production for `{symbol}`")]
    MissingRule { table: Symbol, symbol: Symbol },
    #[error("no table {0}")]
    UnknownTable(usize),
    #[error("expected {expected} production choices, got {found}")]
    ChoiceCount { expected: usize, found: usize },
    #[error("choice {choice} out of range for `{symbol}`")]
    BadChoice { symbol: Symbol, choice: usize },
    #[error("not in active normal form: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    NotInAnf(Vec<AnfViolation>),
    #[error("search frontier exceeded {0} words")]
    FrontierOverflow(usize),
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub name: Symbol,
    pub rules: Vec<(Symbol, Word)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtolSystem {
    /// Total alphabet `V`, terminals included.
    pub alphabet: Vec<Symbol>,
    pub terminals: Vec<Symbol>,
    pub tables: Vec<Table>,
    pub axiom: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnfViolation {
    ActiveTerminal(Symbol),
    InactiveNonTerminal(Symbol),
}

impl fmt::Display for AnfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnfViolation::ActiveTerminal(a) => write!(f, "terminal {} is active", a),
            AnfViolation::InactiveNonTerminal(b) => write!(f, "inactive non-terminal {}", b),
        }
    }
}

impl EtolSystem {
    /// Builds a system; `V` is the axiom, terminals and every symbol in a
    /// rule. Unless `strict`, symbols without a rule in some table get the
    /// identity rule there.
    pub fn new(axiom: Symbol, terminals: Vec<Symbol>, tables: Vec<Table>, strict: bool) -> Result<Self, EtolError> {
        let mut alphabet = vec![axiom.clone()];
        let add = |s: &Symbol, alphabet: &mut Vec<Symbol>| {
            if !alphabet.contains(s) {
                alphabet.push(s.clone());
            }
        };
        for t in &terminals {
            add(t, &mut alphabet);
        }
        for (b, nu) in tables.iter().flat_map(|t| &t.rules) {
            add(b, &mut alphabet);
            for s in nu.iter() {
                add(s, &mut alphabet);
            }
        }
        let mut tables = tables;
        for t in &mut tables {
            for b in &alphabet {
                if !t.rules.iter().any(|(lhs, _)| lhs == b) {
                    if strict {
                        return Err(EtolError::MissingRule { table: t.name.clone(), symbol: b.clone() });
                    }
                    t.rules.push((b.clone(), Word(vec![b.clone()])));
                }
            }
        }
        Ok(EtolSystem { alphabet, terminals, tables, axiom })
    }

    pub fn is_terminal(&self, s: &Symbol) -> bool {
        self.terminals.contains(s)
    }

    pub fn rules_for<'a>(&'a self, table: usize, b: &'a Symbol) -> impl Iterator<Item = &'a Word> + 'a {
        self.tables[table].rules.iter().filter(move |(lhs, _)| lhs == b).map(|(_, nu)| nu)
    }

    /// Symbols some table rewrites to something other than themselves.
    pub fn is_active(&self, b: &Symbol) -> bool {
        self.tables.iter().flat_map(|t| &t.rules).any(|(lhs, nu)| lhs == b && !(nu.len() == 1 && &nu.symbols()[0] == b))
    }

    pub fn non_terminal_count(&self, w: &Word) -> usize {
        w.iter().filter(|s| !self.is_terminal(s)).count()
    }
}

/// Rewrites every occurrence of `w` with table `table`, using production
/// number `choices[i]` (among that symbol's rules) at position `i`.
pub fn etol_step(sys: &EtolSystem, w: &Word, table: usize, choices: &[usize]) -> Result<Word, EtolError> {
    if table >= sys.tables.len() {
        return Err(EtolError::UnknownTable(table));
    }
    if choices.len() != w.len() {
        return Err(EtolError::ChoiceCount { expected: w.len(), found: choices.len() });
    }
    let mut out = Vec::new();
    for (b, &c) in w.iter().zip(choices) {
        let rules: Vec<&Word> = sys.rules_for(table, b).collect();
        if rules.is_empty() {
            return Err(EtolError::MissingRule { table: sys.tables[table].name.clone(), symbol: b.clone() });
        }
        let nu = rules.get(c).ok_or_else(|| EtolError::BadChoice { symbol: b.clone(), choice: c })?;
        out.extend(nu.iter().cloned());
    }
    Ok(Word(out))
}

/// All words one step of `table` away from `w`.
pub fn etol_successors(sys: &EtolSystem, w: &Word, table: usize) -> Result<BTreeSet<Word>, EtolError> {
    let mut partial: BTreeSet<Vec<Symbol>> = [Vec::new()].into();
    for b in w.iter() {
        let rules: BTreeSet<&Word> = sys.rules_for(table, b).collect();
        if rules.is_empty() {
            return Err(EtolError::MissingRule { table: sys.tables[table].name.clone(), symbol: b.clone() });
        }
        partial = partial
            .iter()
            .flat_map(|p| rules.iter().map(move |nu| p.iter().chain(nu.iter()).cloned().collect()))
            .collect();
    }
    Ok(partial.into_iter().map(Word).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtolBudget {
    pub max_steps: usize,
    /// Words with more non-terminals than this are dropped.
    pub max_index: Option<usize>,
    pub frontier_cap: usize,
}

impl EtolBudget {
    pub fn steps(max_steps: usize) -> Self {
        EtolBudget { max_steps, max_index: None, frontier_cap: crate::derivation::DEFAULT_FRONTIER_CAP }
    }

    pub fn index(mut self, k: usize) -> Self {
        self.max_index = Some(k);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtolEnumeration {
    pub words: Vec<Word>,
    /// No sentential word was dropped for lack of steps.
    pub exhaustive: bool,
    /// Some sentential word exceeded the index cap.
    pub index_capped: bool,
    pub visited: usize,
}

/// Breadth-first search over sentential words, deduplicated. When every
/// terminal is inactive, words with more than `max_len` terminals are
/// dropped, since terminals are never erased.
pub fn etol_enumerate(sys: &EtolSystem, max_len: usize, budget: &EtolBudget) -> Result<EtolEnumeration, EtolError> {
    let prune_len = sys.terminals.iter().all(|a| !sys.is_active(a));
    let terminal_count = |w: &Word| w.iter().filter(|s| sys.is_terminal(s)).count();
    let start = Word(vec![sys.axiom.clone()]);
    let mut seen: HashSet<Word> = [start.clone()].into();
    let mut layer = vec![start];
    let mut words = BTreeSet::new();
    let mut exhaustive = true;
    let mut index_capped = false;
    for depth in 0.. {
        for w in &layer {
            if sys.non_terminal_count(w) == 0 && w.len() <= max_len {
                words.insert(w.clone());
            }
        }
        if layer.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for w in &layer {
            for t in 0..sys.tables.len() {
                for v in etol_successors(sys, w, t)? {
                    if prune_len && terminal_count(&v) > max_len {
                        continue;
                    }
                    if budget.max_index.is_some_and(|k| sys.non_terminal_count(&v) > k) {
                        index_capped = true;
                        continue;
                    }
                    if seen.contains(&v) {
                        continue;
                    }
                    if depth >= budget.max_steps {
                        exhaustive = false;
                        continue;
                    }
                    seen.insert(v.clone());
                    if seen.len() > budget.frontier_cap {
                        return Err(EtolError::FrontierOverflow(budget.frontier_cap));
                    }
                    next.push(v);
                }
            }
        }
        layer = next;
    }
    Ok(EtolEnumeration { words: words.into_iter().collect(), exhaustive, index_capped, visited: seen.len() })
}

/// Least `k` such that `w` has a derivation whose sentential words hold at
/// most `k` non-terminals, searching caps up to `max_k`.
pub fn etol_word_index(sys: &EtolSystem, w: &Word, max_k: usize, budget: &EtolBudget) -> Result<Option<usize>, EtolError> {
    for k in 0..=max_k {
        let e = etol_enumerate(sys, w.len(), &EtolBudget { max_index: Some(k), ..budget.clone() })?;
        if e.words.contains(w) {
            return Ok(Some(k.max(1)));
        }
    }
    Ok(None)
}

/// Terminals that some table changes, and non-terminals no table changes.
pub fn check_anf(sys: &EtolSystem) -> Vec<AnfViolation> {
    let mut out = Vec::new();
    for b in &sys.alphabet {
        match (sys.is_terminal(b), sys.is_active(b)) {
            (true, true) => out.push(AnfViolation::ActiveTerminal(b.clone())),
            (false, false) => out.push(AnfViolation::InactiveNonTerminal(b.clone())),
            _ => {}
        }
    }
    out
}

/// `S' → S'[f_i]`, `S' → S`, `B[f_i] → ν` for every non-terminal rule
/// `B → ν` of table `f_i`.
pub fn etol_to_indexed(sys: &EtolSystem) -> Result<IndexedGrammar, EtolError> {
    let violations = check_anf(sys);
    if !violations.is_empty() {
        return Err(EtolError::NotInAnf(violations));
    }
    let mut names = Names::new(sys.alphabet.iter().cloned());
    let start = names.fresh("S'");
    let indices: Vec<Symbol> = sys.tables.iter().map(|t| names.fresh(t.name.as_str())).collect();
    let mut variables = vec![start.clone()];
    variables.extend(sys.alphabet.iter().filter(|b| !sys.is_terminal(b)).cloned());
    let mut productions: Vec<Production> =
        indices.iter().map(|f| Production::Push { lhs: start.clone(), var: start.clone(), index: f.clone() }).collect();
    productions.push(Production::Plain { lhs: start.clone(), rhs: vec![sys.axiom.clone()] });
    for (t, f) in sys.tables.iter().zip(&indices) {
        let mut seen = HashSet::new();
        for (b, nu) in &t.rules {
            if !sys.is_terminal(b) && seen.insert((b, nu)) {
                productions.push(Production::Consume { lhs: b.clone(), index: f.clone(), rhs: nu.0.clone() });
            }
        }
    }
    Ok(IndexedGrammar {
        name: "etol".to_string(),
        variables,
        terminals: sys.terminals.clone(),
        indices,
        productions,
        start,
    })
}

pub fn parse_etol(input: &str) -> Result<EtolSystem, EtolError> {
    let mut axiom = None;
    let mut terminals = Vec::new();
    let mut strict = false;
    let mut tables: Vec<Table> = Vec::new();
    for line in text::lines(input) {
        if let Some(rest) = line.text.strip_prefix("table ") {
            let name = rest.trim().strip_suffix(':').map(str::trim).ok_or_else(|| line.error(rest, "expected `table <name>:`"))?;
            if !Symbol::is_well_formed(name) {
                return Err(line.error(name, format!("malformed table name `{}`", name)).into());
            }
            if tables.iter().any(|t| t.name.as_str() == name) {
                return Err(line.error(name, format!("duplicate table `{}`", name)).into());
            }
            tables.push(Table { name: Symbol::new(name), rules: Vec::new() });
            continue;
        }
        let (key, value) = line.key_value().ok_or_else(|| line.error(line.text, "expected `key: value`"))?;
        match key {
            "axiom" => {
                let s = text::symbol_list(&line, value)?;
                if s.len() != 1 {
                    return Err(line.error(value, "expected one axiom symbol").into());
                }
                axiom = s.into_iter().next();
            }
            "terminals" => terminals = text::symbol_list(&line, value)?,
            "strict" => {
                strict = match value {
                    "" | "true" | "yes" => true,
                    "false" | "no" => false,
                    _ => return Err(line.error(value, "expected `true` or `false`").into()),
                }
            }
            "rule" => {
                let table = tables.last_mut().ok_or_else(|| line.error(line.text, "`rule:` outside a table"))?;
                let (b, nu) = value.split_once("->").ok_or_else(|| line.error(value, "expected `B -> word`"))?;
                let b = b.trim();
                if !Symbol::is_well_formed(b) {
                    return Err(line.error(b, format!("malformed symbol `{}`", b)).into());
                }
                table.rules.push((Symbol::new(b), Word::parse(nu)));
            }
            other => return Err(line.error(line.text, format!("unknown key `{}`", other)).into()),
        }
    }
    let axiom = axiom.ok_or_else(|| SyntaxError::new(1, 1, "missing `axiom:` line"))?;
    EtolSystem::new(axiom, terminals, tables, strict)
}

/// Writes every rule explicitly, identities included, under `strict: true`.
pub fn serialize_etol(sys: &EtolSystem) -> String {
    let word = |w: &Word| {
        if w.is_empty() {
            "_".to_string()
        } else if w.iter().all(|s| s.as_str().chars().count() == 1) {
            w.to_string()
        } else {
            text::join(w.symbols(), " ")
        }
    };
    let mut out = format!("axiom: {}\nterminals: {}\nstrict: true\n", sys.axiom, text::join(&sys.terminals, ", "));
    for t in &sys.tables {
        out.push_str(&format!("table {}:\n", t.name));
        for (b, nu) in &t.rules {
            out.push_str(&format!("rule: {} -> {}\n", b, word(nu)));
        }
    }
    out
}
