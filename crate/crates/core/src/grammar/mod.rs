//! Indexed grammars `(V, T, I, P, S)`: data model, validation, and the
//! one-step derivation relation.

mod form;
mod text;

pub use form::{Derivation, DerivationStep, Item, SententialForm, Successor};
pub use text::{parse_grammar, serialize_grammar};

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::symbol::Symbol;

/// A production in one of the three indexed-grammar forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Production {
    /// `A -> ν`: every variable of `ν` inherits a copy of the stack.
    Plain { lhs: Symbol, rhs: Vec<Symbol> },
    /// `A -> B f`: push `f` onto the stack of `B`.
    Push { lhs: Symbol, var: Symbol, index: Symbol },
    /// `A f -> ν`: pop `f`; every variable of `ν` inherits the rest.
    Consume { lhs: Symbol, index: Symbol, rhs: Vec<Symbol> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductionKind {
    Plain,
    Push,
    Consume,
}

/// Special productions have at least two variable occurrences on the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductionClass {
    Special,
    Linear,
}

impl Production {
    pub fn plain(lhs: &str, rhs: &[&str]) -> Self {
        Production::Plain { lhs: lhs.into(), rhs: rhs.iter().map(|s| Symbol::new(s)).collect() }
    }

    pub fn push(lhs: &str, var: &str, index: &str) -> Self {
        Production::Push { lhs: lhs.into(), var: var.into(), index: index.into() }
    }

    pub fn consume(lhs: &str, index: &str, rhs: &[&str]) -> Self {
        Production::Consume {
            lhs: lhs.into(),
            index: index.into(),
            rhs: rhs.iter().map(|s| Symbol::new(s)).collect(),
        }
    }

    pub fn lhs(&self) -> &Symbol {
        match self {
            Production::Plain { lhs, .. }
            | Production::Push { lhs, .. }
            | Production::Consume { lhs, .. } => lhs,
        }
    }

    /// The consumed index, if any.
    pub fn lhs_index(&self) -> Option<&Symbol> {
        match self {
            Production::Consume { index, .. } => Some(index),
            _ => None,
        }
    }

    /// The right-hand side word for plain and consume productions.
    pub fn rhs(&self) -> Option<&[Symbol]> {
        match self {
            Production::Plain { rhs, .. } | Production::Consume { rhs, .. } => Some(rhs),
            Production::Push { .. } => None,
        }
    }

    pub fn kind(&self) -> ProductionKind {
        match self {
            Production::Plain { .. } => ProductionKind::Plain,
            Production::Push { .. } => ProductionKind::Push,
            Production::Consume { .. } => ProductionKind::Consume,
        }
    }

    /// Rebuilds the production with a new right-hand side word, keeping
    /// its left-hand side. Push productions are returned unchanged.
    pub fn with_rhs(&self, new_rhs: Vec<Symbol>) -> Self {
        match self {
            Production::Plain { lhs, .. } => Production::Plain { lhs: lhs.clone(), rhs: new_rhs },
            Production::Consume { lhs, index, .. } => {
                Production::Consume { lhs: lhs.clone(), index: index.clone(), rhs: new_rhs }
            }
            Production::Push { .. } => self.clone(),
        }
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn word(f: &mut fmt::Formatter<'_>, rhs: &[Symbol]) -> fmt::Result {
            if rhs.is_empty() {
                return f.write_str("_");
            }
            for (i, s) in rhs.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", s)?;
            }
            Ok(())
        }
        match self {
            Production::Plain { lhs, rhs } => {
                write!(f, "{} -> ", lhs)?;
                word(f, rhs)
            }
            Production::Push { lhs, var, index } => write!(f, "{} -> {} [+{}]", lhs, var, index),
            Production::Consume { lhs, index, rhs } => {
                write!(f, "{} [{}] -> ", lhs, index)?;
                word(f, rhs)
            }
        }
    }
}

/// An indexed grammar. The name is a label only; equality compares the
/// five components.
#[derive(Clone, Debug)]
pub struct IndexedGrammar {
    pub name: String,
    pub variables: Vec<Symbol>,
    pub terminals: Vec<Symbol>,
    pub indices: Vec<Symbol>,
    pub productions: Vec<Production>,
    pub start: Symbol,
}

impl PartialEq for IndexedGrammar {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables
            && self.terminals == other.terminals
            && self.indices == other.indices
            && self.productions == other.productions
            && self.start == other.start
    }
}

impl Eq for IndexedGrammar {}

/// A well-formedness problem found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApplyError {
    #[error("position {0} does not hold a variable")]
    PositionNotVariable(usize),
    #[error("production rewrites {expected} but position holds {found}")]
    LhsMismatch { expected: Symbol, found: Symbol },
    #[error("consume production applied to an empty stack")]
    EmptyStackOnConsume,
    #[error("top index is {found}, production consumes {expected}")]
    TopIndexMismatch { expected: Symbol, found: Symbol },
    #[error("no production with id {0}")]
    UnknownProduction(usize),
}

impl IndexedGrammar {
    pub fn new(
        name: &str,
        variables: &[&str],
        terminals: &[&str],
        indices: &[&str],
        start: &str,
        productions: Vec<Production>,
    ) -> Self {
        let syms = |xs: &[&str]| xs.iter().map(|s| Symbol::new(s)).collect();
        IndexedGrammar {
            name: name.to_string(),
            variables: syms(variables),
            terminals: syms(terminals),
            indices: syms(indices),
            productions,
            start: start.into(),
        }
    }

    pub fn is_variable(&self, s: &str) -> bool {
        self.variables.iter().any(|v| v.as_str() == s)
    }

    pub fn is_terminal(&self, s: &str) -> bool {
        self.terminals.iter().any(|v| v.as_str() == s)
    }

    pub fn is_index(&self, s: &str) -> bool {
        self.indices.iter().any(|v| v.as_str() == s)
    }

    /// Number of variable occurrences on the right-hand side (1 for push).
    pub fn rhs_variable_count(&self, p: &Production) -> usize {
        match p.rhs() {
            Some(rhs) => rhs.iter().filter(|s| self.is_variable(s.as_str())).count(),
            None => 1,
        }
    }

    pub fn classify(&self, p: &Production) -> ProductionClass {
        if self.rhs_variable_count(p) >= 2 {
            ProductionClass::Special
        } else {
            ProductionClass::Linear
        }
    }

    pub fn special_productions(&self) -> Vec<usize> {
        (0..self.productions.len())
            .filter(|&i| self.classify(&self.productions[i]) == ProductionClass::Special)
            .collect()
    }

    /// Every symbol name used anywhere in the grammar.
    pub fn all_names(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = BTreeSet::new();
        out.extend(self.variables.iter().cloned());
        out.extend(self.terminals.iter().cloned());
        out.extend(self.indices.iter().cloned());
        out.insert(self.start.clone());
        for p in &self.productions {
            out.insert(p.lhs().clone());
            match p {
                Production::Push { var, index, .. } => {
                    out.insert(var.clone());
                    out.insert(index.clone());
                }
                Production::Plain { rhs, .. } => out.extend(rhs.iter().cloned()),
                Production::Consume { index, rhs, .. } => {
                    out.insert(index.clone());
                    out.extend(rhs.iter().cloned());
                }
            }
        }
        out
    }

    /// The initial sentential form `S` with an empty stack.
    pub fn start_form(&self) -> SententialForm {
        SententialForm::start(self.start.clone())
    }

    pub fn apply_production(
        &self,
        form: &SententialForm,
        pos: usize,
        p: &Production,
    ) -> Result<SententialForm, ApplyError> {
        form::apply(self, form, pos, p)
    }

    /// All one-step derivatives of `form`, ordered by position and then by
    /// production order.
    pub fn successors(&self, form: &SententialForm) -> Vec<Successor> {
        form::successors(self, form)
    }
}

/// Checks disjointness, membership, and production-form constraints.
pub fn validate(g: &IndexedGrammar) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |location: String, message: &str| {
        out.push(Violation { location, message: message.to_string() })
    };

    for (label, set) in [("variables", &g.variables), ("terminals", &g.terminals), ("indices", &g.indices)] {
        let mut seen = HashSet::new();
        for s in set.iter() {
            if !seen.insert(s) {
                push(format!("{} `{}`", label, s), "duplicate symbol");
            }
            if !Symbol::is_well_formed(s.as_str()) {
                push(format!("{} `{}`", label, s), "malformed symbol name");
            }
        }
    }
    let vars: HashSet<&Symbol> = g.variables.iter().collect();
    let terms: HashSet<&Symbol> = g.terminals.iter().collect();
    let idxs: HashSet<&Symbol> = g.indices.iter().collect();
    for s in vars.intersection(&terms) {
        push(format!("symbol `{}`", s), "alphabets not disjoint");
    }
    for s in vars.intersection(&idxs) {
        push(format!("symbol `{}`", s), "alphabets not disjoint");
    }
    for s in terms.intersection(&idxs) {
        push(format!("symbol `{}`", s), "alphabets not disjoint");
    }
    if !vars.contains(&g.start) {
        push(format!("start `{}`", g.start), "start symbol not a variable");
    }

    for (i, p) in g.productions.iter().enumerate() {
        let loc = format!("production {} ({})", i, p);
        if !vars.contains(p.lhs()) {
            push(loc.clone(), "left-hand side not a variable");
        }
        match p {
            Production::Push { var, index, .. } => {
                if !vars.contains(var) {
                    push(loc.clone(), "pushed-onto symbol not a variable");
                }
                if !idxs.contains(index) {
                    push(loc.clone(), "pushed symbol not an index");
                }
            }
            Production::Consume { index, rhs, .. } => {
                if !idxs.contains(index) {
                    push(loc.clone(), "consumed symbol not an index");
                }
                for s in rhs {
                    if !vars.contains(s) && !terms.contains(s) {
                        push(loc.clone(), "right-hand side symbol not a variable or terminal");
                    }
                }
            }
            Production::Plain { rhs, .. } => {
                for s in rhs {
                    if !vars.contains(s) && !terms.contains(s) {
                        push(loc.clone(), "right-hand side symbol not a variable or terminal");
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn section5_grammar_is_valid() {
        let g = fixtures::sec5_grammar();
        assert_eq!(validate(&g), vec![]);
        assert_eq!(g.productions.len(), 17);
        assert_eq!(g.variables.len(), 9);
        assert_eq!(g.special_productions().len(), 1);
    }

    #[test]
    fn overlapping_alphabets_reported() {
        let g = IndexedGrammar::new("bad", &["S"], &["S", "a"], &[], "S", vec![Production::plain("S", &["a"])]);
        let v = validate(&g);
        assert!(v.iter().any(|v| v.message == "alphabets not disjoint"), "{:?}", v);
    }

    #[test]
    fn pushing_a_terminal_reported() {
        let g = IndexedGrammar::new("bad", &["S"], &["a"], &["e"], "S", vec![Production::push("S", "S", "a")]);
        let v = validate(&g);
        assert!(v.iter().any(|v| v.message == "pushed symbol not an index"), "{:?}", v);
    }

    #[test]
    fn start_must_be_variable() {
        let g = IndexedGrammar::new("bad", &["A"], &["a"], &[], "S", vec![]);
        assert!(validate(&g).iter().any(|v| v.message == "start symbol not a variable"));
    }

    #[test]
    fn classify_special_and_linear() {
        let g = fixtures::sec5_grammar();
        let q = g.productions.iter().find(|p| p.rhs().map_or(false, |r| r.len() == 7)).unwrap();
        assert_eq!(g.classify(q), ProductionClass::Special);
        assert_eq!(g.classify(&g.productions[0]), ProductionClass::Linear);
    }
}
