//! Bounded exploration of the derivation relation.
//!
//! Every search starts from the start variable with an empty stack and
//! explores sentential forms breadth-first, deduplicating identical forms.
//! Forms are discarded when they can never terminate or when a lower bound
//! on their eventual yield exceeds the length of interest.

mod compiled;
mod search;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::grammar::{Derivation, IndexedGrammar};
use crate::symbol::Word;
use compiled::Compiled;
use search::Limits;

pub const DEFAULT_FRONTIER_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("search frontier exceeded the hard cap of {0} forms")]
    BudgetOverflow(usize),
    #[error("the word is not in the language")]
    NotAMember,
}

/// Search limits. `max_steps` bounds derivation length and is always set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: usize,
    pub max_width: Option<usize>,
    pub max_stack: Option<usize>,
    pub max_yield: Option<usize>,
    /// The caller asserts that the width and stack caps lose no successful
    /// derivation, so forms cut by them may be ignored when deciding.
    pub caps_exact: bool,
    pub frontier_cap: usize,
}

impl Budget {
    pub fn steps(max_steps: usize) -> Self {
        Budget {
            max_steps,
            max_width: None,
            max_stack: None,
            max_yield: None,
            caps_exact: false,
            frontier_cap: DEFAULT_FRONTIER_CAP,
        }
    }

    pub fn width(mut self, k: usize) -> Self {
        self.max_width = Some(k);
        self
    }

    pub fn stack(mut self, depth: usize) -> Self {
        self.max_stack = Some(depth);
        self
    }

    pub fn yield_len(mut self, n: usize) -> Self {
        self.max_yield = Some(n);
        self
    }

    pub fn exact(mut self) -> Self {
        self.caps_exact = true;
        self
    }

    pub fn frontier(mut self, cap: usize) -> Self {
        self.frontier_cap = cap;
        self
    }

    fn limits(&self, yield_bound: Option<usize>, target: Option<Vec<u32>>) -> Limits {
        let yield_bound = match (yield_bound, self.max_yield) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Limits {
            max_steps: self.max_steps,
            max_width: self.max_width,
            max_stack: self.max_stack,
            yield_bound,
            target,
            frontier_cap: self.frontier_cap,
            leftmost: self.max_width.is_none(),
        }
    }
}

/// What a search saw and which limits cut it short.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub forms: usize,
    pub truncated_steps: bool,
    pub truncated_width: bool,
    pub truncated_stack: bool,
}

impl SearchStats {
    /// Whether the explored space is complete for the budget: no step
    /// truncation, and width/stack truncation only under exact caps.
    pub fn conclusive(&self, budget: &Budget) -> bool {
        !self.truncated_steps && (budget.caps_exact || !(self.truncated_width || self.truncated_stack))
    }

    fn merge(&mut self, other: &SearchStats) {
        self.forms += other.forms;
        self.truncated_steps |= other.truncated_steps;
        self.truncated_width |= other.truncated_width;
        self.truncated_stack |= other.truncated_stack;
    }
}

/// A decision with its witness when one exists. Refuted membership and
/// proven uncontrolledness are established by exhaustion and carry none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proven(Option<Derivation>),
    Refuted(Option<Derivation>),
    Unknown,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Proven(_) => "proven",
            Verdict::Refuted(_) => "refuted",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn witness(&self) -> Option<&Derivation> {
        match self {
            Verdict::Proven(w) | Verdict::Refuted(w) => w.as_ref(),
            Verdict::Unknown => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    /// Length-lexicographic order.
    pub words: Vec<Word>,
    /// The word list is complete for the requested length.
    pub exhaustive: bool,
    pub stats: SearchStats,
}

/// A minimised quantity with the derivation attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measured {
    pub value: usize,
    pub witness: Derivation,
    /// Smaller values were ruled out conclusively.
    pub exact: bool,
    pub stats: SearchStats,
}

fn witness(g: &IndexedGrammar, moves: &[(usize, usize)]) -> Derivation {
    Derivation::replay(g, moves).expect("search moves replay")
}

pub fn enumerate_language(g: &IndexedGrammar, max_len: usize, budget: &Budget) -> Result<Enumeration, EngineError> {
    let c = Compiled::new(g);
    let Some(start) = c.start() else {
        return Ok(Enumeration { words: Vec::new(), exhaustive: true, stats: SearchStats::default() });
    };
    let lim = budget.limits(Some(max_len), None);
    let mut words = BTreeSet::new();
    let r = search::bfs(&c, start, &lim, |f| {
        words.insert(c.decode_word(f));
        false
    })?;
    Ok(Enumeration { words: words.into_iter().collect(), exhaustive: r.stats.conclusive(budget), stats: r.stats })
}

/// Per variable of `g`, whether it can derive some terminal word. A
/// `false` entry is certain; a `true` entry is an over-approximation.
pub fn live_variables(g: &IndexedGrammar) -> Vec<bool> {
    let c = Compiled::new(g);
    (0..g.variables.len()).map(|v| c.may_terminate(v)).collect()
}

/// Searches for a derivation of `w`.
pub fn membership(g: &IndexedGrammar, w: &Word, budget: &Budget) -> Result<Outcome, EngineError> {
    let c = Compiled::new(g);
    let (Some(start), Some(target)) = (c.start(), c.code_word(w)) else {
        return Ok(Outcome { verdict: Verdict::Refuted(None), stats: SearchStats::default() });
    };
    let lim = budget.limits(Some(w.len()), Some(target));
    let r = search::bfs(&c, start, &lim, |_| true)?;
    let verdict = match r.hit {
        Some(hit) => Verdict::Proven(Some(witness(g, &r.tree.path(hit)))),
        None if r.stats.conclusive(budget) => Verdict::Refuted(None),
        None => Verdict::Unknown,
    };
    Ok(Outcome { verdict, stats: r.stats })
}

/// Smallest width cap under which `w` is derivable. `Ok(None)` when
/// membership itself cannot be settled within the budget.
pub fn min_index(g: &IndexedGrammar, w: &Word, budget: &Budget) -> Result<Option<Measured>, EngineError> {
    let first = membership(g, w, budget)?;
    let mut stats = first.stats.clone();
    let upper = match first.verdict {
        Verdict::Proven(Some(d)) => d,
        Verdict::Refuted(_) => return Err(EngineError::NotAMember),
        _ => return Ok(None),
    };
    let mut exact = true;
    for k in 1..upper.index() {
        let capped = Budget { max_width: Some(k), ..budget.clone() };
        let r = membership(g, w, &capped)?;
        stats.merge(&r.stats);
        if let Verdict::Proven(Some(d)) = r.verdict {
            let value = d.index();
            return Ok(Some(Measured { value, witness: d, exact, stats }));
        }
        // Width truncation is the point of the capped search; anything else
        // leaves the answer for this k open.
        if r.stats.truncated_steps || (r.stats.truncated_stack && !budget.caps_exact) {
            exact = false;
        }
    }
    Ok(Some(Measured { value: upper.index(), witness: upper, exact, stats }))
}

/// Looks for a successful derivation passing through a form of width
/// greater than `k`. Refuted carries such a derivation; Proven means the
/// budgeted space was exhausted without one.
pub fn check_uncontrolled(g: &IndexedGrammar, k: usize, budget: &Budget) -> Result<Outcome, EngineError> {
    let c = Compiled::new(g);
    let Some(start) = c.start() else {
        return Ok(Outcome { verdict: Verdict::Proven(None), stats: SearchStats::default() });
    };
    let lim = Limits { leftmost: false, ..budget.limits(None, None) };
    let r = search::widest_first(&c, start, k, &lim)?;
    let verdict = match r.witness {
        Some(moves) => Verdict::Refuted(Some(witness(g, &moves))),
        None if !r.undecided && r.stats.conclusive(budget) => Verdict::Proven(None),
        None => Verdict::Unknown,
    };
    Ok(Outcome { verdict, stats: r.stats })
}

/// Fewest special productions over derivations of `w`. `Ok(None)` when
/// the budget runs out before membership is settled.
pub fn special_count_min(g: &IndexedGrammar, w: &Word, budget: &Budget) -> Result<Option<Measured>, EngineError> {
    let c = Compiled::new(g);
    let (Some(start), Some(target)) = (c.start(), c.code_word(w)) else {
        return Err(EngineError::NotAMember);
    };
    let lim = budget.limits(Some(w.len()), Some(target));
    let (found, stats) = search::min_special(&c, start, &lim, |_| true)?;
    match found {
        Some((value, moves)) => {
            let exact = stats.conclusive(budget);
            Ok(Some(Measured { value, witness: witness(g, &moves), exact, stats }))
        }
        None if stats.conclusive(budget) => Err(EngineError::NotAMember),
        None => Ok(None),
    }
}
