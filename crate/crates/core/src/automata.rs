//! Finite automata over symbol alphabets.
//!
//! File format (`_` as a letter is an empty move, NFA only):
//!
//! ```text
//! states: q0, q1
//! alphabet: a, b
//! initial: q0
//! accepting: q1
//! trans: q0 a -> q1
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::symbol::{Symbol, Word};
use crate::text::{self, SyntaxError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("transition function not total: no move from `{state}` on `{letter}`")]
    NotTotal { state: Symbol, letter: Symbol },
    #[error("not deterministic at state `{0}`")]
    NotDeterministic(Symbol),
    #[error("unknown state `{0}`")]
    UnknownState(Symbol),
    #[error("unknown letter `{0}`")]
    UnknownLetter(Symbol),
}

/// Nondeterministic automaton; `None` labels are empty moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    pub states: Vec<Symbol>,
    pub alphabet: Vec<Symbol>,
    pub initial: BTreeSet<usize>,
    pub accepting: BTreeSet<usize>,
    pub transitions: Vec<(usize, Option<usize>, usize)>,
}

/// Complete deterministic automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub states: Vec<Symbol>,
    pub alphabet: Vec<Symbol>,
    /// `delta[q][a]`, indexed by state and letter position.
    delta: Vec<Vec<usize>>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    letter_ix: HashMap<Symbol, usize>,
}

impl Dfa {
    pub fn new(
        states: Vec<Symbol>,
        alphabet: Vec<Symbol>,
        delta: Vec<Vec<usize>>,
        initial: usize,
        accepting: Vec<bool>,
    ) -> Result<Self, AutomatonError> {
        for (q, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() || row.iter().any(|&t| t >= states.len()) {
                let letter = alphabet.get(row.len()).cloned().unwrap_or_else(|| Symbol::new("?"));
                return Err(AutomatonError::NotTotal { state: states[q].clone(), letter });
            }
        }
        if delta.len() != states.len() || accepting.len() != states.len() || initial >= states.len() {
            return Err(AutomatonError::UnknownState(Symbol::new("?")));
        }
        let letter_ix = alphabet.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Ok(Dfa { states, alphabet, delta, initial, accepting, letter_ix })
    }

    /// One state accepting every word over `alphabet`.
    pub fn universal(alphabet: &[Symbol]) -> Self {
        let delta = vec![vec![0; alphabet.len()]];
        Dfa::new(vec![Symbol::new("q0")], alphabet.to_vec(), delta, 0, vec![true]).expect("total")
    }

    pub fn empty(alphabet: &[Symbol]) -> Self {
        let delta = vec![vec![0; alphabet.len()]];
        Dfa::new(vec![Symbol::new("q0")], alphabet.to_vec(), delta, 0, vec![false]).expect("total")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn letter(&self, a: &Symbol) -> Option<usize> {
        self.letter_ix.get(a).copied()
    }

    pub fn step(&self, q: usize, a: &Symbol) -> Option<usize> {
        self.letter(a).map(|i| self.delta[q][i])
    }

    /// Extended transition function; `None` on a letter outside the alphabet.
    pub fn run<'a>(&self, q: usize, word: impl IntoIterator<Item = &'a Symbol>) -> Option<usize> {
        word.into_iter().try_fold(q, |q, a| self.step(q, a))
    }

    pub fn accepts(&self, w: &Word) -> bool {
        self.run(self.initial, w.iter()).map_or(false, |q| self.accepting[q])
    }

    pub fn to_nfa(&self) -> Nfa {
        let mut transitions = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (a, &t) in row.iter().enumerate() {
                transitions.push((q, Some(a), t));
            }
        }
        Nfa {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            initial: [self.initial].into(),
            accepting: (0..self.len()).filter(|&q| self.accepting[q]).collect(),
            transitions,
        }
    }

    pub fn parse(input: &str) -> Result<Self, AutomatonError> {
        Nfa::parse(input)?.as_dfa()
    }

    pub fn serialize(&self) -> String {
        self.to_nfa().serialize()
    }
}

impl Nfa {
    fn successors(&self) -> Vec<Vec<(Option<usize>, usize)>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for &(p, a, q) in &self.transitions {
            out[p].push((a, q));
        }
        out
    }

    fn closure(succ: &[Vec<(Option<usize>, usize)>], set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(p) = stack.pop() {
            for &(a, q) in &succ[p] {
                if a.is_none() && set.insert(q) {
                    stack.push(q);
                }
            }
        }
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let succ = self.successors();
        let ix: HashMap<&Symbol, usize> = self.alphabet.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let mut cur = self.initial.clone();
        Self::closure(&succ, &mut cur);
        for s in w.iter() {
            let Some(&a) = ix.get(s) else { return false };
            let mut next: BTreeSet<usize> =
                cur.iter().flat_map(|&p| succ[p].iter().filter(|(b, _)| *b == Some(a)).map(|&(_, q)| q)).collect();
            Self::closure(&succ, &mut next);
            cur = next;
        }
        cur.iter().any(|q| self.accepting.contains(q))
    }

    /// Reads the automaton as a DFA without changing its states.
    pub fn as_dfa(&self) -> Result<Dfa, AutomatonError> {
        if self.initial.len() != 1 {
            return Err(AutomatonError::NotDeterministic(Symbol::new("initial")));
        }
        let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; self.alphabet.len()]; self.states.len()];
        for &(p, a, q) in &self.transitions {
            let Some(a) = a else { return Err(AutomatonError::NotDeterministic(self.states[p].clone())) };
            match delta[p][a] {
                Some(t) if t != q => return Err(AutomatonError::NotDeterministic(self.states[p].clone())),
                _ => delta[p][a] = Some(q),
            }
        }
        let mut full = Vec::with_capacity(delta.len());
        for (p, row) in delta.into_iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (a, t) in row.into_iter().enumerate() {
                match t {
                    Some(t) => r.push(t),
                    None => {
                        return Err(AutomatonError::NotTotal {
                            state: self.states[p].clone(),
                            letter: self.alphabet[a].clone(),
                        })
                    }
                }
            }
            full.push(r);
        }
        let initial = *self.initial.iter().next().expect("one initial state");
        let accepting = (0..self.states.len()).map(|q| self.accepting.contains(&q)).collect();
        Dfa::new(self.states.clone(), self.alphabet.clone(), full, initial, accepting)
    }

    /// Subset construction over the reachable subsets; the empty subset
    /// serves as the sink, so the result is total.
    pub fn determinize(&self) -> Dfa {
        let succ = self.successors();
        let mut start = self.initial.clone();
        Self::closure(&succ, &mut start);
        let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert(start.clone(), 0);
        sets.push(start);
        queue.push_back(0);
        while let Some(i) = queue.pop_front() {
            let mut row = Vec::with_capacity(self.alphabet.len());
            for a in 0..self.alphabet.len() {
                let mut next: BTreeSet<usize> = sets[i]
                    .iter()
                    .flat_map(|&p| succ[p].iter().filter(|(b, _)| *b == Some(a)).map(|&(_, q)| q))
                    .collect();
                Self::closure(&succ, &mut next);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = sets.len();
                        ids.insert(next.clone(), id);
                        sets.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                row.push(id);
            }
            delta.push(row);
        }
        let states = sets
            .iter()
            .map(|s| Symbol::from(format!("{{{}}}", s.iter().map(|&q| self.states[q].as_str()).collect::<Vec<_>>().join("|"))))
            .collect();
        let accepting = sets.iter().map(|s| s.iter().any(|q| self.accepting.contains(q))).collect();
        Dfa::new(states, self.alphabet.clone(), delta, 0, accepting).expect("subset construction is total")
    }

    /// The automaton as a DFA: unchanged when already deterministic and
    /// total, otherwise by subset construction.
    pub fn to_dfa(&self) -> Dfa {
        self.as_dfa().unwrap_or_else(|_| self.determinize())
    }

    pub fn parse(input: &str) -> Result<Self, AutomatonError> {
        let mut states = None;
        let mut alphabet = None;
        let mut initial_names = None;
        let mut accepting_names = None;
        let mut trans = Vec::new();
        for line in text::lines(input) {
            let (key, value) = line.key_value().ok_or_else(|| line.error(line.text, "expected `key: value`"))?;
            let slot = match key {
                "states" => &mut states,
                "alphabet" => &mut alphabet,
                "initial" => &mut initial_names,
                "accepting" => &mut accepting_names,
                "trans" => {
                    let (lhs, rhs) =
                        value.split_once("->").ok_or_else(|| line.error(value, "expected `p a -> q`"))?;
                    let parts: Vec<&str> = lhs.split_whitespace().collect();
                    let target = rhs.trim();
                    if parts.len() != 2 || target.is_empty() {
                        return Err(line.error(value, "expected `p a -> q`").into());
                    }
                    trans.push((line.clone(), parts[0], parts[1], target));
                    continue;
                }
                other => return Err(line.error(line.text, format!("unknown key `{}`", other)).into()),
            };
            if slot.is_some() {
                return Err(line.error(line.text, format!("duplicate `{}:` line", key)).into());
            }
            *slot = Some(text::symbol_list(&line, value)?);
        }
        let missing = |k: &str| SyntaxError::new(0, 0, format!("missing `{}:` line", k));
        let states: Vec<Symbol> = states.ok_or_else(|| missing("states"))?;
        let alphabet: Vec<Symbol> = alphabet.ok_or_else(|| missing("alphabet"))?;
        let state_ix: HashMap<&Symbol, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let letter_ix: HashMap<&Symbol, usize> = alphabet.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let find = |s: &Symbol| state_ix.get(s).copied().ok_or_else(|| AutomatonError::UnknownState(s.clone()));
        let initial = initial_names
            .ok_or_else(|| missing("initial"))?
            .iter()
            .map(find)
            .collect::<Result<BTreeSet<_>, _>>()?;
        let accepting =
            accepting_names.unwrap_or_default().iter().map(find).collect::<Result<BTreeSet<_>, _>>()?;
        let mut transitions = Vec::new();
        for (line, p, a, q) in trans {
            let ps = find(&Symbol::new(p)).map_err(|_| line.error(p, format!("unknown state `{}`", p)))?;
            let qs = find(&Symbol::new(q)).map_err(|_| line.error(q, format!("unknown state `{}`", q)))?;
            let letter = if a == "_" {
                None
            } else {
                Some(
                    *letter_ix
                        .get(&Symbol::new(a))
                        .ok_or_else(|| line.error(a, format!("unknown letter `{}`", a)))?,
                )
            };
            transitions.push((ps, letter, qs));
        }
        Ok(Nfa { states, alphabet, initial, accepting, transitions })
    }

    pub fn serialize(&self) -> String {
        let names = |set: &BTreeSet<usize>| set.iter().map(|&q| self.states[q].as_str()).collect::<Vec<_>>().join(", ");
        let mut out = format!(
            "states: {}\nalphabet: {}\ninitial: {}\naccepting: {}\n",
            text::join(&self.states, ", "),
            text::join(&self.alphabet, ", "),
            names(&self.initial),
            names(&self.accepting)
        );
        for &(p, a, q) in &self.transitions {
            let a = a.map_or("_", |a| self.alphabet[a].as_str());
            out.push_str(&format!("trans: {} {} -> {}\n", self.states[p], a, self.states[q]));
        }
        out
    }
}
