//! Reversal-bounded counter machines, their reduction to one-reversal
//! counters, the counter-free expansion into a finite automaton, and the
//! Parikh image of a grammar intersected with a machine.
//!
//! File format:
//!
//! ```text
//! states: q0, q1, f
//! alphabet: a, b
//! counters: 1
//! reversals: 1
//! initial: q0
//! halt: f
//! trans: q0, a, (*) -> q0, (+)     # tests z, p or *; deltas +, - or 0
//! trans: q0, _, (*) -> q1, (0)
//! trans: q1, b, (p) -> q1, (-)
//! trans: q1, _, (z) -> f, (0)
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::automata::Nfa;
use crate::derivation::{enumerate_language, Budget, EngineError};
use crate::grammar::IndexedGrammar;
use crate::semilinear::{parikh, Tuple};
use crate::symbol::{Symbol, Word};
use crate::text::{self, Line, SyntaxError};
use crate::trio::{inverse_projection, intersect_dfa, normalize_rhs, prune, Names, TrioError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CounterError {
    #[error("machine has a counter with more than one reversal")]
    NotOneReversal,
    #[error("transition {0} has the wrong number of tests or deltas")]
    Arity(usize),
    #[error("letter `{0}` outside the input alphabet")]
    UnknownLetter(Symbol),
    #[error("run step {step} is illegal: {reason}")]
    IllegalRun { step: usize, reason: String },
    #[error("machine is missing `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Trio(#[from] TrioError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Test {
    Zero,
    Positive,
    Any,
}

impl Test {
    fn admits(self, v: u64) -> bool {
        match self {
            Test::Zero => v == 0,
            Test::Positive => v > 0,
            Test::Any => true,
        }
    }

    fn code(self) -> &'static str {
        match self {
            Test::Zero => "z",
            Test::Positive => "p",
            Test::Any => "*",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmTransition {
    pub from: usize,
    /// Index into the input alphabet; `None` for an ε-move.
    pub input: Option<usize>,
    pub tests: Vec<Test>,
    pub to: usize,
    /// Each entry is -1, 0 or +1.
    pub deltas: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterMachine {
    pub states: Vec<Symbol>,
    pub alphabet: Vec<Symbol>,
    pub counters: usize,
    pub reversals: Vec<usize>,
    pub transitions: Vec<CmTransition>,
    pub initial: usize,
    pub halt: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Dir {
    Still,
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Config {
    state: usize,
    pos: usize,
    values: Vec<u64>,
    dirs: Vec<Dir>,
    revs: Vec<usize>,
}

/// Why a transition cannot fire from a configuration.
fn fire(m: &CounterMachine, c: &Config, t: &CmTransition) -> Result<Config, String> {
    let mut next = c.clone();
    next.state = t.to;
    for i in 0..m.counters {
        if !t.tests[i].admits(c.values[i]) {
            return Err(format!("counter {} fails test {}", i + 1, t.tests[i].code()));
        }
        let d = match t.deltas[i] {
            0 => continue,
            1 => Dir::Up,
            _ => Dir::Down,
        };
        if d == Dir::Down && c.values[i] == 0 {
            return Err(format!("counter {} decremented at zero", i + 1));
        }
        if c.dirs[i] != Dir::Still && c.dirs[i] != d {
            next.revs[i] += 1;
            if next.revs[i] > m.reversals[i] {
                return Err(format!("counter {} exceeds {} reversals", i + 1, m.reversals[i]));
            }
        }
        next.dirs[i] = d;
        next.values[i] = if d == Dir::Up { c.values[i] + 1 } else { c.values[i] - 1 };
    }
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunVerdict {
    /// Transition indices of an accepting run.
    Accepted(Vec<usize>),
    Rejected,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunBudget {
    pub max_configs: usize,
    /// Counter value cap; `None` means `2|w| + 4`.
    pub counter_cap: Option<u64>,
}

impl Default for RunBudget {
    fn default() -> Self {
        RunBudget { max_configs: 200_000, counter_cap: None }
    }
}

impl CounterMachine {
    pub fn validate(&self) -> Result<(), CounterError> {
        if self.reversals.len() != self.counters {
            return Err(CounterError::Missing("one reversal bound per counter"));
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.tests.len() != self.counters || t.deltas.len() != self.counters {
                return Err(CounterError::Arity(i));
            }
        }
        Ok(())
    }

    fn initial_config(&self) -> Config {
        Config {
            state: self.initial,
            pos: 0,
            values: vec![0; self.counters],
            dirs: vec![Dir::Still; self.counters],
            revs: vec![0; self.counters],
        }
    }

    fn code(&self, w: &Word) -> Result<Vec<usize>, CounterError> {
        w.iter()
            .map(|a| self.alphabet.iter().position(|b| b == a).ok_or_else(|| CounterError::UnknownLetter(a.clone())))
            .collect()
    }

    pub fn is_one_reversal(&self) -> bool {
        self.reversals.iter().all(|&r| r <= 1)
    }
}

/// Breadth-first search over configurations. Rejection is reported only
/// when neither the counter cap nor the configuration budget cut anything.
pub fn ncm_run(m: &CounterMachine, w: &Word, budget: &RunBudget) -> Result<RunVerdict, CounterError> {
    m.validate()?;
    let word = m.code(w)?;
    let cap = budget.counter_cap.unwrap_or(2 * w.len() as u64 + 4);
    let start = m.initial_config();
    let mut parent: HashMap<Config, Option<(Config, usize)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    let mut cut = false;
    while let Some(c) = queue.pop_front() {
        if c.state == m.halt && c.pos == word.len() && c.values.iter().all(|&v| v == 0) {
            let mut run = Vec::new();
            let mut cur = &c;
            while let Some(Some((prev, t))) = parent.get(cur) {
                run.push(*t);
                cur = prev;
            }
            run.reverse();
            return Ok(RunVerdict::Accepted(run));
        }
        for (ti, t) in m.transitions.iter().enumerate() {
            if t.from != c.state {
                continue;
            }
            let pos = match t.input {
                None => c.pos,
                Some(a) if c.pos < word.len() && word[c.pos] == a => c.pos + 1,
                Some(_) => continue,
            };
            let Ok(mut next) = fire(m, &c, t) else { continue };
            next.pos = pos;
            if next.values.iter().any(|&v| v > cap) {
                cut = true;
                continue;
            }
            if parent.contains_key(&next) {
                continue;
            }
            if parent.len() >= budget.max_configs {
                cut = true;
                continue;
            }
            parent.insert(next.clone(), Some((c.clone(), ti)));
            queue.push_back(next);
        }
    }
    Ok(if cut { RunVerdict::Unknown } else { RunVerdict::Rejected })
}

/// Replays `run` on `w`, checking tests, zero decrements, reversal bounds
/// and acceptance.
pub fn audit_run(m: &CounterMachine, w: &Word, run: &[usize]) -> Result<(), CounterError> {
    let word = m.code(w)?;
    let mut c = m.initial_config();
    for (step, &ti) in run.iter().enumerate() {
        let illegal = |reason: String| CounterError::IllegalRun { step, reason };
        let t = m.transitions.get(ti).ok_or_else(|| illegal(format!("no transition {}", ti)))?;
        if t.from != c.state {
            return Err(illegal("transition leaves another state".into()));
        }
        if let Some(a) = t.input {
            if word.get(c.pos) != Some(&a) {
                return Err(illegal("input letter does not match".into()));
            }
        }
        let pos = c.pos + usize::from(t.input.is_some());
        c = fire(m, &c, t).map_err(illegal)?;
        c.pos = pos;
    }
    let done = c.state == m.halt && c.pos == word.len() && c.values.iter().all(|&v| v == 0);
    if done {
        Ok(())
    } else {
        Err(CounterError::IllegalRun { step: run.len(), reason: "run does not end accepting".into() })
    }
}

/// Numbers generated states and queues them for exploration.
struct Interner<K> {
    ids: HashMap<K, usize>,
    names: Names,
    states: Vec<Symbol>,
    queue: VecDeque<(usize, K)>,
}

impl<K: Clone + Eq + std::hash::Hash> Interner<K> {
    fn new(taken: impl IntoIterator<Item = Symbol>) -> Self {
        Interner { ids: HashMap::new(), names: Names::new(taken), states: Vec::new(), queue: VecDeque::new() }
    }

    fn get(&mut self, key: K, name: impl FnOnce() -> String) -> usize {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.fresh(&name());
        self.ids.insert(key.clone(), id);
        self.queue.push_back((id, key));
        id
    }

    fn fresh(&mut self, base: &str) -> usize {
        self.states.push(self.names.fresh(base));
        self.states.len() - 1
    }
}

/// Phase of an `r`-reversal counter during simulation by one-reversal
/// counters: which sweep it is in and whether it has turned down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Sweep {
    phase: usize,
    down: bool,
}

/// Replaces each counter with `r ≥ 2` reversals by `⌈(r+1)/2⌉` counters:
/// sweep `j` increments its own counter; decrements take any positive one
/// of the sweeps so far. Counters with `r ≤ 1` are kept as they are.
pub fn to_one_reversal(m: &CounterMachine) -> Result<CounterMachine, CounterError> {
    m.validate()?;
    if m.is_one_reversal() {
        return Ok(m.clone());
    }
    // New counter ids per old counter.
    let mut slots: Vec<Vec<usize>> = Vec::new();
    let mut n = 0;
    for &r in &m.reversals {
        let width = if r <= 1 { 1 } else { (r + 2) / 2 };
        slots.push((n..n + width).collect());
        n += width;
    }
    let tracked: Vec<usize> = (0..m.counters).filter(|&i| m.reversals[i] >= 2).collect();
    let mut st: Interner<(usize, Vec<Sweep>)> = Interner::new(m.states.iter().cloned());
    let tag = |q: usize, sw: &[Sweep]| {
        let t: Vec<String> = sw.iter().map(|s| format!("{}{}", s.phase + 1, if s.down { 'd' } else { 'u' })).collect();
        format!("{}<{}>", m.states[q], t.join("."))
    };
    let start_sweeps = vec![Sweep { phase: 0, down: false }; tracked.len()];
    let initial = st.get((m.initial, start_sweeps.clone()), || tag(m.initial, &start_sweeps));
    let mut transitions = Vec::new();
    let mut halting = Vec::new();
    while let Some((from, (q, sw))) = st.queue.pop_front() {
        if q == m.halt {
            halting.push(from);
        }
        for t in m.transitions.iter().filter(|t| t.from == q) {
            // Options per old counter: (tests, deltas) on its slots and new sweep.
            let mut next_sweeps = sw.clone();
            let mut options: Vec<Vec<(Vec<Test>, Vec<i8>)>> = Vec::new();
            let mut blocked = false;
            for i in 0..m.counters {
                let k = slots[i].len();
                let Some(ti) = tracked.iter().position(|&x| x == i) else {
                    options.push(vec![(vec![t.tests[i]], vec![t.deltas[i]])]);
                    continue;
                };
                let mut s = sw[ti];
                match t.deltas[i] {
                    1 if s.down => {
                        s = Sweep { phase: s.phase + 1, down: false };
                        if s.phase >= k {
                            blocked = true;
                        }
                    }
                    -1 => s.down = true,
                    _ => {}
                }
                next_sweeps[ti] = s;
                let live = s.phase.min(k - 1) + 1;
                let mut opts = Vec::new();
                match (t.tests[i], t.deltas[i]) {
                    (_, -1) => {
                        // Positive is implied by the decrement; zero would block.
                        if t.tests[i] != Test::Zero {
                            for j in 0..live {
                                let mut tests = vec![Test::Any; k];
                                tests[j] = Test::Positive;
                                let mut deltas = vec![0; k];
                                deltas[j] = -1;
                                opts.push((tests, deltas));
                            }
                        }
                    }
                    (test, d) => {
                        let mut deltas = vec![0; k];
                        if d == 1 {
                            deltas[s.phase.min(k - 1)] = 1;
                        }
                        match test {
                            Test::Any => opts.push((vec![Test::Any; k], deltas)),
                            Test::Zero => opts.push((vec![Test::Zero; k], deltas)),
                            Test::Positive => {
                                for j in 0..live {
                                    let mut tests = vec![Test::Any; k];
                                    tests[j] = Test::Positive;
                                    opts.push((tests, deltas.clone()));
                                }
                            }
                        }
                    }
                }
                options.push(opts);
            }
            if blocked {
                continue;
            }
            let to = st.get((t.to, next_sweeps.clone()), || tag(t.to, &next_sweeps));
            let mut combos: Vec<(Vec<Test>, Vec<i8>)> = vec![(Vec::new(), Vec::new())];
            for opts in &options {
                combos = combos
                    .iter()
                    .flat_map(|(ts, ds)| {
                        opts.iter().map(move |(t2, d2)| {
                            (ts.iter().chain(t2).copied().collect::<Vec<_>>(), ds.iter().chain(d2).copied().collect::<Vec<_>>())
                        })
                    })
                    .collect();
            }
            for (tests, deltas) in combos {
                transitions.push(CmTransition { from, input: t.input, tests, to, deltas });
            }
        }
    }
    let halt = st.fresh(&format!("{}'", m.states[m.halt]));
    for h in halting {
        transitions.push(CmTransition { from: h, input: None, tests: vec![Test::Any; n], to: halt, deltas: vec![0; n] });
    }
    Ok(CounterMachine {
        states: st.states,
        alphabet: m.alphabet.clone(),
        counters: n,
        reversals: vec![1; n],
        transitions,
        initial,
        halt,
    })
}

/// Phase of a one-reversal counter as guessed by the expansion automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Phase {
    /// Zero, never incremented.
    Fresh,
    /// Positive, still increasing.
    Up,
    /// Positive, decreasing.
    Down,
    /// Zero again after decreasing.
    Spent,
}

impl Phase {
    fn zero(self) -> bool {
        matches!(self, Phase::Fresh | Phase::Spent)
    }

    fn code(self) -> char {
        match self {
            Phase::Fresh => 'o',
            Phase::Up => 'u',
            Phase::Down => 'd',
            Phase::Spent => 'z',
        }
    }
}

/// The counter-free automaton over `A ∪ B` together with the letters
/// `p_i` (increment) and `q_i` (decrement) of `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub nfa: Nfa,
    pub input: Vec<Symbol>,
    pub inc: Vec<Symbol>,
    pub dec: Vec<Symbol>,
}

/// Simulates `m` with guessed counter phases: every increment of counter
/// `i` writes `p_i` and every decrement writes `q_i`, after the input
/// letter of the move. Acceptance at the halting state needs every counter
/// guessed zero; the guesses are right exactly when `|w|_{p_i} = |w|_{q_i}`.
pub fn expand_to_nfa(m: &CounterMachine) -> Result<Expansion, CounterError> {
    m.validate()?;
    if !m.is_one_reversal() {
        return Err(CounterError::NotOneReversal);
    }
    let k = m.counters;
    let mut names = Names::new(m.alphabet.iter().cloned());
    let inc: Vec<Symbol> = (1..=k).map(|i| names.fresh(&format!("p{}", i))).collect();
    let dec: Vec<Symbol> = (1..=k).map(|i| names.fresh(&format!("q{}", i))).collect();
    let mut alphabet = m.alphabet.clone();
    alphabet.extend(inc.iter().cloned());
    alphabet.extend(dec.iter().cloned());
    let n_in = m.alphabet.len();

    let mut st: Interner<(usize, Vec<Phase>)> = Interner::new(std::iter::empty());
    let tag = |q: usize, ph: &[Phase]| format!("{}<{}>", m.states[q], ph.iter().map(|p| p.code()).collect::<String>());
    let start = vec![Phase::Fresh; k];
    let initial = st.get((m.initial, start.clone()), || tag(m.initial, &start));
    let mut transitions: Vec<(usize, Option<usize>, usize)> = Vec::new();
    let mut accepting = BTreeSet::new();
    let mut chain = 0usize;
    while let Some((from, (q, ph))) = st.queue.pop_front() {
        if q == m.halt && ph.iter().all(|p| p.zero()) {
            accepting.insert(from);
        }
        'trans: for t in m.transitions.iter().filter(|t| t.from == q) {
            // Every phase vector the move may lead to, with its letters.
            let mut outcomes: Vec<(Vec<Phase>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
            for i in 0..k {
                let p = ph[i];
                let ok = match t.tests[i] {
                    Test::Zero => p.zero(),
                    Test::Positive => !p.zero(),
                    Test::Any => true,
                };
                if !ok {
                    continue 'trans;
                }
                let choices: Vec<(Phase, Option<usize>)> = match (t.deltas[i], p) {
                    (0, p) => vec![(p, None)],
                    (1, Phase::Fresh | Phase::Up) => vec![(Phase::Up, Some(n_in + i))],
                    (1, _) => continue 'trans,
                    (_, Phase::Up | Phase::Down) => vec![(Phase::Down, Some(n_in + k + i)), (Phase::Spent, Some(n_in + k + i))],
                    (_, _) => continue 'trans,
                };
                outcomes = outcomes
                    .iter()
                    .flat_map(|(phs, letters)| {
                        choices.iter().map(move |&(np, l)| {
                            let mut phs = phs.clone();
                            phs.push(np);
                            let mut letters = letters.clone();
                            letters.extend(l);
                            (phs, letters)
                        })
                    })
                    .collect();
            }
            for (nph, letters) in outcomes {
                let to = st.get((t.to, nph.clone()), || tag(t.to, &nph));
                let word: Vec<Option<usize>> = t.input.into_iter().chain(letters).map(Some).collect();
                if word.is_empty() {
                    transitions.push((from, None, to));
                    continue;
                }
                let mut cur = from;
                for (j, &a) in word.iter().enumerate() {
                    let next = if j + 1 == word.len() {
                        to
                    } else {
                        chain += 1;
                        st.fresh(&format!("~{}", chain))
                    };
                    transitions.push((cur, a, next));
                    cur = next;
                }
            }
        }
    }
    Ok(Expansion {
        nfa: Nfa { states: st.states, alphabet, initial: [initial].into(), accepting, transitions },
        input: m.alphabet.clone(),
        inc,
        dec,
    })
}

impl Expansion {
    /// Whether some `w'` accepted by the automaton with at most `max_extra`
    /// letters of `B` has `h(w') = x` and balanced `p_i`, `q_i` counts.
    pub fn certifies(&self, x: &Word, max_extra: usize) -> bool {
        let ix: HashMap<&Symbol, usize> = self.nfa.alphabet.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let Some(x): Option<Vec<usize>> = x.iter().map(|a| ix.get(a).copied().filter(|&i| i < self.input.len())).collect()
        else {
            return false;
        };
        let k = self.inc.len();
        let n_in = self.input.len();
        let mut out: Vec<Vec<(Option<usize>, usize)>> = vec![Vec::new(); self.nfa.states.len()];
        for &(p, a, q) in &self.nfa.transitions {
            out[p].push((a, q));
        }
        type Cfg = (usize, usize, Vec<i64>, usize);
        let mut seen: HashSet<Cfg> = HashSet::new();
        let mut queue: VecDeque<Cfg> = self.nfa.initial.iter().map(|&q| (q, 0, vec![0; k], 0)).collect();
        while let Some(cfg) = queue.pop_front() {
            if !seen.insert(cfg.clone()) {
                continue;
            }
            let (q, pos, bal, extra) = cfg;
            if pos == x.len() && self.nfa.accepting.contains(&q) && bal.iter().all(|&b| b == 0) {
                return true;
            }
            for &(a, r) in &out[q] {
                match a {
                    None => queue.push_back((r, pos, bal.clone(), extra)),
                    Some(a) if a < n_in => {
                        if pos < x.len() && x[pos] == a {
                            queue.push_back((r, pos + 1, bal.clone(), extra));
                        }
                    }
                    Some(a) if extra < max_extra => {
                        let mut bal = bal.clone();
                        if a < n_in + k {
                            bal[a - n_in] += 1;
                        } else {
                            bal[a - n_in - k] -= 1;
                        }
                        queue.push_back((r, pos, bal, extra + 1));
                    }
                    Some(_) => {}
                }
            }
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParikhIntersection {
    /// Vectors over the grammar alphabet from the automaton pipeline.
    pub vectors: BTreeSet<Tuple>,
    /// `ψ(L(g) ∩ L(m))` by enumeration and simulation.
    pub brute: BTreeSet<Tuple>,
    /// Both enumerations finished within budget.
    pub exhaustive: bool,
}

impl ParikhIntersection {
    pub fn agree(&self) -> bool {
        self.vectors == self.brute
    }
}

/// Parikh vectors of `L(g) ∩ L(m)` for words up to length `radius`:
/// insert `B` letters into `L(g)`, intersect with the expansion of the
/// one-reversal form of `m`, keep balanced words, and project onto the
/// letters of `g`. Words of the intersection are enumerated up to
/// `radius + extra` letters; `extra` is ignored when `m` has no counters.
pub fn parikh_of_intersection(
    g: &IndexedGrammar,
    m: &CounterMachine,
    radius: usize,
    extra: usize,
    budget: &Budget,
) -> Result<ParikhIntersection, CounterError> {
    if let Some(a) = g.terminals.iter().find(|a| !m.alphabet.contains(a)) {
        return Err(CounterError::UnknownLetter(a.clone()));
    }
    let letters = m.alphabet.clone();
    let one = to_one_reversal(m)?;
    let exp = expand_to_nfa(&one)?;
    let widened = inverse_projection(g, &exp.nfa.alphabet)?;
    let meet = prune(&intersect_dfa(&normalize_rhs(&widened), &exp.nfa.to_dfa())?);
    let extra = if exp.inc.is_empty() { 0 } else { extra };
    let e = enumerate_language(&meet, radius + extra, budget)?;
    let mut all = letters.clone();
    all.extend(exp.inc.iter().cloned());
    all.extend(exp.dec.iter().cloned());
    let n = letters.len();
    let k = exp.inc.len();
    let mut vectors = BTreeSet::new();
    for w in &e.words {
        let v = parikh(w, &all).expect("alphabet covers the intersection");
        if (0..k).all(|i| v[n + i] == v[n + k + i]) && v[..n].iter().sum::<u64>() as usize <= radius {
            vectors.insert(v[..n].to_vec());
        }
    }
    let lang = enumerate_language(g, radius, budget)?;
    let mut brute = BTreeSet::new();
    let mut runs_settled = true;
    for w in &lang.words {
        match ncm_run(m, w, &RunBudget::default())? {
            RunVerdict::Accepted(_) => {
                brute.insert(parikh(w, &letters).expect("grammar letters lie in the machine alphabet"));
            }
            RunVerdict::Rejected => {}
            RunVerdict::Unknown => runs_settled = false,
        }
    }
    Ok(ParikhIntersection { vectors, brute, exhaustive: e.exhaustive && lang.exhaustive && runs_settled })
}

fn parse_vector<'a, T>(line: &Line<'a>, s: &'a str, k: usize, item: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, SyntaxError> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| line.error(s, "expected `(…)`"))?;
    let parts: Vec<&str> = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(str::trim).collect() };
    if parts.len() != k {
        return Err(line.error(s, format!("expected {} entries", k)));
    }
    parts.iter().map(|p| item(p).ok_or_else(|| line.error(p, format!("unexpected `{}`", p)))).collect()
}

pub fn parse_machine(input: &str) -> Result<CounterMachine, CounterError> {
    let mut lists: BTreeMap<&str, Vec<Symbol>> = BTreeMap::new();
    let mut counters = None;
    let mut reversals = None;
    let mut trans = Vec::new();
    let all = text::lines(input);
    for line in &all {
        let (key, value) = line.key_value().ok_or_else(|| line.error(line.text, "expected `key: value`"))?;
        match key {
            "states" | "alphabet" | "initial" | "halt" => {
                lists.insert(key, text::symbol_list(line, value)?);
            }
            "counters" => counters = Some(value.parse::<usize>().map_err(|_| line.error(value, "expected a count"))?),
            "reversals" => {
                let rs: Result<Vec<usize>, _> =
                    if value.is_empty() { Ok(Vec::new()) } else { value.split(',').map(|r| r.trim().parse::<usize>()).collect() };
                reversals = Some(rs.map_err(|_| line.error(value, "expected reversal bounds"))?);
            }
            "trans" => trans.push((line.clone(), value)),
            other => return Err(line.error(line.text, format!("unknown key `{}`", other)).into()),
        }
    }
    let states = lists.remove("states").ok_or(CounterError::Missing("states:"))?;
    let alphabet = lists.remove("alphabet").unwrap_or_default();
    let counters = counters.unwrap_or(0);
    let reversals = reversals.unwrap_or_else(|| vec![1; counters]);
    let one = |key: &'static str, lists: &mut BTreeMap<&str, Vec<Symbol>>| -> Result<usize, CounterError> {
        let names = lists.remove(key).ok_or(CounterError::Missing(key))?;
        let [s] = names.as_slice() else { return Err(CounterError::Missing(key)) };
        states.iter().position(|t| t == s).ok_or(CounterError::Missing(key))
    };
    let initial = one("initial", &mut lists)?;
    let halt = one("halt", &mut lists)?;
    let mut transitions = Vec::new();
    for (line, value) in trans {
        let bad = || line.error(value, "expected `p, a|_, (tests) -> q, (deltas)`");
        let (lhs, rhs) = value.split_once("->").ok_or_else(bad)?;
        let mut l = lhs.splitn(3, ',');
        let (Some(p), Some(a), Some(tests)) = (l.next(), l.next(), l.next()) else { return Err(bad().into()) };
        let (q, deltas) = rhs.split_once(',').ok_or_else(bad)?;
        let state = |s: &str| states.iter().position(|t| t.as_str() == s.trim()).ok_or_else(|| line.error(s, "unknown state"));
        let input = match a.trim() {
            "_" => None,
            a => Some(alphabet.iter().position(|b| b.as_str() == a).ok_or_else(|| line.error(a, "unknown letter"))?),
        };
        let tests = parse_vector(&line, tests, counters, |t| match t {
            "z" => Some(Test::Zero),
            "p" => Some(Test::Positive),
            "*" => Some(Test::Any),
            _ => None,
        })?;
        let deltas = parse_vector(&line, deltas, counters, |d| match d {
            "+" => Some(1),
            "-" => Some(-1),
            "0" => Some(0),
            _ => None,
        })?;
        transitions.push(CmTransition { from: state(p)?, input, tests, to: state(q)?, deltas });
    }
    let m = CounterMachine { states, alphabet, counters, reversals, transitions, initial, halt };
    m.validate()?;
    Ok(m)
}

pub fn serialize_machine(m: &CounterMachine) -> String {
    let mut out = format!(
        "states: {}\nalphabet: {}\ncounters: {}\nreversals: {}\ninitial: {}\nhalt: {}\n",
        text::join(&m.states, ", "),
        text::join(&m.alphabet, ", "),
        m.counters,
        text::join(&m.reversals, ","),
        m.states[m.initial],
        m.states[m.halt]
    );
    for t in &m.transitions {
        let a = t.input.map_or("_".to_string(), |a| m.alphabet[a].to_string());
        let tests: Vec<&str> = t.tests.iter().map(|x| x.code()).collect();
        let deltas: Vec<&str> = t.deltas.iter().map(|&d| ["-", "0", "+"][(d + 1) as usize]).collect();
        out.push_str(&format!(
            "trans: {}, {}, ({}) -> {}, ({})\n",
            m.states[t.from],
            a,
            tests.join(","),
            m.states[t.to],
            deltas.join(",")
        ));
    }
    out
}

impl fmt::Display for RunVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunVerdict::Accepted(_) => f.write_str("Accepted"),
            RunVerdict::Rejected => f.write_str("Rejected"),
            RunVerdict::Unknown => f.write_str("Unknown"),
        }
    }
}
