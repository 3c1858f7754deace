//! Inverse projection, rational transductions, and inverse morphisms.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::{intersect_dfa, morphism_image, normalize_rhs, prune, split_rhs, Morphism, Names, TrioError};
use crate::automata::Nfa;
use crate::grammar::{IndexedGrammar, Production};
use crate::symbol::{Symbol, Word};

/// `π⁻¹(L(g))` for the projection of `extended` onto `g.terminals`: letters
/// of `extended` outside `g.terminals` may be inserted anywhere.
pub fn inverse_projection(g: &IndexedGrammar, extended: &[Symbol]) -> Result<IndexedGrammar, TrioError> {
    if let Some(a) = g.terminals.iter().find(|a| !extended.contains(a)) {
        return Err(TrioError::NotSuperset(a.clone()));
    }
    let extra: Vec<Symbol> = extended.iter().filter(|c| !g.terminals.contains(c)).cloned().collect();
    let g = super::rename_apart(g, &extra.iter().cloned().collect());
    let mut names = Names::new(g.all_names().into_iter().chain(extended.iter().cloned()));
    let mut variables = g.variables.clone();
    let mut productions = Vec::new();
    for (pi, p) in g.productions.iter().enumerate() {
        let Some(rhs) = p.rhs() else {
            productions.push(p.clone());
            continue;
        };
        let (segments, vars) = split_rhs(&g, rhs);
        let k = vars.len();
        // y[i][j] for segment i (0-based) and letters consumed j.
        let y: Vec<Vec<Symbol>> = segments
            .iter()
            .enumerate()
            .map(|(i, u)| (0..=u.len()).map(|j| names.fresh(&format!("Y#{}#{}#{}", pi, i + 1, j))).collect())
            .collect();
        variables.extend(y.iter().flatten().cloned());
        productions.push(p.with_rhs(y.iter().map(|row| row[0].clone()).collect()));
        for (i, u) in segments.iter().enumerate() {
            for (j, a) in u.iter().enumerate() {
                for c in &extra {
                    productions.push(Production::Plain { lhs: y[i][j].clone(), rhs: vec![c.clone(), y[i][j].clone()] });
                }
                productions.push(Production::Plain { lhs: y[i][j].clone(), rhs: vec![a.clone(), y[i][j + 1].clone()] });
            }
            let end = y[i][u.len()].clone();
            if i < k {
                productions.push(Production::Plain { lhs: end, rhs: vec![vars[i].clone()] });
            } else {
                for c in &extra {
                    productions.push(Production::Plain { lhs: end.clone(), rhs: vec![end.clone(), c.clone()] });
                    productions.push(Production::Plain { lhs: end.clone(), rhs: vec![c.clone()] });
                }
                productions.push(Production::Plain { lhs: end, rhs: Vec::new() });
            }
        }
    }
    let mut terminals = g.terminals.clone();
    terminals.extend(extra);
    Ok(IndexedGrammar { name: format!("{}^-1", g.name), variables, terminals, productions, ..g })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    In(usize),
    Out(usize),
    Empty,
}

/// A rational transduction given by an automaton whose moves read an
/// input letter, write an output letter, or do neither.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NivatTransducer {
    pub input: Vec<Symbol>,
    pub output: Vec<Symbol>,
    pub states: Vec<Symbol>,
    pub initial: BTreeSet<usize>,
    pub accepting: BTreeSet<usize>,
    pub transitions: Vec<(usize, Label, usize)>,
}

impl NivatTransducer {
    /// The transduction `x ↦ h⁻¹(x)` for `h` from `h.map`'s keys into `input`.
    pub fn inverse_of(h: &Morphism, input: &[Symbol]) -> Self {
        let output: Vec<Symbol> = h.map.keys().cloned().collect();
        let ix = |a: &Symbol| input.iter().position(|b| b == a).expect("image inside input alphabet");
        let mut states = vec![Symbol::new("q0")];
        let mut transitions = Vec::new();
        for (o, (x, w)) in h.map.iter().enumerate() {
            let mut from = 0;
            let mut label = Label::Out(o);
            for (j, a) in w.iter().enumerate() {
                states.push(Symbol::from(format!("q{}_{}", x, j)));
                let to = states.len() - 1;
                transitions.push((from, label, to));
                from = to;
                label = Label::In(ix(a));
            }
            transitions.push((from, label, 0));
        }
        NivatTransducer {
            input: input.to_vec(),
            output,
            states,
            initial: [0].into(),
            accepting: [0].into(),
            transitions,
        }
    }

    /// Every output word of length at most `max_out` for input `w`.
    pub fn apply_word(&self, w: &Word, max_out: usize) -> BTreeSet<Word> {
        let Some(w): Option<Vec<usize>> = w.iter().map(|a| self.input.iter().position(|b| b == a)).collect() else {
            return BTreeSet::new();
        };
        let mut out = BTreeSet::new();
        let mut seen: HashSet<(usize, usize, Vec<usize>)> = HashSet::new();
        let mut queue: VecDeque<(usize, usize, Vec<usize>)> = self.initial.iter().map(|&q| (q, 0, Vec::new())).collect();
        while let Some(cfg) = queue.pop_front() {
            if !seen.insert(cfg.clone()) {
                continue;
            }
            let (q, pos, written) = cfg;
            if pos == w.len() && self.accepting.contains(&q) {
                out.insert(written.iter().map(|&o| self.output[o].clone()).collect());
            }
            for &(p, label, r) in &self.transitions {
                if p != q {
                    continue;
                }
                match label {
                    Label::Empty => queue.push_back((r, pos, written.clone())),
                    Label::In(a) if pos < w.len() && w[pos] == a => queue.push_back((r, pos + 1, written.clone())),
                    Label::Out(o) if written.len() < max_out => {
                        let mut next = written.clone();
                        next.push(o);
                        queue.push_back((r, pos, next));
                    }
                    _ => {}
                }
            }
        }
        out
    }
}

/// `τ(L(g)) = π_out(π_in⁻¹(L(g)) ∩ R)`. Output letters are first copied
/// to names disjoint from the input side and mapped back at the end.
pub fn nivat_transduce(g: &IndexedGrammar, tau: &NivatTransducer) -> Result<IndexedGrammar, TrioError> {
    if let Some(a) = g.terminals.iter().find(|a| !tau.input.contains(a)) {
        return Err(TrioError::Transducer(format!("input alphabet lacks `{}`", a)));
    }
    let mut names = Names::new(g.all_names().into_iter().chain(tau.input.iter().cloned()));
    let copies: Vec<Symbol> = tau.output.iter().map(|o| names.fresh(o.as_str())).collect();
    // Input letters `g` never produces are dropped with their transitions.
    let kept: Vec<usize> = (0..tau.input.len()).filter(|&i| g.terminals.contains(&tau.input[i])).collect();
    let mut alphabet: Vec<Symbol> = kept.iter().map(|&i| tau.input[i].clone()).collect();
    alphabet.extend(copies.iter().cloned());
    let n_in = kept.len();
    let nfa = Nfa {
        states: tau.states.clone(),
        alphabet: alphabet.clone(),
        initial: tau.initial.clone(),
        accepting: tau.accepting.clone(),
        transitions: tau
            .transitions
            .iter()
            .filter_map(|&(p, l, q)| {
                let a = match l {
                    Label::In(a) => Some(kept.iter().position(|&i| i == a)?),
                    Label::Out(o) => Some(n_in + o),
                    Label::Empty => None,
                };
                Some((p, a, q))
            })
            .collect(),
    };
    let dfa = nfa.to_dfa();
    let widened = inverse_projection(g, &alphabet)?;
    let meet = prune(&intersect_dfa(&normalize_rhs(&widened), &dfa)?);
    let mut map: BTreeMap<Symbol, Word> = alphabet[..n_in].iter().map(|a| (a.clone(), Word::empty())).collect();
    for (c, o) in copies.iter().zip(&tau.output) {
        map.insert(c.clone(), Word(vec![o.clone()]));
    }
    let back = Morphism { map, target: tau.output.clone() };
    let mut out = morphism_image(&meet, &back)?;
    out.name = format!("tau({})", g.name);
    Ok(out)
}

/// `h⁻¹(L(g))` for `h` mapping its domain into `g.terminals`.
pub fn inverse_morphism(g: &IndexedGrammar, h: &Morphism) -> Result<IndexedGrammar, TrioError> {
    let mut input = g.terminals.clone();
    for a in h.map.values().flat_map(|w| w.iter()) {
        if !input.contains(a) {
            input.push(a.clone());
        }
    }
    nivat_transduce(g, &NivatTransducer::inverse_of(h, &input))
}
