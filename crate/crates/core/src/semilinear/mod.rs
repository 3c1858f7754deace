//! Linear and semilinear sets, Parikh and Ginsburg maps, decision
//! procedures through tuple automata, and grammars for bounded languages.

mod synth;
mod text;
mod tuple;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::symbol::{Symbol, Word};

pub use synth::{linear_to_grammar, semilinear_to_grammar};
pub use text::{parse_semilinear, parse_shape, serialize_semilinear, SemilinearFile};
pub use tuple::{decode, encode, equation_automaton, Tuple, TupleAutomaton};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemilinearError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("track mismatch: expected {expected}, found {found}")]
    TrackMismatch { expected: usize, found: usize },
    #[error("letter `{0}` outside the alphabet")]
    LetterOutsideAlphabet(Symbol),
    #[error("shape words must be nonempty and there must be at least one")]
    BadShape,
    #[error("syntax error at {0}")]
    Syntax(#[from] crate::text::SyntaxError),
}

/// `b₀ + {b₁, …, b_ℓ}^⊕`. Zero periods are dropped on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSet {
    pub base: Tuple,
    pub periods: Vec<Tuple>,
}

impl LinearSet {
    pub fn new(base: Tuple, periods: Vec<Tuple>) -> Result<Self, SemilinearError> {
        if let Some(p) = periods.iter().find(|p| p.len() != base.len()) {
            return Err(SemilinearError::DimensionMismatch { expected: base.len(), found: p.len() });
        }
        let periods = periods.into_iter().filter(|p| p.iter().any(|&x| x != 0)).collect();
        Ok(LinearSet { base, periods })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// Tracks `v₁..v_k, x₁..x_ℓ` with `v_j - Σ x_i b_ij = b_0j`, then the
    /// `x` tracks projected away.
    pub fn automaton(&self) -> TupleAutomaton {
        let k = self.dim();
        let m = k + self.periods.len();
        let rows: Vec<(Vec<i64>, i64)> = (0..k)
            .map(|j| {
                let mut a = vec![0i64; m];
                a[j] = 1;
                for (i, p) in self.periods.iter().enumerate() {
                    a[k + i] = -(p[j] as i64);
                }
                (a, self.base[j] as i64)
            })
            .collect();
        let sys = TupleAutomaton::equations(m, &rows);
        if self.periods.is_empty() {
            sys
        } else {
            sys.project_tracks(&(0..k).collect::<Vec<_>>()).expect("tracks in range")
        }
    }
}

impl fmt::Display for LinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "base = {}; periods = {}", tuple_str(&self.base), self.periods.iter().map(|p| tuple_str(p)).collect::<Vec<_>>().join(","))
    }
}

pub fn tuple_str(v: &[u64]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

/// A finite union of linear sets of one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearSet {
    pub dim: usize,
    pub components: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn new(dim: usize, components: Vec<LinearSet>) -> Result<Self, SemilinearError> {
        if let Some(c) = components.iter().find(|c| c.dim() != dim) {
            return Err(SemilinearError::DimensionMismatch { expected: dim, found: c.dim() });
        }
        Ok(SemilinearSet { dim, components })
    }

    pub fn linear(l: LinearSet) -> Self {
        SemilinearSet { dim: l.dim(), components: vec![l] }
    }

    pub fn automaton(&self) -> TupleAutomaton {
        self.components
            .iter()
            .map(LinearSet::automaton)
            .reduce(|a, b| a.union(&b).expect("uniform dimension"))
            .unwrap_or_else(|| TupleAutomaton::empty(self.dim))
    }

    /// Membership by direct search on every component.
    pub fn contains(&self, v: &[u64]) -> bool {
        self.components.iter().any(|c| diophantine_member(v, c))
    }
}

/// Nonempty words `u₁..u_k` for the Ginsburg map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GinsburgShape {
    pub words: Vec<Word>,
}

impl GinsburgShape {
    pub fn new(words: Vec<Word>) -> Result<Self, SemilinearError> {
        if words.is_empty() || words.iter().any(|w| w.is_empty()) {
            return Err(SemilinearError::BadShape);
        }
        Ok(GinsburgShape { words })
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    /// Letters in order of first occurrence.
    pub fn alphabet(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for s in self.words.iter().flat_map(|w| w.iter()) {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
        out
    }
}

impl fmt::Display for GinsburgShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.words.iter().map(|w| w.to_string()).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Letter counts of `w` in the order of `alphabet`.
pub fn parikh(w: &Word, alphabet: &[Symbol]) -> Result<Tuple, SemilinearError> {
    let ix: HashMap<&Symbol, usize> = alphabet.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut v = vec![0u64; alphabet.len()];
    for s in w.iter() {
        let i = ix.get(s).ok_or_else(|| SemilinearError::LetterOutsideAlphabet(s.clone()))?;
        v[*i] += 1;
    }
    Ok(v)
}

/// `u₁^{ℓ₁} ··· u_k^{ℓ_k}`.
pub fn ginsburg_apply(shape: &GinsburgShape, v: &[u64]) -> Result<Word, SemilinearError> {
    if v.len() != shape.dim() {
        return Err(SemilinearError::DimensionMismatch { expected: shape.dim(), found: v.len() });
    }
    let mut out = Vec::new();
    for (u, &n) in shape.words.iter().zip(v) {
        for _ in 0..n {
            out.extend(u.iter().cloned());
        }
    }
    Ok(Word(out))
}

/// Whether `v = b₀ + Σ xᵢ bᵢ` has a solution `x ≥ 0`, by bounded search.
pub fn diophantine_member(v: &[u64], l: &LinearSet) -> bool {
    if v.len() != l.dim() || v.iter().zip(&l.base).any(|(a, b)| a < b) {
        return false;
    }
    let rest: Vec<u64> = v.iter().zip(&l.base).map(|(a, b)| a - b).collect();
    fn go(rest: &mut Vec<u64>, periods: &[Tuple]) -> bool {
        let Some((p, tail)) = periods.split_first() else {
            return rest.iter().all(|&x| x == 0);
        };
        let bound = p.iter().zip(rest.iter()).filter(|(b, _)| **b > 0).map(|(b, r)| r / b).min().unwrap_or(0);
        for x in 0..=bound {
            for (r, b) in rest.iter_mut().zip(p) {
                *r -= x * b;
            }
            let ok = go(rest, tail);
            for (r, b) in rest.iter_mut().zip(p) {
                *r += x * b;
            }
            if ok {
                return true;
            }
        }
        false
    }
    let mut rest = rest;
    go(&mut rest, &l.periods)
}

/// Outcome of a set-level decision; `Refuted` carries a counterexample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetVerdict {
    Proven,
    Refuted(Tuple),
}

fn same_dim(a: &SemilinearSet, b: &SemilinearSet) -> Result<(), SemilinearError> {
    if a.dim == b.dim {
        Ok(())
    } else {
        Err(SemilinearError::DimensionMismatch { expected: a.dim, found: b.dim })
    }
}

pub fn slset_member(v: &[u64], s: &SemilinearSet) -> Result<bool, SemilinearError> {
    if v.len() != s.dim {
        return Err(SemilinearError::DimensionMismatch { expected: s.dim, found: v.len() });
    }
    s.automaton().accepts(v)
}

/// `s1 ⊆ s2`, decided by emptiness of `s1 ∩ ¬s2`.
pub fn slset_subset(s1: &SemilinearSet, s2: &SemilinearSet) -> Result<SetVerdict, SemilinearError> {
    same_dim(s1, s2)?;
    let diff = s1.automaton().product(&s2.automaton().complement())?;
    Ok(match diff.is_empty() {
        None => SetVerdict::Proven,
        Some(w) => SetVerdict::Refuted(w),
    })
}

pub fn slset_equal(s1: &SemilinearSet, s2: &SemilinearSet) -> Result<SetVerdict, SemilinearError> {
    match slset_subset(s1, s2)? {
        SetVerdict::Proven => slset_subset(s2, s1),
        refuted => Ok(refuted),
    }
}

/// Proven when `s` is empty; otherwise Refuted with a member.
pub fn slset_empty(s: &SemilinearSet) -> SetVerdict {
    match s.automaton().is_empty() {
        None => SetVerdict::Proven,
        Some(v) => SetVerdict::Refuted(v),
    }
}

/// Whether some factorisation `w = u₁^{ℓ₁}···u_k^{ℓ_k}` has `ℓ ∈ s`.
pub fn bounded_word_member(w: &Word, shape: &GinsburgShape, s: &SemilinearSet) -> Result<bool, SemilinearError> {
    if shape.dim() != s.dim {
        return Err(SemilinearError::DimensionMismatch { expected: shape.dim(), found: s.dim });
    }
    let w = w.symbols();
    // dead[(i, pos)]: no factorisation of w[pos..] by u_i..u_k.
    let mut dead: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    fn go(
        i: usize,
        pos: usize,
        w: &[Symbol],
        shape: &GinsburgShape,
        s: &SemilinearSet,
        ell: &mut Vec<u64>,
        dead: &mut std::collections::HashSet<(usize, usize)>,
    ) -> (bool, bool) {
        // Returns (accepted, some factorisation reached the end).
        if i == shape.dim() {
            return if pos == w.len() { (s.contains(ell), true) } else { (false, false) };
        }
        if dead.contains(&(i, pos)) {
            return (false, false);
        }
        let u = shape.words[i].symbols();
        let mut p = pos;
        let mut n = 0u64;
        let mut reached = false;
        loop {
            ell.push(n);
            let (ok, r) = go(i + 1, p, w, shape, s, ell, dead);
            ell.pop();
            reached |= r;
            if ok {
                return (true, true);
            }
            if w.len() - p >= u.len() && &w[p..p + u.len()] == u {
                p += u.len();
                n += 1;
            } else {
                break;
            }
        }
        if !reached {
            dead.insert((i, pos));
        }
        (false, reached)
    }
    Ok(go(0, 0, w, shape, s, &mut Vec::new(), &mut dead).0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedVerdict {
    Proven,
    Refuted(Word),
    /// Every word of the left language up to this length lies in the right one.
    VerifiedUpTo(usize),
}

/// Tuples `v` with `Σ vᵢ·weightᵢ ≤ budget`, by total sum and then
/// lexicographically.
pub fn weighted_tuples(weights: &[usize], budget: usize) -> Vec<Tuple> {
    let mut out = Vec::new();
    fn go(weights: &[usize], budget: usize, cur: &mut Tuple, out: &mut Vec<Tuple>) {
        if cur.len() == weights.len() {
            out.push(cur.clone());
            return;
        }
        let w = weights[cur.len()].max(1);
        for x in 0..=(budget / w) {
            cur.push(x as u64);
            go(weights, budget - x * w, cur, out);
            cur.pop();
        }
    }
    go(weights, budget, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.iter().sum::<u64>().cmp(&b.iter().sum::<u64>()).then_with(|| a.cmp(b)));
    out
}

/// `φ₁(s1) ⊆ φ₂(s2)`: Proven by set inclusion when the shapes agree,
/// otherwise checked word by word up to length `check_len`.
pub fn bounded_lang_subset(
    shape1: &GinsburgShape,
    s1: &SemilinearSet,
    shape2: &GinsburgShape,
    s2: &SemilinearSet,
    check_len: usize,
) -> Result<BoundedVerdict, SemilinearError> {
    if shape1.dim() != s1.dim {
        return Err(SemilinearError::DimensionMismatch { expected: shape1.dim(), found: s1.dim });
    }
    if shape1 == shape2 && slset_subset(s1, s2)? == SetVerdict::Proven {
        return Ok(BoundedVerdict::Proven);
    }
    let a1 = s1.automaton();
    let weights: Vec<usize> = shape1.words.iter().map(Word::len).collect();
    let mut seen = std::collections::BTreeSet::new();
    for v in weighted_tuples(&weights, check_len) {
        if !a1.accepts(&v)? {
            continue;
        }
        let w = ginsburg_apply(shape1, &v)?;
        if seen.insert(w.clone()) && !bounded_word_member(&w, shape2, s2)? {
            return Ok(BoundedVerdict::Refuted(w));
        }
    }
    Ok(BoundedVerdict::VerifiedUpTo(check_len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sec5() -> (GinsburgShape, SemilinearSet) {
        let shape = GinsburgShape::new(["a", "b", "c", "$", "a", "b", "c"].iter().map(|w| Word::parse(w)).collect()).unwrap();
        let l = LinearSet::new(vec![0, 0, 0, 1, 0, 0, 0], vec![vec![1, 1, 1, 0, 1, 1, 1]]).unwrap();
        (shape, SemilinearSet::linear(l))
    }

    fn lin(base: &[u64], periods: &[&[u64]]) -> SemilinearSet {
        SemilinearSet::linear(LinearSet::new(base.to_vec(), periods.iter().map(|p| p.to_vec()).collect()).unwrap())
    }

    #[test]
    fn parikh_vectors() {
        let abc: Vec<Symbol> = ["a", "b", "c", "$"].iter().map(|s| Symbol::new(s)).collect();
        assert_eq!(parikh(&Word::parse("abc$abc"), &abc).unwrap(), vec![2, 2, 2, 1]);
        assert_eq!(parikh(&Word::empty(), &abc).unwrap(), vec![0; 4]);
        assert_eq!(parikh(&Word::parse("abaabaaa"), &abc[..2]).unwrap(), vec![6, 2]);
        assert!(parikh(&Word::parse("x"), &abc).is_err());
    }

    #[test]
    fn ginsburg_map() {
        let (shape, _) = sec5();
        assert_eq!(ginsburg_apply(&shape, &[1; 7]).unwrap(), Word::parse("abc$abc"));
        assert_eq!(ginsburg_apply(&shape, &[0; 7]).unwrap(), Word::empty());
        let ab = GinsburgShape::new(vec![Word::parse("ab")]).unwrap();
        assert_eq!(ginsburg_apply(&ab, &[3]).unwrap(), Word::parse("ababab"));
        assert!(GinsburgShape::new(vec![Word::empty()]).is_err());
    }

    #[test]
    fn diophantine_oracle() {
        let (_, s) = sec5();
        let l = &s.components[0];
        assert!(diophantine_member(&[3, 3, 3, 1, 3, 3, 3], l));
        assert!(!diophantine_member(&[2, 3, 3, 1, 3, 3, 3], l));
        assert!(diophantine_member(&l.base, l));
    }

    #[test]
    fn zero_periods_dropped() {
        let l = LinearSet::new(vec![1, 1], vec![vec![0, 0], vec![1, 0]]).unwrap();
        assert_eq!(l.periods, vec![vec![1, 0]]);
    }

    #[test]
    fn linear_set_automaton() {
        let (_, s) = sec5();
        let a = s.automaton();
        assert!(a.accepts(&[2, 2, 2, 1, 2, 2, 2]).unwrap());
        assert!(!a.accepts(&[0; 7]).unwrap());
        assert!(slset_member(&[4, 4, 4, 1, 4, 4, 4], &s).unwrap());
        let l = lin(&[1, 0], &[&[2, 1], &[0, 3]]);
        let a = l.automaton();
        for x in 0..=8 {
            for y in 0..=8 {
                assert_eq!(a.accepts(&[x, y]).unwrap(), l.contains(&[x, y]), "({}, {})", x, y);
            }
        }
    }

    #[test]
    fn subset_decisions() {
        let diag = lin(&[0, 0], &[&[1, 1]]);
        let quad = lin(&[0, 0], &[&[1, 0], &[0, 1]]);
        assert_eq!(slset_subset(&diag, &quad).unwrap(), SetVerdict::Proven);
        assert_eq!(slset_subset(&quad, &diag).unwrap(), SetVerdict::Refuted(vec![1, 0]));
        assert_eq!(slset_subset(&diag, &diag).unwrap(), SetVerdict::Proven);
        let both = SemilinearSet::new(2, [diag.components.clone(), diag.components.clone()].concat()).unwrap();
        assert_eq!(slset_equal(&both, &diag).unwrap(), SetVerdict::Proven);
        assert_eq!(slset_empty(&SemilinearSet::new(2, vec![]).unwrap()), SetVerdict::Proven);
        assert!(slset_subset(&diag, &lin(&[0], &[])).is_err());
    }

    #[test]
    fn bounded_words() {
        let (shape, s) = sec5();
        assert!(bounded_word_member(&Word::parse("abc$abc"), &shape, &s).unwrap());
        assert!(!bounded_word_member(&Word::parse("abc$ac"), &shape, &s).unwrap());
        let a = GinsburgShape::new(vec![Word::parse("a")]).unwrap();
        assert!(bounded_word_member(&Word::empty(), &a, &lin(&[0], &[&[1]])).unwrap());
    }

    #[test]
    fn bounded_inclusion() {
        let (shape, s) = sec5();
        assert_eq!(bounded_lang_subset(&shape, &s, &shape, &s, 20).unwrap(), BoundedVerdict::Proven);
        let changed = lin(&[0, 0, 0, 1, 0, 0, 0], &[&[1, 1, 1, 0, 1, 1, 2]]);
        assert_eq!(
            bounded_lang_subset(&shape, &changed, &shape, &s, 20).unwrap(),
            BoundedVerdict::Refuted(Word::parse("abc$abcc"))
        );
        // Different shapes: only checkable word by word.
        let abn = GinsburgShape::new(vec![Word::parse("ab")]).unwrap();
        let n = lin(&[0], &[&[1]]);
        let three = GinsburgShape::new(["a", "b", "ab"].iter().map(|w| Word::parse(w)).collect()).unwrap();
        let full3 = lin(&[0, 0, 0], &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(bounded_lang_subset(&abn, &n, &three, &full3, 20).unwrap(), BoundedVerdict::VerifiedUpTo(20));
        let two = GinsburgShape::new(vec![Word::parse("a"), Word::parse("b")]).unwrap();
        let full2 = lin(&[0, 0], &[&[1, 0], &[0, 1]]);
        assert_eq!(bounded_lang_subset(&abn, &n, &two, &full2, 20).unwrap(), BoundedVerdict::Refuted(Word::parse("abab")));
    }

    #[test]
    fn weighted_tuple_order() {
        let ts = weighted_tuples(&[1, 2], 3);
        assert_eq!(ts, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 0], vec![3, 0]]);
    }
}
