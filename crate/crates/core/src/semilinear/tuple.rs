//! Automata over bit-vector symbols recognising sets of tuples in `ℕ^m`.
//!
//! A tuple is written least significant bit first, one symbol per bit
//! position; bit `i` of a symbol belongs to track `i`. Every automaton built
//! here accepts a word iff it accepts the word with all-zero symbols
//! appended, so a tuple is accepted under any padding or under none.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::SemilinearError;

pub type Tuple = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleAutomaton {
    tracks: usize,
    /// Per state: symbol to successor states.
    trans: Vec<BTreeMap<u32, Vec<usize>>>,
    initial: Vec<usize>,
    accepting: Vec<bool>,
    deterministic: bool,
}

/// Least-significant-bit-first encoding of minimal length.
pub fn encode(v: &[u64]) -> Vec<u32> {
    let bits = v.iter().map(|x| 64 - x.leading_zeros() as usize).max().unwrap_or(0);
    (0..bits)
        .map(|t| v.iter().enumerate().fold(0u32, |acc, (i, x)| acc | (((x >> t) & 1) as u32) << i))
        .collect()
}

pub fn decode(tracks: usize, word: &[u32]) -> Tuple {
    (0..tracks)
        .map(|i| word.iter().enumerate().fold(0u64, |acc, (t, s)| acc | (((s >> i) & 1) as u64) << t))
        .collect()
}

fn symbol_count(tracks: usize) -> u32 {
    1u32 << tracks
}

impl TupleAutomaton {
    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn states(&self) -> usize {
        self.trans.len()
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn empty(tracks: usize) -> Self {
        TupleAutomaton { tracks, trans: vec![BTreeMap::new()], initial: vec![0], accepting: vec![false], deterministic: true }
    }

    pub fn universal(tracks: usize) -> Self {
        let row = (0..symbol_count(tracks)).map(|s| (s, vec![0])).collect();
        TupleAutomaton { tracks, trans: vec![row], initial: vec![0], accepting: vec![true], deterministic: true }
    }

    /// Solutions `x ∈ ℕ^m` of every equation `a·x = c` in `rows`.
    /// States are the residual constants; a symbol `β` leads from `s` to
    /// `(s - a·β) / 2` when that is integral.
    pub fn equations(tracks: usize, rows: &[(Vec<i64>, i64)]) -> Self {
        let start: Vec<i64> = rows.iter().map(|(_, c)| *c).collect();
        let mut ids: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut states = vec![start.clone()];
        ids.insert(start, 0);
        let mut trans: Vec<BTreeMap<u32, Vec<usize>>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let s = states[i].clone();
            let mut row = BTreeMap::new();
            'sym: for beta in 0..symbol_count(tracks) {
                let mut next = Vec::with_capacity(rows.len());
                for ((a, _), &r) in rows.iter().zip(&s) {
                    let dot: i64 = (0..tracks).filter(|t| beta >> t & 1 == 1).map(|t| a[t]).sum();
                    let d = r - dot;
                    if d.rem_euclid(2) != 0 {
                        continue 'sym;
                    }
                    next.push(d.div_euclid(2));
                }
                let id = *ids.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                });
                row.insert(beta, vec![id]);
            }
            trans.push(row);
            i += 1;
        }
        let accepting = states.iter().map(|s| s.iter().all(|&r| r == 0)).collect();
        TupleAutomaton { tracks, trans, initial: vec![0], accepting, deterministic: true }
    }

    pub fn accepts_word(&self, word: &[u32]) -> bool {
        let mut cur: BTreeSet<usize> = self.initial.iter().copied().collect();
        for s in word {
            cur = cur.iter().flat_map(|&q| self.trans[q].get(s).into_iter().flatten().copied()).collect();
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|&q| self.accepting[q])
    }

    pub fn accepts(&self, v: &[u64]) -> Result<bool, SemilinearError> {
        if v.len() != self.tracks {
            return Err(SemilinearError::TrackMismatch { expected: self.tracks, found: v.len() });
        }
        Ok(self.accepts_word(&encode(v)))
    }

    fn check_tracks(&self, other: &Self) -> Result<(), SemilinearError> {
        if self.tracks == other.tracks {
            Ok(())
        } else {
            Err(SemilinearError::TrackMismatch { expected: self.tracks, found: other.tracks })
        }
    }

    /// Intersection, restricted to reachable state pairs.
    pub fn product(&self, other: &Self) -> Result<Self, SemilinearError> {
        self.check_tracks(other)?;
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut initial = Vec::new();
        for &p in &self.initial {
            for &q in &other.initial {
                ids.insert((p, q), pairs.len());
                initial.push(pairs.len());
                pairs.push((p, q));
            }
        }
        let mut trans = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let mut row: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for (sym, ps) in &self.trans[p] {
                let Some(qs) = other.trans[q].get(sym) else { continue };
                for &p2 in ps {
                    for &q2 in qs {
                        let id = *ids.entry((p2, q2)).or_insert_with(|| {
                            pairs.push((p2, q2));
                            pairs.len() - 1
                        });
                        row.entry(*sym).or_default().push(id);
                    }
                }
            }
            trans.push(row);
            i += 1;
        }
        let accepting = pairs.iter().map(|&(p, q)| self.accepting[p] && other.accepting[q]).collect();
        let deterministic = self.deterministic && other.deterministic;
        Ok(TupleAutomaton { tracks: self.tracks, trans, initial, accepting, deterministic })
    }

    pub fn union(&self, other: &Self) -> Result<Self, SemilinearError> {
        self.check_tracks(other)?;
        let off = self.states();
        let mut trans = self.trans.clone();
        for row in &other.trans {
            trans.push(row.iter().map(|(s, qs)| (*s, qs.iter().map(|q| q + off).collect())).collect());
        }
        let mut initial = self.initial.clone();
        initial.extend(other.initial.iter().map(|q| q + off));
        let mut accepting = self.accepting.clone();
        accepting.extend(other.accepting.iter().copied());
        Ok(TupleAutomaton { tracks: self.tracks, trans, initial, accepting, deterministic: false })
    }

    /// Keeps the listed tracks, in that order, quantifying the others away.
    /// States that reach acceptance on symbols that are zero on every kept
    /// track become accepting, since the dropped tracks may need more bits.
    pub fn project_tracks(&self, keep: &[usize]) -> Result<Self, SemilinearError> {
        if let Some(&t) = keep.iter().find(|&&t| t >= self.tracks) {
            return Err(SemilinearError::TrackMismatch { expected: self.tracks, found: t + 1 });
        }
        let squeeze = |s: u32| keep.iter().enumerate().fold(0u32, |acc, (i, &t)| acc | ((s >> t) & 1) << i);
        let mut trans: Vec<BTreeMap<u32, Vec<usize>>> = Vec::with_capacity(self.states());
        for row in &self.trans {
            let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for (s, qs) in row {
                let e = out.entry(squeeze(*s)).or_default();
                for q in qs {
                    if !e.contains(q) {
                        e.push(*q);
                    }
                }
            }
            trans.push(out);
        }
        let mut accepting = self.accepting.clone();
        loop {
            let mut changed = false;
            for q in 0..trans.len() {
                if !accepting[q] && trans[q].get(&0).map_or(false, |qs| qs.iter().any(|&r| accepting[r])) {
                    accepting[q] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(TupleAutomaton { tracks: keep.len(), trans, initial: self.initial.clone(), accepting, deterministic: false })
    }

    /// Complete deterministic automaton by subset construction; the empty
    /// subset is the sink.
    pub fn determinize(&self) -> Self {
        let mut start: Vec<usize> = self.initial.clone();
        start.sort_unstable();
        start.dedup();
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut sets = vec![start.clone()];
        ids.insert(start, 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut moves: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
            for &q in &sets[i] {
                for (s, qs) in &self.trans[q] {
                    moves.entry(*s).or_default().extend(qs.iter().copied());
                }
            }
            let mut row = BTreeMap::new();
            for s in 0..symbol_count(self.tracks) {
                let next: Vec<usize> = moves.get(&s).map(|m| m.iter().copied().collect()).unwrap_or_default();
                let id = *ids.entry(next.clone()).or_insert_with(|| {
                    sets.push(next);
                    sets.len() - 1
                });
                row.insert(s, vec![id]);
            }
            trans.push(row);
            i += 1;
        }
        let accepting = sets.iter().map(|set| set.iter().any(|&q| self.accepting[q])).collect();
        TupleAutomaton { tracks: self.tracks, trans, initial: vec![0], accepting, deterministic: true }.minimize()
    }

    /// Moore partition refinement on a complete deterministic automaton.
    fn minimize(&self) -> Self {
        let n = self.states();
        let syms = symbol_count(self.tracks);
        let succ = |q: usize, s: u32| self.trans[q][&s][0];
        let mut class: Vec<usize> = self.accepting.iter().map(|&a| usize::from(a)).collect();
        loop {
            let mut sig_ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|q| {
                    let mut sig = vec![class[q]];
                    sig.extend((0..syms).map(|s| class[succ(q, s)]));
                    let len = sig_ids.len();
                    *sig_ids.entry(sig).or_insert(len)
                })
                .collect();
            let before = class.iter().collect::<BTreeSet<_>>().len();
            let after = sig_ids.len();
            class = next;
            if after == before {
                break;
            }
        }
        // Renumber classes so the initial state's class is 0.
        let mut order: HashMap<usize, usize> = HashMap::new();
        let mut reps: Vec<usize> = Vec::new();
        let mut queue = VecDeque::from([self.initial[0]]);
        order.insert(class[self.initial[0]], 0);
        reps.push(self.initial[0]);
        while let Some(q) = queue.pop_front() {
            for s in 0..syms {
                let r = succ(q, s);
                if !order.contains_key(&class[r]) {
                    order.insert(class[r], reps.len());
                    reps.push(r);
                    queue.push_back(r);
                }
            }
        }
        let trans = reps
            .iter()
            .map(|&q| (0..syms).map(|s| (s, vec![order[&class[succ(q, s)]]])).collect())
            .collect();
        let accepting = reps.iter().map(|&q| self.accepting[q]).collect();
        TupleAutomaton { tracks: self.tracks, trans, initial: vec![0], accepting, deterministic: true }
    }

    pub fn complement(&self) -> Self {
        let mut d = self.determinize();
        for a in d.accepting.iter_mut() {
            *a = !*a;
        }
        d
    }

    /// `None` when the language is empty, otherwise the tuple encoded by a
    /// shortest accepted word.
    pub fn is_empty(&self) -> Option<Tuple> {
        let mut parent: Vec<Option<(usize, u32)>> = vec![None; self.states()];
        let mut seen = vec![false; self.states()];
        let mut queue = VecDeque::new();
        for &q in &self.initial {
            if !seen[q] {
                seen[q] = true;
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            if self.accepting[q] {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, s)) = parent[cur] {
                    word.push(s);
                    cur = p;
                }
                word.reverse();
                return Some(decode(self.tracks, &word));
            }
            for (s, qs) in &self.trans[q] {
                for &r in qs {
                    if !seen[r] {
                        seen[r] = true;
                        parent[r] = Some((q, *s));
                        queue.push_back(r);
                    }
                }
            }
        }
        None
    }

    /// Every reachable accepting state has an all-zero move to an
    /// accepting state.
    pub fn padding_closed(&self) -> bool {
        let mut seen = vec![false; self.states()];
        let mut stack: Vec<usize> = self.initial.clone();
        while let Some(q) = stack.pop() {
            if std::mem::replace(&mut seen[q], true) {
                continue;
            }
            if self.accepting[q] && !self.trans[q].get(&0).map_or(false, |qs| qs.iter().any(|&r| self.accepting[r])) {
                return false;
            }
            stack.extend(self.trans[q].values().flatten().copied());
        }
        true
    }
}

/// The equation `a·x = c` over `a.len()` tracks.
pub fn equation_automaton(a: &[i64], c: i64) -> TupleAutomaton {
    TupleAutomaton::equations(a.len(), &[(a.to_vec(), c)])
}
