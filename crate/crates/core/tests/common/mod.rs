#![allow(dead_code)]

use std::collections::BTreeSet;

use fingram::derivation::{enumerate_language, Budget};
use fingram::{IndexedGrammar, Symbol, Word};

/// Exhaustive-by-assertion budget: steps, and a stack cap the fixture
/// never needs to exceed for words of the lengths used.
pub fn budget(steps: usize, stack: usize) -> Budget {
    Budget::steps(steps).stack(stack).exact()
}

pub fn words(g: &IndexedGrammar, max_len: usize, b: &Budget) -> BTreeSet<Word> {
    enumerate_language(g, max_len, b).expect("enumeration within frontier cap").words.into_iter().collect()
}

pub fn syms(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|s| Symbol::new(s)).collect()
}

/// Every word over `alphabet` of length at most `n`.
pub fn all_words(alphabet: &[Symbol], n: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Vec::<Symbol>::new()];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |a| w.iter().cloned().chain([a.clone()]).collect::<Vec<_>>()))
            .collect();
        out.extend(layer.iter().cloned().map(Word));
    }
    out
}

pub fn erase(w: &Word, keep: &[Symbol]) -> Word {
    w.iter().filter(|s| keep.contains(s)).cloned().collect()
}
