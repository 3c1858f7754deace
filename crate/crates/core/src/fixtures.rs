//! Reference inputs shared by tests, the acceptance suite, and the CLI.

use crate::automata::Dfa;
use crate::counter::{parse_machine, CounterMachine};
use crate::etol::{parse_etol, EtolSystem};
use crate::grammar::{parse_grammar, IndexedGrammar};
use crate::semilinear::{parse_semilinear, SemilinearFile};
use crate::trio::{parse_morphism, parse_transducer, Morphism, NivatTransducer};

macro_rules! fixture {
    ($name:literal) => {
        ($name, include_str!(concat!("../../../fixtures/", $name)))
    };
}

pub const SEC5_IG: &str = include_str!("../../../fixtures/sec5.ig");
pub const EX1_IG: &str = include_str!("../../../fixtures/ex1.ig");

/// `(file name, contents)` of every fixture.
pub const FILES: &[(&str, &str)] = &[
    fixture!("sec5.ig"),
    fixture!("ex1.ig"),
    fixture!("anbn.ig"),
    fixture!("anbncn.ig"),
    fixture!("copy.ig"),
    fixture!("dyck.ig"),
    fixture!("abstar.ig"),
    fixture!("empty.ig"),
    fixture!("eps.ig"),
    fixture!("even_a.dfa"),
    fixture!("one_dollar.dfa"),
    fixture!("double.morph"),
    fixture!("pair.morph"),
    fixture!("erase_b.fst"),
    fixture!("recolor.fst"),
    fixture!("diag.sls"),
    fixture!("quadrant.sls"),
    fixture!("sec5.sls"),
    fixture!("sec5_full.sls"),
    fixture!("sec5_skew.sls"),
    fixture!("two_words.sls"),
    fixture!("anbn.etol"),
    fixture!("copy.etol"),
    fixture!("anbncn.etol"),
    fixture!("choice.etol"),
    fixture!("ab.etol"),
    fixture!("eps.etol"),
    fixture!("cycle.etol"),
    fixture!("anbn.ncm"),
    fixture!("anbncn.ncm"),
    fixture!("updown.ncm"),
    fixture!("all.ncm"),
    fixture!("eps.ncm"),
    fixture!("pump.ncm"),
];

pub fn source(name: &str) -> &'static str {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s).unwrap_or_else(|| panic!("no fixture {}", name))
}

fn with_ext(ext: &str) -> impl Iterator<Item = &'static (&'static str, &'static str)> + '_ {
    FILES.iter().filter(move |(n, _)| n.ends_with(ext))
}

/// `{aⁿbⁿcⁿ$aⁿbⁿcⁿ : n ≥ 0}`.
pub fn sec5_grammar() -> IndexedGrammar {
    parse_grammar(SEC5_IG).expect("sec5 fixture")
}

/// `{a b a² b ⋯ aⁿ b aⁿ⁺¹ : n ≥ 1}`.
pub fn ex1_grammar() -> IndexedGrammar {
    parse_grammar(EX1_IG).expect("ex1 fixture")
}

pub fn grammar(name: &str) -> IndexedGrammar {
    parse_grammar(source(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

pub fn grammars() -> Vec<(&'static str, IndexedGrammar)> {
    with_ext(".ig").map(|(n, _)| (*n, grammar(n))).collect()
}

pub fn dfa(name: &str) -> Dfa {
    Dfa::parse(source(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

pub fn morphism(name: &str) -> Morphism {
    parse_morphism(source(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

pub fn transducer(name: &str) -> NivatTransducer {
    parse_transducer(source(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

pub fn semilinear(name: &str) -> SemilinearFile {
    parse_semilinear(source(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

pub fn etol(name: &str) -> EtolSystem {
    parse_etol(source(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

pub fn etol_systems() -> Vec<(&'static str, EtolSystem)> {
    with_ext(".etol").map(|(n, _)| (*n, etol(n))).collect()
}

pub fn machine(name: &str) -> CounterMachine {
    parse_machine(source(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

pub fn machines() -> Vec<(&'static str, CounterMachine)> {
    with_ext(".ncm").map(|(n, _)| (*n, machine(n))).collect()
}
