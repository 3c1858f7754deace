//! Morphism and transducer file formats.
//!
//! ```text
//! map: a -> xy        # `_` for the empty word
//! target: x, y, z     # optional extra target letters
//! ```
//!
//! ```text
//! input: a, b
//! output: c
//! states: q, r
//! initial: q
//! accepting: q
//! trans: q in:a -> r
//! trans: r out:c -> q
//! trans: q _ -> q
//! ```

use std::collections::{BTreeMap, BTreeSet};

use super::{Label, Morphism, NivatTransducer, TrioError};
use crate::symbol::{Symbol, Word};
use crate::text::{self, SyntaxError};

pub fn parse_morphism(input: &str) -> Result<Morphism, SyntaxError> {
    let mut map = BTreeMap::new();
    let mut extra = Vec::new();
    for line in text::lines(input) {
        let (key, value) = line.key_value().ok_or_else(|| line.error(line.text, "expected `key: value`"))?;
        match key {
            "map" => {
                let (a, w) = value.split_once("->").ok_or_else(|| line.error(value, "expected `a -> word`"))?;
                let a = a.trim();
                if !Symbol::is_well_formed(a) {
                    return Err(line.error(a, format!("malformed symbol `{}`", a)));
                }
                if map.insert(Symbol::new(a), Word::parse(w)).is_some() {
                    return Err(line.error(a, format!("duplicate image for `{}`", a)));
                }
            }
            "target" => extra.extend(text::symbol_list(&line, value)?),
            other => return Err(line.error(line.text, format!("unknown key `{}`", other))),
        }
    }
    let mut m = Morphism { map, target: Vec::new() };
    m.extend_target(&extra);
    Ok(m)
}

pub fn serialize_morphism(h: &Morphism) -> String {
    let mut out = String::new();
    for (a, w) in &h.map {
        let w = if w.iter().all(|s| s.as_str().chars().count() == 1) {
            w.to_string()
        } else {
            text::join(w.symbols(), " ")
        };
        out.push_str(&format!("map: {} -> {}\n", a, w));
    }
    out.push_str(&format!("target: {}\n", text::join(&h.target, ", ")));
    out
}

pub fn parse_transducer(input: &str) -> Result<NivatTransducer, TrioError> {
    let mut lists: BTreeMap<&str, Vec<Symbol>> = BTreeMap::new();
    let mut trans = Vec::new();
    for line in text::lines(input) {
        let (key, value) = line.key_value().ok_or_else(|| line.error(line.text, "expected `key: value`"))?;
        match key {
            "input" | "output" | "states" | "initial" | "accepting" => {
                if lists.insert(key, text::symbol_list(&line, value)?).is_some() {
                    return Err(line.error(line.text, format!("duplicate `{}:` line", key)).into());
                }
            }
            "trans" => trans.push((line.clone(), value)),
            other => return Err(line.error(line.text, format!("unknown key `{}`", other)).into()),
        }
    }
    let mut take = |k: &str| lists.remove(k).ok_or_else(|| TrioError::Transducer(format!("missing `{}:` line", k)));
    let input = take("input")?;
    let output = take("output")?;
    let states = take("states")?;
    let initial_names = take("initial")?;
    let accepting_names = lists.remove("accepting").unwrap_or_default();
    let state = |s: &Symbol| states.iter().position(|t| t == s);
    let to_set = |names: &[Symbol]| -> Result<BTreeSet<usize>, TrioError> {
        names.iter().map(|s| state(s).ok_or_else(|| TrioError::Transducer(format!("unknown state `{}`", s)))).collect()
    };
    let initial = to_set(&initial_names)?;
    let accepting = to_set(&accepting_names)?;
    let mut transitions = Vec::new();
    for (line, value) in trans {
        let bad = || line.error(value, "expected `p in:a -> q`, `p out:b -> q`, or `p _ -> q`");
        let (lhs, rhs) = value.split_once("->").ok_or_else(bad)?;
        let parts: Vec<&str> = lhs.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(bad().into());
        }
        let p = state(&Symbol::new(parts[0])).ok_or_else(|| line.error(parts[0], "unknown state"))?;
        let q = state(&Symbol::new(rhs.trim())).ok_or_else(|| line.error(rhs.trim(), "unknown state"))?;
        let label = if parts[1] == "_" {
            Label::Empty
        } else if let Some(a) = parts[1].strip_prefix("in:") {
            Label::In(input.iter().position(|s| s.as_str() == a).ok_or_else(|| line.error(parts[1], "unknown input letter"))?)
        } else if let Some(b) = parts[1].strip_prefix("out:") {
            Label::Out(output.iter().position(|s| s.as_str() == b).ok_or_else(|| line.error(parts[1], "unknown output letter"))?)
        } else {
            return Err(bad().into());
        };
        transitions.push((p, label, q));
    }
    Ok(NivatTransducer { input, output, states, initial, accepting, transitions })
}

pub fn serialize_transducer(t: &NivatTransducer) -> String {
    let names = |set: &BTreeSet<usize>| set.iter().map(|&q| t.states[q].as_str()).collect::<Vec<_>>().join(", ");
    let mut out = format!(
        "input: {}\noutput: {}\nstates: {}\ninitial: {}\naccepting: {}\n",
        text::join(&t.input, ", "),
        text::join(&t.output, ", "),
        text::join(&t.states, ", "),
        names(&t.initial),
        names(&t.accepting)
    );
    for &(p, l, q) in &t.transitions {
        let l = match l {
            Label::In(a) => format!("in:{}", t.input[a]),
            Label::Out(b) => format!("out:{}", t.output[b]),
            Label::Empty => "_".to_string(),
        };
        out.push_str(&format!("trans: {} {} -> {}\n", t.states[p], l, t.states[q]));
    }
    out
}
