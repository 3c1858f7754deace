//! Intersection with a regular language through triple variables `<p|A|q>`.

use std::collections::{HashMap, VecDeque};

use super::{split_rhs, Names, TrioError};
use crate::automata::Dfa;
use crate::grammar::{IndexedGrammar, Production};
use crate::symbol::Symbol;

struct Triples {
    ids: HashMap<(usize, usize, usize), usize>,
    order: Vec<Symbol>,
    queue: VecDeque<(usize, usize, usize)>,
}

/// Checks that every right-hand side is `u`, `u X Z`, or `u X v`.
pub fn is_normalized(g: &IndexedGrammar) -> Result<(), TrioError> {
    for (i, p) in g.productions.iter().enumerate() {
        let Some(rhs) = p.rhs() else { continue };
        let (segments, vars) = split_rhs(g, rhs);
        let ok = match vars.len() {
            0 | 1 => true,
            2 => segments[1].is_empty() && segments[2].is_empty(),
            _ => false,
        };
        if !ok {
            return Err(TrioError::NotNormalized(i));
        }
    }
    Ok(())
}

/// `L(g) ∩ L(d)`. Only triples reachable from the new start variable are
/// generated; `g` must be normalized.
pub fn intersect_dfa(g: &IndexedGrammar, d: &Dfa) -> Result<IndexedGrammar, TrioError> {
    is_normalized(g)?;
    if let Some(a) = g.terminals.iter().find(|a| d.letter(a).is_none()) {
        return Err(TrioError::AlphabetMismatch(a.clone()));
    }
    let mut names = Names::new(g.all_names().into_iter().chain(d.states.iter().cloned()));
    let start = names.fresh("S'");
    let primed: HashMap<Symbol, Symbol> =
        g.indices.iter().map(|f| (f.clone(), names.fresh(&format!("{}'", f)))).collect();
    let nq = d.len();
    let var_ix: HashMap<&Symbol, usize> = g.variables.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut by_lhs: Vec<Vec<&Production>> = vec![Vec::new(); g.variables.len()];
    for p in &g.productions {
        if let Some(&v) = var_ix.get(p.lhs()) {
            by_lhs[v].push(p);
        }
    }

    let mut triples = Triples { ids: HashMap::new(), order: Vec::new(), queue: VecDeque::new() };
    let mut variables = vec![start.clone()];
    let mut triple = |t: (usize, usize, usize), triples: &mut Triples| -> Symbol {
        if let Some(&i) = triples.ids.get(&t) {
            return triples.order[i].clone();
        }
        let s = names.fresh(&format!("<{}|{}|{}>", d.states[t.0], g.variables[t.1], d.states[t.2]));
        variables.push(s.clone());
        triples.ids.insert(t, triples.order.len());
        triples.order.push(s.clone());
        triples.queue.push_back(t);
        s
    };

    let mut productions = Vec::new();
    let s_ix = var_ix[&g.start];
    for q in (0..nq).filter(|&q| d.accepting[q]) {
        let t = triple((d.initial, s_ix, q), &mut triples);
        productions.push(Production::Plain { lhs: start.clone(), rhs: vec![t] });
    }
    let run = |p: usize, u: &[Symbol]| d.run(p, u.iter()).expect("alphabet checked");
    while let Some((p, a, q)) = triples.queue.pop_front() {
        let lhs = triples.order[triples.ids[&(p, a, q)]].clone();
        for prod in &by_lhs[a] {
            let lhs_index = prod.lhs_index().map(|f| primed[f].clone());
            let make = |rhs: Vec<Symbol>| match &lhs_index {
                Some(f) => Production::Consume { lhs: lhs.clone(), index: f.clone(), rhs },
                None => Production::Plain { lhs: lhs.clone(), rhs },
            };
            match prod {
                Production::Push { var, index, .. } => {
                    let b = triple((p, var_ix[var], q), &mut triples);
                    productions.push(Production::Push { lhs: lhs.clone(), var: b, index: primed[index].clone() });
                }
                _ => {
                    let rhs = prod.rhs().expect("plain or consume");
                    let (segments, vars) = split_rhs(g, rhs);
                    match vars.len() {
                        0 => {
                            if run(p, &segments[0]) == q {
                                productions.push(make(segments[0].clone()));
                            }
                        }
                        1 => {
                            let r = run(p, &segments[0]);
                            for s in (0..nq).filter(|&s| run(s, &segments[1]) == q) {
                                let t = triple((r, var_ix[&vars[0]], s), &mut triples);
                                let mut out = segments[0].clone();
                                out.push(t);
                                out.extend(segments[1].iter().cloned());
                                productions.push(make(out));
                            }
                        }
                        _ => {
                            let r1 = run(p, &segments[0]);
                            for r2 in 0..nq {
                                let b = triple((r1, var_ix[&vars[0]], r2), &mut triples);
                                let c = triple((r2, var_ix[&vars[1]], q), &mut triples);
                                let mut out = segments[0].clone();
                                out.push(b);
                                out.push(c);
                                productions.push(make(out));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(IndexedGrammar {
        name: format!("{}&dfa", g.name),
        variables,
        terminals: g.terminals.clone(),
        indices: g.indices.iter().map(|f| primed[f].clone()).collect(),
        productions,
        start,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::derivation::{enumerate_language, min_index, Budget};
    use crate::fixtures;
    use crate::grammar::validate;
    use crate::symbol::Word;
    use crate::trio::normalize_rhs;

    fn words(g: &IndexedGrammar, n: usize, stack: usize) -> BTreeSet<Word> {
        enumerate_language(g, n, &Budget::steps(80).stack(stack).exact()).unwrap().words.into_iter().collect()
    }

    // Exactly one `$`, with at least one `a` before it.
    const ONE_DOLLAR: &str = "states: s, a, d, x\nalphabet: a, b, c, $\ninitial: s\naccepting: d\n\
        trans: s a -> a\ntrans: s b -> s\ntrans: s c -> s\ntrans: s $ -> x\n\
        trans: a a -> a\ntrans: a b -> a\ntrans: a c -> a\ntrans: a $ -> d\n\
        trans: d a -> d\ntrans: d b -> d\ntrans: d c -> d\ntrans: d $ -> x\n\
        trans: x a -> x\ntrans: x b -> x\ntrans: x c -> x\ntrans: x $ -> x\n";

    #[test]
    fn refuses_unnormalized_input() {
        let g = fixtures::sec5_grammar();
        let d = Dfa::universal(&g.terminals);
        assert_eq!(intersect_dfa(&g, &d), Err(TrioError::NotNormalized(2)));
    }

    #[test]
    fn section5_with_one_dollar() {
        let g = normalize_rhs(&fixtures::sec5_grammar());
        let d = Dfa::parse(ONE_DOLLAR).unwrap();
        let i = intersect_dfa(&g, &d).unwrap();
        assert!(validate(&i).is_empty(), "{:?}", validate(&i));
        let expected: BTreeSet<Word> = words(&g, 14, 3).into_iter().filter(|w| d.accepts(w)).collect();
        assert_eq!(expected, [Word::parse("abc$abc"), Word::parse("aabbcc$aabbcc")].into());
        assert_eq!(words(&i, 14, 3), expected);
    }

    #[test]
    fn universal_and_empty_automata() {
        let g = normalize_rhs(&fixtures::ex1_grammar());
        let all = intersect_dfa(&g, &Dfa::universal(&g.terminals)).unwrap();
        assert_eq!(words(&all, 8, 4), words(&g, 8, 4));
        let none = intersect_dfa(&g, &Dfa::empty(&g.terminals)).unwrap();
        assert!(words(&none, 8, 4).is_empty());
        assert!(none.productions.is_empty());
    }

    #[test]
    fn index_is_preserved() {
        let g = normalize_rhs(&fixtures::ex1_grammar());
        let i = intersect_dfa(&g, &Dfa::universal(&g.terminals)).unwrap();
        let w = Word::parse("abaa");
        let b = Budget::steps(40);
        assert_eq!(min_index(&i, &w, &b).unwrap().unwrap().value, min_index(&g, &w, &b).unwrap().unwrap().value);
    }
}
