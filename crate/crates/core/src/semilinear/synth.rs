//! Grammars for bounded Ginsburg semilinear languages.

use super::{GinsburgShape, LinearSet, SemilinearError, SemilinearSet};
use crate::grammar::{IndexedGrammar, Production};
use crate::symbol::Symbol;
use crate::trio::{union_many, Names};

fn power(u: &[Symbol], n: u64) -> Vec<Symbol> {
    (0..n).flat_map(|_| u.iter().cloned()).collect()
}

/// `S → Y[e]`, `Y → Y[f_j]`, `Y → X₁⋯X_k`, `X_i[e] → u_i^{b_0i}`,
/// `X_i[f_j] → u_i^{b_ji} X_i`.
pub fn linear_to_grammar(shape: &GinsburgShape, l: &LinearSet) -> Result<IndexedGrammar, SemilinearError> {
    if shape.dim() != l.dim() {
        return Err(SemilinearError::DimensionMismatch { expected: shape.dim(), found: l.dim() });
    }
    let terminals = shape.alphabet();
    let mut names = Names::new(terminals.iter().cloned());
    let s = names.fresh("S");
    let y = names.fresh("Y");
    let xs: Vec<Symbol> = (1..=shape.dim()).map(|i| names.fresh(&format!("X{}", i))).collect();
    let e = names.fresh("e");
    let fs: Vec<Symbol> = (1..=l.periods.len()).map(|j| names.fresh(&format!("f{}", j))).collect();

    let mut productions = vec![Production::Push { lhs: s.clone(), var: y.clone(), index: e.clone() }];
    for f in &fs {
        productions.push(Production::Push { lhs: y.clone(), var: y.clone(), index: f.clone() });
    }
    productions.push(Production::Plain { lhs: y.clone(), rhs: xs.clone() });
    for (i, (x, u)) in xs.iter().zip(&shape.words).enumerate() {
        productions.push(Production::Consume { lhs: x.clone(), index: e.clone(), rhs: power(u.symbols(), l.base[i]) });
        for (f, p) in fs.iter().zip(&l.periods) {
            let mut rhs = power(u.symbols(), p[i]);
            rhs.push(x.clone());
            productions.push(Production::Consume { lhs: x.clone(), index: f.clone(), rhs });
        }
    }
    let mut variables = vec![s.clone(), y];
    variables.extend(xs);
    let mut indices = vec![e];
    indices.extend(fs);
    Ok(IndexedGrammar { name: "linear".to_string(), variables, terminals, indices, productions, start: s })
}

/// Union of the component grammars; no productions for the empty set.
pub fn semilinear_to_grammar(shape: &GinsburgShape, s: &SemilinearSet) -> Result<IndexedGrammar, SemilinearError> {
    if shape.dim() != s.dim {
        return Err(SemilinearError::DimensionMismatch { expected: shape.dim(), found: s.dim });
    }
    let parts = s.components.iter().map(|l| linear_to_grammar(shape, l)).collect::<Result<Vec<_>, _>>()?;
    let mut g = match parts.len() {
        0 => IndexedGrammar {
            name: String::new(),
            variables: vec![Symbol::new("S")],
            terminals: shape.alphabet(),
            indices: Vec::new(),
            productions: Vec::new(),
            start: Symbol::new("S"),
        },
        1 => parts.into_iter().next().expect("one part"),
        _ => union_many(&parts),
    };
    g.name = "semilinear".to_string();
    Ok(g)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::derivation::{enumerate_language, special_count_min, Budget};
    use crate::grammar::{validate, ProductionClass};
    use crate::symbol::Word;

    fn words(g: &IndexedGrammar, n: usize) -> BTreeSet<Word> {
        let e = enumerate_language(g, n, &Budget::steps(80).stack(n + 2).exact()).unwrap();
        assert!(e.exhaustive);
        e.words.into_iter().collect()
    }

    fn shape(ws: &[&str]) -> GinsburgShape {
        GinsburgShape::new(ws.iter().map(|w| Word::parse(w)).collect()).unwrap()
    }

    #[test]
    fn sec5_grammar_language() {
        let sh = shape(&["a", "b", "c", "$", "a", "b", "c"]);
        let l = LinearSet::new(vec![0, 0, 0, 1, 0, 0, 0], vec![vec![1, 1, 1, 0, 1, 1, 1]]).unwrap();
        let g = linear_to_grammar(&sh, &l).unwrap();
        assert!(validate(&g).is_empty());
        assert_eq!(g.special_productions().len(), 1);
        let expected: BTreeSet<Word> = ["$", "abc$abc", "aabbcc$aabbcc"].iter().map(|w| Word::parse(w)).collect();
        assert_eq!(words(&g, 14), expected);
        let m = special_count_min(&g, &Word::parse("abc$abc"), &Budget::steps(60).stack(4).exact()).unwrap().unwrap();
        assert_eq!(m.value, 1);
    }

    #[test]
    fn star_and_single_word() {
        let g = linear_to_grammar(&shape(&["a"]), &LinearSet::new(vec![0], vec![vec![1]]).unwrap()).unwrap();
        let expected: BTreeSet<Word> = (0..=5).map(|n| Word::parse(&"a".repeat(n))).collect();
        assert_eq!(words(&g, 5), expected);
        // One shape word: the Q production has a single variable.
        assert!(g.productions.iter().all(|p| g.classify(p) != ProductionClass::Special));
        let g = linear_to_grammar(&shape(&["a", "b"]), &LinearSet::new(vec![1, 2], vec![]).unwrap()).unwrap();
        assert_eq!(words(&g, 6), [Word::parse("abb")].into());
    }

    #[test]
    fn names_avoid_terminals() {
        let g = linear_to_grammar(&shape(&["S", "e"]), &LinearSet::new(vec![1, 1], vec![vec![1, 0]]).unwrap()).unwrap();
        assert!(validate(&g).is_empty(), "{:?}", validate(&g));
        assert!(words(&g, 3).contains(&Word::parse("S S e")));
    }

    #[test]
    fn semilinear_unions() {
        let sh = shape(&["a", "b"]);
        let s = SemilinearSet::new(2, vec![LinearSet::new(vec![1, 0], vec![]).unwrap(), LinearSet::new(vec![0, 2], vec![]).unwrap()])
            .unwrap();
        let g = semilinear_to_grammar(&sh, &s).unwrap();
        assert_eq!(words(&g, 4), [Word::parse("a"), Word::parse("bb")].into());
        let empty = semilinear_to_grammar(&sh, &SemilinearSet::new(2, vec![]).unwrap()).unwrap();
        assert!(words(&empty, 4).is_empty());
    }
}
