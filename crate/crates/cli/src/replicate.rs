//! Built-in fixture suite: fixed checks with fixed budgets, so the table
//! is the same on every run.

use std::collections::BTreeSet;

use fingram::automata::Dfa;
use fingram::counter::parikh_of_intersection;
use fingram::derivation::{check_uncontrolled, enumerate_language, min_index, Budget, Verdict};
use fingram::etol::{etol_enumerate, etol_to_indexed, EtolBudget};
use fingram::fixtures;
use fingram::semilinear::{ginsburg_apply, linear_to_grammar, slset_subset, weighted_tuples, SetVerdict};
use fingram::trio::{intersect_dfa, morphism_image, normalize_rhs, union};
use fingram::{IndexedGrammar, Word};
use fingram_cli::{Block, Status};

use crate::Outcome;

type Check = Result<String, String>;

fn words(g: &IndexedGrammar, len: usize, steps: usize, stack: usize) -> Result<BTreeSet<Word>, String> {
    let e = enumerate_language(g, len, &Budget::steps(steps).stack(stack).exact()).map_err(|e| e.to_string())?;
    if !e.exhaustive {
        return Err(format!("enumeration of {} to length {} not exhaustive", g.name, len));
    }
    Ok(e.words.into_iter().collect())
}

fn show(ws: &BTreeSet<Word>) -> String {
    ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
}

fn bounded_example() -> Check {
    let g = fixtures::sec5_grammar();
    let got = words(&g, 14, 60, 3)?;
    let f = fixtures::semilinear("sec5.sls");
    let shape = f.shape.ok_or("sec5.sls has no shape")?;
    let weights: Vec<usize> = shape.words.iter().map(Word::len).collect();
    let image: BTreeSet<Word> = weighted_tuples(&weights, 14)
        .into_iter()
        .filter(|v| f.set.contains(v))
        .map(|v| ginsburg_apply(&shape, &v).expect("dimension"))
        .collect();
    if got == image && got.len() == 3 {
        Ok(show(&got))
    } else {
        Err(format!("grammar {} vs image {}", show(&got), show(&image)))
    }
}

fn example_words() -> Check {
    let g = fixtures::ex1_grammar();
    let got = words(&g, 20, 200, 5)?;
    let expected: BTreeSet<Word> = (1..=4)
        .map(|n| {
            let mut s = String::new();
            for i in 1..=n {
                s.push_str(&"a".repeat(i));
                s.push('b');
            }
            s.push_str(&"a".repeat(n + 1));
            Word::parse(&s)
        })
        .collect();
    if got == expected {
        Ok(show(&got))
    } else {
        Err(show(&got))
    }
}

fn example_index() -> Check {
    let g = fixtures::ex1_grammar();
    let m = min_index(&g, &Word::parse("abaa"), &Budget::steps(80).stack(3).exact())
        .map_err(|e| e.to_string())?
        .ok_or("membership undecided")?;
    if m.value == 3 && m.exact {
        Ok("min_index(abaa) = 3".into())
    } else {
        Err(format!("min_index(abaa) = {}", m.value))
    }
}

fn example_uncontrolled() -> Check {
    let g = fixtures::ex1_grammar();
    let o = check_uncontrolled(&g, 3, &Budget::steps(80).stack(5).exact().yield_len(20)).map_err(|e| e.to_string())?;
    match &o.verdict {
        Verdict::Refuted(Some(d)) if d.verify(&g).is_ok() => Ok(format!("refuted, witness of index {}", d.index())),
        v => Err(format!("verdict {}", v.label())),
    }
}

fn union_check() -> Check {
    let (a, b) = (fixtures::grammar("anbn.ig"), fixtures::grammar("dyck.ig"));
    let got = words(&union(&a, &b), 6, 200, 1)?;
    let expected: BTreeSet<Word> = words(&a, 6, 200, 1)?.union(&words(&b, 6, 200, 1)?).cloned().collect();
    if got == expected {
        Ok(format!("{} words", got.len()))
    } else {
        Err(show(&got))
    }
}

fn morphism_check() -> Check {
    let g = fixtures::grammar("anbn.ig");
    let h = fixtures::morphism("double.morph");
    let out = morphism_image(&g, &h).map_err(|e| e.to_string())?;
    let got = words(&out, 8, 200, 1)?;
    let expected: BTreeSet<Word> =
        words(&g, 8, 200, 1)?.iter().map(|w| h.apply(w).expect("total")).filter(|w| w.len() <= 8).collect();
    if got == expected {
        Ok(format!("{} words", got.len()))
    } else {
        Err(show(&got))
    }
}

fn intersection_check() -> Check {
    let g = fixtures::sec5_grammar();
    let d = fixtures::dfa("one_dollar.dfa");
    let out = intersect_dfa(&normalize_rhs(&g), &d).map_err(|e| e.to_string())?;
    let got = words(&out, 14, 60, 3)?;
    let expected: BTreeSet<Word> = words(&g, 14, 60, 3)?.into_iter().filter(|w| d.accepts(w)).collect();
    let all = Dfa::universal(&g.terminals);
    let whole = words(&intersect_dfa(&normalize_rhs(&g), &all).map_err(|e| e.to_string())?, 14, 60, 3)?;
    if got == expected && whole == words(&g, 14, 60, 3)? {
        Ok(format!("{} words", got.len()))
    } else {
        Err(show(&got))
    }
}

fn linear_synthesis() -> Check {
    let f = fixtures::semilinear("sec5.sls");
    let shape = f.shape.ok_or("sec5.sls has no shape")?;
    let g = linear_to_grammar(&shape, &f.set.components[0]).map_err(|e| e.to_string())?;
    let got = words(&g, 14, 60, 3)?;
    let expected = words(&fixtures::sec5_grammar(), 14, 60, 3)?;
    let specials = g.special_productions().len();
    if got == expected && specials == 1 {
        Ok(format!("{} words, one special production", got.len()))
    } else {
        Err(format!("{} with {} special productions", show(&got), specials))
    }
}

fn set_inclusions() -> Check {
    let diag = fixtures::semilinear("diag.sls").set;
    let quad = fixtures::semilinear("quadrant.sls").set;
    let forward = slset_subset(&diag, &quad).map_err(|e| e.to_string())?;
    let backward = slset_subset(&quad, &diag).map_err(|e| e.to_string())?;
    match (forward, backward) {
        (SetVerdict::Proven, SetVerdict::Refuted(v)) if !diag.contains(&v) => Ok("diag within quadrant, not conversely".into()),
        (a, b) => Err(format!("{:?} / {:?}", a, b)),
    }
}

fn etol_conversions() -> Check {
    let mut n = 0;
    for (name, sys) in fixtures::etol_systems() {
        let Ok(g) = etol_to_indexed(&sys) else { continue };
        let e = etol_enumerate(&sys, 8, &EtolBudget::steps(20)).map_err(|e| e.to_string())?;
        let direct: BTreeSet<Word> = e.words.into_iter().collect();
        let got = words(&g, 8, 400, 8)?;
        if got != direct {
            return Err(format!("{}: {} vs {}", name, show(&got), show(&direct)));
        }
        n += 1;
    }
    Ok(format!("{} systems", n))
}

fn counter_pipelines() -> Check {
    let mut n = 0;
    for (g, m) in [("abstar.ig", "anbn.ncm"), ("anbn.ig", "anbn.ncm"), ("anbncn.ig", "anbncn.ncm"), ("empty.ig", "anbn.ncm")] {
        let r = parikh_of_intersection(&fixtures::grammar(g), &fixtures::machine(m), 6, 12, &Budget::steps(400).stack(4).exact())
            .map_err(|e| format!("{} & {}: {}", g, m, e))?;
        if !r.agree() {
            return Err(format!("{} & {}: {:?} vs {:?}", g, m, r.vectors, r.brute));
        }
        n += 1;
    }
    Ok(format!("{} pipelines agree at radius 6", n))
}

pub fn run() -> Outcome {
    let checks: [(&str, fn() -> Check); 11] = [
        ("bounded_example_words", bounded_example),
        ("example_words", example_words),
        ("example_min_index", example_index),
        ("example_uncontrolled", example_uncontrolled),
        ("union", union_check),
        ("morphism", morphism_check),
        ("dfa_intersection", intersection_check),
        ("linear_synthesis", linear_synthesis),
        ("set_inclusion", set_inclusions),
        ("etol_conversion", etol_conversions),
        ("counter_pipeline", counter_pipelines),
    ];
    let mut blocks = vec![Block::new()];
    let mut failed = 0;
    for (name, check) in checks {
        let mut b = Block::new();
        b.push("check", name);
        match check() {
            Ok(detail) => b.push("status", "pass").push("detail", detail),
            Err(detail) => {
                failed += 1;
                b.push("status", "fail").push("detail", detail)
            }
        };
        blocks.push(b);
    }
    blocks[0].push("checks", checks.len()).push("passed", checks.len() - failed).push("failed", failed);
    let status = if failed == 0 { Status::Ok } else { Status::Refuted };
    Outcome { blocks, status, exhausted: false }
}
