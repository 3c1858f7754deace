//! The grammar file format.
//!
//! ```text
//! grammar <name>
//! variables: S, Y, X1
//! terminals: a, b
//! indices: e, f
//! start: S
//! prod: S -> Y [+e]          # push
//! prod: Y -> X1 X1           # plain
//! prod: X1 [f] -> a X1       # consume
//! prod: X1 [e] -> _          # empty right-hand side
//! ```

use super::{validate, IndexedGrammar, Production};
use crate::text::{self, Line, SyntaxError};
use crate::symbol::Symbol;
use crate::GrammarError;

/// Splits on whitespace and makes `[` and `]` separate tokens. Tokens are
/// subslices of the input.
fn tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in s.char_indices() {
        if c.is_whitespace() || c == '[' || c == ']' {
            if let Some(st) = start.take() {
                out.push(&s[st..i]);
            }
            if c == '[' || c == ']' {
                out.push(&s[i..i + 1]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

fn name<'a>(line: &Line<'_>, tok: Option<&'a str>, what: &str) -> Result<&'a str, SyntaxError> {
    match tok {
        Some(t) if Symbol::is_well_formed(t) => Ok(t),
        Some(t) => Err(line.error(t, format!("expected {}, found `{}`", what, t))),
        None => Err(SyntaxError::new(line.number, line.text.len() + 1, format!("expected {}", what))),
    }
}

fn parse_production(line: &Line<'_>, value: &str) -> Result<Production, SyntaxError> {
    let toks = tokens(value);
    let mut it = toks.iter().copied().peekable();
    let lhs = name(line, it.next(), "a variable")?;
    let mut lhs_index = None;
    if it.peek() == Some(&"[") {
        it.next();
        lhs_index = Some(name(line, it.next(), "an index")?);
        match it.next() {
            Some("]") => {}
            Some(t) => return Err(line.error(t, "expected `]`")),
            None => return Err(SyntaxError::new(line.number, line.text.len() + 1, "expected `]`")),
        }
    }
    match it.next() {
        Some("->") => {}
        Some(t) => return Err(line.error(t, format!("expected `->`, found `{}`", t))),
        None => return Err(SyntaxError::new(line.number, line.text.len() + 1, "expected `->`")),
    }
    let rest: Vec<&str> = it.collect();
    if rest.is_empty() {
        return Err(SyntaxError::new(line.number, line.text.len() + 1, "empty right-hand side (write `_`)"));
    }
    // Push form: `A -> B [+f]`.
    if rest.len() == 4 && rest[1] == "[" && rest[2].starts_with('+') && rest[3] == "]" {
        if lhs_index.is_some() {
            return Err(line.error(rest[1], "a push production cannot consume an index"));
        }
        let var = name(line, Some(rest[0]), "a variable")?;
        let index = name(line, Some(&rest[2][1..]), "an index")?;
        return Ok(Production::Push { lhs: lhs.into(), var: var.into(), index: index.into() });
    }
    if let Some(t) = rest.iter().find(|t| **t == "[" || **t == "]") {
        return Err(line.error(t, "push form requires exactly one variable before `[+index]`"));
    }
    let rhs: Vec<Symbol> = if rest == ["_"] {
        Vec::new()
    } else {
        rest.iter()
            .map(|t| name(line, Some(t), "a symbol").map(Symbol::new))
            .collect::<Result<_, _>>()?
    };
    Ok(match lhs_index {
        Some(index) => Production::Consume { lhs: lhs.into(), index: index.into(), rhs },
        None => Production::Plain { lhs: lhs.into(), rhs },
    })
}

/// Parses and validates a grammar file.
pub fn parse_grammar(input: &str) -> Result<IndexedGrammar, GrammarError> {
    let g = parse_unchecked(input)?;
    let violations = validate(&g);
    if violations.is_empty() {
        Ok(g)
    } else {
        Err(GrammarError::Invalid(violations))
    }
}

fn parse_unchecked(input: &str) -> Result<IndexedGrammar, SyntaxError> {
    let mut name_: Option<String> = None;
    let mut variables = None;
    let mut terminals = None;
    let mut indices = None;
    let mut start: Option<Symbol> = None;
    let mut productions = Vec::new();
    for line in text::lines(input) {
        if let Some(rest) = line.text.strip_prefix("grammar") {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                if name_.is_some() {
                    return Err(line.error(line.text, "duplicate `grammar` line"));
                }
                name_ = Some(rest.trim().to_string());
                continue;
            }
        }
        let (key, value) = line
            .key_value()
            .ok_or_else(|| line.error(line.text, "expected `key: value`"))?;
        let slot = match key {
            "variables" => &mut variables,
            "terminals" => &mut terminals,
            "indices" => &mut indices,
            "start" => {
                if start.is_some() {
                    return Err(line.error(line.text, "duplicate `start:` line"));
                }
                start = Some(Symbol::new(name(&line, Some(value), "a start variable")?));
                continue;
            }
            "prod" => {
                productions.push(parse_production(&line, value)?);
                continue;
            }
            other => return Err(line.error(line.text, format!("unknown key `{}`", other))),
        };
        if slot.is_some() {
            return Err(line.error(line.text, format!("duplicate `{}:` line", key)));
        }
        *slot = Some(text::symbol_list(&line, value)?);
    }
    let start = start.ok_or_else(|| SyntaxError::new(0, 0, "missing `start:` line"))?;
    Ok(IndexedGrammar {
        name: name_.filter(|n| !n.is_empty()).unwrap_or_else(|| "G".to_string()),
        variables: variables.ok_or_else(|| SyntaxError::new(0, 0, "missing `variables:` line"))?,
        terminals: terminals.ok_or_else(|| SyntaxError::new(0, 0, "missing `terminals:` line"))?,
        indices: indices.unwrap_or_default(),
        productions,
        start,
    })
}

pub fn serialize_grammar(g: &IndexedGrammar) -> String {
    let mut out = String::new();
    out.push_str(&format!("grammar {}\n", g.name));
    out.push_str(&format!("variables: {}\n", text::join(&g.variables, ", ")));
    out.push_str(&format!("terminals: {}\n", text::join(&g.terminals, ", ")));
    out.push_str(&format!("indices: {}\n", text::join(&g.indices, ", ")));
    out.push_str(&format!("start: {}\n", g.start));
    for p in &g.productions {
        out.push_str(&format!("prod: {}\n", p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parses_all_three_forms() {
        let g = parse_grammar(
            "grammar t\nvariables: S, Y, X1\nterminals: a, b\nindices: e, f\nstart: S\n\
             prod: S -> Y [+e]\nprod: Y -> X1 X1\nprod: X1 [f] -> a X1\nprod: X1 [e] -> _\n",
        )
        .unwrap();
        assert_eq!(g.productions[0], Production::push("S", "Y", "e"));
        assert_eq!(g.productions[1], Production::plain("Y", &["X1", "X1"]));
        assert_eq!(g.productions[2], Production::consume("X1", "f", &["a", "X1"]));
        assert_eq!(g.productions[3], Production::consume("X1", "e", &[]));
    }

    #[test]
    fn section5_file_parses_to_seventeen_productions() {
        let g = parse_grammar(fixtures::SEC5_IG).unwrap();
        assert_eq!(g.productions.len(), 17);
        assert_eq!(g, fixtures::sec5_grammar());
    }

    #[test]
    fn round_trip() {
        for g in [fixtures::sec5_grammar(), fixtures::ex1_grammar()] {
            assert_eq!(parse_grammar(&serialize_grammar(&g)).unwrap(), g);
        }
    }

    #[test]
    fn duplicate_start_is_syntax_error() {
        let err = parse_grammar("variables: S\nterminals: a\nstart: S\nstart: S\n").unwrap_err();
        match err {
            GrammarError::Syntax(e) => {
                assert_eq!(e.line, 4);
                assert!(e.message.contains("duplicate"));
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn syntax_error_column() {
        let err = parse_grammar("variables: S\nterminals: a\nstart: S\nprod: S => a\n").unwrap_err();
        match err {
            GrammarError::Syntax(e) => assert_eq!((e.line, e.column), (4, 9)),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn violations_surface() {
        let err = parse_grammar("variables: S\nterminals: a\nindices: e\nstart: S\nprod: S -> S [+a]\n").unwrap_err();
        match err {
            GrammarError::Invalid(v) => assert!(v.iter().any(|v| v.message == "pushed symbol not an index")),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn generated_names_with_hash_survive() {
        let g = parse_grammar("variables: S, Z#1\nterminals: a\nstart: S\nprod: S -> Z#1 # comment\nprod: Z#1 -> a\n").unwrap();
        assert_eq!(g.productions.len(), 2);
        assert!(g.is_variable("Z#1"));
    }
}
