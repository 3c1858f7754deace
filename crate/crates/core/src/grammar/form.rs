use std::fmt;

use super::{ApplyError, IndexedGrammar, Production, ProductionClass};
use crate::symbol::{Symbol, Word};

/// One item of a sentential form. Stacks are stored top-first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    Terminal(Symbol),
    Var { var: Symbol, stack: Vec<Symbol> },
}

impl Item {
    pub fn var(var: &str, stack: &[&str]) -> Self {
        Item::Var { var: var.into(), stack: stack.iter().map(|s| Symbol::new(s)).collect() }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Item::Var { .. })
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Terminal(t) => write!(f, "{}", t),
            Item::Var { var, stack } if stack.is_empty() => write!(f, "{}", var),
            Item::Var { var, stack } => {
                write!(f, "{}[", var)?;
                for (i, s) in stack.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", s)?;
                }
                f.write_str("]")
            }
        }
    }
}

/// A sequence of terminals and stack-carrying variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SententialForm {
    pub items: Vec<Item>,
}

impl SententialForm {
    pub fn new(items: Vec<Item>) -> Self {
        SententialForm { items }
    }

    pub fn start(start: Symbol) -> Self {
        SententialForm { items: vec![Item::Var { var: start, stack: Vec::new() }] }
    }

    /// Number of variable occurrences, `|ν|_V`.
    pub fn width(&self) -> usize {
        self.items.iter().filter(|i| i.is_var()).count()
    }

    pub fn is_terminal(&self) -> bool {
        self.items.iter().all(|i| !i.is_var())
    }

    pub fn terminal_count(&self) -> usize {
        self.items.len() - self.width()
    }

    /// The terminal word, if the form has no variables.
    pub fn yield_word(&self) -> Option<Word> {
        self.items
            .iter()
            .map(|i| match i {
                Item::Terminal(t) => Some(t.clone()),
                Item::Var { .. } => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }

    /// The terminal segments `u₁, …, u_{k+1}` between variables.
    pub fn terminal_segments(&self) -> Vec<Vec<Symbol>> {
        let mut segs = vec![Vec::new()];
        for item in &self.items {
            match item {
                Item::Terminal(t) => segs.last_mut().unwrap().push(t.clone()),
                Item::Var { .. } => segs.push(Vec::new()),
            }
        }
        segs
    }

    /// Item positions that hold variables.
    pub fn variable_positions(&self) -> Vec<usize> {
        (0..self.items.len()).filter(|&i| self.items[i].is_var()).collect()
    }
}

impl fmt::Display for SententialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return f.write_str("_");
        }
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", item)?;
        }
        Ok(())
    }
}

pub(super) fn apply(
    g: &IndexedGrammar,
    form: &SententialForm,
    pos: usize,
    p: &Production,
) -> Result<SententialForm, ApplyError> {
    let (var, stack) = match form.items.get(pos) {
        Some(Item::Var { var, stack }) => (var, stack),
        _ => return Err(ApplyError::PositionNotVariable(pos)),
    };
    if var != p.lhs() {
        return Err(ApplyError::LhsMismatch { expected: p.lhs().clone(), found: var.clone() });
    }
    let expand = |rhs: &[Symbol], inherited: &[Symbol]| -> Vec<Item> {
        rhs.iter()
            .map(|s| {
                if g.is_variable(s.as_str()) {
                    Item::Var { var: s.clone(), stack: inherited.to_vec() }
                } else {
                    Item::Terminal(s.clone())
                }
            })
            .collect()
    };
    let replacement = match p {
        Production::Plain { rhs, .. } => expand(rhs, stack),
        Production::Push { var: b, index, .. } => {
            let mut pushed = Vec::with_capacity(stack.len() + 1);
            pushed.push(index.clone());
            pushed.extend(stack.iter().cloned());
            vec![Item::Var { var: b.clone(), stack: pushed }]
        }
        Production::Consume { index, rhs, .. } => match stack.first() {
            None => return Err(ApplyError::EmptyStackOnConsume),
            Some(top) if top != index => {
                return Err(ApplyError::TopIndexMismatch { expected: index.clone(), found: top.clone() })
            }
            Some(_) => expand(rhs, &stack[1..]),
        },
    };
    let mut items = Vec::with_capacity(form.items.len() + replacement.len());
    items.extend(form.items[..pos].iter().cloned());
    items.extend(replacement);
    items.extend(form.items[pos + 1..].iter().cloned());
    Ok(SententialForm { items })
}

/// A one-step derivative: which production was applied where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor {
    pub position: usize,
    pub production: usize,
    pub form: SententialForm,
}

pub(super) fn successors(g: &IndexedGrammar, form: &SententialForm) -> Vec<Successor> {
    let mut out = Vec::new();
    for position in form.variable_positions() {
        for (production, p) in g.productions.iter().enumerate() {
            if let Ok(next) = apply(g, form, position, p) {
                out.push(Successor { position, production, form: next });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub production: usize,
    pub position: usize,
    pub form: SententialForm,
}

/// A derivation starting from the start variable with an empty stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub initial: SententialForm,
    pub steps: Vec<DerivationStep>,
}

impl Derivation {
    pub fn new(initial: SententialForm) -> Self {
        Derivation { initial, steps: Vec::new() }
    }

    /// Replays `(production, position)` pairs from the grammar's start form.
    pub fn replay(g: &IndexedGrammar, moves: &[(usize, usize)]) -> Result<Self, ApplyError> {
        Self::replay_from(g, g.start_form(), moves)
    }

    pub fn replay_from(
        g: &IndexedGrammar,
        initial: SententialForm,
        moves: &[(usize, usize)],
    ) -> Result<Self, ApplyError> {
        let mut d = Derivation::new(initial);
        for &(production, position) in moves {
            let p = g.productions.get(production).ok_or(ApplyError::UnknownProduction(production))?;
            let next = apply(g, d.last(), position, p)?;
            d.steps.push(DerivationStep { production, position, form: next });
        }
        Ok(d)
    }

    pub fn last(&self) -> &SententialForm {
        self.steps.last().map(|s| &s.form).unwrap_or(&self.initial)
    }

    pub fn forms(&self) -> impl Iterator<Item = &SententialForm> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.form))
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Maximum width over all forms of the derivation.
    pub fn index(&self) -> usize {
        self.forms().map(|f| f.width()).max().unwrap_or(0)
    }

    pub fn special_count(&self, g: &IndexedGrammar) -> usize {
        self.steps
            .iter()
            .filter(|s| g.classify(&g.productions[s.production]) == ProductionClass::Special)
            .count()
    }

    pub fn yield_word(&self) -> Option<Word> {
        self.last().yield_word()
    }

    pub fn moves(&self) -> Vec<(usize, usize)> {
        self.steps.iter().map(|s| (s.production, s.position)).collect()
    }

    /// Checks that every step is a valid application in `g`.
    pub fn verify(&self, g: &IndexedGrammar) -> Result<(), ApplyError> {
        let replayed = Self::replay_from(g, self.initial.clone(), &self.moves())?;
        if replayed.steps.iter().zip(&self.steps).all(|(a, b)| a.form == b.form) {
            Ok(())
        } else {
            Err(ApplyError::PositionNotVariable(usize::MAX))
        }
    }

    /// One line per step: `<production-id> @ <position> | <form>`. The first
    /// line shows the initial form with `-` in place of a production id.
    pub fn trace(&self) -> String {
        let mut out = format!("- @ - | {}\n", self.initial);
        for s in &self.steps {
            out.push_str(&format!("p{} @ {} | {}\n", s.production, s.position, s.form));
        }
        out
    }

    /// Reads the `(production, position)` pairs back from a trace and
    /// replays them, checking each printed form.
    pub fn from_trace(g: &IndexedGrammar, trace: &str) -> Result<Self, String> {
        let mut moves = Vec::new();
        let mut printed = Vec::new();
        for line in trace.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (head, form) = line.split_once('|').ok_or_else(|| format!("malformed trace line `{}`", line))?;
            let (prod, pos) = head.split_once('@').ok_or_else(|| format!("malformed trace line `{}`", line))?;
            let (prod, pos) = (prod.trim(), pos.trim());
            if prod == "-" {
                continue;
            }
            let prod: usize = prod
                .strip_prefix('p')
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| format!("bad production id `{}`", prod))?;
            let pos: usize = pos.parse().map_err(|_| format!("bad position `{}`", pos))?;
            moves.push((prod, pos));
            printed.push(form.trim().to_string());
        }
        let d = Self::replay(g, &moves).map_err(|e| e.to_string())?;
        for (step, text) in d.steps.iter().zip(&printed) {
            if step.form.to_string() != *text {
                return Err(format!("trace form `{}` does not match replayed `{}`", text, step.form));
            }
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::grammar::Production;

    fn form(items: Vec<Item>) -> SententialForm {
        SententialForm::new(items)
    }

    #[test]
    fn push_prepends_index() {
        let g = fixtures::sec5_grammar();
        let p = Production::push("Y", "Y", "f");
        let out = g.apply_production(&form(vec![Item::var("Y", &["e"])]), 0, &p).unwrap();
        assert_eq!(out, form(vec![Item::var("Y", &["f", "e"])]));
    }

    #[test]
    fn plain_copies_stack_to_every_variable() {
        let g = fixtures::sec5_grammar();
        let q = Production::plain("Y", &["X1", "X2", "X3", "X4", "X5", "X6", "X7"]);
        let out = g.apply_production(&form(vec![Item::var("Y", &["f", "e"])]), 0, &q).unwrap();
        assert_eq!(out.width(), 7);
        for item in &out.items {
            match item {
                Item::Var { stack, .. } => assert_eq!(stack, &vec![Symbol::new("f"), Symbol::new("e")]),
                _ => panic!("unexpected terminal"),
            }
        }
    }

    #[test]
    fn consume_to_empty_erases_variable() {
        let g = fixtures::sec5_grammar();
        let p = Production::consume("X1", "e", &[]);
        let start = form(vec![Item::Terminal("a".into()), Item::var("X1", &["e"]), Item::Terminal("b".into())]);
        let out = g.apply_production(&start, 1, &p).unwrap();
        assert_eq!(out.to_string(), "a b");
    }

    #[test]
    fn apply_errors() {
        let g = fixtures::sec5_grammar();
        let f = form(vec![Item::Terminal("a".into()), Item::var("X1", &[]), Item::var("X2", &["f"])]);
        let c = Production::consume("X1", "e", &[]);
        assert_eq!(g.apply_production(&f, 0, &c), Err(ApplyError::PositionNotVariable(0)));
        assert!(matches!(g.apply_production(&f, 2, &c), Err(ApplyError::LhsMismatch { .. })));
        assert_eq!(g.apply_production(&f, 1, &c), Err(ApplyError::EmptyStackOnConsume));
        let c2 = Production::consume("X2", "e", &[]);
        assert!(matches!(g.apply_production(&f, 2, &c2), Err(ApplyError::TopIndexMismatch { .. })));
    }

    #[test]
    fn start_form_has_single_successor() {
        let g = fixtures::sec5_grammar();
        let succ = g.successors(&g.start_form());
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].form.to_string(), "Y[e]");
    }

    #[test]
    fn y_with_e_has_two_successors() {
        let g = fixtures::sec5_grammar();
        let succ = g.successors(&form(vec![Item::var("Y", &["e"])]));
        let shown: Vec<String> = succ.iter().map(|s| s.form.to_string()).collect();
        assert_eq!(shown, ["Y[f,e]", "X1[e] X2[e] X3[e] X4[e] X5[e] X6[e] X7[e]"]);
    }

    #[test]
    fn terminal_form_has_no_successors() {
        let g = fixtures::sec5_grammar();
        assert!(g.successors(&form(vec![Item::Terminal("a".into())])).is_empty());
    }

    #[test]
    fn trace_round_trip() {
        let g = fixtures::sec5_grammar();
        let d = Derivation::replay(&g, &[(0, 0), (2, 0)]).unwrap();
        let back = Derivation::from_trace(&g, &d.trace()).unwrap();
        assert_eq!(back, d);
        assert_eq!(d.index(), 7);
    }
}
