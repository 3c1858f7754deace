//! Symbol names and terminal words.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// An interned-by-value symbol name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Names usable in the text formats: non-empty, no whitespace, commas or brackets.
    pub fn is_well_formed(name: &str) -> bool {
        !name.is_empty()
            && !name
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, ',' | '[' | ']' | '(' | ')' | ';'))
            && name != "_"
            && name != "->"
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A word over terminal symbols. Ordered length-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Parses a word written either as space-separated symbols or, when it
    /// contains no whitespace, as a run of single-character symbols.
    /// `_` and the empty string denote the empty word.
    pub fn parse(text: &str) -> Self {
        let text = text.trim();
        if text.is_empty() || text == "_" || text == "ε" {
            return Word::empty();
        }
        if text.contains(char::is_whitespace) {
            Word(text.split_whitespace().map(Symbol::from).collect())
        } else {
            Word(text.chars().map(|c| Symbol::new(c.encode_utf8(&mut [0; 4]))).collect())
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word::parse(s)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        let compact = self.0.iter().all(|s| s.as_str().chars().count() == 1);
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 && !compact {
                f.write_str(" ")?;
            }
            f.write_str(s.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_compact_and_spaced() {
        assert_eq!(Word::parse("abc").len(), 3);
        assert_eq!(Word::parse("x1 y2").0, vec![Symbol::new("x1"), Symbol::new("y2")]);
        assert!(Word::parse("_").is_empty());
        assert_eq!(Word::parse("ab$").to_string(), "ab$");
        assert_eq!(Word::parse("x1 y").to_string(), "x1 y");
    }

    #[test]
    fn length_lex_order() {
        let mut v = vec![Word::parse("b"), Word::parse("aa"), Word::parse("_"), Word::parse("a")];
        v.sort();
        let shown: Vec<String> = v.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["_", "a", "b", "aa"]);
    }
}
