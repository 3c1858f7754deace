//! Shared helpers for the line-oriented file formats.

use std::fmt;

use thiserror::Error;

use crate::symbol::Symbol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl SyntaxError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        SyntaxError { line, column, message: message.into() }
    }
}

/// A non-blank, comment-stripped line with its 1-based number.
#[derive(Clone, Debug)]
pub struct Line<'a> {
    pub number: usize,
    pub text: &'a str,
    /// Byte offset of `text` within the original line.
    offset: usize,
}

impl<'a> Line<'a> {
    pub fn error(&self, at: &str, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.number, self.column_of(at), message)
    }

    /// 1-based column of a subslice of this line.
    pub fn column_of(&self, at: &str) -> usize {
        let base = self.text.as_ptr() as usize;
        let p = at.as_ptr() as usize;
        if p >= base && p <= base + self.text.len() {
            self.offset + (p - base) + 1
        } else {
            self.offset + 1
        }
    }

    /// Splits `key: value`. Keys are identifiers (letters, digits, `-`, `_`).
    pub fn key_value(&self) -> Option<(&'a str, &'a str)> {
        let (k, v) = self.text.split_once(':')?;
        let k = k.trim();
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return None;
        }
        Some((k, v.trim()))
    }
}

/// Drops comments and blank lines. A comment starts at a `#` that begins
/// the line or follows whitespace, so generated names such as `Z#1` survive.
pub fn lines(input: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let mut cut = raw.len();
        let mut prev_ws = true;
        for (j, c) in raw.char_indices() {
            if c == '#' && prev_ws {
                cut = j;
                break;
            }
            prev_ws = c.is_whitespace();
        }
        let kept = &raw[..cut];
        let trimmed = kept.trim();
        if trimmed.is_empty() {
            continue;
        }
        let offset = kept.len() - kept.trim_start().len();
        out.push(Line { number: i + 1, text: trimmed, offset });
    }
    out
}

/// Parses a comma-separated symbol list; an empty value gives an empty list.
pub fn symbol_list(line: &Line<'_>, value: &str) -> Result<Vec<Symbol>, SyntaxError> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|s| {
            let s = s.trim();
            if Symbol::is_well_formed(s) {
                Ok(Symbol::new(s))
            } else {
                Err(line.error(s, format!("malformed symbol `{}`", s)))
            }
        })
        .collect()
}

pub fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(sep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_need_leading_space() {
        let ls = lines("a: Z#1  # trailing\n# whole line\n\n  b: c");
        assert_eq!(ls.len(), 2);
        assert_eq!(ls[0].text, "a: Z#1");
        assert_eq!(ls[1].number, 4);
        assert_eq!(ls[1].key_value(), Some(("b", "c")));
    }

    #[test]
    fn columns_are_one_based() {
        let ls = lines("  key: value");
        let at = &ls[0].text[5..];
        assert_eq!(ls[0].column_of(at), 8);
    }
}
