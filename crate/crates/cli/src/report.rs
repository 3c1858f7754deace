//! Line-oriented reports: blocks of `key: value` lines separated by `---`.
//!
//! Keys are lowercase identifiers; repeated keys are kept in order. Values
//! are single lines, with `\` and newlines escaped as `\\` and `\n`.

use std::fmt;

use thiserror::Error;

pub const SEPARATOR: &str = "---";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReportError {
    #[error("line {0}: expected `key: value`")]
    NotAField(usize),
    #[error("line {0}: malformed key `{1}`")]
    BadKey(usize, String),
    #[error("line {0}: bad escape in value")]
    BadEscape(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Block {
    pub fields: Vec<(String, String)>,
}

impl Block {
    pub fn new() -> Self {
        Block::default()
    }

    pub fn push(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        debug_assert!(is_key(key), "malformed key {}", key);
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.fields.iter().filter(move |(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub blocks: Vec<Block>,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push_str(SEPARATOR);
                out.push('\n');
            }
            for (k, v) in &b.fields {
                out.push_str(k);
                out.push_str(": ");
                out.push_str(&escape(v));
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report, ReportError> {
        let mut blocks = vec![Block::new()];
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if line == SEPARATOR {
                blocks.push(Block::new());
                continue;
            }
            let (k, v) = line.split_once(": ").or_else(|| line.strip_suffix(':').map(|k| (k, ""))).ok_or(ReportError::NotAField(n))?;
            if !is_key(k) {
                return Err(ReportError::BadKey(n, k.to_string()));
            }
            let v = unescape(v).ok_or(ReportError::BadEscape(n))?;
            blocks.last_mut().expect("at least one block").fields.push((k.to_string(), v));
        }
        if blocks.len() == 1 && blocks[0].fields.is_empty() {
            blocks.clear();
        }
        Ok(Report { blocks })
    }
}

fn is_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn escape(v: &str) -> String {
    v.replace('\\', "\\\\").replace('\n', "\\n")
}

fn unescape(v: &str) -> Option<String> {
    let mut out = String::with_capacity(v.len());
    let mut chars = v.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next()? {
                '\\' => out.push('\\'),
                'n' => out.push('\n'),
                _ => return None,
            }
        } else {
            out.push(c);
        }
    }
    Some(out)
}
