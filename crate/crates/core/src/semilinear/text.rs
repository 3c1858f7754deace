//! Semilinear set and shape file formats.
//!
//! ```text
//! dim: 2
//! linear: base = (0,0); periods = (1,1)
//! linear: base = (1,0); periods = (1,0),(0,1)
//! shape: a, b          # optional here; also accepted on its own
//! ```

use super::{GinsburgShape, LinearSet, SemilinearError, SemilinearSet, Tuple};
use crate::symbol::Word;
use crate::text::{self, Line, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearFile {
    pub set: SemilinearSet,
    pub shape: Option<GinsburgShape>,
}

fn parse_tuple(line: &Line<'_>, s: &str) -> Result<Tuple, SyntaxError> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| line.error(s, "expected `(n,…)`"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|_| line.error(x, format!("expected a natural number, found `{}`", x.trim()))))
        .collect()
}

/// Splits `(…),(…)` at top-level commas.
fn parse_tuples(line: &Line<'_>, s: &str) -> Result<Vec<Tuple>, SyntaxError> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let close = rest.find(')').ok_or_else(|| line.error(rest, "unclosed `(`"))?;
        out.push(parse_tuple(line, &rest[..=close])?);
        rest = rest[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
        } else if !rest.is_empty() {
            return Err(line.error(rest, "expected `,` between tuples"));
        }
    }
    Ok(out)
}

fn shape_value(line: &Line<'_>, value: &str) -> Result<GinsburgShape, SemilinearError> {
    let words: Vec<Word> = value.split(',').map(Word::parse).collect();
    GinsburgShape::new(words).map_err(|_| line.error(value, "shape words must be nonempty").into())
}

pub fn parse_semilinear(input: &str) -> Result<SemilinearFile, SemilinearError> {
    let mut dim = None;
    let mut shape = None;
    let mut components = Vec::new();
    for line in text::lines(input) {
        let (key, value) = line.key_value().ok_or_else(|| line.error(line.text, "expected `key: value`"))?;
        match key {
            "dim" => {
                let d = value.parse::<usize>().map_err(|_| line.error(value, "expected a dimension"))?;
                dim = Some(d);
            }
            "shape" => shape = Some(shape_value(&line, value)?),
            "linear" => {
                let mut base = None;
                let mut periods = Vec::new();
                for part in value.split(';') {
                    let (k, v) = part.split_once('=').ok_or_else(|| line.error(part, "expected `base = …` or `periods = …`"))?;
                    match k.trim() {
                        "base" => base = Some(parse_tuple(&line, v)?),
                        "periods" => periods = parse_tuples(&line, v)?,
                        other => return Err(line.error(k, format!("unknown field `{}`", other)).into()),
                    }
                }
                let base = base.ok_or_else(|| line.error(value, "missing `base`"))?;
                let d = dim.ok_or_else(|| line.error(line.text, "`dim:` must come first"))?;
                if base.len() != d {
                    return Err(SemilinearError::DimensionMismatch { expected: d, found: base.len() });
                }
                components.push(LinearSet::new(base, periods)?);
            }
            other => return Err(line.error(line.text, format!("unknown key `{}`", other)).into()),
        }
    }
    let dim = dim.ok_or_else(|| SyntaxError::new(1, 1, "missing `dim:` line"))?;
    let set = SemilinearSet::new(dim, components)?;
    if let Some(sh) = &shape {
        if sh.dim() != dim {
            return Err(SemilinearError::DimensionMismatch { expected: dim, found: sh.dim() });
        }
    }
    Ok(SemilinearFile { set, shape })
}

/// A file holding one `shape:` line.
pub fn parse_shape(input: &str) -> Result<GinsburgShape, SemilinearError> {
    let mut shape = None;
    for line in text::lines(input) {
        match line.key_value() {
            Some(("shape", value)) if shape.is_none() => shape = Some(shape_value(&line, value)?),
            _ => return Err(line.error(line.text, "expected a single `shape:` line").into()),
        }
    }
    shape.ok_or_else(|| SyntaxError::new(1, 1, "missing `shape:` line").into())
}

pub fn serialize_semilinear(s: &SemilinearSet, shape: Option<&GinsburgShape>) -> String {
    let mut out = format!("dim: {}\n", s.dim);
    for l in &s.components {
        out.push_str(&format!("linear: {}\n", l));
    }
    if let Some(sh) = shape {
        let words: Vec<String> =
            sh.words.iter().map(|w| if w.iter().all(|a| a.as_str().chars().count() == 1) { w.to_string() } else { text::join(w.symbols(), " ") }).collect();
        out.push_str(&format!("shape: {}\n", words.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let src = "dim: 2\nlinear: base = (0,0); periods = (1,1)\nlinear: base = (1,0); periods = (1,0),(0,1)\nshape: a, bc\n";
        let f = parse_semilinear(src).unwrap();
        assert_eq!(f.set.components.len(), 2);
        assert_eq!(f.set.components[1].periods, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(f.shape.as_ref().unwrap().words[1], Word::parse("bc"));
        assert_eq!(parse_semilinear(&serialize_semilinear(&f.set, f.shape.as_ref())).unwrap(), f);
    }

    #[test]
    fn no_periods_and_errors() {
        let f = parse_semilinear("dim: 1\nlinear: base = (3)\n").unwrap();
        assert!(f.set.components[0].periods.is_empty());
        assert!(parse_semilinear("dim: 2\nlinear: base = (1)\n").is_err());
        assert!(parse_semilinear("linear: base = (1)\n").is_err());
        assert!(parse_semilinear("dim: 1\nlinear: base = (x)\n").is_err());
        assert_eq!(parse_semilinear("dim: 3\n").unwrap().set.components.len(), 0);
    }

    #[test]
    fn shape_file() {
        assert_eq!(parse_shape("shape: a, b, c\n").unwrap().dim(), 3);
        assert!(parse_shape("shape: a, _\n").is_err());
    }
}
