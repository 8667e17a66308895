//! Plain-text instance files.
//!
//! ```text
//! # Cohen-Macaulay example over k[[x,y]]
//! characteristic: 32003
//! variables: x, y
//! hypersurface: y^3
//! truncation: 8
//! seed: 7
//! matrix:
//!   [y^2, 0]
//!   [x^2, y]
//! ```
//!
//! Lines are `key: value` pairs; `#` starts a comment. After `matrix:` each
//! following line holding a bracketed, comma-separated list of expressions is
//! one row. `variables` and `matrix` are required; `characteristic` defaults
//! to 32003. Keys may appear in any order but at most once.

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::parse;
use crate::presentation::Presentation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceFile {
    pub characteristic: u32,
    pub variables: Vec<String>,
    pub matrix: Vec<Vec<String>>,
    pub hypersurface: Option<String>,
    pub truncation: Option<usize>,
    pub seed: Option<u64>,
    /// Source positions `(line, column)` of each matrix entry and of the
    /// hypersurface, for error messages.
    entry_pos: Vec<Vec<(usize, usize)>>,
    hypersurface_pos: (usize, usize),
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Instance { line, column, message: message.into() }
}

/// Column (1-based) of the first non-blank character at or after byte `from`.
fn col_after(line: &str, from: usize) -> usize {
    let skipped = line[from..].chars().take_while(|c| c.is_whitespace()).count();
    line[..from].chars().count() + skipped + 1
}

impl InstanceFile {
    pub fn new(
        characteristic: u32,
        variables: Vec<String>,
        matrix: Vec<Vec<String>>,
        hypersurface: Option<String>,
    ) -> Self {
        let entry_pos = matrix.iter().map(|r| vec![(0, 0); r.len()]).collect();
        InstanceFile {
            characteristic,
            variables,
            matrix,
            hypersurface,
            truncation: None,
            seed: None,
            entry_pos,
            hypersurface_pos: (0, 0),
        }
    }

    pub fn from_presentation(pres: &Presentation) -> Self {
        InstanceFile::new(
            pres.field().characteristic(),
            pres.vars().to_vec(),
            pres.matrix_strings(),
            pres.hypersurface_string(),
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut characteristic = None;
        let mut variables: Option<Vec<String>> = None;
        let mut matrix: Option<Vec<Vec<String>>> = None;
        let mut entry_pos = Vec::new();
        let mut hypersurface = None;
        let mut hypersurface_pos = (0, 0);
        let mut truncation = None;
        let mut seed = None;
        let mut in_matrix = false;

        for (idx, raw) in text.lines().enumerate() {
            let ln = idx + 1;
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed.starts_with('[') {
                if !in_matrix {
                    return Err(err(ln, col_after(line, 0), "matrix row outside a matrix section"));
                }
                let (row, pos) = parse_row(line, ln)?;
                matrix.as_mut().unwrap().push(row);
                entry_pos.push(pos);
                continue;
            }
            in_matrix = false;
            let Some(colon) = line.find(':') else {
                return Err(err(ln, col_after(line, 0), "expected 'key: value'"));
            };
            let key = line[..colon].trim();
            let value = line[colon + 1..].trim();
            let vcol = col_after(line, colon + 1);
            let dup = |seen: bool| -> Result<()> {
                if seen {
                    Err(err(ln, col_after(line, 0), format!("duplicate key '{key}'")))
                } else {
                    Ok(())
                }
            };
            match key {
                "characteristic" => {
                    dup(characteristic.is_some())?;
                    let p: u64 = value.parse().map_err(|_| err(ln, vcol, "characteristic must be an integer"))?;
                    let f = FieldSpec::new(p).map_err(|e| err(ln, vcol, e.to_string()))?;
                    characteristic = Some(f.characteristic());
                }
                "variables" => {
                    dup(variables.is_some())?;
                    let names: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
                    if names.iter().any(|s| s.is_empty()) {
                        return Err(err(ln, vcol, "empty variable name"));
                    }
                    variables = Some(names);
                }
                "hypersurface" => {
                    dup(hypersurface.is_some())?;
                    if value.is_empty() {
                        return Err(err(ln, vcol, "empty hypersurface equation"));
                    }
                    hypersurface = Some(value.to_string());
                    hypersurface_pos = (ln, vcol);
                }
                "truncation" => {
                    dup(truncation.is_some())?;
                    let n: usize = value.parse().map_err(|_| err(ln, vcol, "truncation must be a positive integer"))?;
                    if n < 3 {
                        return Err(err(ln, vcol, "truncation must be at least 3"));
                    }
                    truncation = Some(n);
                }
                "seed" => {
                    dup(seed.is_some())?;
                    seed = Some(value.parse().map_err(|_| err(ln, vcol, "seed must be an unsigned integer"))?);
                }
                "matrix" => {
                    dup(matrix.is_some())?;
                    if !value.is_empty() {
                        return Err(err(ln, vcol, "matrix rows go on the following lines"));
                    }
                    matrix = Some(Vec::new());
                    in_matrix = true;
                }
                _ => return Err(err(ln, col_after(line, 0), format!("unknown key '{key}'"))),
            }
        }
        let last = text.lines().count().max(1);
        let variables = variables.ok_or_else(|| err(last, 1, "missing 'variables'"))?;
        let matrix = matrix.ok_or_else(|| err(last, 1, "missing 'matrix'"))?;
        if matrix.is_empty() {
            return Err(err(last, 1, "matrix has no rows"));
        }
        Ok(InstanceFile {
            characteristic: characteristic.unwrap_or(FieldSpec::DEFAULT_CHARACTERISTIC),
            variables,
            matrix,
            hypersurface,
            truncation,
            seed,
            entry_pos,
            hypersurface_pos,
        })
    }

    /// Builds and validates the presentation; parse errors carry the source
    /// position of the offending expression.
    pub fn presentation(&self) -> Result<Presentation> {
        let field = FieldSpec::new(self.characteristic as u64)?;
        let locate = |pos: (usize, usize), e: Error| match e {
            Error::Parse { column, message } if pos.0 > 0 => err(pos.0, pos.1 + column - 1, message),
            other => other,
        };
        let mut phi = Vec::with_capacity(self.matrix.len());
        for (i, row) in self.matrix.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (j, s) in row.iter().enumerate() {
                let pos = self.entry_pos.get(i).and_then(|p| p.get(j)).copied().unwrap_or((0, 0));
                r.push(parse(s, &self.variables, field).map_err(|e| locate(pos, e))?);
            }
            phi.push(r);
        }
        let g = match &self.hypersurface {
            Some(s) => Some(parse(s, &self.variables, field).map_err(|e| locate(self.hypersurface_pos, e))?),
            None => None,
        };
        Presentation::new(field, self.variables.clone(), phi, g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.characteristic != FieldSpec::DEFAULT_CHARACTERISTIC {
            out.push_str(&format!("characteristic: {}\n", self.characteristic));
        }
        out.push_str(&format!("variables: {}\n", self.variables.join(", ")));
        if let Some(g) = &self.hypersurface {
            out.push_str(&format!("hypersurface: {g}\n"));
        }
        if let Some(n) = self.truncation {
            out.push_str(&format!("truncation: {n}\n"));
        }
        if let Some(s) = self.seed {
            out.push_str(&format!("seed: {s}\n"));
        }
        out.push_str("matrix:\n");
        for row in &self.matrix {
            out.push_str(&format!("  [{}]\n", row.join(", ")));
        }
        out
    }
}

fn parse_row(line: &str, ln: usize) -> Result<(Vec<String>, Vec<(usize, usize)>)> {
    let open = line.find('[').expect("row starts with '['");
    let Some(close) = line.rfind(']') else {
        return Err(err(ln, line.chars().count() + 1, "missing ']'"));
    };
    if !line[close + 1..].trim().is_empty() {
        return Err(err(ln, col_after(line, close + 1), "unexpected text after ']'"));
    }
    let mut entries = Vec::new();
    let mut pos = Vec::new();
    let mut start = open + 1;
    let body = &line[..close];
    loop {
        let end = body[start..].find(',').map_or(close, |i| start + i);
        let s = body[start..end].trim();
        if s.is_empty() {
            return Err(err(ln, col_after(line, start), "empty matrix entry"));
        }
        entries.push(s.to_string());
        pos.push((ln, col_after(line, start)));
        if end == close {
            break;
        }
        start = end + 1;
    }
    Ok((entries, pos))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# sample\nvariables: x, y\nhypersurface: y^3\nseed: 5\nmatrix:\n  [y^2, 0]\n  [x^2, y]  # second row\n";

    #[test]
    fn parses_and_round_trips() {
        let f = InstanceFile::parse(SAMPLE).unwrap();
        assert_eq!(f.characteristic, 32003);
        assert_eq!(f.matrix, vec![vec!["y^2", "0"], vec!["x^2", "y"]]);
        assert_eq!(f.seed, Some(5));
        let again = InstanceFile::parse(&f.to_text()).unwrap();
        assert_eq!(again.to_text(), f.to_text());
        let p = f.presentation().unwrap();
        assert_eq!(p.ord_det(), 3);
    }

    #[test]
    fn errors_carry_positions() {
        let bad = "variables: x, y\nmatrix:\n  [y^2, 0]\n  [x^^2, y]\n";
        let e = InstanceFile::parse(bad).unwrap().presentation().unwrap_err();
        assert!(matches!(e, Error::Instance { line: 4, column: 6, .. }), "{e:?}");
        let e = InstanceFile::parse("variables: x\nfoo: 1\n").unwrap_err();
        assert_eq!(e, Error::Instance { line: 2, column: 1, message: "unknown key 'foo'".into() });
        let e = InstanceFile::parse("variables: x\nmatrix:\n  [x,  ]\n").unwrap_err();
        assert_eq!(e, Error::Instance { line: 3, column: 8, message: "empty matrix entry".into() });
        let e = InstanceFile::parse("variables: x\n").unwrap_err();
        assert!(matches!(e, Error::Instance { message, .. } if message == "missing 'matrix'"));
        let e = InstanceFile::parse("characteristic: 10\nvariables: x\n").unwrap_err();
        assert!(matches!(e, Error::Instance { line: 1, column: 17, .. }));
    }
}
