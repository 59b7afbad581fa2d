//! The code-list text format.
//!
//! ```text
//! # comment
//! length=6
//! 0,13,26,113,231,285,385,389,399,410,545,582,694
//! ```
//!
//! Each non-comment line after the header is one code, written as ascending
//! comma-separated base-3 encodings. Blank lines are ignored.

use std::fmt::Write as _;

use crate::code::Code;
use crate::error::{Result, TrifError};
use crate::word::{check_length, POW3};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeList {
    pub length: usize,
    pub codes: Vec<Code>,
}

pub fn parse_code_list(text: &str) -> Result<CodeList> {
    let mut length: Option<usize> = None;
    let mut codes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some(n) = length else {
            let value = trimmed
                .strip_prefix("length=")
                .ok_or_else(|| TrifError::parse(line_no, 1, "expected header `length=<n>`"))?;
            let n: usize = value
                .trim()
                .parse()
                .map_err(|_| TrifError::parse(line_no, 8, format!("invalid length `{value}`")))?;
            check_length(n).map_err(|e| TrifError::parse(line_no, 8, e.to_string()))?;
            length = Some(n);
            continue;
        };
        codes.push(parse_code_line(line, line_no, n)?);
    }
    let length = length.ok_or_else(|| TrifError::parse(1, 1, "missing `length=<n>` header"))?;
    Ok(CodeList { length, codes })
}

fn parse_code_line(line: &str, line_no: usize, n: usize) -> Result<Code> {
    let mut values = Vec::new();
    let mut column = 1;
    for field in line.split(',') {
        let lead = field.len() - field.trim_start().len();
        let token = field.trim();
        let col = column + lead;
        let v: u64 = token
            .parse()
            .map_err(|_| TrifError::parse(line_no, col, format!("invalid integer `{token}`")))?;
        if v >= POW3[n] {
            return Err(TrifError::parse(
                line_no,
                col,
                format!("value {v} does not fit in {n} ternary digits"),
            ));
        }
        if let Some(&prev) = values.last() {
            if u64::from(prev) >= v {
                return Err(TrifError::parse(
                    line_no,
                    col,
                    "values must be strictly ascending",
                ));
            }
        }
        values.push(v as u32);
        column += field.len() + 1;
    }
    Code::from_values(n, &values).map_err(|e| TrifError::parse(line_no, 1, e.to_string()))
}

pub fn format_code_line(code: &Code) -> String {
    let mut s = String::new();
    for (i, v) in code.values().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{v}");
    }
    s
}

/// Renders a code list; every line of `comments` is emitted as `# ...`.
pub fn format_code_list(length: usize, codes: &[Code], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "length={length}");
    for code in codes {
        out.push_str(&format_code_line(code));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_code_list() {
        let text =
            "# a(6,13)\nlength=6\n0,13,26,113,231,285,385,389,399,410,545,582,694\n\n0, 13, 32\n";
        let list = parse_code_list(text).unwrap();
        assert_eq!(list.length, 6);
        assert_eq!(list.codes.len(), 2);
        assert_eq!(list.codes[1].values(), vec![0, 13, 32]);
    }

    #[test]
    fn diagnostics_carry_positions() {
        let err = parse_code_list("length=2\n0,1,x\n").unwrap_err();
        assert_eq!(
            err,
            TrifError::Parse {
                line: 2,
                column: 5,
                message: "invalid integer `x`".into()
            }
        );
        let err = parse_code_list("length=2\n0,9\n").unwrap_err();
        assert!(matches!(
            err,
            TrifError::Parse {
                line: 2,
                column: 3,
                ..
            }
        ));
        let err = parse_code_list("length=2\n3,1\n").unwrap_err();
        assert!(matches!(
            err,
            TrifError::Parse {
                line: 2,
                column: 3,
                ..
            }
        ));
        let err = parse_code_list("# only a comment\n0,1\n").unwrap_err();
        assert!(matches!(
            err,
            TrifError::Parse {
                line: 2,
                column: 1,
                ..
            }
        ));
        assert!(parse_code_list("").is_err());
        assert!(parse_code_list("length=0\n").is_err());
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(n in 1usize..7, sets in proptest::collection::vec(proptest::collection::btree_set(0u32..729, 1..20), 0..6)) {
            let codes: Vec<Code> = sets
                .into_iter()
                .map(|s| s.into_iter().filter(|&v| u64::from(v) < POW3[n]).collect::<Vec<_>>())
                .filter(|v| !v.is_empty())
                .map(|v| Code::from_values(n, &v).unwrap())
                .collect();
            let text = format_code_list(n, &codes, &["generated".to_string()]);
            let parsed = parse_code_list(&text).unwrap();
            prop_assert_eq!(parsed.length, n);
            prop_assert_eq!(parsed.codes, codes);
        }
    }
}
