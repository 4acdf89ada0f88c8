//! Line-oriented text helpers shared by the data file formats.
//!
//! Every format is a sequence of `keyword rest-of-line` records. Blank lines and lines
//! starting with `#` are ignored. Matrices are written on one line with rows separated
//! by `;`, e.g. `0 -1 ; 1 0`.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rational::{parse_rational, render_rational, Q};

/// One non-comment line: 1-based line number, keyword, and the remaining text.
#[derive(Clone, Debug, PartialEq)]
pub struct Record<'a> {
    pub line: usize,
    pub key: &'a str,
    pub rest: &'a str,
}

pub fn records(text: &str) -> impl Iterator<Item = Record<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            return None;
        }
        let (key, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        Some(Record {
            line: i + 1,
            key,
            rest: rest.trim(),
        })
    })
}

pub fn format_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Format { line, msg: msg.into() }
}

pub fn parse_rationals(text: &str, line: usize) -> Result<Vec<Q>> {
    text.split_whitespace()
        .map(|tok| parse_rational(tok).ok_or_else(|| format_error(line, format!("bad rational `{tok}`"))))
        .collect()
}

pub fn parse_usize(text: &str, line: usize) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| format_error(line, format!("expected a non-negative integer, got `{text}`")))
}

pub fn parse_matrix(text: &str, line: usize) -> Result<Mat<Q>> {
    let rows: Vec<Vec<Q>> = text
        .split(';')
        .map(|r| parse_rationals(r, line))
        .collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(format_error(line, "ragged or empty matrix"));
    }
    Ok(Mat::from_rows(rows))
}

pub fn render_rationals(values: &[Q]) -> String {
    values.iter().map(render_rational).collect::<Vec<_>>().join(" ")
}

pub fn render_matrix(m: &Mat<Q>) -> String {
    (0..m.rows())
        .map(|i| render_rationals(m.row(i)))
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// Split `name = value`.
pub fn split_binding(text: &str, line: usize) -> Result<(&str, &str)> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format_error(line, "expected `name = value`"))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format_error(line, format!("bad symbol name `{name}`")));
    }
    Ok((name, value.trim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn matrix_round_trip() {
        let m = parse_matrix("0 -1 ; 1 1/2", 3).unwrap();
        assert_eq!(*m.get(1, 1), qr(1, 2));
        assert_eq!(*m.get(0, 1), q(-1));
        assert_eq!(render_matrix(&m), "0 -1 ; 1 1/2");
        assert!(matches!(parse_matrix("1 2 ; 3", 7), Err(Error::Format { line: 7, .. })));
    }

    #[test]
    fn records_skip_comments() {
        let text = "# header\n\nvars x y\n  theta t1 = x^2\n";
        let recs: Vec<_> = records(text).collect();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].line, 4);
        assert_eq!(recs[1].key, "theta");
        assert_eq!(split_binding(recs[1].rest, 4).unwrap(), ("t1", "x^2"));
    }
}
