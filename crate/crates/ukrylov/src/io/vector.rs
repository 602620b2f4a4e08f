//! Right-hand-side vectors: Matrix Market `array` (n x 1) or plain text with
//! whitespace-separated numbers.

use std::fmt::Write as _;
use std::path::Path;

use super::{parse_err, read_file, write_file, Error, Result, MAX_DIM};

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    let is_mm = lines
        .peek()
        .is_some_and(|(_, l)| l.trim_start().to_ascii_lowercase().starts_with("%%matrixmarket"));
    let mut expected = None;
    if is_mm {
        let (_, header) = lines.next().unwrap();
        let words: Vec<String> = header.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
        if words.len() != 5 || words[1] != "matrix" || words[2] != "array" {
            return Err(parse_err(1, "vector files must use the `matrix array` layout"));
        }
        if !matches!(words[3].as_str(), "real" | "double" | "integer") {
            return Err(Error::UnsupportedField(words[3].clone()));
        }
        if words[4] != "general" {
            return Err(Error::UnsupportedField(words[4].clone()));
        }
    }

    let mut values = Vec::new();
    for (ln, l) in lines {
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if is_mm && expected.is_none() {
            let dims: Vec<&str> = t.split_whitespace().collect();
            let parsed: Option<Vec<usize>> = dims.iter().map(|d| d.parse().ok()).collect();
            match parsed.as_deref() {
                Some([rows, 1]) if *rows <= MAX_DIM => expected = Some((*rows, ln)),
                Some([rows, 1]) => return Err(Error::TooLarge { n: *rows }),
                _ => return Err(parse_err(ln, "vector size line must read `n 1`")),
            }
            continue;
        }
        for tok in t.split_whitespace() {
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => return Err(parse_err(ln, format!("cannot parse value `{tok}`"))),
            }
        }
    }
    if let Some((n, ln)) = expected {
        if values.len() != n {
            return Err(parse_err(ln, format!("size line promises {n} values, found {}", values.len())));
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyVector);
    }
    if values.len() > MAX_DIM {
        return Err(Error::TooLarge { n: values.len() });
    }
    Ok(values)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&read_file(path)?)
}

/// Matrix Market `array real general` text for an n x 1 column.
pub fn to_vector_file(v: &[f64]) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} 1", v.len());
    for x in v {
        let _ = writeln!(out, "{x:e}");
    }
    out
}

pub fn write_vector(v: &[f64], path: &Path) -> Result<()> {
    write_file(path, &to_vector_file(v))
}
