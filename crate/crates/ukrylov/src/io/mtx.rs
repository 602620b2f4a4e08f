//! Matrix Market `matrix` files: coordinate or array layout, real or integer
//! field, general or symmetric storage.

use std::fmt::Write as _;
use std::path::Path;

use ukrylov_core::DenseSymmetric;

use super::{parse_err, read_file, write_file, Error, Result};

/// Largest accepted dimension; matrices are stored dense.
pub const MAX_DIM: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Storage {
    General,
    Symmetric,
}

struct Header {
    layout: Layout,
    storage: Storage,
    integer: bool,
}

fn parse_header(line: &str) -> Result<Header> {
    let words: Vec<String> = line.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_err(1, "expected a `%%MatrixMarket` header"));
    }
    if words.len() != 5 {
        return Err(parse_err(1, "header needs object, format, field and symmetry"));
    }
    if words[1] != "matrix" {
        return Err(Error::UnsupportedField(words[1].clone()));
    }
    let layout = match words[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(1, format!("unknown format `{other}`"))),
    };
    let integer = match words[3].as_str() {
        "real" | "double" => false,
        "integer" => true,
        other => return Err(Error::UnsupportedField(other.to_string())),
    };
    let storage = match words[4].as_str() {
        "general" => Storage::General,
        "symmetric" => Storage::Symmetric,
        other => return Err(Error::UnsupportedField(other.to_string())),
    };
    Ok(Header {
        layout,
        storage,
        integer,
    })
}

fn parse_value(tok: &str, integer: bool, line: usize) -> Result<f64> {
    let v = if integer {
        tok.parse::<i64>().map(|i| i as f64).ok()
    } else {
        tok.parse::<f64>().ok()
    };
    match v {
        Some(v) if v.is_finite() => Ok(v),
        Some(_) => Err(parse_err(line, format!("non-finite value `{tok}`"))),
        None => Err(parse_err(line, format!("cannot parse value `{tok}`"))),
    }
}

fn parse_index(tok: &str, n: usize, line: usize) -> Result<usize> {
    match tok.parse::<usize>() {
        Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
        Ok(i) => Err(parse_err(line, format!("index {i} outside 1..={n}"))),
        Err(_) => Err(parse_err(line, format!("cannot parse index `{tok}`"))),
    }
}

/// Parses the text of a Matrix Market file into a dense symmetric matrix.
///
/// Symmetric files may list each off-diagonal pair once from either
/// triangle; general files are checked for symmetry.
pub fn parse_matrix_market(text: &str) -> Result<DenseSymmetric> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = match lines.next() {
        Some((_, l)) => parse_header(l)?,
        None => return Err(parse_err(1, "empty file")),
    };
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_err(text.lines().count().max(1), "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let expected_fields = if header.layout == Layout::Coordinate { 3 } else { 2 };
    if dims.len() != expected_fields {
        return Err(parse_err(size_line, format!("size line needs {expected_fields} integers")));
    }
    let mut nums = Vec::with_capacity(3);
    for d in &dims {
        nums.push(
            d.parse::<usize>()
                .map_err(|_| parse_err(size_line, format!("cannot parse size `{d}`")))?,
        );
    }
    let (rows, cols) = (nums[0], nums[1]);
    if rows != cols {
        return Err(parse_err(size_line, format!("matrix is {rows} x {cols}, not square")));
    }
    let n = rows;
    if n == 0 {
        return Err(parse_err(size_line, "matrix has no rows"));
    }
    if n > MAX_DIM {
        return Err(Error::TooLarge { n });
    }

    let mut a = vec![0.0; n * n];
    let mut last_line = size_line;
    match header.layout {
        Layout::Coordinate => {
            let nnz = nums[2];
            let mut seen = vec![false; n * n];
            for count in 0..nnz {
                let (ln, l) = body
                    .next()
                    .ok_or_else(|| parse_err(last_line + 1, format!("expected {nnz} entries, found {count}")))?;
                last_line = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(ln, "entry needs row, column and value"));
                }
                let i = parse_index(toks[0], n, ln)?;
                let j = parse_index(toks[1], n, ln)?;
                let v = parse_value(toks[2], header.integer, ln)?;
                if seen[i * n + j] || (header.storage == Storage::Symmetric && seen[j * n + i]) {
                    return Err(parse_err(ln, format!("duplicate entry ({}, {})", i + 1, j + 1)));
                }
                seen[i * n + j] = true;
                a[i * n + j] = v;
                if header.storage == Storage::Symmetric {
                    a[j * n + i] = v;
                }
            }
        }
        Layout::Array => {
            // column-major; symmetric files hold the lower triangle only
            let mut slots = Vec::new();
            for j in 0..n {
                let start = if header.storage == Storage::Symmetric { j } else { 0 };
                for i in start..n {
                    slots.push((i, j));
                }
            }
            for (count, &(i, j)) in slots.iter().enumerate() {
                let (ln, l) = body.next().ok_or_else(|| {
                    parse_err(last_line + 1, format!("expected {} values, found {count}", slots.len()))
                })?;
                last_line = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 1 {
                    return Err(parse_err(ln, "array entry needs exactly one value"));
                }
                let v = parse_value(toks[0], header.integer, ln)?;
                a[i * n + j] = v;
                if header.storage == Storage::Symmetric {
                    a[j * n + i] = v;
                }
            }
        }
    }
    if let Some((ln, _)) = body.next() {
        return Err(parse_err(ln, "unexpected data after the last entry"));
    }

    DenseSymmetric::from_row_major(n, a).map_err(|e| match e {
        ukrylov_core::Error::AsymmetryExceeded { i, j, difference, .. } => Error::NotSymmetric {
            row: i + 1,
            col: j + 1,
            difference,
        },
        other => other.into(),
    })
}

pub fn read_matrix_market(path: &Path) -> Result<DenseSymmetric> {
    parse_matrix_market(&read_file(path)?)
}

/// Coordinate symmetric text holding the nonzeros of the lower triangle.
pub fn to_matrix_market(h: &DenseSymmetric) -> String {
    let n = h.n();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in j..n {
            let v = h.get(i, j);
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(out, "{n} {n} {}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{} {} {v:e}", i + 1, j + 1);
    }
    out
}

pub fn write_matrix_market(h: &DenseSymmetric, path: &Path) -> Result<()> {
    write_file(path, &to_matrix_market(h))
}
