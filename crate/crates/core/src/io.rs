//! Plain-text formats: vectors and spectra, tensor component lists, CSV and
//! JSON-lines output.

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::curvature::CurvatureTensor;
use crate::error::{Error, Result};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(at) => &line[..at],
        None => line,
    }
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c == ';' || c.is_whitespace() || "()[]".contains(c))
        .filter(|t| !t.is_empty())
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let x: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number {token:?}"),
    })?;
    if !x.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite value {token:?}"),
        });
    }
    Ok(x)
}

/// Reads comma- or whitespace-separated decimals. `#` starts a comment and
/// enclosing brackets are ignored, so `(1, 2, 3)` and `1 2 3` both parse.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        last = i + 1;
        for tok in tokens(strip_comment(raw)) {
            out.push(parse_number(tok, i + 1)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: last.max(1),
            message: "no values found".into(),
        });
    }
    Ok(out)
}

/// Reads a file, or standard input when `path` is `-`.
pub fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

/// Parses lines `i j k l value` with 1-based indices; the remaining
/// components are filled by symmetry. Without `n`, the dimension is the
/// largest index seen.
pub fn parse_tensor_components(text: &str, n: Option<usize>) -> Result<CurvatureTensor> {
    let mut comps = Vec::new();
    let mut max_index = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let fields: Vec<&str> = tokens(strip_comment(raw)).collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(Error::Parse {
                line,
                message: format!("expected `i j k l value`, got {} fields", fields.len()),
            });
        }
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&fields[..4]) {
            let v: usize = tok.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid index {tok:?}"),
            })?;
            if v == 0 {
                return Err(Error::Parse {
                    line,
                    message: "indices are 1-based".into(),
                });
            }
            max_index = max_index.max(v);
            *slot = v - 1;
        }
        let value = parse_number(fields[4], line)?;
        comps.push((idx[0], idx[1], idx[2], idx[3], value));
    }
    let n = n.unwrap_or(max_index);
    CurvatureTensor::from_components(n, &comps)
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    let plain = format!("{x}");
    if plain.len() <= 24 {
        plain
    } else {
        format!("{x:e}")
    }
}

pub fn format_csv(values: &[f64]) -> String {
    values.iter().map(|x| format_f64(*x)).collect::<Vec<_>>().join(",")
}

/// Writes one JSON object followed by a newline.
pub fn write_json_line<W: Write + ?Sized, T: Serialize>(out: &mut W, record: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, record).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}
