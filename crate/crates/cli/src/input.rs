// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Data loading: newline-separated floats or a CSV column, from a file or
//! stdin. All failures here are data errors (exit code 3) and carry the
//! offending line number where one exists.

use std::io::Read;

use ksdist::Sample64;

fn read_source(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
    }
}

fn parse_lines(text: &str, path: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        let v: f64 = tok
            .parse()
            .map_err(|_| format!("{path}:{}: cannot parse {tok:?} as a number", idx + 1))?;
        values.push(v);
    }
    Ok(values)
}

fn parse_csv(text: &str, path: &str, col: &str) -> Result<Vec<f64>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| format!("{path}: invalid CSV header: {e}"))?
        .clone();
    // A named column wins; otherwise a numeric selector is a 0-based index.
    let index = match headers.iter().position(|h| h == col) {
        Some(i) => i,
        None => col.parse::<usize>().map_err(|_| {
            format!(
                "{path}: no column named {col:?} (headers: {})",
                headers.iter().collect::<Vec<_>>().join(", ")
            )
        })?,
    };
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format!("{path}: invalid CSV record: {e}"))?;
        let line = record.position().map_or(0, |p| p.line());
        let tok = record
            .get(index)
            .ok_or_else(|| format!("{path}:{line}: row has no column {index}"))?
            .trim();
        if tok.is_empty() {
            continue;
        }
        let v: f64 = tok
            .parse()
            .map_err(|_| format!("{path}:{line}: cannot parse {tok:?} as a number"))?;
        values.push(v);
    }
    Ok(values)
}

/// Read a sample from `path` (`-` for stdin). With `col`, the input is CSV
/// and the selector names a header or gives a 0-based column index.
pub fn read_sample(path: &str, col: Option<&str>) -> Result<Sample64, String> {
    let text = read_source(path)?;
    let values = match col {
        Some(c) => parse_csv(&text, path, c)?,
        None => parse_lines(&text, path)?,
    };
    if values.is_empty() {
        return Err(format!("{path}: no data"));
    }
    Sample64::new(values).map_err(|e| format!("{path}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_lines_with_blanks() {
        let v = parse_lines("0.2\n\n  0.5 \n", "t").unwrap();
        assert_eq!(v, vec![0.2, 0.5]);
    }

    #[test]
    fn bad_token_names_its_line() {
        let err = parse_lines("1.0\n2.0\nabc\n", "data.txt").unwrap_err();
        assert!(err.contains("data.txt:3"), "{err}");
        assert!(err.contains("abc"), "{err}");
    }

    #[test]
    fn csv_by_name_and_index() {
        let text = "id,value\n1,0.25\n2,0.75\n";
        assert_eq!(parse_csv(text, "t", "value").unwrap(), vec![0.25, 0.75]);
        assert_eq!(parse_csv(text, "t", "1").unwrap(), vec![0.25, 0.75]);
        let err = parse_csv(text, "t", "missing").unwrap_err();
        assert!(err.contains("no column named"), "{err}");
    }

    #[test]
    fn csv_cell_error_names_line() {
        let text = "value\n0.5\nx\n";
        let err = parse_csv(text, "f.csv", "value").unwrap_err();
        assert!(err.contains("f.csv:3"), "{err}");
    }
}
