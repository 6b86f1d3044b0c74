//! CSV reading/writing for sample pairs and curve tables. All numeric output
//! uses 15 significant digits so files re-parse losslessly at that precision
//! and are byte-stable across runs.

use invmax::Error;
use std::fmt::Write as _;
use std::path::Path;

pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{v:.14e}")
}

pub fn write_pairs_csv(path: &Path, pairs: &[(f64, f64)]) -> std::io::Result<String> {
    let mut out = String::with_capacity(pairs.len() * 48 + 8);
    out.push_str("x,y\n");
    for &(x, y) in pairs {
        let _ = writeln!(out, "{},{}", fmt_f64(x), fmt_f64(y));
    }
    std::fs::write(path, &out)?;
    Ok(out)
}

pub fn read_pairs_csv(path: &Path) -> Result<Vec<(f64, f64)>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Data(format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["x", "y"] {
        return Err(Error::Data(format!(
            "{}: expected header 'x,y', found '{header}'",
            path.display()
        )));
    }
    let mut pairs = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let (xs, ys) = (it.next(), it.next());
        if it.next().is_some() {
            return Err(Error::Data(format!("{}: line {}: too many columns", path.display(), i + 2)));
        }
        let parse = |s: Option<&str>, name: &str| -> Result<f64, Error> {
            s.map(str::trim)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::Data(format!("{}: line {}: missing column {name}", path.display(), i + 2)))?
                .parse()
                .map_err(|_| Error::Data(format!("{}: line {}: bad number in column {name}", path.display(), i + 2)))
        };
        pairs.push((parse(xs, "x")?, parse(ys, "y")?));
    }
    if pairs.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }
    Ok(pairs)
}

/// A generic table writer: fixed header, rows of preformatted cells.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<String> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, &out)?;
    Ok(out)
}
