//! Data tables: CSV with header `x1,...,xp,y`, one observation per row.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numfmt::sig17;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Table {
    pub fn p(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }
}

pub fn write_table<W: Write>(x: &[Vec<f64>], y: &[f64], out: W) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "data table rows",
            expected: x.len(),
            actual: y.len(),
        });
    }
    let p = x.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=p).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (row, &yi) in x.iter().zip(y) {
        if row.len() != p {
            return Err(Error::DimensionMismatch {
                context: "data table columns",
                expected: p,
                actual: row.len(),
            });
        }
        let mut rec: Vec<String> = row.iter().map(|&v| sig17(v)).collect();
        rec.push(sig17(yi));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("data table", e))?;
    Ok(())
}

pub fn save_table(x: &[Vec<f64>], y: &[f64], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_table(x, y, file)
}

/// Parses a table; `origin` only labels error messages.
pub fn read_table<R: Read>(input: R, origin: &Path) -> Result<Table> {
    let bad = |message: String| Error::Parse {
        kind: "data table",
        path: origin.to_path_buf(),
        message,
    };
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let p = header.len().saturating_sub(1);
    let expected: Vec<String> = (1..=p)
        .map(|i| format!("x{i}"))
        .chain(["y".to_string()])
        .collect();
    if p == 0 || header != expected {
        return Err(bad(format!(
            "header must be x1,...,xp,y; found {}",
            header.join(",")
        )));
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let line = k + 2;
        let mut vals = Vec::with_capacity(p + 1);
        for (field, name) in rec.iter().zip(&header) {
            let v: f64 = field.parse().map_err(|_| {
                bad(format!(
                    "line {line}, column {name}: not a number: {field:?}"
                ))
            })?;
            if !v.is_finite() {
                return Err(bad(format!("line {line}, column {name}: non-finite value")));
            }
            vals.push(v);
        }
        y.push(vals.pop().expect("p + 1 fields"));
        x.push(vals);
    }
    if x.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(Table { x, y })
}

pub fn load_table(path: &Path) -> Result<Table> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_table(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let x = vec![vec![0.1, -2.5e-7], vec![1.0 / 3.0, 1e300]];
        let y = vec![std::f64::consts::PI, -0.0];
        let mut buf = Vec::new();
        write_table(&x, &y, &mut buf).unwrap();
        let t = read_table(buf.as_slice(), Path::new("mem")).unwrap();
        assert_eq!(t, Table { x, y });
        assert_eq!(t.p(), 2);
    }

    #[test]
    fn rejects_malformed_tables() {
        let cases = [
            "a,b\n1,2\n",
            "x1,y\n1,oops\n",
            "x1,y\n",
            "x2,y\n1,2\n",
            "x1,y\n1,inf\n",
            "x1,y\n1,2,3\n",
        ];
        for text in cases {
            assert!(
                read_table(text.as_bytes(), Path::new("mem")).is_err(),
                "{text:?}"
            );
        }
        let err = read_table("x1,y\n1,oops\n".as_bytes(), Path::new("d.csv")).unwrap_err();
        assert!(err.to_string().contains("line 2, column y"), "{err}");
    }
}
