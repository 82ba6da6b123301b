use std::fs::File;
use std::path::Path;

use super::ensemble::MetricsRow;
use crate::error::{Error, Result};

pub const HEADER: [&str; 10] = [
    "mode",
    "n",
    "p",
    "alpha",
    "mean_error",
    "success_fraction",
    "entropy_density",
    "gen_error",
    "mean_queries",
    "runs",
];

// `Display` for f64 prints the shortest string that parses back exactly.
fn real(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Output {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

/// Writes `rows` sorted by `(mode, n, p)` under the fixed header.
pub fn emit_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Output {
            path: path.to_path_buf(),
            message: "no rows to write".into(),
        });
    }
    let mut sorted: Vec<&MetricsRow> = rows.iter().collect();
    sorted.sort_by(|a, b| (a.mode.name(), a.n, a.p).cmp(&(b.mode.name(), b.n, b.p)));

    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(HEADER).map_err(|e| csv_err(path, e))?;
    for r in sorted {
        w.write_record([
            r.mode.name().to_string(),
            r.n.to_string(),
            r.p.to_string(),
            real(r.alpha),
            real(r.mean_error),
            real(r.success_fraction),
            opt(r.entropy_density),
            opt(r.gen_error),
            opt(r.mean_queries),
            r.runs.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    let bad = |msg: String| Error::Output {
        path: path.to_path_buf(),
        message: msg,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().ne(HEADER) {
        return Err(bad("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i).parse().map_err(|_| {
                bad(format!(
                    "row {}: bad {} `{}`",
                    line + 1,
                    HEADER[i],
                    field(i)
                ))
            })
        };
        let int = |i: usize| -> Result<usize> {
            field(i).parse().map_err(|_| {
                bad(format!(
                    "row {}: bad {} `{}`",
                    line + 1,
                    HEADER[i],
                    field(i)
                ))
            })
        };
        let maybe = |i: usize| -> Result<Option<f64>> {
            if field(i).is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        rows.push(MetricsRow {
            mode: field(0)
                .parse()
                .map_err(|_| bad(format!("row {}: unknown mode `{}`", line + 1, field(0))))?,
            n: int(1)?,
            p: int(2)?,
            alpha: num(3)?,
            mean_error: num(4)?,
            success_fraction: num(5)?,
            entropy_density: maybe(6)?,
            gen_error: maybe(7)?,
            mean_queries: maybe(8)?,
            runs: int(9)?,
        });
    }
    Ok(rows)
}
