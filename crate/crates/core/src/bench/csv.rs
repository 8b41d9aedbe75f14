use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::ResultRow;
use crate::error::{Result, SdrError};
use crate::io::format_float;

pub const RESULT_HEADER: [&str; 9] = [
    "scheme",
    "n",
    "p",
    "eps",
    "trial",
    "seed",
    "estimator",
    "l2_error",
    "runtime_ms",
];

fn record(row: &ResultRow) -> [String; 9] {
    [
        row.scheme.clone(),
        row.n.to_string(),
        row.p.to_string(),
        format_float(row.eps),
        row.trial.to_string(),
        row.seed.to_string(),
        row.estimator.clone(),
        format_float(row.l2_error),
        format_float(row.runtime_ms),
    ]
}

pub fn write_results_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut writer = ::csv::WriterBuilder::new().terminator(::csv::Terminator::Any(b'\n')).from_writer(out);
    writer.write_record(RESULT_HEADER).map_err(csv_error)?;
    for row in rows {
        writer.write_record(record(row)).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_results_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Parses a results file with the exact header written by
/// [`write_results_csv`]. Estimator and scheme names are free text so rows
/// produced elsewhere can be merged.
pub fn parse_results_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut reader = ::csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().map(str::trim).ne(RESULT_HEADER.iter().copied()) {
        return Err(SdrError::parse(1, format!("expected header `{}`", RESULT_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let line = idx + 2;
        let rec = rec.map_err(csv_error)?;
        let field = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
        let int = |i: usize| -> Result<usize> {
            field(i)
                .parse()
                .map_err(|_| SdrError::parse(line, format!("invalid {} `{}`", RESULT_HEADER[i], field(i))))
        };
        let float = |i: usize| -> Result<f64> {
            field(i)
                .parse()
                .map_err(|_| SdrError::parse(line, format!("invalid {} `{}`", RESULT_HEADER[i], field(i))))
        };
        let row = ResultRow {
            scheme: field(0).to_string(),
            n: int(1)?,
            p: int(2)?,
            eps: float(3)?,
            trial: int(4)?,
            seed: field(5)
                .parse()
                .map_err(|_| SdrError::parse(line, format!("invalid seed `{}`", field(5))))?,
            estimator: field(6).to_string(),
            l2_error: float(7)?,
            runtime_ms: float(8)?,
        };
        if row.scheme.is_empty() || row.estimator.is_empty() {
            return Err(SdrError::parse(line, "scheme and estimator must be non-empty"));
        }
        if !(row.eps.is_finite() && row.eps >= 0.0) {
            return Err(SdrError::parse(line, "eps must be finite and ≥ 0"));
        }
        if row.l2_error < 0.0 || row.runtime_ms < 0.0 || row.l2_error.is_infinite() || row.runtime_ms.is_infinite() {
            return Err(SdrError::parse(line, "errors and runtimes must be ≥ 0"));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    parse_results_csv(File::open(path)?)
}

fn csv_error(err: ::csv::Error) -> SdrError {
    let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
    match err.into_kind() {
        ::csv::ErrorKind::Io(e) => SdrError::Io(e),
        other => SdrError::parse(line, format!("{other:?}")),
    }
}
