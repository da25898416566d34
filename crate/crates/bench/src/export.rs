//! CSV writers and readers. Floats use Rust's shortest round-trip formatting,
//! so reading a file back gives bit-identical values.

use std::path::Path;

use noisyfix::privacy::{RdpCurve, RdpPoint};
use noisyfix::simnet::Observation;

use crate::error::{BenchError, Result};
use crate::experiment::ResultRow;
use crate::TracePoint;

pub const RESULTS_HEADER: [&str; 11] = [
    "setting",
    "algorithm",
    "epsilon",
    "delta",
    "sigma",
    "K",
    "seed",
    "train_obj",
    "test_obj",
    "runtime_ms",
    "target_epsilon",
];
pub const ACCOUNTANT_HEADER: [&str; 3] = ["alpha", "epsilon", "provenance"];
pub const TRACE_HEADER: [&str; 3] = ["iter", "objective", "dist_sq"];

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> BenchError + '_ {
    move |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, what: &str, raw: &str) -> BenchError {
    BenchError::Config {
        line,
        msg: format!("{}: bad {what} '{raw}'", path.display()),
    }
}

fn write_table<I>(path: &Path, header: &[&str], records: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| BenchError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for r in records {
        w.write_record(&r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Rows as `(line number, fields)`, after checking the header.
fn read_table(path: &Path, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let found = r.headers().map_err(csv_err(path))?.clone();
    if found.len() < header.len() || header.iter().zip(found.iter()).any(|(a, b)| *a != b) {
        return Err(BenchError::Config {
            line: 1,
            msg: format!("{}: expected header {}", path.display(), header.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        out.push((i + 2, rec.map_err(csv_err(path))?));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, rec: &csv::StringRecord, idx: usize, what: &str) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| parse_err(path, line, what, raw))
}

fn opt_float(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn opt_field(path: &Path, line: usize, rec: &csv::StringRecord, idx: usize, what: &str) -> Result<Option<f64>> {
    match rec.get(idx).unwrap_or("") {
        "" => Ok(None),
        _ => field(path, line, rec, idx, what).map(Some),
    }
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_table(
        path,
        &RESULTS_HEADER,
        rows.iter().map(|r| {
            vec![
                r.setting.to_string(),
                r.algorithm.to_string(),
                r.epsilon.to_string(),
                r.delta.to_string(),
                r.sigma.to_string(),
                r.iterations.to_string(),
                r.seed.to_string(),
                r.train_obj.to_string(),
                r.test_obj.to_string(),
                r.runtime_ms.to_string(),
                opt_float(r.target_epsilon),
            ]
        }),
    )
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    read_table(path, &RESULTS_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(ResultRow {
                setting: field(path, line, &rec, 0, "setting")?,
                algorithm: field(path, line, &rec, 1, "algorithm")?,
                epsilon: field(path, line, &rec, 2, "epsilon")?,
                delta: field(path, line, &rec, 3, "delta")?,
                sigma: field(path, line, &rec, 4, "sigma")?,
                iterations: field(path, line, &rec, 5, "K")?,
                seed: field(path, line, &rec, 6, "seed")?,
                train_obj: field(path, line, &rec, 7, "train_obj")?,
                test_obj: field(path, line, &rec, 8, "test_obj")?,
                runtime_ms: field(path, line, &rec, 9, "runtime_ms")?,
                target_epsilon: opt_field(path, line, &rec, 10, "target_epsilon")?,
            })
        })
        .collect()
}

pub fn write_accountant(path: &Path, curve: &RdpCurve<f64>) -> Result<()> {
    write_table(
        path,
        &ACCOUNTANT_HEADER,
        curve
            .points()
            .iter()
            .map(|p| vec![p.alpha.to_string(), p.epsilon.to_string(), p.provenance.clone()]),
    )
}

pub fn read_accountant(path: &Path) -> Result<Vec<RdpPoint<f64>>> {
    read_table(path, &ACCOUNTANT_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(RdpPoint {
                alpha: field(path, line, &rec, 0, "alpha")?,
                epsilon: field(path, line, &rec, 1, "epsilon")?,
                provenance: rec.get(2).unwrap_or("").to_string(),
            })
        })
        .collect()
}

pub fn write_trace(path: &Path, trace: &[TracePoint]) -> Result<()> {
    write_table(
        path,
        &TRACE_HEADER,
        trace
            .iter()
            .map(|t| vec![t.iter.to_string(), t.objective.to_string(), opt_float(t.dist_sq)]),
    )
}

pub fn read_trace(path: &Path) -> Result<Vec<TracePoint>> {
    read_table(path, &TRACE_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            Ok(TracePoint {
                iter: field(path, line, &rec, 0, "iter")?,
                objective: field(path, line, &rec, 1, "objective")?,
                dist_sq: opt_field(path, line, &rec, 2, "dist_sq")?,
            })
        })
        .collect()
}

/// Columns `step,user,z_0,…,z_{p-1}`; `p` is taken from the first event.
pub fn write_observations(path: &Path, events: &[Observation<f64>]) -> Result<()> {
    let p = events.first().map_or(0, |e| e.z.len());
    let names: Vec<String> = ["step".to_string(), "user".to_string()]
        .into_iter()
        .chain((0..p).map(|j| format!("z_{j}")))
        .collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    if let Some(bad) = events.iter().find(|e| e.z.len() != p) {
        return Err(noisyfix::Error::Structural(format!(
            "observation at step {} has dimension {} (expected {p})",
            bad.step,
            bad.z.len()
        ))
        .into());
    }
    write_table(
        path,
        &header,
        events.iter().map(|e| {
            [e.step.to_string(), e.user.to_string()]
                .into_iter()
                .chain(e.z.iter().map(f64::to_string))
                .collect()
        }),
    )
}

pub fn read_observations(path: &Path) -> Result<Vec<Observation<f64>>> {
    read_table(path, &["step", "user"])?
        .into_iter()
        .map(|(line, rec)| {
            Ok(Observation {
                step: field(path, line, &rec, 0, "step")?,
                user: field(path, line, &rec, 1, "user")?,
                z: (2..rec.len())
                    .map(|j| field(path, line, &rec, j, "z"))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}
