use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub const TABLE_HEADER: [&str; 11] =
    ["class", "b", "c", "p1", "p2", "region", "alpha", "rho", "residual", "method", "sharp"];

/// Nine significant digits, ties to even on the exact binary value.
/// Positional for exponents in `[-5, 9)`, scientific otherwise.
pub fn sig9(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp >= 0 {
        let split = exp as usize + 1;
        let (int, frac) = digits.split_at(split);
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

/// The printed value read back, so JSON and CSV carry the same digits.
pub fn round9(x: f64) -> f64 {
    sig9(x).parse().expect("sig9 output parses")
}

fn opt(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

/// One (class parameters, region) row of a radius table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub class: String,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub p1: f64,
    pub p2: f64,
    pub region: String,
    pub alpha: Option<f64>,
    pub rho: f64,
    pub residual: f64,
    pub method: String,
    pub sharp: Option<bool>,
}

impl OutputRecord {
    pub fn csv_fields(&self) -> [String; 11] {
        [
            self.class.clone(),
            opt(self.b),
            opt(self.c),
            sig9(self.p1),
            sig9(self.p2),
            self.region.clone(),
            opt(self.alpha),
            sig9(self.rho),
            sig9(self.residual),
            self.method.clone(),
            self.sharp.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }

    /// Same fields with every real rounded to its printed digits.
    pub fn rounded(&self) -> OutputRecord {
        OutputRecord {
            b: self.b.map(round9),
            c: self.c.map(round9),
            p1: round9(self.p1),
            p2: round9(self.p2),
            alpha: self.alpha.map(round9),
            rho: round9(self.rho),
            residual: round9(self.residual),
            ..self.clone()
        }
    }

    pub fn text_line(&self) -> String {
        TABLE_HEADER
            .iter()
            .zip(self.csv_fields())
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn csv_bytes<S: AsRef<str>>(header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(header).map_err(internal)?;
    for row in rows {
        w.write_record(row.iter().map(AsRef::as_ref)).map_err(internal)?;
    }
    w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
}

pub fn records_csv(records: &[OutputRecord]) -> Result<Vec<u8>, CliError> {
    csv_bytes(&TABLE_HEADER, records.iter().map(|r| r.csv_fields().to_vec()))
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn records_json(records: &[OutputRecord]) -> Result<Vec<u8>, CliError> {
    let rounded: Vec<OutputRecord> = records.iter().map(OutputRecord::rounded).collect();
    json_bytes(&rounded)
}

fn staging_path(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.{}.partial", std::process::id()))
}

/// Write through a sibling staging file and rename; the staging file is
/// removed on any failure.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let staging = staging_path(path);
    let result = fs::File::create(&staging)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&staging, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&staging);
        return Err(io(e));
    }
    Ok(())
}

/// All files or none: earlier files of the batch are removed if a later one fails.
pub fn write_all_atomic(files: &[(PathBuf, Vec<u8>)]) -> Result<(), CliError> {
    for (i, (path, bytes)) in files.iter().enumerate() {
        if let Err(e) = write_atomic(path, bytes) {
            for (done, _) in &files[..i] {
                let _ = fs::remove_file(done);
            }
            return Err(e);
        }
    }
    Ok(())
}

pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}
