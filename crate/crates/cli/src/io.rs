use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qspace::carleson::DiscretePointMeasure;
use qspace::constructions::PointSequence;
use qspace::functions::{AnalyticFunction, BoundaryFunction};
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const SCHEMA: u32 = 1;

/// A function file holds either a boundary function (tagged by `repr`) or an
/// analytic function (tagged by `kind`).
pub enum FunctionFile {
    Boundary(BoundaryFunction),
    Analytic(AnalyticFunction),
}

impl FunctionFile {
    pub fn boundary(self) -> BoundaryFunction {
        match self {
            FunctionFile::Boundary(f) => f,
            FunctionFile::Analytic(h) => BoundaryFunction::from_analytic(h),
        }
    }

    pub fn analytic(self, what: &str) -> Result<AnalyticFunction, CliError> {
        match self {
            FunctionFile::Analytic(h) => Ok(h),
            FunctionFile::Boundary(_) => Err(CliError::Config(format!("{what} needs an analytic function file"))),
        }
    }
}

/// A measure file: explicit atoms, or a point sequence turned into a zero
/// measure once an exponent is chosen.
pub enum MeasureFile {
    Atoms(DiscretePointMeasure),
    Sequence(PointSequence),
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(v: Value, path: &Path) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn read_function(path: &Path) -> Result<FunctionFile, CliError> {
    let v = read_json(path)?;
    if v.get("repr").is_some() {
        Ok(FunctionFile::Boundary(parse(v, path)?))
    } else if v.get("kind").is_some() {
        Ok(FunctionFile::Analytic(parse(v, path)?))
    } else {
        Err(CliError::Config(format!("{}: expected a \"repr\" or \"kind\" field", path.display())))
    }
}

pub fn read_measure(path: &Path) -> Result<MeasureFile, CliError> {
    let v = read_json(path)?;
    if v.get("atoms").is_some() {
        Ok(MeasureFile::Atoms(parse(v, path)?))
    } else if v.get("points").is_some() {
        Ok(MeasureFile::Sequence(parse(v, path)?))
    } else {
        Err(CliError::Config(format!("{}: expected an \"atoms\" or \"points\" field", path.display())))
    }
}

pub fn read_any<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let v = read_json(path)?;
    parse(v, path)
}

/// Writes `<out>/<name>.json`, or prints to stdout without an output directory.
/// The report is wrapped as `{"schema": 1, "command": ..., ...}`.
pub fn emit_report(out: Option<&PathBuf>, command: &str, body: impl Serialize) -> Result<(), CliError> {
    let mut v = serde_json::to_value(body).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut obj = serde_json::Map::new();
    obj.insert("schema".into(), SCHEMA.into());
    obj.insert("command".into(), command.into());
    match v.as_object_mut() {
        Some(m) => obj.append(m),
        None => {
            obj.insert("result".into(), v);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(obj)).map_err(|e| CliError::Runtime(e.to_string()))?;
    match out {
        Some(dir) => write_file(&dir.join(format!("{command}.json")), text.as_bytes()),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                // a closed pipe (e.g. `| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Runtime(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

/// Writes `<out>/<name>` as CSV; does nothing without an output directory.
pub fn emit_csv<R: AsRef<[String]>>(
    out: Option<&PathBuf>,
    name: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = R>,
) -> Result<(), CliError> {
    let Some(dir) = out else { return Ok(()) };
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.as_ref()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    write_file(&dir.join(name), &bytes)
}

pub fn profile_rows(profile: &[f64]) -> Vec<Vec<String>> {
    profile.iter().enumerate().map(|(j, v)| vec![j.to_string(), v.to_string()]).collect()
}

pub fn complex_rows(values: &[Complex64]) -> Vec<Vec<String>> {
    values.iter().map(|z| vec![z.re.to_string(), z.im.to_string()]).collect()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
