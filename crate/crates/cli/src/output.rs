use std::fs;
use std::io::Write;
use std::path::Path;

use orbitlab::Graphing;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(orbitlab::Error::from)?;
    s.push('\n');
    Ok(s)
}

pub fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// JSON to `out`, or to stdout when no path is given.
pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let text = to_json(value)?;
    match out {
        Some(path) => write_file(path, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

pub fn csv_bytes<R: AsRef<[u8]>>(header: &[&str], rows: impl IntoIterator<Item = Vec<R>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io("<csv>", e.into_error()))
}

pub fn emit_csv<R: AsRef<[u8]>>(
    path: Option<&Path>,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<R>>,
) -> CliResult<()> {
    match path {
        Some(path) => write_file(path, &csv_bytes(header, rows)?),
        None => Ok(()),
    }
}

pub fn read_graphing(path: &Path) -> CliResult<Graphing> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let g: Graphing = serde_json::from_str(&text).map_err(orbitlab::Error::from)?;
    Ok(g)
}
