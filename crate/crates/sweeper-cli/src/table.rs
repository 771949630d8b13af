use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::config::Format;
use crate::error::CliError;

/// Provenance stamped into every artifact: tool name + version and the
/// sha-256 of the canonical effective configuration.
#[derive(Debug, Clone)]
pub struct Meta {
    pub tool: String,
    pub config_sha256: String,
}

impl Meta {
    pub fn new(config_sha256: String) -> Meta {
        Meta { tool: format!("sweeper {}", env!("CARGO_PKG_VERSION")), config_sha256 }
    }
}

/// One table cell. Floats render in shortest-roundtrip form; a NaN marks a
/// metric that could not be measured and becomes `NaN` in CSV, `null` in
/// JSON.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
}

impl Cell {
    fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        match self {
            Cell::Int(v) => write!(out, "{v}"),
            Cell::Float(v) => write!(out, "{v:?}"),
            Cell::Bool(v) => write!(out, "{v}"),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Bool(v) => serde_json::Value::from(*v),
        }
    }
}

/// Streams one data table to `dir/name.{csv,json}` and returns the path.
/// CSV carries the provenance as `#` comment lines above the header row;
/// JSON carries it as top-level fields next to `columns` and `rows`.
pub fn write_table(
    dir: &Path,
    name: &str,
    meta: &Meta,
    columns: &[&str],
    rows: impl Iterator<Item = Vec<Cell>>,
    format: Format,
) -> Result<std::path::PathBuf, CliError> {
    let path = dir.join(format!("{name}.{}", format.extension()));
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut out = BufWriter::new(file);
    let result = match format {
        Format::Csv => write_csv(&mut out, meta, columns, rows),
        Format::Json => write_json(&mut out, meta, columns, rows),
    };
    result.and_then(|_| out.flush()).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn write_csv(
    out: &mut impl Write,
    meta: &Meta,
    columns: &[&str],
    rows: impl Iterator<Item = Vec<Cell>>,
) -> std::io::Result<()> {
    writeln!(out, "# tool: {}", meta.tool)?;
    writeln!(out, "# config_sha256: {}", meta.config_sha256)?;
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                write!(out, ",")?;
            }
            cell.write_csv(out)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn write_json(
    out: &mut impl Write,
    meta: &Meta,
    columns: &[&str],
    rows: impl Iterator<Item = Vec<Cell>>,
) -> std::io::Result<()> {
    write!(
        out,
        "{{\"tool\":{},\"config_sha256\":{},\"columns\":{},\"rows\":[",
        serde_json::Value::from(meta.tool.as_str()),
        serde_json::Value::from(meta.config_sha256.as_str()),
        serde_json::Value::from(
            columns.iter().map(|&c| serde_json::Value::from(c)).collect::<Vec<_>>()
        ),
    )?;
    for (i, row) in rows.enumerate() {
        debug_assert_eq!(row.len(), columns.len());
        if i > 0 {
            write!(out, ",")?;
        }
        let cells: Vec<serde_json::Value> = row.iter().map(Cell::to_json).collect();
        serde_json::to_writer(&mut *out, &cells)?;
    }
    writeln!(out, "]}}")
}

/// Writes a pretty-printed JSON report (summaries, verification results).
pub fn write_report(
    dir: &Path,
    name: &str,
    value: &serde_json::Value,
) -> Result<std::path::PathBuf, CliError> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(std::io::Error::from)
        .and_then(|_| writeln!(out))
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Meta {
        Meta { tool: "sweeper 0.0.0".into(), config_sha256: "ab".repeat(32) }
    }

    #[test]
    fn csv_has_provenance_comments_then_header() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            vec![Cell::Int(1), Cell::Float(0.1), Cell::Bool(true)],
            vec![Cell::Int(2), Cell::Float(f64::NAN), Cell::Bool(false)],
        ];
        let path = write_table(
            dir.path(),
            "t",
            &meta(),
            &["id", "value", "flag"],
            rows.into_iter(),
            Format::Csv,
        )
        .unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# tool: sweeper 0.0.0");
        assert!(lines[1].starts_with("# config_sha256: abab"));
        assert_eq!(lines[2], "id,value,flag");
        assert_eq!(lines[3], "1,0.1,true");
        assert_eq!(lines[4], "2,NaN,false");
    }

    #[test]
    fn json_tables_parse_back() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![vec![Cell::Float(1.5), Cell::Int(3)]];
        let path = write_table(
            dir.path(),
            "t",
            &meta(),
            &["v", "n"],
            rows.into_iter(),
            Format::Json,
        )
        .unwrap();
        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(value["columns"][1], "n");
        assert_eq!(value["rows"][0][0], 1.5);
        assert_eq!(value["rows"][0][1], 3);
    }

    #[test]
    fn nan_cells_become_json_nulls() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![vec![Cell::Float(f64::NAN)]];
        let path =
            write_table(dir.path(), "t", &meta(), &["v"], rows.into_iter(), Format::Json)
                .unwrap();
        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert!(value["rows"][0][0].is_null());
    }
}
