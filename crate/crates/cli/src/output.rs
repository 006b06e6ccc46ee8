use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// A CSV cell. Floats are written with 17 significant digits so a reader
/// recovers the exact double.
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Int(n) => n.to_string(),
            Self::Float(x) => format_float(*x),
            Self::Text(s) => s.clone(),
            Self::Empty => String::new(),
        }
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Self::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Self::Int(n as u64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Float(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Self::Empty, Into::into)
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Output sink for one command run. Without a directory nothing is written.
pub struct Outputs {
    dir: Option<PathBuf>,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: Option<PathBuf>) -> CliResult<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|source| CliError::Io {
                path: d.clone(),
                source,
            })?;
        }
        Ok(Self {
            dir,
            files: Vec::new(),
        })
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> CliResult<()> {
        let Some(path) = self.path(name) else {
            return Ok(());
        };
        let bytes = render_csv(header, rows).map_err(|source| CliError::Csv {
            path: path.clone(),
            source,
        })?;
        write_bytes(&path, &bytes)?;
        self.files.push(name.to_owned());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let Some(path) = self.path(name) else {
            return Ok(());
        };
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| CliError::Json {
            path: path.clone(),
            source,
        })?;
        bytes.push(b'\n');
        write_bytes(&path, &bytes)?;
        self.files.push(name.to_owned());
        Ok(())
    }
}

pub fn render_csv(header: &[&str], rows: &[Vec<Cell>]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    /// The command with every default and random seed resolved; `replay`
    /// runs exactly this.
    pub parameters: Value,
    pub master_seed: Option<u64>,
    pub threads: usize,
    pub duration_seconds: f64,
    pub exit_code: i32,
    pub outputs: Vec<String>,
}

pub fn read_manifest_parameters(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut manifest: Value = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })?;
    manifest
        .get_mut("parameters")
        .map(Value::take)
        .ok_or_else(|| CliError::Invalid(format!("{}: no `parameters` entry", path.display())))
}
