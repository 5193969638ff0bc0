//! Command results and how they reach disk and stdout.

use anyhow::{Context, Result};
use serde_json::{Map, Value};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub struct Csv {
    pub header: &'static str,
    pub rows: Vec<String>,
}

impl Csv {
    pub fn new(header: &'static str) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

pub struct Report {
    pub command: &'static str,
    pub summary: Map<String, Value>,
    pub csv: Option<Csv>,
    pub svg: Option<String>,
    /// Failed contracts; nonempty means exit code 2.
    pub violations: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self { command, summary: Map::new(), csv: None, svg: None, violations: Vec::new() }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn status(&self) -> &'static str {
        if self.violations.is_empty() {
            "ok"
        } else {
            "contract_violation"
        }
    }

    /// The JSON document written to `PREFIX.json`.
    pub fn document(&self, timing_ms: f64) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), self.command.into());
        m.insert("status".into(), self.status().into());
        for (k, v) in &self.summary {
            m.insert(k.clone(), v.clone());
        }
        m.insert("violations".into(), self.violations.clone().into());
        m.insert("timing_ms".into(), timing_ms.into());
        Value::Object(m)
    }

    pub fn write(&self, prefix: &Path, timing_ms: f64) -> Result<Vec<PathBuf>> {
        let mut files = Vec::new();
        let json = serde_json::to_string_pretty(&self.document(timing_ms))? + "\n";
        let mut outputs = vec![("json", json)];
        if let Some(csv) = &self.csv {
            outputs.push(("csv", csv.render()));
        }
        if let Some(svg) = &self.svg {
            outputs.push(("svg", svg.clone()));
        }
        for (ext, body) in outputs {
            let path = with_extension(prefix, ext);
            write_atomic(&path, body.as_bytes())?;
            files.push(path);
        }
        Ok(files)
    }
}

pub fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Write to a sibling temp file, then rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let tmp = with_extension(path, &format!("tmp{}", std::process::id()));
    let result = (|| -> Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

/// Shortest round-trip decimal form; identical on every platform.
pub fn num(x: f64) -> String {
    format!("{x}")
}
