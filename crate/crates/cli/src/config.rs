//! `key = value` batch files. Each entry becomes `--key value` placed right
//! after the subcommand, so flags given on the command line win.

use anyhow::{bail, Context, Result};
use std::path::Path;

pub fn parse(text: &str) -> Result<Vec<String>> {
    let mut args = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got {raw:?}", no + 1);
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() {
            bail!("config line {}: empty key", no + 1);
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.to_string());
            }
        }
    }
    Ok(args)
}

pub fn load(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text)
}

/// Removes `--config PATH` from `argv` and splices the file's flags in
/// after the subcommand.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().context("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let given: Vec<&str> =
        rest.iter().filter_map(|a| a.strip_prefix("--")).map(|a| a.split('=').next().unwrap_or(a)).collect();
    // drop config entries the command line sets itself
    let mut extra = Vec::new();
    let loaded = load(Path::new(&path))?;
    let mut i = 0;
    while i < loaded.len() {
        let key = loaded[i].trim_start_matches("--");
        let takes_value = loaded.get(i + 1).is_some_and(|v| !v.starts_with("--"));
        let width = if takes_value { 2 } else { 1 };
        if !given.contains(&key) {
            extra.extend_from_slice(&loaded[i..i + width]);
        }
        i += width;
    }
    // argv[0] is the program, argv[1] the subcommand (and argv[2] the
    // counter kind for `count`)
    let at = match rest.get(1).map(String::as_str) {
        Some("count") if rest.len() > 2 && !rest[2].starts_with('-') => 3,
        Some(_) => 2,
        None => rest.len(),
    };
    rest.splice(at..at, extra);
    Ok(rest)
}
