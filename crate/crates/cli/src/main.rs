mod args;
mod commands;
mod config;
mod report;
mod svg;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::Value;
use std::process::ExitCode;
use std::time::Instant;

fn run() -> Result<u8, (u8, String)> {
    let argv = config::expand(std::env::args().collect()).map_err(|e| (1, format!("{e:#}")))?;
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(0);
        }
        Err(e) => return Err((1, e.to_string())),
    };
    let common = cli.command.common();
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| (1, format!("thread pool: {e}")))?;
    }
    let start = Instant::now();
    let report = commands::run(&cli.command).map_err(|e| (1, format!("{e:#}")))?;
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut doc = report.document(timing_ms);
    if let Some(prefix) = &common.out {
        let files = report.write(prefix, timing_ms).map_err(|e| (1, format!("{e:#}")))?;
        let names: Vec<Value> = files.iter().map(|p| p.display().to_string().into()).collect();
        doc["files"] = names.into();
    }
    println!("{}", serde_json::to_string(&doc).expect("json"));
    Ok(if report.violations.is_empty() { 0 } else { 2 })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {}", msg.trim_end());
            ExitCode::from(code)
        }
    }
}
