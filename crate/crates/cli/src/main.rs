mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Format, RunConfig};

const OUT_DIR_ENV: &str = "NONGAUSS_OUT_DIR";

fn output_path(cfg: &RunConfig, format: Format) -> Option<PathBuf> {
    if let Some(p) = &cfg.output {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV)?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let name = cfg.command.map_or("report", |c| c.name());
    Some(PathBuf::from(dir).join(format!("{name}.{ext}")))
}

fn real_main() -> Result<bool> {
    let cfg = RunConfig::parse().merged()?;
    let cmd = cfg.command()?;
    let format = cfg.format.unwrap_or(if cmd.is_tabular() { Format::Csv } else { Format::Json });
    let commands::Outcome { mut report, reject } = commands::run(cfg)?;
    report.config.format = Some(format);
    report.timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    match output_path(&report.config, format) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = std::io::BufWriter::new(file);
            report.write(&mut w, format)?;
            w.flush()?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let stdout = std::io::stdout();
            report.write(stdout.lock(), format)?;
        }
    }
    Ok(reject)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            // clap prints its own usage errors and exits with code 2 itself
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
