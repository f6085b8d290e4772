//! Command-line front end: configuration schema, model building and output.

pub mod build;
pub mod config;
pub mod error;
pub mod output;
pub mod overrides;
pub mod run;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

pub use error::CliError;
pub use overrides::Overrides;
use run::Artifacts;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Circuit,
    Rates,
    Floquet,
    Readout,
}

/// Where and how to run one subcommand.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    /// Optional only for `readout`, whose flags can stand in for a file.
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub overrides: Overrides,
}

/// Paths actually written plus the summary that went into `summary.json`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub csv: Option<PathBuf>,
    pub tables: Vec<PathBuf>,
    pub summary_path: PathBuf,
    pub summary: serde_json::Value,
}

fn timed<S: Serialize>(spec: &S, f: impl FnOnce() -> Result<Artifacts, CliError>) -> Result<Artifacts, CliError> {
    let start = Instant::now();
    let mut art = f()?;
    let wall = start.elapsed().as_secs_f64();
    let mut head = json!({
        "toolkit_version": env!("CARGO_PKG_VERSION"),
        "spec_hash": output::spec_hash(spec),
        "wall_time_s": wall,
    });
    if let (Some(h), Some(body)) = (head.as_object_mut(), art.summary.as_object()) {
        for (k, v) in body {
            h.insert(k.clone(), v.clone());
        }
    }
    art.summary = head;
    Ok(art)
}

fn config_path(inv: &Invocation) -> Result<&Path, CliError> {
    inv.config.as_deref().ok_or_else(|| CliError::Config("--config is required".into()))
}

fn load<T: DeserializeOwned>(inv: &Invocation) -> Result<T, CliError> {
    config::read_config(config_path(inv)?)
}

pub fn execute(inv: &Invocation) -> Result<Outcome, CliError> {
    let (art, csv_default, summary_default) = match inv.command {
        Command::Simulate => {
            let mut doc = config::read_value(config_path(inv)?)?;
            overrides::apply_simulate(&mut doc, &inv.overrides)?;
            let spec: config::ExperimentSpec = config::parse_value(doc)?;
            let art = timed(&spec, || run::simulate(&spec))?;
            (art, spec.output.csv.clone(), spec.output.summary.clone())
        }
        Command::Circuit => {
            let spec: config::CircuitSpec = load(inv)?;
            (timed(&spec, || run::circuit(&spec))?, None, None)
        }
        Command::Rates => {
            let spec: config::RatesSpec = load(inv)?;
            (timed(&spec, || run::rates(&spec))?, None, None)
        }
        Command::Floquet => {
            let spec: config::FloquetSpec = load(inv)?;
            (timed(&spec, || run::floquet(&spec))?, None, None)
        }
        Command::Readout => {
            let mut doc = match &inv.config {
                Some(path) => config::read_value(path)?,
                None => json!({}),
            };
            overrides::apply_readout(&mut doc, &inv.overrides)?;
            let spec: config::ReadoutSpec = config::parse_value(doc)?;
            (timed(&spec, || run::readout(&spec))?, None, None)
        }
    };
    let dir = inv.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let csv = art.csv_name.map(|name| match (&inv.out, csv_default) {
        (None, Some(p)) => p,
        _ => dir.join(name),
    });
    let summary_path = match (&inv.out, summary_default) {
        (None, Some(p)) => p,
        _ => dir.join("summary.json"),
    };
    if let Some(path) = &csv {
        output::write_file(path, &output::csv_string(&art.header, &art.rows))?;
    }
    let mut tables = Vec::new();
    for t in &art.tables {
        let path = dir.join(t.name);
        output::write_file(&path, &output::csv_string(&t.header, &t.rows))?;
        tables.push(path);
    }
    output::write_file(&summary_path, &output::pretty(&art.summary))?;
    Ok(Outcome { csv, tables, summary_path, summary: art.summary })
}
