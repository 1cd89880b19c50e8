//! Experiment driver: configuration, pipeline stages and parameter sweeps.

pub mod config;
pub mod error;
pub mod experiment;
pub mod stages;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiment::{compare_methods, Comparison, Experiment, Reconstruction};
pub use stages::{compare_files, run_pipeline, Stage, Workspace};
pub use sweep::{run_sweep, SweepParameter, SweepPoint};

/// Applies `section.key=value` overrides to a config. Values are read as
/// TOML and fall back to plain strings.
pub fn apply_overrides(config: &ExperimentConfig, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    if overrides.is_empty() {
        return Ok(config.clone());
    }
    let mut doc: toml::Table = toml::from_str(&config.to_toml()).map_err(|e| CliError::Config(e.to_string()))?;
    for o in overrides {
        let (key, raw) = o.split_once('=').ok_or_else(|| CliError::Config(format!("override '{o}' is not key=value")))?;
        let (section, name) =
            key.trim().split_once('.').ok_or_else(|| CliError::Config(format!("override key '{key}' needs a section")))?;
        let value: toml::Value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        let table = doc
            .entry(section)
            .or_insert_with(|| toml::Value::Table(Default::default()))
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("'{section}' is not a section")))?;
        table.insert(name.to_string(), value);
    }
    ExperimentConfig::parse(&toml::to_string(&doc).map_err(|e| CliError::Config(e.to_string()))?)
}
