//! Configuration loading, named scenarios and result files.

pub mod config;
pub mod output;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::diffraction::DiffractionError;

pub use config::{load_config, load_config_with, parse_config, Overrides};
pub use output::{write_csv, write_heatmap, Axis, Normalization, ResultTable, TableMetadata};
pub use scenario::{run_scenario, Scenario, ScenarioKind, ScenarioName, Susceptibility, SweepSpec};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("parse error{} at line {line}, column {column}: {message}", path.as_ref().map(|p| format!(" in {}", p.display())).unwrap_or_default())]
    Parse { path: Option<PathBuf>, line: usize, column: usize, message: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("scenario {scenario}: {source}")]
    Numerical { scenario: String, source: DiffractionError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunnerError {
    /// 1 for configuration and IO problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numerical { .. } => 2,
            _ => 1,
        }
    }
}

fn create_dir(dir: &Path) -> Result<(), RunnerError> {
    fs::create_dir_all(dir).map_err(|source| RunnerError::Io { path: dir.to_path_buf(), source })
}

/// Writes `<name>.csv` for every table and `<name>.pgm` for every map,
/// with the resolved configuration and a run manifest. Returns the paths
/// written, in order.
pub fn write_outputs(s: &Scenario, tables: &[ResultTable], dir: &Path) -> Result<Vec<PathBuf>, RunnerError> {
    create_dir(dir)?;
    let mut written = Vec::new();
    let config = dir.join("resolved_config.toml");
    fs::write(&config, s.to_toml()).map_err(|source| RunnerError::Io { path: config.clone(), source })?;
    written.push(config);
    for t in tables {
        let csv = dir.join(format!("{}.csv", t.name));
        write_csv(t, &csv)?;
        written.push(csv);
        if s.kind != ScenarioKind::LengthSweep {
            let pgm = dir.join(format!("{}.pgm", t.name));
            write_heatmap(t, &pgm, Normalization::PerTable)?;
            written.push(pgm);
        }
    }
    let manifest = dir.join("run_manifest.txt");
    let runtime = tables.first().map_or(0.0, |t| t.metadata.runtime_seconds);
    let mut text = format!(
        "scenario = {}\nversion = {}\nruntime_seconds = {runtime:.3}\n",
        s.name.as_str(),
        env!("CARGO_PKG_VERSION")
    );
    for t in tables {
        text.push_str(&format!(
            "table = {} rows={} cols={} nan_cells={} extended_cells={}\n",
            t.name,
            t.rows.values.len(),
            t.cols.values.len(),
            t.metadata.nan_cells,
            t.metadata.extended_cells
        ));
    }
    fs::write(&manifest, text).map_err(|source| RunnerError::Io { path: manifest.clone(), source })?;
    written.push(manifest);
    Ok(written)
}
