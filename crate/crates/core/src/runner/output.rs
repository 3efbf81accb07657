//! Result tables and their CSV / plain-PGM serialisations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::RunnerError;

/// One axis of a result table.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: &str, unit: &str, values: Vec<f64>) -> Self {
        Self { name: name.into(), unit: unit.into(), values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableMetadata {
    pub scenario: String,
    /// `(flag, value)` pairs in a fixed order.
    pub flags: Vec<(String, String)>,
    pub version: String,
    /// Cells left as NaN (singular denominators).
    pub nan_cells: usize,
    /// Cells whose Bessel argument needed the extended-range evaluation.
    pub extended_cells: usize,
    /// Wall-clock seconds for the scenario. Not written to CSV.
    pub runtime_seconds: f64,
}

/// A 2-D table of values with labelled axes. `values[(i, j)]` belongs to
/// `rows.values[i]` and `cols.values[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub rows: Axis,
    pub cols: Axis,
    pub values: Array2<f64>,
    pub metadata: TableMetadata,
}

impl ResultTable {
    pub fn new(name: &str, rows: Axis, cols: Axis, values: Array2<f64>, metadata: TableMetadata) -> Result<Self, RunnerError> {
        if values.dim() != (rows.values.len(), cols.values.len()) {
            return Err(RunnerError::Validation(format!(
                "table {name}: matrix {:?} does not match axes {}x{}",
                values.dim(),
                rows.values.len(),
                cols.values.len()
            )));
        }
        Ok(Self { name: name.into(), rows, cols, values, metadata })
    }

    pub fn max_finite(&self) -> f64 {
        self.values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max)
    }

    pub fn nan_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }
}

fn number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| number(*v)).collect::<Vec<_>>().join(",")
}

/// CSV text of a table: a `#` comment header with the axis grids and
/// metadata, then one line per row.
pub fn csv_string(t: &ResultTable) -> String {
    let mut out = String::new();
    let m = &t.metadata;
    let flags = m.flags.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "# table: {}", t.name);
    let _ = writeln!(out, "# scenario: {}", m.scenario);
    let _ = writeln!(out, "# version: {}", m.version);
    let _ = writeln!(out, "# flags: {flags}");
    let _ = writeln!(out, "# nan_cells: {}", m.nan_cells);
    let _ = writeln!(out, "# extended_cells: {}", m.extended_cells);
    let _ = writeln!(out, "# rows: {} [{}] n={}", t.rows.name, t.rows.unit, t.rows.values.len());
    let _ = writeln!(out, "# row_values: {}", join(&t.rows.values));
    let _ = writeln!(out, "# columns: {} [{}] n={}", t.cols.name, t.cols.unit, t.cols.values.len());
    let _ = writeln!(out, "# column_values: {}", join(&t.cols.values));
    for row in t.values.rows() {
        let line = row.iter().map(|v| number(*v)).collect::<Vec<_>>().join(",");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunnerError> {
    fs::write(path, contents).map_err(|source| RunnerError::Io { path: path.to_path_buf(), source })
}

pub fn write_csv(t: &ResultTable, path: &Path) -> Result<(), RunnerError> {
    write_file(path, &csv_string(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Normalization {
    /// 255 is the table's largest finite value.
    #[default]
    PerTable,
    /// 255 is the given value, shared across tables.
    Shared(f64),
}

/// Plain PGM (P2) text. The last table row is the top image row, so the
/// row axis points up.
pub fn pgm_string(t: &ResultTable, normalization: Normalization) -> String {
    let max = match normalization {
        Normalization::PerTable => t.max_finite(),
        Normalization::Shared(m) => m,
    };
    let (rows, cols) = t.values.dim();
    let mut out = format!("P2\n{cols} {rows}\n255\n");
    for i in (0..rows).rev() {
        let line = (0..cols)
            .map(|j| {
                let v = t.values[(i, j)];
                let level = if v.is_finite() && max > 0.0 { (255.0 * v / max).round().clamp(0.0, 255.0) } else { 0.0 };
                (level as u8).to_string()
            })
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Sidecar holding the NaN count, next to a heatmap.
pub fn nan_sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".nan");
    PathBuf::from(s)
}

/// Writes the heatmap, plus `<path>.nan` with the NaN count when any cell
/// is NaN.
pub fn write_heatmap(t: &ResultTable, path: &Path, normalization: Normalization) -> Result<(), RunnerError> {
    write_file(path, &pgm_string(t, normalization))?;
    let nans = t.nan_count();
    if nans > 0 {
        write_file(&nan_sidecar_path(path), &format!("{nans}\n"))?;
    }
    Ok(())
}
