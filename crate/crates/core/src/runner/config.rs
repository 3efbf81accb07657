//! TOML run configuration.
//!
//! Only `scenario` is required. Everything else defaults to the named
//! scenario's parameter block and may be overridden key by key; unknown keys
//! are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::scenario::{Scenario, ScenarioKind, ScenarioName, Susceptibility};
use super::RunnerError;
use crate::atomic::{CoefficientSource, SignConvention, VortexSquare};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma4: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_lg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_p: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeam {
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    waist: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l1: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l2: Option<i32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStandingWave {
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_c0: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiffraction {
    #[serde(skip_serializing_if = "Option::is_none")]
    period_over_wavelength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slit_count: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length_over_xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_order: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    half_extent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points_per_axis: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    detuning_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detuning_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detuning_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_over_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_over_pi: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<ScenarioKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<CoefficientSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign: Option<SignConvention>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vortex_square: Option<VortexSquare>,
    #[serde(skip_serializing_if = "Option::is_none")]
    susceptibility: Option<Susceptibility>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    atom: RawAtom,
    #[serde(default)]
    drive: RawDrive,
    #[serde(default)]
    beam: RawBeam,
    #[serde(default)]
    standing_wave: RawStandingWave,
    #[serde(default)]
    diffraction: RawDiffraction,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    sweep: RawSweep,
}

/// Command-line settings that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub coefficients: Option<CoefficientSource>,
    pub sign: Option<SignConvention>,
    pub vortex_square: Option<VortexSquare>,
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn resolve(raw: RawConfig, overrides: &Overrides) -> Result<Scenario, RunnerError> {
    let name_str = overrides
        .scenario
        .clone()
        .or(raw.scenario)
        .ok_or_else(|| RunnerError::Validation("scenario missing".into()))?;
    let name = ScenarioName::parse(&name_str).ok_or_else(|| {
        RunnerError::Validation(format!(
            "scenario: unknown name {name_str:?} (expected fig2..fig8 or custom)"
        ))
    })?;
    if name == ScenarioName::Custom && raw.kind.is_none() {
        return Err(RunnerError::Validation("kind missing: custom scenarios need kind = spatial|length-sweep|detuning".into()));
    }
    let mut s = Scenario::defaults(name, raw.kind);
    set(&mut s.kind, raw.kind);
    set(&mut s.coefficients, overrides.coefficients.or(raw.coefficients));
    set(&mut s.sign, overrides.sign.or(raw.sign));
    set(&mut s.drive.vortex_square, overrides.vortex_square.or(raw.vortex_square));
    set(&mut s.susceptibility, raw.susceptibility);
    set(&mut s.output_dir, raw.output_dir);

    set(&mut s.atom.gamma3, raw.atom.gamma3);
    set(&mut s.atom.gamma4, raw.atom.gamma4);
    set(&mut s.atom.gamma2, raw.atom.gamma2);
    set(&mut s.drive.delta_p, raw.drive.delta_p);
    set(&mut s.drive.delta_c, raw.drive.delta_c);
    set(&mut s.drive.delta_lg, raw.drive.delta_lg);
    set(&mut s.drive.omega_p, raw.drive.omega_p);
    set(&mut s.beam.omega, raw.beam.omega);
    set(&mut s.beam.waist, raw.beam.waist);
    set(&mut s.beam.l1, raw.beam.l1);
    set(&mut s.beam.l2, raw.beam.l2);
    set(&mut s.sw.omega_c0, raw.standing_wave.omega_c0);
    set(&mut s.diffraction.period_over_wavelength, raw.diffraction.period_over_wavelength);
    set(&mut s.diffraction.slit_count, raw.diffraction.slit_count);
    set(&mut s.diffraction.length_over_xi, raw.diffraction.length_over_xi);
    set(&mut s.diffraction.max_order, raw.diffraction.max_order);
    set(&mut s.grid.half_extent, raw.grid.half_extent);
    set(&mut s.grid.points_per_axis, raw.grid.points_per_axis);
    let w = &mut s.sweep;
    set(&mut w.detuning_min, raw.sweep.detuning_min);
    set(&mut w.detuning_max, raw.sweep.detuning_max);
    set(&mut w.detuning_points, raw.sweep.detuning_points);
    set(&mut w.length_min, raw.sweep.length_min);
    set(&mut w.length_max, raw.sweep.length_max);
    set(&mut w.length_points, raw.sweep.length_points);
    set(&mut w.r_over_w, raw.sweep.r_over_w);
    set(&mut w.phi_over_pi, raw.sweep.phi_over_pi);

    s.validate().map_err(RunnerError::Validation)?;
    Ok(s)
}

/// Parses configuration text.
pub fn parse_config(text: &str, overrides: &Overrides) -> Result<Scenario, RunnerError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |span| line_column(text, span.start));
        RunnerError::Parse { path: None, line, column, message: e.message().trim().to_string() }
    })?;
    resolve(raw, overrides)
}

pub fn load_config(path: &Path) -> Result<Scenario, RunnerError> {
    load_config_with(path, &Overrides::default())
}

pub fn load_config_with(path: &Path, overrides: &Overrides) -> Result<Scenario, RunnerError> {
    let text = fs::read_to_string(path).map_err(|source| RunnerError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text, overrides).map_err(|e| match e {
        RunnerError::Parse { line, column, message, .. } => {
            RunnerError::Parse { path: Some(path.to_path_buf()), line, column, message }
        }
        other => other,
    })
}

impl Scenario {
    /// Canonical configuration text with every key spelled out.
    pub fn to_toml(&self) -> String {
        let raw = RawConfig {
            scenario: Some(self.name.as_str().into()),
            kind: Some(self.kind),
            coefficients: Some(self.coefficients),
            sign: Some(self.sign),
            vortex_square: Some(self.drive.vortex_square),
            susceptibility: Some(self.susceptibility),
            output_dir: Some(self.output_dir.clone()),
            atom: RawAtom {
                gamma3: Some(self.atom.gamma3),
                gamma4: Some(self.atom.gamma4),
                gamma2: Some(self.atom.gamma2),
            },
            drive: RawDrive {
                delta_p: Some(self.drive.delta_p),
                delta_c: Some(self.drive.delta_c),
                delta_lg: Some(self.drive.delta_lg),
                omega_p: Some(self.drive.omega_p),
            },
            beam: RawBeam {
                omega: Some(self.beam.omega),
                waist: Some(self.beam.waist),
                l1: Some(self.beam.l1),
                l2: Some(self.beam.l2),
            },
            standing_wave: RawStandingWave { omega_c0: Some(self.sw.omega_c0) },
            diffraction: RawDiffraction {
                period_over_wavelength: Some(self.diffraction.period_over_wavelength),
                slit_count: Some(self.diffraction.slit_count),
                length_over_xi: Some(self.diffraction.length_over_xi),
                max_order: Some(self.diffraction.max_order),
            },
            grid: RawGrid {
                half_extent: Some(self.grid.half_extent),
                points_per_axis: Some(self.grid.points_per_axis),
            },
            sweep: RawSweep {
                detuning_min: Some(self.sweep.detuning_min),
                detuning_max: Some(self.sweep.detuning_max),
                detuning_points: Some(self.sweep.detuning_points),
                length_min: Some(self.sweep.length_min),
                length_max: Some(self.sweep.length_max),
                length_points: Some(self.sweep.length_points),
                r_over_w: Some(self.sweep.r_over_w),
                phi_over_pi: Some(self.sweep.phi_over_pi),
            },
        };
        toml::to_string(&raw).expect("scenario serialises to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario, RunnerError> {
        parse_config(text, &Overrides::default())
    }

    #[test]
    fn minimal_file_populates_defaults() {
        let s = parse("scenario = \"fig4\"").unwrap();
        assert_eq!(s, Scenario::defaults(ScenarioName::Fig4, None));
    }

    #[test]
    fn empty_file_is_missing_scenario() {
        match parse("") {
            Err(RunnerError::Validation(m)) => assert_eq!(m, "scenario missing"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn order_beyond_grating_limit() {
        let text = "scenario = \"fig4\"\n[diffraction]\nmax_order = 5\nperiod_over_wavelength = 4\n";
        match parse(text) {
            Err(RunnerError::Validation(m)) => assert!(m.contains("max_order"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_position() {
        match parse("scenario = \"fig4\"\n[grid]\nhalf_extent = 2.0\nwidth = 3\n") {
            Err(RunnerError::Parse { line, column, message, .. }) => {
                assert_eq!((line, column), (4, 1));
                assert!(message.contains("width"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        match parse("scenario = \"fig4\"\nkind = \n") {
            Err(RunnerError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn custom_needs_kind() {
        assert!(matches!(parse("scenario = \"custom\""), Err(RunnerError::Validation(m)) if m.contains("kind")));
        let s = parse("scenario = \"custom\"\nkind = \"length-sweep\"").unwrap();
        assert_eq!(s.kind, ScenarioKind::LengthSweep);
    }

    #[test]
    fn unknown_scenario_name() {
        assert!(matches!(parse("scenario = \"fig9\""), Err(RunnerError::Validation(m)) if m.contains("fig9")));
    }

    #[test]
    fn overrides_win() {
        let o = Overrides {
            scenario: Some("fig5".into()),
            coefficients: Some(CoefficientSource::AsPrinted),
            sign: Some(SignConvention::AsPrinted),
            vortex_square: Some(VortexSquare::Analytic),
        };
        let s = parse_config("scenario = \"fig4\"\ncoefficients = \"rederived\"", &o).unwrap();
        assert_eq!(s.name, ScenarioName::Fig5);
        assert_eq!(s.coefficients, CoefficientSource::AsPrinted);
        assert_eq!(s.sign, SignConvention::AsPrinted);
        assert_eq!(s.drive.vortex_square, VortexSquare::Analytic);
    }

    #[test]
    fn canonical_form_round_trips() {
        for name in ScenarioName::ALL {
            let mut s = Scenario::defaults(name, Some(ScenarioKind::Detuning));
            s.atom.gamma2 = 0.1 + 0.2;
            s.drive.delta_c = -1.0 / 3.0;
            let back = parse(&s.to_toml()).unwrap();
            assert_eq!(back, s, "{name:?}");
        }
    }
}
