//! Configuration, scenario runs, output files and the `simulate` binary.

use std::fs;
use std::path::Path;
use std::process::Command;

use eig_sim::runner::{
    load_config, parse_config, run_scenario, write_outputs, Overrides, RunnerError, Scenario, ScenarioKind,
    ScenarioName,
};

fn parse(text: &str) -> Result<Scenario, RunnerError> {
    parse_config(text, &Overrides::default())
}

const SMALL_GRID: &str = "[grid]\nhalf_extent = 2.0\npoints_per_axis = 21\n";

#[test]
fn minimal_fig4_file_loads_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.toml");
    fs::write(&path, "scenario = \"fig4\"\n").unwrap();
    let s = load_config(&path).unwrap();
    assert_eq!(s, Scenario::defaults(ScenarioName::Fig4, None));
    assert_eq!(s.kind, ScenarioKind::Spatial);
}

#[test]
fn missing_file_is_io_error() {
    let err = load_config(Path::new("/nonexistent/run.toml")).unwrap_err();
    assert!(matches!(err, RunnerError::Io { .. }), "{err:?}");
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn zero_coupling_leaves_only_zero_order() {
    let text = format!(
        "scenario = \"custom\"\nkind = \"spatial\"\n[standing_wave]\nomega_c0 = 0.0\n[diffraction]\nmax_order = 3\n{SMALL_GRID}"
    );
    let tables = run_scenario(&parse(&text).unwrap()).unwrap();
    assert_eq!(tables.len(), 4);
    assert!(tables[0].values.iter().all(|v| *v > 0.0));
    for t in &tables[1..] {
        assert!(t.values.iter().all(|v| *v == 0.0), "{}", t.name);
    }
}

#[test]
fn fig8_with_charge_two_has_empty_side_orders() {
    let text = "scenario = \"fig8\"\n[beam]\nl1 = 2\nl2 = -2\n[sweep]\nlength_points = 21\n";
    let tables = run_scenario(&parse(text).unwrap()).unwrap();
    let intensity = &tables[0];
    assert_eq!(intensity.name, "fig8_intensity");
    assert_eq!(intensity.values.dim(), (21, 4));
    for n in 1..4 {
        assert!(intensity.values.column(n).iter().all(|v| *v == 0.0), "order {n}");
    }
    assert!(intensity.values.column(0).iter().all(|v| *v > 0.0));
    assert!(tables[1].values.iter().all(|v| *v == 1.0));
}

#[test]
fn detuning_tables_use_sweep_axes() {
    let text = "scenario = \"fig2\"\n[sweep]\ndetuning_points = 11\n";
    let tables = run_scenario(&parse(text).unwrap()).unwrap();
    assert_eq!(tables.len(), 4);
    let t = &tables[1];
    assert_eq!(t.name, "fig2_order1");
    assert_eq!((t.rows.name.as_str(), t.cols.name.as_str()), ("delta_lg", "delta_c"));
    assert_eq!(t.values.dim(), (11, 11));
    assert_eq!((t.rows.values[0], t.rows.values[10]), (-3.0, 3.0));
}

#[test]
fn full_susceptibility_runs() {
    let text = format!("scenario = \"fig4\"\nsusceptibility = \"full\"\n{SMALL_GRID}");
    let s = parse(&text).unwrap();
    let tables = run_scenario(&s).unwrap();
    assert_eq!(tables.len(), 3);
    assert!(tables.iter().all(|t| t.nan_count() == 0));
    assert!(tables[0].metadata.flags.iter().any(|(k, v)| k == "susceptibility" && v == "full"));
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "run_manifest.txt")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn repeated_runs_write_identical_files() {
    let text = format!("scenario = \"fig5\"\n{SMALL_GRID}");
    let s = parse(&text).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_outputs(&s, &run_scenario(&s).unwrap(), a.path()).unwrap();
    write_outputs(&s, &run_scenario(&s).unwrap(), b.path()).unwrap();
    let (fa, fb) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "fig5_order0.csv",
            "fig5_order0.pgm",
            "fig5_order1.csv",
            "fig5_order1.pgm",
            "fig5_order2.csv",
            "fig5_order2.pgm",
            "resolved_config.toml"
        ]
    );
    assert_eq!(fa, fb);
}

#[test]
fn resolved_config_reproduces_the_run() {
    let text = format!("scenario = \"fig3\"\ncoefficients = \"as-printed\"\n[drive]\ndelta_p = 0.25\n{SMALL_GRID}");
    let s = parse(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&s, &run_scenario(&s).unwrap(), dir.path()).unwrap();
    let again = load_config(&dir.path().join("resolved_config.toml")).unwrap();
    assert_eq!(again, s);
}

#[test]
fn length_sweep_writes_no_heatmaps() {
    let s = parse("scenario = \"fig8\"\n[sweep]\nlength_points = 5\n").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = write_outputs(&s, &run_scenario(&s).unwrap(), dir.path()).unwrap();
    assert!(written.iter().all(|p| p.extension().unwrap() != "pgm"));
    let manifest = fs::read_to_string(dir.path().join("run_manifest.txt")).unwrap();
    assert!(manifest.contains("table = fig8_intensity rows=5 cols=4"), "{manifest}");
}

fn simulate(config: &str, extra: &[&str]) -> (i32, String, String, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_simulate"))
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .args(extra)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        dir,
    )
}

#[test]
fn cli_success_lists_written_files() {
    let (code, stdout, stderr, dir) = simulate(&format!("scenario = \"fig4\"\n{SMALL_GRID}"), &["--threads", "1"]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.lines().any(|l| l.ends_with("fig4_order2.pgm")), "{stdout}");
    assert!(dir.path().join("out/fig4_order0.csv").exists());
}

#[test]
fn cli_scenario_override() {
    let (code, stdout, stderr, _dir) =
        simulate(&format!("scenario = \"fig4\"\n{SMALL_GRID}"), &["--scenario", "fig5", "--coefficients", "as-printed"]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("fig5_order1.csv"), "{stdout}");
}

#[test]
fn cli_invalid_config_exits_one() {
    let (code, _, stderr, _dir) = simulate("", &[]);
    assert_eq!(code, 1);
    assert!(stderr.contains("scenario missing"), "{stderr}");

    let (code, _, stderr, _dir) = simulate("scenario = \"fig4\"\n[grid]\nwidth = 3\n", &[]);
    assert_eq!(code, 1);
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn cli_numerical_failure_exits_two() {
    // No decoherence and no vortex: every cell sits on a pole.
    let config = format!(
        "scenario = \"custom\"\nkind = \"spatial\"\n[atom]\ngamma2 = 0.0\n[beam]\nomega = 0.0\n{SMALL_GRID}"
    );
    let (code, _, stderr, dir) = simulate(&config, &[]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("singular"), "{stderr}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn cli_warns_about_strong_probe() {
    let (code, _, stderr, _dir) = simulate(&format!("scenario = \"fig4\"\n[drive]\nomega_p = 0.5\n{SMALL_GRID}"), &[]);
    assert_eq!(code, 0);
    assert!(stderr.contains("warning: probe amplitude"), "{stderr}");
}
