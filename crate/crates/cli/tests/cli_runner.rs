//! End-to-end checks of the scenario runner: determinism, the reference file
//! format, validation paths and process exit codes.

use std::process::Command;

use choireg::diagnostics::TrajectoryRecord;
use choireg::models::{ad_choi, ad_solution, AdKind, AmplitudeDampingParams};
use choireg_cli::config::{FileConfig, Method, Scenario, ScenarioConfig};
use choireg_cli::reference::{load_reference_trajectory, save_reference_trajectory};
use choireg_cli::scenario::{run_scenario, to_csv, to_sidecar, RunError};

fn qubit_config(steps: usize, mu: f64) -> ScenarioConfig {
    ScenarioConfig::resolve(
        Scenario::Qubit,
        FileConfig {
            mu: Some(mu),
            steps: Some(steps),
            t_max: Some(10.0),
            ..Default::default()
        },
    )
    .unwrap()
}

#[test]
fn identical_configs_give_identical_csv() {
    let config = qubit_config(60, 1.0);
    let first = to_csv(&run_scenario(&config).unwrap());
    let second = to_csv(&run_scenario(&config).unwrap());
    assert_eq!(first, second);
    assert!(first.starts_with(
        "t,method,D_t,choi_distance_to_ref,delta_norm,min_choi_eig,tp_deviation\n"
    ));
}

#[test]
fn emitted_choi_series_are_physical() {
    let config = qubit_config(80, 1.0);
    let output = run_scenario(&config).unwrap();
    let mut saw_choi_rows = false;
    for row in &output.rows {
        if matches!(
            row.method,
            Method::ChoiBorn | Method::ChoiRedfieldTd | Method::ChoiRedfieldTi
        ) {
            saw_choi_rows = true;
            assert!(row.min_choi_eig >= -1e-8, "t={}: {}", row.t, row.min_choi_eig);
            assert!(row.tp_deviation <= 1e-8, "t={}: {}", row.t, row.tp_deviation);
        }
    }
    assert!(saw_choi_rows);
}

#[test]
fn csv_round_trips_through_parsing() {
    let config = qubit_config(25, 2.0);
    let output = run_scenario(&config).unwrap();
    let csv = to_csv(&output);
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        let t: f64 = fields[0].parse().unwrap();
        let d: f64 = fields[2].parse().unwrap();
        assert!((0.0..=10.0).contains(&t));
        assert!(d.is_finite());
        rows += 1;
    }
    assert_eq!(rows, 25 * config.methods.len());
    // sidecar is valid JSON carrying the stats
    let sidecar: serde_json::Value = serde_json::from_str(&to_sidecar(&output)).unwrap();
    assert_eq!(
        sidecar["stats"].as_array().unwrap().len(),
        config.methods.len()
    );
}

#[test]
fn reference_round_trip_is_exact() {
    let params = AmplitudeDampingParams::new(1.0, 1.0, 1.0).unwrap();
    let sol = ad_solution(AdKind::Exact, params);
    let grid: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
    let chois: Vec<_> = grid.iter().map(|&t| ad_choi(&sol, params.omega, t)).collect();
    let record = TrajectoryRecord::new(grid, chois, "exact").unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reference.csv");
    save_reference_trajectory(&path, &record).unwrap();
    let loaded = load_reference_trajectory(&path).unwrap();
    assert!(loaded.warnings.is_empty(), "{:?}", loaded.warnings);
    assert_eq!(loaded.record.grid.len(), record.grid.len());
    for ((t_in, p_in), (t_out, p_out)) in record
        .grid
        .iter()
        .zip(&record.chois)
        .zip(loaded.record.grid.iter().zip(&loaded.record.chois))
    {
        assert_eq!(t_in, t_out); // shortest round-trip formatting is exact
        assert!((p_in.matrix() - p_out.matrix()).norm() < 1e-12);
    }
}

#[test]
fn reference_validation_warns_on_unphysical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    // a 2x2 state row (dim 4 would be a qubit Choi; 2x2 means d is not a
    // perfect square beyond 1, so build a 4x4 with a wrong trace instead)
    let mut line = String::from("0.0");
    for i in 0..4 {
        for j in 0..4 {
            let v = if i == j && i == 0 { 0.9 } else { 0.0 };
            line.push_str(&format!(",{v},0.0"));
        }
    }
    std::fs::write(&path, format!("{line}\n")).unwrap();
    let loaded = load_reference_trajectory(&path).unwrap();
    assert!(
        loaded.warnings.iter().any(|w| w.contains("trace")),
        "{:?}",
        loaded.warnings
    );
}

#[test]
fn reference_parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.csv");
    let mut good = String::from("0.0");
    for _ in 0..16 {
        good.push_str(",0.0625,0.0");
    }
    std::fs::write(&path, format!("{good}\n1.0,not_a_number\n")).unwrap();
    let err = load_reference_trajectory(&path).unwrap_err();
    assert!(err.contains(":2:"), "{err}");
}

#[test]
fn spin_boson_accepts_a_matching_reference() {
    // use a regularized run as a stand-in physical reference
    let base = ScenarioConfig::resolve(
        Scenario::SpinBoson,
        FileConfig {
            steps: Some(30),
            t_max: Some(6.0),
            methods: Some(vec![Method::ChoiRedfieldTi]),
            ..Default::default()
        },
    )
    .unwrap();
    let output = run_scenario(&base).unwrap();
    let grid = base.grid();
    assert_eq!(output.rows.len(), 30);

    // rebuild the projected trajectory for saving
    let gen = choireg::models::spin_boson_assemble(
        &choireg::models::SpinBosonParams {
            epsilon: base.epsilon,
            delta: base.delta,
            gamma: base.gamma,
            mu: base.mu,
            omega0: base.omega0,
        },
        false,
    )
    .unwrap();
    let props = gen
        .evolve_propagator(
            &grid,
            &choireg::ode::OdeOptions::default(),
            choireg::redfield::GeneratorMode::Raw,
        )
        .unwrap();
    let raw: Vec<_> = props.iter().map(choireg::choi::choi_from_superop).collect();
    let reg = choireg::projection::regularize_trajectory(
        &raw,
        &choireg::projection::ProjectionOptions::default(),
    );
    let record = TrajectoryRecord::new(
        grid,
        reg.into_iter().map(|r| r.projected).collect(),
        "pseudo-exact",
    )
    .unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ref.csv");
    save_reference_trajectory(&path, &record).unwrap();

    let with_ref = ScenarioConfig::resolve(
        Scenario::SpinBoson,
        FileConfig {
            steps: Some(30),
            t_max: Some(6.0),
            methods: Some(vec![Method::Exact, Method::RedfieldTi, Method::ChoiRedfieldTi]),
            reference: Some(path),
            ..Default::default()
        },
    )
    .unwrap();
    let output = run_scenario(&with_ref).unwrap();
    // the 'exact' rows are the reference itself: distance zero
    for row in output.rows.iter().filter(|r| r.method == Method::Exact) {
        assert_eq!(row.choi_distance_to_ref, Some(0.0));
    }
    // regularized rows are never farther from the reference than raw ones
    let raw_d: Vec<f64> = output
        .rows
        .iter()
        .filter(|r| r.method == Method::RedfieldTi)
        .map(|r| r.choi_distance_to_ref.unwrap())
        .collect();
    let reg_d: Vec<f64> = output
        .rows
        .iter()
        .filter(|r| r.method == Method::ChoiRedfieldTi)
        .map(|r| r.choi_distance_to_ref.unwrap())
        .collect();
    for (raw, reg) in raw_d.iter().zip(&reg_d) {
        assert!(reg <= &(raw + 1e-10));
    }
}

#[test]
fn mismatched_reference_grid_is_a_usage_error() {
    let params = AmplitudeDampingParams::new(1.0, 1.0, 1.0).unwrap();
    let sol = ad_solution(AdKind::Exact, params);
    let grid: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let chois: Vec<_> = grid.iter().map(|&t| ad_choi(&sol, params.omega, t)).collect();
    let record = TrajectoryRecord::new(grid, chois, "exact").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ref.csv");
    save_reference_trajectory(&path, &record).unwrap();

    let config = ScenarioConfig::resolve(
        Scenario::Qubit,
        FileConfig {
            steps: Some(50),
            reference: Some(path),
            ..Default::default()
        },
    )
    .unwrap();
    match run_scenario(&config) {
        Err(RunError::Usage(msg)) => assert!(msg.contains("grid"), "{msg}"),
        other => panic!(
            "expected a usage error, got {:?}",
            other.err().map(|e| e.message().to_string())
        ),
    }
}

#[test]
fn non_convergence_is_a_warning_not_an_error() {
    let mut file = FileConfig {
        mu: Some(1.0),
        steps: Some(20),
        methods: Some(vec![Method::ChoiBorn]),
        ..Default::default()
    };
    file.projection.max_iterations = 1;
    let config = ScenarioConfig::resolve(Scenario::Qubit, file).unwrap();
    let output = run_scenario(&config).unwrap();
    assert!(
        output.warnings.iter().any(|w| w.contains("did not converge")),
        "{:?}",
        output.warnings
    );
    let stats = &output.stats[0];
    assert!(stats.converged_steps < 20);
    let flags = stats.per_step_converged.as_ref().unwrap();
    assert!(flags.iter().any(|f| !f));
}

#[test]
fn config_validation_errors() {
    // empty methods
    let err = ScenarioConfig::resolve(
        Scenario::Qubit,
        FileConfig {
            methods: Some(vec![]),
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(err.contains("methods"));

    // born is a qubit-only method
    let err = ScenarioConfig::resolve(
        Scenario::SpinBoson,
        FileConfig {
            methods: Some(vec![Method::Born]),
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(err.contains("qubit"));

    // bad grid
    let err = ScenarioConfig::resolve(
        Scenario::Qubit,
        FileConfig {
            steps: Some(1),
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(err.contains("steps"));
}

#[test]
fn flags_override_config_file_fields() {
    let bin = env!("CARGO_BIN_EXE_choireg");
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    std::fs::write(
        &config_path,
        r#"{"mu": 5.0, "steps": 10, "methods": ["exact"]}"#,
    )
    .unwrap();
    let run = |extra: &[&str]| {
        let out = Command::new(bin)
            .args(["qubit", "--config"])
            .arg(&config_path)
            .args(extra)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout).unwrap()
    };
    let from_file = run(&[]);
    let overridden = run(&["--mu", "1"]);
    assert_ne!(from_file, overridden, "--mu should override the config file");
    // and the override matches a pure-flag run with the same parameters
    let pure = Command::new(bin)
        .args(["qubit", "--mu", "1", "--steps", "10", "--methods", "exact"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(pure.stdout).unwrap(), overridden);
}

#[test]
fn binary_exit_codes_and_output_files() {
    let bin = env!("CARGO_BIN_EXE_choireg");
    let dir = tempfile::tempdir().unwrap();

    // usage error: empty methods via config file
    let config_path = dir.path().join("bad.json");
    std::fs::write(&config_path, r#"{"methods": []}"#).unwrap();
    let status = Command::new(bin)
        .args(["qubit", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));

    // a successful run writes both the CSV and its sidecar, deterministically
    let out_path = dir.path().join("run.csv");
    let run = |out: &std::path::Path| {
        let status = Command::new(bin)
            .args(["qubit", "--mu", "1", "--steps", "40", "--methods", "born,choi_born", "--out"])
            .arg(out)
            .output()
            .unwrap();
        assert_eq!(status.status.code(), Some(0), "{status:?}");
    };
    run(&out_path);
    let first = std::fs::read(&out_path).unwrap();
    assert!(dir.path().join("run.json").exists());
    run(&out_path);
    let second = std::fs::read(&out_path).unwrap();
    assert_eq!(first, second, "CSV output is not deterministic");
}
