//! End-to-end scenario execution: build the per-method Choi trajectories,
//! regularize where requested, and flatten everything into the long-format
//! result table.

use choireg::choi::{check_physical, choi_distance, choi_from_superop, ChoiOperator};
use choireg::diagnostics::{distinguishability, TrajectoryRecord};
use choireg::models::{
    ad_choi, ad_solution, rwa_qubit_assemble, spin_boson_assemble, AdKind, AmplitudeDampingParams,
    SpinBosonParams,
};
use choireg::ode::OdeOptions;
use choireg::projection::{regularize_trajectory, ProjectionResult};
use choireg::redfield::GeneratorMode;
use serde::Serialize;

use crate::config::{Method, Scenario, ScenarioConfig};
use crate::reference::load_reference_trajectory;

/// One CSV row.
pub struct Row {
    pub t: f64,
    pub method: Method,
    pub d_t: f64,
    pub choi_distance_to_ref: Option<f64>,
    pub delta_norm: Option<f64>,
    pub min_choi_eig: f64,
    pub tp_deviation: f64,
}

/// Solver statistics per method, for the JSON sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct MethodStats {
    pub method: String,
    pub projected_steps: usize,
    pub converged_steps: usize,
    pub total_dual_iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_step_converged: Option<Vec<bool>>,
}

pub struct ScenarioOutput {
    pub config: ScenarioConfig,
    pub rows: Vec<Row>,
    pub stats: Vec<MethodStats>,
    pub warnings: Vec<String>,
}

/// Errors split by exit code: usage problems (2) versus runtime failures (1).
#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Failure(String),
}

impl RunError {
    pub fn message(&self) -> &str {
        match self {
            RunError::Usage(m) | RunError::Failure(m) => m,
        }
    }
}

fn failure(e: impl std::fmt::Display) -> RunError {
    RunError::Failure(e.to_string())
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let grid = config.grid();
    let mut warnings = Vec::new();

    let reference = match &config.reference {
        Some(path) => {
            let loaded = load_reference_trajectory(path).map_err(RunError::Usage)?;
            warnings.extend(
                loaded
                    .warnings
                    .into_iter()
                    .map(|w| format!("reference: {w}")),
            );
            if loaded.record.grid.len() != grid.len()
                || loaded
                    .record
                    .grid
                    .iter()
                    .zip(&grid)
                    .any(|(a, b)| (a - b).abs() > 1e-9)
            {
                return Err(RunError::Usage(format!(
                    "reference grid ({} points on [0, {:.6}]) does not match the configured \
                     grid ({} points on [0, {:.6}])",
                    loaded.record.grid.len(),
                    loaded.record.grid.last().copied().unwrap_or(0.0),
                    grid.len(),
                    config.t_max
                )));
            }
            Some(loaded.record)
        }
        None => {
            if config.scenario == Scenario::Qubit {
                // the qubit scenario always has its exact solution built in
                Some(qubit_reference(config, &grid))
            } else {
                None
            }
        }
    };

    let rho = config.probe_rho.to_state().map_err(RunError::Usage)?;
    let sigma = config.probe_sigma.to_state().map_err(RunError::Usage)?;

    let mut rows = Vec::new();
    let mut stats = Vec::new();
    for method in &config.methods {
        let series = method_series(config, &grid, *method, reference.as_ref())?;
        let (chois, projections) = series;

        let mut per_step_converged = None;
        let mut projected_steps = 0;
        let mut converged_steps = 0;
        let mut total_dual_iterations = 0;
        if let Some(results) = &projections {
            let flags: Vec<bool> = results.iter().map(|r| r.converged).collect();
            for (r, &t) in results.iter().zip(&grid) {
                if r.dual.iterations > 0 {
                    projected_steps += 1;
                    total_dual_iterations += r.dual.iterations;
                }
                if r.converged {
                    converged_steps += 1;
                } else {
                    warnings.push(format!(
                        "{method}: projection did not converge at t = {t} \
                         (gradient norm {:.3e}); best iterate kept",
                        r.dual.gradient_norm
                    ));
                }
            }
            per_step_converged = Some(flags);
        }
        stats.push(MethodStats {
            method: method.name().to_string(),
            projected_steps,
            converged_steps,
            total_dual_iterations,
            per_step_converged,
        });

        let final_chois: Vec<&ChoiOperator> = match &projections {
            Some(results) => results.iter().map(|r| &r.projected).collect(),
            None => chois.iter().collect(),
        };
        for (i, (&t, choi)) in grid.iter().zip(&final_chois).enumerate() {
            let d_t = distinguishability(choi, &rho, &sigma).map_err(failure)?;
            let choi_distance_to_ref = match &reference {
                Some(r) => Some(choi_distance(choi, &r.chois[i]).map_err(failure)?),
                None => None,
            };
            let delta_norm = projections.as_ref().map(|results| results[i].delta_norm);
            let report = check_physical(choi, config.projection.skip_tol);
            rows.push(Row {
                t,
                method: *method,
                d_t,
                choi_distance_to_ref,
                delta_norm,
                min_choi_eig: report.min_eigenvalue,
                tp_deviation: report.tp_deviation,
            });
        }
    }

    Ok(ScenarioOutput {
        config: config.clone(),
        rows,
        stats,
        warnings,
    })
}

fn qubit_reference(config: &ScenarioConfig, grid: &[f64]) -> TrajectoryRecord {
    let params = qubit_params(config);
    let sol = ad_solution(AdKind::Exact, params);
    let chois = grid.iter().map(|&t| ad_choi(&sol, params.omega, t)).collect();
    TrajectoryRecord::new(grid.to_vec(), chois, "exact").expect("grid is ascending")
}

fn qubit_params(config: &ScenarioConfig) -> AmplitudeDampingParams {
    AmplitudeDampingParams::new(config.gamma, config.mu, config.omega)
        .expect("validated at resolve time")
}

fn spin_boson_params(config: &ScenarioConfig) -> SpinBosonParams {
    SpinBosonParams {
        epsilon: config.epsilon,
        delta: config.delta,
        gamma: config.gamma,
        mu: config.mu,
        omega0: config.omega0,
    }
}

type SeriesResult = Result<(Vec<ChoiOperator>, Option<Vec<ProjectionResult>>), RunError>;

fn method_series(
    config: &ScenarioConfig,
    grid: &[f64],
    method: Method,
    reference: Option<&TrajectoryRecord>,
) -> SeriesResult {
    let raw = |kind: AdKind| -> Vec<ChoiOperator> {
        let params = qubit_params(config);
        let sol = ad_solution(kind, params);
        grid.iter().map(|&t| ad_choi(&sol, params.omega, t)).collect()
    };
    let engine_chois = |time_dependent: bool, mode: GeneratorMode| -> SeriesResult {
        let gen = match config.scenario {
            Scenario::Qubit => rwa_qubit_assemble(&qubit_params(config), time_dependent),
            Scenario::SpinBoson => spin_boson_assemble(&spin_boson_params(config), time_dependent),
        }
        .map_err(failure)?;
        let props = gen
            .evolve_propagator(grid, &OdeOptions::default(), mode)
            .map_err(failure)?;
        Ok((props.iter().map(choi_from_superop).collect(), None))
    };
    let projected = |chois: Vec<ChoiOperator>| -> (Vec<ChoiOperator>, Option<Vec<ProjectionResult>>) {
        let results = regularize_trajectory(&chois, &config.projection.to_options());
        (chois, Some(results))
    };

    match (config.scenario, method) {
        (Scenario::Qubit, Method::Exact) => Ok((raw(AdKind::Exact), None)),
        (Scenario::Qubit, Method::Born) => Ok((raw(AdKind::Born), None)),
        (Scenario::Qubit, Method::ChoiBorn) => Ok(projected(raw(AdKind::Born))),
        (Scenario::Qubit, Method::RedfieldTd) => Ok((raw(AdKind::RedfieldTd), None)),
        (Scenario::Qubit, Method::RedfieldTi) => Ok((raw(AdKind::RedfieldTi), None)),
        (Scenario::Qubit, Method::ChoiRedfieldTd) => Ok(projected(raw(AdKind::RedfieldTd))),
        (Scenario::Qubit, Method::ChoiRedfieldTi) => Ok(projected(raw(AdKind::RedfieldTi))),
        (_, Method::KossRedfield) => engine_chois(
            config.koss_time_dependent(),
            GeneratorMode::KossakowskiRegularized,
        ),
        (Scenario::SpinBoson, Method::Exact) => {
            let r = reference.expect("validated: exact needs a reference");
            Ok((r.chois.clone(), None))
        }
        (Scenario::SpinBoson, Method::RedfieldTd) => engine_chois(true, GeneratorMode::Raw),
        (Scenario::SpinBoson, Method::RedfieldTi) => engine_chois(false, GeneratorMode::Raw),
        (Scenario::SpinBoson, Method::ChoiRedfieldTd) => {
            let (chois, _) = engine_chois(true, GeneratorMode::Raw)?;
            Ok(projected(chois))
        }
        (Scenario::SpinBoson, Method::ChoiRedfieldTi) => {
            let (chois, _) = engine_chois(false, GeneratorMode::Raw)?;
            Ok(projected(chois))
        }
        (Scenario::SpinBoson, m) => Err(RunError::Usage(format!(
            "method '{m}' is only defined for the qubit scenario"
        ))),
    }
}

/// Render the result table; floats use the shortest representation that
/// round-trips, so identical runs are byte-identical.
pub fn to_csv(output: &ScenarioOutput) -> String {
    let mut s = String::from("t,method,D_t,choi_distance_to_ref,delta_norm,min_choi_eig,tp_deviation\n");
    let opt = |v: &Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in &output.rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.t,
            row.method,
            row.d_t,
            opt(&row.choi_distance_to_ref),
            opt(&row.delta_norm),
            row.min_choi_eig,
            row.tp_deviation
        ));
    }
    s
}

/// The JSON sidecar: resolved config, solver statistics and warnings.
pub fn to_sidecar(output: &ScenarioOutput) -> String {
    let value = serde_json::json!({
        "config": output.config,
        "stats": output.stats,
        "warnings": output.warnings,
    });
    serde_json::to_string_pretty(&value).expect("sidecar serialization cannot fail") + "\n"
}
