//! Browser bindings: three interactive entry points over the core library,
//! each returning a JSON payload ready for plotting.

use choireg::choi::{check_physical, choi_distance, choi_from_superop, ChoiOperator};
use choireg::diagnostics::{blp_monotonicity, distinguishability, DistinguishabilitySeries};
use choireg::linalg::{CMat, C64};
use choireg::models::{
    ad_choi, ad_solution, computational_projector, spin_boson_assemble, AdKind,
    AmplitudeDampingParams, SpinBosonParams,
};
use choireg::ode::OdeOptions;
use choireg::projection::{project_to_choi_space, regularize_trajectory, ProjectionOptions};
use choireg::redfield::GeneratorMode;
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

fn linspace(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

fn error_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string(value).unwrap_or_else(error_json)
}

#[derive(Serialize)]
struct MethodCurves {
    method: String,
    distinguishability: Vec<f64>,
    distance_to_exact: Option<Vec<f64>>,
    delta_norm: Option<Vec<f64>>,
    monotone: bool,
}

#[derive(Serialize)]
struct QubitScan {
    grid: Vec<f64>,
    coupling_ratio: f64,
    curves: Vec<MethodCurves>,
}

/// Qubit damping scan: exact, Born, regularized Born and Redfield curves.
#[wasm_bindgen]
pub fn qubit_scan(gamma: f64, mu: f64, omega: f64, t_max: f64, steps: usize) -> String {
    let params = match AmplitudeDampingParams::new(gamma, mu, omega) {
        Ok(p) => p,
        Err(e) => return error_json(e),
    };
    if !t_max.is_finite() || t_max <= 0.0 || !(2..=4000).contains(&steps) {
        return error_json("need t_max > 0 and 2 <= steps <= 4000");
    }
    let grid = linspace(t_max, steps);
    let rho = computational_projector(2, 0);
    let sigma = computational_projector(2, 1);
    let exact = ad_solution(AdKind::Exact, params);
    let exact_chois: Vec<ChoiOperator> =
        grid.iter().map(|&t| ad_choi(&exact, omega, t)).collect();

    let mut curves = Vec::new();
    for (name, kind, regularize) in [
        ("exact", AdKind::Exact, false),
        ("born", AdKind::Born, false),
        ("choi_born", AdKind::Born, true),
        ("redfield_td", AdKind::RedfieldTd, false),
    ] {
        let sol = ad_solution(kind, params);
        let raw: Vec<ChoiOperator> = grid.iter().map(|&t| ad_choi(&sol, omega, t)).collect();
        let (finals, delta_norm): (Vec<ChoiOperator>, Option<Vec<f64>>) = if regularize {
            let results = regularize_trajectory(&raw, &ProjectionOptions::default());
            (
                results.iter().map(|r| r.projected.clone()).collect(),
                Some(results.iter().map(|r| r.delta_norm).collect()),
            )
        } else {
            (raw, None)
        };
        let mut dist = Vec::with_capacity(grid.len());
        let mut dref = Vec::with_capacity(grid.len());
        for (p, ex) in finals.iter().zip(&exact_chois) {
            match (distinguishability(p, &rho, &sigma), choi_distance(p, ex)) {
                (Ok(d), Ok(r)) => {
                    dist.push(d);
                    dref.push(r);
                }
                (Err(e), _) | (_, Err(e)) => return error_json(e),
            }
        }
        let monotone = blp_monotonicity(&DistinguishabilitySeries {
            grid: grid.clone(),
            values: dist.clone(),
            rho: rho.clone(),
            sigma: sigma.clone(),
        })
        .map(|r| r.monotone)
        .unwrap_or(true);
        curves.push(MethodCurves {
            method: name.to_string(),
            distinguishability: dist,
            distance_to_exact: Some(dref),
            delta_norm,
            monotone,
        });
    }
    to_json(&QubitScan {
        grid,
        coupling_ratio: params.coupling_ratio(),
        curves,
    })
}

#[derive(Serialize)]
struct SpinBosonScan {
    grid: Vec<f64>,
    curves: Vec<MethodCurves>,
    max_raw_distinguishability: f64,
}

/// Spin-boson scan: raw Redfield, its Choi-space regularization and the
/// Kossakowski-matrix regularization.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn spin_boson_scan(
    epsilon: f64,
    delta: f64,
    gamma: f64,
    mu: f64,
    omega0: f64,
    t_max: f64,
    steps: usize,
    time_dependent: bool,
) -> String {
    let params = SpinBosonParams {
        epsilon,
        delta,
        gamma,
        mu,
        omega0,
    };
    if let Err(e) = params.validate() {
        return error_json(e);
    }
    if !t_max.is_finite() || t_max <= 0.0 || !(2..=2000).contains(&steps) {
        return error_json("need t_max > 0 and 2 <= steps <= 2000");
    }
    let gen = match spin_boson_assemble(&params, time_dependent) {
        Ok(g) => g,
        Err(e) => return error_json(e),
    };
    let grid = linspace(t_max, steps);
    let rho = computational_projector(2, 0);
    let sigma = computational_projector(2, 1);
    let opts = OdeOptions::default();

    let raw_chois: Vec<ChoiOperator> = match gen.evolve_propagator(&grid, &opts, GeneratorMode::Raw)
    {
        Ok(props) => props.iter().map(choi_from_superop).collect(),
        Err(e) => return error_json(e),
    };
    let koss_chois: Vec<ChoiOperator> =
        match gen.evolve_propagator(&grid, &opts, GeneratorMode::KossakowskiRegularized) {
            Ok(props) => props.iter().map(choi_from_superop).collect(),
            Err(e) => return error_json(e),
        };
    let results = regularize_trajectory(&raw_chois, &ProjectionOptions::default());

    let series = |chois: &[ChoiOperator]| -> Result<Vec<f64>, String> {
        chois
            .iter()
            .map(|p| distinguishability(p, &rho, &sigma).map_err(|e| e.to_string()))
            .collect()
    };
    let raw_d = match series(&raw_chois) {
        Ok(v) => v,
        Err(e) => return error_json(e),
    };
    let reg_chois: Vec<ChoiOperator> = results.iter().map(|r| r.projected.clone()).collect();
    let reg_d = match series(&reg_chois) {
        Ok(v) => v,
        Err(e) => return error_json(e),
    };
    let koss_d = match series(&koss_chois) {
        Ok(v) => v,
        Err(e) => return error_json(e),
    };
    let monotone = |values: &Vec<f64>| {
        blp_monotonicity(&DistinguishabilitySeries {
            grid: grid.clone(),
            values: values.clone(),
            rho: rho.clone(),
            sigma: sigma.clone(),
        })
        .map(|r| r.monotone)
        .unwrap_or(true)
    };

    let max_raw = raw_d.iter().cloned().fold(0.0, f64::max);
    let label = if time_dependent { "td" } else { "ti" };
    let curves = vec![
        MethodCurves {
            method: format!("redfield_{label}"),
            monotone: monotone(&raw_d),
            distinguishability: raw_d,
            distance_to_exact: None,
            delta_norm: None,
        },
        MethodCurves {
            method: format!("choi_redfield_{label}"),
            monotone: monotone(&reg_d),
            distinguishability: reg_d,
            distance_to_exact: None,
            delta_norm: Some(results.iter().map(|r| r.delta_norm).collect()),
        },
        MethodCurves {
            method: "koss_redfield".to_string(),
            monotone: monotone(&koss_d),
            distinguishability: koss_d,
            distance_to_exact: None,
            delta_norm: None,
        },
    ];
    to_json(&SpinBosonScan {
        grid,
        curves,
        max_raw_distinguishability: max_raw,
    })
}

#[derive(Serialize)]
struct ProjectionDemo {
    population_coefficient: f64,
    coherence_coefficient: f64,
    physical: bool,
    eigenvalues: Vec<f64>,
    closed_form_min_eigenvalue: f64,
    projected_eigenvalues: Vec<f64>,
    delta_norm: f64,
    tp_deviation_after: f64,
    dual_iterations: usize,
}

/// Single-map projection demo on the damping family with hand-set
/// coefficients (A, B): shows the spectrum before and after repair.
#[wasm_bindgen]
pub fn damping_choi_projection(a: f64, b: f64) -> String {
    if !(0.0..=1.0).contains(&a) || !(-1.5..=1.5).contains(&b) {
        return error_json("need 0 <= A <= 1 and |B| <= 1.5");
    }
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(0, 3)] = C64::new(0.5 * b, 0.0);
    m[(3, 0)] = C64::new(0.5 * b, 0.0);
    m[(1, 1)] = C64::new(0.5 * (1.0 - a), 0.0);
    m[(3, 3)] = C64::new(0.5 * a, 0.0);
    let p = match ChoiOperator::new(2, m) {
        Ok(p) => p,
        Err(e) => return error_json(e),
    };
    let eigenvalues = p.as_hermitian().eigs().eigenvalues;
    let report = check_physical(&p, 1e-9);
    let out = project_to_choi_space(&p, &ProjectionOptions::default());
    let projected_eigenvalues = out.projected.as_hermitian().eigs().eigenvalues;
    let after = check_physical(&out.projected, 1e-9);
    to_json(&ProjectionDemo {
        population_coefficient: a,
        coherence_coefficient: b,
        physical: report.is_physical,
        eigenvalues,
        closed_form_min_eigenvalue: ((1.0 + a - ((1.0 - a).powi(2) + 4.0 * b * b).sqrt()) / 4.0)
            .min(0.0),
        projected_eigenvalues,
        delta_norm: out.delta_norm,
        tp_deviation_after: after.tp_deviation,
        dual_iterations: out.dual.iterations,
    })
}
