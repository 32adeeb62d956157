//! Scenario configuration: JSON file fields, CLI overrides, defaults and
//! validation.

use std::path::PathBuf;

use choireg::linalg::{CMat, C64, HermitianMatrix};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Qubit,
    SpinBoson,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::Qubit => write!(f, "qubit"),
            Scenario::SpinBoson => write!(f, "spin_boson"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Born,
    ChoiBorn,
    RedfieldTd,
    RedfieldTi,
    ChoiRedfieldTd,
    ChoiRedfieldTi,
    KossRedfield,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Exact,
        Method::Born,
        Method::ChoiBorn,
        Method::RedfieldTd,
        Method::RedfieldTi,
        Method::ChoiRedfieldTd,
        Method::ChoiRedfieldTi,
        Method::KossRedfield,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Born => "born",
            Method::ChoiBorn => "choi_born",
            Method::RedfieldTd => "redfield_td",
            Method::RedfieldTi => "redfield_ti",
            Method::ChoiRedfieldTd => "choi_redfield_td",
            Method::ChoiRedfieldTi => "choi_redfield_ti",
            Method::KossRedfield => "koss_redfield",
        }
    }

    pub fn parse(s: &str) -> Result<Method, String> {
        Method::ALL
            .iter()
            .find(|m| m.name() == s)
            .copied()
            .ok_or_else(|| {
                format!(
                    "unknown method '{s}' (expected one of {})",
                    Method::ALL.map(|m| m.name()).join(", ")
                )
            })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A probe state: one of the named qubit states or an explicit matrix of
/// (re, im) entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbeState {
    Named(String),
    Matrix(Vec<Vec<(f64, f64)>>),
}

impl ProbeState {
    pub fn to_state(&self) -> Result<HermitianMatrix, String> {
        match self {
            ProbeState::Named(name) => {
                let half = C64::new(0.5, 0.0);
                let m = match name.as_str() {
                    "ground" => {
                        let mut m = CMat::zeros(2, 2);
                        m[(0, 0)] = C64::new(1.0, 0.0);
                        m
                    }
                    "excited" => {
                        let mut m = CMat::zeros(2, 2);
                        m[(1, 1)] = C64::new(1.0, 0.0);
                        m
                    }
                    "plus" => CMat::from_fn(2, 2, |_, _| half),
                    "minus" => CMat::from_fn(2, 2, |r, c| if r == c { half } else { -half }),
                    other => {
                        return Err(format!(
                            "unknown probe state '{other}' (expected ground, excited, plus, minus or a matrix)"
                        ))
                    }
                };
                HermitianMatrix::new(m).map_err(|e| e.to_string())
            }
            ProbeState::Matrix(rows) => {
                let d = rows.len();
                if d == 0 || rows.iter().any(|r| r.len() != d) {
                    return Err("probe matrix must be square and nonempty".into());
                }
                let m = CMat::from_fn(d, d, |i, j| C64::new(rows[i][j].0, rows[i][j].1));
                HermitianMatrix::new(m).map_err(|e| format!("probe matrix: {e}"))
            }
        }
    }
}

fn default_gradient_tol() -> f64 {
    1e-9
}
fn default_max_iterations() -> usize {
    500
}
fn default_skip_tol() -> f64 {
    1e-9
}

/// Projection solver options as they appear in config files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionConfig {
    #[serde(default = "default_gradient_tol")]
    pub gradient_tol: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_skip_tol")]
    pub skip_tol: f64,
    #[serde(default)]
    pub warm_start: bool,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            gradient_tol: default_gradient_tol(),
            max_iterations: default_max_iterations(),
            skip_tol: default_skip_tol(),
            warm_start: false,
        }
    }
}

impl ProjectionConfig {
    pub fn to_options(&self) -> choireg::projection::ProjectionOptions {
        choireg::projection::ProjectionOptions {
            gradient_tol: self.gradient_tol,
            max_iterations: self.max_iterations,
            skip_tol: self.skip_tol,
            warm_start: self.warm_start,
        }
    }
}

/// Raw configuration as read from a JSON file; every model field optional so
/// CLI flags and scenario defaults can fill the gaps.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FileConfig {
    pub scenario: Option<Scenario>,
    pub methods: Option<Vec<Method>>,
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub omega: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub omega0: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub probe_rho: Option<ProbeState>,
    pub probe_sigma: Option<ProbeState>,
    #[serde(default)]
    pub projection: ProjectionConfig,
    pub reference: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub json_out: Option<PathBuf>,
}

/// Fully resolved scenario configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub methods: Vec<Method>,
    pub gamma: f64,
    pub mu: f64,
    pub omega: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub omega0: f64,
    pub t_max: f64,
    pub steps: usize,
    pub probe_rho: ProbeState,
    pub probe_sigma: ProbeState,
    pub projection: ProjectionConfig,
    pub reference: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub json_out: Option<PathBuf>,
}

impl ScenarioConfig {
    /// Fill scenario defaults and validate. Errors here are usage errors.
    pub fn resolve(scenario: Scenario, file: FileConfig) -> Result<Self, String> {
        if let Some(s) = file.scenario {
            if s != scenario {
                return Err(format!(
                    "config file says scenario '{s}' but the subcommand asked for '{scenario}'"
                ));
            }
        }
        let (default_gamma, default_mu, default_t_max) = match scenario {
            Scenario::Qubit => (1.0, 5.0, 10.0),
            Scenario::SpinBoson => (1.5, 0.1, 40.0),
        };
        let methods = file.methods.unwrap_or_else(|| match scenario {
            Scenario::Qubit => vec![
                Method::Exact,
                Method::Born,
                Method::ChoiBorn,
                Method::RedfieldTd,
            ],
            Scenario::SpinBoson => vec![
                Method::RedfieldTi,
                Method::ChoiRedfieldTi,
                Method::KossRedfield,
            ],
        });
        let config = Self {
            scenario,
            methods,
            gamma: file.gamma.unwrap_or(default_gamma),
            mu: file.mu.unwrap_or(default_mu),
            omega: file.omega.unwrap_or(1.0),
            epsilon: file.epsilon.unwrap_or(1.0),
            delta: file.delta.unwrap_or(0.7),
            omega0: file.omega0.unwrap_or(1.0),
            t_max: file.t_max.unwrap_or(default_t_max),
            steps: file.steps.unwrap_or(400),
            probe_rho: file
                .probe_rho
                .unwrap_or(ProbeState::Named("ground".into())),
            probe_sigma: file
                .probe_sigma
                .unwrap_or(ProbeState::Named("excited".into())),
            projection: file.projection,
            reference: file.reference,
            out: file.out,
            json_out: file.json_out,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        if self.methods.is_empty() {
            return Err("methods must not be empty".into());
        }
        if self.t_max <= 0.0 {
            return Err(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.steps < 2 {
            return Err(format!("steps must be at least 2, got {}", self.steps));
        }
        let mut seen = std::collections::HashSet::new();
        for m in &self.methods {
            if !seen.insert(*m) {
                return Err(format!("method '{m}' listed twice"));
            }
        }
        let qubit_only = [Method::Exact, Method::Born, Method::ChoiBorn];
        if self.scenario == Scenario::SpinBoson {
            for m in &self.methods {
                if *m == Method::Exact {
                    if self.reference.is_none() {
                        return Err(
                            "spin_boson has no built-in exact solution: 'exact' needs \
                             --reference <choi-trajectory.csv>"
                                .into(),
                        );
                    }
                } else if qubit_only.contains(m) {
                    return Err(format!("method '{m}' is only defined for the qubit scenario"));
                }
            }
        }
        self.probe_rho.to_state()?;
        self.probe_sigma.to_state()?;
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| self.t_max * i as f64 / (self.steps - 1) as f64)
            .collect()
    }

    /// Which generator the Kossakowski-regularized method uses: follow the
    /// time dependence of the other Redfield methods in the run (the
    /// time-independent one only when the run is purely time-independent).
    pub fn koss_time_dependent(&self) -> bool {
        let has_ti = self
            .methods
            .iter()
            .any(|m| matches!(m, Method::RedfieldTi | Method::ChoiRedfieldTi));
        let has_td = self
            .methods
            .iter()
            .any(|m| matches!(m, Method::RedfieldTd | Method::ChoiRedfieldTd));
        has_td || !has_ti
    }
}

pub fn load_file_config(path: &std::path::Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse config {}: {e}", path.display()))
}
