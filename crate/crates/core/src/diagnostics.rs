//! Trajectory-level metrics: state distinguishability through a map, Choi
//! distance to a reference trajectory, CPT-violation norms and detection of
//! distinguishability revivals (the BLP non-Markovianity witness).

use crate::choi::{apply_choi, choi_distance, ChoiOperator};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, trace_norm, HermitianMatrix};

/// Relative noise floor for the revival detector: slopes below
/// 1e-6 x (series range) are integrator jitter, not revivals.
const BLP_SLOPE_FLOOR: f64 = 1e-6;

/// A Choi trajectory on a time grid, optionally paired with its regularized
/// counterpart and the per-step violation norms.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub grid: Vec<f64>,
    pub chois: Vec<ChoiOperator>,
    pub regularized: Option<Vec<ChoiOperator>>,
    pub delta_norms: Option<Vec<f64>>,
    pub label: String,
}

impl TrajectoryRecord {
    pub fn new(grid: Vec<f64>, chois: Vec<ChoiOperator>, label: impl Into<String>) -> Result<Self> {
        if grid.len() != chois.len() {
            return Err(Error::Dimension(format!(
                "grid has {} points but {} Choi operators supplied",
                grid.len(),
                chois.len()
            )));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid("time grid must be strictly ascending".into()));
        }
        Ok(Self {
            grid,
            chois,
            regularized: None,
            delta_norms: None,
            label: label.into(),
        })
    }

    /// Attach the regularized trajectory; the supplied norms must equal
    /// ‖regularized - raw‖_F pointwise.
    pub fn with_regularized(
        mut self,
        regularized: Vec<ChoiOperator>,
        delta_norms: Vec<f64>,
    ) -> Result<Self> {
        if regularized.len() != self.grid.len() || delta_norms.len() != self.grid.len() {
            return Err(Error::Dimension(
                "regularized trajectory must match the grid length".into(),
            ));
        }
        for ((raw, reg), norm) in self.chois.iter().zip(&regularized).zip(&delta_norms) {
            let direct = frobenius_norm(&(reg.matrix() - raw.matrix()));
            if (direct - norm).abs() > 1e-12 {
                return Err(Error::State(format!(
                    "delta norm {norm} does not match recomputed {direct}"
                )));
            }
        }
        self.regularized = Some(regularized);
        self.delta_norms = Some(delta_norms);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Distinguishability of a probe pair over a grid.
#[derive(Debug, Clone)]
pub struct DistinguishabilitySeries {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub rho: HermitianMatrix,
    pub sigma: HermitianMatrix,
}

/// Helstrom distinguishability of two states pushed through a map:
/// ½ ‖Φ(ρ) - Φ(σ)‖₁. Physical maps keep this in [0, 1]; unphysical maps can
/// push it beyond 1, and that overshoot is reported, not clipped.
pub fn distinguishability(
    map: &ChoiOperator,
    rho: &HermitianMatrix,
    sigma: &HermitianMatrix,
) -> Result<f64> {
    if rho.dim() != map.dim() || sigma.dim() != map.dim() {
        return Err(Error::Dimension(format!(
            "probe states must match the map dimension {}",
            map.dim()
        )));
    }
    let mapped_rho = apply_choi(map, rho)?;
    let mapped_sigma = apply_choi(map, sigma)?;
    Ok(0.5 * trace_norm(&(mapped_rho.matrix() - mapped_sigma.matrix()))?)
}

/// Distinguishability of a fixed probe pair along a Choi trajectory.
pub fn distinguishability_series(
    traj: &TrajectoryRecord,
    rho: &HermitianMatrix,
    sigma: &HermitianMatrix,
) -> Result<DistinguishabilitySeries> {
    let chois = traj.regularized.as_ref().unwrap_or(&traj.chois);
    let values = chois
        .iter()
        .map(|p| distinguishability(p, rho, sigma))
        .collect::<Result<Vec<_>>>()?;
    Ok(DistinguishabilitySeries {
        grid: traj.grid.clone(),
        values,
        rho: rho.clone(),
        sigma: sigma.clone(),
    })
}

/// Pointwise Frobenius distances between two Choi trajectories on the same
/// grid.
pub fn choi_distance_series(
    traj: &TrajectoryRecord,
    reference: &TrajectoryRecord,
) -> Result<Vec<f64>> {
    if traj.grid.len() != reference.grid.len()
        || traj
            .grid
            .iter()
            .zip(&reference.grid)
            .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::Grid(
            "trajectories live on different time grids".into(),
        ));
    }
    traj.chois
        .iter()
        .zip(&reference.chois)
        .map(|(p, q)| choi_distance(p, q))
        .collect()
}

/// Result of the revival scan of a distinguishability series.
#[derive(Debug, Clone, PartialEq)]
pub struct BlpReport {
    pub monotone: bool,
    /// Time intervals on which the central-difference slope exceeds the
    /// noise floor.
    pub violation_intervals: Vec<(f64, f64)>,
}

/// Detect distinguishability revivals: central-difference slopes above
/// 1e-6 x range flag non-Markovian backflow.
pub fn blp_monotonicity(series: &DistinguishabilitySeries) -> Result<BlpReport> {
    let n = series.grid.len();
    if n < 3 {
        return Err(Error::Grid(
            "revival detection needs at least 3 grid points".into(),
        ));
    }
    let vmax = series.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = series.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let floor = BLP_SLOPE_FLOOR * (vmax - vmin).max(f64::MIN_POSITIVE);

    let slope = |i: usize| -> f64 {
        if i == 0 {
            (series.values[1] - series.values[0]) / (series.grid[1] - series.grid[0])
        } else if i == n - 1 {
            (series.values[n - 1] - series.values[n - 2])
                / (series.grid[n - 1] - series.grid[n - 2])
        } else {
            (series.values[i + 1] - series.values[i - 1])
                / (series.grid[i + 1] - series.grid[i - 1])
        }
    };

    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for i in 0..n {
        if slope(i) > floor {
            let t = series.grid[i];
            open = match open {
                None => Some((t, t)),
                Some((start, _)) => Some((start, t)),
            };
        } else if let Some(interval) = open.take() {
            intervals.push(interval);
        }
    }
    if let Some(interval) = open {
        intervals.push(interval);
    }
    Ok(BlpReport {
        monotone: intervals.is_empty(),
        violation_intervals: intervals,
    })
}

/// The per-step CPT-violation norms ‖Δ(t)‖ of a regularized trajectory.
pub fn delta_norm_series(traj: &TrajectoryRecord) -> Result<Vec<f64>> {
    traj.delta_norms
        .clone()
        .ok_or_else(|| Error::State("trajectory carries no regularized sequence".into()))
}
