//! Projection of a Hermitian operator onto the physical Choi space (the
//! intersection of the PSD cone with the trace-preservation affine set),
//! i.e. the semidefinite least-squares problem
//!
//! > min ‖P - X‖_F  over  X ⪰ 0, Tr_1 X = 1/d.
//!
//! The production path is the Lagrangian dual method of Malick
//! (SIAM J. Matrix Anal. Appl. 26, 2004): minimize the smooth convex dual
//!
//! > θ(Y) = ½ ‖Π(P + 1 ⊗ Y)‖² - Tr\[Y\]/d,  ∇θ(Y) = Tr_1\[Π(P + 1 ⊗ Y)\] - 1/d
//!
//! over Hermitian Y (d² real parameters) with L-BFGS, then recover
//! P̃ = Π(P + 1 ⊗ Ȳ). The 1/d on the linear term is forced by the Choi
//! normalization Tr_1 X = 1/d: it is what makes ∇θ the trace-preservation
//! residual of the recovered operator, and the finite-difference and Dykstra
//! cross-checks below pin it down. Dykstra's alternating projections serve
//! as an independent oracle for the same best-approximation problem.

use crate::choi::{check_physical, ChoiOperator, DEFAULT_PHYSICALITY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_norm, kron, partial_trace_first, psd_project, CMat, C64, HermitianMatrix,
};
use crate::optim::{self, LbfgsOptions};

/// Options for the dual projection solver.
#[derive(Debug, Clone)]
pub struct ProjectionOptions {
    /// Stop when ‖∇θ‖_F falls below this. The gradient equals the
    /// trace-preservation residual of the recovered operator, so this bound
    /// is a direct physicality certificate.
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// Inputs passing the physicality check at this tolerance bypass the
    /// solver and are returned untouched.
    pub skip_tol: f64,
    /// Reuse the previous dual optimizer as the starting point across a
    /// trajectory (forces sequential order; off by default for determinism).
    pub warm_start: bool,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            gradient_tol: 1e-9,
            max_iterations: 500,
            skip_tol: DEFAULT_PHYSICALITY_TOL,
            warm_start: false,
        }
    }
}

/// Terminal state of the dual minimization.
#[derive(Debug, Clone)]
pub struct DualState {
    pub y: HermitianMatrix,
    pub objective: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Result of projecting one Choi operator.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub projected: ChoiOperator,
    /// Difference projected - input; its norm measures the CPT violation.
    pub delta: HermitianMatrix,
    pub delta_norm: f64,
    pub dual: DualState,
    pub converged: bool,
}

/// Outcome of the alternating-projections oracle.
#[derive(Debug, Clone)]
pub struct DykstraOutcome {
    pub projected: ChoiOperator,
    pub converged: bool,
    pub sweeps: usize,
}

/// Dual objective `θ(Y) = ½‖Π(P + 1 ⊗ Y)‖² - Tr[Y]/d`.
pub fn dual_objective(y: &HermitianMatrix, p: &ChoiOperator) -> Result<f64> {
    check_dual_dims(y, p)?;
    let (value, _) = objective_and_gradient(y.matrix(), p);
    Ok(value)
}

/// Dual gradient `∇θ(Y) = Tr_1[Π(P + 1 ⊗ Y)] - 1/d`.
pub fn dual_objective_gradient(y: &HermitianMatrix, p: &ChoiOperator) -> Result<HermitianMatrix> {
    check_dual_dims(y, p)?;
    let (_, grad) = objective_and_gradient(y.matrix(), p);
    Ok(HermitianMatrix::symmetrize(grad).0)
}

fn check_dual_dims(y: &HermitianMatrix, p: &ChoiOperator) -> Result<()> {
    if y.dim() != p.dim() {
        return Err(Error::Dimension(format!(
            "dual variable is {}x{} but the Choi operator acts on dim {}",
            y.dim(),
            y.dim(),
            p.dim()
        )));
    }
    Ok(())
}

/// One eigendecomposition yields both the objective and the gradient.
fn objective_and_gradient(y: &CMat, p: &ChoiOperator) -> (f64, CMat) {
    let d = p.dim();
    let shifted =
        HermitianMatrix::symmetrize(p.matrix() + kron(&CMat::identity(d, d), y)).0;
    let eig = shifted.eigs();
    let value: f64 = 0.5 * eig.eigenvalues.iter().map(|l| l.max(0.0).powi(2)).sum::<f64>()
        - y.trace().re / d as f64;
    let clamped = eig.map_spectrum(|l| l.max(0.0));
    let grad = partial_trace_first(&clamped, d, d).expect("dims by construction")
        - CMat::identity(d, d) / C64::new(d as f64, 0.0);
    (value, grad)
}

// Hermitian matrices <-> d² real coordinates in an orthonormal basis
// (diagonal entries, then sqrt(2)-scaled real/imag parts of the upper
// triangle), so Euclidean norms in coordinates equal Frobenius norms.

fn herm_to_reals(m: &CMat) -> Vec<f64> {
    let d = m.nrows();
    let mut x = Vec::with_capacity(d * d);
    for k in 0..d {
        x.push(m[(k, k)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for k in 0..d {
        for q in (k + 1)..d {
            x.push(s * m[(k, q)].re);
            x.push(s * m[(k, q)].im);
        }
    }
    x
}

fn reals_to_herm(x: &[f64], d: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for k in 0..d {
        m[(k, k)] = C64::new(x[k], 0.0);
    }
    let inv_s = std::f64::consts::FRAC_1_SQRT_2;
    let mut idx = d;
    for k in 0..d {
        for q in (k + 1)..d {
            let z = C64::new(x[idx] * inv_s, x[idx + 1] * inv_s);
            m[(k, q)] = z;
            m[(q, k)] = z.conj();
            idx += 2;
        }
    }
    m
}

/// Project a Hermitian operator onto the physical Choi space.
///
/// Already-physical inputs (at `skip_tol`) are passed through unchanged with
/// zero iterations. Hitting the iteration cap is not an error: the best
/// iterate is returned with `converged = false`.
pub fn project_to_choi_space(p: &ChoiOperator, opts: &ProjectionOptions) -> ProjectionResult {
    project_with_start(p, None, opts)
}

fn project_with_start(
    p: &ChoiOperator,
    y0: Option<&HermitianMatrix>,
    opts: &ProjectionOptions,
) -> ProjectionResult {
    let d = p.dim();
    let report = check_physical(p, opts.skip_tol);
    if report.is_physical {
        let y = HermitianMatrix::zeros(d);
        let (objective, grad) = objective_and_gradient(y.matrix(), p);
        let gradient_norm = frobenius_norm(&grad);
        return ProjectionResult {
            projected: p.clone(),
            delta: HermitianMatrix::zeros(d * d),
            delta_norm: 0.0,
            dual: DualState {
                y,
                objective,
                gradient_norm,
                iterations: 0,
            },
            converged: true,
        };
    }

    let x0 = match y0 {
        Some(y) => herm_to_reals(y.matrix()),
        None => vec![0.0; d * d],
    };
    let outcome = optim::minimize(
        |x: &[f64]| {
            let y = reals_to_herm(x, d);
            let (value, grad) = objective_and_gradient(&y, p);
            (value, herm_to_reals(&grad))
        },
        x0,
        &LbfgsOptions {
            gradient_tol: opts.gradient_tol,
            max_iterations: opts.max_iterations,
            ..Default::default()
        },
    );

    let ybar = HermitianMatrix::symmetrize(reals_to_herm(&outcome.x, d)).0;
    let shifted = HermitianMatrix::symmetrize(
        p.matrix() + kron(&CMat::identity(d, d), ybar.matrix()),
    )
    .0;
    let projected_mat = psd_project(&shifted).into_matrix();
    let projected = ChoiOperator::new(d, projected_mat).expect("shape preserved");
    let delta = HermitianMatrix::symmetrize(projected.matrix() - p.matrix()).0;
    let delta_norm = frobenius_norm(delta.matrix());
    ProjectionResult {
        projected,
        delta,
        delta_norm,
        dual: DualState {
            y: ybar,
            objective: outcome.value,
            gradient_norm: outcome.gradient_norm,
            iterations: outcome.iterations,
        },
        converged: outcome.converged,
    }
}

/// Frobenius projection onto the trace-preservation affine set
/// {X : Tr_1 X = 1/d}.
fn tp_affine_project(m: &CMat, d: usize) -> CMat {
    let excess = partial_trace_first(m, d, d).expect("square product space")
        - CMat::identity(d, d) / C64::new(d as f64, 0.0);
    m - kron(&CMat::identity(d, d), &excess) / C64::new(d as f64, 0.0)
}

/// Dykstra-corrected alternating projections between the PSD cone and the
/// trace-preservation affine set. Converges to the same best approximation
/// as the dual method; kept as an independent cross-check.
pub fn dykstra_project(p: &ChoiOperator, max_sweeps: usize, tol: f64) -> DykstraOutcome {
    let d = p.dim();
    let mut x = p.matrix().clone();
    let mut p_inc = CMat::zeros(d * d, d * d);
    let mut q_inc = CMat::zeros(d * d, d * d);
    let mut converged = false;
    let mut sweeps = 0;
    for sweep in 1..=max_sweeps {
        sweeps = sweep;
        let y = psd_project(&HermitianMatrix::symmetrize(&x + &p_inc).0).into_matrix();
        p_inc = &x + &p_inc - &y;
        let z = tp_affine_project(&(&y + &q_inc), d);
        q_inc = &y + &q_inc - &z;
        let gap = frobenius_norm(&(&z - &y));
        let step = frobenius_norm(&(&z - &x));
        x = z;
        if gap.max(step) <= tol {
            converged = true;
            break;
        }
    }
    DykstraOutcome {
        projected: ChoiOperator::new(d, x).expect("shape preserved"),
        converged,
        sweeps,
    }
}

/// Project every Choi operator of a trajectory. Steps that already pass the
/// physicality check are passed through untouched; per-step non-convergence
/// is surfaced in the results without aborting the batch.
pub fn regularize_trajectory(
    chois: &[ChoiOperator],
    opts: &ProjectionOptions,
) -> Vec<ProjectionResult> {
    let mut results = Vec::with_capacity(chois.len());
    let mut prev_y: Option<HermitianMatrix> = None;
    for p in chois {
        let result = project_with_start(p, if opts.warm_start { prev_y.as_ref() } else { None }, opts);
        if opts.warm_start && result.dual.iterations > 0 {
            prev_y = Some(result.dual.y.clone());
        }
        results.push(result);
    }
    results
}
