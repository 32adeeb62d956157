//! Closed-form qubit amplitude-damping benchmarks (exact, Born, Redfield)
//! with their Choi operators, and the spin-boson model assembly feeding the
//! Redfield engine.
//!
//! The damping family is parametrized by a population coefficient A(t) and a
//! coherence coefficient B(t):
//!
//! > ρ00(t) = ρ00(0) A + 1 - A,  ρ01(t) = ρ01(0) B e^{iωt},  ρ11(t) = ρ11(0) A,
//!
//! and every variant is a choice of (A, B) built from
//! G(α, t) = e^{-μt/2} [cosh(αt/2) + (μ/α) sinh(αt/2)].

use crate::choi::ChoiOperator;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64, HermitianMatrix};
use crate::redfield::{
    BathSpec, ExponentialCorrelation, RedfieldGenerator, SystemSpec,
};

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ],
    )
}

/// Projector |i><i| on the computational basis.
pub fn computational_projector(dim: usize, i: usize) -> HermitianMatrix {
    assert!(i < dim);
    let mut m = CMat::zeros(dim, dim);
    m[(i, i)] = C64::new(1.0, 0.0);
    HermitianMatrix::new(m).expect("projector is Hermitian")
}

/// Coupling rate γ, spectral width μ and qubit frequency ω of the damping
/// model. The dimensionless ratio r = γ/(2μ) controls weak-coupling accuracy
/// and the non-Markovianity thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeDampingParams {
    pub gamma: f64,
    pub mu: f64,
    pub omega: f64,
}

impl AmplitudeDampingParams {
    pub fn new(gamma: f64, mu: f64, omega: f64) -> Result<Self> {
        if gamma <= 0.0 || mu <= 0.0 || omega <= 0.0 {
            return Err(Error::Parameter(format!(
                "damping parameters must be positive: gamma={gamma}, mu={mu}, omega={omega}"
            )));
        }
        Ok(Self { gamma, mu, omega })
    }

    /// r = γ/(2μ) = τ_E / τ_SE.
    pub fn coupling_ratio(&self) -> f64 {
        self.gamma / (2.0 * self.mu)
    }

    /// Environment correlation time τ_E = 1/μ.
    pub fn environment_correlation_time(&self) -> f64 {
        1.0 / self.mu
    }

    /// Fastest system-evolution time τ_SE = 2/γ.
    pub fn system_evolution_time(&self) -> f64 {
        2.0 / self.gamma
    }
}

/// Which solution of the damping model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdKind {
    Exact,
    Born,
    RedfieldTd,
    RedfieldTi,
}

/// G(α, t) = e^{-μt/2} [cosh(αt/2) + (μ/α) sinh(αt/2)], analytic in α², so a
/// single complex branch covers both the overdamped (real α) and oscillatory
/// (imaginary α) regimes. The α -> 0 limit is e^{-μt/2}(1 + μt/2).
pub fn g_function(alpha: C64, mu: f64, t: f64) -> C64 {
    let envelope = C64::new((-0.5 * mu * t).exp(), 0.0);
    let x = alpha * (0.5 * t);
    if alpha.norm() < 1e-7 {
        // sinh(x)/α = (t/2)(1 + x²/6 + ...)
        let sinhc = C64::new(0.5 * t, 0.0) * (C64::new(1.0, 0.0) + x * x / 6.0);
        return envelope * (x.cosh() + sinhc * mu);
    }
    envelope * (x.cosh() + x.sinh() * (mu / alpha))
}

/// One solution of the damping model: coefficient functions A(t), B(t).
#[derive(Debug, Clone, Copy)]
pub struct AdSolution {
    kind: AdKind,
    params: AmplitudeDampingParams,
}

/// Closed-form solution selector for the damping model.
pub fn ad_solution(kind: AdKind, params: AmplitudeDampingParams) -> AdSolution {
    AdSolution { kind, params }
}

impl AdSolution {
    pub fn kind(&self) -> AdKind {
        self.kind
    }

    pub fn params(&self) -> &AmplitudeDampingParams {
        &self.params
    }

    fn alpha_exact(&self) -> C64 {
        let AmplitudeDampingParams { gamma, mu, .. } = self.params;
        C64::new(mu * mu - 2.0 * gamma * mu, 0.0).sqrt()
    }

    fn alpha_born(&self) -> C64 {
        let AmplitudeDampingParams { gamma, mu, .. } = self.params;
        C64::new(mu * mu - 4.0 * gamma * mu, 0.0).sqrt()
    }

    /// Accumulated decay exponent R(t) of the Redfield variants.
    pub fn decay_exponent(&self, t: f64) -> f64 {
        let AmplitudeDampingParams { gamma, mu, .. } = self.params;
        match self.kind {
            AdKind::RedfieldTd => gamma * (t + ((-mu * t).exp() - 1.0) / mu),
            AdKind::RedfieldTi => gamma * t,
            _ => panic!("decay exponent only defined for the Redfield variants"),
        }
    }

    /// Population coefficient A(t).
    pub fn population_coefficient(&self, t: f64) -> f64 {
        let mu = self.params.mu;
        match self.kind {
            AdKind::Exact => g_function(self.alpha_exact(), mu, t).norm_sqr(),
            AdKind::Born => g_function(self.alpha_born(), mu, t).re,
            AdKind::RedfieldTd | AdKind::RedfieldTi => (-self.decay_exponent(t)).exp(),
        }
    }

    /// Coherence coefficient B(t).
    pub fn coherence_coefficient(&self, t: f64) -> f64 {
        let mu = self.params.mu;
        match self.kind {
            AdKind::Exact | AdKind::Born => g_function(self.alpha_exact(), mu, t).re,
            AdKind::RedfieldTd | AdKind::RedfieldTi => (-0.5 * self.decay_exponent(t)).exp(),
        }
    }
}

/// The 4x4 Choi operator of the damping family at time t:
///
/// ```text
///        1/2 [ 1              0      0   B e^{iωt} ]
///            [ 0            1 - A    0       0     ]
///            [ 0              0      0       0     ]
///            [ B e^{-iωt}     0      0       A     ]
/// ```
///
/// Its partial trace over the first factor is 1/2 for every (A, B), and its
/// eigenvalues are {0, (1-A)/2, [1 + A ± sqrt((1-A)² + 4B²)]/4}; the map is
/// physical exactly when B² <= A.
pub fn ad_choi(sol: &AdSolution, omega: f64, t: f64) -> ChoiOperator {
    let a = sol.population_coefficient(t);
    let b = sol.coherence_coefficient(t);
    let phase = C64::from_polar(1.0, omega * t) * (0.5 * b);
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(0, 3)] = phase;
    m[(3, 0)] = phase.conj();
    m[(1, 1)] = C64::new(0.5 * (1.0 - a), 0.0);
    m[(3, 3)] = C64::new(0.5 * a, 0.0);
    ChoiOperator::new(2, m).expect("damping Choi is 4x4 Hermitian")
}

/// Closed-form distinguishability of two qubit states under the damping map:
/// sqrt(|ρ11 - σ11|² A² + |ρ01 - σ01|² B²).
pub fn ad_distinguishability(
    sol: &AdSolution,
    rho: &HermitianMatrix,
    sigma: &HermitianMatrix,
    t: f64,
) -> Result<f64> {
    if rho.dim() != 2 || sigma.dim() != 2 {
        return Err(Error::Dimension(
            "closed-form distinguishability is a qubit formula".into(),
        ));
    }
    let a = sol.population_coefficient(t);
    let b = sol.coherence_coefficient(t);
    let dpop = (rho.matrix()[(1, 1)] - sigma.matrix()[(1, 1)]).norm();
    let dcoh = (rho.matrix()[(0, 1)] - sigma.matrix()[(0, 1)]).norm();
    Ok((dpop * dpop * a * a + dcoh * dcoh * b * b).sqrt())
}

/// Markovianity verdict for a solution kind, by the closed-form thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct BlpClassification {
    pub markovian: bool,
    pub threshold_note: String,
}

/// Exact dynamics turns non-Markovian at r > 1/4 (μ < 2γ), the Born solution
/// at r > 1/8 (μ < 4γ); the Redfield variants have monotone A(t) for every
/// parameter choice.
pub fn blp_classifier(kind: AdKind, params: &AmplitudeDampingParams) -> BlpClassification {
    let r = params.coupling_ratio();
    match kind {
        AdKind::Exact => BlpClassification {
            markovian: r <= 0.25,
            threshold_note: format!("exact: non-Markovian iff r = {r:.4} > 1/4"),
        },
        AdKind::Born => BlpClassification {
            markovian: r <= 0.125,
            threshold_note: format!("born: non-Markovian iff r = {r:.4} > 1/8"),
        },
        AdKind::RedfieldTd | AdKind::RedfieldTi => BlpClassification {
            markovian: true,
            threshold_note: "redfield: dA/dt = -γ e^{-R}(1 - e^{-μt}) <= 0 always".into(),
        },
    }
}

/// Spin-boson model: H_S = (ε/2)σz + (δ/2)σx coupled through σz to a bath
/// with exponential correlation (γ, μ, ω₀).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinBosonParams {
    pub epsilon: f64,
    pub delta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub omega0: f64,
}

impl SpinBosonParams {
    pub fn validate(&self) -> Result<()> {
        if self.mu <= 0.0 {
            return Err(Error::Parameter(format!(
                "spectral width must be positive, got {}",
                self.mu
            )));
        }
        if self.gamma < 0.0 {
            return Err(Error::Parameter(format!(
                "coupling rate must be nonnegative, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Assemble the spin-boson Redfield generator. The σz coupling is rotated
/// into the eigenbasis of H_S at construction; the eigenvalues split as
/// ±sqrt(ε² + δ²)/2.
pub fn spin_boson_assemble(
    params: &SpinBosonParams,
    time_dependent: bool,
) -> Result<RedfieldGenerator> {
    params.validate()?;
    let h = HermitianMatrix::new(
        pauli_z() * C64::new(0.5 * params.epsilon, 0.0)
            + pauli_x() * C64::new(0.5 * params.delta, 0.0),
    )?;
    let system = SystemSpec::new(h, vec![pauli_z()])?;
    let bath = BathSpec::exponential(params.gamma, params.mu, params.omega0);
    RedfieldGenerator::new(system, bath, time_dependent)
}

/// The damping model as a Redfield engine input: rotating-wave couplings
/// σ⁻, σ⁺ with the single nonvanishing correlation pairing σ⁻ with itself
/// (vacuum bath), resonant at the qubit frequency.
pub fn rwa_qubit_assemble(
    params: &AmplitudeDampingParams,
    time_dependent: bool,
) -> Result<RedfieldGenerator> {
    let mut h = CMat::zeros(2, 2);
    h[(1, 1)] = C64::new(params.omega, 0.0);
    let mut lower = CMat::zeros(2, 2);
    lower[(0, 1)] = C64::new(1.0, 0.0);
    let system = SystemSpec::new(HermitianMatrix::new(h)?, vec![lower.clone(), lower.adjoint()])?;
    let bath = BathSpec::single_exponential_entry(
        2,
        0,
        0,
        ExponentialCorrelation {
            gamma: params.gamma,
            mu: params.mu,
            omega0: params.omega,
        },
    )?;
    RedfieldGenerator::new(system, bath, time_dependent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::{apply_choi, check_physical};
    use crate::linalg::trace_norm;
    use crate::ode::integrate_on_grid;
    use crate::random::random_density;
    use crate::testkit::c;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn params(gamma: f64, mu: f64) -> AmplitudeDampingParams {
        AmplitudeDampingParams::new(gamma, mu, 1.0).unwrap()
    }

    #[test]
    fn derived_timescales() {
        let p = params(1.0, 5.0);
        assert_relative_eq!(p.coupling_ratio(), 0.1);
        assert_relative_eq!(
            p.coupling_ratio(),
            p.environment_correlation_time() / p.system_evolution_time()
        );
        assert!(AmplitudeDampingParams::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn g_function_examples() {
        for alpha in [c(2.0, 0.0), c(0.0, 3.0), c(1.0, 0.0)] {
            assert!((g_function(alpha, 5.0, 0.0) - c(1.0, 0.0)).norm() < 1e-15);
        }

        // α -> 0 limit
        let small = g_function(c(1e-9, 0.0), 2.0, 1.3);
        let limit = (-1.3f64).exp() * (1.0 + 1.3);
        assert!((small.re - limit).abs() < 1e-12);

        // γ=1, μ=5: G solves u'' + μ u' + (γμ/2) u = 0, u(0)=1, u'(0)=0.
        // Frozen value from integrating that oscillator, cross-checked here.
        let alpha = c(15.0f64.sqrt(), 0.0);
        let got = g_function(alpha, 5.0, 1.0);
        let frozen = 0.650_304_548_282_080_3;
        assert_relative_eq!(got.re, frozen, epsilon = 1e-9);
        assert!(got.im.abs() < 1e-15);
        // the oracle: integrate (u, v)' = (v, -μv - (γμ/2)u)
        let grid = [0.0, 1.0];
        let sol = integrate_on_grid(
            |_t, y| {
                CMat::from_fn(2, 1, |i, _| {
                    if i == 0 {
                        y[(1, 0)]
                    } else {
                        -5.0 * y[(1, 0)] - 2.5 * y[(0, 0)]
                    }
                })
            },
            CMat::from_fn(2, 1, |i, _| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) }),
            &grid,
            &crate::ode::OdeOptions {
                rtol: 1e-12,
                atol: 1e-14,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((sol[1][(0, 0)].re - frozen).abs() < 1e-9);

        // μ < 2γ makes α imaginary and G oscillate: dG/dt changes sign
        let p = params(1.0, 1.0);
        let sol_exact = ad_solution(AdKind::Exact, p);
        let alpha = sol_exact.alpha_exact();
        assert!(alpha.re.abs() < 1e-12 && alpha.im > 0.0);
        let mut signs = Vec::new();
        let mut prev = g_function(alpha, 1.0, 0.0).re;
        for i in 1..=1000 {
            let t = i as f64 * 0.01;
            let cur = g_function(alpha, 1.0, t).re;
            signs.push((cur - prev).signum());
            prev = cur;
        }
        assert!(signs.iter().any(|&s| s > 0.0) && signs.iter().any(|&s| s < 0.0));
    }

    #[test]
    fn solutions_start_at_identity() {
        let p = params(1.0, 2.0);
        for kind in [AdKind::Exact, AdKind::Born, AdKind::RedfieldTd, AdKind::RedfieldTi] {
            let s = ad_solution(kind, p);
            assert_relative_eq!(s.population_coefficient(0.0), 1.0, epsilon = 1e-14);
            assert_relative_eq!(s.coherence_coefficient(0.0), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn redfield_solution_closed_form() {
        let p = params(1.0, 5.0);
        let s = ad_solution(AdKind::RedfieldTd, p);
        for t in [0.3f64, 1.0, 4.0] {
            let r = t + ((-5.0 * t).exp() - 1.0) / 5.0;
            assert_relative_eq!(s.population_coefficient(t), (-r).exp(), epsilon = 1e-14);
            assert_relative_eq!(s.coherence_coefficient(t), (-r / 2.0).exp(), epsilon = 1e-14);
        }
        let s = ad_solution(AdKind::RedfieldTi, p);
        assert_relative_eq!(s.population_coefficient(2.0), (-2.0f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn born_develops_cpt_violation_at_strong_coupling() {
        // γ = μ = 1: Born's α' = i sqrt(3); A oscillates and crosses below B²
        let p = params(1.0, 1.0);
        let s = ad_solution(AdKind::Born, p);
        assert!(s.alpha_born().re.abs() < 1e-12);
        assert_relative_eq!(s.alpha_born().im, 3.0f64.sqrt(), epsilon = 1e-12);
        let mut violated = false;
        let mut negative_a = false;
        for i in 0..=1000 {
            let t = i as f64 * 0.01;
            let a = s.population_coefficient(t);
            let b = s.coherence_coefficient(t);
            violated |= b * b > a + 1e-12;
            negative_a |= a < 0.0;
        }
        assert!(violated, "no CPT violation found");
        assert!(negative_a, "Born population coefficient should dip below zero");
    }

    #[test]
    fn amplitude_damping_structure_for_cp_kinds() {
        // B² = A identically for the exact and Redfield solutions
        let p = params(0.8, 1.7);
        for kind in [AdKind::Exact, AdKind::RedfieldTd, AdKind::RedfieldTi] {
            let s = ad_solution(kind, p);
            for i in 0..=50 {
                let t = i as f64 * 0.2;
                let a = s.population_coefficient(t);
                let b = s.coherence_coefficient(t);
                assert!(
                    (b * b - a).abs() < 1e-12,
                    "{kind:?} at t={t}: B²={} A={}",
                    b * b,
                    a
                );
            }
        }
    }

    #[test]
    fn ad_choi_examples() {
        let p = params(1.0, 5.0);
        let s = ad_solution(AdKind::Exact, p);

        // t = 0 is the identity channel
        let j0 = ad_choi(&s, p.omega, 0.0);
        assert!((j0.matrix() - ChoiOperator::identity_channel(2).matrix()).norm() < 1e-14);

        // exact solution stays physical at all times and parameters
        for (gamma, mu) in [(1.0, 5.0), (1.0, 1.0), (2.0, 0.3)] {
            let s = ad_solution(AdKind::Exact, params(gamma, mu));
            for i in 0..=100 {
                let t = i as f64 * 0.1;
                let j = ad_choi(&s, 1.0, t);
                assert!(
                    j.min_eigenvalue() >= -1e-12,
                    "γ={gamma} μ={mu} t={t}: {}",
                    j.min_eigenvalue()
                );
            }
        }

        // partial trace over the first factor is 1/2 for every (A, B)
        let s = ad_solution(AdKind::Born, params(1.0, 1.0));
        for i in 0..=20 {
            let j = ad_choi(&s, 1.0, i as f64 * 0.5);
            let report = check_physical(&j, 1e-9);
            assert!(report.tp_deviation < 1e-14);
        }

        // eigenvalues follow the closed form
        let s = ad_solution(AdKind::Born, params(1.0, 1.0));
        let t = 1.7;
        let a = s.population_coefficient(t);
        let b = s.coherence_coefficient(t);
        let j = ad_choi(&s, 1.0, t);
        let eigs = j.as_hermitian().eigs().eigenvalues;
        let mut want = vec![
            0.0,
            0.5 * (1.0 - a),
            0.25 * (1.0 + a + ((1.0 - a).powi(2) + 4.0 * b * b).sqrt()),
            0.25 * (1.0 + a - ((1.0 - a).powi(2) + 4.0 * b * b).sqrt()),
        ];
        want.sort_by(f64::total_cmp);
        for (g, w) in eigs.iter().zip(&want) {
            assert_relative_eq!(g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn dephasing_limit_choi() {
        // A = 1, B = 0 gives diag(1/2, 0, 0, 1/2); realized at large t by a
        // pure-dephasing coefficient pair, constructed here directly
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = c(0.5, 0.0);
        m[(3, 3)] = c(0.5, 0.0);
        let j = ChoiOperator::new(2, m).unwrap();
        assert!(check_physical(&j, 1e-9).is_physical);
    }

    #[test]
    fn choi_reproduces_componentwise_map() {
        let p = params(0.7, 2.2);
        let s = ad_solution(AdKind::Exact, p);
        let mut rng = ChaCha12Rng::seed_from_u64(211);
        for i in 0..10 {
            let t = 0.3 * i as f64;
            let a = s.population_coefficient(t);
            let b = s.coherence_coefficient(t);
            let j = ad_choi(&s, p.omega, t);
            let rho = random_density(2, &mut rng);
            let out = apply_choi(&j, &rho).unwrap();
            let phase = C64::from_polar(1.0, p.omega * t);
            // on unit-trace inputs: ρ00' = ρ00 + (1-A) ρ11
            let want00 = rho.matrix()[(0, 0)] + rho.matrix()[(1, 1)] * (1.0 - a);
            assert!((out.matrix()[(0, 0)] - want00).norm() < 1e-12);
            assert!((out.matrix()[(1, 1)] - rho.matrix()[(1, 1)] * a).norm() < 1e-12);
            assert!((out.matrix()[(0, 1)] - rho.matrix()[(0, 1)] * b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn distinguishability_examples() {
        let p = params(1.0, 5.0);
        let s = ad_solution(AdKind::Exact, p);
        let ground = computational_projector(2, 0);
        let excited = computational_projector(2, 1);

        assert_eq!(ad_distinguishability(&s, &ground, &ground, 1.0).unwrap(), 0.0);

        // |0><0| vs |1><1| reduces to A(t)
        for t in [0.2, 1.0, 3.0] {
            assert_relative_eq!(
                ad_distinguishability(&s, &ground, &excited, t).unwrap(),
                s.population_coefficient(t),
                epsilon = 1e-14
            );
        }

        // generic states: matches the trace-norm route through the Choi map
        let mut rng = ChaCha12Rng::seed_from_u64(223);
        for i in 0..8 {
            let t = 0.4 * i as f64;
            let rho = random_density(2, &mut rng);
            let sigma = random_density(2, &mut rng);
            let closed = ad_distinguishability(&s, &rho, &sigma, t).unwrap();
            let j = ad_choi(&s, p.omega, t);
            let mapped_rho = apply_choi(&j, &rho).unwrap();
            let mapped_sigma = apply_choi(&j, &sigma).unwrap();
            let via_trace =
                0.5 * trace_norm(&(mapped_rho.matrix() - mapped_sigma.matrix())).unwrap();
            assert!(
                (closed - via_trace).abs() < 1e-10,
                "t={t}: closed {closed} vs trace-norm {via_trace}"
            );
        }
    }

    #[test]
    fn blp_classifier_thresholds() {
        // r = 0.1: everything Markovian
        assert!(blp_classifier(AdKind::Exact, &params(1.0, 5.0)).markovian);
        // r = 0.5: exact non-Markovian
        assert!(!blp_classifier(AdKind::Exact, &params(1.0, 1.0)).markovian);
        // r = 0.25: exact at threshold stays Markovian, Born does not
        assert!(blp_classifier(AdKind::Exact, &params(1.0, 2.0)).markovian);
        assert!(!blp_classifier(AdKind::Born, &params(1.0, 2.0)).markovian);
        // Redfield is Markovian for every parameter choice
        for (g, m) in [(1.0, 5.0), (1.0, 1.0), (3.0, 0.2)] {
            assert!(blp_classifier(AdKind::RedfieldTd, &params(g, m)).markovian);
        }

        // numerical cross-check: sign of dA/dt
        for (kind, p, expect_monotone) in [
            (AdKind::Exact, params(1.0, 5.0), true),
            (AdKind::Exact, params(1.0, 1.0), false),
            (AdKind::Born, params(1.0, 2.0), false),
            (AdKind::RedfieldTd, params(1.0, 1.0), true),
        ] {
            let s = ad_solution(kind, p);
            let mut grows = false;
            for i in 0..2000 {
                let t0 = i as f64 * 0.005;
                let t1 = t0 + 0.005;
                // |A| is the distinguishability of the basis projectors
                if s.population_coefficient(t1).abs() > s.population_coefficient(t0).abs() + 1e-12 {
                    grows = true;
                    break;
                }
            }
            assert_eq!(
                !grows, expect_monotone,
                "{kind:?} γ={} μ={}",
                p.gamma, p.mu
            );
        }
    }

    #[test]
    fn spin_boson_assembly() {
        let p = SpinBosonParams {
            epsilon: 1.0,
            delta: 0.7,
            gamma: 1.5,
            mu: 0.1,
            omega0: 1.0,
        };
        let gen = spin_boson_assemble(&p, true).unwrap();
        let energies = gen.system().energies();
        let gap = energies[1] - energies[0];
        assert_relative_eq!(gap, 1.49f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(energies[0], -0.5 * 1.49f64.sqrt(), epsilon = 1e-12);

        // δ = 0: the coupling keeps the pure-dephasing structure (diagonal ±1)
        let p0 = SpinBosonParams { delta: 0.0, ..p };
        let gen = spin_boson_assemble(&p0, true).unwrap();
        let l = &gen.system().couplings()[0];
        assert!(l[(0, 1)].norm() < 1e-12 && l[(1, 0)].norm() < 1e-12);
        assert_relative_eq!(l[(0, 0)].norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(l[(1, 1)].norm(), 1.0, epsilon = 1e-12);
        assert!((l[(0, 0)] + l[(1, 1)]).norm() < 1e-12, "traceless");

        assert!(SpinBosonParams { mu: 0.0, ..p }.validate().is_err());
    }
}
