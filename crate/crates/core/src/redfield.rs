//! Kossakowski-form Redfield generator: build the Kossakowski matrix χ(t)
//! and Lamb-shift coefficients from bath half-Fourier transforms, vectorize
//! the master equation into a d² x d² generator, and integrate states and
//! propagators. See Breuer & Petruccione, "The Theory of Open Quantum
//! Systems" (2002) for the underlying weak-coupling derivation.
//!
//! All assembly happens in the eigenbasis of the system Hamiltonian, where
//! the Schrödinger-picture equation carries no explicit oscillating factors;
//! inputs are rotated in at construction and results rotated back on output.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use crate::choi::SuperOperator;
use crate::error::{Error, Result};
use crate::linalg::{kron, psd_project, CMat, C64, HermitianMatrix};
use crate::ode::{integrate_on_grid, OdeOptions};
use crate::quad::integrate_complex;

/// Quadrature target for numerically-defined bath correlation entries.
const QUAD_TOL: f64 = 1e-10;
/// Trace / hermiticity drift allowed in integrated states.
const EVOLUTION_TOL: f64 = 1e-8;
/// Density-matrix validation tolerance for initial states.
const DENSITY_TOL: f64 = 1e-8;

/// System side of the model: Hamiltonian plus coupling operators.
///
/// The Hamiltonian is diagonalized once; coupling operators handed in are
/// rotated into the eigenbasis and stored there.
#[derive(Clone)]
pub struct SystemSpec {
    hamiltonian: HermitianMatrix,
    energies: Vec<f64>,
    basis: CMat,
    basis_superop: CMat,
    couplings: Vec<CMat>,
}

impl SystemSpec {
    pub fn new(hamiltonian: HermitianMatrix, couplings: Vec<CMat>) -> Result<Self> {
        let d = hamiltonian.dim();
        for (i, l) in couplings.iter().enumerate() {
            if l.nrows() != d || l.ncols() != d {
                return Err(Error::Dimension(format!(
                    "coupling operator {} is {}x{}, expected {}x{}",
                    i,
                    l.nrows(),
                    l.ncols(),
                    d,
                    d
                )));
            }
        }
        let eig = hermitian_reconstruction_checked(&hamiltonian)?;
        let basis = eig.eigenvectors;
        let rotated: Vec<CMat> = couplings
            .iter()
            .map(|l| basis.adjoint() * l * &basis)
            .collect();
        let basis_superop = kron(&basis, &basis.map(|z| z.conj()));
        Ok(Self {
            hamiltonian,
            energies: eig.eigenvalues,
            basis,
            basis_superop,
            couplings: rotated,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &HermitianMatrix {
        &self.hamiltonian
    }

    /// Eigenvalues of the Hamiltonian, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Columns are the eigenvectors, in the order of [`Self::energies`].
    pub fn eigenvectors(&self) -> &CMat {
        &self.basis
    }

    /// Coupling operators expressed in the eigenbasis.
    pub fn couplings(&self) -> &[CMat] {
        &self.couplings
    }

    /// Bohr transition frequency ω_kq = ω_q - ω_k.
    pub fn bohr_frequency(&self, k: usize, q: usize) -> f64 {
        self.energies[q] - self.energies[k]
    }

    pub fn to_eigenbasis(&self, m: &CMat) -> CMat {
        self.basis.adjoint() * m * &self.basis
    }

    pub fn from_eigenbasis(&self, m: &CMat) -> CMat {
        &self.basis * m * self.basis.adjoint()
    }

    /// Rotate a vec-basis superoperator from the eigenbasis back to the
    /// original basis: S -> (V ⊗ V̄) S (V ⊗ V̄)†.
    fn superop_from_eigenbasis(&self, m: &CMat) -> CMat {
        &self.basis_superop * m * self.basis_superop.adjoint()
    }
}

fn hermitian_reconstruction_checked(
    h: &HermitianMatrix,
) -> Result<crate::linalg::EigenDecomposition> {
    let eig = h.eigs();
    let resid = (eig.reconstruct() - h.matrix()).norm();
    let scale = h.matrix().norm().max(1.0);
    if resid > 1e-10 * scale {
        return Err(Error::Parameter(format!(
            "Hamiltonian eigendecomposition residual {resid:.3e} too large"
        )));
    }
    Ok(eig)
}

/// Analytic exponentially-decaying correlation
/// c(τ) = (γ μ / 2) e^{-μ|τ|} e^{-i ω₀ τ}, a Lorentzian spectral density
/// centred at the resonance frequency ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialCorrelation {
    pub gamma: f64,
    pub mu: f64,
    pub omega0: f64,
}

impl ExponentialCorrelation {
    pub fn correlation(&self, tau: f64) -> C64 {
        let envelope = 0.5 * self.gamma * self.mu * (-self.mu * tau.abs()).exp();
        C64::from_polar(envelope, -self.omega0 * tau)
    }

    /// Closed-form half Fourier transform
    /// F(ω, t) = (γμ/2) (1 - e^{-(μ - iΔ) t}) / (μ - iΔ), Δ = ω - ω₀;
    /// the t -> ∞ limit drops the exponential.
    pub fn half_fourier(&self, omega: f64, t: f64) -> C64 {
        let delta = omega - self.omega0;
        let denom = C64::new(self.mu, -delta);
        let amp = C64::new(0.5 * self.gamma * self.mu, 0.0);
        if t.is_infinite() {
            amp / denom
        } else {
            let decay = (-denom * t).exp();
            amp * (C64::new(1.0, 0.0) - decay) / denom
        }
    }
}

type CorrelationFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;
type HalfFourierInfFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// One entry c_{αβ}(τ) of the bath correlation matrix.
#[derive(Clone)]
pub enum CorrelationEntry {
    Zero,
    Exponential(ExponentialCorrelation),
    /// Correlation given numerically; the half Fourier transform is computed
    /// by adaptive quadrature. A closed-form t -> ∞ limit may be supplied;
    /// without one the time-independent variant is refused rather than
    /// attempting an open-ended oscillatory integral.
    Numerical {
        correlation: CorrelationFn,
        half_fourier_at_infinity: Option<HalfFourierInfFn>,
    },
}

/// Bath correlation matrix c_{αβ}(τ) together with its half Fourier
/// transforms F_{αβ}(ω, t) = ∫_0^t c_{αβ}(τ) e^{iωτ} dτ.
pub struct BathSpec {
    ops: usize,
    entries: Vec<CorrelationEntry>,
    // incremental quadrature anchors per (entry, ω): F(ω, t2) extends F(ω, t1)
    anchors: Mutex<HashMap<(usize, u64), BTreeMap<u64, C64>>>,
}

impl BathSpec {
    pub fn from_entries(ops: usize, entries: Vec<CorrelationEntry>) -> Result<Self> {
        if entries.len() != ops * ops {
            return Err(Error::Dimension(format!(
                "bath with {} operators needs {} correlation entries, got {}",
                ops,
                ops * ops,
                entries.len()
            )));
        }
        Ok(Self {
            ops,
            entries,
            anchors: Mutex::new(HashMap::new()),
        })
    }

    /// Single coupling operator with the analytic exponential correlation.
    pub fn exponential(gamma: f64, mu: f64, omega0: f64) -> Self {
        Self::from_entries(
            1,
            vec![CorrelationEntry::Exponential(ExponentialCorrelation {
                gamma,
                mu,
                omega0,
            })],
        )
        .expect("1x1 entry list")
    }

    /// All entries zero except one, carrying the exponential correlation.
    pub fn single_exponential_entry(
        ops: usize,
        row: usize,
        col: usize,
        tag: ExponentialCorrelation,
    ) -> Result<Self> {
        if row >= ops || col >= ops {
            return Err(Error::Dimension(format!(
                "entry ({row},{col}) outside {ops}x{ops} correlation matrix"
            )));
        }
        let mut entries = vec![CorrelationEntry::Zero; ops * ops];
        entries[row * ops + col] = CorrelationEntry::Exponential(tag);
        Self::from_entries(ops, entries)
    }

    pub fn operator_count(&self) -> usize {
        self.ops
    }

    /// True when every entry has a usable t -> ∞ half Fourier transform.
    pub fn supports_infinite_time(&self) -> bool {
        self.entries.iter().all(|e| match e {
            CorrelationEntry::Zero | CorrelationEntry::Exponential(_) => true,
            CorrelationEntry::Numerical {
                half_fourier_at_infinity,
                ..
            } => half_fourier_at_infinity.is_some(),
        })
    }

    /// Correlation matrix c(τ).
    pub fn correlation(&self, tau: f64) -> CMat {
        CMat::from_fn(self.ops, self.ops, |a, b| {
            match &self.entries[a * self.ops + b] {
                CorrelationEntry::Zero => C64::new(0.0, 0.0),
                CorrelationEntry::Exponential(tag) => tag.correlation(tau),
                CorrelationEntry::Numerical { correlation, .. } => correlation(tau),
            }
        })
    }

    /// Half Fourier matrix F(ω, t); `t` may be `f64::INFINITY` for the
    /// time-independent variant.
    pub fn half_fourier(&self, omega: f64, t: f64) -> Result<CMat> {
        if t < 0.0 {
            return Err(Error::Parameter(format!(
                "half Fourier transform needs t >= 0, got {t}"
            )));
        }
        let mut out = CMat::zeros(self.ops, self.ops);
        for a in 0..self.ops {
            for b in 0..self.ops {
                out[(a, b)] = self.entry_half_fourier(a * self.ops + b, omega, t)?;
            }
        }
        Ok(out)
    }

    fn entry_half_fourier(&self, idx: usize, omega: f64, t: f64) -> Result<C64> {
        match &self.entries[idx] {
            CorrelationEntry::Zero => Ok(C64::new(0.0, 0.0)),
            CorrelationEntry::Exponential(tag) => Ok(tag.half_fourier(omega, t)),
            CorrelationEntry::Numerical {
                correlation,
                half_fourier_at_infinity,
            } => {
                if t.is_infinite() {
                    return match half_fourier_at_infinity {
                        Some(f) => Ok(f(omega)),
                        None => Err(Error::Quadrature(
                            "t -> ∞ half Fourier transform of a numerical correlation \
                             entry requires a closed-form limit"
                                .into(),
                        )),
                    };
                }
                if t == 0.0 {
                    return Ok(C64::new(0.0, 0.0));
                }
                let integrand = {
                    let correlation = Arc::clone(correlation);
                    move |tau: f64| correlation(tau) * C64::from_polar(1.0, omega * tau)
                };
                // integrate only the extension beyond the nearest cached anchor
                let mut anchors = self.anchors.lock().expect("anchor cache poisoned");
                let tree = anchors.entry((idx, omega.to_bits())).or_default();
                let (t_from, base) = tree
                    .range(..=t.to_bits())
                    .next_back()
                    .map(|(bits, val)| (f64::from_bits(*bits), *val))
                    .unwrap_or((0.0, C64::new(0.0, 0.0)));
                let value = base + integrate_complex(&integrand, t_from, t, QUAD_TOL)?;
                tree.insert(t.to_bits(), value);
                Ok(value)
            }
        }
    }
}

/// Which generator to use when evolving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorMode {
    /// The Redfield generator as derived.
    Raw,
    /// Kossakowski matrix replaced by its nearest PSD matrix at every time;
    /// the resulting dynamics is completely positive and CP-divisible by
    /// construction, i.e. forced Markovian.
    KossakowskiRegularized,
}

impl GeneratorMode {
    fn key(self) -> u8 {
        match self {
            GeneratorMode::Raw => 0,
            GeneratorMode::KossakowskiRegularized => 1,
        }
    }
}

/// One evaluation of the generator at a fixed time.
pub struct GeneratorEval {
    /// Kossakowski matrix χ(t) in composite (k,q) row-major indices
    /// (after PSD replacement when the mode asks for it).
    pub chi: CMat,
    /// Lamb-shift coefficient matrix η(t), same indexing.
    pub eta: CMat,
    /// h(t) = H_S + H_LS(t) in the eigenbasis.
    pub effective_hamiltonian: CMat,
    /// φ(t) = -i h(t) - χ̃(t)/2.
    pub phi: CMat,
    /// Vectorized generator in the eigenbasis.
    pub generator: CMat,
}

struct EvalCache {
    map: HashMap<(u8, u64), Arc<GeneratorEval>>,
    order: VecDeque<(u8, u64)>,
    cap: usize,
}

impl EvalCache {
    fn new(cap: usize) -> Self {
        Self {
            map: HashMap::new(),
            order: VecDeque::new(),
            cap,
        }
    }

    fn get(&self, key: (u8, u64)) -> Option<Arc<GeneratorEval>> {
        self.map.get(&key).cloned()
    }

    fn insert(&mut self, key: (u8, u64), value: Arc<GeneratorEval>) {
        if self.map.len() >= self.cap {
            if let Some(old) = self.order.pop_front() {
                self.map.remove(&old);
            }
        }
        if self.map.insert(key, value).is_none() {
            self.order.push_back(key);
        }
    }
}

/// Time-parametrized Redfield generator builder.
pub struct RedfieldGenerator {
    system: SystemSpec,
    bath: BathSpec,
    time_dependent: bool,
    cache: Mutex<EvalCache>,
}

impl RedfieldGenerator {
    pub fn new(system: SystemSpec, bath: BathSpec, time_dependent: bool) -> Result<Self> {
        if bath.operator_count() != system.couplings().len() {
            return Err(Error::Dimension(format!(
                "bath describes {} operators but the system has {} couplings",
                bath.operator_count(),
                system.couplings().len()
            )));
        }
        if !time_dependent && !bath.supports_infinite_time() {
            return Err(Error::Quadrature(
                "time-independent generator needs t -> ∞ half Fourier transforms; \
                 supply an analytic correlation or a closed-form limit"
                    .into(),
            ));
        }
        Ok(Self {
            system,
            bath,
            time_dependent,
            cache: Mutex::new(EvalCache::new(256)),
        })
    }

    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    fn eval_time(&self, t: f64) -> f64 {
        if self.time_dependent {
            t
        } else {
            f64::INFINITY
        }
    }

    fn eval(&self, t: f64, mode: GeneratorMode) -> Result<Arc<GeneratorEval>> {
        let te = self.eval_time(t);
        let key = (mode.key(), te.to_bits());
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(key) {
            return Ok(hit);
        }
        let eval = Arc::new(self.assemble(te, mode)?);
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(key, Arc::clone(&eval));
        Ok(eval)
    }

    fn assemble(&self, t: f64, mode: GeneratorMode) -> Result<GeneratorEval> {
        let d = self.system.dim();
        let couplings = self.system.couplings();
        let na = couplings.len();

        // F_{αβ}(ω_kq, t) per Bohr pair
        let mut f_by_pair = Vec::with_capacity(d * d);
        for k in 0..d {
            for q in 0..d {
                f_by_pair.push(self.bath.half_fourier(self.system.bohr_frequency(k, q), t)?);
            }
        }

        // χ_{kq,nm} = Σ_{αβ} [F_{αβ}(ω_kq) + F*_{βα}(ω_nm)] L_{β,kq} L*_{α,nm}
        // η_{kq,nm} = Σ_{αβ} [F_{αβ}(ω_kq) - F*_{βα}(ω_nm)] / 2i · L_{β,kq} L*_{α,nm}
        let dd = d * d;
        let mut chi = CMat::zeros(dd, dd);
        let mut eta = CMat::zeros(dd, dd);
        let two_i = C64::new(0.0, 2.0);
        for k in 0..d {
            for q in 0..d {
                let kq = k * d + q;
                for n in 0..d {
                    for m in 0..d {
                        let nm = n * d + m;
                        let mut chi_sum = C64::new(0.0, 0.0);
                        let mut eta_sum = C64::new(0.0, 0.0);
                        for alpha in 0..na {
                            let l_a = couplings[alpha][(n, m)].conj();
                            if l_a == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for beta in 0..na {
                                let l_b = couplings[beta][(k, q)];
                                if l_b == C64::new(0.0, 0.0) {
                                    continue;
                                }
                                let f_fwd = f_by_pair[kq][(alpha, beta)];
                                let f_bwd = f_by_pair[nm][(beta, alpha)].conj();
                                let weight = l_b * l_a;
                                chi_sum += (f_fwd + f_bwd) * weight;
                                eta_sum += (f_fwd - f_bwd) / two_i * weight;
                            }
                        }
                        chi[(kq, nm)] = chi_sum;
                        eta[(kq, nm)] = eta_sum;
                    }
                }
            }
        }
        let chi = HermitianMatrix::new(chi)?.into_matrix();
        let chi = match mode {
            GeneratorMode::Raw => chi,
            GeneratorMode::KossakowskiRegularized => {
                psd_project(&HermitianMatrix::new(chi)?).into_matrix()
            }
        };

        // effective Hamiltonian h_kq = δ_kq ω_k + Σ_ℓ η_{ℓq,ℓk}
        let mut h = CMat::zeros(d, d);
        for k in 0..d {
            for q in 0..d {
                let mut s = if k == q {
                    C64::new(self.system.energies()[k], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                for l in 0..d {
                    s += eta[(l * d + q, l * d + k)];
                }
                h[(k, q)] = s;
            }
        }
        let h = HermitianMatrix::new(h)?.into_matrix();

        // anticommutator contraction χ̃_kq = Σ_ℓ χ_{ℓq,ℓk} and φ = -i h - χ̃/2
        let mut phi = CMat::zeros(d, d);
        for k in 0..d {
            for q in 0..d {
                let mut chi_tilde = C64::new(0.0, 0.0);
                for l in 0..d {
                    chi_tilde += chi[(l * d + q, l * d + k)];
                }
                phi[(k, q)] = -C64::i() * h[(k, q)] - 0.5 * chi_tilde;
            }
        }

        // sandwich part X[(k,n),(q,m)] = χ_{kq,nm}, then
        // generator = X + φ ⊗ 1 + 1 ⊗ φ*
        let mut x = CMat::zeros(dd, dd);
        for k in 0..d {
            for n in 0..d {
                for q in 0..d {
                    for m in 0..d {
                        x[(k * d + n, q * d + m)] = chi[(k * d + q, n * d + m)];
                    }
                }
            }
        }
        let id = CMat::identity(d, d);
        let generator = x + kron(&phi, &id) + kron(&id, &phi.map(|z| z.conj()));

        Ok(GeneratorEval {
            chi,
            eta,
            effective_hamiltonian: h,
            phi,
            generator,
        })
    }

    /// Kossakowski matrix χ(t) and Lamb-shift coefficients η(t), both in
    /// composite (k,q) row-major indices of the eigenbasis.
    pub fn kossakowski(&self, t: f64) -> Result<(CMat, CMat)> {
        let eval = self.eval(t, GeneratorMode::Raw)?;
        Ok((eval.chi.clone(), eval.eta.clone()))
    }

    /// Vectorized generator at time t, rotated to the original basis.
    pub fn generator(&self, t: f64) -> Result<SuperOperator> {
        self.generator_with_mode(t, GeneratorMode::Raw)
    }

    /// Generator rebuilt from the PSD-projected Kossakowski matrix
    /// (Lamb shift untouched), rotated to the original basis.
    pub fn kossakowski_regularized_generator(&self, t: f64) -> Result<SuperOperator> {
        self.generator_with_mode(t, GeneratorMode::KossakowskiRegularized)
    }

    fn generator_with_mode(&self, t: f64, mode: GeneratorMode) -> Result<SuperOperator> {
        let eval = self.eval(t, mode)?;
        SuperOperator::new(
            self.dim(),
            self.system.superop_from_eigenbasis(&eval.generator),
        )
    }

    /// Integrate the master equation for a density-matrix trajectory on the
    /// given ascending grid starting at 0.
    pub fn evolve_state(
        &self,
        rho0: &HermitianMatrix,
        grid: &[f64],
        ode_opts: &OdeOptions,
        mode: GeneratorMode,
    ) -> Result<Vec<HermitianMatrix>> {
        let d = self.dim();
        if rho0.dim() != d {
            return Err(Error::Dimension(format!(
                "initial state is {}x{}, system dimension is {}",
                rho0.dim(),
                rho0.dim(),
                d
            )));
        }
        validate_density(rho0)?;
        validate_grid_from_zero(grid)?;

        let rho_eig = self.system.to_eigenbasis(rho0.matrix());
        let y0 = CMat::from_fn(d * d, 1, |i, _| rho_eig[(i / d, i % d)]);
        let states = self.integrate(y0, grid, ode_opts, mode)?;

        let mut out = Vec::with_capacity(states.len());
        for (t, y) in grid.iter().zip(states) {
            let m_eig = CMat::from_fn(d, d, |i, j| y[(i * d + j, 0)]);
            let m = self.system.from_eigenbasis(&m_eig);
            let trace_err = (m.trace() - C64::new(1.0, 0.0)).norm();
            let (herm, deviation) = HermitianMatrix::symmetrize(m);
            if trace_err > EVOLUTION_TOL || deviation > EVOLUTION_TOL {
                return Err(Error::Integration {
                    time: *t,
                    reason: format!(
                        "state drifted: trace error {trace_err:.3e}, hermiticity {deviation:.3e}"
                    ),
                });
            }
            out.push(herm);
        }
        Ok(out)
    }

    /// Integrate the propagator ODE dS/dt = L(t) S from the identity;
    /// column (n,m) is the vectorized evolution of the basis matrix E_nm.
    pub fn evolve_propagator(
        &self,
        grid: &[f64],
        ode_opts: &OdeOptions,
        mode: GeneratorMode,
    ) -> Result<Vec<SuperOperator>> {
        let d = self.dim();
        validate_grid_from_zero(grid)?;
        let y0 = CMat::identity(d * d, d * d);
        let props = self.integrate(y0, grid, ode_opts, mode)?;
        props
            .into_iter()
            .map(|s| SuperOperator::new(d, self.system.superop_from_eigenbasis(&s)))
            .collect()
    }

    fn integrate(
        &self,
        y0: CMat,
        grid: &[f64],
        ode_opts: &OdeOptions,
        mode: GeneratorMode,
    ) -> Result<Vec<CMat>> {
        let mut rhs_error: Option<Error> = None;
        let zero = CMat::zeros(y0.nrows(), y0.ncols());
        let states = integrate_on_grid(
            |t, y| match self.eval(t, mode) {
                Ok(eval) => &eval.generator * y,
                Err(e) => {
                    // surface the first builder failure instead of poisoning the step
                    if rhs_error.is_none() {
                        rhs_error = Some(e);
                    }
                    zero.clone()
                }
            },
            y0,
            grid,
            ode_opts,
        );
        match rhs_error {
            Some(e) => Err(e),
            None => states,
        }
    }
}

fn validate_grid_from_zero(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid("empty time grid".into()));
    }
    if grid[0] != 0.0 {
        return Err(Error::Grid(format!(
            "grid must start at 0, got {}",
            grid[0]
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("time grid must be strictly ascending".into()));
    }
    Ok(())
}

fn validate_density(rho: &HermitianMatrix) -> Result<()> {
    let trace_err = (rho.matrix().trace() - C64::new(1.0, 0.0)).norm();
    if trace_err > DENSITY_TOL {
        return Err(Error::NotDensity(format!("trace deviates by {trace_err:.3e}")));
    }
    let min_eig = rho.eigs().min_eigenvalue();
    if min_eig < -DENSITY_TOL {
        return Err(Error::NotDensity(format!(
            "negative eigenvalue {min_eig:.3e}"
        )));
    }
    Ok(())
}
