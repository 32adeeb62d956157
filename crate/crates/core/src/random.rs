//! Deterministic random generators for channels and operators, used by the
//! property and acceptance suites.

use rand::{Rng, RngExt};

use crate::choi::{choi_from_superop, ChoiOperator, SuperOperator};
use crate::linalg::{kron, partial_trace_first, CMat, C64, HermitianMatrix};

/// Box-Muller standard normal.
fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// d x d matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex_matrix(d: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(d, d, |_, _| C64::new(normal(rng), normal(rng)))
}

/// Random Hermitian matrix (G + G†)/2.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> HermitianMatrix {
    HermitianMatrix::symmetrize(random_complex_matrix(d, rng)).0
}

/// Random density matrix G G† / Tr[G G†].
pub fn random_density(d: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let g = random_complex_matrix(d, rng);
    let mut rho = &g * g.adjoint();
    let tr: C64 = rho.trace();
    rho /= tr;
    HermitianMatrix::symmetrize(rho).0
}

/// Random CPT channel from `kraus_count` Gaussian Kraus operators normalized
/// to Σ K† K = 1, returned as a superoperator Σ K ⊗ conj(K) in the row-major
/// vec basis.
pub fn random_kraus_superop(d: usize, kraus_count: usize, rng: &mut impl Rng) -> SuperOperator {
    assert!(kraus_count >= 1 && kraus_count <= d * d);
    let raw: Vec<CMat> = (0..kraus_count)
        .map(|_| random_complex_matrix(d, rng))
        .collect();
    let mut s = CMat::zeros(d, d);
    for k in &raw {
        s += k.adjoint() * k;
    }
    let inv_sqrt = HermitianMatrix::symmetrize(s)
        .0
        .eigs()
        .map_spectrum(|l| 1.0 / l.max(f64::MIN_POSITIVE).sqrt());
    let mut mat = CMat::zeros(d * d, d * d);
    for k in &raw {
        let kn = k * &inv_sqrt;
        mat += kron(&kn, &kn.map(|z| z.conj()));
    }
    SuperOperator::new(d, mat).expect("shape correct by construction")
}

/// Choi operator of a random CPT channel; physical by construction.
pub fn random_cpt_choi(d: usize, kraus_count: usize, rng: &mut impl Rng) -> ChoiOperator {
    choi_from_superop(&random_kraus_superop(d, kraus_count, rng))
}

/// Random Hermitian operator on the doubled space satisfying the
/// trace-preservation constraint Tr_1 P = 1/d exactly (not PSD in general).
pub fn random_tp_hermitian(d: usize, rng: &mut impl Rng) -> ChoiOperator {
    let w = random_hermitian(d * d, rng).into_matrix();
    let p = tp_shift(&w, d);
    ChoiOperator::new(d, p).expect("shape correct by construction")
}

/// Trace-preserving Hermitian input with the smallest eigenvalue forced below
/// -0.05, so that contraction margins dominate solver noise in the tests.
pub fn random_unphysical_choi(d: usize, rng: &mut impl Rng) -> ChoiOperator {
    let base = random_cpt_choi(d, d, rng);
    let dir = {
        let w = random_hermitian(d * d, rng).into_matrix();
        let shifted = tp_traceless(&w, d);
        let n = shifted.norm();
        shifted / C64::new(n, 0.0)
    };
    let mut scale = 0.3;
    for _ in 0..40 {
        let cand = base.matrix() + &dir * C64::new(scale, 0.0);
        let choi = ChoiOperator::new(d, cand).expect("shape preserved");
        if choi.min_eigenvalue() <= -0.05 {
            return choi;
        }
        scale *= 1.8;
    }
    unreachable!("scaling an indefinite TP direction always leaves the cone");
}

/// Project w onto the affine set Tr_1 P = 1/d.
fn tp_shift(w: &CMat, d: usize) -> CMat {
    let excess = partial_trace_first(w, d, d).expect("square product space")
        - CMat::identity(d, d) / C64::new(d as f64, 0.0);
    w - kron(&CMat::identity(d, d), &excess) / C64::new(d as f64, 0.0)
}

/// Component of w tangent to the TP affine set: Tr_1 of the result vanishes.
fn tp_traceless(w: &CMat, d: usize) -> CMat {
    let pt = partial_trace_first(w, d, d).expect("square product space");
    w - kron(&CMat::identity(d, d), &pt) / C64::new(d as f64, 0.0)
}
