//! Dense complex linear-algebra primitives: inner products, norms, partial
//! traces, row-major vectorization, Kronecker products, Hermitian
//! eigendecomposition and the projector onto the positive-semidefinite cone.
//!
//! Composite indices are row-major everywhere: the pair (k, n) on a
//! d1 x d2 product space maps to k * d2 + n. The same convention drives
//! `vectorize`, so vec(A X B) = (A ⊗ Bᵀ) vec(X) holds without transposes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Construction-time bound: inputs farther than this from their Hermitian
/// part are rejected instead of silently symmetrized.
pub const HERMITICITY_REJECT_TOL: f64 = 1e-9;

/// Eigenvalues above this (negative) bound count as zero in positivity
/// verdicts, so round-off never flags a physical operator.
pub const PSD_ZERO_TOL: f64 = 1e-12;

/// A square complex matrix stored exactly equal to its own adjoint.
///
/// `new` symmetrizes h <- (h + h†)/2 when the deviation is small (ODE drift,
/// accumulated round-off) and rejects anything farther than
/// [`HERMITICITY_REJECT_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: CMat,
}

impl HermitianMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        let deviation = hermiticity_deviation(&mat)?;
        if deviation > HERMITICITY_REJECT_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: HERMITICITY_REJECT_TOL,
            });
        }
        Ok(Self::symmetrize(mat).0)
    }

    /// Unconditional symmetrization; returns the matrix together with the
    /// deviation of the input from its Hermitian part.
    pub fn symmetrize(mat: CMat) -> (Self, f64) {
        assert_eq!(mat.nrows(), mat.ncols(), "HermitianMatrix must be square");
        assert!(mat.nrows() >= 1, "HermitianMatrix must be nonempty");
        let deviation = hermiticity_deviation(&mat).expect("square by assertion");
        let sym = (&mat + mat.adjoint()) * C64::new(0.5, 0.0);
        (Self { mat: sym }, deviation)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMat::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMat::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Ascending eigendecomposition. Hermiticity is guaranteed by
    /// construction, so this cannot fail.
    pub fn eigs(&self) -> EigenDecomposition {
        let se = self.mat.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let d = self.dim();
        let eigenvectors = CMat::from_fn(d, d, |r, c| se.eigenvectors[(r, order[c])]);
        EigenDecomposition {
            eigenvalues,
            eigenvectors,
        }
    }
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// U diag(f(λ)) U† for an arbitrary real function of the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMat {
        let d = self.eigenvalues.len();
        let diag = CMat::from_fn(d, d, |r, c| {
            if r == c {
                C64::new(f(self.eigenvalues[r]), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.eigenvectors * diag * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMat {
        self.map_spectrum(|x| x)
    }
}

fn hermiticity_deviation(mat: &CMat) -> Result<f64> {
    if mat.nrows() != mat.ncols() {
        return Err(Error::Dimension(format!(
            "hermiticity check needs a square matrix, got {}x{}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    let adj = mat.adjoint();
    let mut dev: f64 = 0.0;
    for (a, b) in mat.iter().zip(adj.iter()) {
        dev = dev.max((a - b).norm());
    }
    Ok(dev)
}

/// Frobenius inner product Tr[x† y].
pub fn frobenius_inner(x: &CMat, y: &CMat) -> Result<C64> {
    if x.shape() != y.shape() {
        return Err(Error::Dimension(format!(
            "inner product of {}x{} with {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// Frobenius norm sqrt(Tr[x† x]).
pub fn frobenius_norm(x: &CMat) -> f64 {
    x.norm()
}

/// Trace norm Tr sqrt(x† x): the sum of singular values, computed from the
/// spectrum of the positive matrix x† x.
pub fn trace_norm(x: &CMat) -> Result<f64> {
    if x.nrows() != x.ncols() {
        return Err(Error::Dimension(format!(
            "trace norm needs a square matrix, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let gram = HermitianMatrix::symmetrize(x.adjoint() * x).0;
    Ok(gram
        .eigs()
        .eigenvalues
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .sum())
}

/// Partial trace over the first tensor factor: M[n, m] = Σ_k a[(k,n), (k,m)].
pub fn partial_trace_first(a: &CMat, d1: usize, d2: usize) -> Result<CMat> {
    check_product_dims(a, d1, d2)?;
    let mut out = CMat::zeros(d2, d2);
    for n in 0..d2 {
        for m in 0..d2 {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d1 {
                s += a[(k * d2 + n, k * d2 + m)];
            }
            out[(n, m)] = s;
        }
    }
    Ok(out)
}

/// Partial trace over the second tensor factor: M[k, q] = Σ_n a[(k,n), (q,n)].
pub fn partial_trace_second(a: &CMat, d1: usize, d2: usize) -> Result<CMat> {
    check_product_dims(a, d1, d2)?;
    let mut out = CMat::zeros(d1, d1);
    for k in 0..d1 {
        for q in 0..d1 {
            let mut s = C64::new(0.0, 0.0);
            for n in 0..d2 {
                s += a[(k * d2 + n, q * d2 + n)];
            }
            out[(k, q)] = s;
        }
    }
    Ok(out)
}

fn check_product_dims(a: &CMat, d1: usize, d2: usize) -> Result<()> {
    if d1 == 0 || d2 == 0 || a.nrows() != d1 * d2 || a.ncols() != d1 * d2 {
        return Err(Error::Dimension(format!(
            "partial trace of {}x{} with factors {}x{}",
            a.nrows(),
            a.ncols(),
            d1,
            d2
        )));
    }
    Ok(())
}

/// Row-major vectorization: row i of x occupies slots [i*d, (i+1)*d).
pub fn vectorize(x: &CMat) -> CVec {
    let (r, c) = x.shape();
    CVec::from_fn(r * c, |i, _| x[(i / c, i % c)])
}

/// Inverse of [`vectorize`] for square matrices.
pub fn unvectorize(v: &CVec, d: usize) -> Result<CMat> {
    if v.len() != d * d {
        return Err(Error::Dimension(format!(
            "unvectorize of length {} into {}x{}",
            v.len(),
            d,
            d
        )));
    }
    Ok(CMat::from_fn(d, d, |i, j| v[i * d + j]))
}

/// Kronecker product; block (i, j) equals a[i, j] * b.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Ascending Hermitian eigendecomposition.
pub fn hermitian_eigs(h: &HermitianMatrix) -> EigenDecomposition {
    h.eigs()
}

/// Frobenius-nearest positive-semidefinite matrix: zero out negative
/// eigenvalues, leave eigenvectors alone. Inputs already PSD (up to
/// [`PSD_ZERO_TOL`]) pass through untouched.
pub fn psd_project(h: &HermitianMatrix) -> HermitianMatrix {
    let eig = h.eigs();
    if eig.min_eigenvalue() >= -PSD_ZERO_TOL {
        return h.clone();
    }
    HermitianMatrix::symmetrize(eig.map_spectrum(|l| l.max(0.0))).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{c, pauli_x, pauli_y, pauli_z, random_complex_matrix, random_hermitian};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn frobenius_inner_examples() {
        let id2 = CMat::identity(2, 2);
        assert_eq!(frobenius_inner(&id2, &id2).unwrap(), c(2.0, 0.0));
        let xy = frobenius_inner(&pauli_x(), &pauli_y()).unwrap();
        assert!(xy.norm() < 1e-15);

        // <A, A> is real, nonnegative, and equals the elementwise sum of |a_ij|^2
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let a = random_complex_matrix(4, &mut rng);
        let aa = frobenius_inner(&a, &a).unwrap();
        let elementwise: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        assert!(aa.im.abs() < 1e-12);
        assert!(aa.re >= 0.0);
        assert_relative_eq!(aa.re, elementwise, max_relative = 1e-12);

        // conjugate symmetry
        let b = random_complex_matrix(4, &mut rng);
        let ab = frobenius_inner(&a, &b).unwrap();
        let ba = frobenius_inner(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);

        assert!(frobenius_inner(&a, &CMat::identity(3, 3)).is_err());
    }

    #[test]
    fn frobenius_norm_examples() {
        assert_relative_eq!(frobenius_norm(&CMat::identity(2, 2)), 2f64.sqrt());
        assert_eq!(frobenius_norm(&CMat::zeros(3, 3)), 0.0);
        let d34 = CMat::from_diagonal(&CVec::from_vec(vec![c(3.0, 0.0), c(4.0, 0.0)]));
        assert_relative_eq!(frobenius_norm(&d34), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_norm_examples() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert_relative_eq!(trace_norm(&d).unwrap(), 2.0, epsilon = 1e-12);

        // a density matrix has trace norm 1
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let g = random_complex_matrix(3, &mut rng);
        let mut rho = &g * g.adjoint();
        let tr: C64 = rho.trace();
        rho /= tr;
        assert_relative_eq!(trace_norm(&rho).unwrap(), 1.0, epsilon = 1e-12);

        // Hermitian input: sum of |eigenvalues| (eigendecomposition oracle)
        let h = random_hermitian(5, &mut rng);
        let by_eigs: f64 = h.eigs().eigenvalues.iter().map(|v| v.abs()).sum();
        assert_relative_eq!(trace_norm(h.matrix()).unwrap(), by_eigs, epsilon = 1e-10);

        assert!(trace_norm(&CMat::zeros(2, 3)).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let a = random_complex_matrix(2, &mut rng);
        let b = random_complex_matrix(3, &mut rng);
        let ab = kron(&a, &b);

        // Tr_1(A ⊗ B) = Tr(A) B, Tr_2(A ⊗ B) = Tr(B) A
        let t1 = partial_trace_first(&ab, 2, 3).unwrap();
        let t2 = partial_trace_second(&ab, 2, 3).unwrap();
        assert!((&t1 - &b * a.trace()).norm() < 1e-12);
        assert!((&t2 - &a * b.trace()).norm() < 1e-12);

        let id6 = CMat::identity(6, 6);
        assert!((partial_trace_first(&id6, 2, 3).unwrap() - CMat::identity(3, 3) * c(2.0, 0.0)).norm() < 1e-14);
        assert!((partial_trace_second(&id6, 2, 3).unwrap() - CMat::identity(2, 2) * c(3.0, 0.0)).norm() < 1e-14);

        // direct double-loop oracle on a random Hermitian 4x4
        let h = random_hermitian(4, &mut rng).into_matrix();
        let got = partial_trace_first(&h, 2, 2).unwrap();
        let mut want = CMat::zeros(2, 2);
        for n in 0..2 {
            for m in 0..2 {
                for k in 0..2 {
                    want[(n, m)] += h[(k * 2 + n, k * 2 + m)];
                }
            }
        }
        assert!((got - want).norm() < 1e-14);

        // both partial traces preserve the total trace
        let full: C64 = h.trace();
        let pt1: C64 = partial_trace_first(&h, 2, 2).unwrap().trace();
        let pt2: C64 = partial_trace_second(&h, 2, 2).unwrap().trace();
        assert!((full - pt1).norm() < 1e-12 && (full - pt2).norm() < 1e-12);

        assert!(partial_trace_first(&id6, 2, 2).is_err());
    }

    #[test]
    fn vectorize_examples() {
        // vec(e_0 e_1†) = e_0 ⊗ e_1
        let mut e01 = CMat::zeros(2, 2);
        e01[(0, 1)] = c(1.0, 0.0);
        let v = vectorize(&e01);
        assert_eq!(
            v.iter().cloned().collect::<Vec<_>>(),
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );

        let vid = vectorize(&CMat::identity(2, 2));
        assert_eq!(
            vid.iter().cloned().collect::<Vec<_>>(),
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );

        // vec(A X B) = (A ⊗ Bᵀ) vec(X)
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..20 {
            let a = random_complex_matrix(3, &mut rng);
            let x = random_complex_matrix(3, &mut rng);
            let b = random_complex_matrix(3, &mut rng);
            let lhs = vectorize(&(&a * &x * &b));
            let rhs = kron(&a, &b.transpose()) * vectorize(&x);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn unvectorize_round_trips() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for d in 2..=4 {
            let x = random_complex_matrix(d, &mut rng);
            let back = unvectorize(&vectorize(&x), d).unwrap();
            assert_eq!(back, x); // index permutation, exact
        }
        assert!(unvectorize(&CVec::zeros(3), 2).is_err());
    }

    #[test]
    fn kron_examples() {
        let id2 = CMat::identity(2, 2);
        assert_eq!(kron(&id2, &id2), CMat::identity(4, 4));

        let d12 = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]));
        let got = kron(&d12, &id2);
        let want = CMat::from_diagonal(&CVec::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(2.0, 0.0),
            c(2.0, 0.0),
        ]));
        assert_eq!(got, want);

        // mixed-product identity (AC) ⊗ (BD) = (A ⊗ B)(C ⊗ D)
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let a = random_complex_matrix(2, &mut rng);
        let b = random_complex_matrix(2, &mut rng);
        let cc = random_complex_matrix(2, &mut rng);
        let dd = random_complex_matrix(2, &mut rng);
        let lhs = kron(&(&a * &cc), &(&b * &dd));
        let rhs = kron(&a, &b) * kron(&cc, &dd);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigs_examples() {
        let z = HermitianMatrix::new(pauli_z()).unwrap();
        let ez = z.eigs();
        assert_relative_eq!(ez.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(ez.eigenvalues[1], 1.0, epsilon = 1e-14);

        let x = HermitianMatrix::new(pauli_x()).unwrap();
        let ex = x.eigs();
        assert_relative_eq!(ex.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(ex.eigenvalues[1], 1.0, epsilon = 1e-14);
        // eigenvectors (|0> ∓ |1>)/sqrt(2) up to phase: components have equal
        // modulus and the right relative sign
        for col in 0..2 {
            let v0 = ex.eigenvectors[(0, col)];
            let v1 = ex.eigenvectors[(1, col)];
            assert_relative_eq!(v0.norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
            let expected_sign = if col == 0 { -1.0 } else { 1.0 };
            assert!((v1 / v0 - c(expected_sign, 0.0)).norm() < 1e-12);
        }

        // reconstruction and unitarity on a random 6x6
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let h = random_hermitian(6, &mut rng);
        let e = h.eigs();
        let resid = (e.reconstruct() - h.matrix()).norm() / h.matrix().norm();
        assert!(resid < 1e-10, "reconstruction residual {resid}");
        let gram = e.eigenvectors.adjoint() * &e.eigenvectors;
        assert!((gram - CMat::identity(6, 6)).norm() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = pauli_z();
        m[(0, 1)] = c(1e-6, 0.0);
        match HermitianMatrix::new(m) {
            Err(Error::NotHermitian { .. }) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn psd_project_examples() {
        let d = HermitianMatrix::new(CMat::from_diagonal(&CVec::from_vec(vec![
            c(1.0, 0.0),
            c(-1.0, 0.0),
        ])))
        .unwrap();
        let p = psd_project(&d);
        assert!((p.matrix() - CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]))).norm() < 1e-14);

        // PSD input is a fixed point, bit for bit
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let g = random_complex_matrix(3, &mut rng);
        let psd = HermitianMatrix::new(&g * g.adjoint()).unwrap();
        assert_eq!(psd_project(&psd), psd);

        // matrix-square-root oracle: Π(A) = (A + sqrt(A†A))/2
        let a = random_hermitian(4, &mut rng);
        let got = psd_project(&a);
        let gram = HermitianMatrix::symmetrize(a.matrix().adjoint() * a.matrix()).0;
        let sqrt_gram = gram.eigs().map_spectrum(|l| l.max(0.0).sqrt());
        let want = (a.matrix() + sqrt_gram) * c(0.5, 0.0);
        assert!((got.matrix() - want).norm() < 1e-10);
    }

    #[test]
    fn psd_project_is_idempotent_and_nonexpansive() {
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        for _ in 0..25 {
            let a = random_hermitian(4, &mut rng);
            let b = random_hermitian(4, &mut rng);
            let pa = psd_project(&a);
            let pb = psd_project(&b);
            assert!((psd_project(&pa).matrix() - pa.matrix()).norm() < 1e-10);
            let lhs = (pa.matrix() - pb.matrix()).norm();
            let rhs = (a.matrix() - b.matrix()).norm();
            assert!(lhs <= rhs + 1e-12, "expansive: {lhs} > {rhs}");
        }
    }

    #[test]
    fn trace_distance_of_densities_is_bounded() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..20 {
            let g1 = random_complex_matrix(3, &mut rng);
            let g2 = random_complex_matrix(3, &mut rng);
            let mut r1 = &g1 * g1.adjoint();
            let mut r2 = &g2 * g2.adjoint();
            let t1: C64 = r1.trace();
            let t2: C64 = r2.trace();
            r1 /= t1;
            r2 /= t2;
            let tn = trace_norm(&(r1 - r2)).unwrap();
            assert!((0.0..=2.0 + 1e-12).contains(&tn));
        }
    }
}
