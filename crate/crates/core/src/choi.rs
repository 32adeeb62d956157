//! The Choi isomorphism between superoperators and operators on the doubled
//! space, with the normalization J(Φ) = (1/d) Σ_nm Φ(E_nm) ⊗ E_nm, so
//! trace-preserving maps have Choi trace 1 and Tr_1 J = 1/d.
//!
//! In the row-major vec basis the isomorphism is an index reshuffle:
//! J[(a,n),(b,m)] = (1/d) S[(a,b),(n,m)].

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_norm, partial_trace_first, unvectorize, vectorize, CMat, C64, HermitianMatrix,
};

/// Default tolerance for physicality verdicts: one order above the integrator
/// tolerance, so solver noise never triggers spurious projections.
pub const DEFAULT_PHYSICALITY_TOL: f64 = 1e-9;

/// A linear map on operators, stored concretely as a d² x d² matrix acting on
/// row-major vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    mat: CMat,
}

impl SuperOperator {
    pub fn new(dim: usize, mat: CMat) -> Result<Self> {
        if dim == 0 || mat.nrows() != dim * dim || mat.ncols() != dim * dim {
            return Err(Error::Dimension(format!(
                "superoperator for dim {} must be {}x{}, got {}x{}",
                dim,
                dim * dim,
                dim * dim,
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { dim, mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            mat: CMat::identity(dim * dim, dim * dim),
        }
    }

    /// The completely depolarizing map X -> Tr(X) 1/d.
    pub fn depolarizing(dim: usize) -> Self {
        let d = dim as f64;
        let idv = vectorize(&CMat::identity(dim, dim));
        let mat = CMat::from_fn(dim * dim, dim * dim, |r, c| {
            // vec(1/d) (vec 1)† picks out the trace of the input
            idv[r] * idv[c].conj() / C64::new(d, 0.0)
        });
        Self { dim, mat }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Apply the map to an operator.
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "applying dim-{} superoperator to {}x{}",
                self.dim,
                x.nrows(),
                x.ncols()
            )));
        }
        unvectorize(&(&self.mat * vectorize(x)), self.dim)
    }
}

/// Choi operator of a Hermitian-preserving map. The stored matrix is exactly
/// Hermitian; the deviation of the raw input from its Hermitian part is kept
/// for the physicality report.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperator {
    dim: usize,
    mat: CMat,
    hermiticity_deviation: f64,
}

impl ChoiOperator {
    pub fn new(dim: usize, mat: CMat) -> Result<Self> {
        if dim == 0 || mat.nrows() != dim * dim || mat.ncols() != dim * dim {
            return Err(Error::Dimension(format!(
                "Choi operator for dim {} must be {}x{}, got {}x{}",
                dim,
                dim * dim,
                dim * dim,
                mat.nrows(),
                mat.ncols()
            )));
        }
        let (sym, deviation) = HermitianMatrix::symmetrize(mat);
        Ok(Self {
            dim,
            mat: sym.into_matrix(),
            hermiticity_deviation: deviation,
        })
    }

    /// Choi operator of the identity channel: the rank-one projector onto the
    /// maximally entangled vector.
    pub fn identity_channel(dim: usize) -> Self {
        choi_from_superop(&SuperOperator::identity(dim))
    }

    /// Choi operator of the completely depolarizing channel: 1/d².
    pub fn depolarizing(dim: usize) -> Self {
        choi_from_superop(&SuperOperator::depolarizing(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.hermiticity_deviation
    }

    pub fn as_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrize(self.mat.clone()).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.as_hermitian().eigs().min_eigenvalue()
    }
}

/// Physicality verdict for a Choi operator at a given tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalityReport {
    pub min_eigenvalue: f64,
    pub tp_deviation: f64,
    pub hermiticity_deviation: f64,
    pub is_physical: bool,
    pub tolerance: f64,
}

/// J(Φ) = (1/d) Σ_nm Φ(E_nm) ⊗ E_nm, read off the superoperator columns.
pub fn choi_from_superop(s: &SuperOperator) -> ChoiOperator {
    let d = s.dim();
    let m = s.matrix();
    let scale = 1.0 / d as f64;
    let choi = CMat::from_fn(d * d, d * d, |row, col| {
        let (a, n) = (row / d, row % d);
        let (b, mm) = (col / d, col % d);
        m[(a * d + b, n * d + mm)] * scale
    });
    ChoiOperator::new(d, choi).expect("shape correct by construction")
}

/// Inverse reshuffle: Φ(X) = d Tr_2[J (1 ⊗ Xᵀ)] in matrix form.
pub fn superop_from_choi(p: &ChoiOperator) -> SuperOperator {
    let d = p.dim();
    let j = p.matrix();
    let scale = d as f64;
    let mat = CMat::from_fn(d * d, d * d, |row, col| {
        let (a, b) = (row / d, row % d);
        let (n, mm) = (col / d, col % d);
        j[(a * d + n, b * d + mm)] * scale
    });
    SuperOperator::new(d, mat).expect("shape correct by construction")
}

/// Evolve a state directly through a Choi operator: contracting the second
/// factor of J against Xᵀ gives `Φ(X)[a,b] = d Σ_nm J[(a,n),(b,m)] X[n,m]`.
pub fn apply_choi(p: &ChoiOperator, rho: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = p.dim();
    if rho.dim() != d {
        return Err(Error::Dimension(format!(
            "applying dim-{} Choi operator to {}x{} state",
            d,
            rho.dim(),
            rho.dim()
        )));
    }
    let j = p.matrix();
    let r = rho.matrix();
    let out = CMat::from_fn(d, d, |a, b| {
        let mut s = C64::new(0.0, 0.0);
        for n in 0..d {
            for m in 0..d {
                s += j[(a * d + n, b * d + m)] * r[(n, m)];
            }
        }
        s * d as f64
    });
    Ok(HermitianMatrix::symmetrize(out).0)
}

/// Complete physicality report: positivity, trace preservation
/// (‖Tr_1 P - 1/d‖_F) and hermiticity of the raw input.
pub fn check_physical(p: &ChoiOperator, tol: f64) -> PhysicalityReport {
    assert!(tol > 0.0, "physicality tolerance must be positive");
    let d = p.dim();
    let min_eigenvalue = p.min_eigenvalue();
    let tp_dev_mat = partial_trace_first(p.matrix(), d, d).expect("dims by construction")
        - CMat::identity(d, d) / C64::new(d as f64, 0.0);
    let tp_deviation = frobenius_norm(&tp_dev_mat);
    let hermiticity_deviation = p.hermiticity_deviation();
    PhysicalityReport {
        min_eigenvalue,
        tp_deviation,
        hermiticity_deviation,
        is_physical: min_eigenvalue >= -tol && tp_deviation <= tol && hermiticity_deviation <= tol,
        tolerance: tol,
    }
}

/// Frobenius distance between two Choi operators.
pub fn choi_distance(p: &ChoiOperator, q: &ChoiOperator) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::Dimension(format!(
            "Choi distance between dims {} and {}",
            p.dim(),
            q.dim()
        )));
    }
    Ok(frobenius_norm(&(p.matrix() - q.matrix())))
}
