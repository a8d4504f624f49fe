//! Tolerance-aware subspace arithmetic.
//!
//! A subspace is stored as a column-orthonormal basis of its ambient space
//! together with the [`Tolerance`] used for every rank decision made while
//! producing it. Sums and intersections go through SVD orthonormalization;
//! intersections use orthogonal-complement duality, A ∩ B = (A⊥ + B⊥)⊥.
//! Containment and equality are principal-angle tests, never basis
//! comparisons: bases are non-canonical.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol::Tolerance;

/// Left singular vectors and singular values by one-sided Jacobi: rotate
/// column pairs until mutually orthogonal, then the column norms are the
/// singular values and the normalized columns the left singular vectors.
///
/// nalgebra's implicit-shift SVD mis-converges on near-rank-deficient
/// projectors (observed: σ₀ = 1.0072 for an exact orthogonal projector),
/// and every rank decision in this crate runs through here, so the kernel
/// is pinned to Jacobi: slower, but accurate to machine precision for the
/// small dense matrices this crate works with.
pub fn jacobi_left_singular(mat: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = mat.nrows();
    let m = mat.ncols();
    if m == 0 || n == 0 {
        return (DMatrix::zeros(n, 0), Vec::new());
    }
    let mut a = mat.clone();
    const SWEEPS: usize = 64;
    const ORTH_EPS: f64 = 1e-15;
    for _ in 0..SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for r in 0..n {
                    app += a[(r, p)] * a[(r, p)];
                    aqq += a[(r, q)] * a[(r, q)];
                    apq += a[(r, p)] * a[(r, q)];
                }
                if apq == 0.0 || apq.abs() <= ORTH_EPS * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..n {
                    let vp = a[(r, p)];
                    let vq = a[(r, q)];
                    a[(r, p)] = c * vp - s * vq;
                    a[(r, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..m).map(|j| (a.column(j).norm(), j)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite norms"));
    let basis = DMatrix::from_fn(n, m, |r, k| {
        let (norm, j) = order[k];
        if norm > 0.0 {
            a[(r, j)] / norm
        } else {
            0.0
        }
    });
    (basis, order.into_iter().map(|(s, _)| s).collect())
}

/// A linear subspace of R^n, represented by a column-orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
    tol: Tolerance,
}

impl Subspace {
    /// Orthonormal span of the columns of `mat`, rank decided by the
    /// singular-value cutoff of `tol`.
    pub fn from_columns(mat: &DMatrix<f64>, tol: Tolerance) -> Self {
        let n = mat.nrows();
        if mat.ncols() == 0 {
            return Subspace::zero(n, tol);
        }
        let (u, sigmas) = jacobi_left_singular(mat);
        let sigma_max = sigmas.first().copied().unwrap_or(0.0);
        let cut = tol.cutoff(sigma_max);
        let rank = sigmas.iter().filter(|s| **s > cut).count();
        Subspace { ambient_dim: n, basis: u.columns(0, rank).into_owned(), tol }
    }

    /// Orthonormal span of a list of ambient vectors.
    pub fn from_spanning(vectors: &[DVector<f64>], ambient_dim: usize, tol: Tolerance) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "spanning vector has length {}, ambient dimension is {}",
                    v.len(),
                    ambient_dim
                )));
            }
        }
        if vectors.is_empty() {
            return Ok(Subspace::zero(ambient_dim, tol));
        }
        let mat = DMatrix::from_columns(vectors);
        Ok(Subspace::from_columns(&mat, tol))
    }

    /// Wrap an already-orthonormal basis. Fails if orthonormality is off by
    /// more than the angle tolerance.
    pub fn from_orthonormal(basis: DMatrix<f64>, tol: Tolerance) -> Result<Self> {
        let s = Subspace { ambient_dim: basis.nrows(), basis, tol };
        let defect = s.orthonormality_defect();
        if defect > tol.angle_tol() {
            return Err(Error::Consistency(format!(
                "basis is not orthonormal, defect {defect:.3e}"
            )));
        }
        Ok(s)
    }

    pub fn zero(ambient_dim: usize, tol: Tolerance) -> Self {
        Subspace { ambient_dim, basis: DMatrix::zeros(ambient_dim, 0), tol }
    }

    pub fn full(ambient_dim: usize, tol: Tolerance) -> Self {
        Subspace { ambient_dim, basis: DMatrix::identity(ambient_dim, ambient_dim), tol }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    /// ‖basisᵀ·basis − I‖_max.
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.dim();
        let gram = self.basis.transpose() * &self.basis;
        let mut defect: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((gram[(i, j)] - target).abs());
            }
        }
        defect
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<Tolerance> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "ambient dimensions differ: {} vs {}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(self.tol.merge(&other.tol))
    }

    /// Span of the union: concatenate bases and re-orthonormalize.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        let tol = self.check_same_ambient(other)?;
        let mut cols = Vec::with_capacity(self.dim() + other.dim());
        for c in self.basis.column_iter().chain(other.basis.column_iter()) {
            cols.push(c.into_owned());
        }
        Subspace::from_spanning(&cols, self.ambient_dim, tol)
    }

    /// A ∩ B = (A⊥ + B⊥)⊥.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        let ca = self.complement();
        let cb = other.complement();
        Ok(ca.sum(&cb)?.complement())
    }

    /// Orthogonal complement, read off the projector I − BBᵀ.
    pub fn complement(&self) -> Subspace {
        let n = self.ambient_dim;
        let proj = DMatrix::identity(n, n) - &self.basis * self.basis.transpose();
        // Eigenvalues of the projector are 0/1; the cutoff is far from both.
        Subspace::from_columns(&proj, self.tol)
    }

    /// Orthogonal projection of an ambient vector onto the subspace.
    pub fn project(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs ambient {}",
                v.len(),
                self.ambient_dim
            )));
        }
        Ok(&self.basis * (self.basis.transpose() * v))
    }

    /// Largest principal-angle sine of `other` against this subspace:
    /// ‖(I − P_self)·B_other‖₂. Zero iff other ⊆ self.
    pub fn containment_defect(&self, other: &Subspace) -> Result<f64> {
        self.check_same_ambient(other)?;
        if other.dim() == 0 {
            return Ok(0.0);
        }
        let residual = &other.basis - &self.basis * (self.basis.transpose() * &other.basis);
        Ok(spectral_norm(&residual))
    }

    /// `other ⊆ self`, decided at the merged angle tolerance.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        let tol = self.check_same_ambient(other)?;
        Ok(self.containment_defect(other)? <= tol.angle_tol())
    }

    /// Symmetric principal-angle defect: max of the two containment defects.
    pub fn equality_defect(&self, other: &Subspace) -> Result<f64> {
        Ok(self
            .containment_defect(other)?
            .max(other.containment_defect(self)?))
    }

    pub fn is_equal(&self, other: &Subspace) -> Result<bool> {
        let tol = self.check_same_ambient(other)?;
        Ok(self.dim() == other.dim() && self.equality_defect(other)? <= tol.angle_tol())
    }

    /// Image of the subspace under a linear map, re-orthonormalized.
    pub fn map(&self, m: &DMatrix<f64>) -> Result<Subspace> {
        if m.ncols() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "map expects input dimension {}, subspace lives in {}",
                m.ncols(),
                self.ambient_dim
            )));
        }
        Ok(Subspace::from_columns(&(m * &self.basis), self.tol))
    }
}

/// Largest singular value, through the same Jacobi kernel.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    jacobi_left_singular(m).1.first().copied().unwrap_or(0.0)
}
