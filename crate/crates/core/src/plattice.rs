//! The projection lattice `P(R)` of a matrix algebra: order, meet, join,
//! orthocomplement and commutation tests.
//!
//! A projection carries both its matrix and an orthonormal basis of its range,
//! kept consistent at construction: order tests are cheapest on matrices,
//! meets and joins on bases.

use num_complex::Complex64;

use crate::linalg::{
    eigh_raw, subspace_intersection, subspace_sum, ComplexMatrix, HermitianOperator, Subspace,
    ToleranceConfig,
};
use crate::{Error, Result};

/// A Hermitian idempotent together with its range.
#[derive(Debug, Clone)]
pub struct Projection {
    matrix: HermitianOperator,
    range: Subspace,
}

impl Projection {
    /// Projection onto a given subspace; the matrix is `sum v v*` over the basis.
    pub fn from_subspace(range: Subspace) -> Self {
        let matrix = HermitianOperator::new_unchecked(range.projection_matrix());
        Self { matrix, range }
    }

    /// Validates idempotence and hermiticity, then recovers the range as the
    /// eigenspace of eigenvalue one.
    pub fn from_matrix(mat: ComplexMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        let op = HermitianOperator::new(mat, cfg)?;
        let defect = op.matrix().matmul(op.matrix()).max_norm_diff(op.matrix());
        if defect > (100.0 * cfg.tol_compare).max(1e-7) {
            return Err(Error::NotProjection {
                reason: format!("idempotence defect {defect:.3e}"),
            });
        }
        let (vals, vecs) = eigh_raw(op.matrix())?;
        let n = op.dim();
        let mut columns = Vec::new();
        for (col, &v) in vals.iter().enumerate() {
            if (v - 1.0).abs() > 1e-6 && v.abs() > 1e-6 {
                return Err(Error::NotProjection {
                    reason: format!("eigenvalue {v} is neither 0 nor 1"),
                });
            }
            if v > 0.5 {
                columns.push((0..n).map(|row| vecs.get(row, col)).collect());
            }
        }
        let range = Subspace::from_orthonormal(n, columns, cfg)?;
        Ok(Self { matrix: op, range })
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_subspace(Subspace::zero(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_subspace(Subspace::full(dim))
    }

    /// Rank-one projection onto the line spanned by `v`.
    pub fn onto_line(v: Vec<Complex64>) -> Result<Self> {
        Ok(Self::from_subspace(Subspace::line(v)?))
    }

    /// Projection onto the span of a set of standard basis vectors.
    pub fn onto_coordinates(dim: usize, coords: &[usize]) -> Self {
        let basis = coords
            .iter()
            .map(|&i| {
                let mut e = vec![Complex64::new(0.0, 0.0); dim];
                e[i] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        let cfg = ToleranceConfig::default();
        Self::from_subspace(Subspace::from_orthonormal(dim, basis, &cfg).unwrap())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.range.rank()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.range.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.rank() == self.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &HermitianOperator {
        &self.matrix
    }

    #[inline]
    pub fn range(&self) -> &Subspace {
        &self.range
    }

    pub fn approx_eq(&self, other: &Self, cfg: &ToleranceConfig) -> bool {
        self.dim() == other.dim()
            && self.matrix.matrix().approx_eq(other.matrix.matrix(), cfg.tol_compare)
    }
}

fn check_dims(p: &Projection, q: &Projection) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: q.dim() });
    }
    Ok(())
}

/// Order on `P(R)`: `p <= q` iff `ran p` is contained in `ran q`,
/// decided via `|(I - q) p| <= tol_compare`.
pub fn leq(p: &Projection, q: &Projection, cfg: &ToleranceConfig) -> Result<bool> {
    check_dims(p, q)?;
    let residual = p.matrix().matrix().sub(&q.matrix().matrix().matmul(p.matrix().matrix()));
    Ok(residual.max_norm() <= cfg.tol_compare)
}

/// Lattice infimum: projection onto `ran p ∩ ran q`.
pub fn meet(p: &Projection, q: &Projection, cfg: &ToleranceConfig) -> Result<Projection> {
    check_dims(p, q)?;
    Ok(Projection::from_subspace(subspace_intersection(p.range(), q.range(), cfg)?))
}

/// Lattice supremum: projection onto `ran p + ran q`.
pub fn join(p: &Projection, q: &Projection, cfg: &ToleranceConfig) -> Result<Projection> {
    check_dims(p, q)?;
    Ok(Projection::from_subspace(subspace_sum(p.range(), q.range(), cfg)?))
}

/// Orthocomplement `I - p`.
pub fn complement(p: &Projection, cfg: &ToleranceConfig) -> Result<Projection> {
    Ok(Projection::from_subspace(p.range().complement(cfg)?))
}

/// Commutation test via the commutator norm.
pub fn commutes(p: &Projection, q: &Projection, cfg: &ToleranceConfig) -> Result<bool> {
    check_dims(p, q)?;
    let pq = p.matrix().matrix().matmul(q.matrix().matrix());
    let qp = q.matrix().matrix().matmul(p.matrix().matrix());
    Ok(pq.max_norm_diff(&qp) <= cfg.tol_compare)
}

/// Meet of a list of projections (empty list yields the identity, the top of
/// the lattice in the given dimension).
pub fn meet_all(dim: usize, projs: &[Projection], cfg: &ToleranceConfig) -> Result<Projection> {
    let mut acc = Projection::identity(dim);
    for p in projs {
        acc = meet(&acc, p, cfg)?;
    }
    Ok(acc)
}

/// Join of a list of projections (empty list yields zero).
pub fn join_all(dim: usize, projs: &[Projection], cfg: &ToleranceConfig) -> Result<Projection> {
    let mut acc = Projection::zero(dim);
    for p in projs {
        acc = join(&acc, p, cfg)?;
    }
    Ok(acc)
}
