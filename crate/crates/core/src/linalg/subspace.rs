use num_complex::Complex64;

use super::{eigh_raw, ComplexMatrix, ToleranceConfig};
use crate::{Error, Result};

/// A subspace of `C^n`, represented by an orthonormal column basis.
///
/// The basis may be empty (the zero subspace).
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Complex64>>,
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // <a, b> conjugate-linear in the second slot, so projections read
    // coefficient = <v, b_k>.
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut e = vec![Complex64::new(0.0, 0.0); ambient_dim];
                e[i] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        Self { ambient_dim, basis }
    }

    pub fn line(vector: Vec<Complex64>) -> Result<Self> {
        let n = vector.len();
        Self::from_spanning(n, vec![vector], &ToleranceConfig::default())
    }

    /// Accepts columns that are already orthonormal within `tol_compare`.
    pub fn from_orthonormal(
        ambient_dim: usize,
        basis: Vec<Vec<Complex64>>,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        if basis.len() > ambient_dim {
            return Err(Error::DimensionMismatch { left: basis.len(), right: ambient_dim });
        }
        let mut defect: f64 = 0.0;
        for (i, u) in basis.iter().enumerate() {
            if u.len() != ambient_dim {
                return Err(Error::DimensionMismatch { left: u.len(), right: ambient_dim });
            }
            for (j, v) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((inner(u, v).norm() - expected).abs());
            }
        }
        // Gram defects accumulate over repeated lattice operations; the bound
        // is looser than tol_compare on purpose.
        if defect > (100.0 * cfg.tol_compare).max(1e-7) {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self { ambient_dim, basis })
    }

    /// Orthonormal basis of the span of arbitrary vectors.
    ///
    /// Pivoted modified Gram-Schmidt with one reorthogonalization pass; a
    /// candidate enters the basis only while its residual norm stays above
    /// `tol_rank`, which is the single rank policy of the crate.
    pub fn from_spanning(
        ambient_dim: usize,
        vectors: Vec<Vec<Complex64>>,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        for v in &vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch { left: v.len(), right: ambient_dim });
            }
        }
        let mut residuals = vectors;
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        // Pivot on the remaining vector with the largest residual norm.
        while let Some((best, best_norm)) = residuals
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm(v)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        {
            if best_norm <= cfg.tol_rank || basis.len() == ambient_dim {
                break;
            }
            let mut next = residuals.swap_remove(best);
            // Twice is enough: a second projection pass keeps the basis
            // orthonormal to working precision.
            for _ in 0..2 {
                for b in &basis {
                    let coeff = inner(&next, b);
                    for (x, y) in next.iter_mut().zip(b) {
                        *x -= coeff * y;
                    }
                }
            }
            let n = norm(&next);
            if n <= cfg.tol_rank {
                continue;
            }
            for x in next.iter_mut() {
                *x /= n;
            }
            for r in residuals.iter_mut() {
                let coeff = inner(r, &next);
                for (x, y) in r.iter_mut().zip(&next) {
                    *x -= coeff * y;
                }
            }
            basis.push(next);
        }
        Ok(Self { ambient_dim, basis })
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// Matrix of the orthogonal projection onto this subspace.
    pub fn projection_matrix(&self) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.ambient_dim);
        for v in &self.basis {
            p = p.add(&ComplexMatrix::outer(v));
        }
        p
    }

    /// Orthonormal basis of the orthogonal complement: the standard basis is
    /// projected off this subspace and the residuals orthonormalized.
    pub fn complement(&self, cfg: &ToleranceConfig) -> Result<Self> {
        let mut residuals = Self::full(self.ambient_dim).basis;
        for r in residuals.iter_mut() {
            for _ in 0..2 {
                for b in &self.basis {
                    let coeff = inner(r, b);
                    for (x, y) in r.iter_mut().zip(b) {
                        *x -= coeff * y;
                    }
                }
            }
        }
        Self::from_spanning(self.ambient_dim, residuals, cfg)
    }
}

fn check_dims(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::DimensionMismatch { left: u.ambient_dim, right: v.ambient_dim });
    }
    Ok(())
}

/// Basis of `ran(u) + ran(v)`.
pub fn subspace_sum(u: &Subspace, v: &Subspace, cfg: &ToleranceConfig) -> Result<Subspace> {
    check_dims(u, v)?;
    let mut vectors = u.basis.clone();
    vectors.extend(v.basis.clone());
    Subspace::from_spanning(u.ambient_dim, vectors, cfg)
}

/// Basis of `ran(u) ∩ ran(v)` by principal angles.
///
/// The singular values of `B_u* B_v` are the cosines of the principal angles
/// between the two ranges; directions with cosine 1 (within `tol_rank`) span
/// the intersection. The cosines are read off as eigenvalues of the small
/// Hermitian matrix `M M*`, which resolves angles near zero to full working
/// precision.
pub fn subspace_intersection(
    u: &Subspace,
    v: &Subspace,
    cfg: &ToleranceConfig,
) -> Result<Subspace> {
    check_dims(u, v)?;
    if u.is_zero() || v.is_zero() {
        return Ok(Subspace::zero(u.ambient_dim));
    }
    let ku = u.rank();
    let kv = v.rank();
    // M[i][j] = <u_i, v_j>, embedded in a square matrix for the eigensolver.
    let k = ku.max(kv);
    let mut m = ComplexMatrix::zeros(k);
    for i in 0..ku {
        for j in 0..kv {
            m.set(i, j, inner(&u.basis[i], &v.basis[j]));
        }
    }
    let w = m.matmul(&m.adjoint()); // ku x ku block, cos^2 of principal angles
    let (vals, vecs) = eigh_raw(&w)?;

    let threshold = (1.0 - cfg.tol_rank) * (1.0 - cfg.tol_rank);
    let mut result: Vec<Vec<Complex64>> = Vec::new();
    for (col, &val) in vals.iter().enumerate() {
        if val < threshold {
            continue;
        }
        // The squared projection norm of sum c_i u_i onto ran(v) is the
        // quadratic form of conj(M M*), so the synthesis coefficients are the
        // conjugated eigenvector entries.
        let mut x = vec![Complex64::new(0.0, 0.0); u.ambient_dim];
        for i in 0..ku {
            let coeff = vecs.get(i, col).conj();
            for (xi, bi) in x.iter_mut().zip(&u.basis[i]) {
                *xi += coeff * bi;
            }
        }
        result.push(x);
    }
    Subspace::from_spanning(u.ambient_dim, result, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn e(n: usize, i: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn intersection_of_coordinate_planes() {
        let cfg = ToleranceConfig::default();
        let u = Subspace::from_orthonormal(3, vec![e(3, 0), e(3, 1)], &cfg).unwrap();
        let v = Subspace::from_orthonormal(3, vec![e(3, 1), e(3, 2)], &cfg).unwrap();
        let w = subspace_intersection(&u, &v, &cfg).unwrap();
        assert_eq!(w.rank(), 1);
        let expected = Subspace::from_orthonormal(3, vec![e(3, 1)], &cfg).unwrap();
        assert!(w
            .projection_matrix()
            .approx_eq(&expected.projection_matrix(), 1e-10));
    }

    #[test]
    fn intersection_is_idempotent() {
        let cfg = ToleranceConfig::default();
        let raw = vec![
            vec![c(1.0), c(2.0), c(0.5)],
            vec![c(0.0), c(1.0), c(-1.0)],
        ];
        let u = Subspace::from_spanning(3, raw, &cfg).unwrap();
        let w = subspace_intersection(&u, &u, &cfg).unwrap();
        assert_eq!(w.rank(), u.rank());
        assert!(w
            .projection_matrix()
            .approx_eq(&u.projection_matrix(), 1e-10));
    }

    #[test]
    fn distinct_lines_intersect_trivially() {
        let cfg = ToleranceConfig::default();
        let u = Subspace::from_orthonormal(2, vec![e(2, 0)], &cfg).unwrap();
        let d = 1.0 / 2f64.sqrt();
        let v = Subspace::from_orthonormal(2, vec![vec![c(d), c(d)]], &cfg).unwrap();
        let w = subspace_intersection(&u, &v, &cfg).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn sum_of_distinct_lines_fills_the_plane() {
        let cfg = ToleranceConfig::default();
        let u = Subspace::from_orthonormal(2, vec![e(2, 0)], &cfg).unwrap();
        let d = 1.0 / 2f64.sqrt();
        let v = Subspace::from_orthonormal(2, vec![vec![c(d), c(d)]], &cfg).unwrap();
        let w = subspace_sum(&u, &v, &cfg).unwrap();
        assert_eq!(w.rank(), 2);
    }

    #[test]
    fn sum_with_zero_is_identity() {
        let cfg = ToleranceConfig::default();
        let u = Subspace::from_orthonormal(3, vec![e(3, 0), e(3, 2)], &cfg).unwrap();
        let w = subspace_sum(&u, &Subspace::zero(3), &cfg).unwrap();
        assert!(w
            .projection_matrix()
            .approx_eq(&u.projection_matrix(), 1e-12));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let cfg = ToleranceConfig::default();
        let u = Subspace::zero(2);
        let v = Subspace::zero(3);
        assert!(matches!(
            subspace_intersection(&u, &v, &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn complement_spans_the_rest() {
        let cfg = ToleranceConfig::default();
        let u = Subspace::from_orthonormal(3, vec![e(3, 1)], &cfg).unwrap();
        let comp = u.complement(&cfg).unwrap();
        assert_eq!(comp.rank(), 2);
        let total = subspace_sum(&u, &comp, &cfg).unwrap();
        assert_eq!(total.rank(), 3);
    }
}
