use num_complex::Complex64;

use super::ToleranceConfig;
use crate::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from rows, checking squareness and finiteness.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare { rows: dim, cols: row.len() });
            }
            for (j, z) in row.iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        Ok(Self { dim, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        m
    }

    /// Rank-one matrix `v v*` for a column vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.dim + j] = z;
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    pub fn neg(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise max modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-norm of the Hermitian defect `M - M*`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                defect = defect.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        defect
    }

    pub fn max_norm_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_norm()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_norm_diff(other) <= tol
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }
}

/// A selfadjoint element of `L(C^n)`, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: ComplexMatrix,
}

impl HermitianOperator {
    /// Wraps a matrix after checking the Hermitian invariant against `tol_hermitian`.
    pub fn new(mat: ComplexMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        let defect = mat.hermitian_defect();
        if defect > cfg.tol_hermitian {
            return Err(Error::NotHermitian { defect, tol: cfg.tol_hermitian });
        }
        Ok(Self { mat })
    }

    /// Internal constructor for matrices Hermitian by algebraic construction
    /// (sums, real scalings and negations of Hermitian matrices).
    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.hermitian_defect() <= 1e-12 * mat.max_norm().max(1.0));
        Self { mat }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self { mat: ComplexMatrix::from_real_diag(diag) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: ComplexMatrix::identity(dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { mat: ComplexMatrix::zeros(dim) }
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        Self { mat: ComplexMatrix::identity(dim).scale(c) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new_unchecked(self.mat.add(&other.mat))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new_unchecked(self.mat.sub(&other.mat))
    }

    pub fn neg(&self) -> Self {
        Self::new_unchecked(self.mat.neg())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new_unchecked(self.mat.scale(s))
    }

    /// `<Ax, x>` for a (not necessarily unit) vector; real for Hermitian `A`.
    pub fn quadratic_form(&self, x: &[Complex64]) -> f64 {
        let ax = self.mat.apply(x);
        ax.iter().zip(x).map(|(a, b)| (a * b.conj()).re).sum()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.mat.approx_eq(&other.mat, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn from_rows_rejects_ragged_input() {
        let err = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![]]).unwrap_err();
        assert!(matches!(err, Error::NotSquare { .. }));
    }

    #[test]
    fn from_rows_rejects_non_finite() {
        let err =
            ComplexMatrix::from_rows(vec![vec![c(f64::NAN, 0.0)]]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry { row: 0, col: 0 }));
    }

    #[test]
    fn hermitian_invariant_is_enforced() {
        let cfg = ToleranceConfig::default();
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        // (0,1) entry should be the conjugate of (1,0); here it is not.
        assert!(matches!(
            HermitianOperator::new(m, &cfg),
            Err(Error::NotHermitian { .. })
        ));

        let ok = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(HermitianOperator::new(ok, &cfg).is_ok());
    }

    #[test]
    fn matmul_matches_hand_computation() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let ab = a.matmul(&b);
        assert_eq!(ab.get(0, 0), c(2.0, 0.0));
        assert_eq!(ab.get(0, 1), c(1.0, 0.0));
        assert_eq!(ab.get(1, 0), c(1.0, 0.0));
        assert_eq!(ab.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn quadratic_form_is_real_expectation() {
        let a = HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]);
        let x = vec![c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0), c(0.0, 0.0)];
        assert!((a.quadratic_form(&x) - 1.5).abs() < 1e-15);
    }
}
