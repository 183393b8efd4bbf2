use num_complex::Complex64;

use super::{ComplexMatrix, HermitianOperator, Subspace, ToleranceConfig};
use crate::plattice::Projection;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// One clustered spectral point: an eigenvalue together with the projection
/// onto the full eigenspace of its cluster.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub projection: Projection,
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and a unitary whose columns are the
/// corresponding eigenvectors. Deterministic: identical input bits give
/// identical output bits.
pub fn eigh_raw(mat: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = mat.dim();
    let mut a = mat.clone();
    let mut v = ComplexMatrix::identity(n);
    if n <= 1 {
        let vals = (0..n).map(|i| a.get(i, i).re).collect();
        return Ok((vals, v));
    }

    let scale = mat.frobenius_norm();
    let tol_off = 1e-14 * scale;

    let mut sweeps = 0;
    loop {
        let mut off_sq = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off_sq += a.get(p, q).norm_sqr();
            }
        }
        if off_sq.sqrt() <= tol_off {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps, off: off_sq.sqrt() });
        }
        sweeps += 1;

        for p in 0..n - 1 {
            for q in p + 1..n {
                let beta = a.get(p, q);
                let abs_b = beta.norm();
                if abs_b == 0.0 {
                    continue;
                }
                // Factor the phase out of the pivot, then apply the classic
                // real rotation that annihilates it.
                let phase = beta / abs_b;
                let alpha = a.get(p, p).re;
                let gamma = a.get(q, q).re;
                let theta = (gamma - alpha) / (2.0 * abs_b);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let s_conj_phase = phase.conj() * s; // s e^{-i phi}
                let s_phase = phase * s; // s e^{i phi}
                let c_conj_phase = phase.conj() * c;
                let c_phase = phase * c;

                // Columns p, q of A and of the accumulated eigenvector matrix.
                for i in 0..n {
                    let ap = a.get(i, p);
                    let aq = a.get(i, q);
                    a.set(i, p, ap * c - aq * s_conj_phase);
                    a.set(i, q, ap * s + aq * c_conj_phase);

                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, vp * c - vq * s_conj_phase);
                    v.set(i, q, vp * s + vq * c_conj_phase);
                }
                // Rows p, q of A.
                for j in 0..n {
                    let ap = a.get(p, j);
                    let aq = a.get(q, j);
                    a.set(p, j, ap * c - aq * s_phase);
                    a.set(q, j, ap * s + aq * c_phase);
                }
                // The pivot is zero by construction; pin it exactly.
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
                a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
            }
        }
    }

    // Sort ascending, stable in the original column order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .unwrap()
            .then(i.cmp(&j))
    });
    let vals: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vecs = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vecs.set(row, new_col, v.get(row, old_col));
        }
    }
    Ok((vals, vecs))
}

/// Spectral decomposition with eigenvalue clustering.
///
/// Eigenvalues closer than `tol_eig_cluster` are merged into a single
/// eigenprojection, so degenerate spectra yield one projection per spectral
/// point. The returned values are strictly increasing, the projections are
/// pairwise orthogonal and sum to the identity.
pub fn eigh(op: &HermitianOperator, cfg: &ToleranceConfig) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    let (vals, vecs) = eigh_raw(op.matrix())?;

    let mut pairs = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[end] - vals[end - 1] <= cfg.tol_eig_cluster {
            end += 1;
        }
        let value = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        let columns: Vec<Vec<Complex64>> = (start..end)
            .map(|col| (0..n).map(|row| vecs.get(row, col)).collect())
            .collect();
        let subspace = Subspace::from_orthonormal(n, columns, cfg)?;
        pairs.push(EigenPair { value, projection: Projection::from_subspace(subspace) });
        start = end;
    }
    Ok(pairs)
}

/// Operator 2-norm of a Hermitian operator (largest eigenvalue modulus).
pub fn spectral_norm(op: &HermitianOperator) -> Result<f64> {
    let (vals, _) = eigh_raw(op.matrix())?;
    Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}
