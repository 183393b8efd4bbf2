//! Dense complex linear algebra substrate: matrices, Hermitian operators,
//! subspaces and the Jacobi eigensolver.
//!
//! Every lattice- and order-theoretic decision in the crate bottoms out in a
//! rank or comparison decision made here, against one shared [`ToleranceConfig`].

mod eigen;
mod matrix;
mod subspace;

pub use eigen::{eigh, eigh_raw, spectral_norm, EigenPair};
pub use matrix::{ComplexMatrix, HermitianOperator};
pub use subspace::{subspace_intersection, subspace_sum, Subspace};

/// Tolerance policy shared by all numeric decisions.
///
/// Exact equality is never tested on floats; these thresholds are the contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Rank decisions on candidate bases (pivot norms, principal angles).
    pub tol_rank: f64,
    /// Gap under which adjacent eigenvalues are merged into one eigenprojection.
    pub tol_eig_cluster: f64,
    /// Max-norm bound on `M - M*` for a matrix to count as Hermitian.
    pub tol_hermitian: f64,
    /// General comparison tolerance for operator values and lattice order tests.
    pub tol_compare: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_rank: 1e-9,
            tol_eig_cluster: 1e-8,
            tol_hermitian: 1e-10,
            tol_compare: 1e-9,
        }
    }
}

impl ToleranceConfig {
    /// Validates that every tolerance is strictly positive and below 1e-3.
    pub fn validate(&self) -> crate::Result<()> {
        let entries = [
            ("tol_rank", self.tol_rank),
            ("tol_eig_cluster", self.tol_eig_cluster),
            ("tol_hermitian", self.tol_hermitian),
            ("tol_compare", self.tol_compare),
        ];
        for (name, value) in entries {
            if !(value > 0.0 && value < 1e-3) {
                return Err(crate::Error::Invalid(format!(
                    "tolerance {name} = {value} must lie in (0, 1e-3)"
                )));
            }
        }
        Ok(())
    }
}
