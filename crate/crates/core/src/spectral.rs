//! Spectral families, the spectral order on selfadjoint operators with its
//! lattice operations, and the observable / mirrored observable functions
//! `r_A` and `s_A` on projections.
//!
//! In finite dimension a spectral family is a finite increasing step function
//! `λ ↦ E_λ`; between jumps it is constant, below the first jump it is zero.
//! All order and lattice computations therefore reduce to finite grids.

use crate::linalg::{eigh, HermitianOperator, ToleranceConfig};
use crate::plattice::{self, Projection};
use crate::{Error, Result};

/// Finite increasing family of cumulative spectral projections.
///
/// `unit` is the top of the family: the identity for an ordinary operator,
/// the corner projection for a family living in a corner algebra.
#[derive(Debug, Clone)]
pub struct SpectralFamily {
    jumps: Vec<f64>,
    cumulative: Vec<Projection>,
    unit: Projection,
}

impl SpectralFamily {
    /// Validates monotonicity, strictly increasing jumps and the top element.
    pub fn new(
        jumps: Vec<f64>,
        cumulative: Vec<Projection>,
        unit: Projection,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        if jumps.is_empty() || jumps.len() != cumulative.len() {
            return Err(Error::Invalid(format!(
                "spectral family needs matching nonempty jumps/cumulative lists, got {}/{}",
                jumps.len(),
                cumulative.len()
            )));
        }
        for w in jumps.windows(2) {
            // partial_cmp also rejects NaN jump values.
            if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
                return Err(Error::Invalid(format!(
                    "jumps must increase strictly: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for w in cumulative.windows(2) {
            if !plattice::leq(&w[0], &w[1], cfg)? {
                return Err(Error::Invalid(
                    "cumulative projections must increase".to_string(),
                ));
            }
        }
        let last = cumulative.last().unwrap();
        if !last.approx_eq(&unit, cfg) {
            return Err(Error::Invalid(
                "top of the spectral family must equal its unit".to_string(),
            ));
        }
        Ok(Self { jumps, cumulative, unit })
    }

    pub fn dim(&self) -> usize {
        self.unit.dim()
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn cumulative(&self) -> &[Projection] {
        &self.cumulative
    }

    pub fn unit(&self) -> &Projection {
        &self.unit
    }

    /// Smallest spectral value.
    pub fn min_value(&self) -> f64 {
        self.jumps[0]
    }

    /// Largest spectral value.
    pub fn max_value(&self) -> f64 {
        *self.jumps.last().unwrap()
    }

    /// `E_λ`: value at the largest jump `<= λ` (zero below the first jump).
    /// Jump membership is decided within `tol_compare`.
    pub fn value_at(&self, lambda: f64, cfg: &ToleranceConfig) -> Projection {
        let mut current: Option<&Projection> = None;
        for (jump, proj) in self.jumps.iter().zip(&self.cumulative) {
            if *jump <= lambda + cfg.tol_compare {
                current = Some(proj);
            } else {
                break;
            }
        }
        current.cloned().unwrap_or_else(|| Projection::zero(self.dim()))
    }

    /// Increment `E_{λ_k} - E_{λ_{k-1}}` at jump index `k`.
    pub fn increment(&self, k: usize) -> HermitianOperator {
        if k == 0 {
            self.cumulative[0].matrix().clone()
        } else {
            self.cumulative[k].matrix().sub(self.cumulative[k - 1].matrix())
        }
    }
}

/// Spectral family of a Hermitian operator: jumps are the clustered
/// eigenvalues, cumulative projections the partial sums of eigenprojections.
pub fn family_from_operator(
    a: &HermitianOperator,
    cfg: &ToleranceConfig,
) -> Result<SpectralFamily> {
    let pairs = eigh(a, cfg)?;
    let n = a.dim();
    let mut jumps = Vec::with_capacity(pairs.len());
    let mut cumulative: Vec<Projection> = Vec::with_capacity(pairs.len());
    let mut columns: Vec<Vec<num_complex::Complex64>> = Vec::new();
    for pair in &pairs {
        jumps.push(pair.value);
        // Eigenvectors of distinct clusters are orthonormal, so the cumulative
        // range basis is just the concatenation so far.
        columns.extend(pair.projection.range().basis().iter().cloned());
        let sub = crate::linalg::Subspace::from_orthonormal(n, columns.clone(), cfg)?;
        cumulative.push(Projection::from_subspace(sub));
    }
    SpectralFamily::new(jumps, cumulative, Projection::identity(n), cfg)
}

/// Reassembles the operator `Σ λ_k (E_{λ_k} - E_{λ_{k-1}})`.
pub fn to_operator(family: &SpectralFamily) -> HermitianOperator {
    let mut acc = HermitianOperator::zero(family.dim());
    for k in 0..family.jumps().len() {
        acc = acc.add(&family.increment(k).scale(family.jumps()[k]));
    }
    acc
}

/// Merged jump grid of several families, deduplicated within `tol_compare`.
fn merged_grid(families: &[&SpectralFamily], cfg: &ToleranceConfig) -> Vec<f64> {
    let mut grid: Vec<f64> = families.iter().flat_map(|f| f.jumps().iter().copied()).collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() <= cfg.tol_compare);
    grid
}

/// Spectral order: `a <=_s b` iff `E^b_λ <= E^a_λ` for every λ. For step
/// families it suffices to test the merged jump grid.
pub fn spectral_leq(
    a: &HermitianOperator,
    b: &HermitianOperator,
    cfg: &ToleranceConfig,
) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let fa = family_from_operator(a, cfg)?;
    let fb = family_from_operator(b, cfg)?;
    spectral_leq_families(&fa, &fb, cfg)
}

/// Spectral order test on precomputed families.
pub fn spectral_leq_families(
    fa: &SpectralFamily,
    fb: &SpectralFamily,
    cfg: &ToleranceConfig,
) -> Result<bool> {
    for lambda in merged_grid(&[fa, fb], cfg) {
        let ea = fa.value_at(lambda, cfg);
        let eb = fb.value_at(lambda, cfg);
        if !plattice::leq(&eb, &ea, cfg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn grid_family(
    grid: &[f64],
    values: Vec<Projection>,
    dim: usize,
    cfg: &ToleranceConfig,
) -> Result<SpectralFamily> {
    // Compress to actual jumps: keep grid points where the value changes.
    let mut jumps = Vec::new();
    let mut cumulative: Vec<Projection> = Vec::new();
    let mut previous = Projection::zero(dim);
    for (lambda, value) in grid.iter().zip(values) {
        if !value.approx_eq(&previous, cfg) {
            previous = value.clone();
            jumps.push(*lambda);
            cumulative.push(value);
        }
    }
    SpectralFamily::new(jumps, cumulative, Projection::identity(dim), cfg)
}

/// Join under the spectral order: the family `λ ↦ ∧_κ E^{A_κ}_λ`.
pub fn spectral_join(ops: &[HermitianOperator], cfg: &ToleranceConfig) -> Result<HermitianOperator> {
    Ok(to_operator(&spectral_join_family(ops, cfg)?))
}

pub fn spectral_join_family(
    ops: &[HermitianOperator],
    cfg: &ToleranceConfig,
) -> Result<SpectralFamily> {
    let families = collect_families(ops, cfg)?;
    let refs: Vec<&SpectralFamily> = families.iter().collect();
    let dim = ops[0].dim();
    let grid = merged_grid(&refs, cfg);
    let mut values = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let at: Vec<Projection> = families.iter().map(|f| f.value_at(lambda, cfg)).collect();
        values.push(plattice::meet_all(dim, &at, cfg)?);
    }
    grid_family(&grid, values, dim, cfg)
}

/// Meet under the spectral order: the right-regularized family
/// `λ ↦ ∧_{μ>λ} ∨_κ E^{A_κ}_μ`. Step families are constant between jumps, so
/// the regularization is evaluation at the grid points themselves.
pub fn spectral_meet(ops: &[HermitianOperator], cfg: &ToleranceConfig) -> Result<HermitianOperator> {
    Ok(to_operator(&spectral_meet_family(ops, cfg)?))
}

pub fn spectral_meet_family(
    ops: &[HermitianOperator],
    cfg: &ToleranceConfig,
) -> Result<SpectralFamily> {
    let families = collect_families(ops, cfg)?;
    let refs: Vec<&SpectralFamily> = families.iter().collect();
    let dim = ops[0].dim();
    let grid = merged_grid(&refs, cfg);
    let mut values = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let at: Vec<Projection> = families.iter().map(|f| f.value_at(lambda, cfg)).collect();
        values.push(plattice::join_all(dim, &at, cfg)?);
    }
    grid_family(&grid, values, dim, cfg)
}

fn collect_families(
    ops: &[HermitianOperator],
    cfg: &ToleranceConfig,
) -> Result<Vec<SpectralFamily>> {
    if ops.is_empty() {
        return Err(Error::EmptyOperatorList);
    }
    let dim = ops[0].dim();
    for op in ops {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: op.dim() });
        }
    }
    ops.iter().map(|op| family_from_operator(op, cfg)).collect()
}

/// Observable value `r_A(p) = inf { λ : p <= E_λ }`: the least jump whose
/// cumulative projection dominates `p`. Defined for nonzero `p`.
pub fn observable_value(
    a: &HermitianOperator,
    p: &Projection,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    let family = family_from_operator(a, cfg)?;
    observable_value_from_family(&family, p, cfg)
}

pub fn observable_value_from_family(
    family: &SpectralFamily,
    p: &Projection,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::ZeroProjection);
    }
    for (jump, cum) in family.jumps().iter().zip(family.cumulative()) {
        if plattice::leq(p, cum, cfg)? {
            return Ok(*jump);
        }
    }
    // Ordinary families end at the identity, so this is only reachable for a
    // corner family and a projection outside its corner.
    Err(Error::Invalid(
        "projection is not dominated by the top of the spectral family".to_string(),
    ))
}

/// Mirrored observable value `s_A(p) = sup { λ : I - E_λ >= p }`: the least
/// jump at which `p <= I - E_λ` fails. Equals `-r_{-A}(p)`.
pub fn mirrored_value(
    a: &HermitianOperator,
    p: &Projection,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    let family = family_from_operator(a, cfg)?;
    mirrored_value_from_family(&family, p, cfg)
}

pub fn mirrored_value_from_family(
    family: &SpectralFamily,
    p: &Projection,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::ZeroProjection);
    }
    for (jump, cum) in family.jumps().iter().zip(family.cumulative()) {
        // p <= I - E_λ fails exactly when p E_λ != 0.
        let overlap = p.matrix().matrix().matmul(cum.matrix().matrix());
        if overlap.max_norm() > cfg.tol_compare {
            return Ok(*jump);
        }
    }
    // Nonzero p always meets the identity top; only a corner family with a
    // projection orthogonal to its corner can end up here.
    Err(Error::Invalid(
        "projection is orthogonal to the top of the spectral family".to_string(),
    ))
}
