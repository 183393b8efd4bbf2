//! Restriction of operators to abelian contexts: cores and supports of
//! projections, the upper and lower aspects (coarse-grainings) of a
//! selfadjoint operator, the corner-algebra variant, and coarse-graining
//! along a partition of the spectrum.
//!
//! Two computation paths exist for the aspects. The primary path reads, for
//! each atom, the largest (resp. smallest) spectral value whose
//! eigenprojection meets the atom. The definitional path pushes the whole
//! spectral family through the core (resp. support) map and reassembles the
//! operator; it serves as a cross-check oracle. Both select their
//! coefficients from the same spectral grid, so agreement is exact.
//!
//! Restriction is not linear: for orthogonal projections `P`, `Q` the
//! supports may overlap, so the upper aspect of `P + Q` need not be the sum
//! of the aspects.

use crate::context::AbelianContext;
use crate::linalg::{HermitianOperator, ToleranceConfig};
use crate::plattice::{self, Projection};
use crate::spectral::{self, SpectralFamily};
use crate::{Error, Result};

/// Result of restricting an operator into a context: the restricted operator
/// together with its per-atom coefficients.
#[derive(Debug, Clone)]
pub struct AspectResult {
    pub operator: HermitianOperator,
    pub coefficients: Vec<f64>,
}

fn check_dims(m: &AbelianContext, dim: usize) -> Result<()> {
    if m.ambient_dim() != dim {
        return Err(Error::DimensionMismatch { left: m.ambient_dim(), right: dim });
    }
    Ok(())
}

/// Core of a projection in a context: the largest context projection below
/// `q`, i.e. the sum of all atoms dominated by `q`.
pub fn core_projection(
    m: &AbelianContext,
    q: &Projection,
    cfg: &ToleranceConfig,
) -> Result<Projection> {
    check_dims(m, q.dim())?;
    let below: Vec<Projection> = m
        .atoms()
        .iter()
        .filter_map(|atom| match plattice::leq(atom, q, cfg) {
            Ok(true) => Some(Ok(atom.clone())),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    Ok(sum_atoms(m.ambient_dim(), &below))
}

/// Support of a projection in a context: the smallest context projection
/// above `q`, i.e. the sum of all atoms with nonzero product against `q`.
pub fn support_projection(
    m: &AbelianContext,
    q: &Projection,
    cfg: &ToleranceConfig,
) -> Result<Projection> {
    check_dims(m, q.dim())?;
    let touching: Vec<Projection> = m
        .atoms()
        .iter()
        .filter(|atom| {
            atom.matrix().matrix().matmul(q.matrix().matrix()).max_norm() > cfg.tol_compare
        })
        .cloned()
        .collect();
    Ok(sum_atoms(m.ambient_dim(), &touching))
}

fn sum_atoms(dim: usize, atoms: &[Projection]) -> Projection {
    if atoms.is_empty() {
        return Projection::zero(dim);
    }
    let mut columns = Vec::new();
    for atom in atoms {
        columns.extend(atom.range().basis().iter().cloned());
    }
    let cfg = ToleranceConfig::default();
    Projection::from_subspace(
        crate::linalg::Subspace::from_orthonormal(dim, columns, &cfg)
            .expect("atoms of one context are orthogonal"),
    )
}

/// Upper aspect: the least element of the context spectrally above `a`.
/// Coefficient on an atom = the largest spectral value whose eigenprojection
/// has nonzero product with the atom.
pub fn upper_aspect(
    m: &AbelianContext,
    a: &HermitianOperator,
    cfg: &ToleranceConfig,
) -> Result<AspectResult> {
    check_dims(m, a.dim())?;
    let family = spectral::family_from_operator(a, cfg)?;
    upper_aspect_from_family(m, &family, cfg)
}

pub fn upper_aspect_from_family(
    m: &AbelianContext,
    family: &SpectralFamily,
    cfg: &ToleranceConfig,
) -> Result<AspectResult> {
    aspect_from_family(m, family, cfg, Extreme::Max)
}

/// Lower aspect: the greatest element of the context spectrally below `a`.
/// Coefficient on an atom = the smallest spectral value whose eigenprojection
/// meets the atom. Equals `-upper_aspect(m, -a)`.
pub fn lower_aspect(
    m: &AbelianContext,
    a: &HermitianOperator,
    cfg: &ToleranceConfig,
) -> Result<AspectResult> {
    check_dims(m, a.dim())?;
    let family = spectral::family_from_operator(a, cfg)?;
    lower_aspect_from_family(m, &family, cfg)
}

pub fn lower_aspect_from_family(
    m: &AbelianContext,
    family: &SpectralFamily,
    cfg: &ToleranceConfig,
) -> Result<AspectResult> {
    aspect_from_family(m, family, cfg, Extreme::Min)
}

enum Extreme {
    Max,
    Min,
}

fn aspect_from_family(
    m: &AbelianContext,
    family: &SpectralFamily,
    cfg: &ToleranceConfig,
    which: Extreme,
) -> Result<AspectResult> {
    check_dims(m, family.dim())?;
    let jumps = family.jumps();
    let mut coefficients = Vec::with_capacity(m.atom_count());
    for atom in m.atoms() {
        let mut selected: Option<f64> = None;
        for (k, &lambda) in jumps.iter().enumerate() {
            let increment = family.increment(k);
            let overlap = increment.matrix().matmul(atom.matrix().matrix()).max_norm();
            if overlap > cfg.tol_compare {
                selected = Some(match which {
                    // Jumps ascend, so max = keep last hit, min = keep first.
                    Extreme::Max => lambda,
                    Extreme::Min => selected.unwrap_or(lambda),
                });
            }
        }
        coefficients.push(selected.ok_or_else(|| Error::InvalidContext {
            reason: "atom meets no eigenprojection".to_string(),
        })?);
    }
    Ok(AspectResult { operator: m.operator_from_coefficients(&coefficients), coefficients })
}

/// Definitional route for the upper aspect: push the spectral family through
/// the core map, reassemble and read coefficients off the resulting family.
pub fn upper_aspect_definitional(
    m: &AbelianContext,
    a: &HermitianOperator,
    cfg: &ToleranceConfig,
) -> Result<AspectResult> {
    check_dims(m, a.dim())?;
    let family = spectral::family_from_operator(a, cfg)?;
    let core_family = core_of_family(m, &family, cfg)?;
    coefficients_from_step_family(m, &core_family, cfg)
}

/// Definitional route for the lower aspect via the support map. For step
/// families the right-regularization `∧_{μ>λ} s_M(E_μ)` is evaluation at the
/// grid points themselves, since the family is constant between jumps.
pub fn lower_aspect_definitional(
    m: &AbelianContext,
    a: &HermitianOperator,
    cfg: &ToleranceConfig,
) -> Result<AspectResult> {
    check_dims(m, a.dim())?;
    let family = spectral::family_from_operator(a, cfg)?;
    let support_family = support_of_family(m, &family, cfg)?;
    coefficients_from_step_family(m, &support_family, cfg)
}

/// The family `λ ↦ c_M(E_λ)` as a compressed step family in the context.
pub fn core_of_family(
    m: &AbelianContext,
    family: &SpectralFamily,
    cfg: &ToleranceConfig,
) -> Result<SpectralFamily> {
    transform_family(family, cfg, |e| core_projection(m, e, cfg))
}

/// The family `λ ↦ s_M(E_λ)` (right-regularized) as a compressed step family.
pub fn support_of_family(
    m: &AbelianContext,
    family: &SpectralFamily,
    cfg: &ToleranceConfig,
) -> Result<SpectralFamily> {
    transform_family(family, cfg, |e| support_projection(m, e, cfg))
}

fn transform_family(
    family: &SpectralFamily,
    cfg: &ToleranceConfig,
    map: impl Fn(&Projection) -> Result<Projection>,
) -> Result<SpectralFamily> {
    let dim = family.dim();
    let mut jumps = Vec::new();
    let mut cumulative: Vec<Projection> = Vec::new();
    let mut previous = Projection::zero(dim);
    for (lambda, e) in family.jumps().iter().zip(family.cumulative()) {
        let image = map(e)?;
        if !image.approx_eq(&previous, cfg) {
            previous = image.clone();
            jumps.push(*lambda);
            cumulative.push(image);
        }
    }
    SpectralFamily::new(jumps, cumulative, Projection::identity(dim), cfg)
}

/// Reads the per-atom coefficient of a step family whose values lie in the
/// context: the first jump at which the atom enters the cumulative projection.
fn coefficients_from_step_family(
    m: &AbelianContext,
    family: &SpectralFamily,
    cfg: &ToleranceConfig,
) -> Result<AspectResult> {
    let mut coefficients = Vec::with_capacity(m.atom_count());
    for atom in m.atoms() {
        let mut selected = None;
        for (k, lambda) in family.jumps().iter().enumerate() {
            if plattice::leq(atom, &family.cumulative()[k], cfg)? {
                selected = Some(*lambda);
                break;
            }
        }
        coefficients.push(selected.ok_or_else(|| Error::InvalidContext {
            reason: "atom never enters the transformed family".to_string(),
        })?);
    }
    Ok(AspectResult { operator: m.operator_from_coefficients(&coefficients), coefficients })
}

/// Restriction to the corner algebra `QRQ`: the spectral family
/// `λ ↦ E_λ ∧ Q`, with the corner projection as its unit. Suprema over empty
/// dominating sets in the corner resolve to the corner unit, so the family
/// top is `Q` after compression.
pub fn corner_upper(
    q: &Projection,
    a: &HermitianOperator,
    cfg: &ToleranceConfig,
) -> Result<SpectralFamily> {
    if q.is_zero() {
        return Err(Error::ZeroCorner);
    }
    if q.dim() != a.dim() {
        return Err(Error::DimensionMismatch { left: q.dim(), right: a.dim() });
    }
    let family = spectral::family_from_operator(a, cfg)?;
    let dim = a.dim();
    let mut jumps = Vec::new();
    let mut cumulative: Vec<Projection> = Vec::new();
    let mut previous = Projection::zero(dim);
    for (lambda, e) in family.jumps().iter().zip(family.cumulative()) {
        let image = plattice::meet(e, q, cfg)?;
        if !image.approx_eq(&previous, cfg) {
            previous = image.clone();
            jumps.push(*lambda);
            cumulative.push(image);
        }
    }
    SpectralFamily::new(jumps, cumulative, q.clone(), cfg)
}

/// Coarse-graining of an operator along interior partition points of its
/// spectrum.
#[derive(Debug, Clone)]
pub struct CoarseGraining {
    /// Context generated by the cumulative spectral projections at the points.
    pub context: AbelianContext,
    pub upper: AspectResult,
    pub lower: AspectResult,
}

/// Builds the context with atoms `E_{λ_k} - E_{λ_{k-1}}` over the partition
/// points and restricts `a` both ways.
///
/// Requires every point to be a spectral value and the interior ordering
/// `m_A < λ_1 < ... < λ_n < M_A`.
pub fn coarse_grain(
    a: &HermitianOperator,
    points: &[f64],
    cfg: &ToleranceConfig,
) -> Result<CoarseGraining> {
    let family = spectral::family_from_operator(a, cfg)?;
    if points.is_empty() {
        return Err(Error::BadPartitionPoints);
    }
    for w in points.windows(2) {
        if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
            return Err(Error::BadPartitionPoints);
        }
    }
    for &p in points {
        if !family.jumps().iter().any(|&j| (j - p).abs() <= cfg.tol_compare) {
            return Err(Error::PointNotInSpectrum { value: p });
        }
    }
    if points[0] <= family.min_value() + cfg.tol_compare
        || *points.last().unwrap() >= family.max_value() - cfg.tol_compare
    {
        return Err(Error::BadPartitionPoints);
    }

    let dim = a.dim();
    let mut atoms = Vec::with_capacity(points.len() + 1);
    let mut previous = Projection::zero(dim);
    for &p in points {
        let e = family.value_at(p, cfg);
        atoms.push(cell_between(&previous, &e, cfg)?);
        previous = e;
    }
    atoms.push(cell_between(&previous, &Projection::identity(dim), cfg)?);
    let context = AbelianContext::new(dim, atoms, cfg)?;

    let upper = upper_aspect_from_family(&context, &family, cfg)?;
    let lower = lower_aspect_from_family(&context, &family, cfg)?;
    Ok(CoarseGraining { context, upper, lower })
}

/// Difference cell `e - previous` for nested projections.
fn cell_between(
    previous: &Projection,
    e: &Projection,
    cfg: &ToleranceConfig,
) -> Result<Projection> {
    let matrix = e.matrix().sub(previous.matrix());
    Projection::from_matrix(matrix.matrix().clone(), cfg)
}

/// Classical lower Riemann-Stieltjes sum along the same partition: value
/// `m_A` on the first cell, then the partition points on the following cells.
/// Differs in general from the lower aspect, which assigns each cell the
/// smallest spectral value it actually contains.
pub fn riemann_lower_sum(
    a: &HermitianOperator,
    points: &[f64],
    cfg: &ToleranceConfig,
) -> Result<HermitianOperator> {
    let graining = coarse_grain(a, points, cfg)?;
    let family = spectral::family_from_operator(a, cfg)?;
    let mut coeffs = vec![family.min_value()];
    coeffs.extend_from_slice(points);
    Ok(graining.context.operator_from_coefficients(&coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn p(coords: &[usize]) -> Projection {
        Projection::onto_coordinates(3, coords)
    }

    fn two_block_context() -> AbelianContext {
        AbelianContext::new(3, vec![p(&[0]), p(&[1, 2])], &cfg()).unwrap()
    }

    #[test]
    fn core_and_support_of_a_line() {
        let cfg = cfg();
        let m = two_block_context();
        let q = p(&[1]);
        let core = core_projection(&m, &q, &cfg).unwrap();
        assert!(core.is_zero());
        let support = support_projection(&m, &q, &cfg).unwrap();
        assert!(support.approx_eq(&p(&[1, 2]), &cfg));

        // Identity on the context's own projections, and on the top.
        let own = p(&[1, 2]);
        assert!(core_projection(&m, &own, &cfg).unwrap().approx_eq(&own, &cfg));
        assert!(support_projection(&m, &own, &cfg).unwrap().approx_eq(&own, &cfg));
        assert!(core_projection(&m, &Projection::identity(3), &cfg).unwrap().is_identity());
    }

    #[test]
    fn core_support_duality_on_the_example() {
        let cfg = cfg();
        let m = two_block_context();
        let q = p(&[1]);
        let c = core_projection(&m, &q, &cfg).unwrap();
        let s = support_projection(&m, &plattice::complement(&q, &cfg).unwrap(), &cfg).unwrap();
        let total = c.matrix().add(s.matrix());
        assert!(total.approx_eq(&HermitianOperator::identity(3), 1e-12));
    }

    #[test]
    fn core_support_match_brute_force_over_the_context_lattice() {
        let cfg = cfg();
        let mut rng = generate::rng(41);
        for _ in 0..25 {
            let dim = 4;
            let m = generate::random_context(dim, &mut rng, &cfg);
            let q = generate::random_projection(dim, &mut rng, &cfg);
            let all = crate::context::projections_in(&m).unwrap();

            let mut best_below = Projection::zero(dim);
            let mut best_above = Projection::identity(dim);
            for candidate in &all {
                if plattice::leq(candidate, &q, &cfg).unwrap()
                    && plattice::leq(&best_below, candidate, &cfg).unwrap()
                {
                    best_below = candidate.clone();
                }
                if plattice::leq(&q, candidate, &cfg).unwrap()
                    && plattice::leq(candidate, &best_above, &cfg).unwrap()
                {
                    best_above = candidate.clone();
                }
            }
            assert!(core_projection(&m, &q, &cfg).unwrap().approx_eq(&best_below, &cfg));
            assert!(support_projection(&m, &q, &cfg).unwrap().approx_eq(&best_above, &cfg));
        }
    }

    #[test]
    fn aspects_of_the_diagonal_example() {
        let cfg = cfg();
        let a = HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]);
        let m = two_block_context();

        let upper = upper_aspect(&m, &a, &cfg).unwrap();
        assert_eq!(upper.coefficients, vec![1.0, 3.0]);
        assert!(upper.operator.approx_eq(&HermitianOperator::from_real_diag(&[1.0, 3.0, 3.0]), 1e-12));

        let lower = lower_aspect(&m, &a, &cfg).unwrap();
        assert_eq!(lower.coefficients, vec![1.0, 2.0]);
        assert!(lower.operator.approx_eq(&HermitianOperator::from_real_diag(&[1.0, 2.0, 2.0]), 1e-12));

        // Trivial context: extremes of the spectrum.
        let trivial = AbelianContext::trivial(3);
        let top = upper_aspect(&trivial, &a, &cfg).unwrap();
        assert_eq!(top.coefficients, vec![3.0]);
        let bottom = lower_aspect(&trivial, &a, &cfg).unwrap();
        assert_eq!(bottom.coefficients, vec![1.0]);

        // Operators already in the span restrict to themselves.
        let inside = m.operator_from_coefficients(&[0.5, -2.0]);
        let fixed = upper_aspect(&m, &inside, &cfg).unwrap();
        assert!(fixed.operator.approx_eq(&inside, 1e-9));
    }

    #[test]
    fn aspects_sandwich_the_operator_spectrally() {
        let cfg = cfg();
        let mut rng = generate::rng(43);
        for _ in 0..20 {
            let dim = 4;
            let a = generate::random_hermitian(dim, &mut rng);
            let m = generate::random_context(dim, &mut rng, &cfg);
            let upper = upper_aspect(&m, &a, &cfg).unwrap();
            let lower = lower_aspect(&m, &a, &cfg).unwrap();
            assert!(spectral::spectral_leq(&a, &upper.operator, &cfg).unwrap());
            assert!(spectral::spectral_leq(&lower.operator, &a, &cfg).unwrap());
        }
    }

    #[test]
    fn mirror_identity_between_aspects() {
        let cfg = cfg();
        let mut rng = generate::rng(47);
        for _ in 0..20 {
            let dim = 4;
            let a = generate::random_hermitian(dim, &mut rng);
            let m = generate::random_context(dim, &mut rng, &cfg);
            let lower = lower_aspect(&m, &a, &cfg).unwrap();
            let mirrored = upper_aspect(&m, &a.neg(), &cfg).unwrap().operator.neg();
            assert!(lower.operator.approx_eq(&mirrored, 1e-9));
        }
    }

    #[test]
    fn definitional_routes_agree_with_the_atom_rule() {
        let cfg = cfg();
        let mut rng = generate::rng(53);
        for _ in 0..20 {
            let dim = 4;
            let a = generate::random_hermitian(dim, &mut rng);
            let m = generate::random_context(dim, &mut rng, &cfg);
            let upper = upper_aspect(&m, &a, &cfg).unwrap();
            let upper_def = upper_aspect_definitional(&m, &a, &cfg).unwrap();
            assert_eq!(upper.coefficients, upper_def.coefficients);
            let lower = lower_aspect(&m, &a, &cfg).unwrap();
            let lower_def = lower_aspect_definitional(&m, &a, &cfg).unwrap();
            assert_eq!(lower.coefficients, lower_def.coefficients);
        }
    }

    #[test]
    fn projections_restrict_to_their_support() {
        let cfg = cfg();
        let mut rng = generate::rng(59);
        for _ in 0..20 {
            let dim = 4;
            let q = generate::random_projection(dim, &mut rng, &cfg);
            let m = generate::random_context(dim, &mut rng, &cfg);
            let upper = upper_aspect(&m, q.matrix(), &cfg).unwrap();
            let support = support_projection(&m, &q, &cfg).unwrap();
            assert!(upper.operator.approx_eq(support.matrix(), 1e-9));
        }
    }

    #[test]
    fn corner_restriction_examples() {
        let cfg = cfg();
        let a = HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]);
        let q = p(&[0, 1]);
        let corner = corner_upper(&q, &a, &cfg).unwrap();
        assert_eq!(corner.jumps(), &[1.0, 2.0]);
        assert!(corner.cumulative()[0].approx_eq(&p(&[0]), &cfg));
        assert!(corner.cumulative()[1].approx_eq(&q, &cfg));
        assert!(corner.unit().approx_eq(&q, &cfg));

        // Unit corner reproduces the plain family.
        let full = corner_upper(&Projection::identity(3), &a, &cfg).unwrap();
        assert_eq!(full.jumps(), &[1.0, 2.0, 3.0]);

        // Identity compressed to a corner: single jump at 1 with value q.
        let id_corner = corner_upper(&q, &HermitianOperator::identity(3), &cfg).unwrap();
        assert_eq!(id_corner.jumps(), &[1.0]);
        assert!(id_corner.cumulative()[0].approx_eq(&q, &cfg));

        assert!(matches!(
            corner_upper(&Projection::zero(3), &a, &cfg),
            Err(Error::ZeroCorner)
        ));

        // Observable values on a corner family are only defined inside the
        // corner; outside projections are a reported error, not a panic.
        let outside = p(&[2]);
        assert!(spectral::observable_value_from_family(&corner, &outside, &cfg).is_err());
    }

    #[test]
    fn coarse_graining_example() {
        let cfg = cfg();
        let a = HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let graining = coarse_grain(&a, &[2.0, 4.0], &cfg).unwrap();
        assert_eq!(graining.upper.coefficients, vec![2.0, 4.0, 5.0]);
        assert!(graining
            .upper
            .operator
            .approx_eq(&HermitianOperator::from_real_diag(&[2.0, 2.0, 4.0, 4.0, 5.0]), 1e-12));
        assert_eq!(graining.lower.coefficients, vec![1.0, 3.0, 5.0]);
        assert!(graining
            .lower
            .operator
            .approx_eq(&HermitianOperator::from_real_diag(&[1.0, 1.0, 3.0, 3.0, 5.0]), 1e-12));

        // The classical lower sum takes the partition points instead.
        let riemann = riemann_lower_sum(&a, &[2.0, 4.0], &cfg).unwrap();
        assert!(riemann.approx_eq(&HermitianOperator::from_real_diag(&[1.0, 1.0, 2.0, 2.0, 4.0]), 1e-12));
    }

    #[test]
    fn coarse_graining_guards() {
        let cfg = cfg();
        let a = HermitianOperator::from_real_diag(&[1.0, 2.0]);
        // No point can be strictly inside the two-point spectrum.
        assert!(coarse_grain(&a, &[1.0], &cfg).is_err());
        assert!(coarse_grain(&a, &[2.0], &cfg).is_err());
        let b = HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            coarse_grain(&b, &[2.5], &cfg),
            Err(Error::PointNotInSpectrum { .. })
        ));
        assert!(matches!(coarse_grain(&b, &[], &cfg), Err(Error::BadPartitionPoints)));
    }
}
