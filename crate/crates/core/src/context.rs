//! Abelian subalgebras of `L(C^n)` as partitions of unity: the context
//! category (objects, inclusion, meet), quasipoints of a context and the
//! projection maps between quasipoint spaces.
//!
//! A context is stored as its list of atoms; the subalgebra itself is the
//! span, which in finite dimension is generated by its minimal projections.

use crate::linalg::{HermitianOperator, ToleranceConfig};
use crate::plattice::{self, Projection};
use crate::{Error, Result};

/// Cap on atom counts for exhaustive projection-lattice enumeration.
pub const MAX_ENUMERATED_ATOMS: usize = 20;

/// A partition of unity: pairwise orthogonal nonzero projections summing to I.
#[derive(Debug, Clone)]
pub struct AbelianContext {
    ambient_dim: usize,
    atoms: Vec<Projection>,
}

impl AbelianContext {
    pub fn new(ambient_dim: usize, atoms: Vec<Projection>, cfg: &ToleranceConfig) -> Result<Self> {
        if atoms.is_empty() || atoms.len() > ambient_dim {
            return Err(Error::InvalidContext {
                reason: format!("{} atoms in dimension {}", atoms.len(), ambient_dim),
            });
        }
        let mut total = HermitianOperator::zero(ambient_dim);
        for (i, atom) in atoms.iter().enumerate() {
            if atom.dim() != ambient_dim {
                return Err(Error::DimensionMismatch { left: atom.dim(), right: ambient_dim });
            }
            if atom.is_zero() {
                return Err(Error::InvalidContext { reason: format!("atom {i} is zero") });
            }
            total = total.add(atom.matrix());
            for (j, other) in atoms.iter().enumerate().skip(i + 1) {
                let prod = atom.matrix().matrix().matmul(other.matrix().matrix());
                if prod.max_norm() > cfg.tol_compare {
                    return Err(Error::InvalidContext {
                        reason: format!("atoms {i} and {j} are not orthogonal"),
                    });
                }
            }
        }
        if !total.approx_eq(&HermitianOperator::identity(ambient_dim), cfg.tol_compare) {
            return Err(Error::InvalidContext {
                reason: "atoms do not sum to the identity".to_string(),
            });
        }
        Ok(Self { ambient_dim, atoms })
    }

    /// The smallest context `C·I`.
    pub fn trivial(ambient_dim: usize) -> Self {
        Self { ambient_dim, atoms: vec![Projection::identity(ambient_dim)] }
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    #[inline]
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    #[inline]
    pub fn atoms(&self) -> &[Projection] {
        &self.atoms
    }

    pub fn is_trivial(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn is_maximal(&self) -> bool {
        self.atoms.len() == self.ambient_dim
    }

    /// Contexts are equal when their atom sets match within `tol_compare`.
    pub fn approx_eq(&self, other: &Self, cfg: &ToleranceConfig) -> bool {
        if self.ambient_dim != other.ambient_dim || self.atoms.len() != other.atoms.len() {
            return false;
        }
        let mut used = vec![false; other.atoms.len()];
        'outer: for atom in &self.atoms {
            for (j, candidate) in other.atoms.iter().enumerate() {
                if !used[j] && atom.approx_eq(candidate, cfg) {
                    used[j] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// Coefficients of an operator in the span of the atoms,
    /// or `NotInSpan` if reconstruction fails.
    pub fn coefficients_of(&self, op: &HermitianOperator, cfg: &ToleranceConfig) -> Result<Vec<f64>> {
        if op.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch { left: op.dim(), right: self.ambient_dim });
        }
        let coeffs: Vec<f64> = self
            .atoms
            .iter()
            .map(|atom| {
                let product = op.matrix().matmul(atom.matrix().matrix());
                product.trace().re / atom.rank() as f64
            })
            .collect();
        let rebuilt = self.operator_from_coefficients(&coeffs);
        let defect = rebuilt.matrix().max_norm_diff(op.matrix());
        if defect > (100.0 * cfg.tol_compare).max(1e-7) {
            return Err(Error::NotInSpan { defect });
        }
        Ok(coeffs)
    }

    pub fn operator_from_coefficients(&self, coeffs: &[f64]) -> HermitianOperator {
        debug_assert_eq!(coeffs.len(), self.atoms.len());
        let mut acc = HermitianOperator::zero(self.ambient_dim);
        for (c, atom) in coeffs.iter().zip(&self.atoms) {
            acc = acc.add(&atom.matrix().scale(*c));
        }
        acc
    }

    /// Whether `p` belongs to the projection lattice of this context,
    /// i.e. is a sum of atoms.
    pub fn contains_projection(&self, p: &Projection, cfg: &ToleranceConfig) -> Result<bool> {
        if p.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch { left: p.dim(), right: self.ambient_dim });
        }
        let mut sum = HermitianOperator::zero(self.ambient_dim);
        for atom in &self.atoms {
            if plattice::leq(atom, p, cfg)? {
                sum = sum.add(atom.matrix());
            }
        }
        Ok(sum.approx_eq(p.matrix(), (100.0 * cfg.tol_compare).max(1e-7)))
    }
}

/// An atomic quasipoint of a context: the dual ideal generated by one atom.
#[derive(Debug, Clone)]
pub struct Quasipoint {
    context: AbelianContext,
    atom_index: usize,
}

impl Quasipoint {
    pub fn new(context: AbelianContext, atom_index: usize) -> Result<Self> {
        if atom_index >= context.atom_count() {
            return Err(Error::BadQuasipoint { index: atom_index, atoms: context.atom_count() });
        }
        Ok(Self { context, atom_index })
    }

    pub fn context(&self) -> &AbelianContext {
        &self.context
    }

    pub fn atom_index(&self) -> usize {
        self.atom_index
    }

    pub fn atom(&self) -> &Projection {
        &self.context.atoms()[self.atom_index]
    }
}

/// Generated context of a family of commuting projections: the common
/// refinement `Π Q_i^{ε_i}`, dropping zero cells. The empty family yields the
/// trivial context. Every input projection is a sum of the returned atoms.
pub fn context_from_commuting(
    dim: usize,
    projs: &[Projection],
    cfg: &ToleranceConfig,
) -> Result<AbelianContext> {
    for (i, p) in projs.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch { left: p.dim(), right: dim });
        }
        for (j, q) in projs.iter().enumerate().skip(i + 1) {
            let pq = p.matrix().matrix().matmul(q.matrix().matrix());
            let qp = q.matrix().matrix().matmul(p.matrix().matrix());
            let norm = pq.max_norm_diff(&qp);
            if norm > cfg.tol_compare {
                return Err(Error::NonCommutingPair { i, j, norm });
            }
        }
    }
    let mut cells = vec![Projection::identity(dim)];
    for q in projs {
        let q_complement = plattice::complement(q, cfg)?;
        let mut refined = Vec::with_capacity(cells.len() * 2);
        for cell in &cells {
            let with = plattice::meet(cell, q, cfg)?;
            if !with.is_zero() {
                refined.push(with);
            }
            let without = plattice::meet(cell, &q_complement, cfg)?;
            if !without.is_zero() {
                refined.push(without);
            }
        }
        cells = refined;
    }
    AbelianContext::new(dim, cells, cfg)
}

/// Context generated by a single Hermitian operator: its eigenprojections.
pub fn context_from_operator(
    a: &HermitianOperator,
    cfg: &ToleranceConfig,
) -> Result<AbelianContext> {
    let atoms = crate::linalg::eigh(a, cfg)?.into_iter().map(|pair| pair.projection).collect();
    AbelianContext::new(a.dim(), atoms, cfg)
}

/// Inclusion `a ⊆ b` of subalgebras: every atom of `a` is a sum of atoms of
/// `b` (`b` refines `a`).
pub fn includes(a: &AbelianContext, b: &AbelianContext, cfg: &ToleranceConfig) -> Result<bool> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch { left: a.ambient_dim(), right: b.ambient_dim() });
    }
    for coarse in a.atoms() {
        if !b.contains_projection(coarse, cfg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Meet of two contexts: the intersection of the two subalgebras.
///
/// Atoms of the meet are the sums over connected components of the bipartite
/// overlap graph linking an `a`-atom to a `b`-atom when their product is
/// nonzero.
pub fn context_meet(
    a: &AbelianContext,
    b: &AbelianContext,
    cfg: &ToleranceConfig,
) -> Result<AbelianContext> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch { left: a.ambient_dim(), right: b.ambient_dim() });
    }
    let na = a.atom_count();
    let nb = b.atom_count();
    // Union-find over a-atoms [0, na) and b-atoms [na, na + nb).
    let mut parent: Vec<usize> = (0..na + nb).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, pa) in a.atoms().iter().enumerate() {
        for (j, pb) in b.atoms().iter().enumerate() {
            let prod = pa.matrix().matrix().matmul(pb.matrix().matrix());
            if prod.max_norm() > cfg.tol_compare {
                let ra = find(&mut parent, i);
                let rb = find(&mut parent, na + j);
                parent[ra] = rb;
            }
        }
    }
    let mut components: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..na {
        let root = find(&mut parent, i);
        components.entry(root).or_default().push(i);
    }
    let atoms: Vec<Projection> = components
        .values()
        .map(|a_indices| {
            let members: Vec<Projection> =
                a_indices.iter().map(|&i| a.atoms()[i].clone()).collect();
            sum_of_orthogonal(&members)
        })
        .collect();
    AbelianContext::new(a.ambient_dim(), atoms, cfg)
}

/// Sum of pairwise orthogonal projections, assembled on the basis level.
fn sum_of_orthogonal(projs: &[Projection]) -> Projection {
    let dim = projs[0].dim();
    let mut columns = Vec::new();
    for p in projs {
        columns.extend(p.range().basis().iter().cloned());
    }
    let cfg = ToleranceConfig::default();
    Projection::from_subspace(
        crate::linalg::Subspace::from_orthonormal(dim, columns, &cfg)
            .expect("orthogonal ranges concatenate to an orthonormal basis"),
    )
}

/// All `2^m` projections of the context: sums over atom subsets, including 0
/// and I. Capped at `MAX_ENUMERATED_ATOMS` atoms.
pub fn projections_in(a: &AbelianContext) -> Result<Vec<Projection>> {
    let m = a.atom_count();
    if m > MAX_ENUMERATED_ATOMS {
        return Err(Error::TooManyAtoms { atoms: m, cap: MAX_ENUMERATED_ATOMS });
    }
    let mut out = Vec::with_capacity(1 << m);
    for mask in 0u32..(1 << m) {
        let members: Vec<Projection> = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| a.atoms()[i].clone())
            .collect();
        if members.is_empty() {
            out.push(Projection::zero(a.ambient_dim()));
        } else {
            out.push(sum_of_orthogonal(&members));
        }
    }
    Ok(out)
}

/// The restriction map between quasipoint spaces for `a ⊆ b`: an atomic
/// quasipoint of `b` maps to the unique `a`-atom dominating its atom.
pub fn quasipoint_project(
    b: &AbelianContext,
    a: &AbelianContext,
    q: &Quasipoint,
    cfg: &ToleranceConfig,
) -> Result<Quasipoint> {
    if !includes(a, b, cfg)? {
        return Err(Error::NotIncluded { atom: 0 });
    }
    if !q.context().approx_eq(b, cfg) {
        return Err(Error::Invalid("quasipoint does not belong to the finer context".into()));
    }
    for (i, coarse) in a.atoms().iter().enumerate() {
        if plattice::leq(q.atom(), coarse, cfg)? {
            return Quasipoint::new(a.clone(), i);
        }
    }
    Err(Error::InvalidContext { reason: "no atom dominates the quasipoint".to_string() })
}

/// Fibre of the quasipoint restriction over the `i`-th atom of `a`: all
/// `b`-atoms below it, in index order. Fibres are nonempty and partition the
/// quasipoints of `b`.
pub fn fiber(
    b: &AbelianContext,
    a: &AbelianContext,
    atom_index: usize,
    cfg: &ToleranceConfig,
) -> Result<Vec<Quasipoint>> {
    if !includes(a, b, cfg)? {
        return Err(Error::NotIncluded { atom: atom_index });
    }
    if atom_index >= a.atom_count() {
        return Err(Error::BadQuasipoint { index: atom_index, atoms: a.atom_count() });
    }
    let coarse = &a.atoms()[atom_index];
    let mut out = Vec::new();
    for (j, fine) in b.atoms().iter().enumerate() {
        if plattice::leq(fine, coarse, cfg)? {
            out.push(Quasipoint::new(b.clone(), j)?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidContext { reason: "empty fibre under inclusion".to_string() });
    }
    Ok(out)
}

/// Convenience: the context refinement order as a partial order test used by
/// chain constructions (`a ⊆ b ⊆ c`).
pub fn is_chain(contexts: &[&AbelianContext], cfg: &ToleranceConfig) -> Result<bool> {
    for pair in contexts.windows(2) {
        if !includes(pair[0], pair[1], cfg)? {
            return Ok(false);
        }
    }
    Ok(true)
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

    #[test]
    fn generated_context_of_one_projection() {
        let cfg = cfg();
        let ctx = context_from_commuting(3, &[p(&[0])], &cfg).unwrap();
        assert_eq!(ctx.atom_count(), 2);
        let expected = AbelianContext::new(3, vec![p(&[0]), p(&[1, 2])], &cfg).unwrap();
        assert!(ctx.approx_eq(&expected, &cfg));
    }

    #[test]
    fn generated_context_refines_nested_projections() {
        let cfg = cfg();
        let ctx = context_from_commuting(3, &[p(&[0]), p(&[0, 1])], &cfg).unwrap();
        let expected = AbelianContext::new(3, vec![p(&[0]), p(&[1]), p(&[2])], &cfg).unwrap();
        assert!(ctx.approx_eq(&expected, &cfg));
        // Every input is a sum of atoms of the result.
        assert!(ctx.contains_projection(&p(&[0]), &cfg).unwrap());
        assert!(ctx.contains_projection(&p(&[0, 1]), &cfg).unwrap());
    }

    #[test]
    fn empty_family_generates_the_trivial_context() {
        let cfg = cfg();
        let ctx = context_from_commuting(3, &[], &cfg).unwrap();
        assert!(ctx.is_trivial());
    }

    #[test]
    fn non_commuting_generators_are_rejected_with_indices() {
        let cfg = cfg();
        let d = 1.0 / 2f64.sqrt();
        let slanted = Projection::onto_line(vec![
            num_complex::Complex64::new(d, 0.0),
            num_complex::Complex64::new(d, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        let err = context_from_commuting(3, &[p(&[0]), slanted], &cfg).unwrap_err();
        assert!(matches!(err, Error::NonCommutingPair { i: 0, j: 1, .. }));
    }

    #[test]
    fn context_from_operator_clusters_degenerate_eigenvalues() {
        let cfg = cfg();
        let ctx =
            context_from_operator(&HermitianOperator::from_real_diag(&[1.0, 1.0, 2.0]), &cfg)
                .unwrap();
        let expected = AbelianContext::new(3, vec![p(&[0, 1]), p(&[2])], &cfg).unwrap();
        assert!(ctx.approx_eq(&expected, &cfg));

        let full = context_from_operator(&HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]), &cfg)
            .unwrap();
        assert!(full.is_maximal());

        let trivial = context_from_operator(&HermitianOperator::identity(3), &cfg).unwrap();
        assert!(trivial.is_trivial());
    }

    #[test]
    fn inclusion_examples() {
        let cfg = cfg();
        let trivial = AbelianContext::trivial(3);
        let coarse = AbelianContext::new(3, vec![p(&[0]), p(&[1, 2])], &cfg).unwrap();
        let fine = AbelianContext::new(3, vec![p(&[0]), p(&[1]), p(&[2])], &cfg).unwrap();
        let other = AbelianContext::new(3, vec![p(&[0, 1]), p(&[2])], &cfg).unwrap();

        assert!(includes(&trivial, &coarse, &cfg).unwrap());
        assert!(includes(&trivial, &fine, &cfg).unwrap());
        assert!(includes(&coarse, &fine, &cfg).unwrap());
        assert!(!includes(&coarse, &other, &cfg).unwrap());
    }

    #[test]
    fn meet_examples() {
        let cfg = cfg();
        let fine = AbelianContext::new(3, vec![p(&[0]), p(&[1]), p(&[2])], &cfg).unwrap();
        let coarse = AbelianContext::new(3, vec![p(&[0]), p(&[1, 2])], &cfg).unwrap();
        let other = AbelianContext::new(3, vec![p(&[0, 1]), p(&[2])], &cfg).unwrap();

        let m1 = context_meet(&fine, &coarse, &cfg).unwrap();
        assert!(m1.approx_eq(&coarse, &cfg));

        let m2 = context_meet(&coarse, &other, &cfg).unwrap();
        assert!(m2.is_trivial());

        let m3 = context_meet(&fine, &fine, &cfg).unwrap();
        assert!(m3.approx_eq(&fine, &cfg));
    }

    #[test]
    fn meet_is_the_greatest_lower_bound_on_coordinate_contexts() {
        // Exhaustive over partitions of a four-element coordinate basis.
        let cfg = cfg();
        let contexts: Vec<AbelianContext> = generate::all_partitions(4)
            .iter()
            .map(|partition| generate::coordinate_context(4, partition))
            .collect();
        for a in &contexts {
            for b in &contexts {
                let m = context_meet(a, b, &cfg).unwrap();
                assert!(includes(&m, a, &cfg).unwrap());
                assert!(includes(&m, b, &cfg).unwrap());
                for lower in &contexts {
                    if includes(lower, a, &cfg).unwrap() && includes(lower, b, &cfg).unwrap() {
                        assert!(includes(lower, &m, &cfg).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn projection_enumeration() {
        let cfg = cfg();
        let trivial = AbelianContext::trivial(3);
        let two = projections_in(&trivial).unwrap();
        assert_eq!(two.len(), 2);

        let partition: Vec<Vec<usize>> = (0..21).map(|i| vec![i]).collect();
        let oversized = generate::coordinate_context(21, &partition);
        assert!(matches!(
            projections_in(&oversized),
            Err(Error::TooManyAtoms { atoms: 21, cap: 20 })
        ));

        let fine = AbelianContext::new(3, vec![p(&[0]), p(&[1]), p(&[2])], &cfg).unwrap();
        let eight = projections_in(&fine).unwrap();
        assert_eq!(eight.len(), 8);
        // Closed under complement, meet and join: a finite Boolean algebra.
        for x in &eight {
            let c = plattice::complement(x, &cfg).unwrap();
            assert!(eight.iter().any(|y| y.approx_eq(&c, &cfg)));
            for y in &eight {
                let m = plattice::meet(x, y, &cfg).unwrap();
                let j = plattice::join(x, y, &cfg).unwrap();
                assert!(eight.iter().any(|z| z.approx_eq(&m, &cfg)));
                assert!(eight.iter().any(|z| z.approx_eq(&j, &cfg)));
            }
        }
    }

    #[test]
    fn quasipoint_projection_and_fibers() {
        let cfg = cfg();
        let fine = AbelianContext::new(3, vec![p(&[0]), p(&[1]), p(&[2])], &cfg).unwrap();
        let coarse = AbelianContext::new(3, vec![p(&[0]), p(&[1, 2])], &cfg).unwrap();

        let q_e2 = Quasipoint::new(fine.clone(), 1).unwrap();
        let image = quasipoint_project(&fine, &coarse, &q_e2, &cfg).unwrap();
        assert_eq!(image.atom_index(), 1);

        // Identity on the same context.
        let same = quasipoint_project(&fine, &fine, &q_e2, &cfg).unwrap();
        assert_eq!(same.atom_index(), 1);

        // Constant onto the trivial context.
        let trivial = AbelianContext::trivial(3);
        for i in 0..3 {
            let q = Quasipoint::new(fine.clone(), i).unwrap();
            let image = quasipoint_project(&fine, &trivial, &q, &cfg).unwrap();
            assert_eq!(image.atom_index(), 0);
        }

        let f = fiber(&fine, &coarse, 1, &cfg).unwrap();
        let indices: Vec<usize> = f.iter().map(|q| q.atom_index()).collect();
        assert_eq!(indices, vec![1, 2]);

        // Singleton fibres when the contexts coincide, one big fibre over the
        // trivial context.
        assert_eq!(fiber(&fine, &fine, 2, &cfg).unwrap().len(), 1);
        assert_eq!(fiber(&fine, &trivial, 0, &cfg).unwrap().len(), 3);

        // Surjectivity: every coarse atom has a nonempty fibre.
        for i in 0..coarse.atom_count() {
            assert!(!fiber(&fine, &coarse, i, &cfg).unwrap().is_empty());
        }
    }

    #[test]
    fn quasipoint_projection_is_functorial_on_chains() {
        let cfg = cfg();
        let mut rng = generate::rng(31);
        for _ in 0..10 {
            let u = generate::random_unitary(4, &mut rng);
            let fine_partition: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
            let c_fine = generate::context_from_unitary(4, &u, &fine_partition, &cfg);
            let c_mid = generate::context_from_unitary(4, &u, &[vec![0, 1], vec![2], vec![3]], &cfg);
            let c_coarse = generate::context_from_unitary(4, &u, &[vec![0, 1], vec![2, 3]], &cfg);
            assert!(is_chain(&[&c_coarse, &c_mid, &c_fine], &cfg).unwrap());

            for i in 0..c_fine.atom_count() {
                let q = Quasipoint::new(c_fine.clone(), i).unwrap();
                let direct = quasipoint_project(&c_fine, &c_coarse, &q, &cfg).unwrap();
                let via_mid = quasipoint_project(
                    &c_mid,
                    &c_coarse,
                    &quasipoint_project(&c_fine, &c_mid, &q, &cfg).unwrap(),
                    &cfg,
                )
                .unwrap();
                assert_eq!(direct.atom_index(), via_mid.atom_index());
            }
        }
    }
}
