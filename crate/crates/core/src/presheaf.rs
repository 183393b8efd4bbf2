//! Observable presheaves over a finite family of contexts: global sections,
//! the canonical section of an operator, section validation, the
//! three-dimensional counterexample section that no single operator induces,
//! gluing of sections to functions on projections, and the formal vector
//! space spanned by observable functions.
//!
//! "Global" is always relative to an explicit meet-closed family of contexts.
//! Validation is sound for the supplied family (violations are real);
//! refutation of inducibility for the counterexample is structural and does
//! not depend on the family size.

use crate::context::{self, AbelianContext};
use crate::linalg::{spectral_norm, HermitianOperator, ToleranceConfig};
use crate::plattice::{self, Projection};
use crate::restrict;
use crate::spectral::{self, SpectralFamily};
use crate::{Error, Result};

/// Which of the two observable presheaves is being worked in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AspectMode {
    Upper,
    Lower,
}

impl AspectMode {
    fn restrict(
        &self,
        m: &AbelianContext,
        family: &SpectralFamily,
        cfg: &ToleranceConfig,
    ) -> Result<restrict::AspectResult> {
        match self {
            AspectMode::Upper => restrict::upper_aspect_from_family(m, family, cfg),
            AspectMode::Lower => restrict::lower_aspect_from_family(m, family, cfg),
        }
    }
}

/// A finite family of contexts over one ambient dimension, closed under
/// pairwise meets and free of duplicates. The closure is computed at
/// construction.
#[derive(Debug, Clone)]
pub struct ContextFamily {
    ambient_dim: usize,
    contexts: Vec<AbelianContext>,
}

impl ContextFamily {
    pub fn new(
        ambient_dim: usize,
        contexts: Vec<AbelianContext>,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        if contexts.is_empty() {
            return Err(Error::Invalid("context family must be nonempty".into()));
        }
        let mut family: Vec<AbelianContext> = Vec::new();
        for ctx in contexts {
            if ctx.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    left: ctx.ambient_dim(),
                    right: ambient_dim,
                });
            }
            if !family.iter().any(|known| known.approx_eq(&ctx, cfg)) {
                family.push(ctx);
            }
        }
        // Meet closure: meets only coarsen, so the loop terminates.
        let mut frontier: Vec<AbelianContext> = family.clone();
        while !frontier.is_empty() {
            let mut added = Vec::new();
            for new_ctx in &frontier {
                for known in &family {
                    let m = context::context_meet(new_ctx, known, cfg)?;
                    if !family.iter().any(|k| k.approx_eq(&m, cfg))
                        && !added.iter().any(|k: &AbelianContext| k.approx_eq(&m, cfg))
                    {
                        added.push(m);
                    }
                }
            }
            family.extend(added.clone());
            frontier = added;
        }
        Ok(Self { ambient_dim, contexts: family })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn contexts(&self) -> &[AbelianContext] {
        &self.contexts
    }

    pub fn index_of(&self, ctx: &AbelianContext, cfg: &ToleranceConfig) -> Option<usize> {
        self.contexts.iter().position(|k| k.approx_eq(ctx, cfg))
    }
}

/// An assignment of a context operator to every context of a family.
/// Compatibility is not an invariant; it is what [`validate_section`] checks.
#[derive(Debug, Clone)]
pub struct GlobalSection {
    family: ContextFamily,
    values: Vec<HermitianOperator>,
}

impl GlobalSection {
    /// Requires one value per context, each in the span of its context.
    pub fn new(
        family: ContextFamily,
        values: Vec<HermitianOperator>,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        if values.len() != family.len() {
            return Err(Error::Invalid(format!(
                "section needs {} values, got {}",
                family.len(),
                values.len()
            )));
        }
        for (ctx, value) in family.contexts().iter().zip(&values) {
            ctx.coefficients_of(value, cfg)?;
        }
        Ok(Self { family, values })
    }

    pub fn family(&self) -> &ContextFamily {
        &self.family
    }

    pub fn values(&self) -> &[HermitianOperator] {
        &self.values
    }

    pub fn value(&self, index: usize) -> &HermitianOperator {
        &self.values[index]
    }
}

/// One failed compatibility constraint: the two context values disagree after
/// restriction to the meet context.
#[derive(Debug, Clone)]
pub struct Violation {
    pub context_a: usize,
    pub context_b: usize,
    pub defect: f64,
}

/// Outcome of validating a section over every unordered context pair.
#[derive(Debug, Clone)]
pub struct SectionValidation {
    pub ok: bool,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

/// The canonical section of an operator: restrict it into every context.
pub fn section_from_operator(
    a: &HermitianOperator,
    family: ContextFamily,
    mode: AspectMode,
    cfg: &ToleranceConfig,
) -> Result<GlobalSection> {
    if a.dim() != family.ambient_dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: family.ambient_dim() });
    }
    let spectral_family = spectral::family_from_operator(a, cfg)?;
    let values = family
        .contexts()
        .iter()
        .map(|ctx| Ok(mode.restrict(ctx, &spectral_family, cfg)?.operator))
        .collect::<Result<Vec<_>>>()?;
    GlobalSection::new(family, values, cfg)
}

/// Checks the compatibility law on every unordered pair: restricting both
/// values to the meet context must agree within `tol_compare`. Violations are
/// returned in lexicographic pair order.
pub fn validate_section(
    section: &GlobalSection,
    mode: AspectMode,
    cfg: &ToleranceConfig,
) -> Result<SectionValidation> {
    let contexts = section.family().contexts();
    let families: Vec<SpectralFamily> = section
        .values()
        .iter()
        .map(|v| spectral::family_from_operator(v, cfg))
        .collect::<Result<_>>()?;

    let mut violations = Vec::new();
    let mut pairs = 0;
    for i in 0..contexts.len() {
        for j in i + 1..contexts.len() {
            pairs += 1;
            let meet = context::context_meet(&contexts[i], &contexts[j], cfg)?;
            let via_i = mode.restrict(&meet, &families[i], cfg)?;
            let via_j = mode.restrict(&meet, &families[j], cfg)?;
            let defect = via_i.operator.matrix().max_norm_diff(via_j.operator.matrix());
            if defect > cfg.tol_compare {
                violations.push(Violation { context_a: i, context_b: j, defect });
            }
        }
    }
    Ok(SectionValidation { ok: violations.is_empty(), pairs_checked: pairs, violations })
}

/// The three-dimensional counterexample: a section of projections built from
/// two non-commuting lines, valid over any family yet induced by no operator.
#[derive(Debug, Clone)]
pub struct TwoLineSection {
    pub p1: Projection,
    pub p2: Projection,
    pub section: GlobalSection,
}

/// Builds the counterexample section over the given family in dimension 3:
/// a context containing `p1` (as a lattice element) gets `I - p1`, a context
/// containing `p2` gets `I - p2`, and every other context gets the identity.
pub fn c3_counterexample(
    p1: &Projection,
    p2: &Projection,
    family: ContextFamily,
    cfg: &ToleranceConfig,
) -> Result<TwoLineSection> {
    if family.ambient_dim() != 3 {
        return Err(Error::BadCounterexample {
            reason: format!("ambient dimension {} is not 3", family.ambient_dim()),
        });
    }
    if p1.rank() != 1 || p2.rank() != 1 {
        return Err(Error::BadCounterexample {
            reason: "both projections must have rank one".to_string(),
        });
    }
    if plattice::commutes(p1, p2, cfg)? {
        return Err(Error::BadCounterexample {
            reason: "the two projections must not commute".to_string(),
        });
    }
    let values = family
        .contexts()
        .iter()
        .map(|ctx| {
            let value = if ctx.contains_projection(p1, cfg)? {
                plattice::complement(p1, cfg)?.matrix().clone()
            } else if ctx.contains_projection(p2, cfg)? {
                plattice::complement(p2, cfg)?.matrix().clone()
            } else {
                HermitianOperator::identity(3)
            };
            Ok(value)
        })
        .collect::<Result<Vec<_>>>()?;
    let section = GlobalSection::new(family, values, cfg)?;
    Ok(TwoLineSection { p1: p1.clone(), p2: p2.clone(), section })
}

/// Certificate that no single operator induces the counterexample section.
#[derive(Debug, Clone)]
pub struct RefutationReport {
    /// Every section value is a projection, so an inducing operator would be one.
    pub all_values_are_projections: bool,
    /// An inducing projection must simultaneously equal these two operators.
    pub forced_by_p1: HermitianOperator,
    pub forced_by_p2: HermitianOperator,
    /// Operator norm of the difference of the two forced candidates.
    pub contradiction_norm: f64,
    /// Candidate checks: each forced candidate fails at a named context.
    pub candidate_i_minus_p1_violation: usize,
    pub candidate_i_minus_p2_violation: usize,
}

/// Structural refutation: any inducing operator must be a projection whose
/// complement is a line vanishing on the section, which forces it to equal
/// both `I - p1` and `I - p2` at once. The two candidates differ by a
/// positive operator norm, and each fails concretely at some context of the
/// family.
pub fn refute_inducing_operator(
    witness: &TwoLineSection,
    cfg: &ToleranceConfig,
) -> Result<RefutationReport> {
    let section = &witness.section;
    if witness.p1.approx_eq(&witness.p2, cfg) {
        return Err(Error::BadCounterexample {
            reason: "the two lines coincide".to_string(),
        });
    }
    let mut all_proj = true;
    for value in section.values() {
        if Projection::from_matrix(value.matrix().clone(), cfg).is_err() {
            all_proj = false;
        }
    }
    let forced_by_p1 = plattice::complement(&witness.p1, cfg)?.matrix().clone();
    let forced_by_p2 = plattice::complement(&witness.p2, cfg)?.matrix().clone();
    let gap = witness.p1.matrix().sub(witness.p2.matrix());
    let contradiction_norm = spectral_norm(&gap)?;
    if contradiction_norm <= cfg.tol_compare {
        return Err(Error::BadCounterexample {
            reason: "the two lines are numerically equal".to_string(),
        });
    }

    let v1 = is_induced_by(section, &forced_by_p1, AspectMode::Upper, cfg)?;
    let v2 = is_induced_by(section, &forced_by_p2, AspectMode::Upper, cfg)?;
    let (Some(c1), Some(c2)) = (v1.first_violation, v2.first_violation) else {
        return Err(Error::BadCounterexample {
            reason: "a forced candidate unexpectedly induces the section".to_string(),
        });
    };
    Ok(RefutationReport {
        all_values_are_projections: all_proj,
        forced_by_p1,
        forced_by_p2,
        contradiction_norm,
        candidate_i_minus_p1_violation: c1,
        candidate_i_minus_p2_violation: c2,
    })
}

/// Result of testing whether a fixed operator induces a section.
#[derive(Debug, Clone)]
pub struct InductionCheck {
    pub induces: bool,
    /// Index of the first context where the restriction disagrees.
    pub first_violation: Option<usize>,
    pub max_defect: f64,
}

/// Compares the canonical section of `candidate` against `section`,
/// context by context.
pub fn is_induced_by(
    section: &GlobalSection,
    candidate: &HermitianOperator,
    mode: AspectMode,
    cfg: &ToleranceConfig,
) -> Result<InductionCheck> {
    let family = spectral::family_from_operator(candidate, cfg)?;
    let mut first = None;
    let mut max_defect: f64 = 0.0;
    for (i, (ctx, value)) in
        section.family().contexts().iter().zip(section.values()).enumerate()
    {
        let restricted = mode.restrict(ctx, &family, cfg)?;
        let defect = restricted.operator.matrix().max_norm_diff(value.matrix());
        max_defect = max_defect.max(defect);
        if defect > cfg.tol_compare && first.is_none() {
            first = Some(i);
        }
    }
    Ok(InductionCheck { induces: first.is_none(), first_violation: first, max_defect })
}

/// Function table on the nonzero projections collected from every context of
/// a family: the glued form of a validated section.
#[derive(Debug, Clone)]
pub struct ObservableTable {
    ambient_dim: usize,
    entries: Vec<(Projection, f64)>,
}

impl ObservableTable {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn entries(&self) -> &[(Projection, f64)] {
        &self.entries
    }

    pub fn lookup(&self, p: &Projection, cfg: &ToleranceConfig) -> Option<f64> {
        self.entries.iter().find(|(q, _)| q.approx_eq(p, cfg)).map(|(_, v)| *v)
    }

    pub fn insert(&mut self, p: Projection, value: f64) {
        self.entries.push((p, value));
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self { ambient_dim, entries: Vec::new() }
    }
}

/// Glues a validated section to a single function on projections: the value
/// at `P` is the observable value of any context value whose context contains
/// `P`. Compatibility makes this independent of the chosen context; gluing an
/// unvalidated section is refused.
pub fn glue_section(section: &GlobalSection, cfg: &ToleranceConfig) -> Result<ObservableTable> {
    let validation = validate_section(section, AspectMode::Upper, cfg)?;
    if !validation.ok {
        let first = &validation.violations[0];
        return Err(Error::SectionInvalid {
            violations: validation.violations.len(),
            a: first.context_a,
            b: first.context_b,
        });
    }
    let mut table = ObservableTable::empty(section.family().ambient_dim());
    for (ctx, value) in section.family().contexts().iter().zip(section.values()) {
        let family = spectral::family_from_operator(value, cfg)?;
        for p in context::projections_in(ctx)? {
            if p.is_zero() {
                continue;
            }
            let r = spectral::observable_value_from_family(&family, &p, cfg)?;
            match table.lookup(&p, cfg) {
                Some(existing) => {
                    // Well-definedness across contexts is the glued content of
                    // compatibility; a mismatch here means the section was bad.
                    if (existing - r).abs() > cfg.tol_compare {
                        return Err(Error::Invalid(format!(
                            "glued value mismatch at a shared projection: {existing} vs {r}"
                        )));
                    }
                }
                None => table.insert(p, r),
            }
        }
    }
    Ok(table)
}

/// Rebuilds a section from a table: the value in each context is the operator
/// whose atom coefficients are the table values at the atoms. Requires the
/// table to cover every projection of every context and to satisfy the
/// commuting-sup law inside each context.
pub fn unglue(
    family: ContextFamily,
    table: &ObservableTable,
    cfg: &ToleranceConfig,
) -> Result<GlobalSection> {
    let mut values = Vec::with_capacity(family.len());
    for (index, ctx) in family.contexts().iter().enumerate() {
        let atoms = ctx.atoms();
        let atom_values: Vec<f64> = atoms
            .iter()
            .map(|atom| {
                table.lookup(atom, cfg).ok_or(Error::MissingTableEntry { context: index })
            })
            .collect::<Result<_>>()?;
        // Commuting-sup law: on every nonzero sum of atoms the table must take
        // the max over the summands.
        let m = atoms.len();
        for mask in 1u32..(1 << m) {
            let members: Vec<Projection> = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| atoms[i].clone())
                .collect();
            let joined = plattice::join_all(ctx.ambient_dim(), &members, cfg)?;
            let table_value = table
                .lookup(&joined, cfg)
                .ok_or(Error::MissingTableEntry { context: index })?;
            let expected = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| atom_values[i])
                .fold(f64::NEG_INFINITY, f64::max);
            if (table_value - expected).abs() > cfg.tol_compare {
                return Err(Error::SupLawViolation {
                    context: index,
                    joined: table_value,
                    expected,
                });
            }
        }
        values.push(ctx.operator_from_coefficients(&atom_values));
    }
    GlobalSection::new(family, values, cfg)
}

/// Naturality of the sign flip between the two presheaves on one operator:
/// the lower restriction must equal the negated upper restriction of the
/// negated operator, in every context of the family.
pub fn presheaf_iso_check(
    family: &ContextFamily,
    a: &HermitianOperator,
    cfg: &ToleranceConfig,
) -> Result<bool> {
    let pos = spectral::family_from_operator(a, cfg)?;
    let neg = spectral::family_from_operator(&a.neg(), cfg)?;
    for ctx in family.contexts() {
        let lower = restrict::lower_aspect_from_family(ctx, &pos, cfg)?;
        let mirrored = restrict::upper_aspect_from_family(ctx, &neg, cfg)?.operator.neg();
        if !lower.operator.approx_eq(&mirrored, cfg.tol_compare) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A formal signed combination of observable functions: element of the vector
/// space generated by the completely increasing functions. Evaluation is the
/// only semantics; an optional context tag restricts the evaluation domain.
#[derive(Debug, Clone)]
pub struct FormalObservable {
    terms: Vec<(f64, HermitianOperator)>,
    domain: Option<AbelianContext>,
}

impl FormalObservable {
    /// Signs must be +1 or -1; the term list must be nonempty.
    pub fn new(terms: Vec<(f64, HermitianOperator)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Invalid("formal observable needs at least one term".into()));
        }
        for (sign, _) in &terms {
            if *sign != 1.0 && *sign != -1.0 {
                return Err(Error::Invalid(format!("sign {sign} is not +1 or -1")));
            }
        }
        Ok(Self { terms, domain: None })
    }

    pub fn of_operator(a: HermitianOperator) -> Self {
        Self { terms: vec![(1.0, a)], domain: None }
    }

    pub fn terms(&self) -> &[(f64, HermitianOperator)] {
        &self.terms
    }

    pub fn domain(&self) -> Option<&AbelianContext> {
        self.domain.as_ref()
    }

    /// Formal sum (concatenation of term lists).
    pub fn add(&self, other: &FormalObservable) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.clone());
        let mut out = Self::new(terms)?;
        out.domain = self.domain.clone();
        Ok(out)
    }

    /// Group inverse: flip every sign.
    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(s, a)| (-s, a.clone())).collect(),
            domain: self.domain.clone(),
        }
    }
}

/// Evaluates the signed sum of observable values at a nonzero projection.
/// With a domain tag set, the projection must belong to that context.
pub fn formal_eval(
    fo: &FormalObservable,
    p: &Projection,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::ZeroProjection);
    }
    if let Some(domain) = fo.domain() {
        if !domain.contains_projection(p, cfg)? {
            return Err(Error::Invalid(
                "projection lies outside the restricted domain of the formal observable".into(),
            ));
        }
    }
    let mut total = 0.0;
    for (sign, a) in fo.terms() {
        total += sign * spectral::observable_value(a, p, cfg)?;
    }
    Ok(total)
}

/// Pointwise restriction of a formal observable to a context: evaluation is
/// simply limited to the projections of the context. The terms are untouched;
/// restriction here is the linear operation of the ambient presheaf.
pub fn formal_restrict(fo: &FormalObservable, ctx: &AbelianContext) -> FormalObservable {
    FormalObservable { terms: fo.terms.clone(), domain: Some(ctx.clone()) }
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

    fn three_context_family() -> ContextFamily {
        let cfg = cfg();
        let trivial = AbelianContext::trivial(3);
        let coarse = AbelianContext::new(3, vec![p(&[0]), p(&[1, 2])], &cfg).unwrap();
        let fine = AbelianContext::new(3, vec![p(&[0]), p(&[1]), p(&[2])], &cfg).unwrap();
        ContextFamily::new(3, vec![trivial, coarse, fine], &cfg).unwrap()
    }

    #[test]
    fn canonical_section_of_the_diagonal_example() {
        let cfg = cfg();
        let family = three_context_family();
        let a = HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]);

        let upper = section_from_operator(&a, family.clone(), AspectMode::Upper, &cfg).unwrap();
        let expected_upper = [
            HermitianOperator::scaled_identity(3, 3.0),
            HermitianOperator::from_real_diag(&[1.0, 3.0, 3.0]),
            HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]),
        ];
        for (value, expected) in upper.values().iter().zip(&expected_upper) {
            assert!(value.approx_eq(expected, 1e-12));
        }
        assert!(validate_section(&upper, AspectMode::Upper, &cfg).unwrap().ok);

        let lower = section_from_operator(&a, family.clone(), AspectMode::Lower, &cfg).unwrap();
        let expected_lower = [
            HermitianOperator::scaled_identity(3, 1.0),
            HermitianOperator::from_real_diag(&[1.0, 2.0, 2.0]),
            HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]),
        ];
        for (value, expected) in lower.values().iter().zip(&expected_lower) {
            assert!(value.approx_eq(expected, 1e-12));
        }
        assert!(validate_section(&lower, AspectMode::Lower, &cfg).unwrap().ok);

        // A constant multiple of the identity restricts to itself everywhere.
        let scalar = HermitianOperator::scaled_identity(3, 2.0);
        let constant =
            section_from_operator(&scalar, family, AspectMode::Upper, &cfg).unwrap();
        for value in constant.values() {
            assert!(value.approx_eq(&scalar, 1e-12));
        }
    }

    #[test]
    fn incompatible_section_is_flagged() {
        let cfg = cfg();
        let family = three_context_family();
        // diag(1,2,3) on the fine context forces 3I at the trivial context;
        // assigning 5I there must violate.
        let values: Vec<HermitianOperator> = family
            .contexts()
            .iter()
            .map(|ctx| {
                if ctx.is_trivial() {
                    HermitianOperator::scaled_identity(3, 5.0)
                } else if ctx.atom_count() == 3 {
                    HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0])
                } else {
                    HermitianOperator::from_real_diag(&[1.0, 3.0, 3.0])
                }
            })
            .collect();
        let section = GlobalSection::new(family, values, &cfg).unwrap();
        let validation = validate_section(&section, AspectMode::Upper, &cfg).unwrap();
        assert!(!validation.ok);
        assert!(!validation.violations.is_empty());
    }

    #[test]
    fn canonical_sections_validate_on_random_families() {
        let cfg = cfg();
        let mut rng = generate::rng(61);
        for case in 0..100 {
            let dim = 2 + case % 3;
            let contexts: Vec<AbelianContext> =
                (0..6).map(|_| generate::random_context(dim, &mut rng, &cfg)).collect();
            let family = ContextFamily::new(dim, contexts, &cfg).unwrap();
            let a = generate::random_hermitian(dim, &mut rng);
            for mode in [AspectMode::Upper, AspectMode::Lower] {
                let section = section_from_operator(&a, family.clone(), mode, &cfg).unwrap();
                let validation = validate_section(&section, mode, &cfg).unwrap();
                assert!(validation.ok, "violations: {:?}", validation.violations);
            }
        }
    }

    fn standard_two_lines() -> (Projection, Projection) {
        let d = 1.0 / 2f64.sqrt();
        let p1 = p(&[0]);
        let p2 = Projection::onto_line(vec![
            num_complex::Complex64::new(d, 0.0),
            num_complex::Complex64::new(d, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        (p1, p2)
    }

    #[test]
    fn counterexample_section_validates_and_is_refuted() {
        let cfg = cfg();
        let (p1, p2) = standard_two_lines();
        let mut rng = generate::rng(67);

        let mut contexts = vec![
            AbelianContext::trivial(3),
            context::context_from_commuting(3, std::slice::from_ref(&p1), &cfg).unwrap(),
            context::context_from_commuting(3, std::slice::from_ref(&p2), &cfg).unwrap(),
        ];
        for _ in 0..4 {
            contexts.push(generate::random_maximal_context_containing(&p1, &mut rng, &cfg));
            contexts.push(generate::random_maximal_context_containing(&p2, &mut rng, &cfg));
            contexts.push(generate::random_maximal_context(3, &mut rng, &cfg));
        }
        // Contexts inside both collections of the case split: generated by a
        // line orthogonal to the span of the two.
        let overlap = plattice::complement(
            &plattice::join(&p1, &p2, &cfg).unwrap(),
            &cfg,
        )
        .unwrap();
        contexts.push(context::context_from_commuting(3, std::slice::from_ref(&overlap), &cfg).unwrap());

        let family = ContextFamily::new(3, contexts, &cfg).unwrap();
        let witness = c3_counterexample(&p1, &p2, family, &cfg).unwrap();

        // Spot-check the assignment rule.
        for (ctx, value) in witness.section.family().contexts().iter().zip(witness.section.values()) {
            if ctx.contains_projection(&p1, &cfg).unwrap() {
                let expected = plattice::complement(&p1, &cfg).unwrap();
                assert!(value.approx_eq(expected.matrix(), 1e-9));
            } else if !ctx.contains_projection(&p2, &cfg).unwrap() {
                assert!(value.approx_eq(&HermitianOperator::identity(3), 1e-9));
            }
        }

        let validation = validate_section(&witness.section, AspectMode::Upper, &cfg).unwrap();
        assert!(validation.ok, "violations: {:?}", validation.violations);

        let report = refute_inducing_operator(&witness, &cfg).unwrap();
        assert!(report.all_values_are_projections);
        assert!((report.contradiction_norm - 1.0 / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn counterexample_guards() {
        let cfg = cfg();
        let (p1, _) = standard_two_lines();
        let family = three_context_family();
        // Equal lines violate the non-commutation precondition.
        assert!(c3_counterexample(&p1, &p1, family, &cfg).is_err());
    }

    #[test]
    fn glue_and_unglue_round_trip() {
        let cfg = cfg();
        let family = three_context_family();
        let a = HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]);
        let section = section_from_operator(&a, family.clone(), AspectMode::Upper, &cfg).unwrap();

        let table = glue_section(&section, &cfg).unwrap();
        assert_eq!(table.lookup(&p(&[1]), &cfg), Some(2.0));
        assert_eq!(table.lookup(&p(&[1, 2]), &cfg), Some(3.0));

        let rebuilt = unglue(family, &table, &cfg).unwrap();
        for (x, y) in rebuilt.values().iter().zip(section.values()) {
            assert!(x.approx_eq(y, 1e-9));
        }
    }

    #[test]
    fn glue_refuses_incompatible_sections() {
        let cfg = cfg();
        let family = three_context_family();
        let values: Vec<HermitianOperator> = family
            .contexts()
            .iter()
            .map(|ctx| {
                if ctx.is_trivial() {
                    HermitianOperator::scaled_identity(3, 5.0)
                } else if ctx.atom_count() == 3 {
                    HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0])
                } else {
                    HermitianOperator::from_real_diag(&[1.0, 3.0, 3.0])
                }
            })
            .collect();
        let section = GlobalSection::new(family, values, &cfg).unwrap();
        assert!(matches!(
            glue_section(&section, &cfg),
            Err(Error::SectionInvalid { .. })
        ));
    }

    #[test]
    fn unglue_rejects_sup_law_violations() {
        let cfg = cfg();
        let family = three_context_family();
        let a = HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]);
        let section = section_from_operator(&a, family.clone(), AspectMode::Upper, &cfg).unwrap();
        let mut table = glue_section(&section, &cfg).unwrap();
        // Corrupt the join entry below the max of its parts.
        let joined = p(&[1, 2]);
        for entry in table.entries.iter_mut() {
            if entry.0.approx_eq(&joined, &cfg) {
                entry.1 = 0.0;
            }
        }
        assert!(matches!(
            unglue(family, &table, &cfg),
            Err(Error::SupLawViolation { .. })
        ));
    }

    #[test]
    fn iso_check_between_the_presheaves() {
        let cfg = cfg();
        let family = three_context_family();
        assert!(presheaf_iso_check(&family, &HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]), &cfg)
            .unwrap());
        assert!(presheaf_iso_check(&family, &HermitianOperator::scaled_identity(3, -2.5), &cfg)
            .unwrap());

        let mut rng = generate::rng(71);
        let contexts: Vec<AbelianContext> =
            (0..5).map(|_| generate::random_context(4, &mut rng, &cfg)).collect();
        let family4 = ContextFamily::new(4, contexts, &cfg).unwrap();
        let a = generate::random_hermitian(4, &mut rng);
        assert!(presheaf_iso_check(&family4, &a, &cfg).unwrap());
    }

    #[test]
    fn formal_observables_add_but_break_complete_increasingness() {
        let cfg = cfg();
        // Orthogonal lines in dimension 3.
        let pp = p(&[0]);
        let qq = p(&[1]);
        let f = FormalObservable::of_operator(pp.matrix().clone());
        let h = FormalObservable::of_operator(qq.matrix().clone());
        let sum = f.add(&h).unwrap();

        let e = plattice::complement(&pp, &cfg).unwrap();
        let ff = plattice::complement(&qq, &cfg).unwrap();
        let joined = plattice::join(&e, &ff, &cfg).unwrap();

        assert_eq!(formal_eval(&sum, &e, &cfg).unwrap(), 1.0);
        assert_eq!(formal_eval(&sum, &ff, &cfg).unwrap(), 1.0);
        assert_eq!(formal_eval(&sum, &joined, &cfg).unwrap(), 2.0);

        // Single terms evaluate as plain observable values.
        let single = FormalObservable::of_operator(HermitianOperator::from_real_diag(&[
            1.0, 2.0, 3.0,
        ]));
        assert_eq!(formal_eval(&single, &p(&[1]), &cfg).unwrap(), 2.0);

        // f + (-f) vanishes everywhere.
        let zero = f.add(&f.neg()).unwrap();
        for test in [e, ff, joined, Projection::identity(3)] {
            assert_eq!(formal_eval(&zero, &test, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn formal_restriction_limits_the_domain() {
        let cfg = cfg();
        let ctx = AbelianContext::new(3, vec![p(&[0]), p(&[1, 2])], &cfg).unwrap();
        let f = FormalObservable::of_operator(HermitianOperator::from_real_diag(&[1.0, 2.0, 3.0]));
        let restricted = formal_restrict(&f, &ctx);
        assert!(formal_eval(&restricted, &p(&[0]), &cfg).is_ok());
        assert!(formal_eval(&restricted, &p(&[1]), &cfg).is_err());
    }
}
