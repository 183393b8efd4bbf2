//! States from the presheaf perspective: per-context states, restriction,
//! state sections, extension of finitely additive measures to linear
//! functionals, the measure/state correspondence, the two-dimensional
//! counterexample section that no linear state induces, density-matrix
//! fitting, point measures versus vector states, and quasistates.

use num_complex::Complex64;

use crate::context::{self, AbelianContext, Quasipoint};
use crate::linalg::{eigh_raw, ComplexMatrix, HermitianOperator, Subspace, ToleranceConfig};
use crate::plattice::Projection;
use crate::presheaf::ContextFamily;
use crate::spectral;
use crate::{generate, Error, Result};

/// A state of one context: a probability weight per atom. Equivalently a
/// probability measure on the (finite, atomic) quasipoint space.
#[derive(Debug, Clone)]
pub struct ContextState {
    context: AbelianContext,
    weights: Vec<f64>,
}

impl ContextState {
    pub fn new(context: AbelianContext, weights: Vec<f64>, cfg: &ToleranceConfig) -> Result<Self> {
        if weights.len() != context.atom_count() {
            return Err(Error::InvalidState {
                reason: format!(
                    "{} weights for {} atoms",
                    weights.len(),
                    context.atom_count()
                ),
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > (100.0 * cfg.tol_compare).max(1e-7) {
            return Err(Error::InvalidState { reason: format!("weights sum to {total}") });
        }
        if let Some(w) = weights.iter().find(|w| **w < -cfg.tol_compare) {
            return Err(Error::InvalidState { reason: format!("negative weight {w}") });
        }
        Ok(Self { context, weights })
    }

    pub fn dirac(context: AbelianContext, atom_index: usize) -> Result<Self> {
        if atom_index >= context.atom_count() {
            return Err(Error::BadQuasipoint { index: atom_index, atoms: context.atom_count() });
        }
        let mut weights = vec![0.0; context.atom_count()];
        weights[atom_index] = 1.0;
        Ok(Self { context, weights })
    }

    /// Tracial state: weights proportional to atom ranks.
    pub fn tracial(context: AbelianContext) -> Self {
        let dim = context.ambient_dim() as f64;
        let weights = context.atoms().iter().map(|p| p.rank() as f64 / dim).collect();
        Self { context, weights }
    }

    pub fn context(&self) -> &AbelianContext {
        &self.context
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Value of the state on an operator in the span of its context.
    pub fn eval(&self, op: &HermitianOperator, cfg: &ToleranceConfig) -> Result<f64> {
        let coeffs = self.context.coefficients_of(op, cfg)?;
        Ok(coeffs.iter().zip(&self.weights).map(|(c, w)| c * w).sum())
    }

    /// Value on a projection of the context: the sum of the weights of the
    /// atoms below it.
    pub fn eval_projection(&self, p: &Projection, cfg: &ToleranceConfig) -> Result<f64> {
        let mut total = 0.0;
        let mut covered = HermitianOperator::zero(self.context.ambient_dim());
        for (atom, w) in self.context.atoms().iter().zip(&self.weights) {
            if crate::plattice::leq(atom, p, cfg)? {
                total += w;
                covered = covered.add(atom.matrix());
            }
        }
        if !covered.approx_eq(p.matrix(), (100.0 * cfg.tol_compare).max(1e-7)) {
            return Err(Error::NotInSpan {
                defect: covered.matrix().max_norm_diff(p.matrix().matrix()),
            });
        }
        Ok(total)
    }
}

/// Restriction of a state along a context inclusion `a ⊆ b`: the weight of an
/// `a`-atom is the sum of the weights over its fibre of `b`-atoms. This is
/// both the functional restriction and the pushforward of the measure.
pub fn restrict_state(
    b_state: &ContextState,
    a: &AbelianContext,
    cfg: &ToleranceConfig,
) -> Result<ContextState> {
    let b = b_state.context();
    if !context::includes(a, b, cfg)? {
        return Err(Error::NotIncluded { atom: 0 });
    }
    let mut weights = Vec::with_capacity(a.atom_count());
    for i in 0..a.atom_count() {
        let fibre = context::fiber(b, a, i, cfg)?;
        weights.push(fibre.iter().map(|q| b_state.weights()[q.atom_index()]).sum());
    }
    ContextState::new(a.clone(), weights, cfg)
}

/// Lift of a state along `a ⊆ b` by proportional fibre splitting: each
/// `a`-weight is distributed over its fibre proportionally to atom rank.
/// Restricting the lift recovers the original state, which realizes the
/// surjectivity of state restriction.
pub fn lift_state(
    a_state: &ContextState,
    b: &AbelianContext,
    cfg: &ToleranceConfig,
) -> Result<ContextState> {
    let a = a_state.context();
    if !context::includes(a, b, cfg)? {
        return Err(Error::NotIncluded { atom: 0 });
    }
    let mut weights = vec![0.0; b.atom_count()];
    for (i, coarse) in a.atoms().iter().enumerate() {
        let fibre = context::fiber(b, a, i, cfg)?;
        let total_rank = coarse.rank() as f64;
        for q in &fibre {
            weights[q.atom_index()] =
                a_state.weights()[i] * (q.atom().rank() as f64 / total_rank);
        }
    }
    ContextState::new(b.clone(), weights, cfg)
}

/// An assignment of a context state to every context of a family.
#[derive(Debug, Clone)]
pub struct StateSection {
    family: ContextFamily,
    states: Vec<ContextState>,
}

impl StateSection {
    pub fn new(family: ContextFamily, states: Vec<ContextState>, cfg: &ToleranceConfig) -> Result<Self> {
        if states.len() != family.len() {
            return Err(Error::Invalid(format!(
                "state section needs {} states, got {}",
                family.len(),
                states.len()
            )));
        }
        for (ctx, state) in family.contexts().iter().zip(&states) {
            if !state.context().approx_eq(ctx, cfg) {
                return Err(Error::Invalid(
                    "state attached to the wrong context".to_string(),
                ));
            }
        }
        Ok(Self { family, states })
    }

    pub fn family(&self) -> &ContextFamily {
        &self.family
    }

    pub fn states(&self) -> &[ContextState] {
        &self.states
    }

    /// Section induced by a density matrix: per-context weights `tr(rho P_i)`.
    pub fn from_density(
        family: ContextFamily,
        rho: &HermitianOperator,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        let states = family
            .contexts()
            .iter()
            .map(|ctx| {
                let weights = ctx
                    .atoms()
                    .iter()
                    .map(|atom| rho.matrix().matmul(atom.matrix().matrix()).trace().re)
                    .collect();
                ContextState::new(ctx.clone(), weights, cfg)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(family, states, cfg)
    }
}

/// One failed compatibility constraint between two context states.
#[derive(Debug, Clone)]
pub struct StateViolation {
    pub context_a: usize,
    pub context_b: usize,
    pub defect: f64,
}

#[derive(Debug, Clone)]
pub struct StateSectionValidation {
    pub ok: bool,
    pub pairs_checked: usize,
    pub violations: Vec<StateViolation>,
}

/// Pairwise meet-compatibility of the states of a section: both restrictions
/// to the meet context must carry the same weights within `tol_compare`.
pub fn validate_state_section(
    section: &StateSection,
    cfg: &ToleranceConfig,
) -> Result<StateSectionValidation> {
    let contexts = section.family().contexts();
    let mut violations = Vec::new();
    let mut pairs = 0;
    for i in 0..contexts.len() {
        for j in i + 1..contexts.len() {
            pairs += 1;
            let meet = context::context_meet(&contexts[i], &contexts[j], cfg)?;
            let via_i = restrict_state(&section.states()[i], &meet, cfg)?;
            let via_j = restrict_state(&section.states()[j], &meet, cfg)?;
            let defect = via_i
                .weights()
                .iter()
                .zip(via_j.weights())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            if defect > cfg.tol_compare {
                violations.push(StateViolation { context_a: i, context_b: j, defect });
            }
        }
    }
    Ok(StateSectionValidation { ok: violations.is_empty(), pairs_checked: pairs, violations })
}

/// A finitely additive `[0, 1]`-valued function on a finite set of
/// projections, with lookup by matrix equality.
#[derive(Debug, Clone)]
pub struct ProjectionMeasure {
    entries: Vec<(Projection, f64)>,
}

impl ProjectionMeasure {
    pub fn from_pairs(entries: Vec<(Projection, f64)>, cfg: &ToleranceConfig) -> Result<Self> {
        for (p, v) in &entries {
            if *v < -cfg.tol_compare || *v > 1.0 + cfg.tol_compare {
                return Err(Error::InvalidMeasure {
                    reason: format!("value {v} outside [0,1] on a rank {} projection", p.rank()),
                });
            }
        }
        Ok(Self { entries })
    }

    /// The measure `P ↦ tr(rho P)` on a given domain of projections.
    pub fn from_density(
        rho: &HermitianOperator,
        domain: &[Projection],
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        let entries = domain
            .iter()
            .map(|p| {
                let v = rho.matrix().matmul(p.matrix().matrix()).trace().re;
                (p.clone(), v.clamp(0.0, 1.0))
            })
            .collect();
        Self::from_pairs(entries, cfg)
    }

    pub fn lookup(&self, p: &Projection, cfg: &ToleranceConfig) -> Option<f64> {
        self.entries.iter().find(|(q, _)| q.approx_eq(p, cfg)).map(|(_, v)| *v)
    }

    pub fn entries(&self) -> &[(Projection, f64)] {
        &self.entries
    }

    /// Union of the projection lattices of every context of a family:
    /// the domain a measure must cover to induce a state section.
    pub fn domain_for_family(family: &ContextFamily, cfg: &ToleranceConfig) -> Result<Vec<Projection>> {
        let mut domain: Vec<Projection> = Vec::new();
        for ctx in family.contexts() {
            for p in context::projections_in(ctx)? {
                if !domain.iter().any(|q| q.approx_eq(&p, cfg)) {
                    domain.push(p);
                }
            }
        }
        Ok(domain)
    }
}

/// The positive normalized linear functional on the span of a context
/// obtained by extending a measure: determined by its values on the atoms.
#[derive(Debug, Clone)]
pub struct ContextFunctional {
    context: AbelianContext,
    atom_values: Vec<f64>,
}

impl ContextFunctional {
    pub fn context(&self) -> &AbelianContext {
        &self.context
    }

    pub fn atom_values(&self) -> &[f64] {
        &self.atom_values
    }

    /// Evaluation on an operator in the span: sum of coefficient times
    /// atom value over any normalized representation.
    pub fn eval(&self, op: &HermitianOperator, cfg: &ToleranceConfig) -> Result<f64> {
        let coeffs = self.context.coefficients_of(op, cfg)?;
        Ok(coeffs.iter().zip(&self.atom_values).map(|(c, v)| c * v).sum())
    }

    pub fn as_state(&self, cfg: &ToleranceConfig) -> Result<ContextState> {
        ContextState::new(self.context.clone(), self.atom_values.clone(), cfg)
    }
}

fn describe_atoms(mask: u32, atom_count: usize) -> String {
    let indices: Vec<String> =
        (0..atom_count).filter(|i| mask & (1 << i) != 0).map(|i| i.to_string()).collect();
    format!("atoms{{{}}}", indices.join(","))
}

/// Extends a measure on the projection lattice of one context to the linear
/// functional on its span.
///
/// Requires the measure to cover all `2^m` projections of the context, to be
/// finitely additive on them, and to be normalized. Additivity failures name
/// the violating orthogonal pair.
pub fn extend_measure(
    m: &AbelianContext,
    mu: &ProjectionMeasure,
    cfg: &ToleranceConfig,
) -> Result<ContextFunctional> {
    let atoms = m.atom_count();
    let lattice = context::projections_in(m)?;
    let mut values = Vec::with_capacity(lattice.len());
    for (mask, p) in lattice.iter().enumerate() {
        let value = mu.lookup(p, cfg).ok_or_else(|| Error::MissingMeasureValue {
            context: format!("{}-atom context", atoms),
            projection: describe_atoms(mask as u32, atoms),
        })?;
        values.push(value);
    }

    if values[0].abs() > (100.0 * cfg.tol_compare).max(1e-7) {
        return Err(Error::InvalidMeasure { reason: format!("mu(0) = {}", values[0]) });
    }
    // Finite additivity on every orthogonal split S = (S minus one atom) + atom.
    for mask in 1u32..(1 << atoms) {
        if mask.count_ones() < 2 {
            continue;
        }
        let low = mask & mask.wrapping_neg(); // lowest set bit
        let rest = mask & !low;
        let sum = values[rest as usize] + values[low as usize];
        if (values[mask as usize] - sum).abs() > (100.0 * cfg.tol_compare).max(1e-7) {
            return Err(Error::NonAdditiveMeasure {
                context: format!("{}-atom context", atoms),
                lhs: describe_atoms(rest, atoms),
                rhs: describe_atoms(low, atoms),
                sum,
                joint: values[mask as usize],
            });
        }
    }
    let top = values[(1 << atoms) - 1];
    if (top - 1.0).abs() > (100.0 * cfg.tol_compare).max(1e-7) {
        return Err(Error::InvalidMeasure { reason: format!("mu(I) = {top}") });
    }

    let atom_values: Vec<f64> = (0..atoms).map(|i| values[1usize << i]).collect();
    Ok(ContextFunctional { context: m.clone(), atom_values })
}

/// Builds a state section from one measure defined on every projection of
/// every context of the family.
pub fn section_from_measure(
    family: ContextFamily,
    mu: &ProjectionMeasure,
    cfg: &ToleranceConfig,
) -> Result<StateSection> {
    let states = family
        .contexts()
        .iter()
        .enumerate()
        .map(|(index, ctx)| {
            let functional = extend_measure(ctx, mu, cfg).map_err(|e| match e {
                Error::NonAdditiveMeasure { lhs, rhs, sum, joint, .. } => {
                    Error::NonAdditiveMeasure {
                        context: format!("context {index}"),
                        lhs,
                        rhs,
                        sum,
                        joint,
                    }
                }
                Error::MissingMeasureValue { projection, .. } => {
                    Error::MissingMeasureValue { context: format!("context {index}"), projection }
                }
                other => other,
            })?;
            functional.as_state(cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    StateSection::new(family, states, cfg)
}

/// The isomorphism between probability weights on the quasipoints of a
/// context and states of that context. On weight vectors it is the identity;
/// the operation exists to state and check the naturality square against
/// measure pushforward.
pub fn measure_state_iso(
    context: &AbelianContext,
    weights: &[f64],
    cfg: &ToleranceConfig,
) -> Result<ContextState> {
    ContextState::new(context.clone(), weights.to_vec(), cfg)
}

/// Pushforward of quasipoint weights along the restriction map of `a ⊆ b`:
/// each `b`-atom sends its weight to the `a`-atom above it.
pub fn pushforward_weights(
    b: &AbelianContext,
    a: &AbelianContext,
    weights: &[f64],
    cfg: &ToleranceConfig,
) -> Result<Vec<f64>> {
    if weights.len() != b.atom_count() {
        return Err(Error::InvalidState {
            reason: format!("{} weights for {} atoms", weights.len(), b.atom_count()),
        });
    }
    let mut out = vec![0.0; a.atom_count()];
    for (j, weight) in weights.iter().enumerate() {
        let q = Quasipoint::new(b.clone(), j)?;
        let image = context::quasipoint_project(b, a, &q, cfg)?;
        out[image.atom_index()] += weight;
    }
    Ok(out)
}

/// Both legs of the naturality square for a chain `a ⊆ b`: pushing weights
/// forward then taking the state, versus taking the state then restricting.
pub fn naturality_square(
    b: &AbelianContext,
    a: &AbelianContext,
    weights: &[f64],
    cfg: &ToleranceConfig,
) -> Result<(ContextState, ContextState)> {
    let pushed = pushforward_weights(b, a, weights, cfg)?;
    let leg_one = measure_state_iso(a, &pushed, cfg)?;
    let leg_two = restrict_state(&measure_state_iso(b, weights, cfg)?, a, cfg)?;
    Ok((leg_one, leg_two))
}

/// The two-dimensional counterexample: a valid state section on which any
/// linear extension fails by an explicit residual.
#[derive(Debug, Clone)]
pub struct C2Counterexample {
    pub p: Projection,
    pub q: Projection,
    pub r: Projection,
    /// Eigenvalues of `P + Q`: the section forces `phi(P+Q)` two ways.
    pub a: f64,
    pub b: f64,
    pub section: StateSection,
    /// `|phi(P) + phi(Q) - phi(P + Q)|` under the section's assignments.
    pub linearity_residual: f64,
}

/// Builds the section assigning value 0 to `P`, `Q` and the top
/// eigenprojection `R` of `P + Q` (hence 1 to their complements). The section
/// validates, but linearity would force `0 = b > 0`.
pub fn c2_counterexample(cfg: &ToleranceConfig) -> Result<C2Counterexample> {
    let d = 1.0 / 2f64.sqrt();
    let p = Projection::onto_coordinates(2, &[0]);
    let q = Projection::onto_line(vec![Complex64::new(d, 0.0), Complex64::new(d, 0.0)])?;

    let sum = p.matrix().add(q.matrix());
    let pairs = crate::linalg::eigh(&sum, cfg)?;
    if pairs.len() != 2 {
        return Err(Error::BadCounterexample {
            reason: "P + Q must have two distinct eigenvalues".to_string(),
        });
    }
    let b = pairs[0].value;
    let a = pairs[1].value;
    let r = pairs[1].projection.clone();

    let contexts = vec![
        AbelianContext::trivial(2),
        context::context_from_commuting(2, std::slice::from_ref(&p), cfg)?,
        context::context_from_commuting(2, std::slice::from_ref(&q), cfg)?,
        context::context_from_commuting(2, std::slice::from_ref(&r), cfg)?,
    ];
    let family = ContextFamily::new(2, contexts, cfg)?;

    let states = family
        .contexts()
        .iter()
        .map(|ctx| {
            if ctx.is_trivial() {
                return ContextState::new(ctx.clone(), vec![1.0], cfg);
            }
            // Weight 0 on the atom that is one of the three distinguished
            // lines, 1 on its complement.
            let weights = ctx
                .atoms()
                .iter()
                .map(|atom| {
                    let distinguished = atom.approx_eq(&p, cfg)
                        || atom.approx_eq(&q, cfg)
                        || atom.approx_eq(&r, cfg);
                    if distinguished {
                        0.0
                    } else {
                        1.0
                    }
                })
                .collect();
            ContextState::new(ctx.clone(), weights, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let section = StateSection::new(family, states, cfg)?;

    // phi(P) + phi(Q) = 0, but phi(P + Q) = a phi(R) + b phi(I - R) = b.
    let linearity_residual = (0.0f64 + 0.0 - (a * 0.0 + b * 1.0)).abs();
    Ok(C2Counterexample { p, q, r, a, b, section, linearity_residual })
}

/// Outcome of the least-squares density fit.
#[derive(Debug, Clone)]
pub struct DensityFit {
    pub rho: HermitianOperator,
    /// Max absolute constraint residual `|tr(rho P) - value|` over all atoms.
    pub residual: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

const FIT_MAX_ITERATIONS: usize = 100_000;
const FIT_GRADIENT_TOL: f64 = 1e-10;

/// Least-squares fit of a positive semidefinite unit-trace operator to the
/// constraints `tr(rho P_i) = w_i` over every atom of every context of a
/// validated section.
///
/// Projected gradient descent with the projection onto the feasible set done
/// by eigenvalue clipping and trace renormalization; stops when the projected
/// gradient map drops below 1e-10 or after 1e5 iterations.
pub fn fit_density(section: &StateSection, cfg: &ToleranceConfig) -> Result<DensityFit> {
    let dim = section.family().ambient_dim();
    if dim < 2 {
        return Err(Error::Invalid("density fitting needs dimension at least 2".into()));
    }
    let validation = validate_state_section(section, cfg)?;
    if !validation.ok {
        let first = &validation.violations[0];
        return Err(Error::SectionInvalid {
            violations: validation.violations.len(),
            a: first.context_a,
            b: first.context_b,
        });
    }

    let mut constraints: Vec<(&Projection, f64)> = Vec::new();
    for state in section.states() {
        for (atom, w) in state.context().atoms().iter().zip(state.weights()) {
            constraints.push((atom, *w));
        }
    }

    // Lipschitz bound for the quadratic objective.
    let lipschitz: f64 =
        2.0 * constraints.iter().map(|(p, _)| p.matrix().matrix().frobenius_norm().powi(2)).sum::<f64>();
    let step = 1.0 / lipschitz.max(1.0);

    let mut rho = ComplexMatrix::identity(dim).scale(1.0 / dim as f64);
    let mut iterations = 0;
    let mut gradient_norm = f64::INFINITY;
    while iterations < FIT_MAX_ITERATIONS {
        iterations += 1;
        let mut gradient = ComplexMatrix::zeros(dim);
        for (p, w) in &constraints {
            let residual = rho.matmul(p.matrix().matrix()).trace().re - w;
            gradient = gradient.add(&p.matrix().matrix().scale(2.0 * residual));
        }
        let candidate = project_psd_trace_one(&rho.sub(&gradient.scale(step)), dim)?;
        gradient_norm = rho.sub(&candidate).frobenius_norm() / step;
        rho = candidate;
        if !gradient_norm.is_finite() {
            return Err(Error::FitNoConvergence {
                iterations,
                grad: gradient_norm,
                residual: f64::NAN,
            });
        }
        if gradient_norm <= FIT_GRADIENT_TOL {
            break;
        }
    }

    let residual = constraints
        .iter()
        .map(|(p, w)| (rho.matmul(p.matrix().matrix()).trace().re - w).abs())
        .fold(0.0, f64::max);
    if gradient_norm > FIT_GRADIENT_TOL {
        return Err(Error::FitNoConvergence { iterations, grad: gradient_norm, residual });
    }
    Ok(DensityFit { rho: HermitianOperator::new(rho, cfg)?, residual, iterations, gradient_norm })
}

/// Nearest-point surrogate on the density matrices: clip negative eigenvalues,
/// renormalize the trace to one.
fn project_psd_trace_one(candidate: &ComplexMatrix, dim: usize) -> Result<ComplexMatrix> {
    // Symmetrize against accumulated drift before decomposing.
    let sym = candidate.add(&candidate.adjoint()).scale(0.5);
    let (vals, vecs) = eigh_raw(&sym)?;
    let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 1e-14 {
        return Ok(ComplexMatrix::identity(dim).scale(1.0 / dim as f64));
    }
    let mut out = ComplexMatrix::zeros(dim);
    for (col, weight) in clipped.iter().enumerate() {
        if *weight == 0.0 {
            continue;
        }
        let column: Vec<Complex64> = (0..dim).map(|row| vecs.get(row, col)).collect();
        out = out.add(&ComplexMatrix::outer(&column).scale(weight / total));
    }
    Ok(out)
}

/// State of a maximal context read off a unit vector, with the Dirac case
/// flagged: the weights are the squared overlaps with the atom lines, and the
/// state is a point measure exactly when the vector is parallel to an atom.
#[derive(Debug, Clone)]
pub struct PointMeasureResult {
    pub state: ContextState,
    /// Index of the atom carrying weight one, when the state is Dirac.
    pub dirac_atom: Option<usize>,
}

/// Forward direction: the vector state of `x` restricted to a maximal context.
pub fn point_measure_from_vector(
    m: &AbelianContext,
    x: &[Complex64],
    cfg: &ToleranceConfig,
) -> Result<PointMeasureResult> {
    if !m.is_maximal() {
        return Err(Error::InvalidContext {
            reason: "point-measure correspondence needs a maximal context".to_string(),
        });
    }
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > (100.0 * cfg.tol_compare).max(1e-7) {
        return Err(Error::NotUnit { norm });
    }
    let weights: Vec<f64> = m
        .atoms()
        .iter()
        .map(|atom| atom.matrix().quadratic_form(x))
        .collect();
    let dirac_atom = weights
        .iter()
        .position(|w| (*w - 1.0).abs() <= (100.0 * cfg.tol_compare).max(1e-7));
    let state = ContextState::new(m.clone(), weights, cfg)?;
    Ok(PointMeasureResult { state, dirac_atom })
}

/// Inverse direction: a Dirac state of a maximal context determines a unit
/// ray; returns the atom's basis vector as representative.
pub fn vector_from_point_measure(
    state: &ContextState,
    cfg: &ToleranceConfig,
) -> Result<Vec<Complex64>> {
    if !state.context().is_maximal() {
        return Err(Error::InvalidContext {
            reason: "point-measure correspondence needs a maximal context".to_string(),
        });
    }
    let dirac = state
        .weights()
        .iter()
        .position(|w| (*w - 1.0).abs() <= (100.0 * cfg.tol_compare).max(1e-7))
        .ok_or_else(|| Error::InvalidState {
            reason: "state is not a point measure".to_string(),
        })?;
    Ok(state.context().atoms()[dirac].range().basis()[0].clone())
}

/// Quasistate evaluation at the atomic quasipoint of a unit vector.
#[derive(Debug, Clone)]
pub struct QuasistateEvaluation {
    /// Observable value of the compressed operator at the line of `x`.
    pub value: f64,
    /// `<Ax, x>`; coincides with `value` up to tolerance.
    pub expectation: f64,
    /// Minimum of the compressed observable values over the sampled
    /// projections above the line. Reported as evidence, not asserted.
    pub sampled_inf: f64,
    pub samples: usize,
}

/// Evaluates the quasistate induced by the line of `x` on `a`: the certified
/// value at the line itself, plus a sampled infimum over `samples` random
/// projections dominating the line.
pub fn quasistate_eval(
    x: &[Complex64],
    a: &HermitianOperator,
    samples: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<QuasistateEvaluation> {
    let dim = a.dim();
    if x.len() != dim {
        return Err(Error::DimensionMismatch { left: x.len(), right: dim });
    }
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > (100.0 * cfg.tol_compare).max(1e-7) {
        return Err(Error::NotUnit { norm });
    }
    let line = Projection::onto_line(x.to_vec())?;
    let value = compressed_value(a, &line, &line, cfg)?;
    let expectation = a.quadratic_form(x);

    let mut rng = generate::rng(seed);
    let mut sampled_inf = f64::INFINITY;
    for _ in 0..samples {
        let extra = rand::Rng::gen_range(&mut rng, 0..dim);
        let mut spanning = vec![x.to_vec()];
        for _ in 0..extra {
            spanning.push(generate::random_unit_vector(dim, &mut rng));
        }
        let p = Projection::from_subspace(Subspace::from_spanning(dim, spanning, cfg)?);
        sampled_inf = sampled_inf.min(compressed_value(a, &p, &line, cfg)?);
    }
    Ok(QuasistateEvaluation { value, expectation, sampled_inf, samples })
}

/// Observable value of the compression `P A P` at a projection.
fn compressed_value(
    a: &HermitianOperator,
    p: &Projection,
    at: &Projection,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    let compressed = HermitianOperator::new_unchecked(
        p.matrix().matrix().matmul(a.matrix()).matmul(p.matrix().matrix()),
    );
    spectral::observable_value(&compressed, at, cfg)
}
