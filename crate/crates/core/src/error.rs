use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row},{col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian: asymmetry {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not a projection: {reason}")]
    NotProjection { reason: String },

    #[error("basis is not orthonormal: Gram defect {defect:.3e}")]
    NotOrthonormal { defect: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },

    #[error("projections {i} and {j} do not commute (commutator norm {norm:.3e})")]
    NonCommutingPair { i: usize, j: usize, norm: f64 },

    #[error("the zero projection is outside the domain of observable functions")]
    ZeroProjection,

    #[error("invalid partition of unity: {reason}")]
    InvalidContext { reason: String },

    #[error("context has {atoms} atoms; projection enumeration is capped at {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },

    #[error("context inclusion does not hold (atom {atom} of the coarser context is not a sum of finer atoms)")]
    NotIncluded { atom: usize },

    #[error("quasipoint index {index} is out of range for a context with {atoms} atoms")]
    BadQuasipoint { index: usize, atoms: usize },

    #[error("operator is not in the span of the context (reconstruction defect {defect:.3e})")]
    NotInSpan { defect: f64 },

    #[error("corner projection is zero")]
    ZeroCorner,

    #[error("coarse-graining point {value} is not in the spectrum")]
    PointNotInSpectrum { value: f64 },

    #[error("coarse-graining points violate the interior ordering m_A < p_1 < ... < p_n < M_A")]
    BadPartitionPoints,

    #[error("empty operator list")]
    EmptyOperatorList,

    #[error("measure is not additive on {context}: mu({lhs}) + mu({rhs}) = {sum:.6} but mu(join) = {joint:.6}")]
    NonAdditiveMeasure { context: String, lhs: String, rhs: String, sum: f64, joint: f64 },

    #[error("measure has no value for projection {projection} required by context {context}")]
    MissingMeasureValue { context: String, projection: String },

    #[error("invalid measure: {reason}")]
    InvalidMeasure { reason: String },

    #[error("invalid state weights: {reason}")]
    InvalidState { reason: String },

    #[error("section does not validate; {violations} compatibility violations (first at contexts {a},{b})")]
    SectionInvalid { violations: usize, a: usize, b: usize },

    #[error("observable table has no entry for a required projection in context {context}")]
    MissingTableEntry { context: usize },

    #[error("table violates the commuting-sup law in context {context}: f(join) = {joined:.6} but max over the family = {expected:.6}")]
    SupLawViolation { context: usize, joined: f64, expected: f64 },

    #[error("section is not of the two-projection counterexample shape: {reason}")]
    BadCounterexample { reason: String },

    #[error("vector is not normalized: |x| = {norm}")]
    NotUnit { norm: f64 },

    #[error("density fit did not converge after {iterations} iterations (projected gradient {grad:.3e}, residual {residual:.3e})")]
    FitNoConvergence { iterations: usize, grad: f64, residual: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
