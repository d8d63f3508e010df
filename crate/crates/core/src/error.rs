use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("matrix is not in su(3): skew residual {skew_residual:e}, trace residual {trace_residual:e}")]
    InvalidElement {
        skew_residual: f64,
        trace_residual: f64,
    },

    #[error("Gram matrix is numerically singular (condition estimate {condition:e})")]
    SingularGram { condition: f64 },

    #[error("{0}")]
    DegenerateParams(String),

    #[error("deformed inner product is not positive definite (t = {t})")]
    DegenerateMetric { t: f64 },

    #[error("frame is not orthonormal for the required metric (residual {residual:e})")]
    NonOrthonormalFrame { residual: f64 },

    #[error("element is not in the isotropy complement m (residual {residual:e})")]
    NotInModule { residual: f64 },

    #[error("bracket [b{i}, b{j}] leaves the basis span (residual {residual:e})")]
    SpanResidual { i: usize, j: usize, residual: f64 },

    #[error("plane is not orthonormal (residual {residual:e})")]
    DegeneratePlane { residual: f64 },

    #[error("normal-metric oracle only applies at t = 0 (got t = {t})")]
    OracleScope { t: f64 },

    #[error("tension field paths disagree by {difference:e}")]
    CrossCheckMismatch { difference: f64 },

    #[error(
        "Riemannian submersion with minimal fibers = {minimal_fibers} but harmonic morphism = {harmonic_morphism}"
    )]
    VerdictInconsistency {
        minimal_fibers: bool,
        harmonic_morphism: bool,
    },
}
