use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("finite-difference step {0:e} is below 1e-12")]
    StepUnderflow(f64),
    #[error("curvature lambda must be non-zero")]
    ZeroCurvature,
    #[error("curve is not parameterized by arclength (max speed deviation {0:e})")]
    NotArclength(f64),
    #[error("curve speed vanishes near parameter {0}")]
    DegenerateCurve(f64),
    #[error("invalid curve data: {0}")]
    InvalidCurveData(String),
    #[error("immersion is degenerate at ({0}, {1})")]
    DegeneratePoint(f64, f64),
    #[error("point ({0}, {1}) is singular or too close to the singular set")]
    SingularPoint(f64, f64),
    #[error("no singular curve at parameter {0}")]
    NoSingularCurve(f64),
    #[error("probe point lies on the singular locus")]
    OnSingularLocus,
    #[error("unknown surface '{0}'")]
    UnknownSurface(String),
    #[error("non-finite value encountered in quadrature")]
    NonFinite,
    #[error("surface orientation is not set")]
    OrientationUnset,
    #[error("surface is not closed")]
    NotClosed,
    #[error("variation step {0:e} is below 1e-7")]
    StepTooSmall(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
