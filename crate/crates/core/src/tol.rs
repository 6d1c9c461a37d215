//! Default numerical tolerances and steps.

/// Central-difference step for numeric derivatives.
pub const H_FD: f64 = 1e-5;
/// Arclength step along characteristic traces.
pub const H_CHAR: f64 = 1e-4;
/// Threshold on |N_H| below which a point is flagged singular.
pub const TOL_SINGULAR: f64 = 1e-6;
/// Allowed deviation of planar speed from 1.
pub const TOL_ARCLENGTH: f64 = 1e-6;
/// Points on the arclength validation grid.
pub const ARCLENGTH_GRID: usize = 1024;
/// Absolute tolerance of the horizontal-lift integral.
pub const LIFT_TOL: f64 = 1e-10;
/// Below this |2λs| the geodesic closed form switches to series.
pub const SERIES_SWITCH: f64 = 1e-4;
/// Smallest admissible finite-difference step.
pub const MIN_STEP: f64 = 1e-12;
/// Smallest cross-product norm for a regular immersion.
pub const MIN_CROSS: f64 = 1e-12;
