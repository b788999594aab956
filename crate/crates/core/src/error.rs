//! Error types for chart evaluation, flow integration, contact-form
//! assembly, gluing construction, the orbit catalog, and homology tables.

use crate::geom::Point;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("saddle seed {index} at radius {radius} is not inside the smoothing disk (r_sing = {r_sing})")]
    SaddleSeedOutsideDisk { index: usize, radius: f64, r_sing: f64 },
    #[error("saddle {index} has Hessian determinant {det} within tolerance of zero")]
    DegenerateSaddle { index: usize, det: f64 },
}

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("point ({},{}) lies in no declared chart", .0.x, .0.y)]
    PointOutsideCharts(Point),
    #[error("the 1-form has no closed-form expression in the smoothing chart at ({},{})", .0.x, .0.y)]
    NoFormulaInSmoothingChart(Point),
    #[error("area form density {density} at ({},{}) is below tolerance", .point.x, .point.y)]
    DegenerateAreaForm { point: Point, density: f64 },
}

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("trajectory left the required chart domain at t = {exit_time}")]
    LeftChartDomain { exit_time: f64 },
    #[error("integrator step size underflowed at t = {time} (step = {step})")]
    StepFailure { time: f64, step: f64 },
    #[error(transparent)]
    Chart(#[from] ChartError),
}

#[derive(Debug, Error)]
pub enum NewtonError {
    #[error("Newton iteration did not converge from seed ({},{}) after {iterations} steps (residual {residual})", .seed.x, .seed.y)]
    Divergence { seed: Point, iterations: u32, residual: f64 },
    #[error("singular Newton matrix near ({},{})", .at.x, .at.y)]
    SingularMatrix { at: Point },
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Debug, Error)]
pub enum ContactError {
    #[error("Reeb denominator 1 + eps*chi1*h = {value} is not positive (eps too large for this h)")]
    NonpositiveDenominator { value: f64 },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

#[derive(Debug, Error)]
pub enum GluingError {
    #[error("arc construction failed: property {property} does not hold ({reason})")]
    ArcConstructionFailure { property: String, reason: String },
    #[error("arc identification pattern does not close up: {reason}")]
    InconsistentIdentification { reason: String },
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("fixed-point search produced {found} points, expected {expected}")]
    OrbitCountMismatch { found: usize, expected: usize },
    #[error("iterate {multiplicity} of orbit {label} has an eigenvalue within tolerance of 1")]
    DegenerateIterate { label: u32, multiplicity: u32 },
    #[error("elliptic rotation number {phi} is within 1e-12 of the rational {p}/{q}")]
    ResonantRotation { phi: f64, p: i64, q: i64 },
}

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("action filtration hypothesis violated in class {class}: gap {gap} exceeds tolerance {tolerance}")]
    FiltrationHypothesisViolated { class: i64, gap: f64, tolerance: f64 },
    #[error("rank oracle mismatch for {theory} at n = {n}, h = {h}: enumerated {enumerated}, closed form {oracle}")]
    OracleMismatch { theory: String, n: u32, h: i64, enumerated: String, oracle: String },
}
