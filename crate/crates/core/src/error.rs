use thiserror::Error;

/// Errors produced across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("grid too coarse: h = {h} exceeds w/8 = {limit}")]
    GridTooCoarse { h: f64, limit: f64 },
    #[error("node ({i},{j}) is not an interior node")]
    NotInterior { i: usize, j: usize },
    #[error("invalid boundary data: {0}")]
    InvalidBoundary(String),
    #[error("Newton stagnated at continuation stage {stage} (cap B = {cap}), residual {residual:.3e}")]
    NonConvergence { stage: usize, cap: f64, residual: f64 },
    #[error("linear solver breakdown: {0}")]
    LinearSolverFailure(String),
    #[error("invalid width: {0}")]
    InvalidWidth(String),
    #[error("truncation window too tight: {0}")]
    TruncationTooTight(String),
    #[error("axis calibration failed: best x̂ = {best_xhat} with symmetry residual {residual:.3e} above floor {floor:.3e}")]
    CalibrationFailed { best_xhat: f64, residual: f64, floor: f64 },
    #[error("refusing to reflect an unconverged piece")]
    RefuseUnconverged,
    #[error("invalid rotation axis: {0}")]
    InvalidAxis(String),
    #[error("mesh spans a cylindrical sector of angle {angle:.4} ≥ π about the axis")]
    SectorTooWide { angle: f64 },
    #[error("invalid radius: R = {radius} must exceed w + |y_a| = {limit}")]
    InvalidRadius { radius: f64, limit: f64 },
    #[error("translated strips do not overlap (|ξ₂| = {xi2_abs} ≥ w = {w})")]
    NoOverlap { xi2_abs: f64, w: f64 },
    #[error("no bounded region between the supplied arcs: {0}")]
    NoRegion(String),
    #[error("surface is not a θ-graph about the axis: {0}")]
    NotThetaGraph(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
