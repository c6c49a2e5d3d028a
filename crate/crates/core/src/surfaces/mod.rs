//! Constructors for the named translator surfaces (grim reapers, pitchfork,
//! helicoid, Scherk piece, Scherkenoid, trident), helicoid axis calibration,
//! Schwarz reflection into meshes, and uniqueness probes.

mod boundary_data;
mod calibrate;
mod construct;
mod kind;
mod mesh;
mod probes;

pub use boundary_data::{exact_reaper_bc_on, grim_reaper_field, make_boundary_spec, piece_domain};
pub use calibrate::{
    helicoid_axis_calibrate, solve_helicoid_candidate, symmetry_residual, CalibrationConfig,
    CalibrationReport,
};
pub use construct::{
    construct_piece, min_slope_ratio, reaper_side_fit, resample_piece, PieceConfig,
};
pub use kind::{g_w, reaper_tilt, SurfaceKind};
pub use mesh::{schwarz_reflect, triangulate_field, SurfaceMesh};
pub use probes::{
    quotient_distance, rescaled_helicoid_limit_check, rescaled_limit_entry, uniqueness_probe,
    LimitEntry, LimitsConfig, LimitsReport, ProbePair, ProbeReport, ProbeRun, ProbeSeed,
};
