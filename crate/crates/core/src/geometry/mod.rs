//! Gauss maps, cylindrical charts and θ-graph verification, slope bounds,
//! and the rigid motions used by the rotational arguments.

mod chart;
mod motions;
mod normals;
mod theta;

pub use chart::{cylindrical_chart, ChartConfig, ChartRaster, CylChart};
pub use motions::{rotate_about, rotate_point};
pub use normals::{gauss_injectivity_sample, gauss_map, InjectivityReport, NormalField};
pub use theta::{delta_bound, slope_bound_scan, theta_graph_check, Region, SlopeScan, ThetaGraphReport};

pub(crate) use chart::{cyl_coords, rasterize_theta};
