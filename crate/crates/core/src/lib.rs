//! Numerical laboratory for semigraphical translating solitons of mean
//! curvature flow: a damped-Newton solver for the graphical translator PDE on
//! truncated strips, constructors for the named surfaces (grim reapers,
//! pitchforks, helicoids, Scherk pieces, tridents), and the geometric
//! verification toolkit (Gauss maps, θ-graph criteria, level-set arc counting,
//! rotational tangency search, uniqueness probes).

pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod levelsets;
pub mod pde;
pub mod surfaces;

pub use error::{Error, Result};
