//! Discrete domains (truncated strips, half-strips, sheared parallelograms),
//! scalar fields on them, boundary prescriptions with infinite segments, and
//! second-order finite-difference stencils.

mod boundary;
mod domain;
mod field;
mod stencil;

pub use boundary::{BoundarySpec, CappedBoundary, Edge, EdgeSpec, EdgeValue, Segment, TraceFn};
pub use domain::{DomainKind, DomainSpec, Grid};
pub use field::{NodeMask, ScalarField};
pub use stencil::{fd_derivatives, Derivs, StencilWeights};

pub(crate) use stencil::{derivs_from as derivs_of, k_of as stencil_index, neighborhood as neighborhood_of};
