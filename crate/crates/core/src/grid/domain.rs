use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Shape of a computational domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Strip,
    HalfStrip,
    Parallelogram,
}

/// Description of a truncated domain before discretization.
///
/// Strips and half-strips are rectangles `[x_min, x_max] × [y_min, y_min + w]`;
/// the distinction is bookkeeping about which x-edge carries real boundary data.
/// A parallelogram has its lower-left vertex at the origin, a horizontal base of
/// length `L`, base angle `alpha`, and height `w`; its grid uses sheared
/// coordinates so node rows follow the slanted sides.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub w: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub alpha: Option<f64>,
    #[serde(rename = "L")]
    pub base_length: Option<f64>,
    pub h: f64,
    #[serde(default)]
    pub y_min: f64,
    #[serde(default)]
    pub periodic_x: bool,
}

impl DomainSpec {
    pub fn strip(w: f64, x_min: f64, x_max: f64, h: f64) -> Self {
        Self {
            kind: DomainKind::Strip,
            w,
            x_min,
            x_max,
            alpha: None,
            base_length: None,
            h,
            y_min: 0.0,
            periodic_x: false,
        }
    }

    pub fn half_strip(w: f64, x0: f64, x_max: f64, h: f64) -> Self {
        Self {
            kind: DomainKind::HalfStrip,
            ..Self::strip(w, x0, x_max, h)
        }
    }

    pub fn parallelogram(alpha: f64, w: f64, base_length: f64, h: f64) -> Self {
        Self {
            kind: DomainKind::Parallelogram,
            w,
            x_min: 0.0,
            x_max: base_length,
            alpha: Some(alpha),
            base_length: Some(base_length),
            h,
            y_min: 0.0,
            periodic_x: false,
        }
    }

    /// Rectangle strictly inside a strip; `y_min > 0` windows are how exact
    /// fields avoid the logarithmic blow-up at y ∈ {0, w}.
    pub fn window(x_min: f64, x_max: f64, y_min: f64, y_max: f64, h: f64) -> Self {
        Self {
            y_min,
            ..Self::strip(y_max - y_min, x_min, x_max, h)
        }
    }

    pub fn periodic(mut self) -> Self {
        self.periodic_x = true;
        self
    }

    /// cot(alpha) for parallelograms (cleaned at right angles), 0 otherwise.
    pub fn shear_value(&self) -> f64 {
        match (self.kind, self.alpha) {
            (DomainKind::Parallelogram, Some(alpha)) => {
                let c = alpha.cos() / alpha.sin();
                if c.abs() < 1e-14 {
                    0.0
                } else {
                    c
                }
            }
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0) || !self.w.is_finite() {
            return Err(Error::InvalidDomain(format!("width w = {} must be positive", self.w)));
        }
        if !(self.x_min < self.x_max) {
            return Err(Error::InvalidDomain(format!(
                "x_min = {} must be below x_max = {}",
                self.x_min, self.x_max
            )));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidDomain(format!("grid spacing h = {} must be positive", self.h)));
        }
        if self.kind == DomainKind::Parallelogram {
            let alpha = self
                .alpha
                .ok_or_else(|| Error::InvalidDomain("parallelogram requires a base angle".into()))?;
            if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
                return Err(Error::InvalidDomain(format!(
                    "base angle alpha = {alpha} must lie in (0, π)"
                )));
            }
            let len = self
                .base_length
                .ok_or_else(|| Error::InvalidDomain("parallelogram requires a base length".into()))?;
            if !(len > 0.0) {
                return Err(Error::InvalidDomain(format!("base length L = {len} must be positive")));
            }
        }
        if self.h > self.w / 8.0 * (1.0 + 1e-12) {
            return Err(Error::GridTooCoarse {
                h: self.h,
                limit: self.w / 8.0,
            });
        }
        Ok(())
    }
}

/// Discretized domain: node lattice, classification, and spacing metadata.
///
/// Nodes are enumerated row-major (`index = j·nx + i`, rows of constant t).
/// Per-direction spacings are snapped so the lattice covers the closed domain
/// exactly; the snap tolerance guards against off-by-one row counts.
#[derive(Debug, Clone)]
pub struct Grid {
    pub spec: DomainSpec,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    /// cot(alpha) for parallelograms, 0 for rectangles.
    pub shear: f64,
}

pub(crate) const SNAP_TOL: f64 = 0.005;

fn snap_count(extent: f64, h: f64) -> (usize, f64) {
    let ratio = extent / h;
    let mut count = ratio.round() as usize;
    if count == 0 {
        count = 1;
    }
    (count, extent / count as f64)
}

impl Grid {
    /// Build the grid index structure for a domain.
    pub fn build(spec: &DomainSpec) -> Result<Arc<Grid>> {
        spec.validate()?;
        let extent_x = spec.x_max - spec.x_min;
        let (cx, hx) = snap_count(extent_x, spec.h);
        let (cy, hy) = snap_count(spec.w, spec.h);
        for (label, ratio, count) in [("x", extent_x / spec.h, cx), ("y", spec.w / spec.h, cy)] {
            let off = (ratio - count as f64).abs();
            if off > SNAP_TOL * (count as f64).max(1.0) {
                // Still snapped, but the caller asked for an incommensurate h.
                log_snap(label, ratio, count);
            }
        }
        let shear = spec.shear_value();
        Ok(Arc::new(Grid {
            spec: spec.clone(),
            nx: cx + 1,
            ny: cy + 1,
            hx,
            hy,
            shear,
        }))
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    /// Physical coordinates of node (i, j).
    #[inline]
    pub fn node_xy(&self, i: usize, j: usize) -> (f64, f64) {
        let t = j as f64 * self.hy;
        (
            self.spec.x_min + i as f64 * self.hx + self.shear * t,
            self.spec.y_min + t,
        )
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        if j == 0 || j == self.ny - 1 {
            return true;
        }
        if self.spec.periodic_x {
            false
        } else {
            i == 0 || i == self.nx - 1
        }
    }

    /// Number of distinct columns (the seam column aliases column 0 on
    /// periodic grids).
    #[inline]
    pub fn distinct_cols(&self) -> usize {
        if self.spec.periodic_x {
            self.nx - 1
        } else {
            self.nx
        }
    }

    /// Column index of the left/right neighbor, wrapping on periodic grids.
    /// Returns `None` when stepping off a non-periodic grid.
    #[inline]
    pub fn col_step(&self, i: usize, step: isize) -> Option<usize> {
        let n = self.distinct_cols() as isize;
        let raw = i as isize + step;
        if self.spec.periodic_x {
            Some(raw.rem_euclid(n) as usize)
        } else if raw < 0 || raw >= self.nx as isize {
            None
        } else {
            Some(raw as usize)
        }
    }

    pub fn interior_count(&self) -> usize {
        let rows = self.ny.saturating_sub(2);
        if self.spec.periodic_x {
            self.distinct_cols() * rows
        } else {
            self.nx.saturating_sub(2) * rows
        }
    }

    /// x-coordinate of the center of the truncation window.
    pub fn x_center(&self) -> f64 {
        0.5 * (self.spec.x_min + self.spec.x_max)
    }

    /// Core window used for drift and recovery metrics:
    /// `|x − x_center| ≤ (x_max − x_min)/4`.
    pub fn in_core_window(&self, x: f64) -> bool {
        (x - self.x_center()).abs() <= 0.25 * (self.spec.x_max - self.spec.x_min)
    }
}

fn log_snap(label: &str, ratio: f64, count: usize) {
    eprintln!("warning: {label}-extent/h = {ratio:.6} snapped to {count} cells (off by more than 0.5%)");
}
