use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The named surfaces of the laboratory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    /// ln(sin y) over the width-π strip.
    GrimReaper { w: f64 },
    /// g_w(x,y) = x·√((w/π)²−1) + (w/π)²·ln(sin(πy/w)), w ≥ π.
    TiltedGrimReaper { w: f64 },
    /// Width w ≥ π, one Schwarz reflection about the z-axis.
    Pitchfork { w: f64 },
    /// Width w < π, boundary lines through 0 and (x̂, w).
    Helicoid { w: f64, xhat: Option<f64> },
    /// Doubly periodic piece over the parallelogram P(α, w, L).
    Scherk { alpha: f64, w: f64, length: f64 },
    /// Simply periodic piece over the half-strip with parallelogram left side.
    Scherkenoid { alpha: f64, w: f64 },
    /// Periodic piece of neck size a over ℝ × (0, b), period 2a.
    Trident { neck: f64, width: f64 },
}

impl SurfaceKind {
    pub fn cli_name(&self) -> &'static str {
        match self {
            SurfaceKind::GrimReaper { .. } => "grim-reaper",
            SurfaceKind::TiltedGrimReaper { .. } => "grim-reaper",
            SurfaceKind::Pitchfork { .. } => "pitchfork",
            SurfaceKind::Helicoid { .. } => "helicoid",
            SurfaceKind::Scherk { .. } => "scherk",
            SurfaceKind::Scherkenoid { .. } => "scherkenoid",
            SurfaceKind::Trident { .. } => "trident",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SurfaceKind::GrimReaper { w } => {
                if (w - PI).abs() > 1e-9 {
                    return Err(Error::InvalidWidth(format!(
                        "the grim reaper has width π; got w = {w} (use the tilted variant for w > π)"
                    )));
                }
            }
            SurfaceKind::TiltedGrimReaper { w } => {
                if w < PI - 1e-12 {
                    return Err(Error::InvalidWidth(format!(
                        "tilted grim reaper needs w ≥ π for a real tilt; got {w}"
                    )));
                }
            }
            SurfaceKind::Pitchfork { w } => {
                if w < PI - 1e-12 {
                    return Err(Error::InvalidWidth(format!("pitchfork requires w ≥ π; got {w}")));
                }
            }
            SurfaceKind::Helicoid { w, xhat } => {
                if !(w > 0.0 && w < PI - 1e-12) {
                    return Err(Error::InvalidWidth(format!("helicoid requires 0 < w < π; got {w}")));
                }
                if let Some(x) = xhat {
                    if !(x > 0.0) {
                        return Err(Error::InvalidWidth(format!("helicoid axis x̂ must be positive; got {x}")));
                    }
                }
            }
            SurfaceKind::Scherk { alpha, w, length } => {
                if !(alpha > 0.0 && alpha < PI) {
                    return Err(Error::InvalidWidth(format!("Scherk base angle must lie in (0,π); got {alpha}")));
                }
                if !(w > 0.0 && length > 0.0) {
                    return Err(Error::InvalidWidth("Scherk width and length must be positive".into()));
                }
            }
            SurfaceKind::Scherkenoid { alpha, w } => {
                if !(alpha > 0.0 && alpha < PI) {
                    return Err(Error::InvalidWidth(format!(
                        "Scherkenoid base angle must lie in (0,π); got {alpha}"
                    )));
                }
                if !(w > 0.0) {
                    return Err(Error::InvalidWidth("Scherkenoid width must be positive".into()));
                }
            }
            SurfaceKind::Trident { neck, width } => {
                if !(neck > 0.0 && width > 0.0) {
                    return Err(Error::InvalidWidth(format!(
                        "trident requires a > 0 and b > 0; got a = {neck}, b = {width}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Strip height of the graph domain.
    pub fn strip_width(&self) -> f64 {
        match *self {
            SurfaceKind::GrimReaper { w }
            | SurfaceKind::TiltedGrimReaper { w }
            | SurfaceKind::Pitchfork { w }
            | SurfaceKind::Helicoid { w, .. }
            | SurfaceKind::Scherk { w, .. }
            | SurfaceKind::Scherkenoid { w, .. } => w,
            SurfaceKind::Trident { width, .. } => width,
        }
    }
}

/// Tilt √((w/π)² − 1) of the width-w grim reaper.
pub fn reaper_tilt(w: f64) -> f64 {
    ((w / PI) * (w / PI) - 1.0).max(0.0).sqrt()
}

/// The tilted grim reaper g_w(x, y).
pub fn g_w(w: f64, x: f64, y: f64) -> f64 {
    x * reaper_tilt(w) + (w / PI).powi(2) * (PI * y / w).sin().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_w_point_values() {
        // g_π(x, π/2) = 0 for all x.
        for x in [-3.0, 0.0, 7.5] {
            assert!(g_w(PI, x, PI / 2.0).abs() < 1e-15);
        }
        // w = √2π: g(1, w/2) = 1·1 + 2·ln(1) = 1.
        let w = 2.0f64.sqrt() * PI;
        assert!((g_w(w, 1.0, w / 2.0) - 1.0).abs() < 1e-12);
        // w = π, y = π/4: ln(√2/2) ≈ −0.3466 for all x.
        for x in [-2.0, 5.0] {
            assert!((g_w(PI, x, PI / 4.0) - (0.5f64.sqrt()).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn kind_invariants() {
        assert!(SurfaceKind::Pitchfork { w: PI }.validate().is_ok());
        assert!(SurfaceKind::Pitchfork { w: 3.0 }.validate().is_err());
        assert!(SurfaceKind::Helicoid { w: PI / 2.0, xhat: None }.validate().is_ok());
        assert!(SurfaceKind::Helicoid { w: PI, xhat: None }.validate().is_err());
        assert!(SurfaceKind::Helicoid { w: 1.0, xhat: Some(-1.0) }.validate().is_err());
        assert!(SurfaceKind::Trident { neck: 1.0, width: 1.5 }.validate().is_ok());
        assert!(SurfaceKind::Trident { neck: 0.0, width: 1.5 }.validate().is_err());
    }
}
