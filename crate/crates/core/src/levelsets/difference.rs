use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DomainSpec, Grid, NodeMask, ScalarField};

/// Two solution fields on translated copies of the same strip:
/// u′₁(p) = u₁(p − ξ), compared against u₂ on the overlap Ω_w ∩ Ω′_w.
#[derive(Debug, Clone)]
pub struct DifferenceSpec {
    pub u1: ScalarField,
    pub u2: ScalarField,
    pub shift: (f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecialPoints {
    /// Endpoint of the type-(iii) arc (the translated vertical-line point).
    pub xi_point: (f64, f64),
    /// Endpoint of the type-(iv) arc (helicoids only).
    pub xhat_point: Option<(f64, f64)>,
}

impl DifferenceSpec {
    /// Candidate arc endpoints on the overlap boundary. The configuration
    /// depends on sign(ξ₂): for ξ₂ > 0 they are ξ and (x̂, w); for ξ₂ < 0
    /// they are the origin and (x̂, w) + ξ.
    pub fn special_points(&self, xhat: Option<f64>) -> SpecialPoints {
        let (xi1, xi2) = self.shift;
        let w = self.u2.grid().spec.w;
        if xi2 >= 0.0 {
            SpecialPoints {
                xi_point: (xi1, xi2),
                xhat_point: xhat.map(|x| (x, w)),
            }
        } else {
            SpecialPoints {
                xi_point: (0.0, 0.0),
                xhat_point: xhat.map(|x| (x + xi1, w + xi2)),
            }
        }
    }
}

/// v = u′₁ − u₂ on the overlap strip, with the shift snapped to the lattice
/// so no interpolation enters. Nodes within 2h of the overlap boundary are
/// masked excluded (capped-boundary influence must not masquerade as arcs).
pub fn difference_field(spec: &DifferenceSpec) -> Result<ScalarField> {
    let g1 = spec.u1.grid();
    let g2 = spec.u2.grid();
    if (g1.hx - g2.hx).abs() > 1e-12 || (g1.hy - g2.hy).abs() > 1e-12 {
        return Err(Error::Format("difference fields need commensurate grids".into()));
    }
    let w = g2.spec.w;
    let (xi1, xi2) = spec.shift;
    if xi2.abs() >= w {
        return Err(Error::NoOverlap { xi2_abs: xi2.abs(), w });
    }
    let k1 = (xi1 / g2.hx).round() as isize;
    let k2 = (xi2 / g2.hy).round() as isize;
    if (xi1 - k1 as f64 * g2.hx).abs() > 1e-9 || (xi2 - k2 as f64 * g2.hy).abs() > 1e-9 {
        eprintln!(
            "warning: shift ({xi1}, {xi2}) snapped to the grid lattice ({}, {})",
            k1 as f64 * g2.hx,
            k2 as f64 * g2.hy
        );
    }
    // Overlap window in u2's frame: Ω′ = Ω + ξ.
    let x_lo = g2.spec.x_min.max(g1.spec.x_min + k1 as f64 * g2.hx);
    let x_hi = g2.spec.x_max.min(g1.spec.x_max + k1 as f64 * g2.hx);
    let y_lo = g2.spec.y_min.max(g1.spec.y_min + k2 as f64 * g2.hy);
    let y_hi = (g2.spec.y_min + w).min(g1.spec.y_min + g1.spec.w + k2 as f64 * g2.hy);
    if x_hi - x_lo < 4.0 * g2.hx || y_hi - y_lo < 4.0 * g2.hy {
        return Err(Error::NoOverlap { xi2_abs: xi2.abs(), w });
    }
    let window = DomainSpec {
        h: g2.hx.min(g2.hy),
        ..DomainSpec::window(x_lo, x_hi, y_lo, y_hi, g2.hx)
    };
    // Build the window grid with exactly the parent spacings.
    let grid = Grid::build(&DomainSpec {
        h: g2.hx,
        ..window
    })?;
    // Index offsets of the window inside each parent grid.
    let off2_i = ((x_lo - g2.spec.x_min) / g2.hx).round() as isize;
    let off2_j = ((y_lo - g2.spec.y_min) / g2.hy).round() as isize;
    let mut v = ScalarField::zeros(grid.clone());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let i2 = (i as isize + off2_i) as usize;
            let j2 = (j as isize + off2_j) as usize;
            let i1 = (i2 as isize - k1) as usize;
            let j1 = (j2 as isize - k2) as usize;
            let val = spec.u1.get(i1, j1) - spec.u2.get(i2, j2);
            v.set(i, j, val);
            // Mask the 2h band along the overlap boundary.
            let near_rim = i < 2 || j < 2 || i + 2 >= grid.nx || j + 2 >= grid.ny;
            let parent_excluded = spec.u1.mask_at(i1, j1) == NodeMask::Excluded
                || spec.u2.mask_at(i2, j2) == NodeMask::Excluded;
            if (near_rim || parent_excluded) && !grid.is_boundary(i, j) {
                v.exclude(i, j);
            }
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::g_w;
    use std::f64::consts::PI;

    fn field_on(w: f64, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let g = Grid::build(&DomainSpec::strip(w, -4.0, 4.0, w / 16.0)).unwrap();
        ScalarField::from_fn(g, f)
    }

    #[test]
    fn identical_fields_cancel() {
        let w = PI;
        let u = field_on(w, |x, y| (x * 0.3).sin() + y);
        let spec = DifferenceSpec { u1: u.clone(), u2: u, shift: (0.0, 0.0) };
        let v = difference_field(&spec).unwrap();
        for val in v.values() {
            assert!(val.abs() < 1e-14);
        }
    }

    #[test]
    fn untilted_reaper_is_x_shift_invariant() {
        let w = PI;
        let u = field_on(w, |_, y| (y.sin().max(1e-9)).ln());
        let h = u.grid().hx;
        let spec = DifferenceSpec { u1: u.clone(), u2: u, shift: (8.0 * h, 0.0) };
        let v = difference_field(&spec).unwrap();
        let g = v.grid();
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                assert!(v.get(i, j).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tilted_reaper_difference_is_the_tilt_times_shift()
    {
        let w = 2.0f64.sqrt() * PI;
        let g = Grid::build(&DomainSpec::window(-4.0, 4.0, w / 8.0, 7.0 * w / 8.0, w / 16.0)).unwrap();
        let u = ScalarField::from_fn(g.clone(), |x, y| g_w(w, x, y));
        let dx = 8.0 * g.hx;
        let spec = DifferenceSpec { u1: u.clone(), u2: u, shift: (dx, 0.0) };
        let v = difference_field(&spec).unwrap();
        // u₁(p − ξ) − u₂(p) = −tilt·ξ₁ with tilt = 1 at w = √2π.
        let gv = v.grid();
        for j in 1..gv.ny - 1 {
            for i in 1..gv.nx - 1 {
                assert!((v.get(i, j) + dx).abs() < 1e-11, "got {}", v.get(i, j));
            }
        }
    }

    #[test]
    fn too_large_vertical_shift_has_no_overlap() {
        let w = PI;
        let u = field_on(w, |x, y| x + y);
        let spec = DifferenceSpec { u1: u.clone(), u2: u, shift: (0.0, w) };
        assert!(matches!(difference_field(&spec), Err(Error::NoOverlap { .. })));
    }

    #[test]
    fn special_points_follow_the_shift_sign() {
        let w = PI / 2.0;
        let g = Grid::build(&DomainSpec::strip(w, -4.0, 4.0, w / 16.0)).unwrap();
        let u = ScalarField::from_fn(g, |x, y| x + y);
        let up = DifferenceSpec { u1: u.clone(), u2: u.clone(), shift: (0.3, 0.2) };
        let sp = up.special_points(Some(1.0));
        assert_eq!(sp.xi_point, (0.3, 0.2));
        assert_eq!(sp.xhat_point, Some((1.0, w)));
        let down = DifferenceSpec { u1: u.clone(), u2: u, shift: (0.3, -0.2) };
        let sp = down.special_points(Some(1.0));
        assert_eq!(sp.xi_point, (0.0, 0.0));
        assert_eq!(sp.xhat_point, Some((1.3, w - 0.2)));
    }
}
