use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{BoundarySpec, DomainSpec, EdgeSpec, EdgeValue, Segment};
use crate::surfaces::kind::{g_w, SurfaceKind};

/// Computational domain of a fundamental piece truncated to `[x_min, x_max]`.
pub fn piece_domain(kind: &SurfaceKind, x_min: f64, x_max: f64, h: f64) -> Result<DomainSpec> {
    kind.validate()?;
    Ok(match *kind {
        SurfaceKind::GrimReaper { w } | SurfaceKind::TiltedGrimReaper { w } => {
            // Exact fields live on a window clear of the logarithmic edges.
            let margin = (w / 16.0).max(h);
            DomainSpec::window(x_min, x_max, margin, w - margin, h)
        }
        SurfaceKind::Pitchfork { w } | SurfaceKind::Helicoid { w, .. } => {
            DomainSpec::strip(w, x_min, x_max, h)
        }
        SurfaceKind::Scherk { alpha, w, length } => DomainSpec::parallelogram(alpha, w, length, h),
        SurfaceKind::Scherkenoid { alpha, w } => {
            // Truncated as a sheared parallelogram: the artificial right edge
            // is parallel to the finite slanted side.
            DomainSpec::parallelogram(alpha, w, x_max.max(4.0 * w), h)
        }
        SurfaceKind::Trident { neck, width } => {
            DomainSpec::strip(width, -neck, neck, h).periodic()
        }
    })
}

/// Boundary prescription of a fundamental piece. y-edges carry the paper's
/// ±∞ segments; truncation x-edges get finite asymptotic traces anchored at
/// the cap scale `b_final`: a steep linear profile on vertical-plane ends,
/// g_w (offset 0) on grim-reaper ends, and the 1-D capped profile on
/// sub-π reaper-like ends. `construct_piece` refits these traces from a
/// bootstrap solve. Sign-change abscissae must sit at least one strip width
/// inside the truncation window.
pub fn make_boundary_spec(kind: &SurfaceKind, dom: &DomainSpec, b_final: f64) -> Result<BoundarySpec> {
    kind.validate()?;
    let w = kind.strip_width();
    let (x_min, x_max) = (dom.x_min, dom.x_max);
    match *kind {
        SurfaceKind::GrimReaper { w } | SurfaceKind::TiltedGrimReaper { w } => {
            // Domain is an inset window, so all four traces are exact and finite.
            Ok(exact_reaper_bc_on(w, dom))
        }
        SurfaceKind::Pitchfork { .. } => {
            check_margin(&[0.0], w, x_min, x_max)?;
            Ok(BoundarySpec {
                bottom: EdgeSpec::Dirichlet(vec![
                    Segment::plus_inf(x_min, 0.0),
                    Segment::minus_inf(0.0, x_max),
                ]),
                top: EdgeSpec::uniform(EdgeValue::MinusInf, x_min, x_max),
                left: steep_edge(w, b_final, false),
                right: reaper_profile_edge(w, x_max, 0.0, b_final, dom.h),
            })
        }
        SurfaceKind::Helicoid { xhat, .. } => {
            let xhat = xhat.ok_or_else(|| {
                Error::InvalidWidth("helicoid boundary data needs x̂ (calibrate first)".into())
            })?;
            check_margin(&[0.0, xhat], w, x_min, x_max)?;
            Ok(BoundarySpec {
                bottom: EdgeSpec::Dirichlet(vec![
                    Segment::plus_inf(x_min, 0.0),
                    Segment::minus_inf(0.0, x_max),
                ]),
                top: EdgeSpec::Dirichlet(vec![
                    Segment::minus_inf(x_min, xhat),
                    Segment::plus_inf(xhat, x_max),
                ]),
                left: steep_edge(w, b_final, false),
                right: steep_edge(w, b_final, true),
            })
        }
        SurfaceKind::Scherk { w, length, .. } => Ok(BoundarySpec {
            // ±∞ on the pairs of opposite sides: −∞ horizontal, +∞ slanted.
            bottom: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, length),
            top: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, length),
            left: EdgeSpec::uniform(EdgeValue::PlusInf, 0.0, w),
            right: EdgeSpec::uniform(EdgeValue::PlusInf, 0.0, w),
        }),
        SurfaceKind::Scherkenoid { w, .. } => {
            let length = x_max.max(4.0 * w);
            Ok(BoundarySpec {
                bottom: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, length),
                top: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, length),
                left: EdgeSpec::uniform(EdgeValue::PlusInf, 0.0, w),
                right: if w >= PI {
                    sheared_reaper_edge(w, length, dom.shear_value(), 0.0, b_final, dom.h)
                } else {
                    capped_trough_edge(w, b_final)
                },
            })
        }
        SurfaceKind::Trident { neck, .. } => Ok(BoundarySpec {
            bottom: EdgeSpec::Dirichlet(vec![
                Segment::minus_inf(-neck, 0.0),
                Segment::plus_inf(0.0, neck),
            ]),
            top: EdgeSpec::uniform(EdgeValue::MinusInf, -neck, neck),
            left: EdgeSpec::Periodic,
            right: EdgeSpec::Periodic,
        }),
    }
}

/// Steep linear trace matching a vertical-plane asymptote: ±B at the edges,
/// sign flipped by `ascending`.
fn steep_edge(w: f64, b_final: f64, ascending: bool) -> EdgeSpec {
    let sign = if ascending { -1.0 } else { 1.0 };
    EdgeSpec::Dirichlet(vec![Segment::trace(0.0, w, move |y: f64| {
        (sign * b_final * (1.0 - 2.0 * y / w)).clamp(-b_final, b_final)
    })])
}

/// g_w + c trace for a grim-reaper end, finite at the corners.
fn reaper_profile_edge(w: f64, x_edge: f64, c: f64, b_final: f64, h: f64) -> EdgeSpec {
    sheared_reaper_edge(w, x_edge, 0.0, c, b_final, h)
}

/// Same on a slanted edge: the node abscissa is x_base + shear·y.
fn sheared_reaper_edge(w: f64, x_base: f64, shear: f64, c: f64, b_final: f64, h: f64) -> EdgeSpec {
    let clamp_lo = (h / 2.0).max(1e-6);
    EdgeSpec::Dirichlet(vec![Segment::trace(0.0, w, move |y: f64| {
        let yc = y.clamp(clamp_lo, w - clamp_lo);
        (g_w(w, x_base + shear * y, yc) + c).clamp(-b_final, b_final)
    })])
}

/// 1-D capped profile ln cos(y − w/2) − ln cos(w/2) − B for sub-π widths
/// (both horizontal edges at −∞, no reaper available).
fn capped_trough_edge(w: f64, b_final: f64) -> EdgeSpec {
    EdgeSpec::Dirichlet(vec![Segment::trace(0.0, w, move |y: f64| {
        ((y - w / 2.0).cos().ln() - (w / 2.0).cos().ln() - b_final).clamp(-b_final, b_final)
    })])
}

fn check_margin(sign_changes: &[f64], w: f64, x_min: f64, x_max: f64) -> Result<()> {
    for &s in sign_changes {
        if s - x_min < w || x_max - s < w {
            return Err(Error::TruncationTooTight(format!(
                "sign change at x = {s} needs margin ≥ w = {w} inside [{x_min}, {x_max}]"
            )));
        }
    }
    Ok(())
}

/// Exact g_w traces for a specific window domain.
pub fn exact_reaper_bc_on(w: f64, dom: &DomainSpec) -> BoundarySpec {
    let (x0, x1) = (dom.x_min, dom.x_max);
    let y0 = dom.y_min;
    let y1 = dom.y_min + dom.w;
    BoundarySpec {
        bottom: EdgeSpec::Dirichlet(vec![Segment::trace(x0, x1, move |x| g_w(w, x, y0))]),
        top: EdgeSpec::Dirichlet(vec![Segment::trace(x0, x1, move |x| g_w(w, x, y1))]),
        left: EdgeSpec::Dirichlet(vec![Segment::trace(y0, y1, move |y| g_w(w, x0, y))]),
        right: EdgeSpec::Dirichlet(vec![Segment::trace(y0, y1, move |y| g_w(w, x1, y))]),
    }
}

/// Evaluate g_w exactly on the nodes of a window grid.
pub fn grim_reaper_field(
    w: f64,
    window: &DomainSpec,
) -> Result<crate::grid::ScalarField> {
    if w < PI - 1e-12 {
        return Err(Error::InvalidWidth(format!("grim reaper fields require w ≥ π; got {w}")));
    }
    if window.y_min < window.h - 1e-12
        || window.y_min + window.w > w - window.h + 1e-12
    {
        return Err(Error::InvalidDomain(format!(
            "window [{}, {}] must avoid y ∈ {{0, {w}}} by at least h = {}",
            window.y_min,
            window.y_min + window.w,
            window.h
        )));
    }
    let grid = crate::grid::Grid::build(window)?;
    Ok(crate::grid::ScalarField::from_fn(grid, move |x, y| g_w(w, x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn pitchfork_edges_follow_the_paper_data() {
        let kind = SurfaceKind::Pitchfork { w: PI };
        let dom = piece_domain(&kind, -12.0, 12.0, PI / 16.0).unwrap();
        let bc = make_boundary_spec(&kind, &dom, 12.0).unwrap();
        assert_eq!(bc.sign_changes_on(crate::grid::Edge::Bottom), vec![0.0]);
        assert!(bc.sign_changes_on(crate::grid::Edge::Top).is_empty());
        let capped = bc.cap(10.0, 0.1);
        assert_eq!(capped.value(crate::grid::Edge::Bottom, -5.0, None), 10.0);
        assert_eq!(capped.value(crate::grid::Edge::Bottom, 5.0, None), -10.0);
        assert_eq!(capped.value(crate::grid::Edge::Top, 5.0, None), -10.0);
    }

    #[test]
    fn helicoid_edges_flip_at_xhat() {
        let kind = SurfaceKind::Helicoid { w: PI / 2.0, xhat: Some(1.0) };
        let dom = piece_domain(&kind, -12.0, 13.0, PI / 32.0).unwrap();
        let bc = make_boundary_spec(&kind, &dom, 12.0).unwrap();
        assert_eq!(bc.sign_changes_on(crate::grid::Edge::Bottom), vec![0.0]);
        assert_eq!(bc.sign_changes_on(crate::grid::Edge::Top), vec![1.0]);
        let capped = bc.cap(8.0, 0.1);
        assert_eq!(capped.value(crate::grid::Edge::Top, 0.0, None), -8.0);
        assert_eq!(capped.value(crate::grid::Edge::Top, 2.0, None), 8.0);
    }

    #[test]
    fn trident_bottom_alternates_within_one_period() {
        let kind = SurfaceKind::Trident { neck: 1.0, width: 1.5 };
        let dom = piece_domain(&kind, -1.0, 1.0, 1.5 / 16.0).unwrap();
        assert!(dom.periodic_x);
        let bc = make_boundary_spec(&kind, &dom, 12.0).unwrap();
        let g = Grid::build(&dom).unwrap();
        bc.validate(&g).unwrap();
        let capped = bc.cap(6.0, 0.05);
        assert_eq!(capped.value(crate::grid::Edge::Bottom, -0.5, Some(2.0)), -6.0);
        assert_eq!(capped.value(crate::grid::Edge::Bottom, 0.5, Some(2.0)), 6.0);
        assert_eq!(capped.value(crate::grid::Edge::Top, 0.3, Some(2.0)), -6.0);
        // Sign changes at 0 and at the periodic seam ±a.
        let pts = bc.sign_change_points(&g);
        assert_eq!(pts.len(), 2);
        // Ramp across the seam: just inside x = +1 the value interpolates.
        let v = capped.value(crate::grid::Edge::Bottom, 1.0 - 0.025, Some(2.0));
        assert!(v > 0.0 && v < 6.0);
    }

    #[test]
    fn tight_truncation_is_refused() {
        let kind = SurfaceKind::Pitchfork { w: PI };
        let dom = piece_domain(&kind, -2.0, 12.0, PI / 16.0).unwrap();
        assert!(matches!(
            make_boundary_spec(&kind, &dom, 12.0),
            Err(Error::TruncationTooTight(_))
        ));
    }

    #[test]
    fn reaper_window_must_avoid_edges() {
        let w = PI;
        let bad = DomainSpec::window(-2.0, 2.0, 0.0, w, 0.1);
        assert!(grim_reaper_field(w, &bad).is_err());
        let good = DomainSpec::window(-2.0, 2.0, 0.3, w - 0.3, 0.1);
        let f = grim_reaper_field(w, &good).unwrap();
        let (x, y) = f.grid().node_xy(3, 3);
        assert!((f.get(3, 3) - g_w(w, x, y)).abs() < 1e-15);
        assert!(grim_reaper_field(2.0, &good).is_err());
    }
}
