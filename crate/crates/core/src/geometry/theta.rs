use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{fd_derivatives, NodeMask, ScalarField};

/// Node-selection region for θ-graph checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum Region {
    All,
    Window { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Ω^±_{p_a}(R): the part of the strip beyond the circle of radius R
    /// about the axis point, in the ±x direction.
    SectorBeyond { direction: i8, radius: f64 },
}

impl Region {
    pub fn contains(&self, p_a: (f64, f64), x: f64, y: f64) -> bool {
        match *self {
            Region::All => true,
            Region::Window { x0, x1, y0, y1 } => x >= x0 && x <= x1 && y >= y0 && y <= y1,
            Region::SectorBeyond { direction, radius } => {
                let dx = x - p_a.0;
                let dy = y - p_a.1;
                let beyond = dx * dx >= (radius * radius - dy * dy).max(0.0);
                beyond && (direction as f64) * dx > 0.0
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaGraphReport {
    pub pass: bool,
    pub checked_nodes: usize,
    /// Discrete critical curve C_{p_a}: nodes where the collinearity function
    /// s = u_x·(y−y_a) − u_y·(x−x_a) vanishes at scale-aware tolerance.
    pub zero_nodes: Vec<(f64, f64)>,
    /// Midpoints of grid edges across which s changes sign.
    pub sign_change_edges: Vec<(f64, f64)>,
    /// Nodes with |Du| ≈ 0 (the criterion also requires Du ≠ 0).
    pub degenerate_gradient: Vec<(f64, f64)>,
}

/// Differential θ-graph criterion: Du(p) and p − p_a never collinear on the
/// region. Passes iff s keeps one sign, never degenerates, and |Du| > 0.
pub fn theta_graph_check(
    field: &ScalarField,
    p_a: (f64, f64),
    region: &Region,
) -> Result<ThetaGraphReport> {
    let grid = field.grid();
    // The axis must lie outside the closed region under scrutiny.
    let y_lo = grid.spec.y_min;
    let y_hi = grid.spec.y_min + grid.spec.w;
    let inside_domain = p_a.0 >= grid.spec.x_min
        && p_a.0 <= grid.spec.x_max
        && p_a.1 >= y_lo
        && p_a.1 <= y_hi;
    if inside_domain && region.contains(p_a, p_a.0, p_a.1) {
        return Err(Error::InvalidAxis(format!(
            "axis point ({}, {}) lies inside the checked region",
            p_a.0, p_a.1
        )));
    }
    let mut s_field = vec![f64::NAN; grid.node_count()];
    let mut report = ThetaGraphReport {
        pass: true,
        checked_nodes: 0,
        zero_nodes: Vec::new(),
        sign_change_edges: Vec::new(),
        degenerate_gradient: Vec::new(),
    };
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            let (x, y) = grid.node_xy(i, j);
            if field.mask_at(i, j) != NodeMask::Interior || !region.contains(p_a, x, y) {
                continue;
            }
            let d = fd_derivatives(field, i, j)?;
            let grad = (d.ux * d.ux + d.uy * d.uy).sqrt();
            let dist = ((x - p_a.0).powi(2) + (y - p_a.1).powi(2)).sqrt();
            let s = d.ux * (y - p_a.1) - d.uy * (x - p_a.0);
            s_field[grid.index(i, j)] = s;
            report.checked_nodes += 1;
            let tol = 1e-8 * (1.0 + grad) * (1.0 + dist);
            if grad <= 1e-12 {
                report.degenerate_gradient.push((x, y));
                report.pass = false;
            }
            if s.abs() < tol {
                report.zero_nodes.push((x, y));
                report.pass = false;
            }
        }
    }
    // Sign changes across grid edges within the region.
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            let here = s_field[grid.index(i, j)];
            if here.is_nan() {
                continue;
            }
            for (di, dj) in [(1usize, 0usize), (0, 1)] {
                let (i2, j2) = (i + di, j + dj);
                if i2 >= grid.nx || j2 >= grid.ny {
                    continue;
                }
                let there = s_field[grid.index(i2, j2)];
                if !there.is_nan() && here * there < 0.0 {
                    let (x1, y1) = grid.node_xy(i, j);
                    let (x2, y2) = grid.node_xy(i2, j2);
                    report.sign_change_edges.push(((x1 + x2) / 2.0, (y1 + y2) / 2.0));
                    report.pass = false;
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeScan {
    /// (R₀, ε): |u_y/u_x| ≥ ε on the window beyond |x| = R₀.
    pub found: Option<(f64, f64)>,
    /// Column minimum at the outermost scanned column.
    pub outermost_min: f64,
    /// (x, column min ratio) from the far edge inward.
    pub profile: Vec<(f64, f64)>,
}

/// Scan columns from the ±x far edge inward for the largest window on which
/// min |u_y/u_x| stays above `eps_floor`. Nodes with u_x = 0 satisfy any
/// bound (the ratio limit is ±∞).
pub fn slope_bound_scan(field: &ScalarField, direction: i8, eps_floor: f64) -> SlopeScan {
    let grid = field.grid();
    let cols: Vec<usize> = if direction >= 0 {
        (2..grid.nx - 2).rev().collect()
    } else {
        (2..grid.nx - 2).collect()
    };
    let mut profile = Vec::new();
    let mut running_min = f64::INFINITY;
    let mut found: Option<(f64, f64)> = None;
    let mut outermost_min = f64::INFINITY;
    for (scanned, &i) in cols.iter().enumerate() {
        let mut col_min = f64::INFINITY;
        for j in 2..grid.ny - 2 {
            if field.mask_at(i, j) != NodeMask::Interior {
                continue;
            }
            let Ok(d) = fd_derivatives(field, i, j) else { continue };
            if d.ux.abs() == 0.0 {
                continue; // ratio +∞, satisfies any bound
            }
            col_min = col_min.min((d.uy / d.ux).abs());
        }
        let (x, _) = grid.node_xy(i, 0);
        profile.push((x, col_min));
        if scanned == 0 {
            outermost_min = col_min;
        }
        if running_min.min(col_min) >= eps_floor {
            running_min = running_min.min(col_min);
            found = Some((x.abs(), running_min));
        } else {
            break;
        }
    }
    SlopeScan {
        found,
        outermost_min,
        profile,
    }
}

/// δ(p_a, R) = (w + |y_a|)/√(R² − (w + |y_a|)²): the angular bound that
/// certifies θ-graph regions whenever δ < the measured slope floor ε.
pub fn delta_bound(p_a: (f64, f64), radius: f64, w: f64) -> Result<f64> {
    let reach = w + p_a.1.abs();
    if radius <= reach {
        return Err(Error::InvalidRadius { radius, limit: reach });
    }
    Ok(reach / (radius * radius - reach * reach).sqrt())
}
