use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{BoundarySpec, DomainSpec, EdgeSpec, Grid, NodeMask, ScalarField, Segment};
use crate::pde::{resample, solve_bvp, SolveReport, SolverConfig, StageReport};
use crate::surfaces::boundary_data::{make_boundary_spec, piece_domain};
use crate::surfaces::calibrate::{helicoid_axis_calibrate, CalibrationConfig};
use crate::surfaces::kind::{g_w, SurfaceKind};

/// Truncation and solver parameters for one fundamental-piece construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub h: f64,
    pub solver: SolverConfig,
}

impl PieceConfig {
    pub fn new(x_min: f64, x_max: f64, h: f64) -> Self {
        PieceConfig {
            x_min,
            x_max,
            h,
            solver: SolverConfig::default(),
        }
    }
}

/// Fitted x-edge trace parameters measured on the bootstrap solve.
#[derive(Debug, Clone)]
pub enum FitParams {
    /// Pitchfork: steep plane-side line m·(y − y₀) on the left, g_w offset c
    /// on the right.
    Pitchfork { slope: f64, y_zero: f64, reaper_offset: f64 },
    /// Helicoid: steep lines on both ends.
    Helicoid { left: (f64, f64), right: (f64, f64) },
    /// Scherkenoid: the frozen bootstrap column, linearly interpolated.
    Scherkenoid { ys: Vec<f64>, us: Vec<f64> },
}

/// Build the boundary-value problem for a surface kind and solve it.
///
/// The cap schedule is walked with the boundary rebuilt per stage, so finite
/// traces scale with the running cap exactly like the capped ±∞ segments.
/// Kinds without exact truncation traces run two passes: a coarse bootstrap
/// with a-priori anchored traces, then the full-resolution solve with traces
/// refitted from the bootstrap. A helicoid without x̂ is calibrated first.
/// `solver.continuation_in_x` re-runs the construction over widening
/// truncations, warm-starting from the previous field.
pub fn construct_piece(kind: &SurfaceKind, config: &PieceConfig) -> Result<(ScalarField, SolveReport)> {
    kind.validate()?;
    let kind = match kind {
        SurfaceKind::Helicoid { w, xhat: None } => {
            let cal = helicoid_axis_calibrate(*w, &CalibrationConfig::for_width(*w))?;
            SurfaceKind::Helicoid { w: *w, xhat: Some(cal.xhat) }
        }
        other => other.clone(),
    };

    if let SurfaceKind::GrimReaper { w } | SurfaceKind::TiltedGrimReaper { w } = kind {
        // Closed form; nothing to solve. Report the discrete residual.
        let dom = piece_domain(&kind, config.x_min, config.x_max, config.h)?;
        let field = crate::surfaces::boundary_data::grim_reaper_field(w, &dom)?;
        let r = crate::pde::translator_residual(&field);
        let mut sup: f64 = 0.0;
        let g = field.grid();
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                sup = sup.max(r.get(i, j).abs());
            }
        }
        let report = SolveReport {
            converged: true,
            final_residual: sup,
            ..Default::default()
        };
        return Ok((field, report));
    }

    let mut truncations: Vec<f64> = config.solver.continuation_in_x.clone();
    if truncations.is_empty() {
        truncations.push(config.x_max);
    }
    let mut warm: Option<ScalarField> = None;
    let mut out: Option<(ScalarField, SolveReport)> = None;
    for &x_max in &truncations {
        let scale = x_max / config.x_max;
        let x_min = if config.x_min < 0.0 { config.x_min * scale } else { config.x_min };
        let dom = piece_domain(&kind, x_min, x_max, config.h)?;
        let solved = construct_on_domain(&kind, &dom, &config.solver, warm.as_ref())?;
        warm = Some(solved.0.clone());
        out = Some(solved);
    }
    Ok(out.expect("at least one truncation"))
}

fn construct_on_domain(
    kind: &SurfaceKind,
    dom: &DomainSpec,
    solver: &SolverConfig,
    init: Option<&ScalarField>,
) -> Result<(ScalarField, SolveReport)> {
    let two_pass = matches!(
        kind,
        SurfaceKind::Pitchfork { .. } | SurfaceKind::Helicoid { .. } | SurfaceKind::Scherkenoid { .. }
    );
    if !two_pass {
        return staged_solve(kind, dom, solver, None, init);
    }
    // Pass 1: coarse bootstrap with the a-priori anchored traces; the refit
    // needs the asymptotic shape, not fine-grid accuracy.
    let mut h_boot = dom.h;
    while h_boot * 2.0 <= dom.w / 16.0 * (1.0 + 1e-12) {
        h_boot *= 2.0;
    }
    let boot_dom = DomainSpec { h: h_boot, ..dom.clone() };
    let (bootstrap, boot_report) = staged_solve(kind, &boot_dom, solver, None, init)?;
    if !boot_report.converged {
        let grid = Grid::build(dom)?;
        return Ok((resample(&bootstrap, &grid), boot_report));
    }
    let fits = fit_params(kind, &bootstrap, solver.final_cap());
    // Pass 2: target resolution with the refitted traces, from scratch (warm
    // starts across grids carry a kink at the sign change that stalls Newton).
    staged_solve(kind, dom, solver, fits.as_ref(), None)
}

/// Walk the cap schedule with the boundary spec rebuilt at every stage.
fn staged_solve(
    kind: &SurfaceKind,
    dom: &DomainSpec,
    solver: &SolverConfig,
    fits: Option<&FitParams>,
    init: Option<&ScalarField>,
) -> Result<(ScalarField, SolveReport)> {
    let grid = Grid::build(dom)?;
    let mut current: Option<ScalarField> = init.map(|f| resample(f, &grid));
    let mut stages: Vec<StageReport> = Vec::new();
    let mut stage_drifts: Vec<f64> = Vec::new();
    let mut prev_core: Option<Vec<f64>> = None;
    let mut failed_stage = None;
    for (k, &cap) in solver.cap_schedule.iter().enumerate() {
        let bc = bc_for_stage(kind, dom, fits, cap)?;
        let cfg = SolverConfig {
            cap_schedule: vec![cap],
            ..solver.clone()
        };
        let (u, rep) = solve_bvp(&grid, &bc, &cfg, current.as_ref())?;
        stages.extend(rep.stages.iter().cloned());
        current = Some(u);
        if !rep.converged {
            failed_stage = Some(k);
            break;
        }
        let core = core_snapshot(current.as_ref().unwrap(), &grid);
        if let Some(prev) = &prev_core {
            let drift = core.iter().zip(prev).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            stage_drifts.push(drift);
        }
        prev_core = Some(core);
    }
    let final_residual = stages.last().map(|s| s.final_residual).unwrap_or(f64::NAN);
    let report = SolveReport {
        converged: failed_stage.is_none() && final_residual <= solver.newton_tol,
        final_residual,
        interior_drift: stage_drifts.last().copied(),
        stage_drifts,
        stages,
        failed_stage,
    };
    Ok((current.expect("schedule non-empty"), report))
}

fn core_snapshot(u: &ScalarField, grid: &Grid) -> Vec<f64> {
    let mut out = Vec::new();
    for j in 1..grid.ny - 1 {
        for i in 0..grid.nx {
            let (x, _) = grid.node_xy(i, j);
            if u.mask_at(i, j) == NodeMask::Interior && grid.in_core_window(x) {
                out.push(u.get(i, j));
            }
        }
    }
    out
}

/// Boundary prescription for one cap stage: the a-priori anchored spec, with
/// fitted traces substituted once the bootstrap has been measured.
fn bc_for_stage(
    kind: &SurfaceKind,
    dom: &DomainSpec,
    fits: Option<&FitParams>,
    cap: f64,
) -> Result<BoundarySpec> {
    let mut bc = make_boundary_spec(kind, dom, cap)?;
    let y0 = dom.y_min;
    let y1 = dom.y_min + dom.w;
    match (kind, fits) {
        (SurfaceKind::Pitchfork { w }, Some(FitParams::Pitchfork { slope, y_zero, reaper_offset })) => {
            let (m, yz, c, w) = (*slope, *y_zero, *reaper_offset, *w);
            bc.left = EdgeSpec::Dirichlet(vec![Segment::trace(y0, y1, move |y: f64| {
                (m * (y - yz)).clamp(-cap, cap)
            })]);
            let x_edge = dom.x_max;
            let clamp_lo = (dom.h / 2.0).max(1e-6);
            bc.right = EdgeSpec::Dirichlet(vec![Segment::trace(y0, y1, move |y: f64| {
                let yc = y.clamp(clamp_lo, w - clamp_lo);
                (g_w(w, x_edge, yc) + c).clamp(-cap, cap)
            })]);
        }
        (SurfaceKind::Helicoid { .. }, Some(FitParams::Helicoid { left, right })) => {
            let (ml, yl) = *left;
            let (mr, yr) = *right;
            bc.left = EdgeSpec::Dirichlet(vec![Segment::trace(y0, y1, move |y: f64| {
                (ml * (y - yl)).clamp(-cap, cap)
            })]);
            bc.right = EdgeSpec::Dirichlet(vec![Segment::trace(y0, y1, move |y: f64| {
                (mr * (y - yr)).clamp(-cap, cap)
            })]);
        }
        (SurfaceKind::Scherkenoid { .. }, Some(FitParams::Scherkenoid { ys, us })) => {
            let (ys, us) = (ys.clone(), us.clone());
            bc.right = EdgeSpec::Dirichlet(vec![Segment::trace(y0, y1, move |y: f64| {
                interp_column(&ys, &us, y).clamp(-cap, cap)
            })]);
        }
        _ => {}
    }
    Ok(bc)
}

/// Measure the refit parameters on the bootstrap's penultimate columns.
fn fit_params(kind: &SurfaceKind, bootstrap: &ScalarField, b_final: f64) -> Option<FitParams> {
    let g = bootstrap.grid();
    match *kind {
        SurfaceKind::Pitchfork { w } => {
            let (slope, y_zero) = crossing_slope(bootstrap, 1);
            Some(FitParams::Pitchfork {
                slope,
                y_zero,
                reaper_offset: reaper_offset_fit(bootstrap, g.nx - 2, w),
            })
        }
        SurfaceKind::Helicoid { .. } => Some(FitParams::Helicoid {
            left: crossing_slope(bootstrap, 1),
            right: crossing_slope(bootstrap, g.nx - 2),
        }),
        SurfaceKind::Scherkenoid { .. } => {
            let i = g.nx - 2;
            let ys: Vec<f64> = (0..g.ny).map(|j| g.node_xy(i, j).1).collect();
            let us: Vec<f64> = (0..g.ny)
                .map(|j| bootstrap.get(i, j).clamp(-b_final, b_final))
                .collect();
            Some(FitParams::Scherkenoid { ys, us })
        }
        _ => None,
    }
}

/// Slope of a steep column profile at its zero crossing: "a large constant
/// slope in y fitted from the penultimate column".
fn crossing_slope(field: &ScalarField, i: usize) -> (f64, f64) {
    let g = field.grid();
    let mut y_zero = g.spec.y_min + 0.5 * g.spec.w;
    let mut found = false;
    for j in 1..g.ny - 1 {
        let (a, b) = (field.get(i, j), field.get(i, j + 1));
        if a == 0.0 || a * b < 0.0 {
            let t = if (a - b).abs() < 1e-300 { 0.5 } else { a / (a - b) };
            let (_, ya) = g.node_xy(i, j);
            y_zero = ya + t * g.hy;
            found = true;
            break;
        }
    }
    if !found {
        // Monotone column without a crossing: midpoint and end-to-end slope.
        let span = field.get(i, g.ny - 2) - field.get(i, 1);
        return (span / ((g.ny as f64 - 3.0) * g.hy), y_zero);
    }
    // Central slope across the crossing, one cell on each side.
    let jc = (((y_zero - g.spec.y_min) / g.hy).round() as usize).clamp(2, g.ny - 3);
    let slope = (field.get(i, jc + 1) - field.get(i, jc - 1)) / (2.0 * g.hy);
    (slope, y_zero)
}

/// Mean offset of the bootstrap from g_w over the central rows of a column.
fn reaper_offset_fit(field: &ScalarField, i: usize, w: f64) -> f64 {
    let g = field.grid();
    let mut sum = 0.0;
    let mut count = 0usize;
    for j in 1..g.ny - 1 {
        let (x, y) = g.node_xy(i, j);
        let rel = (y - g.spec.y_min) / g.spec.w;
        if (0.25..=0.75).contains(&rel) {
            sum += field.get(i, j) - g_w(w, x, y);
            count += 1;
        }
    }
    sum / count.max(1) as f64
}

fn interp_column(ys: &[f64], us: &[f64], y: f64) -> f64 {
    match ys.binary_search_by(|p| p.total_cmp(&y)) {
        Ok(k) => us[k],
        Err(0) => us[0],
        Err(k) if k >= ys.len() => *us.last().unwrap(),
        Err(k) => {
            let t = (y - ys[k - 1]) / (ys[k] - ys[k - 1]);
            us[k - 1] * (1.0 - t) + us[k] * t
        }
    }
}

/// Deviation of a solved field from the translated exact reaper on a window:
/// min over vertical shifts c of sup |u − g_w − c|.
pub fn reaper_side_fit(
    field: &ScalarField,
    w: f64,
    keep: impl Fn(f64, f64) -> bool,
) -> Option<(f64, f64)> {
    let g = field.grid();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let (x, y) = g.node_xy(i, j);
            if keep(x, y) && field.mask_at(i, j) == NodeMask::Interior {
                let d = field.get(i, j) - g_w(w, x, y);
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
    }
    if lo.is_finite() && hi.is_finite() {
        // Midrange attains the sup-norm minimum exactly.
        Some(((hi - lo) / 2.0, (hi + lo) / 2.0))
    } else {
        None
    }
}

/// Minimum slope ratio |u_y/u_x| over interior nodes selected by `keep`;
/// nodes with u_x = 0 count as satisfying any bound (ratio +∞).
pub fn min_slope_ratio(field: &ScalarField, keep: impl Fn(f64, f64) -> bool) -> f64 {
    let g = field.grid();
    let mut min_ratio = f64::INFINITY;
    for j in 2..g.ny.saturating_sub(2) {
        for i in 1..g.nx - 1 {
            let (x, y) = g.node_xy(i, j);
            if !keep(x, y) || field.mask_at(i, j) != NodeMask::Interior {
                continue;
            }
            if let Ok(d) = crate::grid::fd_derivatives(field, i, j) {
                if d.ux.abs() > 0.0 {
                    min_ratio = min_ratio.min((d.uy / d.ux).abs());
                }
            }
        }
    }
    min_ratio
}

/// Resample a solved piece onto another grid (exposed for probes).
pub fn resample_piece(field: &ScalarField, dom: &DomainSpec) -> Result<ScalarField> {
    let grid = Grid::build(dom)?;
    Ok(resample(field, &grid))
}
