use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DomainSpec, NodeMask, ScalarField};
use crate::pde::{solve_bvp, SolverConfig};
use crate::surfaces::kind::SurfaceKind;

/// Parameters of the x̂ search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub h: f64,
    /// Truncation margin X: the window is [−X, x̂ + X], which makes the point
    /// reflection σ(x,y) = (x̂−x, w−y) map grid nodes to grid nodes exactly.
    pub x_margin: f64,
    pub solver: SolverConfig,
    pub coarse_samples: usize,
    pub xhat_tol: f64,
}

impl CalibrationConfig {
    /// Search defaults: the scan runs at w/32 (each candidate is a full
    /// solve); verify the winner at the target resolution separately.
    pub fn for_width(w: f64) -> Self {
        CalibrationConfig {
            h: w / 32.0,
            x_margin: 2.5 * w,
            solver: SolverConfig::default(),
            coarse_samples: 8,
            xhat_tol: 1e-3 * w,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub xhat: f64,
    pub symmetry_residual: f64,
    /// (candidate, residual) pairs in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Sup over the core window of |u − u∘σ| with σ(x,y) = (x̂−x, w−y). On a
/// σ-symmetric truncation the reflected node is again a grid node, so the
/// residual involves no interpolation.
pub fn symmetry_residual(field: &ScalarField) -> f64 {
    let g = field.grid();
    let mut sup: f64 = 0.0;
    for j in 2..g.ny.saturating_sub(2) {
        for i in 1..g.nx - 1 {
            let (x, _) = g.node_xy(i, j);
            if field.mask_at(i, j) != NodeMask::Interior || !g.in_core_window(x) {
                continue;
            }
            let (ir, jr) = (g.nx - 1 - i, g.ny - 1 - j);
            sup = sup.max((field.get(i, j) - field.get(ir, jr)).abs());
        }
    }
    sup
}

/// Solve a helicoid candidate with the a-priori anchored traces (the fast
/// single-pass variant used inside the search loop).
pub fn solve_helicoid_candidate(
    w: f64,
    xhat: f64,
    config: &CalibrationConfig,
) -> Result<(ScalarField, crate::pde::SolveReport)> {
    let dom = DomainSpec::strip(w, -config.x_margin, xhat + config.x_margin, config.h);
    let grid = crate::grid::Grid::build(&dom)?;
    let kind = SurfaceKind::Helicoid { w, xhat: Some(xhat) };
    let bc = crate::surfaces::boundary_data::make_boundary_spec(&kind, &dom, config.solver.final_cap())?;
    solve_bvp(&grid, &bc, &config.solver, None)
}

/// Find x̂ by minimizing the σ-symmetry residual of the solved helicoid
/// candidate: a coarse bracket scan over (0, 3w] followed by golden-section
/// refinement. The criterion is forced by uniqueness: the boundary data of a
/// helicoid is σ-invariant, so the true solution satisfies u∘σ = u.
pub fn helicoid_axis_calibrate(w: f64, config: &CalibrationConfig) -> Result<CalibrationReport> {
    SurfaceKind::Helicoid { w, xhat: None }.validate()?;
    let mut evaluations: Vec<(f64, f64)> = Vec::new();
    let eval = |xhat: f64, evals: &mut Vec<(f64, f64)>| -> Result<f64> {
        let (field, report) = solve_helicoid_candidate(w, xhat, config)?;
        let res = if report.converged { symmetry_residual(&field) } else { f64::INFINITY };
        evals.push((xhat, res));
        Ok(res)
    };

    let lo_bound = (4.0 * config.h).max(0.05 * w);
    let hi_bound = 3.0 * w;
    let n = config.coarse_samples.max(3);
    let mut best_k = 0usize;
    let mut best_res = f64::INFINITY;
    let mut coarse: Vec<(f64, f64)> = Vec::with_capacity(n);
    for k in 0..n {
        let x = lo_bound + (hi_bound - lo_bound) * k as f64 / (n - 1) as f64;
        let r = eval(x, &mut evaluations)?;
        coarse.push((x, r));
        if r < best_res {
            best_res = r;
            best_k = k;
        }
    }
    let mut a = coarse[best_k.saturating_sub(1)].0;
    let mut b = coarse[(best_k + 1).min(n - 1)].0;
    if a >= b {
        b = a + config.xhat_tol;
    }

    // Golden-section refinement of the bracket.
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = eval(x1, &mut evaluations)?;
    let mut f2 = eval(x2, &mut evaluations)?;
    while b - a > config.xhat_tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1, &mut evaluations)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2, &mut evaluations)?;
        }
    }
    let (xhat, residual) = evaluations
        .iter()
        .copied()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("at least one evaluation");

    let floor = 10.0 * config.h * config.h;
    if residual > floor {
        return Err(Error::CalibrationFailed {
            best_xhat: xhat,
            residual,
            floor,
        });
    }
    Ok(CalibrationReport {
        xhat,
        symmetry_residual: residual,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn sigma_is_an_involution_on_grid_nodes() {
        let w = PI / 2.0;
        let xhat = 0.75;
        let dom = DomainSpec::strip(w, -2.0 * w, xhat + 2.0 * w, w / 16.0);
        let g = Grid::build(&dom).unwrap();
        for (i, j) in [(3, 2), (10, 5), (g.nx - 2, g.ny - 2)] {
            let (x, y) = g.node_xy(i, j);
            let (xs, ys) = (xhat - x, w - y);
            let (xss, yss) = (xhat - xs, w - ys);
            assert!((xss - x).abs() < 1e-12 && (yss - y).abs() < 1e-12);
            // σ lands on the mirrored grid node.
            let (xr, yr) = g.node_xy(g.nx - 1 - i, g.ny - 1 - j);
            assert!((xr - xs).abs() < 1e-12 && (yr - ys).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetry_residual_vanishes_on_symmetric_fields() {
        let w = PI / 2.0;
        let xhat = 0.6;
        let dom = DomainSpec::strip(w, -2.0 * w, xhat + 2.0 * w, w / 16.0);
        let g = Grid::build(&dom).unwrap();
        // f(x,y) = (x − x̂/2)·(y − w/2) is σ-invariant.
        let f = ScalarField::from_fn(g, move |x, y| (x - xhat / 2.0) * (y - w / 2.0));
        assert!(symmetry_residual(&f) < 1e-12);
    }
}
