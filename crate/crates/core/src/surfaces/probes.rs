use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{NodeMask, ScalarField};
use crate::pde::InitGuess;
use crate::surfaces::calibrate::{helicoid_axis_calibrate, solve_helicoid_candidate, CalibrationConfig};
use crate::surfaces::construct::{construct_piece, PieceConfig};
use crate::surfaces::kind::SurfaceKind;
use crate::surfaces::mesh::triangulate_field;

/// Distance between two solution fields modulo vertical translation:
/// d = min_c sup |u₁ − u₂ − c| over the core window, sampled on the finer
/// grid. Returns (d, c). The midrange shift attains the minimum exactly.
pub fn quotient_distance(u1: &ScalarField, u2: &ScalarField) -> Option<(f64, f64)> {
    let (fine, other) = if u1.grid().hx * u1.grid().hy <= u2.grid().hx * u2.grid().hy {
        (u1, u2)
    } else {
        (u2, u1)
    };
    let g = fine.grid();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 2..g.ny.saturating_sub(2) {
        for i in 1..g.nx - 1 {
            if fine.mask_at(i, j) != NodeMask::Interior {
                continue;
            }
            let (x, y) = g.node_xy(i, j);
            if !g.in_core_window(x) {
                continue;
            }
            let Some(v2) = other.interp(x, y) else { continue };
            let d = fine.get(i, j) - v2;
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    if lo.is_finite() && hi.is_finite() {
        Some(((hi - lo) / 2.0, (hi + lo) / 2.0))
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeSeed {
    HarmonicLift,
    Zero,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeRun {
    pub seed: ProbeSeed,
    pub h: f64,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbePair {
    pub run_a: usize,
    pub run_b: usize,
    /// Quotient distance min_c sup|u_a − u_b − c| on the core window.
    pub distance: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub runs: Vec<ProbeRun>,
    pub pairs: Vec<ProbePair>,
    pub failures: usize,
}

/// Solve the same surface under different seeds and discretizations and
/// report pairwise quotient distances. Failed runs are flagged, not fatal.
pub fn uniqueness_probe(
    kind: &SurfaceKind,
    base: &PieceConfig,
    seeds: &[ProbeSeed],
    h_list: &[f64],
) -> Result<(ProbeReport, Vec<Option<ScalarField>>)> {
    let total = seeds.len() * h_list.len();
    if total < 2 {
        return Err(Error::Format("uniqueness probe needs at least two runs".into()));
    }
    let mut runs = Vec::new();
    let mut fields: Vec<Option<ScalarField>> = Vec::new();
    for &h in h_list {
        for &seed in seeds {
            let mut config = base.clone();
            config.h = h;
            config.solver.init_guess = match seed {
                ProbeSeed::HarmonicLift => InitGuess::HarmonicLift,
                ProbeSeed::Zero => InitGuess::Zero,
            };
            match construct_piece(kind, &config) {
                Ok((field, report)) => {
                    runs.push(ProbeRun {
                        seed,
                        h,
                        converged: report.converged,
                        error: None,
                    });
                    fields.push(report.converged.then_some(field));
                }
                Err(e) => {
                    runs.push(ProbeRun {
                        seed,
                        h,
                        converged: false,
                        error: Some(e.to_string()),
                    });
                    fields.push(None);
                }
            }
        }
    }
    let mut pairs = Vec::new();
    for a in 0..fields.len() {
        for b in a + 1..fields.len() {
            if let (Some(fa), Some(fb)) = (&fields[a], &fields[b]) {
                if let Some((distance, shift)) = quotient_distance(fa, fb) {
                    pairs.push(ProbePair { run_a: a, run_b: b, distance, shift });
                }
            }
        }
    }
    let failures = fields.iter().filter(|f| f.is_none()).count();
    Ok((ProbeReport { runs, pairs, failures }, fields))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitEntry {
    pub w: f64,
    pub xhat: f64,
    pub sup_mean_curvature: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitsReport {
    pub entries: Vec<LimitEntry>,
    pub strictly_decreasing: bool,
}

/// Knobs for the rescaled-helicoid limit scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitsConfig {
    /// Grid spacing as a fraction of w.
    pub rel_h: f64,
    /// Truncation margin as a multiple of w.
    pub margin_factor: f64,
    pub coarse_samples: usize,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        LimitsConfig {
            rel_h: 1.0 / 48.0,
            margin_factor: 2.5,
            coarse_samples: 6,
        }
    }
}

/// For a descending list of widths w < π, solve the helicoid, rescale the
/// mesh by 1/w, and report the sup of the discrete mean curvature over the
/// core. The sequence must decrease toward the minimal-surface limit.
pub fn rescaled_helicoid_limit_check(w_list: &[f64], config: &LimitsConfig) -> Result<LimitsReport> {
    let mut entries = Vec::new();
    for &w in w_list {
        entries.push(rescaled_limit_entry(w, config)?);
    }
    let strictly_decreasing = entries
        .windows(2)
        .all(|p| p[1].sup_mean_curvature < p[0].sup_mean_curvature);
    Ok(LimitsReport { entries, strictly_decreasing })
}

/// One width's rescaled-curvature measurement (exposed so sweeps can fan out).
pub fn rescaled_limit_entry(w: f64, config: &LimitsConfig) -> Result<LimitEntry> {
    SurfaceKind::Helicoid { w, xhat: None }.validate()?;
    let mut cal = CalibrationConfig::for_width(w);
    cal.h = w * config.rel_h;
    cal.x_margin = config.margin_factor * w;
    cal.coarse_samples = config.coarse_samples;
    let report = helicoid_axis_calibrate(w, &cal)?;
    let (field, solve_report) = solve_helicoid_candidate(w, report.xhat, &cal)?;
    solve_report.ensure_converged()?;
    let b_final = cal.solver.final_cap();
    let mesh = triangulate_field(&field, 0.75 * b_final).scaled(1.0 / w);
    // Core: central half of the truncation, z well below the rescaled cap.
    let g = field.grid();
    let x_lo = (g.x_center() - 0.25 * (g.spec.x_max - g.spec.x_min)) / w;
    let x_hi = (g.x_center() + 0.25 * (g.spec.x_max - g.spec.x_min)) / w;
    let z_cap = 0.375 * b_final / w;
    let sup = mesh.mean_curvature_sup(|p| p[0] >= x_lo && p[0] <= x_hi && p[2].abs() <= z_cap);
    Ok(LimitEntry {
        w,
        xhat: report.xhat,
        sup_mean_curvature: sup,
    })
}
