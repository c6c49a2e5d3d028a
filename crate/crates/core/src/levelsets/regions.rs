use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::grid::{NodeMask, ScalarField};
use crate::levelsets::arcs::{ArcSet, EndKind};
use crate::levelsets::critical::CriticalPoint;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionStep {
    pub lambda: f64,
    pub node_count: usize,
    pub fits_window: bool,
    pub bbox: Option<(f64, f64, f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionTrace {
    pub steps: Vec<RegionStep>,
    pub nested: bool,
    /// Smallest regular λ whose region fits inside the caller's window.
    pub first_fitting: Option<f64>,
}

/// Evolution of the level-set region: starting from the region S₀ bounded by
/// two same-direction arcs of {v = 0}, extract the super-level regions
/// S_λ ⊂ S₀ for a geometric ladder of regular values λ and report their
/// nesting and the first λ whose region fits inside the given window.
pub fn level_region_trace(
    v: &ScalarField,
    arcs: &ArcSet,
    pair: (usize, usize),
    critical_points: &[CriticalPoint],
    window: Option<(Region, (f64, f64))>,
) -> Result<RegionTrace> {
    let (a, b) = pair;
    if a >= arcs.arcs.len() || b >= arcs.arcs.len() || a == b {
        return Err(Error::NoRegion("arc pair indices out of range".into()));
    }
    let dir_of = |k: usize| -> Option<i8> {
        let arc = &arcs.arcs[k];
        let ends = [arc.ends.0, arc.ends.1];
        if ends.contains(&EndKind::ExitPlusX) {
            Some(1)
        } else if ends.contains(&EndKind::ExitMinusX) {
            Some(-1)
        } else {
            None
        }
    };
    let (da, db) = (dir_of(a), dir_of(b));
    if da.is_none() || da != db {
        return Err(Error::NoRegion(
            "the two arcs must run to infinity in the same x-direction".into(),
        ));
    }
    // Seed between the two arcs: midpoint of their far endpoints.
    let far_point = |k: usize| -> (f64, f64) {
        let arc = &arcs.arcs[k];
        let first = *arc.points.first().unwrap();
        let last = *arc.points.last().unwrap();
        match (arc.ends.0, arc.ends.1) {
            (EndKind::ExitPlusX | EndKind::ExitMinusX, _) => first,
            _ => last,
        }
    };
    let pa = far_point(a);
    let pb = far_point(b);
    let seed_xy = ((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0);
    let g = v.grid();
    let to_index = |x: f64, y: f64| -> Option<(usize, usize)> {
        let i = ((x - g.spec.x_min) / g.hx).round();
        let j = ((y - g.spec.y_min) / g.hy).round();
        if i < 0.0 || j < 0.0 || i >= g.nx as f64 || j >= g.ny as f64 {
            None
        } else {
            Some((i as usize, j as usize))
        }
    };
    let seed = to_index(seed_xy.0, seed_xy.1)
        .ok_or_else(|| Error::NoRegion("seed between arcs falls outside the grid".into()))?;
    let sigma = v.get(seed.0, seed.1).signum();
    if sigma == 0.0 {
        return Err(Error::NoRegion("seed sits on the zero set".into()));
    }

    // S₀: connected component of {σ·v > 0} containing the seed.
    let usable = |i: usize, j: usize| v.mask_at(i, j) != NodeMask::Excluded;
    let mut s0 = vec![false; g.node_count()];
    let mut stack = vec![seed];
    let mut l2 = f64::NEG_INFINITY;
    let mut peak = seed;
    while let Some((i, j)) = stack.pop() {
        let idx = g.index(i, j);
        if s0[idx] || !usable(i, j) || sigma * v.get(i, j) <= 0.0 {
            continue;
        }
        s0[idx] = true;
        let val = sigma * v.get(i, j);
        if val > l2 {
            l2 = val;
            peak = (i, j);
        }
        if i > 0 {
            stack.push((i - 1, j));
        }
        if j > 0 {
            stack.push((i, j - 1));
        }
        if i + 1 < g.nx {
            stack.push((i + 1, j));
        }
        if j + 1 < g.ny {
            stack.push((i, j + 1));
        }
    }
    if l2 <= 0.0 {
        return Err(Error::NoRegion("empty region between the arcs".into()));
    }

    // Geometric ladder of 16 regular values in (0, L₂], regularity meaning
    // bounded away from sampled critical values.
    let critical_values: Vec<f64> = critical_points
        .iter()
        .filter_map(|cp| {
            to_index(cp.location.0, cp.location.1).map(|(i, j)| sigma * v.get(i, j))
        })
        .collect();
    let q: f64 = 0.7;
    let mut lambdas: Vec<f64> = (0..16).map(|k| l2 * q.powi(15 - k)).collect();
    for lam in &mut lambdas {
        while critical_values.iter().any(|cv| (*lam - cv).abs() < 1e-6) {
            *lam += 2e-6;
        }
    }

    let mut steps = Vec::new();
    let mut prev_count = usize::MAX;
    let mut nested = true;
    let mut first_fitting = None;
    // λ = 0 reproduces S₀ itself.
    for lambda in std::iter::once(0.0).chain(lambdas) {
        // Component of {σ·v ≥ λ} ∩ S₀ containing the peak.
        let mut region = vec![false; g.node_count()];
        let mut count = 0usize;
        let mut bbox: Option<(f64, f64, f64, f64)> = None;
        let mut fits = window.is_some();
        if sigma * v.get(peak.0, peak.1) >= lambda {
            let mut stack = vec![peak];
            while let Some((i, j)) = stack.pop() {
                let idx = g.index(i, j);
                if region[idx] || !s0[idx] || sigma * v.get(i, j) < lambda {
                    continue;
                }
                region[idx] = true;
                count += 1;
                let (x, y) = g.node_xy(i, j);
                bbox = Some(match bbox {
                    None => (x, x, y, y),
                    Some((x0, x1, y0, y1)) => (x0.min(x), x1.max(x), y0.min(y), y1.max(y)),
                });
                if let Some((region_spec, p_a)) = &window {
                    if !region_spec.contains(*p_a, x, y) {
                        fits = false;
                    }
                }
                if i > 0 {
                    stack.push((i - 1, j));
                }
                if j > 0 {
                    stack.push((i, j - 1));
                }
                if i + 1 < g.nx {
                    stack.push((i + 1, j));
                }
                if j + 1 < g.ny {
                    stack.push((i, j + 1));
                }
            }
        } else {
            fits = false;
        }
        if count > prev_count {
            nested = false;
        }
        prev_count = count;
        if fits && count > 0 && first_fitting.is_none() && lambda > 0.0 {
            first_fitting = Some(lambda);
        }
        steps.push(RegionStep {
            lambda,
            node_count: count,
            fits_window: fits,
            bbox,
        });
    }
    Ok(RegionTrace {
        steps,
        nested,
        first_fitting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DomainSpec, Grid};
    use crate::levelsets::arcs::extract_zero_arcs;

    #[test]
    fn monotone_tail_regions_shrink() {
        // v = y(2−y)e^{−x} on a half-strip: positive between the arcs y = 0
        // and y = 2, super-level regions shrink as λ grows.
        let g = Grid::build(&DomainSpec::window(0.0, 8.0, -0.5, 2.5, 0.1)).unwrap();
        let v = ScalarField::from_fn(g, |x, y| y * (2.0 - y) * (-x).exp());
        let arcs = extract_zero_arcs(&v, &[]);
        assert!(arcs.arcs.len() >= 2, "got {} arcs", arcs.arcs.len());
        let mut set = arcs;
        crate::levelsets::arcs::classify_arcs(
            &mut set,
            &crate::levelsets::difference::SpecialPoints { xi_point: (99.0, 99.0), xhat_point: None },
            0.3,
            0.16,
        );
        // The two level lines y≈0 and y≈2 both exit +x (their left end stops
        // at the x_min border, but classification keeps the +x exit).
        let trace = level_region_trace(&v, &set, (0, 1), &[], None).unwrap();
        assert!(trace.nested);
        assert_eq!(trace.steps[0].node_count, trace.steps.iter().map(|s| s.node_count).max().unwrap());
        let counts: Vec<usize> = trace.steps.iter().map(|s| s.node_count).collect();
        for pair in counts.windows(2) {
            assert!(pair[1] <= pair[0], "counts not monotone: {counts:?}");
        }
        // λ beyond the max empties the region.
        assert!(counts.last().unwrap() < &counts[0]);
    }

    #[test]
    fn mismatched_directions_are_rejected() {
        let g = Grid::build(&DomainSpec::window(-4.0, 4.0, -1.0, 1.0, 0.1)).unwrap();
        // Two horizontal lines but the field flips sign across x = 0 too.
        let v = ScalarField::from_fn(g, |_, y| (y - 0.5) * (y + 0.5));
        let mut set = extract_zero_arcs(&v, &[]);
        crate::levelsets::arcs::classify_arcs(
            &mut set,
            &crate::levelsets::difference::SpecialPoints { xi_point: (99.0, 99.0), xhat_point: None },
            0.3,
            0.16,
        );
        assert!(level_region_trace(&v, &set, (0, 0), &[], None).is_err());
    }
}
