use serde::{Deserialize, Serialize};

use crate::grid::{NodeMask, ScalarField};
use crate::levelsets::critical::CriticalPoint;
use crate::levelsets::difference::SpecialPoints;

/// Where an arc end lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndKind {
    Critical(usize),
    ExitPlusX,
    ExitMinusX,
    ExitY,
    SpecialXi,
    SpecialXhat,
    Loop,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcType {
    TypeIPlusX,
    TypeIiMinusX,
    TypeIiiThroughXi,
    TypeIvThroughXhat,
    ClosedLoop,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arc {
    pub points: Vec<(f64, f64)>,
    pub ends: (EndKind, EndKind),
    pub arc_type: ArcType,
    pub closed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcSet {
    pub arcs: Vec<Arc>,
    /// Arc-end counts per critical point (an arc with both ends at the same
    /// point contributes two).
    pub incident_ends: Vec<usize>,
    /// Bounding box of the cells that participated in extraction.
    pub valid_bbox: (f64, f64, f64, f64),
}

/// Key of a cell edge carrying a sign crossing: (i, j, horizontal?).
type EdgeKey = (usize, usize, bool);

/// Marching squares on v = 0 with linear interpolation along cell edges and
/// center-sample disambiguation of saddle cells. Chains are split and
/// snapped at critical points within 2h so arc-end counting is well defined.
pub fn extract_zero_arcs(v: &ScalarField, critical_points: &[CriticalPoint]) -> ArcSet {
    let g = v.grid();
    let valid = |i: usize, j: usize| v.mask_at(i, j) != NodeMask::Excluded;
    // Treat exact zeros as positive: a deterministic tie-break.
    let pos = |i: usize, j: usize| v.get(i, j) >= 0.0;
    let crossing = |a: (usize, usize), b: (usize, usize)| -> (f64, f64) {
        let va = v.get(a.0, a.1);
        let vb = v.get(b.0, b.1);
        let t = if (va - vb).abs() < 1e-300 { 0.5 } else { va / (va - vb) };
        let pa = g.node_xy(a.0, a.1);
        let pb = g.node_xy(b.0, b.1);
        (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1))
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    let mut bbox = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            if corners.iter().any(|&(a, b)| !valid(a, b)) {
                continue;
            }
            for &(a, b) in &corners {
                let (x, y) = g.node_xy(a, b);
                bbox.0 = bbox.0.min(x);
                bbox.1 = bbox.1.max(x);
                bbox.2 = bbox.2.min(y);
                bbox.3 = bbox.3.max(y);
            }
            let mut case = 0usize;
            if pos(i, j) {
                case |= 1;
            }
            if pos(i + 1, j) {
                case |= 2;
            }
            if pos(i + 1, j + 1) {
                case |= 4;
            }
            if pos(i, j + 1) {
                case |= 8;
            }
            let bottom: EdgeKey = (i, j, true);
            let right: EdgeKey = (i + 1, j, false);
            let top: EdgeKey = (i, j + 1, true);
            let left: EdgeKey = (i, j, false);
            let mut push = |a: EdgeKey, b: EdgeKey| segments.push((a, b));
            match case {
                0 | 15 => {}
                1 | 14 => push(left, bottom),
                2 | 13 => push(bottom, right),
                3 | 12 => push(left, right),
                4 | 11 => push(right, top),
                6 | 9 => push(bottom, top),
                7 | 8 => push(left, top),
                5 => {
                    // + corners at (i,j) and (i+1,j+1); the center decides
                    // which pair of contour lines passes through.
                    let center = 0.25
                        * (v.get(i, j) + v.get(i + 1, j) + v.get(i + 1, j + 1) + v.get(i, j + 1));
                    if center >= 0.0 {
                        push(bottom, right);
                        push(left, top);
                    } else {
                        push(left, bottom);
                        push(right, top);
                    }
                }
                10 => {
                    let center = 0.25
                        * (v.get(i, j) + v.get(i + 1, j) + v.get(i + 1, j + 1) + v.get(i, j + 1));
                    if center >= 0.0 {
                        push(left, bottom);
                        push(right, top);
                    } else {
                        push(bottom, right);
                        push(left, top);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // Chain segments: each edge key appears in at most two segments.
    let mut by_edge: std::collections::HashMap<EdgeKey, Vec<usize>> = std::collections::HashMap::new();
    for (k, seg) in segments.iter().enumerate() {
        by_edge.entry(seg.0).or_default().push(k);
        by_edge.entry(seg.1).or_default().push(k);
    }
    let edge_point = |e: EdgeKey| -> (f64, f64) {
        let (i, j, horizontal) = e;
        if horizontal {
            crossing((i, j), (i + 1, j))
        } else {
            crossing((i, j), (i, j + 1))
        }
    };
    let mut used = vec![false; segments.len()];
    let mut chains: Vec<(Vec<(f64, f64)>, bool)> = Vec::new();
    // Open chains first (start at degree-1 edges), then leftover loops.
    let mut starts: Vec<usize> = Vec::new();
    for (edge, segs) in &by_edge {
        if segs.len() == 1 {
            let _ = edge;
            starts.push(segs[0]);
        }
    }
    starts.sort_unstable();
    let walk = |start: usize,
                start_edge: EdgeKey,
                used: &mut Vec<bool>|
     -> (Vec<EdgeKey>, bool) {
        let mut path = vec![start_edge];
        let mut seg = start;
        let mut prev_edge = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next_edge = if a == prev_edge { b } else { a };
            path.push(next_edge);
            if next_edge == start_edge {
                return (path, true);
            }
            let candidates = &by_edge[&next_edge];
            let next_seg = candidates.iter().copied().find(|&s| !used[s]);
            match next_seg {
                Some(s) => {
                    seg = s;
                    prev_edge = next_edge;
                }
                None => return (path, false),
            }
        }
    };
    for start in starts {
        if used[start] {
            continue;
        }
        // The degree-1 end of this segment is the walk origin.
        let (a, b) = segments[start];
        let origin = if by_edge[&a].len() == 1 { a } else { b };
        let (path, closed) = walk(start, origin, &mut used);
        chains.push((path.iter().map(|&e| edge_point(e)).collect(), closed));
    }
    for k in 0..segments.len() {
        if !used[k] {
            let (path, closed) = walk(k, segments[k].0, &mut used);
            chains.push((path.iter().map(|&e| edge_point(e)).collect(), closed));
        }
    }

    // Split chains at critical points (snap radius 2h).
    let h = g.hx.max(g.hy);
    let snap = 2.0 * h;
    let mut arcs: Vec<(Vec<(f64, f64)>, bool)> = Vec::new();
    for (chain, closed) in chains {
        let mut cuts: Vec<(usize, usize)> = Vec::new(); // (vertex index, cp index)
        for (cp_idx, cp) in critical_points.iter().enumerate() {
            let mut best: Option<(usize, f64)> = None;
            for (k, p) in chain.iter().enumerate() {
                let d = ((p.0 - cp.location.0).powi(2) + (p.1 - cp.location.1).powi(2)).sqrt();
                if d <= snap && best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((k, d));
                }
            }
            if let Some((k, _)) = best {
                cuts.push((k, cp_idx));
            }
        }
        cuts.sort_unstable();
        if cuts.is_empty() {
            arcs.push((chain, closed));
            continue;
        }
        let mut snapped = chain.clone();
        for &(k, cp_idx) in &cuts {
            snapped[k] = critical_points[cp_idx].location;
        }
        if closed {
            // Rotate so the chain starts at the first cut, then split.
            let first = cuts[0].0;
            let n = snapped.len() - 1; // last == first for closed chains
            let rotated: Vec<(f64, f64)> = (0..=n).map(|k| snapped[(first + k) % n]).collect();
            let shifted: Vec<usize> = cuts.iter().map(|&(k, _)| (k + n - first) % n).collect();
            let mut bounds = shifted.clone();
            bounds.sort_unstable();
            bounds.push(n);
            let mut prev = 0usize;
            for &b in &bounds[1..] {
                if b > prev {
                    arcs.push((rotated[prev..=b].to_vec(), false));
                }
                prev = b;
            }
        } else {
            let mut prev = 0usize;
            for &(k, _) in &cuts {
                if k > prev {
                    arcs.push((snapped[prev..=k].to_vec(), false));
                }
                prev = k;
            }
            if prev + 1 < snapped.len() {
                arcs.push((snapped[prev..].to_vec(), false));
            }
        }
    }

    let mut set = ArcSet {
        arcs: arcs
            .into_iter()
            .filter(|(pts, _)| pts.len() >= 2)
            .map(|(points, closed)| Arc {
                points,
                ends: (EndKind::Open, EndKind::Open),
                arc_type: if closed { ArcType::ClosedLoop } else { ArcType::Indeterminate },
                closed,
            })
            .collect(),
        incident_ends: vec![0; critical_points.len()],
        valid_bbox: bbox,
    };
    // Resolve end kinds against critical points (special points come later,
    // in classify_arcs).
    for arc in &mut set.arcs {
        if arc.closed {
            arc.ends = (EndKind::Loop, EndKind::Loop);
            continue;
        }
        let classify_end = |p: (f64, f64)| -> EndKind {
            for (k, cp) in critical_points.iter().enumerate() {
                let d = ((p.0 - cp.location.0).powi(2) + (p.1 - cp.location.1).powi(2)).sqrt();
                if d <= 1e-12 + snap * 1e-6 || d == 0.0 {
                    return EndKind::Critical(k);
                }
            }
            EndKind::Open
        };
        arc.ends = (
            classify_end(*arc.points.first().unwrap()),
            classify_end(*arc.points.last().unwrap()),
        );
        for end in [arc.ends.0, arc.ends.1] {
            if let EndKind::Critical(k) = end {
                set.incident_ends[k] += 1;
            }
        }
    }
    set
}

/// Assign end kinds at the truncation border and special points, then the
/// paper's type (i)–(iv) per arc.
pub fn classify_arcs(set: &mut ArcSet, special: &SpecialPoints, attach_radius: f64, exit_tol: f64) {
    let (x_lo, x_hi, y_lo, y_hi) = set.valid_bbox;
    for arc in &mut set.arcs {
        if arc.closed {
            arc.arc_type = ArcType::ClosedLoop;
            continue;
        }
        let resolve = |p: (f64, f64), current: EndKind| -> EndKind {
            if let EndKind::Critical(_) = current {
                return current;
            }
            let near = |q: (f64, f64)| ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt() <= attach_radius;
            if near(special.xi_point) {
                return EndKind::SpecialXi;
            }
            if let Some(q) = special.xhat_point {
                if near(q) {
                    return EndKind::SpecialXhat;
                }
            }
            if p.0 >= x_hi - exit_tol {
                return EndKind::ExitPlusX;
            }
            if p.0 <= x_lo + exit_tol {
                return EndKind::ExitMinusX;
            }
            if p.1 <= y_lo + exit_tol || p.1 >= y_hi - exit_tol {
                return EndKind::ExitY;
            }
            EndKind::Open
        };
        arc.ends = (
            resolve(*arc.points.first().unwrap(), arc.ends.0),
            resolve(*arc.points.last().unwrap(), arc.ends.1),
        );
        let ends = [arc.ends.0, arc.ends.1];
        arc.arc_type = if ends.contains(&EndKind::SpecialXi) {
            ArcType::TypeIiiThroughXi
        } else if ends.contains(&EndKind::SpecialXhat) {
            ArcType::TypeIvThroughXhat
        } else if ends.contains(&EndKind::ExitPlusX) && !ends.contains(&EndKind::ExitMinusX) {
            ArcType::TypeIPlusX
        } else if ends.contains(&EndKind::ExitMinusX) && !ends.contains(&EndKind::ExitPlusX) {
            ArcType::TypeIiMinusX
        } else {
            ArcType::Indeterminate
        };
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalPointArcs {
    pub location: (f64, f64),
    pub incident_ends: usize,
    pub even: bool,
    pub type_counts: [usize; 4],
    pub indeterminate: usize,
    pub loop_through: bool,
    pub violation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    ConsistentWithUniqueness,
    Violation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcCountReport {
    pub points: Vec<CriticalPointArcs>,
    pub verdict: Verdict,
}

/// Per critical point: incident arc-end counts (must be even, and ≥ 4 when
/// the point lies on the zero set), counts per type (i)–(iv), and the
/// uniqueness verdict. More than one arc of a single type — the
/// configuration the paper rules out — flags a violation.
pub fn arc_count_report(set: &ArcSet, critical_points: &[CriticalPoint]) -> ArcCountReport {
    let mut points = Vec::new();
    let mut any_violation = false;
    for (k, cp) in critical_points.iter().enumerate() {
        let mut incident = 0usize;
        let mut type_counts = [0usize; 4];
        let mut indeterminate = 0usize;
        let mut loop_through = false;
        for arc in &set.arcs {
            let hits = [arc.ends.0, arc.ends.1]
                .iter()
                .filter(|e| matches!(e, EndKind::Critical(m) if *m == k))
                .count();
            if hits == 0 {
                continue;
            }
            incident += hits;
            if hits == 2 {
                // Both ends at the same point: a closed arc through p₀,
                // impossible by the maximum principle.
                loop_through = true;
            }
            match arc.arc_type {
                ArcType::TypeIPlusX => type_counts[0] += 1,
                ArcType::TypeIiMinusX => type_counts[1] += 1,
                ArcType::TypeIiiThroughXi => type_counts[2] += 1,
                ArcType::TypeIvThroughXhat => type_counts[3] += 1,
                ArcType::ClosedLoop => loop_through = true,
                ArcType::Indeterminate => indeterminate += 1,
            }
        }
        let even = incident % 2 == 0;
        let enough = incident == 0 || incident >= 4;
        let single_per_type = type_counts.iter().all(|&c| c <= 1);
        let violation = !even || !enough || !single_per_type || loop_through;
        any_violation |= violation;
        points.push(CriticalPointArcs {
            location: cp.location,
            incident_ends: incident,
            even,
            type_counts,
            indeterminate,
            loop_through,
            violation,
        });
    }
    ArcCountReport {
        points,
        verdict: if any_violation {
            Verdict::Violation
        } else {
            Verdict::ConsistentWithUniqueness
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DomainSpec, Grid};
    use crate::levelsets::critical::find_critical_points;

    fn window(f: impl Fn(f64, f64) -> f64, h: f64) -> ScalarField {
        let g = Grid::build(&DomainSpec::window(-1.0, 1.0, -1.0, 1.0, h)).unwrap();
        ScalarField::from_fn(g, f)
    }

    fn no_special() -> SpecialPoints {
        SpecialPoints { xi_point: (99.0, 99.0), xhat_point: None }
    }

    #[test]
    fn saddle_yields_four_arcs_on_the_diagonals() {
        let v = window(|x, y| x * x - y * y, 0.05);
        let cps = find_critical_points(&v);
        assert_eq!(cps.len(), 1);
        let mut set = extract_zero_arcs(&v, &cps);
        classify_arcs(&mut set, &no_special(), 0.15, 0.08);
        let incident: Vec<&Arc> = set
            .arcs
            .iter()
            .filter(|a| matches!(a.ends.0, EndKind::Critical(_)) || matches!(a.ends.1, EndKind::Critical(_)))
            .collect();
        assert_eq!(incident.len(), 4, "arcs: {:?}", set.arcs.len());
        assert_eq!(set.incident_ends[0], 4);
        // Every extracted point sits within h of the true diagonals |x| = |y|.
        for arc in &set.arcs {
            for p in &arc.points {
                let d = (p.0.abs() - p.1.abs()).abs() / 2.0f64.sqrt();
                assert!(d <= 0.05 + 1e-9, "point {p:?} off the diagonal by {d}");
            }
        }
    }

    #[test]
    fn monkey_saddle_yields_six_arcs() {
        let v = window(|x, y| x.powi(3) - 3.0 * x * y * y, 0.05);
        let cps = find_critical_points(&v);
        assert_eq!(cps.len(), 1);
        let set = extract_zero_arcs(&v, &cps);
        assert_eq!(set.incident_ends[0], 6, "incidence: {:?}", set.incident_ends);
        // Analytic zero set: three lines x = 0, y = ±x/√3... in fact
        // Re((x+iy)³) = x³−3xy² vanishes on x = 0 and x = ±√3·y.
        for arc in &set.arcs {
            for p in &arc.points {
                let d0 = p.0.abs();
                let d1 = (p.0 - 3.0f64.sqrt() * p.1).abs() / 2.0;
                let d2 = (p.0 + 3.0f64.sqrt() * p.1).abs() / 2.0;
                assert!(d0.min(d1).min(d2) <= 0.06, "point {p:?}");
            }
        }
    }

    #[test]
    fn horizontal_level_line_is_one_arc() {
        let v = window(|_, y| y - 0.21, 0.05);
        let cps = find_critical_points(&v);
        assert!(cps.is_empty());
        let mut set = extract_zero_arcs(&v, &cps);
        classify_arcs(&mut set, &no_special(), 0.15, 0.08);
        assert_eq!(set.arcs.len(), 1);
        let arc = &set.arcs[0];
        for p in &arc.points {
            assert!((p.1 - 0.21).abs() <= 0.05 + 1e-12);
        }
        assert!(matches!(arc.arc_type, ArcType::Indeterminate));
        let ends = [arc.ends.0, arc.ends.1];
        assert!(ends.contains(&EndKind::ExitPlusX) && ends.contains(&EndKind::ExitMinusX));
    }

    #[test]
    fn circle_is_a_closed_loop_missing_the_critical_point() {
        let v = window(|x, y| x * x + y * y - 0.25, 0.05);
        let cps = find_critical_points(&v);
        assert_eq!(cps.len(), 1);
        let set = extract_zero_arcs(&v, &cps);
        assert_eq!(set.arcs.len(), 1);
        assert!(set.arcs[0].closed);
        assert_eq!(set.incident_ends[0], 0);
        let report = arc_count_report(&set, &cps);
        assert_eq!(report.verdict, Verdict::ConsistentWithUniqueness);
    }

    #[test]
    fn saddle_report_is_even_and_typed() {
        let g = Grid::build(&DomainSpec::window(-3.0, 3.0, -1.0, 1.0, 0.05)).unwrap();
        // Shallow saddle: branches y = ±x/4 leave through the ±x edges.
        let v = ScalarField::from_fn(g, |x, y| x * x - 16.0 * y * y);
        let cps = find_critical_points(&v);
        let mut set = extract_zero_arcs(&v, &cps);
        classify_arcs(&mut set, &no_special(), 0.15, 0.08);
        let report = arc_count_report(&set, &cps);
        assert_eq!(report.points.len(), 1);
        let p = &report.points[0];
        assert_eq!(p.incident_ends, 4);
        assert!(p.even);
        // Shallow saddle: the four branches leave through the ±x edges before
        // reaching |y| = 1, two each way.
        assert_eq!(p.type_counts[0], 2);
        assert_eq!(p.type_counts[1], 2);
        // Verdict flags the duplicated types (the impossible configuration).
        assert_eq!(report.verdict, Verdict::Violation);
    }

    #[test]
    fn synthetic_xi_segment_classifies_type_iii() {
        // Field vanishing on the segment from the critical point to ξ.
        let g = Grid::build(&DomainSpec::window(-1.0, 1.0, -1.0, 1.0, 0.05)).unwrap();
        let v = ScalarField::from_fn(g, |x, y| y * (x * x + (y - 0.5) * (y - 0.5) - 0.1));
        let cps = find_critical_points(&v);
        let mut set = extract_zero_arcs(&v, &cps);
        let special = SpecialPoints { xi_point: (-1.0, 0.0), xhat_point: None };
        classify_arcs(&mut set, &special, 0.15, 0.08);
        assert!(set
            .arcs
            .iter()
            .any(|a| matches!(a.arc_type, ArcType::TypeIiiThroughXi)));
    }
}
