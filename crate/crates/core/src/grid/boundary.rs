use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Finite boundary trace sampled along one edge. The argument is the
/// edge-local coordinate: base abscissa for horizontal edges, y for vertical
/// edges.
pub type TraceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Value prescribed on one boundary segment.
#[derive(Clone)]
pub enum EdgeValue {
    PlusInf,
    MinusInf,
    Trace(TraceFn),
}

impl EdgeValue {
    fn inf_sign(&self) -> Option<f64> {
        match self {
            EdgeValue::PlusInf => Some(1.0),
            EdgeValue::MinusInf => Some(-1.0),
            EdgeValue::Trace(_) => None,
        }
    }
}

impl fmt::Debug for EdgeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeValue::PlusInf => write!(f, "+INF"),
            EdgeValue::MinusInf => write!(f, "-INF"),
            EdgeValue::Trace(_) => write!(f, "Trace(..)"),
        }
    }
}

/// One segment of an edge prescription over `[from, to]`.
#[derive(Debug, Clone)]
pub struct Segment {
    pub from: f64,
    pub to: f64,
    pub value: EdgeValue,
}

impl Segment {
    pub fn plus_inf(from: f64, to: f64) -> Self {
        Segment { from, to, value: EdgeValue::PlusInf }
    }

    pub fn minus_inf(from: f64, to: f64) -> Self {
        Segment { from, to, value: EdgeValue::MinusInf }
    }

    pub fn trace(from: f64, to: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Segment { from, to, value: EdgeValue::Trace(Arc::new(f)) }
    }
}

/// Prescription mode of a whole edge.
#[derive(Debug, Clone)]
pub enum EdgeSpec {
    Dirichlet(Vec<Segment>),
    /// Homogeneous Neumann, realized by mirroring the first interior column.
    /// Used only for bootstrap solves on artificial truncation edges.
    NeumannZero,
    /// Identified with the opposite edge (periodic domains).
    Periodic,
}

impl EdgeSpec {
    pub fn uniform(value: EdgeValue, from: f64, to: f64) -> Self {
        EdgeSpec::Dirichlet(vec![Segment { from, to, value }])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Bottom,
    Top,
    Left,
    Right,
}

/// Per-edge boundary prescription for a rectangular (possibly sheared) domain.
#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub bottom: EdgeSpec,
    pub top: EdgeSpec,
    pub left: EdgeSpec,
    pub right: EdgeSpec,
}

impl BoundarySpec {
    pub fn edge(&self, e: Edge) -> &EdgeSpec {
        match e {
            Edge::Bottom => &self.bottom,
            Edge::Top => &self.top,
            Edge::Left => &self.left,
            Edge::Right => &self.right,
        }
    }

    fn edge_range(grid: &Grid, e: Edge) -> (f64, f64) {
        match e {
            Edge::Bottom | Edge::Top => (grid.spec.x_min, grid.spec.x_max),
            Edge::Left | Edge::Right => (grid.spec.y_min, grid.spec.y_min + grid.spec.w),
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        for e in [Edge::Bottom, Edge::Top, Edge::Left, Edge::Right] {
            match self.edge(e) {
                EdgeSpec::Dirichlet(segments) => {
                    let (lo, hi) = Self::edge_range(grid, e);
                    let tol = 1e-9 * (hi - lo).abs().max(1.0);
                    if segments.is_empty() {
                        return Err(Error::InvalidBoundary(format!("{e:?} edge has no segments")));
                    }
                    if (segments[0].from - lo).abs() > tol
                        || (segments.last().unwrap().to - hi).abs() > tol
                    {
                        return Err(Error::InvalidBoundary(format!(
                            "{e:?} edge segments must cover [{lo}, {hi}]"
                        )));
                    }
                    for pair in segments.windows(2) {
                        if (pair[0].to - pair[1].from).abs() > tol {
                            return Err(Error::InvalidBoundary(format!(
                                "{e:?} edge segments must tile without gap or overlap near {}",
                                pair[0].to
                            )));
                        }
                    }
                    for s in segments {
                        if !(s.from < s.to + tol) {
                            return Err(Error::InvalidBoundary(format!(
                                "{e:?} edge segment [{}, {}] is degenerate",
                                s.from, s.to
                            )));
                        }
                    }
                }
                EdgeSpec::NeumannZero => {
                    if matches!(e, Edge::Bottom | Edge::Top) {
                        return Err(Error::InvalidBoundary(
                            "Neumann data is only supported on truncation (x) edges".into(),
                        ));
                    }
                }
                EdgeSpec::Periodic => {
                    if matches!(e, Edge::Bottom | Edge::Top) {
                        return Err(Error::InvalidBoundary(
                            "periodic identification applies to x-edges only".into(),
                        ));
                    }
                }
            }
        }
        let left_periodic = matches!(self.left, EdgeSpec::Periodic);
        let right_periodic = matches!(self.right, EdgeSpec::Periodic);
        if left_periodic != right_periodic {
            return Err(Error::InvalidBoundary("periodic edges must come in pairs".into()));
        }
        if left_periodic != grid.spec.periodic_x {
            return Err(Error::InvalidBoundary(
                "periodic boundary requires a periodic domain (and vice versa)".into(),
            ));
        }
        Ok(())
    }

    /// Sign-change abscissae within one edge (ordered), where adjacent
    /// segments carry opposite infinite signs. These are the points where the
    /// translator contains a whole vertical line.
    pub fn sign_changes_on(&self, e: Edge) -> Vec<f64> {
        let mut out = Vec::new();
        if let EdgeSpec::Dirichlet(segments) = self.edge(e) {
            for pair in segments.windows(2) {
                if let (Some(a), Some(b)) = (pair[0].value.inf_sign(), pair[1].value.inf_sign()) {
                    if a * b < 0.0 {
                        out.push(pair[1].from);
                    }
                }
            }
        }
        out
    }

    /// Sign change across the periodic seam of a horizontal edge, if any.
    fn wrap_sign_change(&self, e: Edge, grid: &Grid) -> Option<f64> {
        if !grid.spec.periodic_x {
            return None;
        }
        if let EdgeSpec::Dirichlet(segments) = self.edge(e) {
            let first = segments.first()?.value.inf_sign()?;
            let last = segments.last()?.value.inf_sign()?;
            if first * last < 0.0 {
                return Some(grid.spec.x_min);
            }
        }
        None
    }

    /// All sign-change points in physical coordinates.
    pub fn sign_change_points(&self, grid: &Grid) -> Vec<(f64, f64)> {
        let mut pts = Vec::new();
        let y_bot = grid.spec.y_min;
        let y_top = grid.spec.y_min + grid.spec.w;
        for t in self.sign_changes_on(Edge::Bottom) {
            pts.push((t, y_bot));
        }
        if let Some(t) = self.wrap_sign_change(Edge::Bottom, grid) {
            pts.push((t, y_bot));
        }
        for t in self.sign_changes_on(Edge::Top) {
            pts.push((t + grid.shear * grid.spec.w, y_top));
        }
        if let Some(t) = self.wrap_sign_change(Edge::Top, grid) {
            pts.push((t + grid.shear * grid.spec.w, y_top));
        }
        pts
    }

    /// Distance from the nearest horizontal-edge sign change to a truncation
    /// corner; +∞ when there is none (or the domain is periodic).
    pub fn corner_clearance(&self, grid: &Grid) -> f64 {
        if grid.spec.periodic_x {
            return f64::INFINITY;
        }
        let mut clearance = f64::INFINITY;
        for e in [Edge::Bottom, Edge::Top] {
            for t in self.sign_changes_on(e) {
                clearance = clearance.min(t - grid.spec.x_min).min(grid.spec.x_max - t);
            }
        }
        clearance
    }

    /// Realize the infinite prescriptions at a finite cap: +INF ↦ +B,
    /// −INF ↦ −B, traces unchanged; within a band of `ramp` around each
    /// sign-change point the value interpolates linearly between the caps so
    /// adjacent boundary nodes never see a raw jump.
    pub fn cap(&self, b_cap: f64, ramp: f64) -> CappedBoundary<'_> {
        CappedBoundary { spec: self, b_cap, ramp }
    }
}

/// Evaluator for capped boundary data.
pub struct CappedBoundary<'a> {
    spec: &'a BoundarySpec,
    b_cap: f64,
    ramp: f64,
}

impl CappedBoundary<'_> {
    /// Capped value on `edge` at edge coordinate `t`. `period` enables ramp
    /// wrap-around on periodic horizontal edges.
    pub fn value(&self, edge: Edge, t: f64, period: Option<f64>) -> f64 {
        let EdgeSpec::Dirichlet(segments) = self.spec.edge(edge) else {
            panic!("capped evaluation on a non-Dirichlet edge");
        };
        // Ramp interpolation near a sign change overrides the raw segment value.
        let mut changes: Vec<(f64, f64, f64)> = Vec::new();
        for pair in segments.windows(2) {
            if let (Some(a), Some(b)) = (pair[0].value.inf_sign(), pair[1].value.inf_sign()) {
                if a * b < 0.0 {
                    changes.push((pair[1].from, a, b));
                }
            }
        }
        if let (Some(p), Some(first), Some(last)) = (
            period,
            segments.first().and_then(|s| s.value.inf_sign()),
            segments.last().and_then(|s| s.value.inf_sign()),
        ) {
            if first * last < 0.0 {
                let seam = segments[0].from;
                changes.push((seam, last, first));
                changes.push((seam + p, last, first));
            }
        }
        for (t0, s_left, s_right) in &changes {
            let d = t - t0;
            if d.abs() <= self.ramp {
                let frac = (d + self.ramp) / (2.0 * self.ramp);
                return self.b_cap * (s_left + (s_right - s_left) * frac);
            }
        }
        let seg = segments
            .iter()
            .find(|s| t >= s.from - 1e-12 && t <= s.to + 1e-12)
            .unwrap_or_else(|| segments.last().unwrap());
        match &seg.value {
            EdgeValue::PlusInf => self.b_cap,
            EdgeValue::MinusInf => -self.b_cap,
            EdgeValue::Trace(f) => f(t),
        }
    }

    /// Capped values on every boundary node of the grid. `None` on nodes whose
    /// edges carry no Dirichlet prescription (Neumann or periodic edges).
    pub fn node_values(&self, grid: &Grid) -> Result<Vec<Option<f64>>> {
        let mut out = vec![None; grid.node_count()];
        let period = if grid.spec.periodic_x {
            Some(grid.spec.x_max - grid.spec.x_min)
        } else {
            None
        };
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                if !grid.is_boundary(i, j) && !(grid.spec.periodic_x && (j == 0 || j == grid.ny - 1)) {
                    continue;
                }
                if !grid.is_boundary(i, j) {
                    continue;
                }
                let mut vals: Vec<f64> = Vec::with_capacity(2);
                let base_abscissa = grid.spec.x_min + i as f64 * grid.hx;
                if j == 0 {
                    if let EdgeSpec::Dirichlet(_) = self.spec.bottom {
                        vals.push(self.value(Edge::Bottom, base_abscissa, period));
                    }
                }
                if j == grid.ny - 1 {
                    if let EdgeSpec::Dirichlet(_) = self.spec.top {
                        vals.push(self.value(Edge::Top, base_abscissa, period));
                    }
                }
                if !grid.spec.periodic_x {
                    let y = grid.spec.y_min + j as f64 * grid.hy;
                    if i == 0 {
                        if let EdgeSpec::Dirichlet(_) = self.spec.left {
                            vals.push(self.value(Edge::Left, y, None));
                        }
                    }
                    if i == grid.nx - 1 {
                        if let EdgeSpec::Dirichlet(_) = self.spec.right {
                            vals.push(self.value(Edge::Right, y, None));
                        }
                    }
                }
                if !vals.is_empty() {
                    let v = vals.iter().sum::<f64>() / vals.len() as f64;
                    if !v.is_finite() {
                        return Err(Error::InvalidBoundary(format!(
                            "trace evaluates non-finite at node ({i},{j})"
                        )));
                    }
                    out[grid.index(i, j)] = Some(v);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DomainSpec;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn pitchfork_bc(w: f64, x_min: f64, x_max: f64) -> BoundarySpec {
        BoundarySpec {
            bottom: EdgeSpec::Dirichlet(vec![
                Segment::plus_inf(x_min, 0.0),
                Segment::minus_inf(0.0, x_max),
            ]),
            top: EdgeSpec::uniform(EdgeValue::MinusInf, x_min, x_max),
            left: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, w),
            right: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, w),
        }
    }

    #[test]
    fn pitchfork_capping_matches_prescription() {
        let w = PI;
        let bc = pitchfork_bc(w, -12.0, 12.0);
        let g = Grid::build(&DomainSpec::strip(w, -12.0, 12.0, w / 16.0)).unwrap();
        let ramp = 2.0 * g.hx;
        let capped = bc.cap(10.0, ramp);
        assert_eq!(capped.value(Edge::Bottom, -5.0, None), 10.0);
        assert_eq!(capped.value(Edge::Bottom, 5.0, None), -10.0);
        assert_eq!(capped.value(Edge::Top, 3.0, None), -10.0);
        // Mid-ramp hits zero exactly at the sign change.
        assert!(capped.value(Edge::Bottom, 0.0, None).abs() < 1e-12);
        // Inside the band the value is linear.
        let v = capped.value(Edge::Bottom, -ramp / 2.0, None);
        assert!((v - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_cap_sends_infinities_to_zero() {
        let bc = pitchfork_bc(PI, -12.0, 12.0);
        let capped = bc.cap(0.0, 0.1);
        assert_eq!(capped.value(Edge::Bottom, -5.0, None), 0.0);
        assert_eq!(capped.value(Edge::Top, 5.0, None), 0.0);
    }

    #[test]
    fn helicoid_top_edge_ramps_at_xhat() {
        let (w, xhat) = (PI / 2.0, 1.0);
        let (x_min, x_max) = (-12.0, 13.0);
        let bc = BoundarySpec {
            bottom: EdgeSpec::Dirichlet(vec![
                Segment::plus_inf(x_min, 0.0),
                Segment::minus_inf(0.0, x_max),
            ]),
            top: EdgeSpec::Dirichlet(vec![
                Segment::minus_inf(x_min, xhat),
                Segment::plus_inf(xhat, x_max),
            ]),
            left: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, w),
            right: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, w),
        };
        let h = w / 16.0;
        let ramp = 2.0 * h;
        let capped = bc.cap(8.0, ramp);
        assert_eq!(capped.value(Edge::Top, xhat - 3.0 * h, None), -8.0);
        assert_eq!(capped.value(Edge::Top, xhat + 3.0 * h, None), 8.0);
        let inside = capped.value(Edge::Top, xhat + h, None);
        assert!((inside - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sign_change_points_listed() {
        let bc = pitchfork_bc(PI, -12.0, 12.0);
        let g = Grid::build(&DomainSpec::strip(PI, -12.0, 12.0, PI / 16.0)).unwrap();
        let pts = bc.sign_change_points(&g);
        assert_eq!(pts.len(), 1);
        assert!((pts[0].0).abs() < 1e-12 && pts[0].1 == 0.0);
        assert!((bc.corner_clearance(&g) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn gapped_segments_are_rejected() {
        let g = Grid::build(&DomainSpec::strip(1.0, 0.0, 2.0, 0.125)).unwrap();
        let bc = BoundarySpec {
            bottom: EdgeSpec::Dirichlet(vec![
                Segment::plus_inf(0.0, 0.8),
                Segment::minus_inf(1.2, 2.0),
            ]),
            top: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, 2.0),
            left: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, 1.0),
            right: EdgeSpec::uniform(EdgeValue::MinusInf, 0.0, 1.0),
        };
        assert!(matches!(bc.validate(&g), Err(Error::InvalidBoundary(_))));
    }

    proptest! {
        #[test]
        fn capping_is_monotone_in_b(b1 in 0.0..20.0f64, b2 in 0.0..20.0f64, t in -11.9..11.9f64) {
            let bc = pitchfork_bc(PI, -12.0, 12.0);
            let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
            let ramp = 0.4;
            let v_lo = bc.cap(lo, ramp).value(Edge::Bottom, t, None);
            let v_hi = bc.cap(hi, ramp).value(Edge::Bottom, t, None);
            // Raising B never decreases a capped +INF value nor increases a
            // capped −INF value; in ramp bands the same holds pointwise by sign.
            if v_hi >= 0.0 {
                prop_assert!(v_hi >= v_lo - 1e-12);
            } else {
                prop_assert!(v_hi <= v_lo + 1e-12);
            }
        }
    }
}
