use serde::{Deserialize, Serialize};

use crate::grid::{NodeMask, ScalarField};

/// A polished zero of Dv.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: (f64, f64),
    /// |Dv| at the polished location.
    pub gradient_norm: f64,
    /// |Dv| at the cell seed before polishing.
    pub seed_gradient: f64,
    /// Distance to the nearest other detection; `None` when unique.
    pub isolation_radius: Option<f64>,
    /// Isolation radius exceeds 4h (the elliptic theory predicts isolated
    /// critical points; a violation here is flagged, not fatal).
    pub isolation_ok: bool,
}

/// Node-sampled derivative fields of v, bilinearly interpolable.
struct DerivTables {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    x0: f64,
    y0: f64,
    vx: Vec<f64>,
    vy: Vec<f64>,
    vxx: Vec<f64>,
    vxy: Vec<f64>,
    vyy: Vec<f64>,
    valid: Vec<bool>,
}

impl DerivTables {
    fn build(v: &ScalarField) -> Self {
        let g = v.grid();
        let n = g.node_count();
        let mut t = DerivTables {
            nx: g.nx,
            ny: g.ny,
            hx: g.hx,
            hy: g.hy,
            x0: g.spec.x_min,
            y0: g.spec.y_min,
            vx: vec![0.0; n],
            vy: vec![0.0; n],
            vxx: vec![0.0; n],
            vxy: vec![0.0; n],
            vyy: vec![0.0; n],
            valid: vec![false; n],
        };
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                if v.mask_at(i, j) != NodeMask::Interior {
                    continue;
                }
                let mut clean = true;
                for dj in -1..=1isize {
                    for di in -1..=1isize {
                        let (ii, jj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
                        if v.mask_at(ii, jj) == NodeMask::Excluded {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    continue;
                }
                let Ok(d) = crate::grid::fd_derivatives(v, i, j) else { continue };
                let idx = g.index(i, j);
                t.vx[idx] = d.ux;
                t.vy[idx] = d.uy;
                t.vxx[idx] = d.uxx;
                t.vxy[idx] = d.uxy;
                t.vyy[idx] = d.uyy;
                t.valid[idx] = true;
            }
        }
        t
    }

    /// Bilinear sample of one table; `None` if any supporting node is invalid.
    fn sample(&self, table: &[f64], x: f64, y: f64) -> Option<f64> {
        let fi = (x - self.x0) / self.hx;
        let fj = (y - self.y0) / self.hy;
        if fi < 1.0 || fj < 1.0 || fi > (self.nx - 2) as f64 || fj > (self.ny - 2) as f64 {
            return None;
        }
        let i0 = (fi.floor() as usize).min(self.nx - 2);
        let j0 = (fj.floor() as usize).min(self.ny - 2);
        let ax = fi - i0 as f64;
        let ay = fj - j0 as f64;
        let mut acc = 0.0;
        for (di, dj, wgt) in [
            (0, 0, (1.0 - ax) * (1.0 - ay)),
            (1, 0, ax * (1.0 - ay)),
            (0, 1, (1.0 - ax) * ay),
            (1, 1, ax * ay),
        ] {
            let idx = (j0 + dj) * self.nx + i0 + di;
            if !self.valid[idx] {
                return None;
            }
            acc += wgt * table[idx];
        }
        Some(acc)
    }

    fn gradient(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        Some((self.sample(&self.vx, x, y)?, self.sample(&self.vy, x, y)?))
    }
}

/// Detect zeros of Dv: cells where both partials change sign are seeded, a
/// damped Newton polish on the gradient follows, and detections within 2h
/// merge. An empty list is a valid outcome — the uniqueness theorems predict
/// exactly that for solved pitchfork/helicoid pairs.
pub fn find_critical_points(v: &ScalarField) -> Vec<CriticalPoint> {
    let g = v.grid();
    let tables = DerivTables::build(v);
    let h = g.hx.max(g.hy);
    let mut raw: Vec<(f64, f64, f64, f64)> = Vec::new(); // x, y, |g|, seed |g|
    for j in 1..g.ny - 2 {
        for i in 1..g.nx - 2 {
            let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
            if corners.iter().any(|&(a, b)| !tables.valid[g.index(a, b)]) {
                continue;
            }
            let sign_change = |table: &[f64]| {
                let vals: Vec<f64> = corners.iter().map(|&(a, b)| table[g.index(a, b)]).collect();
                let lo = vals.iter().fold(f64::INFINITY, |m, &x| m.min(x));
                let hi = vals.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
                lo <= 0.0 && hi >= 0.0
            };
            if !sign_change(&tables.vx) || !sign_change(&tables.vy) {
                continue;
            }
            let (cx, cy) = {
                let (x0, y0) = g.node_xy(i, j);
                (x0 + 0.5 * g.hx, y0 + 0.5 * g.hy)
            };
            let Some(seed_grad) = tables.gradient(cx, cy) else { continue };
            let seed_norm = (seed_grad.0 * seed_grad.0 + seed_grad.1 * seed_grad.1).sqrt();
            if let Some((px, py, gn)) = polish(&tables, cx, cy, h) {
                raw.push((px, py, gn, seed_norm));
            }
        }
    }
    // Merge detections within 2h, keeping the flattest.
    raw.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut kept: Vec<(f64, f64, f64, f64)> = Vec::new();
    for cand in raw {
        let close = kept
            .iter()
            .any(|k| ((k.0 - cand.0).powi(2) + (k.1 - cand.1).powi(2)).sqrt() < 2.0 * h);
        if !close {
            kept.push(cand);
        }
    }
    let mut out: Vec<CriticalPoint> = kept
        .iter()
        .map(|&(x, y, gn, sg)| CriticalPoint {
            location: (x, y),
            gradient_norm: gn,
            seed_gradient: sg,
            isolation_radius: None,
            isolation_ok: true,
        })
        .collect();
    for a in 0..out.len() {
        let mut min_d = f64::INFINITY;
        for b in 0..out.len() {
            if a != b {
                let d = ((out[a].location.0 - out[b].location.0).powi(2)
                    + (out[a].location.1 - out[b].location.1).powi(2))
                .sqrt();
                min_d = min_d.min(d);
            }
        }
        if min_d.is_finite() {
            out[a].isolation_radius = Some(min_d);
            out[a].isolation_ok = min_d > 4.0 * h;
        }
    }
    out
}

/// Newton on Dv = 0 with the sampled Hessian; gradient-descent fallback when
/// the Hessian is near-singular (degenerate critical points).
fn polish(tables: &DerivTables, mut x: f64, mut y: f64, h: f64) -> Option<(f64, f64, f64)> {
    let mut grad = tables.gradient(x, y)?;
    let mut gn = (grad.0 * grad.0 + grad.1 * grad.1).sqrt();
    for _ in 0..60 {
        if gn <= 1e-8 {
            return Some((x, y, gn));
        }
        let hxx = tables.sample(&tables.vxx, x, y)?;
        let hxy = tables.sample(&tables.vxy, x, y)?;
        let hyy = tables.sample(&tables.vyy, x, y)?;
        let det = hxx * hyy - hxy * hxy;
        let (mut dx, mut dy) = if det.abs() > 1e-14 * (1.0 + hxx.abs() + hyy.abs()).powi(2) {
            (
                -(hyy * grad.0 - hxy * grad.1) / det,
                -(-hxy * grad.0 + hxx * grad.1) / det,
            )
        } else {
            // Degenerate Hessian: descend on |Dv|²/2, step scaled to the cell.
            let scale = h / (gn + 1e-30);
            (-grad.0 * scale, -grad.1 * scale)
        };
        // Keep steps cell-sized so the polish never tunnels into another basin.
        let step = (dx * dx + dy * dy).sqrt();
        if step > 2.0 * h {
            dx *= 2.0 * h / step;
            dy *= 2.0 * h / step;
        }
        let mut lambda = 1.0;
        let mut advanced = false;
        while lambda > 1e-4 {
            let (tx, ty) = (x + lambda * dx, y + lambda * dy);
            if let Some(g2) = tables.gradient(tx, ty) {
                let n2 = (g2.0 * g2.0 + g2.1 * g2.1).sqrt();
                if n2 < gn {
                    x = tx;
                    y = ty;
                    grad = g2;
                    gn = n2;
                    advanced = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    (gn <= 1e-8).then_some((x, y, gn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DomainSpec, Grid};

    fn field(f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let g = Grid::build(&DomainSpec::window(-1.0, 1.0, -1.0, 1.0, 0.05)).unwrap();
        ScalarField::from_fn(g, f)
    }

    #[test]
    fn saddle_at_the_origin() {
        let v = field(|x, y| x * x - y * y);
        let cps = find_critical_points(&v);
        assert_eq!(cps.len(), 1);
        let p = cps[0].location;
        assert!(p.0.abs() < 1e-8 && p.1.abs() < 1e-8, "found {p:?}");
        assert!(cps[0].gradient_norm <= 1e-8);
        assert!(cps[0].isolation_ok);
    }

    #[test]
    fn extremum_without_zero_level_arc() {
        // v = x² + y² − 1: critical point at the origin, zero set elsewhere.
        let v = field(|x, y| x * x + y * y - 1.0);
        let cps = find_critical_points(&v);
        assert_eq!(cps.len(), 1);
        assert!(cps[0].location.0.abs() < 1e-8 && cps[0].location.1.abs() < 1e-8);
    }

    #[test]
    fn monkey_saddle_is_detected_degenerate() {
        let v = field(|x, y| x.powi(3) - 3.0 * x * y * y);
        let cps = find_critical_points(&v);
        assert_eq!(cps.len(), 1, "{cps:?}");
        // The h² term in the discrete gradient splits the degenerate zero
        // into a pair at y = ±h/√3, merged into one; location error is O(h).
        let p = cps[0].location;
        assert!(p.0.abs() < 0.06 && p.1.abs() < 0.06, "found {p:?}");
    }

    #[test]
    fn gradient_free_field_detects_nothing() {
        let v = field(|x, y| 2.0 * x + 3.0 * y);
        assert!(find_critical_points(&v).is_empty());
    }

    #[test]
    fn offset_saddle_locations_polish_off_lattice() {
        let v = field(|x, y| (x - 0.313).powi(2) - 1.7 * (y + 0.221).powi(2));
        let cps = find_critical_points(&v);
        assert_eq!(cps.len(), 1);
        let p = cps[0].location;
        assert!((p.0 - 0.313).abs() < 1e-7 && (p.1 + 0.221).abs() < 1e-7, "{p:?}");
    }
}
