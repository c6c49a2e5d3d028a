use crate::grid::{Derivs, NodeMask, ScalarField, StencilWeights};
use crate::pde::unknowns::UnknownMap;

/// Graphical translator operator at a point:
/// F = (Δu + u_xx·u_y² − 2·u_xy·u_x·u_y + u_yy·u_x²) + (1 + |Du|²).
#[inline]
pub fn translator_operator(d: &Derivs) -> f64 {
    d.uxx * (1.0 + d.uy * d.uy) + d.uyy * (1.0 + d.ux * d.ux) - 2.0 * d.uxy * d.ux * d.uy
        + 1.0
        + d.ux * d.ux
        + d.uy * d.uy
}

/// F divided by 1 + |Du|²: same zero set, but O(1)-scaled where capped data
/// makes |Du| huge, so the Newton tolerance is not fighting float granularity.
/// The solver iterates on this form.
#[inline]
pub fn normalized_operator(d: &Derivs) -> f64 {
    translator_operator(d) / (1.0 + d.ux * d.ux + d.uy * d.uy)
}

/// Residual field of the translator equation on interior nodes; boundary and
/// excluded nodes are zeroed and masked out.
pub fn translator_residual(field: &ScalarField) -> ScalarField {
    let grid = field.grid().clone();
    let weights = StencilWeights::for_grid(&grid);
    let mut out = ScalarField::zeros(grid.clone());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if field.mask_at(i, j) != NodeMask::Interior {
                if field.mask_at(i, j) == NodeMask::Excluded {
                    out.exclude(i, j);
                }
                continue;
            }
            let vals = crate::grid::neighborhood_of(field, i, j);
            let d = crate::grid::derivs_of(&weights, &vals);
            out.set(i, j, translator_operator(&d));
        }
    }
    out
}

/// Normalized residual restricted to the unknown vector of a solve.
pub(crate) fn residual_vector(field: &ScalarField, map: &UnknownMap) -> Vec<f64> {
    vector_of(field, map, normalized_operator)
}

/// Raw-operator residual vector; used to validate the public Jacobian.
#[cfg(test)]
pub(crate) fn raw_residual_vector(field: &ScalarField, map: &UnknownMap) -> Vec<f64> {
    vector_of(field, map, translator_operator)
}

fn vector_of(field: &ScalarField, map: &UnknownMap, op: impl Fn(&Derivs) -> f64) -> Vec<f64> {
    let weights = StencilWeights::for_grid(field.grid());
    let mut r = vec![0.0; map.len()];
    for (idx, &(i, j)) in map.nodes().iter().enumerate() {
        let vals = crate::grid::neighborhood_of(field, i, j);
        let d = crate::grid::derivs_of(&weights, &vals);
        r[idx] = op(&d);
    }
    r
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DomainSpec, Grid};
    use std::f64::consts::PI;

    #[test]
    fn zero_field_has_unit_residual() {
        let g = Grid::build(&DomainSpec::strip(PI, -2.0, 2.0, PI / 16.0)).unwrap();
        let f = ScalarField::zeros(g.clone());
        let r = translator_residual(&f);
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                assert!((r.get(i, j) - 1.0).abs() < 1e-14);
            }
        }
        assert_eq!(r.get(0, 0), 0.0);
    }

    /// Sup of the discrete residual of an exact solution, sampled on the
    /// h-lattice points shared by all refinements (stride 2^level), so the
    /// convergence order is read off the same physical nodes.
    fn residual_sup_nested(w: f64, exact: impl Fn(f64, f64) -> f64, h: f64, stride: usize) -> f64 {
        let g = Grid::build(&DomainSpec::window(-w, w, w / 8.0, 7.0 * w / 8.0, h)).unwrap();
        let f = ScalarField::from_fn(g.clone(), &exact);
        let r = translator_residual(&f);
        let mut sup: f64 = 0.0;
        for j in (stride..g.ny - 1).step_by(stride) {
            for i in (stride..g.nx - 1).step_by(stride) {
                if j + stride > g.ny - 1 || i + stride > g.nx - 1 {
                    continue;
                }
                sup = sup.max(r.get(i, j).abs());
            }
        }
        sup
    }

    #[test]
    fn grim_reaper_residual_second_order() {
        // ln(sin y) solves the equation exactly: u_yy + 1 + u_y² = −csc² + 1 + cot² = 0.
        let w = PI;
        let exact = |_: f64, y: f64| y.sin().ln();
        let e1 = residual_sup_nested(w, exact, w / 32.0, 1);
        let e2 = residual_sup_nested(w, exact, w / 64.0, 2);
        assert!(e1 < 0.05, "sup residual {e1}");
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn tilted_grim_reaper_residual_second_order() {
        // g_w(x,y) = x·√((w/π)²−1) + (w/π)²·ln(sin(πy/w)) for w = √2·π.
        let w = 2.0f64.sqrt() * PI;
        let tilt = ((w / PI) * (w / PI) - 1.0).sqrt();
        let exact = move |x: f64, y: f64| x * tilt + (w / PI).powi(2) * (PI * y / w).sin().ln();
        let e1 = residual_sup_nested(w, exact, w / 32.0, 1);
        let e2 = residual_sup_nested(w, exact, w / 64.0, 2);
        assert!(e1 < 0.05, "sup residual {e1}");
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "observed order {order}");
    }
}
