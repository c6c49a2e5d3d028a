use crate::grid::{BoundarySpec, Derivs, EdgeSpec, EdgeValue, ScalarField, StencilWeights};
use crate::pde::sparse::SparseMatrix;
use crate::pde::unknowns::{NodeRef, UnknownMap};

/// Coefficients of the linearization DF(u)·v = a¹¹v_xx + a²²v_yy + a¹²v_xy
/// + b¹v_x + b²v_y, obtained by differentiating the translator operator in
/// (Du, D²u).
#[derive(Debug, Clone, Copy)]
pub struct Linearization {
    pub a11: f64,
    pub a22: f64,
    pub a12: f64,
    pub b1: f64,
    pub b2: f64,
}

impl Linearization {
    /// Linearization of the raw operator F.
    #[inline]
    pub fn at(d: &Derivs) -> Self {
        Linearization {
            a11: 1.0 + d.uy * d.uy,
            a22: 1.0 + d.ux * d.ux,
            a12: -2.0 * d.ux * d.uy,
            b1: 2.0 * (d.uyy * d.ux - d.uxy * d.uy + d.ux),
            b2: 2.0 * (d.uxx * d.uy - d.uxy * d.ux + d.uy),
        }
    }

    /// Linearization of F/W with W = 1 + |Du|²:
    /// d(F/W) = [dF − (F/W)·dW] / W.
    #[inline]
    pub fn normalized_at(d: &Derivs) -> Self {
        let raw = Self::at(d);
        let w = 1.0 + d.ux * d.ux + d.uy * d.uy;
        let f_over_w = crate::pde::residual::normalized_operator(d);
        Linearization {
            a11: raw.a11 / w,
            a22: raw.a22 / w,
            a12: raw.a12 / w,
            b1: (raw.b1 - f_over_w * 2.0 * d.ux) / w,
            b2: (raw.b2 - f_over_w * 2.0 * d.uy) / w,
        }
    }
}

fn assemble(field: &ScalarField, map: &UnknownMap, normalized: bool) -> SparseMatrix {
    let grid = field.grid();
    let weights = StencilWeights::for_grid(grid);
    let mut out = SparseMatrix::zeros(map.len());
    for (row, &(i, j)) in map.nodes().iter().enumerate() {
        let vals = crate::grid::neighborhood_of(field, i, j);
        let d = crate::grid::derivs_of(&weights, &vals);
        let lin = if normalized {
            Linearization::normalized_at(&d)
        } else {
            Linearization::at(&d)
        };
        for dj in -1..=1isize {
            for di in -1..=1isize {
                let k = crate::grid::stencil_index(di, dj);
                let w = lin.a11 * weights.wxx[k]
                    + lin.a22 * weights.wyy[k]
                    + lin.a12 * weights.wxy[k]
                    + lin.b1 * weights.wx[k]
                    + lin.b2 * weights.wy[k];
                if w == 0.0 {
                    continue;
                }
                let jj = (j as isize + dj) as usize;
                let Some(ii) = grid.col_step(i, di) else { continue };
                if let NodeRef::Unknown(col) = map.resolve(grid, ii, jj) {
                    out.add(row, col, w);
                }
            }
        }
    }
    out
}

/// Jacobian of the normalized residual; what the Newton solver factors.
pub(crate) fn assemble_jacobian(field: &ScalarField, map: &UnknownMap) -> SparseMatrix {
    assemble(field, map, true)
}

/// Jacobian ∂F/∂u of the raw translator residual with plain Dirichlet
/// truncation edges (every interior node an unknown), together with the
/// unknown enumeration. Validated against finite differences of
/// `translator_residual`.
pub fn translator_jacobian(field: &ScalarField) -> (SparseMatrix, UnknownMap) {
    let grid = field.grid();
    let all_dirichlet = BoundarySpec {
        bottom: EdgeSpec::uniform(EdgeValue::MinusInf, grid.spec.x_min, grid.spec.x_max),
        top: EdgeSpec::uniform(EdgeValue::MinusInf, grid.spec.x_min, grid.spec.x_max),
        left: if grid.spec.periodic_x {
            EdgeSpec::Periodic
        } else {
            EdgeSpec::uniform(EdgeValue::MinusInf, grid.spec.y_min, grid.spec.y_min + grid.spec.w)
        },
        right: if grid.spec.periodic_x {
            EdgeSpec::Periodic
        } else {
            EdgeSpec::uniform(EdgeValue::MinusInf, grid.spec.y_min, grid.spec.y_min + grid.spec.w)
        },
    };
    let map = UnknownMap::new(grid, &all_dirichlet);
    let jac = assemble(field, &map, false);
    (jac, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DomainSpec, Grid, NodeMask};
    use crate::pde::residual::{raw_residual_vector, residual_vector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn jacobian_at_zero_is_the_discrete_laplacian() {
        let g = Grid::build(&DomainSpec::strip(1.0, 0.0, 2.0, 0.125)).unwrap();
        let f = ScalarField::zeros(g.clone());
        let (jac, map) = translator_jacobian(&f);
        // Pick an unknown away from the rim and compare its row with Δ.
        let (row, &(i, j)) = map
            .nodes()
            .iter()
            .enumerate()
            .find(|(_, &(i, j))| i == 5 && j == 4)
            .unwrap();
        let hx2 = 1.0 / (g.hx * g.hx);
        let hy2 = 1.0 / (g.hy * g.hy);
        let mut expected = std::collections::HashMap::new();
        expected.insert(map.resolve(&g, i, j), -2.0 * hx2 - 2.0 * hy2);
        expected.insert(map.resolve(&g, i - 1, j), hx2);
        expected.insert(map.resolve(&g, i + 1, j), hx2);
        expected.insert(map.resolve(&g, i, j - 1), hy2);
        expected.insert(map.resolve(&g, i, j + 1), hy2);
        for &(col, v) in jac.row(row) {
            let r = NodeRef::Unknown(col);
            let want = expected.get(&r).copied().unwrap_or(0.0);
            assert!((v - want).abs() < 1e-10, "row entry {v} vs {want}");
        }
    }

    fn random_smooth_field(grid: &std::sync::Arc<Grid>, rng: &mut ChaCha8Rng) -> ScalarField {
        let a: f64 = rng.random_range(-0.5..0.5);
        let b: f64 = rng.random_range(-0.5..0.5);
        let c: f64 = rng.random_range(-0.5..0.5);
        let kx: f64 = rng.random_range(0.5..2.0);
        let ky: f64 = rng.random_range(0.5..2.0);
        ScalarField::from_fn(grid.clone(), move |x, y| {
            a * (kx * x).sin() * (ky * y).cos() + b * x * y + c * (x + y).cos()
        })
    }

    fn perturbed(u: &ScalarField, dir: &ScalarField, eps: f64) -> (ScalarField, ScalarField) {
        let g = u.grid().clone();
        let mut up = u.clone();
        let mut um = u.clone();
        for j in 0..g.ny {
            for i in 0..g.nx {
                if up.mask_at(i, j) == NodeMask::Interior {
                    up.set(i, j, u.get(i, j) + eps * dir.get(i, j));
                    um.set(i, j, u.get(i, j) - eps * dir.get(i, j));
                }
            }
        }
        (up, um)
    }

    #[test]
    fn jacobian_matches_directional_finite_differences() {
        let g = Grid::build(&DomainSpec::strip(PI, -1.0, 1.0, PI / 16.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let u = random_smooth_field(&g, &mut rng);
            let dir = random_smooth_field(&g, &mut rng);
            let (jac, map) = translator_jacobian(&u);
            let v: Vec<f64> = map.nodes().iter().map(|&(i, j)| dir.get(i, j)).collect();
            let jv = jac.matvec(&v);

            let eps = 1e-6;
            let (up, um) = perturbed(&u, &dir, eps);
            let rp = raw_residual_vector(&up, &map);
            let rm = raw_residual_vector(&um, &map);
            for (k, jv_k) in jv.iter().enumerate() {
                let fd = (rp[k] - rm[k]) / (2.0 * eps);
                assert!(
                    (fd - jv_k).abs() <= 1e-5 * (1.0 + jv_k.abs()),
                    "FD {fd} vs analytic {jv_k}"
                );
            }
        }
    }

    #[test]
    fn normalized_jacobian_matches_directional_finite_differences() {
        let g = Grid::build(&DomainSpec::strip(PI, -1.0, 1.0, PI / 16.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let u = random_smooth_field(&g, &mut rng);
            let dir = random_smooth_field(&g, &mut rng);
            let (_, map) = translator_jacobian(&u);
            let jac = assemble_jacobian(&u, &map);
            let v: Vec<f64> = map.nodes().iter().map(|&(i, j)| dir.get(i, j)).collect();
            let jv = jac.matvec(&v);
            let eps = 1e-6;
            let (up, um) = perturbed(&u, &dir, eps);
            let rp = residual_vector(&up, &map);
            let rm = residual_vector(&um, &map);
            for (k, jv_k) in jv.iter().enumerate() {
                let fd = (rp[k] - rm[k]) / (2.0 * eps);
                assert!((fd - jv_k).abs() <= 1e-5 * (1.0 + jv_k.abs()));
            }
        }
    }

    #[test]
    fn grim_reaper_rows_reduce_to_the_one_dimensional_operator() {
        // At a grim reaper node u_x = u_xx = u_xy = 0, so the linearization
        // collapses to (1+u_y²)v_xx + v_yy + 2u_y·v_y: first-order term only
        // in y, no cross terms.
        let w = PI;
        let g = Grid::build(&DomainSpec::window(-1.0, 1.0, w / 8.0, 7.0 * w / 8.0, w / 32.0)).unwrap();
        let f = ScalarField::from_fn(g.clone(), |_, y| y.sin().ln());
        let (i, j) = (4, 5);
        let (_, y) = g.node_xy(i, j);
        let d = crate::grid::fd_derivatives(&f, i, j).unwrap();
        let lin = Linearization::at(&d);
        let uy = 1.0 / y.tan();
        // Discrete derivatives carry O(h²) error; tolerances sized accordingly.
        assert!((lin.a11 - (1.0 + uy * uy)).abs() < 2e-2);
        assert!((lin.a22 - 1.0).abs() < 1e-10);
        assert!(lin.a12.abs() < 1e-10);
        assert!(lin.b1.abs() < 1e-10);
        assert!((lin.b2 - 2.0 * uy).abs() < 2e-2);
    }
}
