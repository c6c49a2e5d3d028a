use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{fd_derivatives, NodeMask, ScalarField};

/// Unit normals ν = (−Du, 1)/√(1+|Du|²) at interior nodes.
#[derive(Debug, Clone)]
pub struct NormalField {
    nx: usize,
    normals: Vec<Option<[f64; 3]>>,
    /// Interior nodes where |Du| ≤ 1e−6 (ν = e₃ up to tolerance). The Gauss
    /// map of a pitchfork or helicoid piece attains e₃ at most once.
    pub e3_nodes: Vec<(usize, usize)>,
    /// Smallest |Du| seen and where.
    pub flattest: Option<((usize, usize), f64)>,
}

impl NormalField {
    pub fn normal(&self, i: usize, j: usize) -> Option<[f64; 3]> {
        self.normals[j * self.nx + i]
    }
}

pub fn gauss_map(field: &ScalarField) -> NormalField {
    let grid = field.grid();
    let mut normals = vec![None; grid.node_count()];
    let mut e3_nodes = Vec::new();
    let mut flattest: Option<((usize, usize), f64)> = None;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if field.mask_at(i, j) != NodeMask::Interior {
                continue;
            }
            let Ok(d) = fd_derivatives(field, i, j) else { continue };
            let grad = (d.ux * d.ux + d.uy * d.uy).sqrt();
            let s = 1.0 / (1.0 + grad * grad).sqrt();
            normals[grid.index(i, j)] = Some([-d.ux * s, -d.uy * s, s]);
            if grad <= 1e-6 {
                e3_nodes.push((i, j));
            }
            if flattest.map_or(true, |(_, g)| grad < g) {
                flattest = Some(((i, j), grad));
            }
        }
    }
    NormalField {
        nx: grid.nx,
        normals,
        e3_nodes,
        flattest,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub samples: usize,
    /// Node pairs at distance ≥ 4h whose normals agree to 1e−6.
    pub collisions: Vec<((usize, usize), (usize, usize))>,
}

/// Sampled injectivity of the Gauss map: the diffeomorphism property predicts
/// zero collisions on solved pitchfork/helicoid pieces.
pub fn gauss_injectivity_sample(field: &ScalarField, sample_count: usize, seed: u64) -> InjectivityReport {
    let grid = field.grid();
    let normals = gauss_map(field);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = grid.hx.max(grid.hy);
    let mut collisions = Vec::new();
    let interior: Vec<(usize, usize)> = (0..grid.ny)
        .flat_map(|j| (0..grid.nx).map(move |i| (i, j)))
        .filter(|&(i, j)| field.mask_at(i, j) == NodeMask::Interior)
        .collect();
    if interior.len() < 2 {
        return InjectivityReport { samples: 0, collisions };
    }
    for _ in 0..sample_count {
        let a = interior[rng.random_range(0..interior.len())];
        let b = interior[rng.random_range(0..interior.len())];
        if a == b {
            continue;
        }
        let (pa, pb) = (grid.node_xy(a.0, a.1), grid.node_xy(b.0, b.1));
        let dist = ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt();
        if dist < 4.0 * h {
            continue;
        }
        let (Some(na), Some(nb)) = (normals.normal(a.0, a.1), normals.normal(b.0, b.1)) else {
            continue;
        };
        let dn = ((na[0] - nb[0]).powi(2) + (na[1] - nb[1]).powi(2) + (na[2] - nb[2]).powi(2)).sqrt();
        if dn <= 1e-6 {
            collisions.push((a, b));
        }
    }
    collisions.sort_unstable();
    collisions.dedup();
    InjectivityReport {
        samples: sample_count,
        collisions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DomainSpec, Grid};
    use std::f64::consts::PI;

    #[test]
    fn constant_field_points_straight_up() {
        let g = Grid::build(&DomainSpec::strip(1.0, 0.0, 2.0, 0.125)).unwrap();
        let f = ScalarField::from_fn(g.clone(), |_, _| 3.0);
        let n = gauss_map(&f);
        let v = n.normal(5, 4).unwrap();
        assert_eq!(v, [0.0, 0.0, 1.0]);
        // Every interior node is flat: e₃ attained everywhere.
        assert_eq!(n.e3_nodes.len(), g.interior_count());
    }

    #[test]
    fn tilted_plane_normal() {
        let g = Grid::build(&DomainSpec::strip(1.0, 0.0, 2.0, 0.125)).unwrap();
        let f = ScalarField::from_fn(g, |x, _| x);
        let n = gauss_map(&f);
        let v = n.normal(5, 4).unwrap();
        let s = 0.5f64.sqrt();
        assert!((v[0] + s).abs() < 1e-12 && v[1].abs() < 1e-12 && (v[2] - s).abs() < 1e-12);
    }

    #[test]
    fn grim_reaper_flat_on_the_midline() {
        let w = PI;
        let g = Grid::build(&DomainSpec::window(-2.0, 2.0, w / 8.0, 7.0 * w / 8.0, w / 16.0)).unwrap();
        let f = ScalarField::from_fn(g.clone(), |_, y| y.sin().ln());
        let n = gauss_map(&f);
        // The midline y = π/2 is a grid row of this window; Du = 0 there.
        let j_mid = (g.ny - 1) / 2;
        let (_, y) = g.node_xy(3, j_mid);
        assert!((y - PI / 2.0).abs() < 1e-12);
        let v = n.normal(3, j_mid).unwrap();
        assert!((v[2] - 1.0).abs() < 1e-12);
        assert!(n.e3_nodes.iter().all(|&(_, j)| j == j_mid));
        assert!(!n.e3_nodes.is_empty());
    }

    #[test]
    fn periodic_field_collides_constant_field_floods() {
        // u = sin x over two periods: normals repeat at x and x + 2π.
        let g = Grid::build(&DomainSpec::strip(1.0, 0.0, 4.0 * PI, 0.1)).unwrap();
        let f = ScalarField::from_fn(g, |x, _| x.sin());
        let rep = gauss_injectivity_sample(&f, 20000, 7);
        assert!(!rep.collisions.is_empty(), "periodic graph must collide");
        // Constant field: everything collides.
        let g2 = Grid::build(&DomainSpec::strip(1.0, 0.0, 2.0, 0.1)).unwrap();
        let c = ScalarField::from_fn(g2, |_, _| 0.0);
        let rep2 = gauss_injectivity_sample(&c, 500, 7);
        assert!(rep2.collisions.len() > 100);
    }
}
