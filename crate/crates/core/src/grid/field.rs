use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Node classification. Excluded nodes carry no trustworthy values (cap
/// bands, outside-overlap nodes) and are skipped by analysis passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeMask {
    Interior,
    Boundary,
    Excluded,
}

/// A discrete graph function u on a grid. Stored values are always finite;
/// infinite boundary prescriptions live in `BoundarySpec`, never here.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    mask: Vec<NodeMask>,
}

impl ScalarField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.node_count();
        let mask = default_mask(&grid);
        Self {
            grid,
            values: vec![0.0; n],
            mask,
        }
    }

    /// Sample a function of physical coordinates on every node.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = Self::zeros(grid);
        for j in 0..field.grid.ny {
            for i in 0..field.grid.nx {
                let (x, y) = field.grid.node_xy(i, j);
                field.values[field.grid.index(i, j)] = f(x, y);
            }
        }
        field
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.grid.index(i, j);
        self.values[idx] = v;
    }

    #[inline]
    pub fn mask_at(&self, i: usize, j: usize) -> NodeMask {
        self.mask[self.grid.index(i, j)]
    }

    pub fn exclude(&mut self, i: usize, j: usize) {
        let idx = self.grid.index(i, j);
        self.mask[idx] = NodeMask::Excluded;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value lookup that follows the periodic column alias.
    #[inline]
    pub fn get_wrapped(&self, i: usize, j: usize) -> f64 {
        let i = if self.grid.spec.periodic_x && i == self.grid.nx - 1 {
            0
        } else {
            i
        };
        self.get(i, j)
    }

    pub fn ensure_finite(&self) -> Result<()> {
        for (idx, v) in self.values.iter().enumerate() {
            if !v.is_finite() && self.mask[idx] != NodeMask::Excluded {
                let i = idx % self.grid.nx;
                let j = idx / self.grid.nx;
                return Err(Error::Format(format!(
                    "non-finite value {v} stored at node ({i},{j})"
                )));
            }
        }
        Ok(())
    }

    /// Sup-norm of the difference against another field on the same grid,
    /// restricted to nodes that satisfy `keep` in both masks.
    pub fn sup_diff<F: Fn(f64, f64, NodeMask) -> bool>(&self, other: &ScalarField, keep: F) -> f64 {
        assert_eq!(self.grid.node_count(), other.grid.node_count());
        let mut sup: f64 = 0.0;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let (x, y) = self.grid.node_xy(i, j);
                let m = self.mask_at(i, j);
                if m == NodeMask::Excluded || other.mask_at(i, j) == NodeMask::Excluded {
                    continue;
                }
                if keep(x, y, m) {
                    sup = sup.max((self.get(i, j) - other.get(i, j)).abs());
                }
            }
        }
        sup
    }

    /// Pointwise subtraction on a shared grid.
    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        if !grids_compatible(&self.grid, &other.grid) {
            return Err(Error::Format(
                "fields are only composable on identical grids; use levelsets::difference_field for shifted domains"
                    .into(),
            ));
        }
        let mut out = self.clone();
        for idx in 0..out.values.len() {
            out.values[idx] -= other.values[idx];
            if other.mask[idx] == NodeMask::Excluded {
                out.mask[idx] = NodeMask::Excluded;
            }
        }
        Ok(out)
    }

    /// Bilinear interpolation at a physical point. Returns `None` outside the
    /// grid (or when a supporting node is excluded).
    pub fn interp(&self, x: f64, y: f64) -> Option<f64> {
        let g = &self.grid;
        let t = y - g.spec.y_min;
        let s = x - g.spec.x_min - g.shear * t;
        let fi = s / g.hx;
        let fj = t / g.hy;
        let eps = 1e-9;
        if fi < -eps || fj < -eps || fi > (g.nx - 1) as f64 + eps || fj > (g.ny - 1) as f64 + eps {
            return None;
        }
        let i0 = (fi.floor().max(0.0) as usize).min(g.nx - 2);
        let j0 = (fj.floor().max(0.0) as usize).min(g.ny - 2);
        let ax = (fi - i0 as f64).clamp(0.0, 1.0);
        let ay = (fj - j0 as f64).clamp(0.0, 1.0);
        for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            if self.mask_at(i0 + di, j0 + dj) == NodeMask::Excluded {
                return None;
            }
        }
        let v00 = self.get(i0, j0);
        let v10 = self.get(i0 + 1, j0);
        let v01 = self.get(i0, j0 + 1);
        let v11 = self.get(i0 + 1, j0 + 1);
        Some(v00 * (1.0 - ax) * (1.0 - ay) + v10 * ax * (1.0 - ay) + v01 * (1.0 - ax) * ay + v11 * ax * ay)
    }
}

fn grids_compatible(a: &Grid, b: &Grid) -> bool {
    a.nx == b.nx
        && a.ny == b.ny
        && (a.hx - b.hx).abs() < 1e-12
        && (a.hy - b.hy).abs() < 1e-12
        && (a.spec.x_min - b.spec.x_min).abs() < 1e-12
        && (a.spec.y_min - b.spec.y_min).abs() < 1e-12
        && (a.shear - b.shear).abs() < 1e-12
}

pub(crate) fn default_mask(grid: &Grid) -> Vec<NodeMask> {
    let mut mask = vec![NodeMask::Interior; grid.node_count()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if grid.is_boundary(i, j) {
                mask[grid.index(i, j)] = NodeMask::Boundary;
            }
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DomainSpec;

    #[test]
    fn masks_flag_the_rim() {
        let g = Grid::build(&DomainSpec::strip(1.0, 0.0, 2.0, 0.125)).unwrap();
        let f = ScalarField::zeros(g.clone());
        assert_eq!(f.mask_at(0, 3), NodeMask::Boundary);
        assert_eq!(f.mask_at(5, 0), NodeMask::Boundary);
        assert_eq!(f.mask_at(3, 3), NodeMask::Interior);
    }

    #[test]
    fn interp_reproduces_bilinear_data() {
        let g = Grid::build(&DomainSpec::strip(1.0, 0.0, 2.0, 0.125)).unwrap();
        let f = ScalarField::from_fn(g, |x, y| 2.0 * x - 3.0 * y + 0.5);
        let v = f.interp(0.777, 0.444).unwrap();
        assert!((v - (2.0 * 0.777 - 3.0 * 0.444 + 0.5)).abs() < 1e-12);
        assert!(f.interp(-0.5, 0.5).is_none());
    }

    #[test]
    fn sub_requires_matching_grids() {
        let g1 = Grid::build(&DomainSpec::strip(1.0, 0.0, 2.0, 0.125)).unwrap();
        let g2 = Grid::build(&DomainSpec::strip(1.0, 0.0, 2.0, 0.0625)).unwrap();
        let a = ScalarField::zeros(g1.clone());
        let b = ScalarField::zeros(g2);
        assert!(a.sub(&b).is_err());
        let c = ScalarField::from_fn(g1, |x, _| x);
        let d = a.sub(&c).unwrap();
        assert!((d.get(4, 4) + c.get(4, 4)).abs() < 1e-15);
    }
}
