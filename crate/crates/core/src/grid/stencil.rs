use crate::error::{Error, Result};
use crate::grid::{Grid, NodeMask, ScalarField};

/// First and second derivatives of a field at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivs {
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

/// Weights of the five derivative operators over the 3×3 neighborhood,
/// indexed `k = (dj+1)·3 + (di+1)`.
///
/// On sheared parallelogram grids (x = s + t·cotα, y = t) the lattice
/// derivatives (s,t) are chain-ruled into Cartesian ones:
///   ∂x = ∂s,  ∂y = ∂t − cotα·∂s,
/// so all five stencils stay second order and exact on quadratics.
#[derive(Debug, Clone)]
pub struct StencilWeights {
    pub wx: [f64; 9],
    pub wy: [f64; 9],
    pub wxx: [f64; 9],
    pub wxy: [f64; 9],
    pub wyy: [f64; 9],
}

#[inline]
pub(crate) fn k_of(di: isize, dj: isize) -> usize {
    ((dj + 1) * 3 + (di + 1)) as usize
}

impl StencilWeights {
    pub fn for_grid(grid: &Grid) -> Self {
        let hx = grid.hx;
        let hy = grid.hy;
        let c = grid.shear;

        let mut ws = [0.0; 9];
        ws[k_of(-1, 0)] = -0.5 / hx;
        ws[k_of(1, 0)] = 0.5 / hx;

        let mut wt = [0.0; 9];
        wt[k_of(0, -1)] = -0.5 / hy;
        wt[k_of(0, 1)] = 0.5 / hy;

        let mut wss = [0.0; 9];
        wss[k_of(-1, 0)] = 1.0 / (hx * hx);
        wss[k_of(0, 0)] = -2.0 / (hx * hx);
        wss[k_of(1, 0)] = 1.0 / (hx * hx);

        let mut wtt = [0.0; 9];
        wtt[k_of(0, -1)] = 1.0 / (hy * hy);
        wtt[k_of(0, 0)] = -2.0 / (hy * hy);
        wtt[k_of(0, 1)] = 1.0 / (hy * hy);

        let mut wst = [0.0; 9];
        let q = 0.25 / (hx * hy);
        wst[k_of(1, 1)] = q;
        wst[k_of(-1, -1)] = q;
        wst[k_of(1, -1)] = -q;
        wst[k_of(-1, 1)] = -q;

        let mut out = StencilWeights {
            wx: ws,
            wy: [0.0; 9],
            wxx: wss,
            wxy: [0.0; 9],
            wyy: [0.0; 9],
        };
        for k in 0..9 {
            out.wy[k] = wt[k] - c * ws[k];
            out.wxy[k] = wst[k] - c * wss[k];
            out.wyy[k] = wtt[k] - 2.0 * c * wst[k] + c * c * wss[k];
        }
        out
    }
}

/// Gather the 3×3 neighborhood values around an interior node, following the
/// periodic column wrap where applicable.
#[inline]
pub(crate) fn neighborhood(field: &ScalarField, i: usize, j: usize) -> [f64; 9] {
    let grid = field.grid();
    let mut vals = [0.0; 9];
    for dj in -1..=1isize {
        for di in -1..=1isize {
            let jj = (j as isize + dj) as usize;
            let ii = grid.col_step(i, di).expect("interior node has column neighbors");
            vals[k_of(di, dj)] = field.get_wrapped(ii, jj);
        }
    }
    vals
}

#[inline]
fn dot9(w: &[f64; 9], v: &[f64; 9]) -> f64 {
    let mut acc = 0.0;
    for k in 0..9 {
        acc += w[k] * v[k];
    }
    acc
}

pub(crate) fn derivs_from(weights: &StencilWeights, vals: &[f64; 9]) -> Derivs {
    Derivs {
        ux: dot9(&weights.wx, vals),
        uy: dot9(&weights.wy, vals),
        uxx: dot9(&weights.wxx, vals),
        uxy: dot9(&weights.wxy, vals),
        uyy: dot9(&weights.wyy, vals),
    }
}

/// Second-order central differences at an interior node.
pub fn fd_derivatives(field: &ScalarField, i: usize, j: usize) -> Result<Derivs> {
    if field.mask_at(i, j) != NodeMask::Interior {
        return Err(Error::NotInterior { i, j });
    }
    let weights = StencilWeights::for_grid(field.grid());
    Ok(derivs_from(&weights, &neighborhood(field, i, j)))
}
