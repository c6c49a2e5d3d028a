use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cylindrical_chart, ChartConfig};
use crate::surfaces::SurfaceMesh;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangencyConfig {
    pub n_rho: usize,
    pub n_z: usize,
    pub contact_tol: f64,
}

impl Default for TangencyConfig {
    fn default() -> Self {
        TangencyConfig {
            n_rho: 128,
            n_z: 128,
            contact_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangencyReport {
    /// Extremal rotation angle: sup or inf of ϑ₂ − ϑ₁ over W, whichever is
    /// larger in magnitude.
    pub theta0: f64,
    pub sup_diff: f64,
    pub inf_diff: f64,
    /// (ρ, z) cell centers within contact_tol of the extremum.
    pub contacts: Vec<(f64, f64)>,
    pub w_cells: usize,
    pub interior_contact: bool,
    /// Set when every contact sits on the raster boundary of W — the
    /// violation of the interior-tangency expectation.
    pub boundary_contact_only: bool,
    /// ϑ₂ − ϑ₁ decays toward the far boundary of W (sup over W-boundary
    /// cells at most half the extremum).
    pub decay_ok: bool,
}

/// Rotational tangency search: express both meshes as θ-graphs over a common
/// (ρ, z) raster about p_a and find the extremal azimuth difference and its
/// contact set.
pub fn tangency_search(
    mesh1: &SurfaceMesh,
    mesh2: &SurfaceMesh,
    p_a: (f64, f64),
    config: &TangencyConfig,
) -> Result<TangencyReport> {
    let chart_config = ChartConfig {
        n_rho: config.n_rho,
        n_z: config.n_z,
        ..ChartConfig::default()
    };
    let c1 = cylindrical_chart(mesh1, p_a, &chart_config)?;
    let c2 = cylindrical_chart(mesh2, p_a, &chart_config)?;
    for (k, c) in [(1, &c1), (2, &c2)] {
        if !c.theta_graphical {
            return Err(Error::NotThetaGraph(format!(
                "mesh {k}: orientation consistent = {}, overlapping cells = {}",
                c.orientation_consistent, c.raster.overlap_cells
            )));
        }
    }
    // Common raster over the intersection of the image regions.
    let bbox = (
        c1.raster.rho_min.max(c2.raster.rho_min),
        c1.raster.rho_max.min(c2.raster.rho_max),
        c1.raster.z_min.max(c2.raster.z_min),
        c1.raster.z_max.min(c2.raster.z_max),
    );
    if bbox.0 >= bbox.1 || bbox.2 >= bbox.3 {
        return Err(Error::NotThetaGraph("chart images do not overlap".into()));
    }
    let r1 = crate::geometry::rasterize_theta(&c1.vertex_cyl, &mesh1.triangles, bbox, config.n_rho, config.n_z);
    let r2 = crate::geometry::rasterize_theta(&c2.vertex_cyl, &mesh2.triangles, bbox, config.n_rho, config.n_z);

    let n = config.n_rho * config.n_z;
    let mut diff: Vec<Option<f64>> = vec![None; n];
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    let mut w_cells = 0usize;
    for k in 0..n {
        if let (Some(t1), Some(t2)) = (r1.theta[k], r2.theta[k]) {
            let d = t2 - t1;
            diff[k] = Some(d);
            sup = sup.max(d);
            inf = inf.min(d);
            w_cells += 1;
        }
    }
    if w_cells == 0 {
        return Err(Error::NotThetaGraph("empty common region W".into()));
    }
    let theta0 = if sup.abs() >= inf.abs() { sup } else { inf };

    // W-boundary cells: covered cells with an uncovered 4-neighbor (or at
    // the raster rim).
    let is_boundary = |k: usize| -> bool {
        let (ir, iz) = (k % config.n_rho, k / config.n_rho);
        if ir == 0 || iz == 0 || ir + 1 == config.n_rho || iz + 1 == config.n_z {
            return true;
        }
        for nk in [k - 1, k + 1, k - config.n_rho, k + config.n_rho] {
            if diff[nk].is_none() {
                return true;
            }
        }
        false
    };
    let mut contacts = Vec::new();
    let mut interior_contact = false;
    let mut boundary_contact = false;
    let mut boundary_sup: f64 = 0.0;
    for k in 0..n {
        let Some(d) = diff[k] else { continue };
        let on_boundary = is_boundary(k);
        if on_boundary {
            boundary_sup = boundary_sup.max(d.abs());
        }
        if (d - theta0).abs() <= config.contact_tol {
            let (ir, iz) = (k % config.n_rho, k / config.n_rho);
            contacts.push(r1.cell_center(ir, iz));
            if on_boundary {
                boundary_contact = true;
            } else {
                interior_contact = true;
            }
        }
    }
    Ok(TangencyReport {
        theta0,
        sup_diff: sup,
        inf_diff: inf,
        contacts,
        w_cells,
        interior_contact,
        boundary_contact_only: boundary_contact && !interior_contact,
        decay_ok: boundary_sup <= 0.5 * theta0.abs() + 1e-12,
    })
}
