use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surfaces::SurfaceMesh;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartConfig {
    pub n_rho: usize,
    pub n_z: usize,
    /// Minimum distance between the axis and any vertex.
    pub min_axis_distance: f64,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig {
            n_rho: 128,
            n_z: 128,
            min_axis_distance: 1e-9,
        }
    }
}

/// Raster of the (ρ, z) image region W with the azimuth ϑ sampled per cell.
#[derive(Debug, Clone)]
pub struct ChartRaster {
    pub rho_min: f64,
    pub rho_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub n_rho: usize,
    pub n_z: usize,
    /// Mean ϑ per covered cell.
    pub theta: Vec<Option<f64>>,
    /// Cells covered by sheets with incompatible ϑ (folds).
    pub overlap_cells: usize,
}

impl ChartRaster {
    pub fn cell_center(&self, ir: usize, iz: usize) -> (f64, f64) {
        (
            self.rho_min + (ir as f64 + 0.5) * (self.rho_max - self.rho_min) / self.n_rho as f64,
            self.z_min + (iz as f64 + 0.5) * (self.z_max - self.z_min) / self.n_z as f64,
        )
    }

    pub fn covered(&self) -> usize {
        self.theta.iter().filter(|t| t.is_some()).count()
    }

    #[inline]
    pub fn at(&self, ir: usize, iz: usize) -> Option<f64> {
        self.theta[iz * self.n_rho + ir]
    }
}

/// Cylindrical-coordinate representation of a mesh about the vertical axis
/// through p_a.
#[derive(Debug, Clone)]
pub struct CylChart {
    pub axis: (f64, f64),
    /// Per-vertex (ρ, θ, z), with θ continuous across the sector.
    pub vertex_cyl: Vec<[f64; 3]>,
    pub sector_angle: f64,
    pub orientation_consistent: bool,
    pub theta_graphical: bool,
    pub raster: ChartRaster,
}

/// Per-vertex cylindrical coordinates and the sector angle. Fails when the
/// axis hits the mesh or the mesh wraps a sector ≥ π.
pub(crate) fn cyl_coords(
    mesh: &SurfaceMesh,
    p_a: (f64, f64),
    min_axis_distance: f64,
) -> Result<(Vec<[f64; 3]>, f64)> {
    if mesh.vertices.is_empty() {
        return Err(Error::InvalidAxis("empty mesh".into()));
    }
    let mut sum_sin = 0.0f64;
    let mut sum_cos = 0.0f64;
    let mut raw = Vec::with_capacity(mesh.vertices.len());
    for v in &mesh.vertices {
        let dx = v[0] - p_a.0;
        let dy = v[1] - p_a.1;
        let rho = (dx * dx + dy * dy).sqrt();
        if rho < min_axis_distance {
            return Err(Error::InvalidAxis(format!(
                "axis passes within {rho:.3e} of the mesh"
            )));
        }
        let ang = dy.atan2(dx);
        sum_sin += ang.sin();
        sum_cos += ang.cos();
        raw.push((rho, ang, v[2]));
    }
    let mean_dir = sum_sin.atan2(sum_cos);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(raw.len());
    for (rho, ang, z) in raw {
        let mut delta = ang - mean_dir;
        while delta > std::f64::consts::PI {
            delta -= 2.0 * std::f64::consts::PI;
        }
        while delta < -std::f64::consts::PI {
            delta += 2.0 * std::f64::consts::PI;
        }
        lo = lo.min(delta);
        hi = hi.max(delta);
        out.push([rho, mean_dir + delta, z]);
    }
    let sector = hi - lo;
    if sector >= std::f64::consts::PI {
        return Err(Error::SectorTooWide { angle: sector });
    }
    Ok((out, sector))
}

/// Rasterize the azimuth over a (ρ, z) box: for each triangle, cells whose
/// centers it covers get the barycentric ϑ. Cells reached by sheets whose ϑ
/// disagree count as overlaps.
pub(crate) fn rasterize_theta(
    cyl: &[[f64; 3]],
    triangles: &[[usize; 3]],
    bbox: (f64, f64, f64, f64),
    n_rho: usize,
    n_z: usize,
) -> ChartRaster {
    let (rho_min, rho_max, z_min, z_max) = bbox;
    let mut theta: Vec<Option<f64>> = vec![None; n_rho * n_z];
    let mut overlap = vec![false; n_rho * n_z];
    let drho = (rho_max - rho_min) / n_rho as f64;
    let dz = (z_max - z_min) / n_z as f64;
    if drho <= 0.0 || dz <= 0.0 {
        return ChartRaster {
            rho_min,
            rho_max,
            z_min,
            z_max,
            n_rho,
            n_z,
            theta,
            overlap_cells: 0,
        };
    }
    for tri in triangles {
        let p: Vec<(f64, f64, f64)> = tri.iter().map(|&k| (cyl[k][0], cyl[k][2], cyl[k][1])).collect();
        let (r_lo, r_hi) = (
            p.iter().fold(f64::INFINITY, |m, q| m.min(q.0)),
            p.iter().fold(f64::NEG_INFINITY, |m, q| m.max(q.0)),
        );
        let (zl, zh) = (
            p.iter().fold(f64::INFINITY, |m, q| m.min(q.1)),
            p.iter().fold(f64::NEG_INFINITY, |m, q| m.max(q.1)),
        );
        let ir0 = (((r_lo - rho_min) / drho).floor().max(0.0)) as usize;
        let ir1 = (((r_hi - rho_min) / drho).ceil().min(n_rho as f64)) as usize;
        let iz0 = (((zl - z_min) / dz).floor().max(0.0)) as usize;
        let iz1 = (((zh - z_min) / dz).ceil().min(n_z as f64)) as usize;
        let det = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[2].0 - p[0].0) * (p[1].1 - p[0].1);
        if det.abs() < 1e-300 {
            continue;
        }
        for iz in iz0..iz1 {
            for ir in ir0..ir1 {
                let cr = rho_min + (ir as f64 + 0.5) * drho;
                let cz = z_min + (iz as f64 + 0.5) * dz;
                let b1 = ((p[1].0 - cr) * (p[2].1 - cz) - (p[2].0 - cr) * (p[1].1 - cz)) / det;
                let b2 = ((p[2].0 - cr) * (p[0].1 - cz) - (p[0].0 - cr) * (p[2].1 - cz)) / det;
                let b3 = 1.0 - b1 - b2;
                let eps = -1e-12;
                if b1 < eps || b2 < eps || b3 < eps {
                    continue;
                }
                let th = b1 * p[0].2 + b2 * p[1].2 + b3 * p[2].2;
                let idx = iz * n_rho + ir;
                match theta[idx] {
                    None => theta[idx] = Some(th),
                    Some(existing) => {
                        // Adjacent triangles agree at shared-edge centers; a
                        // genuine fold shows a distinct sheet angle.
                        if (existing - th).abs() > 1e-4 {
                            overlap[idx] = true;
                        }
                    }
                }
            }
        }
    }
    let overlap_cells = overlap.iter().filter(|&&b| b).count();
    ChartRaster {
        rho_min,
        rho_max,
        z_min,
        z_max,
        n_rho,
        n_z,
        theta,
        overlap_cells,
    }
}

/// Project a mesh into cylindrical coordinates about p_a and decide whether
/// it is a θ-graph: consistent triangle orientation in the (ρ, z) chart and
/// no overlapping sheets at sampled cells.
pub fn cylindrical_chart(mesh: &SurfaceMesh, p_a: (f64, f64), config: &ChartConfig) -> Result<CylChart> {
    let (vertex_cyl, sector_angle) = cyl_coords(mesh, p_a, config.min_axis_distance)?;
    let mut rho_min = f64::INFINITY;
    let mut rho_max = f64::NEG_INFINITY;
    let mut z_min = f64::INFINITY;
    let mut z_max = f64::NEG_INFINITY;
    for c in &vertex_cyl {
        rho_min = rho_min.min(c[0]);
        rho_max = rho_max.max(c[0]);
        z_min = z_min.min(c[2]);
        z_max = z_max.max(c[2]);
    }
    let mut pos = 0usize;
    let mut neg = 0usize;
    for tri in &mesh.triangles {
        let a = &vertex_cyl[tri[0]];
        let b = &vertex_cyl[tri[1]];
        let c = &vertex_cyl[tri[2]];
        let det = (b[0] - a[0]) * (c[2] - a[2]) - (c[0] - a[0]) * (b[2] - a[2]);
        let scale = (rho_max - rho_min).max(z_max - z_min).max(1e-30);
        if det.abs() > 1e-12 * scale * scale {
            if det > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
    }
    let orientation_consistent = pos == 0 || neg == 0;
    let raster = rasterize_theta(
        &vertex_cyl,
        &mesh.triangles,
        (rho_min, rho_max, z_min, z_max),
        config.n_rho,
        config.n_z,
    );
    let theta_graphical = orientation_consistent && raster.overlap_cells == 0;
    Ok(CylChart {
        axis: p_a,
        vertex_cyl,
        sector_angle,
        orientation_consistent,
        theta_graphical,
        raster,
    })
}
