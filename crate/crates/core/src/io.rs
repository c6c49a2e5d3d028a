//! File formats: field CSV with JSON domain sidecar, ASCII OBJ meshes with
//! crease polylines, chart and arc CSVs, JSON reports.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{DomainSpec, Grid, NodeMask, ScalarField};
use crate::surfaces::SurfaceMesh;

/// Field CSV: header `x,y,u`, row-major, 17 significant digits; excluded
/// nodes are written as `nan`.
pub fn write_field_csv(field: &ScalarField, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "x,y,u")?;
    let g = field.grid();
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (x, y) = g.node_xy(i, j);
            if field.mask_at(i, j) == NodeMask::Excluded {
                writeln!(out, "{x:.16e},{y:.16e},nan")?;
            } else {
                writeln!(out, "{x:.16e},{y:.16e},{:.16e}", field.get(i, j))?;
            }
        }
    }
    Ok(())
}

/// Domain metadata sidecar (keys: kind, w, x_min, x_max, alpha, L, h, plus
/// y_min/periodic_x when meaningful).
pub fn write_domain_json(spec: &DomainSpec, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(spec).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_domain_json(path: &Path) -> Result<DomainSpec> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("domain sidecar: {e}")))
}

/// Rebuild a field from its CSV and domain sidecar. Values are matched by
/// row-major order; `nan` rows become excluded nodes.
pub fn read_field_csv(csv_path: &Path, spec: &DomainSpec) -> Result<ScalarField> {
    let grid = Grid::build(spec)?;
    let file = BufReader::new(std::fs::File::open(csv_path)?);
    let mut values = Vec::with_capacity(grid.node_count());
    let mut excluded = Vec::new();
    for (lineno, line) in file.lines().enumerate() {
        let line = line?;
        if lineno == 0 {
            if line.trim() != "x,y,u" {
                return Err(Error::Format(format!("unexpected CSV header: {line}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let _x = parts.next();
        let _y = parts.next();
        let u = parts
            .next()
            .ok_or_else(|| Error::Format(format!("line {lineno}: missing u column")))?;
        if u.trim() == "nan" {
            excluded.push(values.len());
            values.push(0.0);
        } else {
            values.push(
                u.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {lineno}: {e}")))?,
            );
        }
    }
    if values.len() != grid.node_count() {
        return Err(Error::Format(format!(
            "CSV has {} nodes, domain expects {}",
            values.len(),
            grid.node_count()
        )));
    }
    let mut field = ScalarField::zeros(grid.clone());
    field.values_mut().copy_from_slice(&values);
    for idx in excluded {
        field.exclude(idx % grid.nx, idx / grid.nx);
    }
    Ok(field)
}

/// ASCII OBJ with 1-based indices; crease lines as `l` polylines.
pub fn write_obj(mesh: &SurfaceMesh, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    for v in &mesh.vertices {
        writeln!(out, "v {:.12} {:.12} {:.12}", v[0], v[1], v[2])?;
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    let mut next = mesh.vertices.len() + 1;
    for line in &mesh.crease_lines {
        for p in line {
            writeln!(out, "v {:.12} {:.12} {:.12}", p[0], p[1], p[2])?;
        }
        let ids: Vec<String> = (next..next + line.len()).map(|k| k.to_string()).collect();
        writeln!(out, "l {}", ids.join(" "))?;
        next += line.len();
    }
    Ok(())
}

/// Chart CSV: `rho,theta,z` per vertex.
pub fn write_chart_csv(chart: &crate::geometry::CylChart, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "rho,theta,z")?;
    for c in &chart.vertex_cyl {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", c[0], c[1], c[2])?;
    }
    Ok(())
}

/// Serialize any report as pretty JSON.
pub fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn field_csv_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let spec = DomainSpec::strip(PI, -2.0, 2.0, PI / 16.0);
        let grid = Grid::build(&spec).unwrap();
        let mut f = ScalarField::from_fn(grid, |x, y| (x * 1.37).sin() * y.exp());
        f.exclude(3, 3);
        let csv = dir.path().join("u.csv");
        let side = dir.path().join("u.domain.json");
        write_field_csv(&f, &csv).unwrap();
        write_domain_json(&spec, &side).unwrap();
        let spec2 = read_domain_json(&side).unwrap();
        let f2 = read_field_csv(&csv, &spec2).unwrap();
        assert_eq!(f.grid().nx, f2.grid().nx);
        for j in 0..f.grid().ny {
            for i in 0..f.grid().nx {
                if f.mask_at(i, j) == NodeMask::Excluded {
                    assert_eq!(f2.mask_at(i, j), NodeMask::Excluded);
                } else {
                    // 17 significant digits reproduce f64 exactly.
                    assert_eq!(f.get(i, j), f2.get(i, j));
                }
            }
        }
        // Determinism: identical bytes on rewrite.
        let bytes1 = std::fs::read(&csv).unwrap();
        write_field_csv(&f, &csv).unwrap();
        assert_eq!(bytes1, std::fs::read(&csv).unwrap());
    }

    #[test]
    fn obj_records_are_one_based_with_crease_polylines() {
        let dir = tempfile::tempdir().unwrap();
        let mut mesh = SurfaceMesh::default();
        mesh.vertices = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        mesh.triangles = vec![[0, 1, 2]];
        mesh.crease_lines = vec![vec![[0.0, 0.0, -1.0], [0.0, 0.0, 1.0]]];
        let path = dir.path().join("m.obj");
        write_obj(&mesh, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("f 1 2 3"));
        assert!(text.contains("l 4 5"));
    }
}
