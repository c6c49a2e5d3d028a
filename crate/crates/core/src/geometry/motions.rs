use crate::surfaces::SurfaceMesh;

/// Rotation by θ about the vertical line through p_a: planar rotation of
/// (x − x_a, y − y_a), z unchanged.
#[inline]
pub fn rotate_point(p: [f64; 3], p_a: (f64, f64), theta: f64) -> [f64; 3] {
    if theta == 0.0 {
        return p;
    }
    let (s, c) = theta.sin_cos();
    let dx = p[0] - p_a.0;
    let dy = p[1] - p_a.1;
    [p_a.0 + c * dx - s * dy, p_a.1 + s * dx + c * dy, p[2]]
}

pub fn rotate_about(mesh: &SurfaceMesh, p_a: (f64, f64), theta: f64) -> SurfaceMesh {
    mesh.mapped(|p| rotate_point(p, p_a, theta))
}
