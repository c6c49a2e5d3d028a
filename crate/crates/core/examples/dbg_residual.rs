use translab_core::surfaces::*;
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let w = PI;
    for h_frac in [32.0, 64.0] {
        let t0 = Instant::now();
        let (u, rep) = construct_piece(&SurfaceKind::Pitchfork { w }, &PieceConfig::new(-12.0, 12.0, w / h_frac)).unwrap();
        let g = u.grid();
        let hy = g.hy;
        let fit = reaper_side_fit(&u, w, |x, y| x >= 6.0 && y >= hy && y <= w - hy);
        let ratio = min_slope_ratio(&u, |x, _| x <= -6.0);
        println!("pitchfork h=w/{h_frac}: conv={} drift={:?} reaper_d={:.4} plane_ratio={:.1} mid={:+.3} {:.0}s",
            rep.converged, rep.interior_drift.map(|d| format!("{d:.2e}")),
            fit.map(|f| f.0).unwrap_or(f64::NAN), ratio, u.get(g.nx/2, g.ny/2),
            t0.elapsed().as_secs_f64());
        println!("  drifts: {:?}", rep.stage_drifts.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>());
    }
}
