use klshell::benchmarks::ArcAnalytic;
use klshell::geometry::{Chart, CylinderChart, SurfaceFrame};
use klshell::mechanics::{self, MaterialParams};
use nalgebra::{Matrix3, Vector2, Vector3};
use std::f64::consts::PI;

fn main() {
    let arc = ArcAnalytic::standard();
    let chart = CylinderChart {
        radius: arc.radius,
        alpha0: 0.5 * (arc.theta + PI),
        span: arc.theta,
        y_min: 0.0,
        y_max: arc.length_y,
    };
    let mat = MaterialParams::new(arc.youngs, 0.0, arc.thickness);
    let h = 1e-5;

    for (su, sw) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let u_field = |x: &Vector3<f64>| -> Vector3<f64> {
            let phi = arc.phi_of_point(x);
            let (u, w) = arc.displacement(phi);
            let (t, r) = arc.local_axes(phi);
            su * u * t + sw * w * r
        };
        // Roller condition
        let alpha_roller = 0.5 * (arc.theta + PI) - arc.theta;
        let x_roller = arc.radius * Vector3::new(alpha_roller.cos(), 0.0, alpha_roller.sin());
        let uz_roller = u_field(&x_roller).z;
        // Midspan sag
        let alpha_mid = 0.5 * (arc.theta + PI) - arc.psi();
        let x_mid = arc.radius * Vector3::new(alpha_mid.cos(), 0.0, alpha_mid.sin());
        let uz_mid = u_field(&x_mid).z;
        // Kinematic consistency at phi = 0.7
        let phi = 0.7;
        let r0 = Vector2::new(phi, 0.5);
        let frame = SurfaceFrame::from_jet(&chart.jet(r0)).unwrap();
        let u_of = |rr: Vector2<f64>| u_field(&chart.jet(rr).x);
        let du_xi = (u_of(r0 + Vector2::new(h, 0.0)) - u_of(r0 - Vector2::new(h, 0.0))) / (2.0 * h);
        let du_eta = (u_of(r0 + Vector2::new(0.0, h)) - u_of(r0 - Vector2::new(0.0, h))) / (2.0 * h);
        let mut grad_u = Matrix3::zeros();
        for i in 0..3 {
            let g = frame.tangential_gradient(Vector2::new(du_xi[i], du_eta[i]));
            for l in 0..3 { grad_u[(i, l)] = g[l]; }
        }
        let eps = mechanics::membrane_strain(&frame, &grad_u);
        let nt = mechanics::stress(&mat, &eps, &frame).scale(mat.thickness);
        // signed in-plane tt-component rather than |eigenvalue|
        let (tv, _) = arc.local_axes(phi);
        let n_tt = (nt.matrix() * tv).dot(&tv);
        let (n_ex, _, m_ex) = arc.forces(phi);
        let n_eff = (n_ex - m_ex / arc.radius) / arc.length_y;

        // bending via FD of gradient
        let grad_of = |rr: Vector2<f64>, comp: usize| {
            let fr = SurfaceFrame::from_jet(&chart.jet(rr)).unwrap();
            let up = (u_of(rr + Vector2::new(h, 0.0)) - u_of(rr - Vector2::new(h, 0.0))) / (2.0 * h);
            let vp = (u_of(rr + Vector2::new(0.0, h)) - u_of(rr - Vector2::new(0.0, h))) / (2.0 * h);
            fr.tangential_gradient(Vector2::new(up[comp], vp[comp]))
        };
        let mut hess = [Matrix3::zeros(); 3];
        for comp in 0..3 {
            let gx = (grad_of(r0 + Vector2::new(h, 0.0), comp) - grad_of(r0 - Vector2::new(h, 0.0), comp)) / (2.0 * h);
            let ge = (grad_of(r0 + Vector2::new(0.0, h), comp) - grad_of(r0 - Vector2::new(0.0, h), comp)) / (2.0 * h);
            for l in 0..3 {
                let gr = frame.tangential_gradient(Vector2::new(gx[l], ge[l]));
                for a in 0..3 { hess[comp][(l, a)] = gr[a]; }
            }
        }
        let eps_b = mechanics::bending_strain_from_u(&frame, &hess);
        let m_t = mechanics::stress(&mat, &eps_b, &frame).scale(mat.thickness.powi(3) / 12.0);
        let m_tt = (m_t.matrix() * tv).dot(&tv);
        let m_expected = m_ex / arc.length_y;

        println!("su={su:+} sw={sw:+}: uz_roller={uz_roller:+.3e} uz_mid={uz_mid:+.3e} | n_tt={n_tt:+.5e} vs n_eff={n_eff:+.5e} | m_tt={m_tt:+.5e} vs M/L={m_expected:+.5e}");
    }
}
