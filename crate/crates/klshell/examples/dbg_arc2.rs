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

    // candidate direction fields, as functions of phi
    let dir = |which: usize, phi: f64| -> Vector3<f64> {
        let alpha = 0.5 * (arc.theta + PI) - phi;
        match which {
            0 => Vector3::new(alpha.sin(), 0.0, -alpha.cos()), // tangent (+phi)
            1 => Vector3::new(alpha.cos(), 0.0, alpha.sin()),  // radial out
            2 => Vector3::new(1.0, 0.0, 0.0),                  // global x
            _ => Vector3::new(0.0, 0.0, 1.0),                  // global z
        }
    };
    let names = ["tan", "rad", "gx", "gz"];

    for flip_phi in [false, true] {
        for du in 0..4usize {
            for dw in 0..4usize {
                if du == dw { continue; }
                for su in [1.0, -1.0] {
                    for sw in [1.0, -1.0] {
                        let u_field = |x: &Vector3<f64>| -> Vector3<f64> {
                            let mut phi = arc.phi_of_point(x);
                            if flip_phi { phi = arc.theta - phi; }
                            let (u, w) = arc.displacement(phi);
                            let phys_phi = arc.phi_of_point(x);
                            su * u * dir(du, phys_phi) + sw * w * dir(dw, phys_phi)
                        };
                        // conditions
                        let alpha_r = 0.5 * (arc.theta + PI) - arc.theta;
                        let x_roller = arc.radius * Vector3::new(alpha_r.cos(), 0.0, alpha_r.sin());
                        let uz_roller = u_field(&x_roller).z;
                        let alpha_n = 0.5 * (arc.theta + PI);
                        let x_navier = arc.radius * Vector3::new(alpha_n.cos(), 0.0, alpha_n.sin());
                        let u_navier = u_field(&x_navier).norm();
                        let alpha_m = 0.5 * (arc.theta + PI) - arc.psi();
                        let x_mid = arc.radius * Vector3::new(alpha_m.cos(), 0.0, alpha_m.sin());
                        let uz_mid = u_field(&x_mid).z;

                        let phi0 = 0.7;
                        let r0 = Vector2::new(phi0, 0.5);
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
                        let tv = dir(0, phi0);
                        let n_tt = (nt.matrix() * tv).dot(&tv);
                        let (n_ex, _, m_ex) = arc.forces(phi0);
                        let n_eff = (n_ex - m_ex / arc.radius) / arc.length_y;

                        let ok_r = uz_roller.abs() < 1e-8;
                        let ok_nav = u_navier < 1e-8;
                        let ok_n = (n_tt - n_eff).abs() < 2e-2 * n_eff.abs().max(1e-6);
                        if ok_r && ok_nav && ok_n {
                            println!("CANDIDATE flip={flip_phi} u->{} w->{} su={su:+} sw={sw:+}: uz_mid={uz_mid:+.3e} n_tt={n_tt:+.5e} vs {n_eff:+.5e}",
                                names[du], names[dw]);
                        }
                    }
                }
            }
        }
    }
    println!("search done");
}
