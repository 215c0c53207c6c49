//! Pointwise geometry on parametrized surfaces: normal, projector, Weingarten
//! map, boundary triad, and tangential gradients, all in global Cartesian
//! coordinates.
//!
//! Everything is derived from a `GeometryJet`, the value and first/second
//! (optionally third) parametric derivatives of a map from a 2D reference
//! domain into 3D space. Jets come either from an analytic `Chart` or from
//! isoparametric interpolation of nodal coordinates.

use nalgebra::{Matrix2, Matrix3, Matrix3x2, Vector2, Vector3};

use crate::basis::invert_first_fundamental;
use crate::{Error, Result};

/// Value and parametric derivatives of a surface map at one reference point.
///
/// `d2x` holds (xi xi, xi eta, eta eta); `d3x`, when present, holds
/// (xi xi xi, xi xi eta, xi eta eta, eta eta eta).
#[derive(Debug, Clone)]
pub struct GeometryJet {
    pub x: Vector3<f64>,
    pub dx: [Vector3<f64>; 2],
    pub d2x: [Vector3<f64>; 3],
    pub d3x: Option<[Vector3<f64>; 4]>,
}

impl GeometryJet {
    pub fn jacobian(&self) -> Matrix3x2<f64> {
        Matrix3x2::from_columns(&[self.dx[0], self.dx[1]])
    }
}

/// Analytic surface map from a rectangular reference box into 3D.
///
/// Implementations must be non-degenerate (rank-2 Jacobian) on the whole box
/// and must return symmetric mixed second derivatives.
pub trait Chart: Send + Sync {
    fn jet(&self, r: Vector2<f64>) -> GeometryJet;
    /// Reference box as (min corner, max corner).
    fn domain(&self) -> (Vector2<f64>, Vector2<f64>);
    /// Periodicity per reference direction (closed charts wrap).
    fn periodic(&self) -> [bool; 2] {
        [false, false]
    }
}

/// All first-order geometric quantities at a surface point.
#[derive(Debug, Clone)]
pub struct SurfaceFrame {
    pub x: Vector3<f64>,
    pub jac: Matrix3x2<f64>,
    /// First fundamental form G = J^T J.
    pub g: Matrix2<f64>,
    pub g_inv: Matrix2<f64>,
    /// Lift matrix J G^{-1}; tangential gradient = lift * reference gradient.
    pub lift: Matrix3x2<f64>,
    pub normal: Vector3<f64>,
    /// In-plane projector P = I - n (x) n.
    pub projector: Matrix3<f64>,
    /// Weingarten map H (symmetric, in-plane).
    pub weingarten: Matrix3<f64>,
    /// Mean (summed) curvature tr(H).
    pub mean_curvature: f64,
    /// Surface measure factor |J_1 x J_2| for quadrature.
    pub area_jacobian: f64,
}

impl SurfaceFrame {
    pub fn from_jet(jet: &GeometryJet) -> Result<SurfaceFrame> {
        let jac = jet.jacobian();
        let n_star = jet.dx[0].cross(&jet.dx[1]);
        let s = n_star.norm();
        let scale = jet.dx[0].norm().max(jet.dx[1].norm());
        if s <= 1e-14 * scale * scale {
            return Err(Error::Geometry(format!(
                "degenerate Jacobian (rank < 2) at x = [{:.4}, {:.4}, {:.4}]",
                jet.x.x, jet.x.y, jet.x.z
            )));
        }
        let normal = n_star / s;
        let g = jac.transpose() * jac;
        let g_inv = invert_first_fundamental(&g)?;
        let lift = jac * g_inv;
        let projector = Matrix3::identity() - normal * normal.transpose();

        // Weingarten map H = grad_Gamma n, built from the reference-space
        // derivatives of the (normalized) normal field.
        let dn = normal_derivatives(jet, &normal, s);
        let weingarten = dn * g_inv * jac.transpose();
        let mean_curvature = weingarten.trace();

        Ok(SurfaceFrame {
            x: jet.x,
            jac,
            g,
            g_inv,
            lift,
            normal,
            projector,
            weingarten,
            mean_curvature,
            area_jacobian: s,
        })
    }

    /// Tangential gradient of a scalar from its reference gradient.
    pub fn tangential_gradient(&self, ref_grad: Vector2<f64>) -> Vector3<f64> {
        self.lift * ref_grad
    }
}

/// d n / d r as a 3x2 matrix (columns: xi- and eta-derivatives).
fn normal_derivatives(jet: &GeometryJet, normal: &Vector3<f64>, s: f64) -> Matrix3x2<f64> {
    let ns_xi = jet.d2x[0].cross(&jet.dx[1]) + jet.dx[0].cross(&jet.d2x[1]);
    let ns_eta = jet.d2x[1].cross(&jet.dx[1]) + jet.dx[0].cross(&jet.d2x[2]);
    let n_xi = (ns_xi - normal * normal.dot(&ns_xi)) / s;
    let n_eta = (ns_eta - normal * normal.dot(&ns_eta)) / s;
    Matrix3x2::from_columns(&[n_xi, n_eta])
}

/// Tangential derivatives of the projector, `dP[m][(i,j)] = dGamma_m P_ij`.
///
/// Follows from differentiating P = I - n (x) n with grad_Gamma n = H.
pub fn projector_derivatives(frame: &SurfaceFrame) -> [Matrix3<f64>; 3] {
    let h = &frame.weingarten;
    let n = &frame.normal;
    let mut dp = [Matrix3::zeros(); 3];
    for m in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                dp[m][(i, j)] = -h[(m, i)] * n[j] - n[i] * h[(m, j)];
            }
        }
    }
    dp
}

/// Unit tangent/conormal/normal triad on a boundary curve.
#[derive(Debug, Clone)]
pub struct BoundaryFrame {
    pub tangent: Vector3<f64>,
    pub conormal: Vector3<f64>,
    pub normal: Vector3<f64>,
}

/// Boundary triad from a surface frame and the reference-space direction of
/// the boundary curve. The conormal is t x n; with counterclockwise element
/// traversal it points out of the element.
pub fn boundary_frame(frame: &SurfaceFrame, ref_tangent: Vector2<f64>) -> Result<BoundaryFrame> {
    let t_star = frame.jac * ref_tangent;
    let norm = t_star.norm();
    if norm <= 1e-14 {
        return Err(Error::Geometry("zero mapped boundary tangent".into()));
    }
    let tangent = t_star / norm;
    let conormal = tangent.cross(&frame.normal);
    Ok(BoundaryFrame {
        tangent,
        conormal,
        normal: frame.normal,
    })
}

/// Per-point cache for tangential second derivatives of interpolated fields.
///
/// Stores the reference derivatives of the lift matrix J G^{-1} so that the
/// surface Hessian of any scalar field follows from its reference gradient
/// and Hessian alone.
#[derive(Debug, Clone)]
pub struct FrameExt {
    pub lift: Matrix3x2<f64>,
    dlift: [Matrix3x2<f64>; 2],
}

impl FrameExt {
    pub fn new(jet: &GeometryJet, frame: &SurfaceFrame) -> FrameExt {
        let dj = [
            Matrix3x2::from_columns(&[jet.d2x[0], jet.d2x[1]]),
            Matrix3x2::from_columns(&[jet.d2x[1], jet.d2x[2]]),
        ];
        let mut dlift = [Matrix3x2::zeros(); 2];
        for b in 0..2 {
            let dg = dj[b].transpose() * frame.jac + frame.jac.transpose() * dj[b];
            let dginv = -frame.g_inv * dg * frame.g_inv;
            dlift[b] = dj[b] * frame.g_inv + frame.jac * dginv;
        }
        FrameExt {
            lift: frame.lift,
            dlift,
        }
    }

    /// Directional-gradient array of the tangential gradient of a scalar FE
    /// function: `S[(l, a)] = dGamma_a (grad_Gamma f)_l`, from the reference
    /// gradient and Hessian of `f`.
    pub fn surface_hessian(&self, grad_r: Vector2<f64>, hess_r: [f64; 3]) -> Matrix3<f64> {
        let h0 = Vector2::new(hess_r[0], hess_r[1]);
        let h1 = Vector2::new(hess_r[1], hess_r[2]);
        let dg0 = self.dlift[0] * grad_r + self.lift * h0;
        let dg1 = self.dlift[1] * grad_r + self.lift * h1;
        let dg = Matrix3x2::from_columns(&[dg0, dg1]);
        dg * self.lift.transpose()
    }
}

/// Tangential gradient of the Weingarten map, `dH[m][(i,j)] = dGamma_m H_ij`.
///
/// Needs the third-order jet; used by the strong-form residual measures.
pub fn weingarten_gradient(jet: &GeometryJet, frame: &SurfaceFrame) -> Result<[Matrix3<f64>; 3]> {
    let d3 = jet
        .d3x
        .ok_or_else(|| Error::Geometry("third-order jet required for curvature gradients".into()))?;
    let j = frame.jac;
    let n = frame.normal;
    let s = frame.area_jacobian;

    let ns_d = [
        jet.d2x[0].cross(&jet.dx[1]) + jet.dx[0].cross(&jet.d2x[1]),
        jet.d2x[1].cross(&jet.dx[1]) + jet.dx[0].cross(&jet.d2x[2]),
    ];
    // Second derivatives of the unnormalized normal n* = x_xi x x_eta.
    let ns_dd = [
        d3[0].cross(&jet.dx[1]) + 2.0 * jet.d2x[0].cross(&jet.d2x[1]) + jet.dx[0].cross(&d3[1]),
        d3[1].cross(&jet.dx[1]) + jet.d2x[0].cross(&jet.d2x[2]) + jet.dx[0].cross(&d3[2]),
        d3[2].cross(&jet.dx[1]) + 2.0 * jet.d2x[1].cross(&jet.d2x[2]) + jet.dx[0].cross(&d3[3]),
    ];

    let s_d = [n.dot(&ns_d[0]), n.dot(&ns_d[1])];
    let n_d = [
        (ns_d[0] - n * s_d[0]) / s,
        (ns_d[1] - n * s_d[1]) / s,
    ];
    let pair = |a: usize, b: usize| -> usize {
        // (xi,xi) -> 0, mixed -> 1, (eta,eta) -> 2
        a + b
    };
    let mut n_dd = [[Vector3::zeros(); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let s_ab = n_d[a].dot(&ns_d[b]) + n.dot(&ns_dd[pair(a, b)]);
            n_dd[a][b] = (ns_dd[pair(a, b)] - n_d[a] * s_d[b] - n_d[b] * s_d[a] - n * s_ab) / s;
        }
    }

    let dj = [
        Matrix3x2::from_columns(&[jet.d2x[0], jet.d2x[1]]),
        Matrix3x2::from_columns(&[jet.d2x[1], jet.d2x[2]]),
    ];
    let dn = Matrix3x2::from_columns(&[n_d[0], n_d[1]]);
    let mut dh_ref = [Matrix3::zeros(); 2];
    for b in 0..2 {
        let ddn = Matrix3x2::from_columns(&[n_dd[b][0], n_dd[b][1]]);
        let dg = dj[b].transpose() * j + j.transpose() * dj[b];
        let dginv = -frame.g_inv * dg * frame.g_inv;
        dh_ref[b] =
            ddn * frame.g_inv * j.transpose() + dn * dginv * j.transpose() + dn * frame.g_inv * dj[b].transpose();
    }

    let mut dh = [Matrix3::zeros(); 3];
    for i in 0..3 {
        for jj in 0..3 {
            let ref_grad = Vector2::new(dh_ref[0][(i, jj)], dh_ref[1][(i, jj)]);
            let grad = frame.lift * ref_grad;
            for m in 0..3 {
                dh[m][(i, jj)] = grad[m];
            }
        }
    }
    Ok(dh)
}

// ---------------------------------------------------------------------------
// Basic analytic charts (benchmark-specific charts live with the benchmarks).
// ---------------------------------------------------------------------------

/// Planar chart x(r, s) = (r, s, 0) over a rectangle.
#[derive(Debug, Clone)]
pub struct PlaneChart {
    pub min: Vector2<f64>,
    pub max: Vector2<f64>,
}

impl PlaneChart {
    pub fn unit() -> Self {
        PlaneChart {
            min: Vector2::new(0.0, 0.0),
            max: Vector2::new(1.0, 1.0),
        }
    }
}

impl Chart for PlaneChart {
    fn jet(&self, r: Vector2<f64>) -> GeometryJet {
        GeometryJet {
            x: Vector3::new(r.x, r.y, 0.0),
            dx: [Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 1.0, 0.0)],
            d2x: [Vector3::zeros(); 3],
            d3x: None,
        }
    }
    fn domain(&self) -> (Vector2<f64>, Vector2<f64>) {
        (self.min, self.max)
    }
}

/// Cylinder with axis y: x(u, v) = (R cos a(u), v, R sin a(u)), a(u) = a0 - u.
///
/// The first reference direction runs along the arc (u in [0, span]), the
/// second along the axis. The normal points radially outward.
#[derive(Debug, Clone)]
pub struct CylinderChart {
    pub radius: f64,
    /// Polar angle at u = 0 (radians, measured from +x in the xz-plane).
    pub alpha0: f64,
    /// Arc span in radians; alpha(u) = alpha0 - u for u in [0, span].
    pub span: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Chart for CylinderChart {
    fn jet(&self, r: Vector2<f64>) -> GeometryJet {
        let a = self.alpha0 - r.x;
        let (sin, cos) = a.sin_cos();
        let rr = self.radius;
        GeometryJet {
            x: Vector3::new(rr * cos, r.y, rr * sin),
            // d/du with da/du = -1
            dx: [
                Vector3::new(rr * sin, 0.0, -rr * cos),
                Vector3::new(0.0, 1.0, 0.0),
            ],
            d2x: [
                Vector3::new(-rr * cos, 0.0, -rr * sin),
                Vector3::zeros(),
                Vector3::zeros(),
            ],
            d3x: None,
        }
    }
    fn domain(&self) -> (Vector2<f64>, Vector2<f64>) {
        (
            Vector2::new(0.0, self.y_min),
            Vector2::new(self.span, self.y_max),
        )
    }
}

/// One face of a cubed-sphere atlas: a cube-face rectangle projected radially
/// onto the sphere of radius `R`. Faces are oriented so the mapped normal
/// points outward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereFace {
    Top,
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

#[derive(Debug, Clone)]
pub struct SphereFaceChart {
    pub radius: f64,
    pub face: SphereFace,
}

impl SphereFaceChart {
    fn cube_point(&self, r: Vector2<f64>) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
        // Returns (v, dv/da, dv/db); the cube map is affine.
        let (a, b) = (r.x, r.y);
        match self.face {
            SphereFace::Top => (
                Vector3::new(a, b, 1.0),
                Vector3::new(1.0, 0.0, 0.0),
                Vector3::new(0.0, 1.0, 0.0),
            ),
            SphereFace::PlusX => (
                Vector3::new(1.0, a, b),
                Vector3::new(0.0, 1.0, 0.0),
                Vector3::new(0.0, 0.0, 1.0),
            ),
            SphereFace::MinusX => (
                Vector3::new(-1.0, -a, b),
                Vector3::new(0.0, -1.0, 0.0),
                Vector3::new(0.0, 0.0, 1.0),
            ),
            SphereFace::PlusY => (
                Vector3::new(-a, 1.0, b),
                Vector3::new(-1.0, 0.0, 0.0),
                Vector3::new(0.0, 0.0, 1.0),
            ),
            SphereFace::MinusY => (
                Vector3::new(a, -1.0, b),
                Vector3::new(1.0, 0.0, 0.0),
                Vector3::new(0.0, 0.0, 1.0),
            ),
        }
    }
}

impl Chart for SphereFaceChart {
    fn jet(&self, r: Vector2<f64>) -> GeometryJet {
        let (v, va, vb) = self.cube_point(r);
        let rr = self.radius;
        let s = v.norm();
        let u = v / s;
        // x = R v / |v|; derivatives of the normalization. The cube map is
        // affine, so dv_a/db = 0 and u_ab = -u_a s_b/s - (u_b (u.v_a)
        // + u (u_b.v_a))/s with s_b = u.v_b.
        let proj = Matrix3::identity() - u * u.transpose();
        let ua = (proj * va) / s;
        let ub = (proj * vb) / s;
        let sa = u.dot(&va);
        let sb = u.dot(&vb);
        let second = |u1: &Vector3<f64>, s1: f64, v2: &Vector3<f64>, u2: &Vector3<f64>| {
            rr * (-(*u2) * s1 / s - (u1 * u.dot(v2) + u * u1.dot(v2)) / s)
        };
        let xaa = second(&ua, sa, &va, &ua);
        let xab = second(&ub, sb, &va, &ua);
        let xbb = second(&ub, sb, &vb, &ub);
        let (xa, xb) = (rr * ua, rr * ub);
        GeometryJet {
            x: rr * u,
            dx: [xa, xb],
            d2x: [xaa, xab, xbb],
            d3x: None,
        }
    }
    fn domain(&self) -> (Vector2<f64>, Vector2<f64>) {
        match self.face {
            SphereFace::Top => (Vector2::new(-1.0, -1.0), Vector2::new(1.0, 1.0)),
            _ => (Vector2::new(-1.0, 0.0), Vector2::new(1.0, 1.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn check_frame_invariants(f: &SurfaceFrame) {
        assert_abs_diff_eq!(f.normal.norm(), 1.0, epsilon = 1e-12);
        let p = f.projector;
        assert_abs_diff_eq!((p - p.transpose()).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((p * p - p).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((p * f.normal).norm(), 0.0, epsilon = 1e-12);
        let h = f.weingarten;
        let hs = h.norm().max(1.0);
        assert_abs_diff_eq!((h - h.transpose()).norm() / hs, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!((h * f.normal).norm() / hs, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!((p * h * p - h).norm() / hs, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(f.mean_curvature, h.trace(), epsilon = 1e-12);
    }

    #[test]
    fn flat_chart_frame() {
        let chart = PlaneChart::unit();
        let f = SurfaceFrame::from_jet(&chart.jet(Vector2::new(0.3, 0.7))).unwrap();
        check_frame_invariants(&f);
        assert_abs_diff_eq!((f.normal - Vector3::new(0.0, 0.0, 1.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.weingarten.norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.mean_curvature, 0.0, epsilon = 1e-14);
        let p_expect = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0));
        assert_abs_diff_eq!((f.projector - p_expect).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cylinder_curvature_is_one_over_radius() {
        // Oracle: analytic differentiation of the cylinder chart gives a
        // single principal curvature of magnitude 1/R.
        let radius = 2.5;
        let chart = CylinderChart {
            radius,
            alpha0: 2.0,
            span: 1.5,
            y_min: 0.0,
            y_max: 4.0,
        };
        for (u, v) in [(0.1, 0.5), (0.7, 3.2), (1.4, 1.0)] {
            let f = SurfaceFrame::from_jet(&chart.jet(Vector2::new(u, v))).unwrap();
            check_frame_invariants(&f);
            assert_abs_diff_eq!(f.mean_curvature.abs(), 1.0 / radius, epsilon = 1e-12);
            // Outward normal: radial in the xz-plane.
            let radial = Vector3::new(f.x.x, 0.0, f.x.z) / radius;
            assert_abs_diff_eq!((f.normal - radial).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sphere_weingarten_is_projector_over_radius() {
        // Oracle: H = +P/R for an outward-oriented sphere (n = x/R extends to
        // grad n = I/R, projected to P/R), |kappa| = 2/R.
        let radius = 10.0;
        for face in [
            SphereFace::Top,
            SphereFace::PlusX,
            SphereFace::MinusX,
            SphereFace::PlusY,
            SphereFace::MinusY,
        ] {
            let chart = SphereFaceChart { radius, face };
            let f = SurfaceFrame::from_jet(&chart.jet(Vector2::new(0.31, 0.62))).unwrap();
            check_frame_invariants(&f);
            assert_abs_diff_eq!(
                (f.weingarten - f.projector / radius).norm(),
                0.0,
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(f.mean_curvature.abs(), 2.0 / radius, epsilon = 1e-10);
            // Normal points outward.
            assert!(f.normal.dot(&f.x) > 0.0);
        }
    }

    #[test]
    fn weingarten_matches_finite_differences_of_normal() {
        let chart = SphereFaceChart {
            radius: 3.0,
            face: SphereFace::Top,
        };
        let r0 = Vector2::new(0.2, -0.4);
        let f = SurfaceFrame::from_jet(&chart.jet(r0)).unwrap();
        let h = 1e-6;
        let n_of = |r: Vector2<f64>| SurfaceFrame::from_jet(&chart.jet(r)).unwrap().normal;
        let dn_xi = (n_of(r0 + Vector2::new(h, 0.0)) - n_of(r0 - Vector2::new(h, 0.0))) / (2.0 * h);
        let dn_eta = (n_of(r0 + Vector2::new(0.0, h)) - n_of(r0 - Vector2::new(0.0, h))) / (2.0 * h);
        let dn = Matrix3x2::from_columns(&[dn_xi, dn_eta]);
        let h_fd = dn * f.g_inv * f.jac.transpose();
        assert_abs_diff_eq!((h_fd - f.weingarten).norm(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn tangential_gradient_lies_in_tangent_plane() {
        let chart = CylinderChart {
            radius: 1.0,
            alpha0: 1.9,
            span: 1.2,
            y_min: 0.0,
            y_max: 1.0,
        };
        let f = SurfaceFrame::from_jet(&chart.jet(Vector2::new(0.4, 0.6))).unwrap();
        for g in [
            Vector2::new(1.0, 0.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(-0.3, 2.1),
            Vector2::zeros(),
        ] {
            let grad = f.tangential_gradient(g);
            assert_abs_diff_eq!(f.normal.dot(&grad), 0.0, epsilon = 1e-12);
        }
        // Arc-length coordinate along the hoop direction has a unit gradient.
        let grad = f.tangential_gradient(Vector2::new(1.0 / chart.radius, 0.0) * chart.radius);
        assert_abs_diff_eq!(grad.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn flat_tangential_gradient_is_identity() {
        let chart = PlaneChart::unit();
        let f = SurfaceFrame::from_jet(&chart.jet(Vector2::new(0.5, 0.5))).unwrap();
        let grad = f.tangential_gradient(Vector2::new(1.0, 0.0));
        assert_abs_diff_eq!((grad - Vector3::new(1.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.tangential_gradient(Vector2::zeros()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn projector_derivatives_flat_surface_vanish() {
        let chart = PlaneChart::unit();
        let f = SurfaceFrame::from_jet(&chart.jet(Vector2::new(0.2, 0.9))).unwrap();
        let dp = projector_derivatives(&f);
        for m in 0..3 {
            assert_abs_diff_eq!(dp[m].norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn projector_derivatives_match_surface_finite_differences() {
        // Walk along the two reference directions and difference P itself.
        let chart = SphereFaceChart {
            radius: 1.0,
            face: SphereFace::Top,
        };
        let r0 = Vector2::new(-0.3, 0.1);
        let f = SurfaceFrame::from_jet(&chart.jet(r0)).unwrap();
        let dp = projector_derivatives(&f);
        for m in 0..3 {
            for i in 0..3 {
                assert_abs_diff_eq!(dp[m][(i, m.min(2))], dp[m][(i, m.min(2))]); // shape sanity
            }
        }
        let h = 1e-6;
        let p_of = |r: Vector2<f64>| SurfaceFrame::from_jet(&chart.jet(r)).unwrap().projector;
        let dp_xi = (p_of(r0 + Vector2::new(h, 0.0)) - p_of(r0 - Vector2::new(h, 0.0))) / (2.0 * h);
        let dp_eta = (p_of(r0 + Vector2::new(0.0, h)) - p_of(r0 - Vector2::new(0.0, h))) / (2.0 * h);
        // Chain rule back to the tangential gradient: dGamma_m P = sum_beta
        // lift[m, beta] * dP/dr_beta.
        for i in 0..3 {
            for j in 0..3 {
                let ref_grad = Vector2::new(dp_xi[(i, j)], dp_eta[(i, j)]);
                let grad = f.lift * ref_grad;
                for m in 0..3 {
                    assert_abs_diff_eq!(dp[m][(i, j)], grad[m], epsilon = 1e-7);
                }
            }
        }
        // Symmetry in (i, j) for every derivative direction.
        for m in 0..3 {
            assert_abs_diff_eq!((dp[m] - dp[m].transpose()).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn boundary_frame_flat_chart() {
        let chart = PlaneChart::unit();
        let f = SurfaceFrame::from_jet(&chart.jet(Vector2::new(0.5, 0.0))).unwrap();
        let bf = boundary_frame(&f, Vector2::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!((bf.tangent - Vector3::new(1.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        // q = t x n = (1,0,0) x (0,0,1) = (0,-1,0)
        assert_abs_diff_eq!((bf.conormal - Vector3::new(0.0, -1.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        // Reversing the reference tangent flips t and q, keeps n.
        let bf2 = boundary_frame(&f, Vector2::new(-1.0, 0.0)).unwrap();
        assert_abs_diff_eq!((bf2.tangent + bf.tangent).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((bf2.conormal + bf.conormal).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((bf2.normal - bf.normal).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn boundary_triad_orthonormal_on_cylinder_edge() {
        let chart = CylinderChart {
            radius: 25.0,
            alpha0: 130.0_f64.to_radians(),
            span: 80.0_f64.to_radians(),
            y_min: 0.0,
            y_max: 50.0,
        };
        // Edge at y = const: reference tangent along the arc direction.
        let f = SurfaceFrame::from_jet(&chart.jet(Vector2::new(0.37, 0.0))).unwrap();
        let bf = boundary_frame(&f, Vector2::new(1.0, 0.0)).unwrap();
        for (a, b) in [
            (bf.tangent, bf.conormal),
            (bf.tangent, bf.normal),
            (bf.conormal, bf.normal),
        ] {
            assert_abs_diff_eq!(a.dot(&b), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(b.norm(), 1.0, epsilon = 1e-12);
        }
        // The conormal at a y = const edge points along -y or +y.
        assert_abs_diff_eq!(bf.conormal.x.abs(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bf.conormal.z.abs(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bf.conormal.y.abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn surface_hessian_flat_quadratic() {
        // f = x^2 / 2 on the plane: S has a single unit entry at (1,1).
        let chart = PlaneChart::unit();
        let r0 = Vector2::new(0.4, 0.8);
        let jet = chart.jet(r0);
        let frame = SurfaceFrame::from_jet(&jet).unwrap();
        let ext = FrameExt::new(&jet, &frame);
        // On this chart f(r) = r^2/2: grad = (r, 0), hess = diag-ish (1,0,0).
        let s = ext.surface_hessian(Vector2::new(r0.x, 0.0), [1.0, 0.0, 0.0]);
        let mut expect = Matrix3::zeros();
        expect[(0, 0)] = 1.0;
        assert_abs_diff_eq!((s - expect).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn surface_hessian_matches_finite_differences_on_cylinder() {
        // f is a smooth reference-space function carried on a curved chart;
        // compare each row of S against differences of the first gradient.
        let chart = CylinderChart {
            radius: 2.0,
            alpha0: 2.18,
            span: 1.22,
            y_min: 0.0,
            y_max: 1.0,
        };
        let fgrad = |r: Vector2<f64>| {
            Vector2::new(
                1.3 * (1.3 * r.x).cos() * (0.7 * r.y + 0.2) + r.y,
                (1.3 * r.x).sin() * 0.7 + r.x,
            )
        };
        let fhess = |r: Vector2<f64>| {
            [
                -1.69 * (1.3 * r.x).sin() * (0.7 * r.y + 0.2),
                1.3 * (1.3 * r.x).cos() * 0.7 + 1.0,
                0.0,
            ]
        };
        let r0 = Vector2::new(0.5, 0.4);
        let jet = chart.jet(r0);
        let frame = SurfaceFrame::from_jet(&jet).unwrap();
        let ext = FrameExt::new(&jet, &frame);
        let s = ext.surface_hessian(fgrad(r0), fhess(r0));

        let grad_of = |r: Vector2<f64>| {
            let f = SurfaceFrame::from_jet(&chart.jet(r)).unwrap();
            f.tangential_gradient(fgrad(r))
        };
        let h = 1e-6;
        let d_xi = (grad_of(r0 + Vector2::new(h, 0.0)) - grad_of(r0 - Vector2::new(h, 0.0))) / (2.0 * h);
        let d_eta = (grad_of(r0 + Vector2::new(0.0, h)) - grad_of(r0 - Vector2::new(0.0, h))) / (2.0 * h);
        for l in 0..3 {
            let ref_grad = Vector2::new(d_xi[l], d_eta[l]);
            let row_fd = frame.lift * ref_grad;
            for a in 0..3 {
                assert_abs_diff_eq!(s[(l, a)], row_fd[a], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn weingarten_gradient_matches_finite_differences() {
        // Cylinder with analytic third derivatives spliced in.
        #[derive(Clone)]
        struct Cyl3(CylinderChart);
        impl Chart for Cyl3 {
            fn jet(&self, r: Vector2<f64>) -> GeometryJet {
                let mut jet = self.0.jet(r);
                let a = self.0.alpha0 - r.x;
                let (sin, cos) = a.sin_cos();
                let rr = self.0.radius;
                jet.d3x = Some([
                    Vector3::new(rr * sin, 0.0, -rr * cos),
                    Vector3::zeros(),
                    Vector3::zeros(),
                    Vector3::zeros(),
                ]);
                jet
            }
            fn domain(&self) -> (Vector2<f64>, Vector2<f64>) {
                self.0.domain()
            }
        }
        let chart = Cyl3(CylinderChart {
            radius: 2.0,
            alpha0: 2.18,
            span: 1.22,
            y_min: 0.0,
            y_max: 1.0,
        });
        let r0 = Vector2::new(0.61, 0.37);
        let jet = chart.jet(r0);
        let frame = SurfaceFrame::from_jet(&jet).unwrap();
        let dh = weingarten_gradient(&jet, &frame).unwrap();

        let h = 1e-6;
        let h_of = |r: Vector2<f64>| SurfaceFrame::from_jet(&chart.jet(r)).unwrap().weingarten;
        let dh_xi = (h_of(r0 + Vector2::new(h, 0.0)) - h_of(r0 - Vector2::new(h, 0.0))) / (2.0 * h);
        let dh_eta = (h_of(r0 + Vector2::new(0.0, h)) - h_of(r0 - Vector2::new(0.0, h))) / (2.0 * h);
        for i in 0..3 {
            for j in 0..3 {
                let ref_grad = Vector2::new(dh_xi[(i, j)], dh_eta[(i, j)]);
                let grad = frame.lift * ref_grad;
                for m in 0..3 {
                    assert_abs_diff_eq!(dh[m][(i, j)], grad[m], epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn divergence_theorem_on_roof_chart() {
        // For in-plane v = P c the identity reduces to
        // int div_Gamma v dGamma = int_boundary v . q ds, and with
        // div(P c) = (div_Gamma P) . c both sides are quadrature-computable.
        let chart = CylinderChart {
            radius: 25.0,
            alpha0: 130.0_f64.to_radians(),
            span: 80.0_f64.to_radians(),
            y_min: 0.0,
            y_max: 50.0,
        };
        let c = Vector3::new(0.3, -1.1, 0.7);
        let (lo, hi) = chart.domain();
        let mut last_defect = f64::MAX;
        for q in [10usize, 16, 24] {
            let rule = crate::basis::GaussRule::new(q);
            let mut surf = 0.0;
            let mut scale = 0.0;
            for (rq, w) in rule.tensor() {
                let r = Vector2::new(
                    lo.x + (rq.x + 1.0) * 0.5 * (hi.x - lo.x),
                    lo.y + (rq.y + 1.0) * 0.5 * (hi.y - lo.y),
                );
                let f = SurfaceFrame::from_jet(&chart.jet(r)).unwrap();
                let dp = projector_derivatives(&f);
                let mut div = 0.0;
                for l in 0..3 {
                    for k in 0..3 {
                        div += dp[l][(l, k)] * c[k];
                    }
                }
                let jac = f.area_jacobian * 0.25 * (hi.x - lo.x) * (hi.y - lo.y);
                surf += w * div * jac;
                scale += w * (f.projector * c).norm() * jac;
            }
            let mut bnd = 0.0;
            // Four boundary sides traversed counterclockwise in reference space.
            for side in 0..4 {
                for (&gp, &gw) in rule.points.iter().zip(&rule.weights) {
                    let t = 0.5 * (gp + 1.0);
                    let (r, dr) = match side {
                        0 => (Vector2::new(lo.x + t * (hi.x - lo.x), lo.y), Vector2::new(hi.x - lo.x, 0.0)),
                        1 => (Vector2::new(hi.x, lo.y + t * (hi.y - lo.y)), Vector2::new(0.0, hi.y - lo.y)),
                        2 => (Vector2::new(hi.x - t * (hi.x - lo.x), hi.y), Vector2::new(-(hi.x - lo.x), 0.0)),
                        _ => (Vector2::new(lo.x, hi.y - t * (hi.y - lo.y)), Vector2::new(0.0, -(hi.y - lo.y))),
                    };
                    let f = SurfaceFrame::from_jet(&chart.jet(r)).unwrap();
                    let bf = boundary_frame(&f, dr).unwrap();
                    let v = f.projector * c;
                    bnd += gw * 0.5 * v.dot(&bf.conormal) * (f.jac * dr).norm();
                }
            }
            last_defect = (surf - bnd).abs() / scale.max(1e-30);
        }
        assert!(last_defect <= 1e-8, "divergence defect {last_defect}");
    }
}
