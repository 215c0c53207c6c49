//! Lagrange bases on reference quads and lines, Gauss--Legendre quadrature,
//! isoparametric element geometry, and reference-coordinate recovery.
//!
//! Shape functions are classic interpolating Lagrange polynomials on
//! equispaced tensor-product nodes of `[-1,1]` and `[-1,1]^2`. Values together
//! with first, second, and third derivatives are provided; third derivatives
//! feed the curvature-gradient terms of the residual error measures.

use nalgebra::{Matrix2, Vector2, Vector3};

use crate::geometry::{GeometryJet, SurfaceFrame};
use crate::mesh::ShellMesh;
use crate::{Error, Result};

pub const MAX_ORDER: usize = 10;

/// Equispaced interpolation nodes of order `p` on `[-1, 1]`.
pub fn line_nodes(p: usize) -> Vec<f64> {
    assert!(p >= 1 && p <= MAX_ORDER, "order {p} out of range");
    (0..=p).map(|i| -1.0 + 2.0 * i as f64 / p as f64).collect()
}

/// Value and first three derivatives of all 1D Lagrange basis functions at `x`.
///
/// Each basis function is a product of linear factors; the derivatives are
/// accumulated with the Leibniz rule while multiplying the factors in.
pub fn lagrange_line(p: usize, x: f64) -> Vec<[f64; 4]> {
    let nodes = line_nodes(p);
    let mut out = Vec::with_capacity(p + 1);
    for i in 0..=p {
        let mut v = 1.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        let mut d3 = 0.0;
        for j in 0..=p {
            if j == i {
                continue;
            }
            let w = 1.0 / (nodes[i] - nodes[j]);
            let f = (x - nodes[j]) * w;
            d3 = d3 * f + 3.0 * d2 * w;
            d2 = d2 * f + 2.0 * d1 * w;
            d1 = d1 * f + v * w;
            v *= f;
        }
        out.push([v, d1, d2, d3]);
    }
    out
}

/// Evaluation of the full tensor-product quad basis at one reference point.
///
/// Node ordering is lexicographic, `idx = i + j * (p + 1)` with `i` along xi.
#[derive(Debug, Clone)]
pub struct QuadBasisEval {
    /// N_a
    pub value: Vec<f64>,
    /// [dN/dxi, dN/deta]
    pub grad: Vec<[f64; 2]>,
    /// [d2N/dxi2, d2N/dxideta, d2N/deta2]
    pub hess: Vec<[f64; 3]>,
    /// [d3/dxi3, d3/dxi2deta, d3/dxideta2, d3/deta3]
    pub third: Vec<[f64; 4]>,
}

/// Evaluates the order-`p` quad basis with derivatives at `r = (xi, eta)`.
pub fn lagrange_quad(p: usize, r: Vector2<f64>) -> QuadBasisEval {
    let lx = lagrange_line(p, r.x);
    let ly = lagrange_line(p, r.y);
    let n = (p + 1) * (p + 1);
    let mut value = Vec::with_capacity(n);
    let mut grad = Vec::with_capacity(n);
    let mut hess = Vec::with_capacity(n);
    let mut third = Vec::with_capacity(n);
    for j in 0..=p {
        for i in 0..=p {
            let a = lx[i];
            let b = ly[j];
            value.push(a[0] * b[0]);
            grad.push([a[1] * b[0], a[0] * b[1]]);
            hess.push([a[2] * b[0], a[1] * b[1], a[0] * b[2]]);
            third.push([
                a[3] * b[0],
                a[2] * b[1],
                a[1] * b[2],
                a[0] * b[3],
            ]);
        }
    }
    QuadBasisEval {
        value,
        grad,
        hess,
        third,
    }
}

/// Reference quad of order `p` with its tensor-product node layout.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub order: usize,
}

impl ReferenceElement {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1 && order <= MAX_ORDER);
        Self { order }
    }

    pub fn nodes_per_side(&self) -> usize {
        self.order + 1
    }

    pub fn node_count(&self) -> usize {
        (self.order + 1) * (self.order + 1)
    }

    /// Reference coordinates of node `idx` (lexicographic ordering).
    pub fn node_coords(&self, idx: usize) -> Vector2<f64> {
        let m = self.order + 1;
        let nodes = line_nodes(self.order);
        Vector2::new(nodes[idx % m], nodes[idx / m])
    }

    /// Local node slots of the four edges, traversed counterclockwise.
    ///
    /// Edge 0: eta = -1, xi rising; edge 1: xi = +1, eta rising;
    /// edge 2: eta = +1, xi falling; edge 3: xi = -1, eta falling.
    pub fn edge_nodes(&self, edge: usize) -> Vec<usize> {
        let p = self.order;
        let m = p + 1;
        match edge {
            0 => (0..m).collect(),
            1 => (0..m).map(|j| p + j * m).collect(),
            2 => (0..m).map(|i| (p - i) + p * m).collect(),
            3 => (0..m).map(|j| (p - j) * m).collect(),
            _ => panic!("edge index {edge} out of range"),
        }
    }

    /// Reference point on edge `edge` at edge parameter `rho` in `[-1, 1]`,
    /// together with the traversal direction `dr/drho`.
    pub fn edge_point(&self, edge: usize, rho: f64) -> (Vector2<f64>, Vector2<f64>) {
        match edge {
            0 => (Vector2::new(rho, -1.0), Vector2::new(1.0, 0.0)),
            1 => (Vector2::new(1.0, rho), Vector2::new(0.0, 1.0)),
            2 => (Vector2::new(-rho, 1.0), Vector2::new(-1.0, 0.0)),
            3 => (Vector2::new(-1.0, -rho), Vector2::new(0.0, -1.0)),
            _ => panic!("edge index {edge} out of range"),
        }
    }
}

/// Gauss--Legendre rule on `[-1, 1]` (tensorized for quads by the caller).
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `q`-point rule, exact for polynomials of degree `2q - 1`.
    pub fn new(q: usize) -> Self {
        assert!(q >= 1 && q <= 30, "quadrature order {q} out of range");
        let mut points = vec![0.0; q];
        let mut weights = vec![0.0; q];
        let n = q as f64;
        for k in 0..q {
            // Chebyshev-flavored initial guess, then Newton on P_q.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n + 0.5)).cos();
            for _ in 0..100 {
                let (pn, dpn) = legendre_with_derivative(q, x);
                let dx = pn / dpn;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dpn) = legendre_with_derivative(q, x);
            points[q - 1 - k] = x;
            weights[q - 1 - k] = 2.0 / ((1.0 - x * x) * dpn * dpn);
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Tensor-product points and weights over the reference quad.
    pub fn tensor(&self) -> Vec<(Vector2<f64>, f64)> {
        let mut out = Vec::with_capacity(self.len() * self.len());
        for (j, &y) in self.points.iter().enumerate() {
            for (i, &x) in self.points.iter().enumerate() {
                out.push((Vector2::new(x, y), self.weights[i] * self.weights[j]));
            }
        }
        out
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// How element geometry is evaluated: interpolated from the nodal coordinates
/// by the element's own shape functions, or delegated to the patch chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryMode {
    Isoparametric,
    ExactChart,
}

/// Geometry jet of element `el` at reference point `r` of `[-1,1]^2`.
///
/// In isoparametric mode all derivatives come from the shape functions and the
/// stored nodal coordinates; in exact mode the patch chart is evaluated at the
/// mapped patch coordinates (third derivatives then fall back to central
/// differences of the chart's second derivatives).
pub fn element_jet(
    mesh: &ShellMesh,
    el: usize,
    r: Vector2<f64>,
    mode: GeometryMode,
    with_third: bool,
) -> GeometryJet {
    match mode {
        GeometryMode::Isoparametric => {
            let eval = lagrange_quad(mesh.order, r);
            let conn = mesh.element_nodes(el);
            let mut x = Vector3::zeros();
            let mut dx = [Vector3::zeros(); 2];
            let mut d2x = [Vector3::zeros(); 3];
            let mut d3x = [Vector3::zeros(); 4];
            for (a, &node) in conn.iter().enumerate() {
                let xa = mesh.nodes[node];
                x += eval.value[a] * xa;
                dx[0] += eval.grad[a][0] * xa;
                dx[1] += eval.grad[a][1] * xa;
                d2x[0] += eval.hess[a][0] * xa;
                d2x[1] += eval.hess[a][1] * xa;
                d2x[2] += eval.hess[a][2] * xa;
                if with_third {
                    for k in 0..4 {
                        d3x[k] += eval.third[a][k] * xa;
                    }
                }
            }
            GeometryJet {
                x,
                dx,
                d2x,
                d3x: with_third.then_some(d3x),
            }
        }
        GeometryMode::ExactChart => {
            let (patch, pr) = mesh.patch_coords(el, r);
            let chart = &mesh.patches[patch].chart;
            let scale = mesh.element_ref_scale(el);
            let mut jet = chart.jet(pr);
            // Chain rule for the constant affine map r -> patch coords.
            jet.dx = [jet.dx[0] * scale.x, jet.dx[1] * scale.y];
            jet.d2x = [
                jet.d2x[0] * scale.x * scale.x,
                jet.d2x[1] * scale.x * scale.y,
                jet.d2x[2] * scale.y * scale.y,
            ];
            if with_third {
                let h = 1e-5;
                let d2 = |dr: Vector2<f64>| {
                    let jp = chart.jet(pr + dr * h);
                    let jm = chart.jet(pr - dr * h);
                    [
                        (jp.d2x[0] - jm.d2x[0]) / (2.0 * h),
                        (jp.d2x[1] - jm.d2x[1]) / (2.0 * h),
                        (jp.d2x[2] - jm.d2x[2]) / (2.0 * h),
                    ]
                };
                let dxi = d2(Vector2::new(1.0, 0.0));
                let deta = d2(Vector2::new(0.0, 1.0));
                let sx = scale.x;
                let sy = scale.y;
                jet.d3x = Some([
                    dxi[0] * sx * sx * sx,
                    dxi[1] * sx * sx * sy,
                    deta[1] * sx * sy * sy,
                    deta[2] * sy * sy * sy,
                ]);
            }
            jet
        }
    }
}

/// Frame of element `el` at reference point `r`.
pub fn element_frame(
    mesh: &ShellMesh,
    el: usize,
    r: Vector2<f64>,
    mode: GeometryMode,
) -> Result<SurfaceFrame> {
    let jet = element_jet(mesh, el, r, mode, false);
    SurfaceFrame::from_jet(&jet).map_err(|e| Error::Element {
        element: el,
        message: format!("{e}"),
    })
}

/// Recovers the reference coordinates of `x_target` on element `el` by Newton
/// iteration on the two-variable least-squares problem.
pub fn invert_map(
    mesh: &ShellMesh,
    el: usize,
    x_target: Vector3<f64>,
    mode: GeometryMode,
) -> Result<Vector2<f64>> {
    let mut r = Vector2::new(0.0, 0.0);
    for _ in 0..50 {
        let jet = element_jet(mesh, el, r, mode, false);
        let res = x_target - jet.x;
        let j = jet.jacobian();
        let jtj = j.transpose() * j;
        let rhs = j.transpose() * res;
        let det = jtj.determinant();
        if det.abs() < 1e-30 {
            return Err(Error::Probe(format!(
                "singular geometry Jacobian while locating point on element {el}"
            )));
        }
        let dr = jtj
            .try_inverse()
            .ok_or_else(|| Error::Probe("non-invertible normal matrix".into()))?
            * rhs;
        r += dr;
        // Keep the iterate near the element; probes may start slightly outside.
        r.x = r.x.clamp(-1.5, 1.5);
        r.y = r.y.clamp(-1.5, 1.5);
        if dr.norm() < 1e-12 {
            return Ok(r);
        }
    }
    Err(Error::Probe(format!(
        "no convergence locating {x_target:?} on element {el}"
    )))
}

/// Inverse of the 2x2 first fundamental form with a determinant guard.
pub fn invert_first_fundamental(g: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    let scale = g.norm();
    if det.abs() < 1e-14 * scale * scale {
        return Err(Error::Geometry(format!(
            "first fundamental form nearly singular (det = {det:.3e})"
        )));
    }
    Ok(Matrix2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]) / det)
}
