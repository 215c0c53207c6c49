//! Per-element blocks of the hybridized system: moment-moment compliance,
//! moment-displacement coupling (volume and edge terms), membrane stiffness,
//! moment-multiplier edge coupling with jump signs, and load vectors.
//!
//! Moment components are ordered (11, 22, 33, 12, 13, 23) per local node; the
//! shear bookkeeping uses the (1 - delta_ij/2) and (2 - delta_ij) prefactors
//! of the entry formulas, so no additional Voigt doubling is applied. The
//! compliance block closes the trace coupling with the projector (nu P_ij
//! P_kl), which agrees with nu delta_kl P_ij on in-plane tensors and keeps
//! the block symmetric for general ones.

use nalgebra::{DMatrix, DVector, Vector2, Vector3};

use crate::basis::{
    element_jet, lagrange_line, lagrange_quad, GaussRule, GeometryMode, ReferenceElement,
};
use crate::geometry::{boundary_frame, projector_derivatives, SurfaceFrame};
use crate::mechanics::{MaterialParams, SYM_PAIRS};
use crate::mesh::{BoundaryData, CornerKind, EdgeKind, ShellMesh};
use crate::{Error, Result};

/// Global numbering of the condensed unknowns: three displacement components
/// per mesh node, then p+1 multiplier values per skeleton edge. Moment
/// coefficients stay element-local and are never numbered globally.
#[derive(Debug, Clone)]
pub struct DofLayout {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub order: usize,
}

impl DofLayout {
    pub fn from_mesh(mesh: &ShellMesh) -> Self {
        DofLayout {
            n_nodes: mesh.n_nodes(),
            n_edges: mesh.edges.len(),
            order: mesh.order,
        }
    }

    pub fn u_dof(&self, node: usize, comp: usize) -> usize {
        3 * node + comp
    }

    pub fn n_u_dofs(&self) -> usize {
        3 * self.n_nodes
    }

    pub fn w_dof(&self, edge: usize, k: usize) -> usize {
        self.n_u_dofs() + edge * (self.order + 1) + k
    }

    pub fn n_w_dofs(&self) -> usize {
        (self.order + 1) * self.n_edges
    }

    /// Unknowns of the condensed global system.
    pub fn n_condensed(&self) -> usize {
        self.n_u_dofs() + self.n_w_dofs()
    }

    /// Unknowns of the uncondensed system (element-local moments included).
    pub fn n_uncondensed(&self, mesh: &ShellMesh) -> usize {
        let nl = (self.order + 1) * (self.order + 1);
        self.n_condensed() + 6 * nl * mesh.n_elements()
    }

    /// Condensed dof indices of one element, in local block order (u then w).
    pub fn element_dofs(&self, mesh: &ShellMesh, el: usize) -> Vec<usize> {
        let elem = &mesh.elements[el];
        let mut dofs = Vec::with_capacity(3 * elem.nodes.len() + 4 * (self.order + 1));
        for &node in &elem.nodes {
            for c in 0..3 {
                dofs.push(self.u_dof(node, c));
            }
        }
        for &edge in &elem.edges {
            for k in 0..=self.order {
                dofs.push(self.w_dof(edge, k));
            }
        }
        dofs
    }
}

/// The nonzero blocks of the element saddle system and its right-hand side.
///
/// `k_um` and `k_wm` are the transposes of `k_mu` and `k_mw`.
#[derive(Debug, Clone)]
pub struct ElementBlocks {
    pub k_mm: DMatrix<f64>,
    pub k_mu: DMatrix<f64>,
    pub k_mw: DMatrix<f64>,
    pub k_uu: DMatrix<f64>,
    pub b_u: DVector<f64>,
    pub b_w: DVector<f64>,
}

impl ElementBlocks {
    pub fn k_um(&self) -> DMatrix<f64> {
        self.k_mu.transpose()
    }

    pub fn k_wm(&self) -> DMatrix<f64> {
        self.k_mw.transpose()
    }
}

/// Element-block assembler over a fixed mesh, material, and quadrature.
pub struct Assembler<'a> {
    pub mesh: &'a ShellMesh,
    pub material: MaterialParams,
    pub mode: GeometryMode,
    /// Gauss points per direction (surface and line integrals).
    pub quad_points: usize,
    pub body_load: Vector3<f64>,
    pub boundary: Option<&'a BoundaryData>,
}

impl<'a> Assembler<'a> {
    pub fn new(mesh: &'a ShellMesh, material: MaterialParams) -> Self {
        Assembler {
            mesh,
            material,
            mode: GeometryMode::Isoparametric,
            quad_points: mesh.order + 2,
            body_load: Vector3::zeros(),
            boundary: None,
        }
    }

    pub fn with_mode(mut self, mode: GeometryMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_quad_points(mut self, q: usize) -> Self {
        self.quad_points = q;
        self
    }

    pub fn with_body_load(mut self, f: Vector3<f64>) -> Self {
        self.body_load = f;
        self
    }

    pub fn with_boundary(mut self, bd: &'a BoundaryData) -> Self {
        self.boundary = Some(bd);
        self
    }

    fn frame_at(&self, el: usize, r: Vector2<f64>) -> Result<SurfaceFrame> {
        let jet = element_jet(self.mesh, el, r, self.mode, false);
        SurfaceFrame::from_jet(&jet).map_err(|e| Error::Element {
            element: el,
            message: format!("{e}"),
        })
    }

    /// Evaluates every entry of the element stiffness blocks and load vectors
    /// by surface quadrature over the element and line quadrature over its
    /// four edges.
    pub fn element_blocks(&self, el: usize) -> Result<ElementBlocks> {
        let p = self.mesh.order;
        let nl = (p + 1) * (p + 1);
        let (nm, nu, nw) = (6 * nl, 3 * nl, 4 * (p + 1));
        let mat = &self.material;
        let (e_mod, nu_p, t) = (mat.youngs, mat.poisson, mat.thickness);
        let (mu, lambda) = (mat.mu(), mat.lambda());

        let mut k_mm = DMatrix::zeros(nm, nm);
        let mut k_mu = DMatrix::zeros(nm, nu);
        let mut k_mw = DMatrix::zeros(nm, nw);
        let mut k_uu = DMatrix::zeros(nu, nu);
        let mut b_u = DVector::zeros(nu);
        let mut b_w = DVector::zeros(nw);

        let rule = GaussRule::new(self.quad_points);
        let compliance = 24.0 / (e_mod * t * t * t);

        // Surface quadrature.
        for (r, w) in rule.tensor() {
            let frame = self.frame_at(el, r)?;
            let basis = lagrange_quad(p, r);
            let grads: Vec<Vector3<f64>> = basis
                .grad
                .iter()
                .map(|g| frame.tangential_gradient(Vector2::new(g[0], g[1])))
                .collect();
            let vals = &basis.value;
            let dj = w * frame.area_jacobian;
            let pr = &frame.projector;
            let h = &frame.weingarten;
            let n = &frame.normal;
            let dp = projector_derivatives(&frame);

            // Compliance coefficients per component pair.
            let mut coef = [[0.0; 6]; 6];
            for (ci, &(i, j)) in SYM_PAIRS.iter().enumerate() {
                let pref = if i == j { 0.5 } else { 1.0 };
                for (cj, &(k, l)) in SYM_PAIRS.iter().enumerate() {
                    let tracep = if k == l { 1.0 } else { 2.0 };
                    let diag = if ci == cj { 1.0 } else { 0.0 };
                    coef[ci][cj] = pref
                        * compliance
                        * (nu_p * tracep * pr[(k, l)] * pr[(i, j)] - (1.0 + nu_p) * diag);
                }
            }
            for a in 0..nl {
                for b in 0..nl {
                    let nn = vals[a] * vals[b] * dj;
                    for ci in 0..6 {
                        for cj in 0..6 {
                            k_mm[(6 * a + ci, 6 * b + cj)] += coef[ci][cj] * nn;
                        }
                    }
                }
            }

            // Membrane stiffness.
            for a in 0..nl {
                for b in 0..nl {
                    let gg = grads[a].dot(&grads[b]);
                    for i in 0..3 {
                        for j in 0..3 {
                            k_uu[(3 * a + i, 3 * b + j)] += t
                                * (mu * (pr[(i, j)] * gg + grads[a][j] * grads[b][i])
                                    + lambda * grads[a][i] * grads[b][j])
                                * dj;
                        }
                    }
                }
            }

            // Moment-displacement coupling, volume part. The projected
            // gradient products collapse because tangential gradients are
            // in-plane (P grad = grad); phi carries the projector-derivative
            // terms.
            let mut phi = [[0.0; 3]; 6];
            for (ci, &(i, j)) in SYM_PAIRS.iter().enumerate() {
                for l in 0..3 {
                    let mut s = 0.0;
                    for m in 0..3 {
                        s += pr[(i, m)] * dp[m][(j, l)]
                            + pr[(j, l)] * dp[m][(i, m)]
                            + pr[(j, m)] * dp[m][(i, l)]
                            + pr[(i, l)] * dp[m][(j, m)];
                    }
                    phi[ci][l] = s;
                }
            }
            for (ci, &(i, j)) in SYM_PAIRS.iter().enumerate() {
                let pref = if i == j { 0.5 } else { 1.0 };
                for b in 0..nl {
                    let gb = &grads[b];
                    let phi_b: f64 = (0..3).map(|l| gb[l] * phi[ci][l]).sum();
                    for a in 0..nl {
                        let na = vals[a];
                        for k in 0..3 {
                            let term_h = na * (gb[i] * h[(j, k)] + gb[j] * h[(i, k)]);
                            let term_g = n[k] * (grads[a][i] * gb[j] + grads[a][j] * gb[i]);
                            let term_p = n[k] * na * phi_b;
                            k_mu[(6 * a + ci, 3 * b + k)] +=
                                pref * (term_h + term_g + term_p) * dj;
                        }
                    }
                }
            }

            // Body load.
            for a in 0..nl {
                for k in 0..3 {
                    b_u[3 * a + k] += vals[a] * self.body_load[k] * dj;
                }
            }
        }

        // Edge quadrature: boundary-rotation coupling, multiplier coupling
        // with jump signs, and Neumann loads.
        let re = ReferenceElement::new(p);
        for le in 0..4 {
            let sign = f64::from(self.mesh.elements[el].edge_sign[le]);
            let edge_id = self.mesh.elements[el].edges[le];
            let kind = self.boundary.and_then(|bd| bd.edge_kinds[edge_id].clone());
            for (&rho, &wq) in rule.points.iter().zip(&rule.weights) {
                let (r, dr) = re.edge_point(le, rho);
                let frame = self.frame_at(el, r)?;
                let bf = boundary_frame(&frame, dr).map_err(|e| Error::Element {
                    element: el,
                    message: format!("{e}"),
                })?;
                let arc = (frame.jac * dr).norm();
                let ds = wq * arc;
                let basis = lagrange_quad(p, r);
                let grads: Vec<Vector3<f64>> = basis
                    .grad
                    .iter()
                    .map(|g| frame.tangential_gradient(Vector2::new(g[0], g[1])))
                    .collect();
                let vals = &basis.value;
                let (tv, qv, nv) = (bf.tangent, bf.conormal, bf.normal);
                let wvals = lagrange_line(p, sign * rho);

                for (ci, &(i, j)) in SYM_PAIRS.iter().enumerate() {
                    let pref = if i == j { 0.5 } else { 1.0 };
                    let tq = tv[i] * qv[j] + tv[j] * qv[i];
                    let qq = (2.0 - if i == j { 1.0 } else { 0.0 }) * qv[i] * qv[j];
                    for a in 0..nl {
                        let na = vals[a];
                        for b in 0..nl {
                            let dtb = tv.dot(&grads[b]);
                            for k in 0..3 {
                                k_mu[(6 * a + ci, 3 * b + k)] -=
                                    pref * na * nv[k] * tq * dtb * ds;
                            }
                        }
                        for (iw, wv) in wvals.iter().enumerate() {
                            k_mw[(6 * a + ci, le * (p + 1) + iw)] +=
                                sign * qq * na * wv[0] * ds;
                        }
                    }
                }

                if let Some(EdgeKind::Neumann { traction, moment }) = kind {
                    for b in 0..nl {
                        for k in 0..3 {
                            b_u[3 * b + k] += vals[b] * traction[k] * ds;
                        }
                    }
                    for (iw, wv) in wvals.iter().enumerate() {
                        b_w[le * (p + 1) + iw] += wv[0] * moment * ds;
                    }
                }
            }
        }

        Ok(ElementBlocks {
            k_mm,
            k_mu,
            k_mw,
            k_uu,
            b_u,
            b_w,
        })
    }
}

/// Neumann edge loads of a single boundary edge (shape-function weighted line
/// quadrature), returned as (b_u over the parent element, b_w over the edge).
pub fn neumann_loads(
    mesh: &ShellMesh,
    edge_id: usize,
    traction: Vector3<f64>,
    moment: f64,
    quad_points: usize,
    mode: GeometryMode,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let p = mesh.order;
    let nl = (p + 1) * (p + 1);
    let (el, le) = mesh.edges[edge_id].parent_plus;
    let re = ReferenceElement::new(p);
    let rule = GaussRule::new(quad_points);
    let mut b_u = DVector::zeros(3 * nl);
    let mut b_w = DVector::zeros(p + 1);
    for (&rho, &wq) in rule.points.iter().zip(&rule.weights) {
        let (r, dr) = re.edge_point(le, rho);
        let jet = element_jet(mesh, el, r, mode, false);
        let frame = SurfaceFrame::from_jet(&jet)?;
        let ds = wq * (frame.jac * dr).norm();
        let basis = lagrange_quad(p, r);
        for b in 0..nl {
            for k in 0..3 {
                b_u[3 * b + k] += basis.value[b] * traction[k] * ds;
            }
        }
        let wvals = lagrange_line(p, rho);
        for (iw, wv) in wvals.iter().enumerate() {
            b_w[iw] += wv[0] * moment * ds;
        }
    }
    Ok((b_u, b_w))
}

/// Concentrated corner forces: F_C n at each Neumann corner's displacement
/// dofs. Fails when a nonzero force sits on a corner whose adjacent segments
/// constrain the displacement.
pub fn corner_forces(
    mesh: &ShellMesh,
    boundary: &BoundaryData,
    mode: GeometryMode,
) -> Result<Vec<(usize, Vector3<f64>)>> {
    let re = ReferenceElement::new(mesh.order);
    let mut loads = Vec::new();
    for corner in &boundary.corners {
        let force = match corner.kind {
            CornerKind::Force(f) => f,
            CornerKind::Pinned => continue,
        };
        if force == 0.0 {
            continue;
        }
        for e in [corner.edge_in, corner.edge_out] {
            let kind = boundary.edge_kinds[e].as_ref().unwrap();
            if !kind.is_neumann_u() {
                return Err(Error::Spec(format!(
                    "corner force at node {} sits on a displacement-constrained segment",
                    corner.node
                )));
            }
        }
        let (el, _) = mesh.edges[corner.edge_out].parent_plus;
        let local = mesh.elements[el]
            .nodes
            .iter()
            .position(|&n| n == corner.node)
            .ok_or_else(|| Error::Mesh("corner node not on parent element".into()))?;
        let r = re.node_coords(local);
        let jet = element_jet(mesh, el, r, mode, false);
        let frame = SurfaceFrame::from_jet(&jet)?;
        loads.push((corner.node, force * frame.normal));
    }
    Ok(loads)
}
