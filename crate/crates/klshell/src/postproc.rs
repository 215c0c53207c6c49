//! Error measures, solution-field evaluation, reference-point probes, and
//! derived quantities (physical normal forces, transverse shear, moment
//! eigenvalues).
//!
//! The strong-form residuals need tangential second derivatives of the
//! interpolated fields and first derivatives of the curvature tensors; both
//! are evaluated through the reference-space chain rule, never by surface
//! finite differencing.

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::assembly::DofLayout;
use crate::basis::{
    element_jet, invert_map, lagrange_quad, GaussRule, GeometryMode, ReferenceElement,
};
use crate::geometry::{
    boundary_frame, projector_derivatives, weingarten_gradient, BoundaryFrame, FrameExt,
    SurfaceFrame,
};
use crate::mechanics::{
    bending_energy_twice, bending_strain_from_m, bending_strain_from_u, effective_boundary_force,
    membrane_strain, physical_normal_force, stress, MaterialParams, SymSurfTensor, SYM_PAIRS,
};
use crate::mesh::{BoundaryData, EdgeKind, ShellMesh};
use crate::solver::SolutionFields;
use crate::{Error, Result};

/// Row/column of the symmetric component holding matrix entry (i, j).
fn pair_index(i: usize, j: usize) -> usize {
    SYM_PAIRS
        .iter()
        .position(|&(a, b)| (a, b) == (i.min(j), i.max(j)))
        .unwrap()
}

/// How much differential structure a sampled point carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SampleDepth {
    /// Values and first tangential derivatives.
    Gradient,
    /// Plus tangential second derivatives and curvature gradients.
    Residual,
}

/// All solution-dependent quantities at one quadrature point.
pub struct PointState {
    pub frame: SurfaceFrame,
    pub u: Vector3<f64>,
    /// Directional gradient, (i, l) = dGamma_l u_i.
    pub grad_u: Matrix3<f64>,
    pub m: SymSurfTensor,
    /// Tangential gradient of each moment component.
    pub grad_m: [Vector3<f64>; 6],
    /// Surface Hessians S[(l, a)] = dGamma_a (grad f)_l of u components.
    pub hess_u: Option<[Matrix3<f64>; 3]>,
    /// Surface Hessians of the moment components.
    pub hess_m: Option<[Matrix3<f64>; 6]>,
    /// Tangential gradient of the Weingarten map.
    pub dh: Option<[Matrix3<f64>; 3]>,
}

impl PointState {
    pub fn membrane_strain(&self) -> SymSurfTensor {
        membrane_strain(&self.frame, &self.grad_u)
    }

    pub fn n_tilde(&self, mat: &MaterialParams) -> SymSurfTensor {
        stress(mat, &self.membrane_strain(), &self.frame).scale(mat.thickness)
    }

    pub fn n_real(&self, mat: &MaterialParams) -> Matrix3<f64> {
        physical_normal_force(&self.n_tilde(mat), &self.m, &self.frame)
    }

    /// Row-wise tangential divergence of the moment tensor field.
    pub fn div_m(&self) -> Vector3<f64> {
        let mut out = Vector3::zeros();
        for a in 0..3 {
            for l in 0..3 {
                out[a] += self.grad_m[pair_index(a, l)][l];
            }
        }
        out
    }

    /// Transverse shear force vector q = P div m.
    pub fn shear_vector(&self) -> Vector3<f64> {
        self.frame.projector * self.div_m()
    }

    pub fn bending_strain_u(&self) -> SymSurfTensor {
        bending_strain_from_u(&self.frame, self.hess_u.as_ref().expect("residual depth"))
    }

    /// Constitutive residual -eps_B(m) + eps_B(u).
    pub fn residual_one(&self, mat: &MaterialParams) -> SymSurfTensor {
        let from_m = bending_strain_from_m(mat, &self.m, &self.frame);
        self.bending_strain_u().add(&from_m.scale(-1.0))
    }

    /// Equilibrium residual div n_real + n div(P div m) + H div m + f.
    pub fn residual_two(&self, mat: &MaterialParams, body_load: Vector3<f64>) -> Vector3<f64> {
        let hess_m = self.hess_m.as_ref().expect("residual depth");
        let hess_u = self.hess_u.as_ref().expect("residual depth");
        let dh = self.dh.as_ref().expect("residual depth");
        let frame = &self.frame;
        let p = &frame.projector;
        let h = &frame.weingarten;
        let dp = projector_derivatives(frame);
        let mm = self.m.matrix();
        let div_m = self.div_m();

        // dGamma_a (div m)_b = sum_l S_{m_bl}[(l, a)].
        let grad_div_m =
            |b: usize, a: usize| -> f64 { (0..3).map(|l| hess_m[pair_index(b, l)][(l, a)]).sum() };

        // div(P div m), a scalar times the normal in the residual.
        let mut div_p_div_m = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                div_p_div_m += dp[a][(a, b)] * div_m[b] + p[(a, b)] * grad_div_m(b, a);
            }
        }

        // div(H m)_a = sum_{k,l} dH_l[(a,k)] m_kl + (H div m)_a.
        let mut div_hm = h * div_m;
        for a in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    div_hm[a] += dh[l][(a, k)] * mm[(k, l)];
                }
            }
        }

        // div(n_tilde(u)): derivative of t (2 mu eps + lambda tr(eps) P).
        let (mu, lambda, t) = (mat.mu(), mat.lambda(), mat.thickness);
        let g = &self.grad_u;
        let sym_g = g + g.transpose();
        let tau = (p * g).trace();
        // dGamma_m G_{il} = S_{u_i}[(l, m)].
        let dgrad = |i: usize, l: usize, m: usize| hess_u[i][(l, m)];
        let mut div_nt = Vector3::zeros();
        for a in 0..3 {
            let mut acc = 0.0;
            for l in 0..3 {
                // dGamma_l eps_{al}
                let mut deps = 0.0;
                for r in 0..3 {
                    for s in 0..3 {
                        let sym_rs = sym_g[(r, s)];
                        let dsym_rs = dgrad(r, s, l) + dgrad(s, r, l);
                        deps += 0.5
                            * (dp[l][(a, r)] * sym_rs * p[(s, l)]
                                + p[(a, r)] * dsym_rs * p[(s, l)]
                                + p[(a, r)] * sym_rs * dp[l][(s, l)]);
                    }
                }
                // dGamma_l tau
                let mut dtau = 0.0;
                for x in 0..3 {
                    for y in 0..3 {
                        dtau += dp[l][(x, y)] * g[(y, x)] + p[(x, y)] * dgrad(y, x, l);
                    }
                }
                acc += 2.0 * mu * deps + lambda * (p[(a, l)] * dtau + tau * dp[l][(a, l)]);
            }
            div_nt[a] = t * acc;
        }

        div_nt + div_hm + div_p_div_m * frame.normal + h * div_m + body_load
    }
}

/// Samples the discrete solution fields on elements and edges.
pub struct Evaluator<'a> {
    pub mesh: &'a ShellMesh,
    pub layout: &'a DofLayout,
    pub solution: &'a SolutionFields,
    pub material: MaterialParams,
    pub mode: GeometryMode,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        mesh: &'a ShellMesh,
        layout: &'a DofLayout,
        solution: &'a SolutionFields,
        material: MaterialParams,
        mode: GeometryMode,
    ) -> Self {
        Evaluator {
            mesh,
            layout,
            solution,
            material,
            mode,
        }
    }

    pub fn state(&self, el: usize, r: Vector2<f64>, depth: SampleDepth) -> Result<PointState> {
        let with_third = depth >= SampleDepth::Residual;
        let jet = element_jet(self.mesh, el, r, self.mode, with_third);
        let frame = SurfaceFrame::from_jet(&jet)?;
        let basis = lagrange_quad(self.mesh.order, r);
        let conn = self.mesh.element_nodes(el);
        let nl = conn.len();
        let mcoef = &self.solution.moments[el];

        let mut u = Vector3::zeros();
        let mut grad_u = Matrix3::zeros();
        let mut m = [0.0; 6];
        let mut grad_m = [Vector3::zeros(); 6];
        for a in 0..nl {
            let ua = self.solution.u[conn[a]];
            let grad = frame.tangential_gradient(Vector2::new(basis.grad[a][0], basis.grad[a][1]));
            u += basis.value[a] * ua;
            for i in 0..3 {
                for l in 0..3 {
                    grad_u[(i, l)] += ua[i] * grad[l];
                }
            }
            for c in 0..6 {
                let v = mcoef[6 * a + c];
                m[c] += basis.value[a] * v;
                grad_m[c] += v * grad;
            }
        }

        let (hess_u, hess_m, dh) = if with_third {
            let ext = FrameExt::new(&jet, &frame);
            let mut hu = [Matrix3::zeros(); 3];
            let mut hm = [Matrix3::zeros(); 6];
            for a in 0..nl {
                let gr = Vector2::new(basis.grad[a][0], basis.grad[a][1]);
                let s = ext.surface_hessian(gr, basis.hess[a]);
                let ua = self.solution.u[conn[a]];
                for i in 0..3 {
                    hu[i] += ua[i] * s;
                }
                for c in 0..6 {
                    hm[c] += mcoef[6 * a + c] * s;
                }
            }
            let dh = weingarten_gradient(&jet, &frame)?;
            (Some(hu), Some(hm), Some(dh))
        } else {
            (None, None, None)
        };

        Ok(PointState {
            frame,
            u,
            grad_u,
            m: SymSurfTensor::from_components(m),
            grad_m,
            hess_u,
            hess_m,
            dh,
        })
    }

    /// Integrates `f` over the discrete surface.
    pub fn integrate(
        &self,
        q: usize,
        depth: SampleDepth,
        mut f: impl FnMut(&PointState) -> f64,
    ) -> Result<f64> {
        let rule = GaussRule::new(q);
        let mut total = 0.0;
        for el in 0..self.mesh.n_elements() {
            for (r, w) in rule.tensor() {
                let st = self.state(el, r, depth)?;
                total += w * st.frame.area_jacobian * f(&st);
            }
        }
        Ok(total)
    }
}

/// Error value and whether it fell back to an absolute norm (vanishing
/// reference).
#[derive(Debug, Clone, Copy)]
pub struct L2Error {
    pub value: f64,
    pub absolute: bool,
}

/// Generic relative L2 error from pointwise squared error and reference
/// densities.
pub fn l2_error(
    eval: &Evaluator,
    q: usize,
    depth: SampleDepth,
    mut f: impl FnMut(&PointState) -> (f64, f64),
) -> Result<L2Error> {
    let rule = GaussRule::new(q);
    let mut num = 0.0;
    let mut den = 0.0;
    for el in 0..eval.mesh.n_elements() {
        for (r, w) in rule.tensor() {
            let st = eval.state(el, r, depth)?;
            let (e2, r2) = f(&st);
            num += w * st.frame.area_jacobian * e2;
            den += w * st.frame.area_jacobian * r2;
        }
    }
    if den <= 1e-300 {
        Ok(L2Error {
            value: num.sqrt(),
            absolute: true,
        })
    } else {
        Ok(L2Error {
            value: (num / den).sqrt(),
            absolute: false,
        })
    }
}

/// Constitutive residual error, element-summed sqrt(int r1 : r1).
pub fn residual_error_1(eval: &Evaluator, q: usize) -> Result<f64> {
    let mat = eval.material;
    Ok(eval
        .integrate(q, SampleDepth::Residual, |st| {
            let r1 = st.residual_one(&mat);
            r1.ddot(&r1)
        })?
        .sqrt())
}

/// Equilibrium residual error; relative to the body-load magnitude when the
/// load is nonzero, otherwise absolute (flagged).
pub fn residual_error_2(eval: &Evaluator, q: usize, body_load: Vector3<f64>) -> Result<L2Error> {
    let mat = eval.material;
    let num = eval.integrate(q, SampleDepth::Residual, |st| {
        st.residual_two(&mat, body_load).norm_squared()
    })?;
    if body_load.norm() == 0.0 {
        return Ok(L2Error {
            value: num.sqrt(),
            absolute: true,
        });
    }
    let den = eval.integrate(q, SampleDepth::Gradient, |_| body_load.norm_squared())?;
    Ok(L2Error {
        value: (num / den).sqrt(),
        absolute: false,
    })
}

/// Edge sample for the boundary force residual.
pub struct EdgeState {
    pub bf: BoundaryFrame,
    pub p_eff: Vector3<f64>,
    pub arc_jacobian: f64,
}

/// Effective boundary force along a boundary edge at parameter `rho` of the
/// parent element's traversal.
pub fn edge_effective_force(eval: &Evaluator, edge_id: usize, rho: f64) -> Result<EdgeState> {
    let mesh = eval.mesh;
    let (el, le) = mesh.edges[edge_id].parent_plus;
    let re = ReferenceElement::new(mesh.order);
    let (r, dr) = re.edge_point(le, rho);
    let jet = element_jet(mesh, el, r, eval.mode, false);
    let frame = SurfaceFrame::from_jet(&jet)?;
    let bf = boundary_frame(&frame, dr)?;
    let st = eval.state(el, r, SampleDepth::Gradient)?;
    let n_real = st.n_real(&eval.material);
    let p_div_m = st.shear_vector();

    // Arc-length derivative of m_q along the edge: differentiate m, t, and q
    // with respect to the edge parameter (dr is constant along the edge).
    let t_star = frame.jac * dr;
    let arc = t_star.norm();
    let dt_star = jet.d2x[0] * (dr.x * dr.x)
        + jet.d2x[1] * (2.0 * dr.x * dr.y)
        + jet.d2x[2] * (dr.y * dr.y);
    let t = t_star / arc;
    let dt = (dt_star - t * t.dot(&dt_star)) / arc;
    let dn = {
        let ns_xi = jet.d2x[0].cross(&jet.dx[1]) + jet.dx[0].cross(&jet.d2x[1]);
        let ns_eta = jet.d2x[1].cross(&jet.dx[1]) + jet.dx[0].cross(&jet.d2x[2]);
        let ns_d = ns_xi * dr.x + ns_eta * dr.y;
        let s = frame.area_jacobian;
        (ns_d - frame.normal * frame.normal.dot(&ns_d)) / s
    };
    let dq = dt.cross(&frame.normal) + t.cross(&dn);

    let basis = lagrange_quad(mesh.order, r);
    let conn = mesh.element_nodes(el);
    let mcoef = &eval.solution.moments[el];
    let mut mmat = Matrix3::zeros();
    let mut dmmat = Matrix3::zeros();
    for a in 0..conn.len() {
        let dval = basis.grad[a][0] * dr.x + basis.grad[a][1] * dr.y;
        for (c, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            let v = mcoef[6 * a + c];
            mmat[(i, j)] += v * basis.value[a];
            dmmat[(i, j)] += v * dval;
            if i != j {
                mmat[(j, i)] += v * basis.value[a];
                dmmat[(j, i)] += v * dval;
            }
        }
    }
    let q = bf.conormal;
    let dmq_drho = (dmmat * q).dot(&t) + (mmat * dq).dot(&t) + (mmat * q).dot(&dt);
    let dmq_ds = dmq_drho / arc;

    let p_eff = effective_boundary_force(&bf, &frame, &n_real, &st.m, &p_div_m, dmq_ds);
    Ok(EdgeState {
        bf,
        p_eff,
        arc_jacobian: arc,
    })
}

/// Force-equilibrium residual on the Neumann-u boundary, relative to the
/// prescribed traction magnitude when it is nonzero.
pub fn boundary_residual(eval: &Evaluator, boundary: &BoundaryData, q: usize) -> Result<L2Error> {
    let rule = GaussRule::new(q);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut any = false;
    for e in eval.mesh.boundary_edges().collect::<Vec<_>>() {
        let kind = boundary.edge_kinds[e].as_ref().unwrap();
        if !kind.is_neumann_u() {
            continue;
        }
        let traction = match kind {
            EdgeKind::Neumann { traction, .. } => *traction,
            _ => Vector3::zeros(),
        };
        any = true;
        for (&rho, &wq) in rule.points.iter().zip(&rule.weights) {
            let st = edge_effective_force(eval, e, rho)?;
            num += wq * st.arc_jacobian * (st.p_eff - traction).norm_squared();
            den += wq * st.arc_jacobian * traction.norm_squared();
        }
    }
    if !any {
        return Ok(L2Error {
            value: 0.0,
            absolute: true,
        });
    }
    if den <= 1e-300 {
        Ok(L2Error {
            value: num.sqrt(),
            absolute: true,
        })
    } else {
        Ok(L2Error {
            value: (num / den).sqrt(),
            absolute: false,
        })
    }
}

/// Stored elastic energy, 1/2 int eps_Memb : n_tilde + eps_Bend(m) : m.
pub fn stored_energy(eval: &Evaluator, q: usize) -> Result<f64> {
    let mat = eval.material;
    eval.integrate(q, SampleDepth::Gradient, |st| {
        let eps = st.membrane_strain();
        let nt = st.n_tilde(&mat);
        0.5 * (eps.ddot(&nt) + bending_energy_twice(&mat, &st.m, &st.frame))
    })
}

/// Relative stored-energy error.
pub fn energy_error(energy: f64, reference: f64) -> Result<f64> {
    if reference <= 0.0 {
        return Err(Error::Spec(format!(
            "reference energy must be positive, got {reference}"
        )));
    }
    Ok((reference - energy).abs() / reference)
}

/// External work of the loads against the solution: body load, boundary
/// tractions, boundary moments against the multiplier, and corner forces.
pub fn external_work(
    eval: &Evaluator,
    boundary: &BoundaryData,
    corner_loads: &[(usize, Vector3<f64>)],
    body_load: Vector3<f64>,
    q: usize,
) -> Result<f64> {
    let mut work = eval.integrate(q, SampleDepth::Gradient, |st| body_load.dot(&st.u))?;
    let rule = GaussRule::new(q);
    let re = ReferenceElement::new(eval.mesh.order);
    let p = eval.mesh.order;
    for e in eval.mesh.boundary_edges().collect::<Vec<_>>() {
        if let Some(EdgeKind::Neumann { traction, moment }) = boundary.edge_kinds[e].as_ref() {
            let (el, le) = eval.mesh.edges[e].parent_plus;
            for (&rho, &wq) in rule.points.iter().zip(&rule.weights) {
                let (r, dr) = re.edge_point(le, rho);
                let st = eval.state(el, r, SampleDepth::Gradient)?;
                let arc = (st.frame.jac * dr).norm();
                work += wq * arc * traction.dot(&st.u);
                if *moment != 0.0 {
                    // Boundary edges are stored from their only parent, so
                    // the multiplier trace needs no sign flip.
                    let wvals = crate::basis::lagrange_line(p, rho);
                    let mut omega = 0.0;
                    for (k, wv) in wvals.iter().enumerate() {
                        omega += wv[0] * eval.solution.w[e * (p + 1) + k];
                    }
                    work += wq * arc * moment * omega;
                }
            }
        }
    }
    for (node, f) in corner_loads {
        work += f.dot(&eval.solution.u[*node]);
    }
    Ok(work)
}

/// Locates the element owning `x_target` and interpolates the displacement.
pub fn probe_displacement(eval: &Evaluator, x_target: Vector3<f64>) -> Result<Vector3<f64>> {
    let mesh = eval.mesh;
    let mut candidates: Vec<(f64, usize)> = (0..mesh.n_elements())
        .map(|el| {
            let d = mesh.elements[el]
                .nodes
                .iter()
                .map(|&n| (mesh.nodes[n] - x_target).norm())
                .fold(f64::MAX, f64::min);
            (d, el)
        })
        .collect();
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for &(_, el) in candidates.iter().take(8) {
        let diam = mesh.element_diameter(el);
        if let Ok(r) = invert_map(mesh, el, x_target, eval.mode) {
            if r.x.abs() <= 1.0 + 1e-8 && r.y.abs() <= 1.0 + 1e-8 {
                let jet = element_jet(mesh, el, r, eval.mode, false);
                if (jet.x - x_target).norm() <= 1e-6 * diam.max(1e-6) {
                    let st = eval.state(el, r, SampleDepth::Gradient)?;
                    return Ok(st.u);
                }
            }
        }
    }
    Err(Error::Probe(format!(
        "no element owns probe point [{:.4}, {:.4}, {:.4}]",
        x_target.x, x_target.y, x_target.z
    )))
}

/// Per-point derived quantities for export and reference checks.
pub struct DerivedPoint {
    pub x: Vector3<f64>,
    pub moment_eigenvalues: [f64; 3],
    pub n_real_eigenvalues: [f64; 3],
    pub shear_norm: f64,
}

/// Derived fields at the quadrature points of every element. The physical
/// normal force is symmetrized before the eigen-decomposition; its
/// antisymmetric part vanishes with refinement.
pub fn derived_fields(eval: &Evaluator, q: usize) -> Result<Vec<DerivedPoint>> {
    let rule = GaussRule::new(q);
    let mut out = Vec::new();
    for el in 0..eval.mesh.n_elements() {
        for (r, _) in rule.tensor() {
            let st = eval.state(el, r, SampleDepth::Gradient)?;
            out.push(derived_at(&st, &eval.material));
        }
    }
    Ok(out)
}

pub fn derived_at(st: &PointState, mat: &MaterialParams) -> DerivedPoint {
    let n_real = SymSurfTensor::from_matrix(&st.n_real(mat));
    DerivedPoint {
        x: st.frame.x,
        moment_eigenvalues: st.m.eigenvalues_by_magnitude(),
        n_real_eigenvalues: n_real.eigenvalues_by_magnitude(),
        shear_norm: st.shear_vector().norm(),
    }
}

/// Least-squares slope of log(err) against log(h) over the final `window`
/// points of a mesh sequence.
pub fn fit_slope(points: &[(f64, f64)], window: usize) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(h, e)| *h > 0.0 && *e > 0.0)
        .map(|&(h, e)| (h.ln(), e.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return f64::NAN;
    }
    let take = window.min(n);
    let pts = &pts[n - take..];
    let nn = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (nn * sxy - sx * sy) / (nn * sxx - sx * sx)
}
