//! Pointwise shell kinematics and constitutive evaluations: membrane and
//! bending strains, stress resultants, the inverse bending law, the
//! difference (rotation) vector, effective boundary forces, and Kirchhoff
//! corner forces.

use nalgebra::{Matrix3, Vector3};

use crate::geometry::{BoundaryFrame, SurfaceFrame};

/// Isotropic plane-stress material of a shell of constant thickness.
#[derive(Debug, Clone, Copy)]
pub struct MaterialParams {
    pub youngs: f64,
    pub poisson: f64,
    pub thickness: f64,
}

impl MaterialParams {
    pub fn new(youngs: f64, poisson: f64, thickness: f64) -> Self {
        assert!(youngs > 0.0 && thickness > 0.0);
        assert!((0.0..0.5).contains(&poisson));
        MaterialParams {
            youngs,
            poisson,
            thickness,
        }
    }

    /// Shear modulus mu = E / (2 (1 + nu)).
    pub fn mu(&self) -> f64 {
        self.youngs / (2.0 * (1.0 + self.poisson))
    }

    /// Plane-stress Lame constant lambda = E nu / (1 - nu^2).
    pub fn lambda(&self) -> f64 {
        self.youngs * self.poisson / (1.0 - self.poisson * self.poisson)
    }
}

/// Component order of symmetric surface tensors: 11, 22, 33, 12, 13, 23.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Symmetric 3x3 surface tensor stored by its six independent components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymSurfTensor {
    pub c: [f64; 6],
}

impl SymSurfTensor {
    pub fn zero() -> Self {
        SymSurfTensor { c: [0.0; 6] }
    }

    pub fn from_components(c: [f64; 6]) -> Self {
        SymSurfTensor { c }
    }

    /// Symmetrizes a general matrix into component storage.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let mut c = [0.0; 6];
        for (k, (i, j)) in SYM_PAIRS.iter().enumerate() {
            c[k] = 0.5 * (m[(*i, *j)] + m[(*j, *i)]);
        }
        SymSurfTensor { c }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for (k, (i, j)) in SYM_PAIRS.iter().enumerate() {
            m[(*i, *j)] = self.c[k];
            m[(*j, *i)] = self.c[k];
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.c[0] + self.c[1] + self.c[2]
    }

    /// Frobenius inner product with another symmetric tensor.
    pub fn ddot(&self, other: &SymSurfTensor) -> f64 {
        let mut s = 0.0;
        for k in 0..3 {
            s += self.c[k] * other.c[k];
        }
        for k in 3..6 {
            s += 2.0 * self.c[k] * other.c[k];
        }
        s
    }

    /// In-plane trace P : T.
    pub fn plane_trace(&self, frame: &SurfaceFrame) -> f64 {
        let p = &frame.projector;
        let mut s = 0.0;
        for (k, (i, j)) in SYM_PAIRS.iter().enumerate() {
            let w = if i == j { 1.0 } else { 2.0 };
            s += w * p[(*i, *j)] * self.c[k];
        }
        s
    }

    pub fn scale(&self, a: f64) -> SymSurfTensor {
        let mut c = self.c;
        for v in &mut c {
            *v *= a;
        }
        SymSurfTensor { c }
    }

    pub fn add(&self, other: &SymSurfTensor) -> SymSurfTensor {
        let mut c = self.c;
        for (k, v) in c.iter_mut().enumerate() {
            *v += other.c[k];
        }
        SymSurfTensor { c }
    }

    /// Eigenvalues sorted by descending magnitude (symmetric solve).
    pub fn eigenvalues_by_magnitude(&self) -> [f64; 3] {
        let eig = self.matrix().symmetric_eigen();
        let mut vals = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
        vals.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
        vals
    }
}

/// Membrane strain from the directional displacement gradient,
/// eps_Memb = sym(P grad u P).
pub fn membrane_strain(frame: &SurfaceFrame, grad_u: &Matrix3<f64>) -> SymSurfTensor {
    let p = &frame.projector;
    let cov = p * grad_u * p;
    SymSurfTensor::from_matrix(&cov)
}

/// Bending strain of the displacement field from the surface Hessians of its
/// components: -sum_i P S(u_i) n_i, with S the directional gradient of each
/// tangential gradient.
pub fn bending_strain_from_u(frame: &SurfaceFrame, hessians: &[Matrix3<f64>; 3]) -> SymSurfTensor {
    let p = &frame.projector;
    let mut acc = Matrix3::zeros();
    for i in 0..3 {
        acc -= frame.normal[i] * (p * hessians[i]);
    }
    SymSurfTensor::from_matrix(&acc)
}

/// In-plane stress sigma = 2 mu eps + lambda tr(eps) P.
pub fn stress(mat: &MaterialParams, eps: &SymSurfTensor, frame: &SurfaceFrame) -> SymSurfTensor {
    let p = SymSurfTensor::from_matrix(&frame.projector);
    eps.scale(2.0 * mat.mu()).add(&p.scale(mat.lambda() * eps.trace()))
}

/// Effective normal force and bending moment resultants,
/// n_tilde = t sigma(eps_Memb), m = t^3/12 sigma(eps_Bend).
pub fn resultants(
    mat: &MaterialParams,
    eps_memb: &SymSurfTensor,
    eps_bend: &SymSurfTensor,
    frame: &SurfaceFrame,
) -> (SymSurfTensor, SymSurfTensor) {
    let t = mat.thickness;
    let n = stress(mat, eps_memb, frame).scale(t);
    let m = stress(mat, eps_bend, frame).scale(t * t * t / 12.0);
    (n, m)
}

/// Inverse bending law: eps_Bend(m) = 12/(E t^3) [(1+nu) m - nu tr(m) P].
pub fn bending_strain_from_m(
    mat: &MaterialParams,
    m: &SymSurfTensor,
    frame: &SurfaceFrame,
) -> SymSurfTensor {
    let f = 12.0 / (mat.youngs * mat.thickness.powi(3));
    let p = SymSurfTensor::from_matrix(&frame.projector);
    m.scale(f * (1.0 + mat.poisson))
        .add(&p.scale(-f * mat.poisson * m.trace()))
}

/// Twice the bending energy density of the condensed operator,
/// 12/(E t^3) [(1+nu) m:m - nu (P:m)^2].
///
/// Matches the discrete compliance form, which closes the trace with the
/// projector so that the element blocks stay symmetric for tensors that are
/// not exactly in-plane. Coincides with eps_Bend(m):m on in-plane tensors.
pub fn bending_energy_twice(mat: &MaterialParams, m: &SymSurfTensor, frame: &SurfaceFrame) -> f64 {
    let f = 12.0 / (mat.youngs * mat.thickness.powi(3));
    let tp = m.plane_trace(frame);
    f * ((1.0 + mat.poisson) * m.ddot(m) - mat.poisson * tp * tp)
}

/// Physical normal force n_real = n_tilde + H m (in-plane, generally
/// non-symmetric).
pub fn physical_normal_force(
    n_tilde: &SymSurfTensor,
    m: &SymSurfTensor,
    frame: &SurfaceFrame,
) -> Matrix3<f64> {
    n_tilde.matrix() + frame.weingarten * m.matrix()
}

/// Difference vector w = -(grad u)^T n, the in-plane rotation measure.
pub fn difference_vector(frame: &SurfaceFrame, grad_u: &Matrix3<f64>) -> Vector3<f64> {
    -(grad_u.transpose() * frame.normal)
}

/// Boundary rotations (omega_t, omega_q) = (w.q, w.t).
pub fn boundary_rotations(bf: &BoundaryFrame, w: &Vector3<f64>) -> (f64, f64) {
    (w.dot(&bf.conormal), w.dot(&bf.tangent))
}

/// Conormal-direction moments on the boundary: (m_t, m_q) = ((m q).q, (m q).t).
pub fn boundary_moments(bf: &BoundaryFrame, m: &SymSurfTensor) -> (f64, f64) {
    let mq = m.matrix() * bf.conormal;
    (mq.dot(&bf.conormal), mq.dot(&bf.tangent))
}

/// Effective boundary force p_tilde resolved in the (t, q, n) triad.
///
/// `p_div_m` is P . div_Gamma m at the boundary point and `dmq_dt` the
/// arc-length derivative of m_q along the boundary tangent.
pub fn effective_boundary_force(
    bf: &BoundaryFrame,
    frame: &SurfaceFrame,
    n_real: &Matrix3<f64>,
    m: &SymSurfTensor,
    p_div_m: &Vector3<f64>,
    dmq_dt: f64,
) -> Vector3<f64> {
    let nq = n_real * bf.conormal;
    let p_t = nq.dot(&bf.tangent);
    let p_q = nq.dot(&bf.conormal);
    let p_n = p_div_m.dot(&bf.conormal);
    let (_, m_q) = boundary_moments(bf, m);
    let ht = frame.weingarten * bf.tangent;
    let pt_eff = p_t + ht.dot(&bf.tangent) * m_q;
    let pq_eff = p_q + ht.dot(&bf.conormal) * m_q;
    let pn_eff = p_n + dmq_dt;
    pt_eff * bf.tangent + pq_eff * bf.conormal + pn_eff * bf.normal
}

/// Kirchhoff corner force F_C = m_q(C+) - m_q(C-).
pub fn kirchhoff_force(m_q_minus: f64, m_q_plus: f64) -> f64 {
    m_q_plus - m_q_minus
}
