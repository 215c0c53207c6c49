//! Static condensation of the element moment blocks, global assembly of the
//! condensed symmetric positive-definite system, strong Dirichlet
//! enforcement, the sparse solve, and element-wise moment recovery.
//!
//! A full uncondensed saddle solve over (m, u, omega) is also provided; it is
//! the equivalence oracle for the condensed pipeline on small meshes.

use std::collections::HashMap;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::assembly::{DofLayout, ElementBlocks};
use crate::mesh::{BoundaryData, CornerKind, ShellMesh};
use crate::{Error, Result};

/// Condensed element contribution. The recovery operator reproduces the
/// moment coefficients from the element solution, m = -recovery [u; w]
/// (first saddle row: K_mm m + K_mu u + K_mw w = 0).
#[derive(Debug, Clone)]
pub struct CondensedElement {
    pub k: DMatrix<f64>,
    pub b: DVector<f64>,
    pub recovery: DMatrix<f64>,
}

/// Schur-complement condensation of the moment block.
pub fn condense(blocks: &ElementBlocks, element: usize) -> Result<CondensedElement> {
    let nm = blocks.k_mm.nrows();
    let nu = blocks.k_mu.ncols();
    let nw = blocks.k_mw.ncols();
    let nc = nu + nw;
    let mut coupling = DMatrix::zeros(nm, nc);
    coupling.view_mut((0, 0), (nm, nu)).copy_from(&blocks.k_mu);
    coupling.view_mut((0, nu), (nm, nw)).copy_from(&blocks.k_mw);
    let lu = blocks.k_mm.clone().lu();
    let recovery = lu.solve(&coupling).ok_or(Error::Element {
        element,
        message: "singular moment compliance block".into(),
    })?;
    let mut k = DMatrix::zeros(nc, nc);
    k.view_mut((0, 0), (nu, nu)).copy_from(&blocks.k_uu);
    k -= coupling.transpose() * &recovery;
    let mut b = DVector::zeros(nc);
    b.rows_mut(0, nu).copy_from(&blocks.b_u);
    b.rows_mut(nu, nw).copy_from(&blocks.b_w);
    Ok(CondensedElement { k, b, recovery })
}

/// Prescribed values per condensed dof (`None` = free), plus per-node frames
/// for single-direction (pinned corner) constraints.
#[derive(Debug, Clone)]
pub struct DirichletBc {
    pub fixed: Vec<Option<f64>>,
    /// Orthogonal rotation per node; the node's dof triplet refers to the
    /// rotated components (rows t, q, n) and the normal one is constrained.
    pub node_rotations: HashMap<usize, Matrix3<f64>>,
}

impl DirichletBc {
    pub fn none(layout: &DofLayout) -> Self {
        DirichletBc {
            fixed: vec![None; layout.n_condensed()],
            node_rotations: HashMap::new(),
        }
    }

    pub fn fix(&mut self, dof: usize, value: f64) -> Result<()> {
        match self.fixed[dof] {
            Some(old) if (old - value).abs() > 1e-12 * (1.0 + old.abs()) => Err(Error::Spec(
                format!("conflicting prescriptions at dof {dof}: {old} vs {value}"),
            )),
            _ => {
                self.fixed[dof] = Some(value);
                Ok(())
            }
        }
    }
}

/// Builds homogeneous Dirichlet data from a classified boundary: component
/// masks per segment kind, rotation constraints on clamped edges, and pinned
/// corners via a rotated nodal frame.
pub fn dirichlet_from_boundary(
    mesh: &ShellMesh,
    layout: &DofLayout,
    boundary: &BoundaryData,
) -> Result<DirichletBc> {
    let mut bc = DirichletBc::none(layout);
    for e in mesh.boundary_edges() {
        let kind = boundary.edge_kinds[e].as_ref().unwrap();
        let fixed = kind.fixed_components();
        for &node in &mesh.edges[e].nodes {
            for c in 0..3 {
                if fixed[c] {
                    bc.fix(layout.u_dof(node, c), 0.0)?;
                }
            }
        }
        if kind.fixes_rotation() {
            for k in 0..=layout.order {
                bc.fix(layout.w_dof(e, k), 0.0)?;
            }
        }
    }
    for corner in &boundary.corners {
        if matches!(corner.kind, CornerKind::Pinned) {
            let frame = corner_triad(mesh, corner.node, corner.edge_out)?;
            bc.node_rotations.insert(corner.node, frame);
            bc.fix(layout.u_dof(corner.node, 2), 0.0)?;
        }
    }
    Ok(bc)
}

/// Rows (t, q, n) of the boundary triad at a corner node.
fn corner_triad(mesh: &ShellMesh, node: usize, edge: usize) -> Result<Matrix3<f64>> {
    use crate::basis::{element_jet, GeometryMode, ReferenceElement};
    use crate::geometry::{boundary_frame, SurfaceFrame};
    let (el, _) = mesh.edges[edge].parent_plus;
    let re = ReferenceElement::new(mesh.order);
    let local = mesh.elements[el]
        .nodes
        .iter()
        .position(|&n| n == node)
        .ok_or_else(|| Error::Mesh("corner node not on parent element".into()))?;
    let r = re.node_coords(local);
    let jet = element_jet(mesh, el, r, GeometryMode::Isoparametric, false);
    let frame = SurfaceFrame::from_jet(&jet)?;
    // Direction along the outgoing boundary edge.
    let first = mesh.edges[edge].nodes[0];
    let second = mesh.edges[edge].nodes[1];
    let dir = if first == node {
        mesh.nodes[second] - mesh.nodes[first]
    } else {
        mesh.nodes[first] - mesh.nodes[second]
    };
    let tangent_ref = frame.g_inv * (frame.jac.transpose() * dir);
    let bf = boundary_frame(&frame, tangent_ref)?;
    Ok(Matrix3::from_rows(&[
        bf.tangent.transpose(),
        bf.conormal.transpose(),
        bf.normal.transpose(),
    ]))
}

/// Assembled condensed global system (triplet form, full symmetric pattern).
pub struct CondensedSystem {
    pub n: usize,
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: DVector<f64>,
}

/// Scatter-adds the condensed element matrices into the global system.
///
/// `corner_loads` are concentrated forces added at displacement dofs. Nodal
/// rotations from pinned corners are applied as congruence transforms during
/// the scatter, so the global dofs of those nodes live in the rotated frame.
pub fn assemble_global(
    mesh: &ShellMesh,
    layout: &DofLayout,
    elements: &[CondensedElement],
    corner_loads: &[(usize, Vector3<f64>)],
    bc: &DirichletBc,
) -> CondensedSystem {
    let n = layout.n_condensed();
    let mut triplets = Vec::new();
    let mut rhs = DVector::zeros(n);
    for (el, ce) in elements.iter().enumerate() {
        let dofs = layout.element_dofs(mesh, el);
        let (k, b) = rotate_element(mesh, layout, el, ce, bc);
        for (i, &gi) in dofs.iter().enumerate() {
            rhs[gi] += b[i];
            for (j, &gj) in dofs.iter().enumerate() {
                let v = k[(i, j)];
                if v != 0.0 {
                    triplets.push((gi, gj, v));
                }
            }
        }
    }
    for (node, f) in corner_loads {
        let f = match bc.node_rotations.get(node) {
            Some(r) => r * f,
            None => *f,
        };
        for c in 0..3 {
            rhs[layout.u_dof(*node, c)] += f[c];
        }
    }
    CondensedSystem { n, triplets, rhs }
}

fn rotate_element(
    mesh: &ShellMesh,
    layout: &DofLayout,
    el: usize,
    ce: &CondensedElement,
    bc: &DirichletBc,
) -> (DMatrix<f64>, DVector<f64>) {
    if bc.node_rotations.is_empty() {
        return (ce.k.clone(), ce.b.clone());
    }
    let _ = layout;
    let mut k = ce.k.clone();
    let mut b = ce.b.clone();
    for (a, &node) in mesh.elements[el].nodes.iter().enumerate() {
        if let Some(r) = bc.node_rotations.get(&node) {
            // Left-multiply rows 3a..3a+3 by R, right-multiply columns by R^T.
            let nrows = k.nrows();
            let rows = k.rows(3 * a, 3).into_owned();
            k.rows_mut(3 * a, 3).copy_from(&(r * rows));
            let cols = k.columns(3 * a, 3).into_owned();
            k.columns_mut(3 * a, 3).copy_from(&(cols * r.transpose()));
            let bv = Vector3::new(b[3 * a], b[3 * a + 1], b[3 * a + 2]);
            let rb = r * bv;
            for c in 0..3 {
                b[3 * a + c] = rb[c];
            }
            let _ = nrows;
        }
    }
    (k, b)
}

/// Dirichlet-reduced system over the free dofs.
pub struct ReducedSystem {
    pub free_dofs: Vec<usize>,
    pub full_to_free: Vec<Option<usize>>,
    pub mat: SparseColMat<usize, f64>,
    pub rhs: DVector<f64>,
}

/// Eliminates prescribed dofs (row/column removal with right-hand-side
/// update; inhomogeneous values supported).
pub fn apply_dirichlet(system: &CondensedSystem, bc: &DirichletBc) -> Result<ReducedSystem> {
    let n = system.n;
    let mut full_to_free = vec![None; n];
    let mut free_dofs = Vec::new();
    for dof in 0..n {
        if bc.fixed[dof].is_none() {
            full_to_free[dof] = Some(free_dofs.len());
            free_dofs.push(dof);
        }
    }
    let nf = free_dofs.len();
    let mut rhs = DVector::zeros(nf);
    for (k, &dof) in free_dofs.iter().enumerate() {
        rhs[k] = system.rhs[dof];
    }
    let mut trips: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(system.triplets.len());
    for &(i, j, v) in &system.triplets {
        match (full_to_free[i], full_to_free[j]) {
            (Some(fi), Some(fj)) => trips.push(Triplet::new(fi, fj, v)),
            (Some(fi), None) => {
                let xj = bc.fixed[j].unwrap();
                if xj != 0.0 {
                    rhs[fi] -= v * xj;
                }
            }
            _ => {}
        }
    }
    let mat = SparseColMat::try_new_from_triplets(nf, nf, &trips)
        .map_err(|e| Error::Solve(format!("sparse assembly failed: {e:?}")))?;
    Ok(ReducedSystem {
        free_dofs,
        full_to_free,
        mat,
        rhs,
    })
}

/// Direct sparse Cholesky solve of the reduced SPD system; falls back to
/// diagonally preconditioned conjugate gradients for very large systems.
///
/// Returns the full-length solution with prescribed values filled in, plus
/// the relative residual of the reduced solve.
pub fn solve_reduced(
    reduced: &ReducedSystem,
    bc: &DirichletBc,
    n_full: usize,
) -> Result<(DVector<f64>, f64)> {
    let nf = reduced.free_dofs.len();
    let x_free = if nf == 0 {
        DVector::zeros(0)
    } else if nf > 200_000 {
        cg_solve(reduced)?
    } else {
        let llt = reduced
            .mat
            .sp_cholesky(faer::Side::Lower)
            .map_err(|e| {
                Error::Solve(format!(
                    "sparse Cholesky failed ({e:?}); the reduced matrix is not positive \
                     definite, likely from missing boundary conditions (rigid-body motion)"
                ))
            })?;
        let mut b = faer::Mat::<f64>::zeros(nf, 1);
        for i in 0..nf {
            b[(i, 0)] = reduced.rhs[i];
        }
        let x = llt.solve(&b);
        DVector::from_fn(nf, |i, _| x[(i, 0)])
    };

    // Relative residual of the reduced system.
    let mut res = reduced.rhs.clone();
    spmv_sub(&reduced.mat, &x_free, &mut res);
    let denom = reduced.rhs.norm().max(1e-300);
    let residual = res.norm() / denom;

    let mut full = DVector::zeros(n_full);
    for (k, &dof) in reduced.free_dofs.iter().enumerate() {
        full[dof] = x_free[k];
    }
    for (dof, v) in bc.fixed.iter().enumerate() {
        if let Some(v) = v {
            full[dof] = *v;
        }
    }
    Ok((full, residual))
}

fn spmv_sub(mat: &SparseColMat<usize, f64>, x: &DVector<f64>, out: &mut DVector<f64>) {
    // out -= A x for the CSC matrix.
    let sym = mat.symbolic();
    for j in 0..mat.ncols() {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        let rows = sym.row_idx_of_col_raw(j);
        let vals = mat.val_of_col(j);
        for (r, v) in rows.iter().zip(vals) {
            out[*r] -= v * xj;
        }
    }
}

fn cg_solve(reduced: &ReducedSystem) -> Result<DVector<f64>> {
    let n = reduced.rhs.len();
    let mut diag = DVector::from_element(n, 1.0);
    let sym = reduced.mat.symbolic();
    for j in 0..n {
        for (r, v) in sym.row_idx_of_col_raw(j).iter().zip(reduced.mat.val_of_col(j)) {
            if *r == j {
                diag[j] = *v;
            }
        }
    }
    let apply = |x: &DVector<f64>| {
        let mut out = DVector::zeros(n);
        for j in 0..n {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for (r, v) in sym.row_idx_of_col_raw(j).iter().zip(reduced.mat.val_of_col(j)) {
                out[*r] += v * xj;
            }
        }
        out
    };
    let mut x = DVector::zeros(n);
    let mut r = reduced.rhs.clone();
    let mut z = r.component_div(&diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let tol = 1e-12 * reduced.rhs.norm();
    for _ in 0..(10 * n) {
        if r.norm() <= tol {
            break;
        }
        let ap = apply(&p);
        let alpha = rz / p.dot(&ap);
        x += alpha * &p;
        r -= alpha * ap;
        z = r.component_div(&diag);
        let rz_new = r.dot(&z);
        p = &z + (rz_new / rz) * p;
        rz = rz_new;
    }
    Ok(x)
}

/// Nodal displacements, edge multipliers, and element moment coefficients.
#[derive(Debug, Clone)]
pub struct SolutionFields {
    pub u: Vec<Vector3<f64>>,
    /// Multiplier values, indexed edge * (p+1) + k.
    pub w: Vec<f64>,
    /// Recovered moment coefficients per element (6 per local node).
    pub moments: Vec<DVector<f64>>,
    /// Relative residual of the reduced linear solve.
    pub residual: f64,
}

impl SolutionFields {
    /// Element-local condensed solution vector [u_el; w_el].
    pub fn element_vector(&self, mesh: &ShellMesh, layout: &DofLayout, el: usize) -> DVector<f64> {
        let elem = &mesh.elements[el];
        let p = layout.order;
        let mut v = DVector::zeros(3 * elem.nodes.len() + 4 * (p + 1));
        for (a, &node) in elem.nodes.iter().enumerate() {
            for c in 0..3 {
                v[3 * a + c] = self.u[node][c];
            }
        }
        let base = 3 * elem.nodes.len();
        for (le, &edge) in elem.edges.iter().enumerate() {
            for k in 0..=p {
                v[base + le * (p + 1) + k] = self.w[edge * (p + 1) + k];
            }
        }
        v
    }
}

/// Splits the global condensed solution vector and recovers moments
/// element-wise from the retained condensation operators.
pub fn finish_solution(
    mesh: &ShellMesh,
    layout: &DofLayout,
    elements: &[CondensedElement],
    bc: &DirichletBc,
    full: DVector<f64>,
    residual: f64,
) -> SolutionFields {
    let mut u = Vec::with_capacity(mesh.n_nodes());
    for node in 0..mesh.n_nodes() {
        let mut v = Vector3::new(
            full[layout.u_dof(node, 0)],
            full[layout.u_dof(node, 1)],
            full[layout.u_dof(node, 2)],
        );
        if let Some(r) = bc.node_rotations.get(&node) {
            v = r.transpose() * v;
        }
        u.push(v);
    }
    let w: Vec<f64> = (0..layout.n_w_dofs())
        .map(|k| full[layout.n_u_dofs() + k])
        .collect();
    let fields = SolutionFields {
        u,
        w,
        moments: Vec::new(),
        residual,
    };
    let moments = (0..mesh.n_elements())
        .map(|el| {
            let local = fields.element_vector(mesh, layout, el);
            -(&elements[el].recovery * local)
        })
        .collect();
    SolutionFields { moments, ..fields }
}

/// Full condensed pipeline: condense all blocks, assemble, reduce, solve,
/// and recover the moments.
pub fn solve_condensed(
    mesh: &ShellMesh,
    layout: &DofLayout,
    blocks: &[ElementBlocks],
    corner_loads: &[(usize, Vector3<f64>)],
    bc: &DirichletBc,
) -> Result<SolutionFields> {
    let condensed: Vec<CondensedElement> = blocks
        .iter()
        .enumerate()
        .map(|(el, b)| condense(b, el))
        .collect::<Result<_>>()?;
    let system = assemble_global(mesh, layout, &condensed, corner_loads, bc);
    let reduced = apply_dirichlet(&system, bc)?;
    let (full, residual) = solve_reduced(&reduced, bc, system.n)?;
    Ok(finish_solution(mesh, layout, &condensed, bc, full, residual))
}

/// Direct dense solve of the uncondensed saddle system (equivalence oracle
/// for small meshes). Unknown ordering: condensed dofs first, then the
/// element-local moment coefficients.
pub fn solve_saddle(
    mesh: &ShellMesh,
    layout: &DofLayout,
    blocks: &[ElementBlocks],
    corner_loads: &[(usize, Vector3<f64>)],
    bc: &DirichletBc,
) -> Result<SolutionFields> {
    if !bc.node_rotations.is_empty() {
        return Err(Error::Solve(
            "saddle oracle does not support pinned corners".into(),
        ));
    }
    let nc = layout.n_condensed();
    let n = layout.n_uncondensed(mesh);
    let nl = (layout.order + 1) * (layout.order + 1);
    let mut k = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for (el, blk) in blocks.iter().enumerate() {
        let dofs = layout.element_dofs(mesh, el);
        let nu = 3 * nl;
        let m0 = nc + el * 6 * nl;
        for i in 0..6 * nl {
            for j in 0..6 * nl {
                k[(m0 + i, m0 + j)] += blk.k_mm[(i, j)];
            }
            for (j, &gj) in dofs.iter().enumerate() {
                let v = if j < nu {
                    blk.k_mu[(i, j)]
                } else {
                    blk.k_mw[(i, j - nu)]
                };
                k[(m0 + i, gj)] += v;
                k[(gj, m0 + i)] += v;
            }
        }
        for (i, &gi) in dofs.iter().enumerate().take(nu) {
            b[gi] += blk.b_u[i];
            for (j, &gj) in dofs.iter().enumerate().take(nu) {
                k[(gi, gj)] += blk.k_uu[(i, j)];
            }
        }
        for (i, &gi) in dofs.iter().enumerate().skip(nu) {
            b[gi] += blk.b_w[i - nu];
        }
    }
    for (node, f) in corner_loads {
        for c in 0..3 {
            b[layout.u_dof(*node, c)] += f[c];
        }
    }
    // Strong Dirichlet by row/column elimination.
    for dof in 0..nc {
        if let Some(v) = bc.fixed[dof] {
            for j in 0..n {
                b[j] -= k[(j, dof)] * v;
                k[(dof, j)] = 0.0;
                k[(j, dof)] = 0.0;
            }
            k[(dof, dof)] = 1.0;
            b[dof] = v;
        }
    }
    let lu = k.lu();
    let x = lu
        .solve(&b)
        .ok_or_else(|| Error::Solve("saddle system singular".into()))?;

    let mut u = Vec::with_capacity(mesh.n_nodes());
    for node in 0..mesh.n_nodes() {
        u.push(Vector3::new(
            x[layout.u_dof(node, 0)],
            x[layout.u_dof(node, 1)],
            x[layout.u_dof(node, 2)],
        ));
    }
    let w: Vec<f64> = (0..layout.n_w_dofs())
        .map(|k| x[layout.n_u_dofs() + k])
        .collect();
    let moments = (0..mesh.n_elements())
        .map(|el| {
            let m0 = nc + el * 6 * nl;
            DVector::from_fn(6 * nl, |i, _| x[m0 + i])
        })
        .collect();
    Ok(SolutionFields {
        u,
        w,
        moments,
        residual: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Assembler;
    use crate::basis::GeometryMode;
    use crate::geometry::{CylinderChart, PlaneChart};
    use crate::mechanics::MaterialParams;
    use crate::mesh::{build_structured_mesh, classify_boundary, BcSpec, EdgeKind, Patch};
    use approx::assert_abs_diff_eq;

    fn plane_mesh(n: usize, p: usize) -> ShellMesh {
        build_structured_mesh(
            vec![Patch {
                chart: Box::new(PlaneChart::unit()),
                nx: n,
                ny: n,
            }],
            p,
        )
        .unwrap()
    }

    fn cylinder_mesh(n: usize, p: usize) -> ShellMesh {
        build_structured_mesh(
            vec![Patch {
                chart: Box::new(CylinderChart {
                    radius: 2.0,
                    alpha0: 2.0,
                    span: 1.2,
                    y_min: 0.0,
                    y_max: 1.0,
                }),
                nx: n,
                ny: n,
            }],
            p,
        )
        .unwrap()
    }

    fn all_blocks(asm: &Assembler) -> Vec<ElementBlocks> {
        (0..asm.mesh.n_elements())
            .map(|el| asm.element_blocks(el).unwrap())
            .collect()
    }

    fn clamped_plate_solution(
        n: usize,
        p: usize,
        load: Vector3<f64>,
    ) -> (ShellMesh, DofLayout, Vec<ElementBlocks>, DirichletBc) {
        let mesh = plane_mesh(n, p);
        let bd = classify_boundary(&mesh, &BcSpec::uniform(EdgeKind::Clamped)).unwrap();
        let mat = MaterialParams::new(1000.0, 0.3, 0.1);
        let asm = Assembler::new(&mesh, mat)
            .with_body_load(load)
            .with_boundary(&bd);
        let blocks = all_blocks(&asm);
        let layout = DofLayout::from_mesh(&mesh);
        let bc = dirichlet_from_boundary(&mesh, &layout, &bd).unwrap();
        (mesh, layout, blocks, bc)
    }

    #[test]
    fn condense_with_zero_coupling_keeps_kuu() {
        let mesh = plane_mesh(1, 1);
        let asm = Assembler::new(&mesh, MaterialParams::new(10.0, 0.0, 0.1));
        let mut blocks = asm.element_blocks(0).unwrap();
        blocks.k_mu.fill(0.0);
        blocks.k_mw.fill(0.0);
        let ce = condense(&blocks, 0).unwrap();
        let nu = blocks.k_uu.nrows();
        assert_abs_diff_eq!(
            (ce.k.view((0, 0), (nu, nu)) - &blocks.k_uu).norm(),
            0.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(ce.k.view((nu, 0), (ce.k.nrows() - nu, nu)).norm(), 0.0);
    }

    #[test]
    fn condensed_element_matrix_is_symmetric() {
        let mesh = cylinder_mesh(2, 2);
        let asm = Assembler::new(&mesh, MaterialParams::new(100.0, 0.3, 0.05));
        for el in 0..mesh.n_elements() {
            let blocks = asm.element_blocks(el).unwrap();
            let ce = condense(&blocks, el).unwrap();
            let asym = (&ce.k - ce.k.transpose()).norm() / ce.k.norm();
            assert!(asym < 1e-10, "element {el} asymmetry {asym}");
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let (mesh, layout, blocks, bc) = clamped_plate_solution(2, 2, Vector3::zeros());
        let sol = solve_condensed(&mesh, &layout, &blocks, &[], &bc).unwrap();
        for v in &sol.u {
            assert_abs_diff_eq!(v.norm(), 0.0, epsilon = 1e-14);
        }
        for m in &sol.moments {
            assert_abs_diff_eq!(m.norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dirichlet_values_are_exact_and_solution_finite() {
        let (mesh, layout, blocks, bc) =
            clamped_plate_solution(3, 2, Vector3::new(0.0, 0.0, -1.0));
        let sol = solve_condensed(&mesh, &layout, &blocks, &[], &bc).unwrap();
        assert!(sol.residual < 1e-10, "residual {}", sol.residual);
        for (node, v) in sol.u.iter().enumerate() {
            if bc.fixed[layout.u_dof(node, 2)].is_some() {
                assert_abs_diff_eq!(v.norm(), 0.0);
            }
            assert!(v.norm().is_finite());
        }
        // The plate sags under the downward load.
        let mid = sol
            .u
            .iter()
            .map(|v| v.z)
            .fold(f64::INFINITY, f64::min);
        assert!(mid < 0.0);
    }

    #[test]
    fn condensed_matches_saddle_oracle_on_plate_and_cylinder() {
        // The paper's equivalence claim: condensing then recovering equals
        // the direct mixed solve up to rounding.
        // 3x3 on the plate: keeps interior edges off the symmetry lines where
        // the exact multiplier vanishes.
        for (mesh, name) in [(plane_mesh(3, 2), "plate"), (cylinder_mesh(2, 2), "cyl")] {
            let bd = classify_boundary(&mesh, &BcSpec::uniform(EdgeKind::Clamped)).unwrap();
            let mat = MaterialParams::new(500.0, 0.3, 0.05);
            let asm = Assembler::new(&mesh, mat)
                .with_body_load(Vector3::new(0.1, -0.2, -1.0))
                .with_boundary(&bd);
            let blocks = all_blocks(&asm);
            let layout = DofLayout::from_mesh(&mesh);
            let bc = dirichlet_from_boundary(&mesh, &layout, &bd).unwrap();
            let sol_c = solve_condensed(&mesh, &layout, &blocks, &[], &bc).unwrap();
            let sol_s = solve_saddle(&mesh, &layout, &blocks, &[], &bc).unwrap();
            let scale_u = sol_s.u.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in sol_c.u.iter().zip(&sol_s.u) {
                assert!((a - b).norm() <= 1e-8 * scale_u, "{name}: u mismatch");
            }
            let scale_w = sol_s
                .w
                .iter()
                .map(|v| v.abs())
                .fold(1e-12 * scale_u, f64::max);
            for (a, b) in sol_c.w.iter().zip(&sol_s.w) {
                assert!((a - b).abs() <= 1e-8 * scale_w, "{name}: w mismatch");
            }
            for (ma, mb) in sol_c.moments.iter().zip(&sol_s.moments) {
                let scale = mb.norm().max(1e-30);
                assert!((ma - mb).norm() <= 1e-8 * scale, "{name}: m mismatch");
            }
        }
    }

    #[test]
    fn inhomogeneous_dirichlet_matches_penalty_oracle() {
        let mesh = plane_mesh(2, 1);
        let bd = classify_boundary(&mesh, &BcSpec::uniform(EdgeKind::Clamped)).unwrap();
        let mat = MaterialParams::new(100.0, 0.0, 0.1);
        let asm = Assembler::new(&mesh, mat).with_boundary(&bd);
        let blocks = all_blocks(&asm);
        let layout = DofLayout::from_mesh(&mesh);
        let mut bc = dirichlet_from_boundary(&mesh, &layout, &bd).unwrap();
        // Prescribe an in-plane stretch on one boundary node.
        let moved = mesh
            .boundary_edges()
            .next()
            .map(|e| mesh.edges[e].nodes[0])
            .unwrap();
        bc.fixed[layout.u_dof(moved, 0)] = Some(0.01);

        let condensed: Vec<CondensedElement> = blocks
            .iter()
            .enumerate()
            .map(|(el, b)| condense(b, el).unwrap())
            .collect();
        let system = assemble_global(&mesh, &layout, &condensed, &[], &bc);
        let reduced = apply_dirichlet(&system, &bc).unwrap();
        let (full, _) = solve_reduced(&reduced, &bc, system.n).unwrap();

        // Penalty oracle on the same triplets.
        let npen = system.n;
        let mut kd = DMatrix::<f64>::zeros(npen, npen);
        for &(i, j, v) in &system.triplets {
            kd[(i, j)] += v;
        }
        let mut bpen = system.rhs.clone();
        let penalty = 1e10 * kd.norm();
        for (dof, v) in bc.fixed.iter().enumerate() {
            if let Some(v) = v {
                kd[(dof, dof)] += penalty;
                bpen[dof] += penalty * v;
            }
        }
        let xpen = kd.lu().solve(&bpen).unwrap();
        let scale = full.norm();
        let dev = (xpen - &full).norm() / scale;
        assert!(dev < 1e-5, "penalty deviation {dev}");
    }

    #[test]
    fn global_condensed_matrix_symmetric_and_spd_after_bc() {
        let (mesh, layout, blocks, bc) = clamped_plate_solution(2, 2, Vector3::zeros());
        let condensed: Vec<CondensedElement> = blocks
            .iter()
            .enumerate()
            .map(|(el, b)| condense(b, el).unwrap())
            .collect();
        let system = assemble_global(&mesh, &layout, &condensed, &[], &bc);
        let mut dense = DMatrix::<f64>::zeros(system.n, system.n);
        for &(i, j, v) in &system.triplets {
            dense[(i, j)] += v;
        }
        let asym = (&dense - dense.transpose()).norm() / dense.norm();
        assert!(asym < 1e-9, "global asymmetry {asym}");
        // Cholesky on the reduced matrix must succeed (positive definite).
        let reduced = apply_dirichlet(&system, &bc).unwrap();
        assert!(reduced.mat.sp_cholesky(faer::Side::Lower).is_ok());
    }

    #[test]
    fn unconstrained_shell_reports_rigid_body_failure() {
        let mesh = plane_mesh(2, 1);
        let bd = classify_boundary(&mesh, &BcSpec::uniform(EdgeKind::Free)).unwrap();
        let mat = MaterialParams::new(100.0, 0.0, 0.1);
        let asm = Assembler::new(&mesh, mat).with_boundary(&bd);
        let blocks = all_blocks(&asm);
        let layout = DofLayout::from_mesh(&mesh);
        let bc = DirichletBc::none(&layout);
        let err = solve_condensed(&mesh, &layout, &blocks, &[], &bc).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("rigid-body"), "unexpected message: {msg}");
    }

    #[test]
    fn pinned_corner_constrains_normal_displacement() {
        // Plate under in-plane load, pinned at one corner: u.n = 0 there.
        let mesh = plane_mesh(2, 1);
        let spec = BcSpec {
            segments: vec![
                (
                    Box::new(|p: &crate::mesh::EdgeProbe| p.midpoint.x < 1e-9),
                    EdgeKind::Clamped,
                ),
                (Box::new(|_| true), EdgeKind::Free),
            ],
            corner_overrides: vec![(Vector3::new(1.0, 1.0, 0.0), CornerKind::Pinned)],
        };
        let bd = classify_boundary(&mesh, &spec).unwrap();
        let mat = MaterialParams::new(100.0, 0.0, 0.1);
        let asm = Assembler::new(&mesh, mat)
            .with_body_load(Vector3::new(0.0, 0.0, -0.5))
            .with_boundary(&bd);
        let blocks = all_blocks(&asm);
        let layout = DofLayout::from_mesh(&mesh);
        let bc = dirichlet_from_boundary(&mesh, &layout, &bd).unwrap();
        assert!(!bc.node_rotations.is_empty());
        let sol = solve_condensed(&mesh, &layout, &blocks, &[], &bc).unwrap();
        let corner = mesh
            .nodes
            .iter()
            .position(|x| (x - Vector3::new(1.0, 1.0, 0.0)).norm() < 1e-12)
            .unwrap();
        // Normal here is z: the pinned corner may move in-plane but not out.
        assert_abs_diff_eq!(sol.u[corner].z, 0.0, epsilon = 1e-12);
        let free_corner = mesh
            .nodes
            .iter()
            .position(|x| (x - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-12)
            .unwrap();
        assert!(sol.u[free_corner].z.abs() > 1e-6);
    }
}
