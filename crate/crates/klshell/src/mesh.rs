//! Multi-patch structured quadrilateral meshes of order p on charts, with the
//! edge skeleton, orientation signs for the inter-element jump, boundary
//! segment tags, and corner detection.
//!
//! Nodes duplicated along patch seams are merged geometrically; charts that
//! close on themselves declare a periodic direction and are merged by index
//! wrapping, which keeps the identification exact.

use std::collections::HashMap;

use nalgebra::{Vector2, Vector3};

use crate::basis::ReferenceElement;
use crate::geometry::{boundary_frame, Chart, SurfaceFrame};
use crate::{Error, Result};

/// One chart with its structured element grid.
pub struct Patch {
    pub chart: Box<dyn Chart>,
    pub nx: usize,
    pub ny: usize,
}

/// Order-p quadrilateral element.
///
/// `nodes` lists the (p+1)^2 global node ids lexicographically (xi fastest).
/// `edges` / `edge_sign` give, for each of the four counterclockwise local
/// edges, the skeleton edge id and whether the element's own traversal agrees
/// with the stored edge orientation (+1) or opposes it (-1). The sign is
/// exactly the jump sign of the element on that edge.
#[derive(Debug, Clone)]
pub struct Element {
    pub nodes: Vec<usize>,
    pub patch: usize,
    pub ref_min: Vector2<f64>,
    pub ref_max: Vector2<f64>,
    pub edges: [usize; 4],
    pub edge_sign: [i8; 4],
}

/// Skeleton edge; orientation follows the first parent found (T+), so the
/// discrete jump is `[[f]] = f|T+ - f|T-` on interior edges and `f|T` on
/// boundary edges.
#[derive(Debug, Clone)]
pub struct SkeletonEdge {
    /// p+1 node ids along the edge orientation.
    pub nodes: Vec<usize>,
    /// (element, local edge) of T+.
    pub parent_plus: (usize, usize),
    /// (element, local edge) of T-, absent on the boundary.
    pub parent_minus: Option<(usize, usize)>,
}

impl SkeletonEdge {
    pub fn is_boundary(&self) -> bool {
        self.parent_minus.is_none()
    }
}

pub struct ShellMesh {
    pub order: usize,
    pub nodes: Vec<Vector3<f64>>,
    pub elements: Vec<Element>,
    pub edges: Vec<SkeletonEdge>,
    pub patches: Vec<Patch>,
}

impl ShellMesh {
    pub fn element_nodes(&self, el: usize) -> &[usize] {
        &self.elements[el].nodes
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Maps element reference coordinates in [-1,1]^2 to patch coordinates.
    pub fn patch_coords(&self, el: usize, r: Vector2<f64>) -> (usize, Vector2<f64>) {
        let e = &self.elements[el];
        let mid = 0.5 * (e.ref_min + e.ref_max);
        let half = 0.5 * (e.ref_max - e.ref_min);
        (
            e.patch,
            Vector2::new(mid.x + r.x * half.x, mid.y + r.y * half.y),
        )
    }

    /// Half-extent of the element's patch rectangle (chain-rule scale of the
    /// affine map from [-1,1]^2 into patch coordinates).
    pub fn element_ref_scale(&self, el: usize) -> Vector2<f64> {
        let e = &self.elements[el];
        0.5 * (e.ref_max - e.ref_min)
    }

    /// Largest node-to-node distance within the element.
    pub fn element_diameter(&self, el: usize) -> f64 {
        let nodes = &self.elements[el].nodes;
        let mut d: f64 = 0.0;
        for (k, &a) in nodes.iter().enumerate() {
            for &b in nodes.iter().skip(k + 1) {
                d = d.max((self.nodes[a] - self.nodes[b]).norm());
            }
        }
        d
    }

    pub fn max_element_diameter(&self) -> f64 {
        (0..self.n_elements())
            .map(|e| self.element_diameter(e))
            .fold(0.0, f64::max)
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&e| self.edges[e].is_boundary())
    }
}

/// Builds a conforming mesh over the given patches.
///
/// Each patch is subdivided into `nx x ny` elements of order `p`. Nodes are
/// placed by evaluating the chart on the refined tensor grid; coincident
/// nodes across seams (or within a periodic patch) are merged.
pub fn build_structured_mesh(patches: Vec<Patch>, order: usize) -> Result<ShellMesh> {
    assert!(order >= 1, "element order must be at least 1");
    for p in &patches {
        if p.nx == 0 || p.ny == 0 {
            return Err(Error::Mesh("grid counts must be at least 1".into()));
        }
    }

    // Per-patch refined grids of candidate nodes in patch coordinates.
    let p = order;
    let mut coords: Vec<Vector3<f64>> = Vec::new();
    let mut patch_node_ids: Vec<Vec<usize>> = Vec::new();
    let mut min_h = f64::MAX;
    for patch in &patches {
        let (lo, hi) = patch.chart.domain();
        let periodic = patch.chart.periodic();
        let mx = p * patch.nx; // refined intervals along xi
        let my = p * patch.ny;
        let cols = if periodic[0] { mx } else { mx + 1 };
        let rows = if periodic[1] { my } else { my + 1 };
        let mut ids = vec![0usize; (mx + 1) * (my + 1)];
        for j in 0..=my {
            for i in 0..=mx {
                let (iw, jw) = (i % cols.max(1), j % rows.max(1));
                let idx = i + j * (mx + 1);
                if iw != i || jw != j {
                    // Periodic wrap refers back to the first row/column.
                    ids[idx] = ids[iw + jw * (mx + 1)];
                    continue;
                }
                let r = Vector2::new(
                    lo.x + (hi.x - lo.x) * i as f64 / mx as f64,
                    lo.y + (hi.y - lo.y) * j as f64 / my as f64,
                );
                let x = patch.chart.jet(r).x;
                ids[idx] = coords.len();
                coords.push(x);
            }
        }
        patch_node_ids.push(ids);
        // Element size estimate for the merge tolerance.
        let x00 = patch.chart.jet(lo).x;
        let x11 = patch.chart.jet(hi).x;
        let diag = (x11 - x00).norm().max(1e-3);
        min_h = min_h.min(diag / patch.nx.max(patch.ny) as f64);
    }

    // Merge geometrically coincident nodes (patch seams).
    let tol = 1e-9 * min_h;
    let remap = merge_nodes(&coords, tol);
    let mut merged: Vec<Vector3<f64>> = Vec::new();
    let mut final_id = vec![usize::MAX; coords.len()];
    for (i, &m) in remap.iter().enumerate() {
        if m == i {
            final_id[i] = merged.len();
            merged.push(coords[i]);
        }
    }
    for i in 0..coords.len() {
        final_id[i] = final_id[remap[i]];
    }

    // Element connectivity.
    let mut elements = Vec::new();
    for (pi, patch) in patches.iter().enumerate() {
        let (lo, hi) = patch.chart.domain();
        let mx = p * patch.nx;
        let ids = &patch_node_ids[pi];
        for ej in 0..patch.ny {
            for ei in 0..patch.nx {
                let mut nodes = Vec::with_capacity((p + 1) * (p + 1));
                for j in 0..=p {
                    for i in 0..=p {
                        let gi = ei * p + i;
                        let gj = ej * p + j;
                        nodes.push(final_id[ids[gi + gj * (mx + 1)]]);
                    }
                }
                let ref_min = Vector2::new(
                    lo.x + (hi.x - lo.x) * ei as f64 / patch.nx as f64,
                    lo.y + (hi.y - lo.y) * ej as f64 / patch.ny as f64,
                );
                let ref_max = Vector2::new(
                    lo.x + (hi.x - lo.x) * (ei + 1) as f64 / patch.nx as f64,
                    lo.y + (hi.y - lo.y) * (ej + 1) as f64 / patch.ny as f64,
                );
                elements.push(Element {
                    nodes,
                    patch: pi,
                    ref_min,
                    ref_max,
                    edges: [usize::MAX; 4],
                    edge_sign: [0; 4],
                });
            }
        }
    }

    let mut mesh = ShellMesh {
        order,
        nodes: merged,
        elements,
        edges: Vec::new(),
        patches,
    };
    build_skeleton(&mut mesh)?;
    Ok(mesh)
}

/// Union-find style merge of coincident coordinates via a spatial hash.
fn merge_nodes(coords: &[Vector3<f64>], tol: f64) -> Vec<usize> {
    let mut remap: Vec<usize> = (0..coords.len()).collect();
    let inv = 1.0 / tol.max(1e-300);
    let key = |x: &Vector3<f64>| {
        (
            (x.x * inv).floor() as i64,
            (x.y * inv).floor() as i64,
            (x.z * inv).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, x) in coords.iter().enumerate() {
        let (kx, ky, kz) = key(x);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(cands) = grid.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &c in cands {
                            if (coords[c] - x).norm() <= tol {
                                found = Some(c);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        match found {
            Some(c) => remap[i] = remap[c],
            None => grid.entry((kx, ky, kz)).or_default().push(i),
        }
    }
    remap
}

/// Extracts the skeleton and assigns jump signs.
///
/// The first element found traversing an edge becomes T+ and fixes the edge
/// orientation; the neighbor must traverse it in reverse (conforming,
/// consistently oriented atlas), otherwise construction fails.
pub fn build_skeleton(mesh: &mut ShellMesh) -> Result<()> {
    let re = ReferenceElement::new(mesh.order);
    let mut edge_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<SkeletonEdge> = Vec::new();
    for el in 0..mesh.elements.len() {
        for le in 0..4 {
            let locals = re.edge_nodes(le);
            let nodes: Vec<usize> = locals.iter().map(|&l| mesh.elements[el].nodes[l]).collect();
            let a = *nodes.first().unwrap();
            let b = *nodes.last().unwrap();
            let key = (a.min(b), a.max(b));
            match edge_of.get(&key) {
                None => {
                    let id = edges.len();
                    edge_of.insert(key, id);
                    edges.push(SkeletonEdge {
                        nodes,
                        parent_plus: (el, le),
                        parent_minus: None,
                    });
                    mesh.elements[el].edges[le] = id;
                    mesh.elements[el].edge_sign[le] = 1;
                }
                Some(&id) => {
                    if edges[id].parent_minus.is_some() {
                        return Err(Error::Mesh(format!(
                            "edge {:?} shared by more than two elements (non-manifold)",
                            key
                        )));
                    }
                    let reversed: Vec<usize> = edges[id].nodes.iter().rev().copied().collect();
                    if reversed != nodes {
                        return Err(Error::Mesh(format!(
                            "inconsistent edge traversal between elements {} and {}: {:?} vs {:?}",
                            edges[id].parent_plus.0, el, edges[id].nodes, nodes
                        )));
                    }
                    edges[id].parent_minus = Some((el, le));
                    mesh.elements[el].edges[le] = id;
                    mesh.elements[el].edge_sign[le] = -1;
                }
            }
        }
    }
    mesh.edges = edges;
    Ok(())
}

/// Discrete jump across an edge given per-parent values, `[[f]] = s+ f+ + s- f-`.
pub fn jump(edge: &SkeletonEdge, f_plus: f64, f_minus: Option<f64>) -> f64 {
    match (edge.parent_minus, f_minus) {
        (Some(_), Some(fm)) => f_plus - fm,
        _ => f_plus,
    }
}

// ---------------------------------------------------------------------------
// Boundary conditions
// ---------------------------------------------------------------------------

/// Support/load type of a boundary segment.
#[derive(Debug, Clone)]
pub enum EdgeKind {
    /// u = 0 (all components) and omega_t = 0.
    Clamped,
    /// u = 0, rotation free.
    Navier,
    /// Two displacement components fixed, the named axis free, rotation free.
    RigidDiaphragm { free_axis: usize },
    /// The flagged Cartesian components of u fixed to zero.
    Roller { fixed: [bool; 3] },
    /// Homogeneous natural conditions.
    Free,
    /// Prescribed boundary force per length and tangential moment.
    Neumann { traction: Vector3<f64>, moment: f64 },
}

impl EdgeKind {
    /// Cartesian u-components strongly prescribed on this segment.
    pub fn fixed_components(&self) -> [bool; 3] {
        match self {
            EdgeKind::Clamped | EdgeKind::Navier => [true; 3],
            EdgeKind::RigidDiaphragm { free_axis } => {
                let mut f = [true; 3];
                f[*free_axis] = false;
                f
            }
            EdgeKind::Roller { fixed } => *fixed,
            EdgeKind::Free | EdgeKind::Neumann { .. } => [false; 3],
        }
    }

    pub fn fixes_rotation(&self) -> bool {
        matches!(self, EdgeKind::Clamped)
    }

    /// Part of the Neumann-u boundary (no displacement component fixed).
    pub fn is_neumann_u(&self) -> bool {
        matches!(self, EdgeKind::Free | EdgeKind::Neumann { .. })
    }
}

/// Corner condition at a boundary kink.
#[derive(Debug, Clone, Copy)]
pub enum CornerKind {
    /// Normal displacement fixed to zero.
    Pinned,
    /// Concentrated Kirchhoff force.
    Force(f64),
}

/// Geometric information handed to segment classifiers.
pub struct EdgeProbe {
    pub midpoint: Vector3<f64>,
    pub patch: usize,
    pub patch_mid: Vector2<f64>,
}

type SegmentRule = Box<dyn Fn(&EdgeProbe) -> bool + Send + Sync>;

/// Boundary specification: ordered segment rules (first match wins) plus
/// corner overrides matched by position.
pub struct BcSpec {
    pub segments: Vec<(SegmentRule, EdgeKind)>,
    pub corner_overrides: Vec<(Vector3<f64>, CornerKind)>,
}

impl BcSpec {
    pub fn uniform(kind: EdgeKind) -> Self {
        BcSpec {
            segments: vec![(Box::new(|_| true), kind)],
            corner_overrides: Vec::new(),
        }
    }

    pub fn new(segments: Vec<(SegmentRule, EdgeKind)>) -> Self {
        BcSpec {
            segments,
            corner_overrides: Vec::new(),
        }
    }
}

/// A detected boundary corner.
#[derive(Debug, Clone)]
pub struct Corner {
    pub node: usize,
    pub kind: CornerKind,
    /// Incoming and outgoing boundary edges (traversal order).
    pub edge_in: usize,
    pub edge_out: usize,
}

/// Classified boundary: per-edge kinds (boundary edges only) and corners.
pub struct BoundaryData {
    /// Indexed by skeleton edge id; `None` for interior edges.
    pub edge_kinds: Vec<Option<EdgeKind>>,
    pub corners: Vec<Corner>,
}

impl BoundaryData {
    pub fn kind(&self, edge: usize) -> Option<&EdgeKind> {
        self.edge_kinds[edge].as_ref()
    }
}

/// Tags every boundary edge with a segment kind and detects corners.
///
/// Corners are boundary vertices where differently-tagged segments meet or
/// where the chart tangent kinks by more than one degree.
pub fn classify_boundary(mesh: &ShellMesh, spec: &BcSpec) -> Result<BoundaryData> {
    let re = ReferenceElement::new(mesh.order);
    let mut edge_kinds: Vec<Option<EdgeKind>> = vec![None; mesh.edges.len()];
    for e in mesh.boundary_edges().collect::<Vec<_>>() {
        let (el, le) = mesh.edges[e].parent_plus;
        let (r_mid, _) = re.edge_point(le, 0.0);
        let (patch, patch_mid) = mesh.patch_coords(el, r_mid);
        let midpoint = mesh.patches[patch].chart.jet(patch_mid).x;
        let probe = EdgeProbe {
            midpoint,
            patch,
            patch_mid,
        };
        let kind = spec
            .segments
            .iter()
            .find(|(rule, _)| rule(&probe))
            .map(|(_, k)| k.clone())
            .ok_or_else(|| {
                Error::Spec(format!(
                    "boundary edge at {:?} not covered by any segment rule",
                    midpoint
                ))
            })?;
        edge_kinds[e] = Some(kind);
    }

    // Vertex-to-boundary-edge incidence; each boundary vertex of a manifold
    // surface with boundary touches exactly two boundary edges.
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in mesh.boundary_edges() {
        let nodes = &mesh.edges[e].nodes;
        incident.entry(*nodes.first().unwrap()).or_default().push(e);
        incident.entry(*nodes.last().unwrap()).or_default().push(e);
    }

    let mut corners = Vec::new();
    for (&node, edges) in &incident {
        if edges.len() != 2 {
            return Err(Error::Mesh(format!(
                "boundary vertex {node} touched by {} boundary edges",
                edges.len()
            )));
        }
        // Order the pair as (incoming, outgoing) with respect to the
        // boundary traversal induced by the element orientation.
        let ends_at = |e: usize| {
            let edge = &mesh.edges[e];
            let start = *edge.nodes.first().unwrap();
            let sign = boundary_traversal_sign(mesh, e);
            if sign > 0 {
                start != node
            } else {
                start == node
            }
        };
        let (e_in, e_out) = if ends_at(edges[0]) {
            (edges[0], edges[1])
        } else {
            (edges[1], edges[0])
        };

        let tag_change = !same_kind(
            edge_kinds[e_in].as_ref().unwrap(),
            edge_kinds[e_out].as_ref().unwrap(),
        );
        let t_in = chart_edge_tangent(mesh, e_in, node)?;
        let t_out = chart_edge_tangent(mesh, e_out, node)?;
        // t_in points along the traversal into the vertex, t_out away from it.
        let kink = t_in.dot(&t_out).clamp(-1.0, 1.0).acos();
        if tag_change || kink > 1.0_f64.to_radians() {
            let kind = spec
                .corner_overrides
                .iter()
                .find(|(x, _)| (x - mesh.nodes[node]).norm() < 1e-8 * (1.0 + x.norm()))
                .map(|(_, k)| *k)
                .unwrap_or(CornerKind::Force(0.0));
            corners.push(Corner {
                node,
                kind,
                edge_in: e_in,
                edge_out: e_out,
            });
        }
    }
    corners.sort_by_key(|c| c.node);

    Ok(BoundaryData {
        edge_kinds,
        corners,
    })
}

/// +1 when the edge orientation agrees with the boundary traversal induced by
/// counterclockwise elements (it always does for edges stored from their only
/// parent, by construction).
fn boundary_traversal_sign(mesh: &ShellMesh, edge: usize) -> i8 {
    let (el, le) = mesh.edges[edge].parent_plus;
    mesh.elements[el].edge_sign[le]
}

fn same_kind(a: &EdgeKind, b: &EdgeKind) -> bool {
    use EdgeKind::*;
    match (a, b) {
        (Clamped, Clamped) | (Navier, Navier) | (Free, Free) => true,
        (RigidDiaphragm { free_axis: x }, RigidDiaphragm { free_axis: y }) => x == y,
        (Roller { fixed: x }, Roller { fixed: y }) => x == y,
        (Neumann { traction: t1, moment: m1 }, Neumann { traction: t2, moment: m2 }) => {
            (t1 - t2).norm() == 0.0 && m1 == m2
        }
        _ => false,
    }
}

/// Chart tangent of a boundary edge at one of its end vertices, oriented
/// along the edge traversal. Uses the smooth chart, so curved but smooth
/// boundary loops do not produce spurious corners on coarse meshes.
fn chart_edge_tangent(mesh: &ShellMesh, edge: usize, node: usize) -> Result<Vector3<f64>> {
    let re = ReferenceElement::new(mesh.order);
    let (el, le) = mesh.edges[edge].parent_plus;
    let at_start = mesh.edges[edge].nodes.first() == Some(&node);
    let rho = if at_start { -1.0 } else { 1.0 };
    let (r, dr) = re.edge_point(le, rho);
    let (patch, pr) = mesh.patch_coords(el, r);
    let scale = mesh.element_ref_scale(el);
    let jet = mesh.patches[patch].chart.jet(pr);
    let frame = SurfaceFrame::from_jet(&jet)?;
    let dir = Vector2::new(dr.x * scale.x, dr.y * scale.y);
    Ok(boundary_frame(&frame, dir)?.tangent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CylinderChart, PlaneChart, SphereFace, SphereFaceChart};
    use approx::assert_abs_diff_eq;

    fn unit_plane_mesh(n: usize, p: usize) -> ShellMesh {
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

    #[test]
    fn single_element_counts() {
        let mesh = unit_plane_mesh(1, 1);
        assert_eq!(mesh.n_elements(), 1);
        assert_eq!(mesh.n_nodes(), 4);
        assert_eq!(mesh.edges.len(), 4);
        assert!(mesh.edges.iter().all(|e| e.is_boundary()));
    }

    #[test]
    fn two_by_two_counts() {
        // Combinatorial oracle: 4 elements, 9 nodes, 12 edges of which 4 are
        // interior (shared) and 8 lie on the boundary.
        let mesh = unit_plane_mesh(2, 1);
        assert_eq!(mesh.n_elements(), 4);
        assert_eq!(mesh.n_nodes(), 9);
        assert_eq!(mesh.edges.len(), 12);
        let interior = mesh.edges.iter().filter(|e| !e.is_boundary()).count();
        assert_eq!(interior, 4);
        assert_eq!(mesh.edges.len() - interior, 8);
    }

    #[test]
    fn skeleton_counts_match_formula() {
        // 2n(n+1) edges, 2n(n-1) interior, for n up to 8.
        for n in 1..=8 {
            let mesh = unit_plane_mesh(n, 1);
            assert_eq!(mesh.edges.len(), 2 * n * (n + 1), "n = {n}");
            let interior = mesh.edges.iter().filter(|e| !e.is_boundary()).count();
            assert_eq!(interior, 2 * n * (n - 1), "n = {n}");
        }
    }

    #[test]
    fn every_element_edge_has_consistent_backreference() {
        let mesh = unit_plane_mesh(3, 2);
        for (el, elem) in mesh.elements.iter().enumerate() {
            for le in 0..4 {
                let edge = &mesh.edges[elem.edges[le]];
                let mine = (el, le);
                let ok = edge.parent_plus == mine || edge.parent_minus == Some(mine);
                assert!(ok, "element {el} edge {le} not referenced back");
                let expected_sign = if edge.parent_plus == mine { 1 } else { -1 };
                assert_eq!(elem.edge_sign[le], expected_sign);
            }
        }
    }

    #[test]
    fn interior_edges_have_two_parents_with_opposite_signs() {
        let mesh = unit_plane_mesh(4, 3);
        for edge in &mesh.edges {
            if let Some((em, lm)) = edge.parent_minus {
                let (ep, lp) = edge.parent_plus;
                assert_eq!(mesh.elements[ep].edge_sign[lp], 1);
                assert_eq!(mesh.elements[em].edge_sign[lm], -1);
            }
        }
    }

    #[test]
    fn jump_values() {
        let mesh = unit_plane_mesh(2, 1);
        let interior = mesh.edges.iter().find(|e| !e.is_boundary()).unwrap();
        let boundary = mesh.edges.iter().find(|e| e.is_boundary()).unwrap();
        assert_abs_diff_eq!(jump(interior, 3.0, Some(3.0)), 0.0);
        assert_abs_diff_eq!(jump(interior, 5.0, Some(2.0)), 3.0);
        // Swapping roles flips the sign.
        assert_abs_diff_eq!(jump(interior, 2.0, Some(5.0)), -3.0);
        assert_abs_diff_eq!(jump(boundary, 4.0, None), 4.0);
    }

    #[test]
    fn shared_edges_reference_identical_coordinates() {
        let mesh = unit_plane_mesh(3, 3);
        for edge in &mesh.edges {
            if let Some((em, lm)) = edge.parent_minus {
                let re = ReferenceElement::new(mesh.order);
                let plus_nodes: Vec<usize> = re
                    .edge_nodes(edge.parent_plus.1)
                    .iter()
                    .map(|&l| mesh.elements[edge.parent_plus.0].nodes[l])
                    .collect();
                let minus_nodes: Vec<usize> = re
                    .edge_nodes(lm)
                    .iter()
                    .map(|&l| mesh.elements[em].nodes[l])
                    .collect();
                for (a, b) in plus_nodes.iter().zip(minus_nodes.iter().rev()) {
                    assert_eq!(a, b);
                    assert_abs_diff_eq!((mesh.nodes[*a] - mesh.nodes[*b]).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn periodic_chart_merges_seam_nodes() {
        // A full cylinder hoop, periodic in the arc direction: the node grid
        // loses one column compared to the open chart.
        #[derive(Clone)]
        struct Hoop;
        impl Chart for Hoop {
            fn jet(&self, r: Vector2<f64>) -> crate::geometry::GeometryJet {
                CylinderChart {
                    radius: 1.0,
                    alpha0: 0.0,
                    span: 2.0 * std::f64::consts::PI,
                    y_min: 0.0,
                    y_max: 1.0,
                }
                .jet(r)
            }
            fn domain(&self) -> (Vector2<f64>, Vector2<f64>) {
                (
                    Vector2::new(0.0, 0.0),
                    Vector2::new(2.0 * std::f64::consts::PI, 1.0),
                )
            }
            fn periodic(&self) -> [bool; 2] {
                [true, false]
            }
        }
        let (n, p) = (4usize, 2usize);
        let mesh = build_structured_mesh(
            vec![Patch {
                chart: Box::new(Hoop),
                nx: n,
                ny: n,
            }],
            p,
        )
        .unwrap();
        let open = (p * n + 1) * (p * n + 1);
        assert_eq!(mesh.n_nodes(), open - (p * n + 1));
        // All edges interior in the periodic direction except top/bottom rows.
        let boundary = mesh.edges.iter().filter(|e| e.is_boundary()).count();
        assert_eq!(boundary, 2 * n);
    }

    #[test]
    fn hemisphere_five_patch_mesh_is_conforming() {
        let radius = 10.0;
        let n = 2;
        let p = 2;
        let faces = [
            SphereFace::Top,
            SphereFace::PlusX,
            SphereFace::MinusX,
            SphereFace::PlusY,
            SphereFace::MinusY,
        ];
        let mesh = build_structured_mesh(
            faces
                .iter()
                .map(|&face| Patch {
                    chart: Box::new(SphereFaceChart { radius, face }),
                    nx: n,
                    ny: n,
                })
                .collect(),
            p,
        )
        .unwrap();
        // 5 N^2 - 8 N + 4 merged nodes for N = p n + 1 (8 seams, 4 top
        // corners shared by three patches).
        let nn = p * n + 1;
        assert_eq!(mesh.n_nodes(), 5 * nn * nn - 8 * nn + 4);
        assert_eq!(mesh.n_elements(), 5 * n * n);
        // Equator boundary: n edges on each of the four side patches.
        let boundary = mesh.edges.iter().filter(|e| e.is_boundary()).count();
        assert_eq!(boundary, 4 * n);
        // All nodes on the sphere.
        for x in &mesh.nodes {
            assert_abs_diff_eq!(x.norm(), radius, epsilon = 1e-12);
        }
    }

    #[test]
    fn scordelis_lo_classification() {
        let theta = 80.0_f64.to_radians();
        let chart = CylinderChart {
            radius: 25.0,
            alpha0: 130.0_f64.to_radians(),
            span: theta,
            y_min: 0.0,
            y_max: 50.0,
        };
        let mesh = build_structured_mesh(
            vec![Patch {
                chart: Box::new(chart),
                nx: 4,
                ny: 4,
            }],
            2,
        )
        .unwrap();
        let spec = BcSpec::new(vec![
            (
                Box::new(|p: &EdgeProbe| p.midpoint.y.abs() < 1e-9 || (p.midpoint.y - 50.0).abs() < 1e-9),
                EdgeKind::RigidDiaphragm { free_axis: 1 },
            ),
            (Box::new(|_| true), EdgeKind::Free),
        ]);
        let bd = classify_boundary(&mesh, &spec).unwrap();
        let mut diaphragm = 0;
        let mut free = 0;
        for e in mesh.boundary_edges() {
            match bd.kind(e).unwrap() {
                EdgeKind::RigidDiaphragm { free_axis } => {
                    assert_eq!(*free_axis, 1);
                    diaphragm += 1;
                }
                EdgeKind::Free => free += 1,
                other => panic!("unexpected kind {other:?}"),
            }
        }
        assert_eq!(diaphragm, 8);
        assert_eq!(free, 8);
        // No edge fixes the rotation (all of the boundary is Neumann-omega).
        assert!(bd
            .edge_kinds
            .iter()
            .flatten()
            .all(|k| !k.fixes_rotation()));
        // Four geometric corners where diaphragm and free edges meet.
        assert_eq!(bd.corners.len(), 4);
    }

    #[test]
    fn all_clamped_and_all_free_partitions() {
        let mesh = unit_plane_mesh(2, 2);
        let clamped = classify_boundary(&mesh, &BcSpec::uniform(EdgeKind::Clamped)).unwrap();
        for e in mesh.boundary_edges() {
            let k = clamped.kind(e).unwrap();
            assert_eq!(k.fixed_components(), [true; 3]);
            assert!(k.fixes_rotation());
            assert!(!k.is_neumann_u());
        }
        let free = classify_boundary(&mesh, &BcSpec::uniform(EdgeKind::Free)).unwrap();
        for e in mesh.boundary_edges() {
            let k = free.kind(e).unwrap();
            assert_eq!(k.fixed_components(), [false; 3]);
            assert!(!k.fixes_rotation());
            assert!(k.is_neumann_u());
        }
        // The flat square still has four geometric corners.
        assert_eq!(free.corners.len(), 4);
    }

    #[test]
    fn smooth_closed_boundary_has_no_corners() {
        // Hemisphere equator: smooth circle, patch corners must not be
        // reported as Kirchhoff corners.
        let faces = [
            SphereFace::Top,
            SphereFace::PlusX,
            SphereFace::MinusX,
            SphereFace::PlusY,
            SphereFace::MinusY,
        ];
        let mesh = build_structured_mesh(
            faces
                .iter()
                .map(|&face| Patch {
                    chart: Box::new(SphereFaceChart { radius: 10.0, face }),
                    nx: 2,
                    ny: 2,
                })
                .collect(),
            1,
        )
        .unwrap();
        let bd = classify_boundary(&mesh, &BcSpec::uniform(EdgeKind::Clamped)).unwrap();
        assert_eq!(bd.corners.len(), 0);
    }

    #[test]
    fn uncovered_boundary_is_an_error() {
        let mesh = unit_plane_mesh(1, 1);
        let spec = BcSpec::new(vec![(
            Box::new(|p: &EdgeProbe| p.midpoint.y < 0.1),
            EdgeKind::Clamped,
        )]);
        assert!(classify_boundary(&mesh, &spec).is_err());
    }
}
