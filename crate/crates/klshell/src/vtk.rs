//! Legacy ASCII VTK export of meshes and solution fields.
//!
//! Order-p elements are subdivided into p x p bilinear display cells built
//! from the element's own nodes. Point data: displacement vector and its
//! norm; cell data: the two dominant moment eigenvalues and the transverse
//! shear norm at the subcell center.

use std::io::Write;
use std::path::Path;

use nalgebra::Vector2;

use crate::assembly::DofLayout;
use crate::basis::GeometryMode;
use crate::mechanics::MaterialParams;
use crate::mesh::ShellMesh;
use crate::postproc::{derived_at, Evaluator, SampleDepth};
use crate::solver::SolutionFields;
use crate::Result;

/// Writes the mesh (optionally with solution fields) as a legacy ASCII VTK
/// unstructured grid.
pub fn export_vtk(
    mesh: &ShellMesh,
    solution: Option<(&SolutionFields, &DofLayout, MaterialParams, GeometryMode)>,
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("klshell shell solution\n");
    out.push_str("ASCII\n");
    out.push_str("DATASET UNSTRUCTURED_GRID\n");
    out.push_str(&format!("POINTS {} double\n", mesh.n_nodes()));
    for x in &mesh.nodes {
        out.push_str(&format!("{:.12e} {:.12e} {:.12e}\n", x.x, x.y, x.z));
    }

    let p = mesh.order;
    let cells_per_el = p * p;
    let n_cells = mesh.n_elements() * cells_per_el;
    out.push_str(&format!("CELLS {} {}\n", n_cells, 5 * n_cells));
    let m = p + 1;
    for el in 0..mesh.n_elements() {
        let conn = mesh.element_nodes(el);
        for j in 0..p {
            for i in 0..p {
                let c0 = conn[i + j * m];
                let c1 = conn[i + 1 + j * m];
                let c2 = conn[i + 1 + (j + 1) * m];
                let c3 = conn[i + (j + 1) * m];
                out.push_str(&format!("4 {c0} {c1} {c2} {c3}\n"));
            }
        }
    }
    out.push_str(&format!("CELL_TYPES {n_cells}\n"));
    for _ in 0..n_cells {
        out.push_str("9\n"); // VTK_QUAD
    }

    if let Some((sol, layout, material, mode)) = solution {
        out.push_str(&format!("POINT_DATA {}\n", mesh.n_nodes()));
        out.push_str("VECTORS displacement double\n");
        for u in &sol.u {
            out.push_str(&format!("{:.12e} {:.12e} {:.12e}\n", u.x, u.y, u.z));
        }
        out.push_str("SCALARS displacement_norm double 1\nLOOKUP_TABLE default\n");
        for u in &sol.u {
            out.push_str(&format!("{:.12e}\n", u.norm()));
        }

        let eval = Evaluator::new(mesh, layout, sol, material, mode);
        let mut m1 = Vec::with_capacity(n_cells);
        let mut m2 = Vec::with_capacity(n_cells);
        let mut qn = Vec::with_capacity(n_cells);
        for el in 0..mesh.n_elements() {
            for j in 0..p {
                for i in 0..p {
                    // Subcell center in the element reference square.
                    let r = Vector2::new(
                        -1.0 + (2.0 * i as f64 + 1.0) / p as f64,
                        -1.0 + (2.0 * j as f64 + 1.0) / p as f64,
                    );
                    let st = eval.state(el, r, SampleDepth::Gradient)?;
                    let d = derived_at(&st, &material);
                    m1.push(d.moment_eigenvalues[0]);
                    m2.push(d.moment_eigenvalues[1]);
                    qn.push(d.shear_norm);
                }
            }
        }
        out.push_str(&format!("CELL_DATA {n_cells}\n"));
        for (name, data) in [
            ("moment_eig_1", &m1),
            ("moment_eig_2", &m2),
            ("shear_norm", &qn),
        ] {
            out.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
            for v in data {
                out.push_str(&format!("{v:.12e}\n"));
            }
        }
    }

    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
