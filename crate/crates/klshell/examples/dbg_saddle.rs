use klshell::assembly::{Assembler, DofLayout};
use klshell::mechanics::MaterialParams;
use klshell::mesh::{build_structured_mesh, classify_boundary, BcSpec, EdgeKind, Patch};
use klshell::geometry::PlaneChart;
use klshell::solver::*;
use nalgebra::Vector3;

fn main() {
    let mesh = build_structured_mesh(
        vec![Patch { chart: Box::new(PlaneChart::unit()), nx: 2, ny: 2 }], 2).unwrap();
    let bd = classify_boundary(&mesh, &BcSpec::uniform(EdgeKind::Clamped)).unwrap();
    let mat = MaterialParams::new(500.0, 0.3, 0.05);
    let asm = Assembler::new(&mesh, mat)
        .with_body_load(Vector3::new(0.1, -0.2, -1.0))
        .with_boundary(&bd);
    let blocks: Vec<_> = (0..mesh.n_elements()).map(|el| asm.element_blocks(el).unwrap()).collect();
    let layout = DofLayout::from_mesh(&mesh);
    let bc = dirichlet_from_boundary(&mesh, &layout, &bd).unwrap();
    let sol_c = solve_condensed(&mesh, &layout, &blocks, &[], &bc).unwrap();
    let sol_s = solve_saddle(&mesh, &layout, &blocks, &[], &bc).unwrap();
    let du = sol_c.u.iter().zip(&sol_s.u).map(|(a,b)| (a-b).norm()).fold(0.0, f64::max);
    let su = sol_s.u.iter().map(|v| v.norm()).fold(0.0, f64::max);
    println!("max|du| = {du:.3e}, scale u = {su:.3e}");
    let dw = sol_c.w.iter().zip(&sol_s.w).map(|(a,b)| (a-b).abs()).fold(0.0, f64::max);
    let sw = sol_s.w.iter().map(|v| v.abs()).fold(0.0_f64, f64::max);
    println!("max|dw| = {dw:.3e}, scale w = {sw:.3e}");
    for (e, edge) in mesh.edges.iter().enumerate() {
        let int = if edge.is_boundary() { "bnd" } else { "int" };
        let wc: Vec<f64> = (0..=mesh.order).map(|k| sol_c.w[e*(mesh.order+1)+k]).collect();
        let ws: Vec<f64> = (0..=mesh.order).map(|k| sol_s.w[e*(mesh.order+1)+k]).collect();
        println!("edge {e} ({int}): c = {wc:?}");
        println!("          s = {ws:?}");
    }
    let dm = sol_c.moments.iter().zip(&sol_s.moments).map(|(a,b)| (a-b).norm()).fold(0.0, f64::max);
    println!("max|dm| = {dm:.3e}");
}
