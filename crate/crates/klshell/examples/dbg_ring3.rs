use klshell::assembly::{corner_forces, Assembler, DofLayout, ElementBlocks};
use klshell::basis::GeometryMode;
use klshell::benchmarks::make_case;
use klshell::mesh::{classify_boundary, BcSpec, EdgeKind, EdgeProbe};
use klshell::postproc::{external_work, stored_energy, Evaluator};
use klshell::solver::{dirichlet_from_boundary, solve_condensed};
use nalgebra::Vector3;

fn run(mt: f64, traction: Vector3<f64>, n: usize) -> (f64, f64) {
    let case = make_case("ring_3").unwrap();
    let mesh = case.build_mesh(n, 3).unwrap();
    let spec = BcSpec::new(vec![
        (
            Box::new(|pr: &EdgeProbe| pr.patch_mid.y < 1e-9),
            EdgeKind::Neumann { traction, moment: mt },
        ),
        (Box::new(|_| true), EdgeKind::Navier),
    ]);
    let boundary = classify_boundary(&mesh, &spec).unwrap();
    let asm = Assembler::new(&mesh, case.material)
        .with_body_load(case.body_load)
        .with_boundary(&boundary);
    let blocks: Vec<ElementBlocks> = (0..mesh.n_elements())
        .map(|el| asm.element_blocks(el).unwrap())
        .collect();
    let layout = DofLayout::from_mesh(&mesh);
    let bc = dirichlet_from_boundary(&mesh, &layout, &boundary).unwrap();
    let cl = corner_forces(&mesh, &boundary, GeometryMode::Isoparametric).unwrap();
    let sol = solve_condensed(&mesh, &layout, &blocks, &cl, &bc).unwrap();
    let eval = Evaluator::new(&mesh, &layout, &sol, case.material, GeometryMode::Isoparametric);
    let e = stored_energy(&eval, 5).unwrap();
    let w = external_work(&eval, &boundary, &cl, case.body_load, 5).unwrap();
    (e, w)
}

fn main() {
    let p_hat = Vector3::new(40.0, 60.0, -100.0);
    for (label, mt, tr) in [
        ("as-spec: mt=+100, p", 100.0, p_hat),
        ("mt=-100, p", -100.0, p_hat),
        ("mt=0, p", 0.0, p_hat),
        ("mt=+100, p=0", 100.0, Vector3::zeros()),
    ] {
        let (e, w) = run(mt, tr, 12);
        println!("{label}: e = {e:.6}, W_ext = {w:.6}, 2e/W = {:.6}", 2.0 * e / w);
    }
    println!("e_ref = 236.455536");
}
