use snkit_core::{CMat, C64};
use snkit_core::linalg;
use nalgebra::ComplexField;

#[test]
fn seesaw_monotonicity_probe() {
    let tiles = snkit_core::states::tiles_upb().complement_state().unwrap();
    let tol = snkit_core::Tolerances::default();
    let mut rng = linalg::seeded_rng(0xC0DE, 0);
    // rank-1 projector on A
    let u = linalg::haar_unitary(3, &mut rng);
    let vcol = u.columns(0, 1).into_owned();
    let p = &vcol * vcol.adjoint();
    let pi = p.kronecker(&CMat::identity(3, 3));
    let sigma = &pi * tiles.matrix() * pi.adjoint();
    let sigma = snkit_core::DensityOp::new(sigma, tiles.dims().clone()).unwrap().normalize();
    let m = 3usize;
    let mat = sigma.matrix();
    let obj = |u: &CMat| -> f64 {
        let v = snkit_core::tensor::flatten_matrix(u);
        (v.dotc(&(mat * &v))).re / m as f64
    };
    let mut uu = CMat::identity(m, m);
    let mut val = obj(&uu);
    for it in 0..40 {
        let v = snkit_core::tensor::flatten_matrix(&uu);
        let w = mat * &v;
        let g = snkit_core::tensor::reshape_vector(&w, m, m);
        let svals = linalg::singular_values(&g);
        uu = linalg::polar_unitary(&g);
        let next = obj(&uu);
        println!("it {it}: {val:.9} -> {next:.9} (sum sigma G = {:.9}, defect {:.2e})", svals.iter().sum::<f64>(), linalg::orthonormality_defect(&uu));
        if next < val - 1e-12 { println!("DECREASE"); }
        val = next;
        if it > 6 { break; }
    }
    let _ = tol;
}
