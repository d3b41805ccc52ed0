use snkit_core::{CMat, C64, Tolerances};
use snkit_core::linalg;
use snkit_core::proj::{LocalProjector, Side, apply_local};
use snkit_core::witness::{max_entangled_overlap, SeesawOpts};

#[test]
fn replicate_seesaw_path() {
    let tiles = snkit_core::states::tiles_upb().complement_state().unwrap();
    let tol = Tolerances::default();
    let mut projs: Vec<LocalProjector> = vec![
        LocalProjector::coordinate(3, &[0]).unwrap(),
        LocalProjector::coordinate(3, &[1]).unwrap(),
        LocalProjector::coordinate(3, &[2]).unwrap(),
    ];
    let mut rng = linalg::seeded_rng(3, 0xC0DE);
    for _ in 0..8 { projs.push(LocalProjector::haar(3, 1, &mut rng).unwrap()); }
    for (i, p) in projs.iter().enumerate() {
        let out = apply_local(&tiles, p, Side::A, &tol).unwrap();
        let Some(sigma) = out.op else { continue };
        let evs = sigma.eigenvalues();
        println!("proj {i}: trace {:.4} min eig {:.3e}", sigma.trace(), evs.last().unwrap());
        let res = max_entangled_overlap(&sigma, &SeesawOpts { restarts: 8, max_iters: 500, seed: 0 });
        match res { Ok(r) => println!("  value {:.6}", r.value), Err(e) => println!("  err {e}") }
    }
}
