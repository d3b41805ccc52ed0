// temporary diagnostic: expose the alternating-step trajectory on tiles
use snkit_core::{CMat, C64, Tolerances};
use snkit_core::tensor::{Bipartition};
use snkit_core::linalg;

#[test]
fn polish_trajectory() {
    let tiles = snkit_core::states::tiles_upb().complement_state().unwrap();
    let tol = Tolerances::default();
    let basis = tiles.range_basis(tol.rank);
    let (dl, dr) = (3usize, 3usize);
    let k = 2usize;
    let scaled: Vec<CMat> = basis.iter().map(|(p, v)| snkit_core::tensor::reshape_vector(v, dl, dr) * C64::new(p.sqrt(), 0.0)).collect();
    let r = scaled.len();
    let m_cols = 12usize;
    let p_norms: Vec<f64> = scaled.iter().map(|a| linalg::frob_norm(a).powi(2)).collect();
    let mut rng = linalg::seeded_rng(0, 1);
    let mut v = linalg::orthonormalize_rows(&linalg::gaussian_matrix(r, m_cols, &mut rng));
    let members = |v: &CMat| -> Vec<CMat> {
        (0..m_cols).map(|j| {
            let mut acc = CMat::zeros(dl, dr);
            for i in 0..r { acc += &scaled[i] * v[(i, j)]; }
            acc
        }).collect()
    };
    let pen = |ms: &Vec<CMat>| -> f64 {
        ms.iter().map(|m| linalg::singular_values(m).iter().skip(k).map(|s| s*s).sum::<f64>()).sum()
    };
    for it in 0..3000 {
        let ms = members(&v);
        let f = pen(&ms);
        if it % 200 == 0 || f < 1e-26 { println!("it {it}: f = {f:.3e}"); }
        if f < 1e-28 { break; }
        let mut next = CMat::zeros(r, m_cols);
        for (j, mj) in ms.iter().enumerate() {
            let (u, s, v_t) = linalg::svd_sorted(mj);
            let mut trunc = CMat::zeros(dl, dr);
            for c in 0..k.min(s.len()) { trunc += u.column(c) * v_t.row(c) * C64::new(s[c], 0.0); }
            for i in 0..r { next[(i, j)] = linalg::frob_inner(&scaled[i], &trunc) / C64::new(p_norms[i], 0.0); }
        }
        v = linalg::orthonormalize_rows(&next);
    }
    let f = pen(&members(&v));
    println!("final f = {f:.3e}");
}
