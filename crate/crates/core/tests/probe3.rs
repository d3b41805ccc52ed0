use snkit_core::{CMat, C64, Tolerances};
use snkit_core::linalg;

#[test]
fn polish_by_column_count() {
    let tiles = snkit_core::states::tiles_upb().complement_state().unwrap();
    let tol = Tolerances::default();
    let basis = tiles.range_basis(tol.rank);
    let (dl, dr, k) = (3usize, 3usize, 2usize);
    let scaled: Vec<CMat> = basis.iter().map(|(p, v)| snkit_core::tensor::reshape_vector(v, dl, dr) * C64::new(p.sqrt(), 0.0)).collect();
    let r = scaled.len();
    let p_norms: Vec<f64> = scaled.iter().map(|a| linalg::frob_norm(a).powi(2)).collect();
    for m_cols in [4usize, 5, 6, 8, 12] {
        let mut best = f64::INFINITY;
        for restart in 0..6u64 {
            let mut rng = linalg::seeded_rng(restart, 1);
            let mut v = linalg::orthonormalize_rows(&linalg::gaussian_matrix(r, m_cols, &mut rng));
            for _ in 0..2500 {
                let ms: Vec<CMat> = (0..m_cols).map(|j| {
                    let mut acc = CMat::zeros(dl, dr);
                    for i in 0..r { acc += &scaled[i] * v[(i, j)]; }
                    acc
                }).collect();
                let mut next = CMat::zeros(r, m_cols);
                for (j, mj) in ms.iter().enumerate() {
                    let (u, s, v_t) = linalg::svd_sorted(mj);
                    let mut trunc = CMat::zeros(dl, dr);
                    for c in 0..k.min(s.len()) { trunc += u.column(c) * v_t.row(c) * C64::new(s[c], 0.0); }
                    for i in 0..r { next[(i, j)] = linalg::frob_inner(&scaled[i], &trunc) / C64::new(p_norms[i], 0.0); }
                }
                v = linalg::orthonormalize_rows(&next);
            }
            let f: f64 = (0..m_cols).map(|j| {
                let mut acc = CMat::zeros(dl, dr);
                for i in 0..r { acc += &scaled[i] * v[(i, j)]; }
                linalg::singular_values(&acc).iter().skip(k).map(|s| s*s).sum::<f64>()
            }).sum();
            best = best.min(f);
        }
        println!("m = {m_cols}: best f = {best:.3e}");
    }
}
