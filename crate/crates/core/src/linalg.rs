//! Dense complex linear-algebra helpers shared by the higher modules.

use nalgebra::ComplexField;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::{C64, CMat, CVec};

/// `(m + m^dagger) / 2`.
pub fn hermitize(m: &CMat) -> CMat {
    let half = C64::new(0.5, 0.0);
    (m + m.adjoint()) * half
}

/// Largest entry magnitude; 0 for empty matrices.
pub fn max_abs_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |m - m^dagger|` relative to `max |m|` (0 for the zero matrix).
pub fn herm_deviation(m: &CMat) -> f64 {
    let scale = max_abs_entry(m);
    if scale == 0.0 {
        return 0.0;
    }
    let diff = m - m.adjoint();
    max_abs_entry(&diff) / scale
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted in
/// nonincreasing order, eigenvectors as matching columns.
pub fn herm_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let se = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Eigenvalues only, sorted in nonincreasing order.
pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    let vals = hermitize(m).symmetric_eigenvalues();
    let mut vals: Vec<f64> = vals.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

/// Thin SVD with singular values sorted in nonincreasing order.
/// Returns `(u, sigma, v_t)` with `m = u * diag(sigma) * v_t`.
pub fn svd_sorted(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let s = svd.singular_values;
    let k = s.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
    let sigma: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let mut us = CMat::zeros(u.nrows(), k);
    let mut vts = CMat::zeros(k, v_t.ncols());
    for (j, &i) in order.iter().enumerate() {
        us.set_column(j, &u.column(i));
        vts.set_row(j, &v_t.row(i));
    }
    (us, sigma, vts)
}

/// Singular values only, sorted in nonincreasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Number of singular values above `tol * sigma_max`; 0 for the zero matrix.
pub fn numerical_rank(m: &CMat, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(&smax) if smax <= 0.0 => 0,
        Some(&smax) => s.iter().filter(|&&x| x > tol * smax).count(),
    }
}

/// Unitary polar factor of a square matrix (`m = U P`, `U` unitary).
///
/// Zero singular values leave the factor well defined but not unique; the SVD
/// convention fills those directions, which amounts to an identity-style
/// completion.
pub fn polar_unitary(m: &CMat) -> CMat {
    assert_eq!(m.nrows(), m.ncols(), "polar factor of a square matrix");
    let (u, _, v_t) = svd_sorted(m);
    u * v_t
}

/// Nearest matrix with orthonormal rows (polar retraction for wide
/// row-orthonormal matrices, `r <= m`).
pub fn orthonormalize_rows(m: &CMat) -> CMat {
    assert!(m.nrows() <= m.ncols());
    let (u, _, v_t) = svd_sorted(m);
    u * v_t
}

/// Frobenius inner product `tr(a^dagger b)`.
pub fn frob_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Frobenius norm.
pub fn frob_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Deterministic generator for a `(seed, stream)` pair. Distinct streams of
/// the same seed are decorrelated so restarts can run in any order.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    let mut x = seed;
    for chunk in key.chunks_mut(8) {
        x = splitmix64(x ^ stream.wrapping_mul(0xa076_1d64_78bd_642f));
        chunk.copy_from_slice(&x.to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Complex standard-Gaussian entry.
pub fn gaussian_c64(rng: &mut ChaCha12Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Ginibre matrix (i.i.d. complex Gaussian entries).
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha12Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
pub fn haar_unitary(n: usize, rng: &mut ChaCha12Rng) -> CMat {
    let g = gaussian_matrix(n, n, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / C64::from_real(d.norm())
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase.conj();
        }
    }
    q
}

/// Haar-random unit vector.
pub fn haar_unit_vector(n: usize, rng: &mut ChaCha12Rng) -> CVec {
    loop {
        let v = CVec::from_fn(n, |_, _| gaussian_c64(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / C64::from_real(norm);
        }
    }
}

/// Max deviation of `m^dagger m` from the identity (column orthonormality).
pub fn orthonormality_defect(m: &CMat) -> f64 {
    let g = m.adjoint() * m;
    let n = g.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            dev = dev.max((g[(i, j)] - target).norm());
        }
    }
    dev
}
