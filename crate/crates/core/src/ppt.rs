//! Partial transpose, PPT/NPT classification, birank, the reduction
//! criterion and the low-dimension separability shortcut.

use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::{Bipartition, DensityOp, DimVec};
use crate::tolerance::Tolerances;
use crate::CMat;

/// Hermitian operator with subsystem structure that need not be positive
/// (partial transposes, reduction-map images).
#[derive(Debug, Clone)]
pub struct HermitianOp {
    pub matrix: CMat,
    pub dims: DimVec,
}

impl HermitianOp {
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::herm_eigenvalues(&self.matrix)
            .last()
            .copied()
            .unwrap_or(0.0)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn rank(&self, tol: f64) -> usize {
        linalg::numerical_rank(&self.matrix, tol)
    }

    /// Reinterpret as a state when it is PSD within tolerance.
    pub fn to_density(&self, tol: &Tolerances) -> Result<DensityOp> {
        DensityOp::new_with_tol(self.matrix.clone(), self.dims.clone(), tol)
    }

    /// Reorder subsystems: new subsystem `i` is the old subsystem `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<HermitianOp> {
        let (matrix, dims) = crate::tensor::permute_matrix(&self.matrix, &self.dims, perm)?;
        Ok(HermitianOp { matrix, dims })
    }
}

/// Rank pair `(rank rho, rank rho^Gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BiRank {
    pub rank_rho: usize,
    pub rank_gamma: usize,
}

/// PPT verdict with the witnessing eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct PptVerdict {
    pub is_ppt: bool,
    pub min_eig_gamma: f64,
    pub tolerance: f64,
}

/// Transpose the listed subsystems' indices on both sides.
pub fn partial_transpose(rho: &DensityOp, parties: &[usize]) -> Result<HermitianOp> {
    let dims = rho.dims();
    let n = dims.len();
    if parties.iter().any(|&p| p >= n) {
        return Err(Error::input("partial transpose party out of range"));
    }
    let total = dims.total();
    let strides = dims.strides();
    let flip: Vec<bool> = (0..n).map(|i| parties.contains(&i)).collect();
    let mut out = CMat::zeros(total, total);
    for r in 0..total {
        let rm = dims.unflat(r);
        for c in 0..total {
            let cm = dims.unflat(c);
            let mut rr = 0usize;
            let mut cc = 0usize;
            for k in 0..n {
                let (a, b) = if flip[k] { (cm[k], rm[k]) } else { (rm[k], cm[k]) };
                rr += a * strides[k];
                cc += b * strides[k];
            }
            out[(r, c)] = rho.matrix()[(rr, cc)];
        }
    }
    Ok(HermitianOp {
        matrix: out,
        dims: dims.clone(),
    })
}

/// Partial transpose across the left block of a cut.
pub fn partial_transpose_cut(rho: &DensityOp, cut: &Bipartition) -> Result<HermitianOp> {
    partial_transpose(rho, cut.left())
}

/// PPT verdict across a cut: `rho^Gamma >= -tol.psd * trace`.
pub fn ppt_check(rho: &DensityOp, cut: &Bipartition, tol: &Tolerances) -> Result<PptVerdict> {
    let gamma = partial_transpose_cut(rho, cut)?;
    let min_eig = gamma.min_eigenvalue();
    let threshold = tol.psd * rho.trace();
    Ok(PptVerdict {
        is_ppt: min_eig >= -threshold,
        min_eig_gamma: min_eig,
        tolerance: threshold,
    })
}

/// `(rank rho, rank rho^Gamma)` at the rank tolerance.
pub fn birank(rho: &DensityOp, cut: &Bipartition, tol: &Tolerances) -> Result<BiRank> {
    let gamma = partial_transpose_cut(rho, cut)?;
    Ok(BiRank {
        rank_rho: linalg::numerical_rank(rho.matrix(), tol.rank),
        rank_gamma: gamma.rank(tol.rank),
    })
}

/// Smallest eigenvalues of `I_A (x) rho_B - rho` and `rho_A (x) I_B - rho`.
/// A negative value flags a reduction-criterion violation (the state is then
/// distillable, hence entangled).
pub fn reduction_check(rho: &DensityOp, cut: &Bipartition) -> Result<(f64, f64)> {
    let two = rho.coarse_grain(&[cut.left().to_vec(), cut.right().to_vec()])?;
    let (ma, nb) = (two.dims().get(0), two.dims().get(1));
    let rho_a = two.partial_trace(&[0])?;
    let rho_b = two.partial_trace(&[1])?;
    let ia_rb = CMat::identity(ma, ma).kronecker(rho_b.matrix()) - two.matrix();
    let ra_ib = rho_a.matrix().kronecker(&CMat::identity(nb, nb)) - two.matrix();
    let min_a = linalg::herm_eigenvalues(&ia_rb).last().copied().unwrap_or(0.0);
    let min_b = linalg::herm_eigenvalues(&ra_ib).last().copied().unwrap_or(0.0);
    Ok((min_a, min_b))
}

/// Separability verdict of the Peres-Horodecki shortcut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepVerdict {
    Separable,
    Entangled,
    Undecided,
}

/// Restrict both local spaces of a (coarse-grained) bipartite state to the
/// supports of its marginals. Returns the compressed state; local ranks
/// become local dimensions.
pub fn restrict_to_supports(rho: &DensityOp, cut: &Bipartition, tol: &Tolerances) -> Result<DensityOp> {
    let two = rho.coarse_grain(&[cut.left().to_vec(), cut.right().to_vec()])?;
    let basis = |marginal: &DensityOp| -> CMat {
        let cols = marginal.range_basis(tol.rank);
        let d = marginal.dims().total();
        let mut v = CMat::zeros(d, cols.len());
        for (j, (_, vec)) in cols.iter().enumerate() {
            v.set_column(j, vec);
        }
        v
    };
    let va = basis(&two.partial_trace(&[0])?);
    let vb = basis(&two.partial_trace(&[1])?);
    let iso = va.kronecker(&vb);
    let m = iso.adjoint() * two.matrix() * &iso;
    let dims = DimVec::new(vec![va.ncols(), vb.ncols()])?;
    Ok(DensityOp::from_valid_parts(m, dims))
}

/// Peres-Horodecki regime decision: after support restriction, a state with
/// local ranks `(m, n)`, `m*n <= 6`, is separable iff PPT. Outside the
/// regime the verdict is `Undecided` unless the state is NPT.
pub fn lowdim_separability(rho: &DensityOp, cut: &Bipartition, tol: &Tolerances) -> Result<SepVerdict> {
    let restricted = restrict_to_supports(rho, cut, tol)?;
    let cut2 = Bipartition::first_vs_rest(2);
    let verdict = ppt_check(&restricted, &cut2, tol)?;
    if !verdict.is_ppt {
        return Ok(SepVerdict::Entangled);
    }
    let (m, n) = (restricted.dims().get(0), restricted.dims().get(1));
    let prod = m.min(n) * m.max(n);
    if prod == 4 || prod == 6 || m.min(n) == 1 {
        Ok(SepVerdict::Separable)
    } else {
        Ok(SepVerdict::Undecided)
    }
}

/// Tensor-product NPT test for small factors (local dims in {2,3} with
/// `m+n < 6` each): the composite is NPT iff one factor is. Checks the
/// spectral computation against the eigenvalue-product prediction.
pub fn tensor_npt_check(rho1: &DensityOp, rho2: &DensityOp, tol: &Tolerances) -> Result<bool> {
    for rho in [rho1, rho2] {
        if rho.dims().len() != 2 {
            return Err(Error::input("tensor_npt_check expects two-party factors"));
        }
        let (m, n) = (rho.dims().get(0), rho.dims().get(1));
        if !(2..=3).contains(&m) || !(2..=3).contains(&n) || m + n >= 6 {
            return Err(Error::input(format!(
                "factor dims {m}x{n} outside the {{2,3}} / m+n<6 hypothesis"
            )));
        }
    }
    let composite = crate::states::tensor_power_pair(rho1, rho2)?;
    let cut = Bipartition::new(&[0, 1], 4)?;
    let verdict = ppt_check(&composite, &cut, tol)?;

    let cut2 = Bipartition::first_vs_rest(2);
    let s1 = linalg::herm_eigenvalues(&partial_transpose_cut(rho1, &cut2)?.matrix);
    let s2 = linalg::herm_eigenvalues(&partial_transpose_cut(rho2, &cut2)?.matrix);
    let mut min_product = f64::INFINITY;
    for &a in &s1 {
        for &b in &s2 {
            min_product = min_product.min(a * b);
        }
    }
    let predicted_npt = min_product < -tol.psd * rho1.trace() * rho2.trace();
    let spectral_npt = !verdict.is_ppt;
    debug_assert_eq!(predicted_npt, spectral_npt);
    Ok(spectral_npt)
}

/// `I (x) rho_B - rho` and `rho_A (x) I - rho` both as operators (used by
/// witness tests that need the full matrices).
pub fn reduction_images(rho: &DensityOp, cut: &Bipartition) -> Result<(HermitianOp, HermitianOp)> {
    let two = rho.coarse_grain(&[cut.left().to_vec(), cut.right().to_vec()])?;
    let (ma, nb) = (two.dims().get(0), two.dims().get(1));
    let rho_a = two.partial_trace(&[0])?;
    let rho_b = two.partial_trace(&[1])?;
    let dims = two.dims().clone();
    let a = HermitianOp {
        matrix: CMat::identity(ma, ma).kronecker(rho_b.matrix()) - two.matrix(),
        dims: dims.clone(),
    };
    let b = HermitianOp {
        matrix: rho_a.matrix().kronecker(&CMat::identity(nb, nb)) - two.matrix(),
        dims,
    };
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;
    use crate::tensor::PureState;
    use crate::C64;
    use approx::assert_relative_eq;

    fn cut2() -> Bipartition {
        Bipartition::first_vs_rest(2)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn bell_density() -> DensityOp {
        states::max_entangled(2).unwrap().to_density().unwrap()
    }

    #[test]
    fn pt_fixes_separable_projector() {
        let dims = DimVec::new(vec![2, 2]).unwrap();
        let s = PureState::from_kets(dims, &[(&[0, 0], C64::new(1.0, 0.0))]).unwrap();
        let rho = s.to_density().unwrap();
        let gamma = partial_transpose_cut(&rho, &cut2()).unwrap();
        assert!(linalg::max_abs_entry(&(gamma.matrix.clone() - rho.matrix())) < 1e-14);
    }

    #[test]
    fn pt_bell_min_eig() {
        let gamma = partial_transpose_cut(&bell_density(), &cut2()).unwrap();
        assert_relative_eq!(gamma.min_eigenvalue(), -0.5, epsilon = 1e-12);
        assert_relative_eq!(gamma.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pt_is_involution() {
        let mut rng = linalg::seeded_rng(31, 0);
        let rho = states::random_mixed(&[2, 3], 4, &mut rng);
        let once = partial_transpose_cut(&rho, &cut2()).unwrap();
        // apply the same index transposition again, entrywise
        let dims = rho.dims();
        let (da, db) = (dims.get(0), dims.get(1));
        let mut twice = once.matrix.clone();
        for i in 0..da {
            for j in 0..da {
                for k in 0..db {
                    for l in 0..db {
                        twice[(i * db + k, j * db + l)] = once.matrix[(j * db + k, i * db + l)];
                    }
                }
            }
        }
        assert!(linalg::max_abs_entry(&(twice - rho.matrix())) < 1e-12);
        assert_relative_eq!(once.trace(), rho.trace(), epsilon = 1e-12);
    }

    #[test]
    fn tiles_is_ppt_with_birank_44() {
        let tiles = states::tiles_upb().complement_state().unwrap();
        let verdict = ppt_check(&tiles, &cut2(), &tol()).unwrap();
        assert!(verdict.is_ppt, "min eig {}", verdict.min_eig_gamma);
        let br = birank(&tiles, &cut2(), &tol()).unwrap();
        assert_eq!((br.rank_rho, br.rank_gamma), (4, 4));
    }

    #[test]
    fn bell_birank() {
        let br = birank(&bell_density(), &cut2(), &tol()).unwrap();
        assert_eq!((br.rank_rho, br.rank_gamma), (1, 4));
    }

    #[test]
    fn identity_is_ppt() {
        let dims = DimVec::new(vec![2, 2]).unwrap();
        let id4 = DensityOp::new(CMat::identity(4, 4) * C64::new(0.25, 0.0), dims).unwrap();
        let verdict = ppt_check(&id4, &cut2(), &tol()).unwrap();
        assert!(verdict.is_ppt);
        assert_relative_eq!(verdict.min_eig_gamma, 0.25, epsilon = 1e-12);
        let br = birank(&id4, &cut2(), &tol()).unwrap();
        assert_eq!((br.rank_rho, br.rank_gamma), (4, 4));
    }

    #[test]
    fn reduction_bell_violates() {
        let (a, b) = reduction_check(&bell_density(), &cut2()).unwrap();
        assert_relative_eq!(a, -0.5, epsilon = 1e-12);
        assert_relative_eq!(b, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn reduction_identity_nonnegative() {
        let dims = DimVec::new(vec![2, 2]).unwrap();
        let id4 = DensityOp::new(CMat::identity(4, 4) * C64::new(0.25, 0.0), dims).unwrap();
        let (a, b) = reduction_check(&id4, &cut2()).unwrap();
        assert!(a >= -1e-12 && b >= -1e-12);
    }

    #[test]
    fn reduction_weaker_than_ppt_on_tiles() {
        let tiles = states::tiles_upb().complement_state().unwrap();
        let (a, b) = reduction_check(&tiles, &cut2()).unwrap();
        assert!(a >= -1e-10 && b >= -1e-10, "tiles flagged by reduction: {a}, {b}");
    }

    #[test]
    fn lowdim_decisions() {
        // antisymmetric Bell (Werner w = -1 on two qubits) is entangled
        let w = states::werner(2, -1.0).unwrap();
        assert_eq!(lowdim_separability(&w, &cut2(), &tol()).unwrap(), SepVerdict::Entangled);

        // diagonal classical state is separable
        let dims = DimVec::new(vec![2, 2]).unwrap();
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(3, 3)] = C64::new(1.0, 0.0);
        let cl = DensityOp::new(m, dims).unwrap();
        assert_eq!(lowdim_separability(&cl, &cut2(), &tol()).unwrap(), SepVerdict::Separable);

        // tiles is PPT on 3x3: outside the shortcut regime
        let tiles = states::tiles_upb().complement_state().unwrap();
        assert_eq!(lowdim_separability(&tiles, &cut2(), &tol()).unwrap(), SepVerdict::Undecided);
    }

    #[test]
    fn tensor_npt_cases() {
        let bell = bell_density();
        assert!(tensor_npt_check(&bell, &bell, &tol()).unwrap());

        let dims = DimVec::new(vec![2, 2]).unwrap();
        let id4 = DensityOp::new(CMat::identity(4, 4) * C64::new(0.25, 0.0), dims.clone()).unwrap();
        assert!(tensor_npt_check(&bell, &id4, &tol()).unwrap());

        let sep = PureState::from_kets(dims, &[(&[0, 1], C64::new(1.0, 0.0))])
            .unwrap()
            .to_density()
            .unwrap();
        assert!(!tensor_npt_check(&sep, &sep, &tol()).unwrap());

        let tiles = states::tiles_upb().complement_state().unwrap();
        assert!(tensor_npt_check(&tiles, &bell, &tol()).is_err());
    }

    #[test]
    fn composite_pt_factorizes() {
        let mut rng = linalg::seeded_rng(7, 3);
        let r1 = states::random_mixed(&[2, 2], 2, &mut rng);
        let r2 = states::random_mixed(&[2, 3], 3, &mut rng);
        let composite = states::tensor_power_pair(&r1, &r2).unwrap();
        let gamma = partial_transpose(&composite, &[0, 1]).unwrap();

        let cut = cut2();
        let g1 = partial_transpose_cut(&r1, &cut).unwrap();
        let g2 = partial_transpose_cut(&r2, &cut).unwrap();
        let product = HermitianOp {
            matrix: g1.matrix.kronecker(&g2.matrix),
            dims: DimVec::new(vec![2, 2, 2, 3]).unwrap(),
        };
        // the product is in A1B1A2B2 order; regroup to A1A2:B1B2
        let regrouped = product.permute(&[0, 2, 1, 3]).unwrap();
        let diff = gamma.matrix - regrouped.matrix;
        assert!(linalg::max_abs_entry(&diff) < 1e-12);
    }

    #[test]
    fn random_separable_pass_ppt_and_reduction() {
        let mut rng = linalg::seeded_rng(99, 0);
        for _ in 0..100 {
            let rho = states::random_separable(3, 3, 6, &mut rng);
            let verdict = ppt_check(&rho, &cut2(), &tol()).unwrap();
            assert!(verdict.is_ppt);
            let (a, b) = reduction_check(&rho, &cut2()).unwrap();
            assert!(a >= -1e-10 && b >= -1e-10);
        }
    }

    #[test]
    fn birank_of_gamma_is_transposed() {
        // PPT input so the partial transpose is itself a state
        let mut rng = linalg::seeded_rng(13, 1);
        let rho = states::random_separable(2, 3, 4, &mut rng);
        let cut = cut2();
        let br = birank(&rho, &cut, &tol()).unwrap();
        let gamma = partial_transpose_cut(&rho, &cut).unwrap().to_density(&tol()).unwrap();
        let br2 = birank(&gamma, &cut, &tol()).unwrap();
        assert_eq!((br2.rank_rho, br2.rank_gamma), (br.rank_gamma, br.rank_rho));
    }
}
