//! Dense complex tensor substrate: subsystem dimensions, pure states,
//! density operators, Schmidt decomposition and numerical rank.
//!
//! Flattening convention: the first subsystem varies slowest (Kronecker
//! order), so `|i⟩ ⊗ |j⟩` of dims `[d1, d2]` sits at flat index `i*d2 + j`.

use nalgebra::ComplexField;
use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerance::Tolerances;
use crate::{C64, CMat, CVec, MAX_AMBIENT_DIM};

/// Subsystem dimensions of a multiparty state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimVec(Vec<usize>);

impl DimVec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::input("dimension vector must be nonempty"));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::input("every subsystem dimension must be >= 1"));
        }
        Ok(DimVec(dims))
    }

    /// Ambient dimension (product of entries).
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Number of subsystems.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    /// Strides of the flattening (first subsystem varies slowest).
    pub fn strides(&self) -> Vec<usize> {
        let n = self.0.len();
        let mut s = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.0[k + 1];
        }
        s
    }

    /// Flat index of a multi-index.
    pub fn flat(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.0.len());
        self.strides()
            .iter()
            .zip(multi)
            .map(|(s, m)| s * m)
            .sum()
    }

    /// Multi-index of a flat index.
    pub fn unflat(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut multi = vec![0usize; self.0.len()];
        for (k, s) in strides.iter().enumerate() {
            multi[k] = flat / s;
            flat %= s;
        }
        multi
    }

    pub fn concat(&self, other: &DimVec) -> DimVec {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        DimVec(dims)
    }

    /// Dimensions of the listed subsystems, in the listed order.
    pub fn select(&self, idx: &[usize]) -> DimVec {
        DimVec(idx.iter().map(|&i| self.0[i]).collect())
    }
}

/// A two-block partition of the subsystem indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    /// Build a cut from the left index set; the right side is the complement
    /// in `0..n_parties`. Both sides must end up nonempty.
    pub fn new(left: &[usize], n_parties: usize) -> Result<Self> {
        let mut l: Vec<usize> = left.to_vec();
        l.sort_unstable();
        l.dedup();
        if l.len() != left.len() {
            return Err(Error::input("bipartition left set has duplicates"));
        }
        if l.iter().any(|&i| i >= n_parties) {
            return Err(Error::input("bipartition index out of range"));
        }
        let right: Vec<usize> = (0..n_parties).filter(|i| !l.contains(i)).collect();
        if l.is_empty() || right.is_empty() {
            return Err(Error::input("both sides of a bipartition must be nonempty"));
        }
        Ok(Bipartition { left: l, right })
    }

    /// The canonical cut of a two-party state.
    pub fn first_vs_rest(n_parties: usize) -> Self {
        Bipartition::new(&[0], n_parties).expect("n_parties >= 2")
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    /// Left-then-right ordering of all subsystem indices.
    pub fn permutation(&self) -> Vec<usize> {
        let mut p = self.left.clone();
        p.extend_from_slice(&self.right);
        p
    }

    pub fn left_dim(&self, dims: &DimVec) -> usize {
        self.left.iter().map(|&i| dims.get(i)).product()
    }

    pub fn right_dim(&self, dims: &DimVec) -> usize {
        self.right.iter().map(|&i| dims.get(i)).product()
    }
}

fn validate_perm(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::input(format!(
            "permutation length {} does not match {} subsystems",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::input("permutation is not a bijection"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Reindex a square matrix by a subsystem permutation (rows and columns).
pub fn permute_matrix(m: &CMat, dims: &DimVec, perm: &[usize]) -> Result<(CMat, DimVec)> {
    validate_perm(perm, dims.len())?;
    let (map, new_dims) = permutation_index_map(dims, perm);
    let out = CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(map[i], map[j])]);
    Ok((out, new_dims))
}

/// Index map realizing `new subsystem i = old subsystem perm[i]`.
/// `map[new_flat] = old_flat`.
fn permutation_index_map(dims: &DimVec, perm: &[usize]) -> (Vec<usize>, DimVec) {
    let new_dims = dims.select(perm);
    let old_strides = dims.strides();
    let total = dims.total();
    let mut map = vec![0usize; total];
    for (new_flat, slot) in map.iter_mut().enumerate() {
        let new_multi = new_dims.unflat(new_flat);
        let mut old_flat = 0usize;
        for (i, &j) in new_multi.iter().enumerate() {
            old_flat += old_strides[perm[i]] * j;
        }
        *slot = old_flat;
    }
    (map, new_dims)
}

fn check_capacity(dim: usize) -> Result<()> {
    if dim > MAX_AMBIENT_DIM {
        return Err(Error::Capacity {
            got: dim,
            max: MAX_AMBIENT_DIM,
        });
    }
    Ok(())
}

/// Complex amplitude vector with subsystem structure.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVec,
    dims: DimVec,
    normalized: bool,
}

impl PureState {
    pub fn new(amplitudes: CVec, dims: DimVec) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::dims(format!(
                "amplitude length {} does not match ambient dimension {}",
                amplitudes.len(),
                dims.total()
            )));
        }
        check_capacity(dims.total())?;
        let normalized = (amplitudes.norm() - 1.0).abs() <= 1e-10;
        Ok(PureState {
            amplitudes,
            dims,
            normalized,
        })
    }

    /// State from a list of `(multi-index, amplitude)` kets.
    pub fn from_kets(dims: DimVec, kets: &[(&[usize], C64)]) -> Result<Self> {
        let mut amp = CVec::zeros(dims.total());
        for (multi, z) in kets {
            if multi.len() != dims.len() || multi.iter().zip(dims.as_slice()).any(|(&i, &d)| i >= d)
            {
                return Err(Error::input("ket index out of range"));
            }
            amp[dims.flat(multi)] += *z;
        }
        PureState::new(amp, dims)
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn dims(&self) -> &DimVec {
        &self.dims
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&self) -> Result<PureState> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::input("cannot normalize the zero vector"));
        }
        PureState::new(&self.amplitudes / C64::from_real(n), self.dims.clone())
    }

    /// Projector `|psi><psi|` as a density operator.
    pub fn to_density(&self) -> Result<DensityOp> {
        if self.norm() == 0.0 {
            return Err(Error::input("zero vector has no density operator"));
        }
        let m = &self.amplitudes * self.amplitudes.adjoint();
        Ok(DensityOp {
            matrix: m,
            dims: self.dims.clone(),
        })
    }

    /// Kronecker product; dims concatenate.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let dims = self.dims.concat(&other.dims);
        check_capacity(dims.total())?;
        PureState::new(self.amplitudes.kronecker(&other.amplitudes), dims)
    }

    /// Reorder subsystems: new subsystem `i` is the old subsystem `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<PureState> {
        validate_perm(perm, self.dims.len())?;
        let (map, new_dims) = permutation_index_map(&self.dims, perm);
        let amp = CVec::from_fn(self.amplitudes.len(), |i, _| self.amplitudes[map[i]]);
        PureState::new(amp, new_dims)
    }

    /// Merge subsystems: each group becomes one party (groups must be
    /// disjoint and covering; amplitudes are only reindexed).
    pub fn coarse_grain(&self, groups: &[Vec<usize>]) -> Result<PureState> {
        let (perm, merged) = coarse_grain_dims(&self.dims, groups)?;
        let permuted = self.permute(&perm)?;
        PureState::new(permuted.amplitudes, merged)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::dims("inner product of different ambient dims"));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// Unnormalized positive semidefinite operator with subsystem structure.
#[derive(Debug, Clone)]
pub struct DensityOp {
    matrix: CMat,
    dims: DimVec,
}

impl DensityOp {
    /// Validating constructor: checks shape, Hermiticity (then symmetrizes),
    /// positive trace and positive semidefiniteness at the given tolerances.
    pub fn new_with_tol(matrix: CMat, dims: DimVec, tol: &Tolerances) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::dims("density operator must be square"));
        }
        if matrix.nrows() != dims.total() {
            return Err(Error::dims(format!(
                "matrix size {} does not match ambient dimension {}",
                matrix.nrows(),
                dims.total()
            )));
        }
        check_capacity(dims.total())?;
        let dev = linalg::herm_deviation(&matrix);
        if dev > tol.herm {
            return Err(Error::NotHermitian { dev, tol: tol.herm });
        }
        let matrix = linalg::hermitize(&matrix);
        let trace = matrix.trace().re;
        if !(trace > 0.0) {
            return Err(Error::input(format!("trace must be positive, got {trace:.3e}")));
        }
        let min_eig = linalg::herm_eigenvalues(&matrix)
            .last()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -tol.psd * trace {
            return Err(Error::NotPsd { min_eig, trace });
        }
        Ok(DensityOp { matrix, dims })
    }

    pub fn new(matrix: CMat, dims: DimVec) -> Result<Self> {
        DensityOp::new_with_tol(matrix, dims, &Tolerances::default())
    }

    /// Constructor for operators that are PSD by construction (products,
    /// compressions, partial traces of valid states). Symmetrizes but skips
    /// the eigenvalue check.
    pub(crate) fn from_valid_parts(matrix: CMat, dims: DimVec) -> Self {
        debug_assert!(linalg::herm_deviation(&matrix) < 1e-8);
        DensityOp {
            matrix: linalg::hermitize(&matrix),
            dims,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> &DimVec {
        &self.dims
    }

    pub fn ambient_dim(&self) -> usize {
        self.dims.total()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Trace-one copy.
    pub fn normalize(&self) -> DensityOp {
        let t = self.trace();
        DensityOp {
            matrix: &self.matrix / C64::from_real(t),
            dims: self.dims.clone(),
        }
    }

    /// Eigenvalues in nonincreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::herm_eigenvalues(&self.matrix)
    }

    /// Spectral decomposition, eigenvalues nonincreasing.
    pub fn eigen(&self) -> (Vec<f64>, CMat) {
        linalg::herm_eigen(&self.matrix)
    }

    /// Rank: eigenvalues above `tol * lambda_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let vals = self.eigenvalues();
        let max = vals.iter().cloned().fold(0.0, f64::max);
        if max <= 0.0 {
            return 0;
        }
        vals.iter().filter(|&&v| v > tol * max).count()
    }

    /// Eigenvectors with eigenvalue above `tol * lambda_max`, as `(p, vec)`.
    pub fn range_basis(&self, tol: f64) -> Vec<(f64, CVec)> {
        let (vals, vecs) = self.eigen();
        let max = vals.iter().cloned().fold(0.0, f64::max);
        vals.iter()
            .enumerate()
            .filter(|(_, &v)| v > tol * max)
            .map(|(i, &v)| (v, CVec::from(vecs.column(i))))
            .collect()
    }

    /// Kronecker product; dims concatenate and the trace multiplies.
    pub fn tensor(&self, other: &DensityOp) -> Result<DensityOp> {
        let dims = self.dims.concat(&other.dims);
        check_capacity(dims.total())?;
        Ok(DensityOp::from_valid_parts(
            self.matrix.kronecker(&other.matrix),
            dims,
        ))
    }

    /// Reorder subsystems: new subsystem `i` is the old subsystem `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<DensityOp> {
        validate_perm(perm, self.dims.len())?;
        let (map, new_dims) = permutation_index_map(&self.dims, perm);
        let m = CMat::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            self.matrix[(map[i], map[j])]
        });
        Ok(DensityOp::from_valid_parts(m, new_dims))
    }

    /// Trace out everything but the `keep` subsystems (ascending order
    /// required). Trace is preserved.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOp> {
        let n = self.dims.len();
        if keep.is_empty() {
            return Err(Error::input("partial trace must keep at least one subsystem"));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&i| i >= n) {
            return Err(Error::input("keep set must be strictly increasing and in range"));
        }
        let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let strides = self.dims.strides();
        let keep_dims = self.dims.select(keep);
        let traced_dims = self.dims.select(&traced);
        let kd = keep_dims.total();
        let td = traced_dims.total();

        let offsets = |idx: &[usize], sub: &DimVec| -> Vec<usize> {
            (0..sub.total())
                .map(|flat| {
                    sub.unflat(flat)
                        .iter()
                        .zip(idx)
                        .map(|(&m, &orig)| m * strides[orig])
                        .sum()
                })
                .collect()
        };
        let keep_off = offsets(keep, &keep_dims);
        let traced_off = offsets(&traced, &traced_dims);

        let mut out = CMat::zeros(kd, kd);
        for r in 0..kd {
            for c in 0..kd {
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..td {
                    acc += self.matrix[(keep_off[r] + traced_off[t], keep_off[c] + traced_off[t])];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(DensityOp::from_valid_parts(out, keep_dims))
    }

    /// Merge subsystems into the given disjoint covering groups.
    pub fn coarse_grain(&self, groups: &[Vec<usize>]) -> Result<DensityOp> {
        let (perm, merged) = coarse_grain_dims(&self.dims, groups)?;
        let permuted = self.permute(&perm)?;
        Ok(DensityOp {
            matrix: permuted.matrix,
            dims: merged,
        })
    }

    /// Compress the B side of a bipartite operator to the index range
    /// `b_lo..b_hi` (block projector applied on both sides).
    pub fn b_restrict(&self, b_lo: usize, b_hi: usize) -> Result<DensityOp> {
        if self.dims.len() != 2 {
            return Err(Error::input("b_restrict expects a two-party operator"));
        }
        let (ma, nb) = (self.dims.get(0), self.dims.get(1));
        if b_lo >= b_hi || b_hi > nb {
            return Err(Error::input("invalid B block range"));
        }
        let w = b_hi - b_lo;
        let m = CMat::from_fn(ma * w, ma * w, |i, j| {
            let (ai, bi) = (i / w, i % w);
            let (aj, bj) = (j / w, j % w);
            self.matrix[(ai * nb + bi + b_lo, aj * nb + bj + b_lo)]
        });
        Ok(DensityOp::from_valid_parts(
            m,
            DimVec::new(vec![ma, w]).unwrap(),
        ))
    }

    /// Embed a bipartite operator into larger local spaces at the given
    /// basis offsets.
    pub fn embed_bipartite(&self, new_a: usize, new_b: usize, off_a: usize, off_b: usize) -> Result<DensityOp> {
        if self.dims.len() != 2 {
            return Err(Error::input("embed_bipartite expects a two-party operator"));
        }
        let (ma, nb) = (self.dims.get(0), self.dims.get(1));
        if off_a + ma > new_a || off_b + nb > new_b {
            return Err(Error::input("embedding offsets out of range"));
        }
        let dims = DimVec::new(vec![new_a, new_b])?;
        check_capacity(dims.total())?;
        let mut m = CMat::zeros(new_a * new_b, new_a * new_b);
        for ai in 0..ma {
            for bi in 0..nb {
                for aj in 0..ma {
                    for bj in 0..nb {
                        m[(
                            (ai + off_a) * new_b + bi + off_b,
                            (aj + off_a) * new_b + bj + off_b,
                        )] = self.matrix[(ai * nb + bi, aj * nb + bj)];
                    }
                }
            }
        }
        Ok(DensityOp::from_valid_parts(m, dims))
    }
}

fn coarse_grain_dims(dims: &DimVec, groups: &[Vec<usize>]) -> Result<(Vec<usize>, DimVec)> {
    let n = dims.len();
    let mut seen = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    let mut merged = Vec::with_capacity(groups.len());
    for g in groups {
        if g.is_empty() {
            return Err(Error::input("coarse-grain group must be nonempty"));
        }
        let mut d = 1usize;
        for &i in g {
            if i >= n || seen[i] {
                return Err(Error::input("coarse-grain groups must be disjoint and in range"));
            }
            seen[i] = true;
            perm.push(i);
            d *= dims.get(i);
        }
        merged.push(d);
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::input("coarse-grain groups must cover all subsystems"));
    }
    Ok((perm, DimVec::new(merged)?))
}

/// B-direct sum of two bipartite operators with equal A dimension: the B
/// supports land on orthogonal blocks.
pub fn direct_sum_b(alpha: &DensityOp, beta: &DensityOp) -> Result<DensityOp> {
    if alpha.dims().len() != 2 || beta.dims().len() != 2 {
        return Err(Error::input("B-direct sum expects two-party operators"));
    }
    let (ma, na) = (alpha.dims().get(0), alpha.dims().get(1));
    let (mb, nb) = (beta.dims().get(0), beta.dims().get(1));
    if ma != mb {
        return Err(Error::dims(format!(
            "A dimensions differ: {ma} vs {mb}"
        )));
    }
    let nsum = na + nb;
    let dims = DimVec::new(vec![ma, nsum])?;
    check_capacity(dims.total())?;
    let mut m = CMat::zeros(ma * nsum, ma * nsum);
    for ai in 0..ma {
        for aj in 0..ma {
            for bi in 0..na {
                for bj in 0..na {
                    m[(ai * nsum + bi, aj * nsum + bj)] = alpha.matrix()[(ai * na + bi, aj * na + bj)];
                }
            }
            for bi in 0..nb {
                for bj in 0..nb {
                    m[(ai * nsum + na + bi, aj * nsum + na + bj)] =
                        beta.matrix()[(ai * nb + bi, aj * nb + bj)];
                }
            }
        }
    }
    Ok(DensityOp::from_valid_parts(m, dims))
}

/// Schmidt decomposition of a pure state across a cut.
#[derive(Debug, Clone)]
pub struct SchmidtDecomp {
    /// Nonzero coefficients in nonincreasing order.
    pub coefficients: Vec<f64>,
    /// Orthonormal left family (in the cut's left space, cut order).
    pub left_vectors: Vec<CVec>,
    /// Orthonormal right family.
    pub right_vectors: Vec<CVec>,
    /// Number of coefficients above `tol.rank * sigma_max`.
    pub rank: usize,
    cut_perm: Vec<usize>,
    left_dims: DimVec,
    right_dims: DimVec,
}

impl SchmidtDecomp {
    /// Rebuild the state in its original subsystem order.
    pub fn reconstruct(&self) -> PureState {
        let dl = self.left_dims.total();
        let dr = self.right_dims.total();
        let mut amp = CVec::zeros(dl * dr);
        for (i, &c) in self.coefficients.iter().enumerate() {
            let l = &self.left_vectors[i];
            let r = &self.right_vectors[i];
            for a in 0..dl {
                for b in 0..dr {
                    amp[a * dr + b] += C64::from_real(c) * l[a] * r[b];
                }
            }
        }
        let dims = self.left_dims.concat(&self.right_dims);
        let permuted = PureState::new(amp, dims).expect("consistent dims");
        // invert the cut permutation
        let mut inv = vec![0usize; self.cut_perm.len()];
        for (i, &p) in self.cut_perm.iter().enumerate() {
            inv[p] = i;
        }
        permuted.permute(&inv).expect("valid inverse permutation")
    }
}

/// Schmidt decomposition across `cut`: SVD of the cut-reshaped amplitude
/// matrix. Rank counts coefficients above `tol.rank * sigma_max`.
pub fn schmidt_decompose(psi: &PureState, cut: &Bipartition, tol: &Tolerances) -> Result<SchmidtDecomp> {
    if psi.norm() == 0.0 {
        return Err(Error::input("cannot Schmidt-decompose the zero vector"));
    }
    if cut.left().iter().chain(cut.right()).any(|&i| i >= psi.dims().len())
        || cut.left().len() + cut.right().len() != psi.dims().len()
    {
        return Err(Error::input("cut does not match the subsystem count"));
    }
    let perm = cut.permutation();
    let permuted = psi.permute(&perm)?;
    let dl = cut.left_dim(psi.dims());
    let dr = cut.right_dim(psi.dims());
    let m = reshape_vector(permuted.amplitudes(), dl, dr);
    let (u, sigma, v_t) = linalg::svd_sorted(&m);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let rank = sigma.iter().filter(|&&s| s > tol.rank * smax).count();
    let coefficients: Vec<f64> = sigma[..rank].to_vec();
    let left_vectors: Vec<CVec> = (0..rank).map(|i| CVec::from(u.column(i))).collect();
    let right_vectors: Vec<CVec> = (0..rank)
        .map(|i| CVec::from_fn(dr, |r, _| v_t[(i, r)]))
        .collect();
    Ok(SchmidtDecomp {
        coefficients,
        left_vectors,
        right_vectors,
        rank,
        cut_perm: perm,
        left_dims: psi.dims().select(cut.left()),
        right_dims: psi.dims().select(cut.right()),
    })
}

/// Schmidt rank across a cut (shortcut for `schmidt_decompose(..).rank`).
pub fn schmidt_rank(psi: &PureState, cut: &Bipartition, tol: &Tolerances) -> Result<usize> {
    Ok(schmidt_decompose(psi, cut, tol)?.rank)
}

/// View a flat vector as a `rows x cols` matrix in the library's flattening.
pub fn reshape_vector(v: &CVec, rows: usize, cols: usize) -> CMat {
    debug_assert_eq!(v.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Inverse of [`reshape_vector`].
pub fn flatten_matrix(m: &CMat) -> CVec {
    let (rows, cols) = (m.nrows(), m.ncols());
    CVec::from_fn(rows * cols, |i, _| m[(i / cols, i % cols)])
}

/// Number of singular values above `tol_rank * sigma_max`; 0 for zero input.
pub fn numerical_rank(m: &CMat, tol_rank: f64) -> usize {
    linalg::numerical_rank(m, tol_rank)
}

/// `<psi| rho |psi>` for a normalized `psi`; real within the Hermiticity
/// tolerance and bounded by the largest eigenvalue.
pub fn overlap(psi: &PureState, rho: &DensityOp) -> Result<f64> {
    if psi.amplitudes().len() != rho.ambient_dim() {
        return Err(Error::dims(format!(
            "overlap of ambient dims {} vs {}",
            psi.amplitudes().len(),
            rho.ambient_dim()
        )));
    }
    if (psi.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::precondition("overlap requires a normalized state"));
    }
    let v = psi.amplitudes();
    let w = rho.matrix() * v;
    let z = v.dotc(&w);
    debug_assert!(z.im.abs() <= 1e-8 * z.re.abs().max(1.0));
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::seeded_rng;
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell_unnormalized() -> PureState {
        let dims = DimVec::new(vec![2, 2]).unwrap();
        PureState::from_kets(dims, &[(&[0, 0], c(1.0)), (&[1, 1], c(1.0))]).unwrap()
    }

    #[test]
    fn dimvec_flat_roundtrip() {
        let dims = DimVec::new(vec![2, 3, 4]).unwrap();
        for flat in 0..dims.total() {
            assert_eq!(dims.flat(&dims.unflat(flat)), flat);
        }
        assert_eq!(dims.strides(), vec![12, 4, 1]);
    }

    #[test]
    fn tensor_product_basis_case() {
        let dims = DimVec::new(vec![2]).unwrap();
        let zero = PureState::from_kets(dims.clone(), &[(&[0], c(1.0))]).unwrap();
        let one = PureState::from_kets(dims, &[(&[1], c(1.0))]).unwrap();
        let z1 = zero.tensor(&one).unwrap();
        assert_eq!(z1.dims().as_slice(), &[2, 2]);
        assert_eq!(z1.amplitudes()[1], c(1.0));
        assert_eq!(z1.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn tensor_product_identity_case() {
        let dims = DimVec::new(vec![2]).unwrap();
        let half = DensityOp::new(CMat::identity(2, 2) * c(0.5), dims).unwrap();
        let quarter = half.tensor(&half).unwrap();
        assert_relative_eq!(quarter.trace(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(quarter.matrix()[(3, 3)].re, 0.25, epsilon = 1e-12);
        assert_eq!(quarter.rank(1e-9), 4);
    }

    #[test]
    fn tensor_capacity_error() {
        let dims = DimVec::new(vec![64, 64]).unwrap();
        let big = DensityOp::new(CMat::identity(4096, 4096), dims).unwrap();
        let err = big.tensor(&big).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn permute_swaps_qubits() {
        let dims = DimVec::new(vec![2, 2]).unwrap();
        let s01 = PureState::from_kets(dims, &[(&[0, 1], c(1.0))]).unwrap();
        let s10 = s01.permute(&[1, 0]).unwrap();
        assert_eq!(s10.amplitudes()[2], c(1.0));
        // applying the permutation twice restores the state here
        let back = s10.permute(&[1, 0]).unwrap();
        assert_eq!(back.amplitudes(), s01.amplitudes());
    }

    #[test]
    fn permute_rejects_non_bijection() {
        let dims = DimVec::new(vec![2, 2]).unwrap();
        let s = PureState::from_kets(dims, &[(&[0, 0], c(1.0))]).unwrap();
        assert!(s.permute(&[0, 0]).is_err());
        assert!(s.permute(&[0]).is_err());
    }

    #[test]
    fn partial_trace_bell_marginal() {
        let rho = bell_unnormalized().to_density().unwrap().normalize();
        let a = rho.partial_trace(&[0]).unwrap();
        assert_relative_eq!(a.trace(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(a.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_relative_eq!(a.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_product_pure() {
        let dims = DimVec::new(vec![2, 2]).unwrap();
        let s01 = PureState::from_kets(dims, &[(&[0, 1], c(1.0))]).unwrap();
        let rho = s01.to_density().unwrap();
        let b = rho.partial_trace(&[1]).unwrap();
        assert_relative_eq!(b.matrix()[(1, 1)].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_empty_keep_is_error() {
        let rho = bell_unnormalized().to_density().unwrap();
        assert!(rho.partial_trace(&[]).is_err());
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let mut rng = seeded_rng(19, 0);
        let a = crate::states::random_mixed(&[2, 3], 2, &mut rng);
        let b = crate::states::random_mixed(&[2, 2], 3, &mut rng);
        let prod = a.tensor(&b).unwrap();
        let back = prod.partial_trace(&[0, 1]).unwrap();
        let scale = b.trace();
        let diff = back.matrix() - a.matrix() * c(scale);
        assert!(linalg::max_abs_entry(&diff) < 1e-10 * a.trace());
    }

    #[test]
    fn direct_sum_blocks_roundtrip() {
        let dims = DimVec::new(vec![2, 1]).unwrap();
        let v = PureState::from_kets(dims, &[(&[0, 0], c(1.0))]).unwrap();
        let blk = v.to_density().unwrap();
        let sum = direct_sum_b(&blk, &blk).unwrap();
        assert_eq!(sum.dims().as_slice(), &[2, 2]);
        assert_eq!(sum.rank(1e-9), 2);
        let alpha = sum.b_restrict(0, 1).unwrap();
        let beta = sum.b_restrict(1, 2).unwrap();
        assert_eq!(alpha.matrix(), blk.matrix());
        assert_eq!(beta.matrix(), blk.matrix());
    }

    #[test]
    fn direct_sum_dim_mismatch() {
        let d21 = DimVec::new(vec![2, 1]).unwrap();
        let d31 = DimVec::new(vec![3, 1]).unwrap();
        let a = PureState::from_kets(d21, &[(&[0, 0], c(1.0))]).unwrap().to_density().unwrap();
        let b = PureState::from_kets(d31, &[(&[0, 0], c(1.0))]).unwrap().to_density().unwrap();
        assert!(direct_sum_b(&a, &b).is_err());
    }

    #[test]
    fn schmidt_bell_rank_two() {
        let tol = Tolerances::default();
        let bell = bell_unnormalized();
        let cut = Bipartition::new(&[0], 2).unwrap();
        let d = schmidt_decompose(&bell, &cut, &tol).unwrap();
        assert_eq!(d.rank, 2);
        assert_relative_eq!(d.coefficients[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(d.coefficients[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_ghz_cut_rank_two() {
        let tol = Tolerances::default();
        let dims = DimVec::new(vec![2, 2, 2]).unwrap();
        let ghz = PureState::from_kets(dims, &[(&[0, 0, 0], c(1.0)), (&[1, 1, 1], c(1.0))]).unwrap();
        let cut = Bipartition::new(&[0], 3).unwrap();
        assert_eq!(schmidt_rank(&ghz, &cut, &tol).unwrap(), 2);
    }

    #[test]
    fn schmidt_paper_state_cut3_rank_four() {
        // |111>+|122>+|213>+|224> on dims (2,2,4), 1-based labels
        let tol = Tolerances::default();
        let dims = DimVec::new(vec![2, 2, 4]).unwrap();
        let psi = PureState::from_kets(
            dims,
            &[
                (&[0, 0, 0], c(1.0)),
                (&[0, 1, 1], c(1.0)),
                (&[1, 0, 2], c(1.0)),
                (&[1, 1, 3], c(1.0)),
            ],
        )
        .unwrap();
        let cut = Bipartition::new(&[2], 3).unwrap();
        assert_eq!(schmidt_rank(&psi, &cut, &tol).unwrap(), 4);
    }

    #[test]
    fn schmidt_zero_vector_is_error() {
        let dims = DimVec::new(vec![2, 2]).unwrap();
        let z = PureState::new(CVec::zeros(4), dims).unwrap();
        let cut = Bipartition::new(&[0], 2).unwrap();
        assert!(schmidt_decompose(&z, &cut, &Tolerances::default()).is_err());
    }

    #[test]
    fn schmidt_reconstruction_randomized() {
        let tol = Tolerances::default();
        let mut rng = seeded_rng(23, 0);
        for trial in 0..200 {
            let da = 2 + (trial % 3);
            let db = 2 + ((trial / 3) % 3);
            let dims = DimVec::new(vec![da, db]).unwrap();
            let psi = PureState::new(crate::linalg::haar_unit_vector(da * db, &mut rng), dims).unwrap();
            let cut = Bipartition::new(&[0], 2).unwrap();
            let d = schmidt_decompose(&psi, &cut, &tol).unwrap();
            let rec = d.reconstruct();
            let err = (rec.amplitudes() - psi.amplitudes()).norm();
            assert!(err <= tol.recon, "reconstruction error {err}");
            // rank equals the numerical rank of the reshaped matrix
            let m = reshape_vector(psi.amplitudes(), da, db);
            assert_eq!(d.rank, numerical_rank(&m, tol.rank));
        }
    }

    #[test]
    fn overlap_examples() {
        let bell = bell_unnormalized().normalize().unwrap();
        let rho = bell.to_density().unwrap();
        assert_relative_eq!(overlap(&bell, &rho).unwrap(), 1.0, epsilon = 1e-12);

        let dims = DimVec::new(vec![2, 2]).unwrap();
        let zz = PureState::from_kets(dims.clone(), &[(&[0, 0], c(1.0))]).unwrap();
        let mixed = DensityOp::new(CMat::identity(4, 4) * c(0.25), dims).unwrap();
        assert_relative_eq!(overlap(&zz, &mixed).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn overlap_dimension_mismatch() {
        let bell = bell_unnormalized().normalize().unwrap();
        let dims = DimVec::new(vec![3, 3]).unwrap();
        let rho = DensityOp::new(CMat::identity(9, 9), dims).unwrap();
        assert!(overlap(&bell, &rho).is_err());
    }

    #[test]
    fn overlap_phase_invariant() {
        let mut rng = seeded_rng(5, 7);
        let dims = DimVec::new(vec![3, 3]).unwrap();
        let psi = PureState::new(crate::linalg::haar_unit_vector(9, &mut rng), dims.clone()).unwrap();
        let rho = crate::states::random_mixed(&[3, 3], 4, &mut rng);
        let phase = C64::from_polar(1.0, 1.234);
        let psi2 = PureState::new(psi.amplitudes() * phase, dims).unwrap();
        let o1 = overlap(&psi, &rho).unwrap();
        let o2 = overlap(&psi2, &rho).unwrap();
        assert_relative_eq!(o1, o2, epsilon = 1e-12);
    }

    #[test]
    fn density_constructor_rejects_non_hermitian() {
        let dims = DimVec::new(vec![2]).unwrap();
        let mut m = CMat::identity(2, 2);
        m[(0, 1)] = c(0.5);
        assert!(DensityOp::new(m, dims).is_err());
    }

    #[test]
    fn density_constructor_rejects_negative() {
        let dims = DimVec::new(vec![2]).unwrap();
        let mut m = CMat::identity(2, 2);
        m[(1, 1)] = c(-0.5);
        assert!(matches!(DensityOp::new(m, dims), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn coarse_grain_merges_dims() {
        let dims = DimVec::new(vec![2, 2, 2]).unwrap();
        let ghz = PureState::from_kets(dims, &[(&[0, 0, 0], c(1.0)), (&[1, 1, 1], c(1.0))]).unwrap();
        let cg = ghz.coarse_grain(&[vec![0], vec![1, 2]]).unwrap();
        assert_eq!(cg.dims().as_slice(), &[2, 4]);
        // |00> + |13> in the merged labelling
        assert_eq!(cg.amplitudes()[0], c(1.0));
        assert_eq!(cg.amplitudes()[4 + 3], c(1.0));
        assert_eq!(cg.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 2);
    }
}
