//! Local projections and the projection bounds on the Schmidt number: the
//! sandwich `max{1, sn(rho)-k} <= sn(sigma) <= min{sn(rho), M-k}`, the exact
//! pure-state drop, sampled min/max estimates over projector families and
//! the two-copy bounds.

use std::collections::BTreeSet;

use crate::certify::{self, Budget, HiCert, LoCert, SnBound};
use crate::error::{Error, Result};
use crate::linalg;
use crate::states;
use crate::tensor::{self, Bipartition, DensityOp, DimVec, PureState};
use crate::tolerance::Tolerances;
use crate::{C64, CMat};

/// Which local party a projector acts on (two-party states).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// One-party operator with recorded rank and kernel dimension. `matrix` may
/// be rectangular (`M' x M`): the kernel lives in the domain.
#[derive(Debug, Clone)]
pub struct LocalProjector {
    pub matrix: CMat,
    pub rank: usize,
    pub kernel_dim: usize,
}

impl LocalProjector {
    pub fn new(matrix: CMat, tol: &Tolerances) -> Result<Self> {
        if matrix.ncols() == 0 || matrix.nrows() == 0 {
            return Err(Error::input("projector matrix must be nonempty"));
        }
        let rank = linalg::numerical_rank(&matrix, tol.rank);
        if rank == 0 {
            return Err(Error::input("projector must be nonzero"));
        }
        let kernel_dim = matrix.ncols() - rank;
        Ok(LocalProjector {
            matrix,
            rank,
            kernel_dim,
        })
    }

    pub fn identity(m: usize) -> Self {
        LocalProjector {
            matrix: CMat::identity(m, m),
            rank: m,
            kernel_dim: 0,
        }
    }

    /// Orthogonal projector onto the listed basis directions.
    pub fn coordinate(m: usize, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() || keep.iter().any(|&i| i >= m) {
            return Err(Error::input("coordinate projector needs in-range indices"));
        }
        let mut mat = CMat::zeros(m, m);
        for &i in keep {
            mat[(i, i)] = C64::new(1.0, 0.0);
        }
        LocalProjector::new(mat, &Tolerances::default())
    }

    /// Haar-random orthogonal projector of the given rank (the span of the
    /// first `rank` columns of a Haar unitary).
    pub fn haar(m: usize, rank: usize, rng: &mut rand_chacha::ChaCha12Rng) -> Result<Self> {
        if rank == 0 || rank > m {
            return Err(Error::input("projector rank out of range"));
        }
        let u = linalg::haar_unitary(m, rng);
        let v = u.columns(0, rank).into_owned();
        LocalProjector::new(&v * v.adjoint(), &Tolerances::default())
    }
}

/// A projected state; `op` is `None` when the projection annihilated the
/// support (degenerate, not an error).
#[derive(Debug, Clone)]
pub struct ProjectedState {
    pub op: Option<DensityOp>,
    pub degenerate: bool,
}

fn side_operator(p: &LocalProjector, side: Side, dims: &DimVec) -> Result<CMat> {
    let (ma, nb) = (dims.get(0), dims.get(1));
    match side {
        Side::A => {
            if p.matrix.ncols() != ma {
                return Err(Error::dims(format!(
                    "projector domain {} does not match A dimension {ma}",
                    p.matrix.ncols()
                )));
            }
            Ok(p.matrix.kronecker(&CMat::identity(nb, nb)))
        }
        Side::B => {
            if p.matrix.ncols() != nb {
                return Err(Error::dims(format!(
                    "projector domain {} does not match B dimension {nb}",
                    p.matrix.ncols()
                )));
            }
            Ok(CMat::identity(ma, ma).kronecker(&p.matrix))
        }
    }
}

/// `(P (x) I) rho (P^dagger (x) I)` (or the B-side mirror image).
pub fn apply_local(rho: &DensityOp, p: &LocalProjector, side: Side, tol: &Tolerances) -> Result<ProjectedState> {
    if rho.dims().len() != 2 {
        return Err(Error::input("apply_local expects a two-party state"));
    }
    let op = side_operator(p, side, rho.dims())?;
    let m = &op * rho.matrix() * op.adjoint();
    let trace = m.trace().re;
    let p_scale = linalg::singular_values(&p.matrix).first().copied().unwrap_or(0.0);
    if trace <= 1e-12 * rho.trace() * p_scale * p_scale {
        return Ok(ProjectedState {
            op: None,
            degenerate: true,
        });
    }
    let new_dims = match side {
        Side::A => DimVec::new(vec![p.matrix.nrows(), rho.dims().get(1)])?,
        Side::B => DimVec::new(vec![rho.dims().get(0), p.matrix.nrows()])?,
    };
    let _ = tol;
    Ok(ProjectedState {
        op: Some(DensityOp::new(m, new_dims)?),
        degenerate: false,
    })
}

/// `(P (x) I)|psi>` (or the B-side mirror image), unnormalized.
pub fn apply_local_pure(psi: &PureState, p: &LocalProjector, side: Side) -> Result<PureState> {
    if psi.dims().len() != 2 {
        return Err(Error::input("apply_local_pure expects a two-party state"));
    }
    let op = side_operator(p, side, psi.dims())?;
    let amp = &op * psi.amplitudes();
    let new_dims = match side {
        Side::A => DimVec::new(vec![p.matrix.nrows(), psi.dims().get(1)])?,
        Side::B => DimVec::new(vec![psi.dims().get(0), p.matrix.nrows()])?,
    };
    PureState::new(amp, new_dims)
}

/// Projection-bound report for one `(rho, P, side)` triple.
#[derive(Debug, Clone)]
pub struct ProjBoundReport {
    /// Kernel dimension of the projector.
    pub k: usize,
    /// Local dimension of the projected side.
    pub m_dim: usize,
    pub sn_rho: SnBound,
    /// `None` when the projection was degenerate.
    pub sn_sigma: Option<SnBound>,
    /// Interval consistency of `max{1, sn(rho)-k} <= sn(sigma)`.
    pub lower_ok: bool,
    /// Interval consistency of `sn(sigma) <= min{sn(rho), M-k}`.
    pub upper_ok: bool,
    /// For full-Schmidt-rank pure inputs: whether rank(sigma) = M-k exactly.
    pub pure_exact: Option<bool>,
}

/// Evaluate the projection sandwich for a state and a projector.
pub fn check_proj_bounds(
    rho: &DensityOp,
    p: &LocalProjector,
    side: Side,
    budget: &Budget,
    tol: &Tolerances,
) -> Result<ProjBoundReport> {
    let cut = Bipartition::first_vs_rest(2);
    let m_dim = match side {
        Side::A => rho.dims().get(0),
        Side::B => rho.dims().get(1),
    };
    let k = p.kernel_dim;
    let sn_rho = certify::sn_bounds(rho, &cut, budget, tol)?;
    let projected = apply_local(rho, p, side, tol)?;
    let Some(sigma) = projected.op else {
        return Ok(ProjBoundReport {
            k,
            m_dim,
            sn_rho,
            sn_sigma: None,
            lower_ok: true,
            upper_ok: true,
            pure_exact: None,
        });
    };
    let sn_sigma = certify::sn_bounds(&sigma, &cut, budget, tol)?;
    let lower_ok = 1.max(sn_rho.lo.saturating_sub(k)) <= sn_sigma.hi;
    let upper_ok = sn_sigma.lo <= sn_rho.hi.min(m_dim - k);

    // exact drop for pure states of full Schmidt rank
    let mut pure_exact = None;
    if rho.rank(tol.rank) == 1 {
        let (_, vecs) = rho.eigen();
        let psi = PureState::new(crate::CVec::from(vecs.column(0)), rho.dims().clone())?;
        let full = tensor::schmidt_rank(&psi, &cut, tol)? == m_dim;
        if full {
            let projected_pure = apply_local_pure(&psi, p, side)?;
            let r = tensor::schmidt_rank(&projected_pure, &cut, tol)?;
            pure_exact = Some(r == m_dim - k);
        }
    }

    Ok(ProjBoundReport {
        k,
        m_dim,
        sn_rho,
        sn_sigma: Some(sn_sigma),
        lower_ok,
        upper_ok,
        pure_exact,
    })
}

/// Sampled estimates of the best/worst Schmidt number reachable with
/// kernel-dimension-`k` projections on side A.
#[derive(Debug, Clone)]
pub struct SnMinMaxReport {
    /// `lo` is a sound lower estimate of the max over projectors; `hi` is
    /// the sandwich cap `min{sn(rho).hi, M-k}`.
    pub max_est: SnBound,
    /// `hi` is a sound upper estimate of the min over projectors; `lo` is
    /// the sandwich floor `max{1, sn(rho).lo - k}`.
    pub min_est: SnBound,
    pub samples_used: usize,
    /// Consistency of the sampled estimates with the sandwich.
    pub sandwich_ok: bool,
    pub sn_rho: SnBound,
}

/// Sample Haar-random and coordinate projectors of kernel dimension `k` on
/// side A and aggregate the certified bounds of the projections.
pub fn snminmax_estimate(
    rho: &DensityOp,
    k: usize,
    samples: usize,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
) -> Result<SnMinMaxReport> {
    if rho.dims().len() != 2 {
        return Err(Error::input("snminmax_estimate expects a two-party state"));
    }
    let m_dim = rho.dims().get(0);
    if k == 0 || k >= m_dim {
        return Err(Error::input(format!("kernel dimension {k} out of range for M = {m_dim}")));
    }
    let cut = Bipartition::first_vs_rest(2);
    let sn_rho = certify::sn_bounds(rho, &cut, budget, tol)?;

    let mut projectors: Vec<LocalProjector> = coordinate_projectors(m_dim, m_dim - k, 10)?;
    let mut rng = linalg::seeded_rng(seed, 0xC0DE);
    for _ in 0..samples {
        projectors.push(LocalProjector::haar(m_dim, m_dim - k, &mut rng)?);
    }

    let mut max_lo = 1usize;
    let mut max_lo_cert = LoCert::Trivial;
    let mut min_hi = usize::MAX;
    let mut used = 0usize;
    for p in &projectors {
        let projected = apply_local(rho, p, Side::A, tol)?;
        let Some(sigma) = projected.op else { continue };
        used += 1;
        let b = certify::sn_bounds(&sigma, &cut, budget, tol)?;
        if b.lo > max_lo {
            max_lo = b.lo;
            max_lo_cert = b.lo_cert.clone();
        }
        min_hi = min_hi.min(b.hi);
    }
    if used == 0 {
        return Err(Error::input("all sampled projections were degenerate"));
    }

    let max_est = SnBound {
        lo: max_lo,
        hi: sn_rho.hi.min(m_dim - k),
        lo_cert: max_lo_cert,
        hi_cert: HiCert::LocalRank(sn_rho.hi.min(m_dim - k)),
        budget_exhausted: false,
        notes: vec!["sampled lower estimate of the projective maximum".into()],
    };
    let min_est = SnBound {
        lo: 1.max(sn_rho.lo.saturating_sub(k)),
        hi: min_hi,
        lo_cert: LoCert::Construction {
            kind: "projection-sandwich",
            value: 1.max(sn_rho.lo.saturating_sub(k)),
        },
        hi_cert: HiCert::LocalRank(min_hi),
        budget_exhausted: false,
        notes: vec!["sampled upper estimate of the projective minimum".into()],
    };
    let sandwich_ok = min_est.lo <= min_est.hi && max_est.lo <= max_est.hi && min_est.lo <= max_est.hi;
    Ok(SnMinMaxReport {
        max_est,
        min_est,
        samples_used: used,
        sandwich_ok,
        sn_rho,
    })
}

fn coordinate_projectors(m: usize, rank: usize, cap: usize) -> Result<Vec<LocalProjector>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..rank).collect();
    loop {
        out.push(LocalProjector::coordinate(m, &idx)?);
        if out.len() >= cap {
            break;
        }
        let mut i = rank;
        let mut done = false;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] != i + m - rank {
                idx[i] += 1;
                for j in (i + 1)..rank {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        if done {
            break;
        }
    }
    Ok(out)
}

/// Per-side, per-kernel-dimension achieved Schmidt-number sets.
#[derive(Debug, Clone)]
pub struct RankSweepReport {
    /// Achieved bounds per (side, k).
    pub achieved: Vec<(Side, usize, Vec<SnBound>)>,
    /// Exactly certified values per side (union over k).
    pub exact_a: BTreeSet<usize>,
    pub exact_b: BTreeSet<usize>,
    /// Every exact value on one side is consistent with some interval on
    /// the other side.
    pub sides_consistent: bool,
    /// The exact values cover `{1, ..., sn_lo(rho)}`.
    pub covers_up_to_lo: bool,
    pub sn_rho: SnBound,
}

/// Sweep both sides and all kernel dimensions with sampled plus coordinate
/// projectors, collecting certified bounds of the projected states.
pub fn rank_sweep(rho: &DensityOp, samples_per_k: usize, budget: &Budget, tol: &Tolerances) -> Result<RankSweepReport> {
    if rho.dims().len() != 2 {
        return Err(Error::input("rank_sweep expects a two-party state"));
    }
    let cut = Bipartition::first_vs_rest(2);
    let sn_rho = certify::sn_bounds(rho, &cut, budget, tol)?;
    let mut achieved = Vec::new();
    let mut exact_a = BTreeSet::new();
    let mut exact_b = BTreeSet::new();
    let mut intervals_a: Vec<(usize, usize)> = Vec::new();
    let mut intervals_b: Vec<(usize, usize)> = Vec::new();

    for side in [Side::A, Side::B] {
        let m_dim = match side {
            Side::A => rho.dims().get(0),
            Side::B => rho.dims().get(1),
        };
        for k in 0..m_dim {
            let rank = m_dim - k;
            let mut projs = coordinate_projectors(m_dim, rank, 6)?;
            let mut rng = linalg::seeded_rng(budget.seed, (m_dim * 131 + k) as u64);
            for _ in 0..samples_per_k {
                projs.push(LocalProjector::haar(m_dim, rank, &mut rng)?);
            }
            let mut bounds = Vec::new();
            for p in projs {
                let projected = apply_local(rho, &p, side, tol)?;
                let Some(sigma) = projected.op else { continue };
                let b = certify::sn_bounds(&sigma, &cut, budget, tol)?;
                if b.is_exact() {
                    match side {
                        Side::A => exact_a.insert(b.lo),
                        Side::B => exact_b.insert(b.lo),
                    };
                }
                match side {
                    Side::A => intervals_a.push((b.lo, b.hi)),
                    Side::B => intervals_b.push((b.lo, b.hi)),
                }
                bounds.push(b);
            }
            achieved.push((side, k, bounds));
        }
    }

    let consistent_with = |v: usize, intervals: &[(usize, usize)]| {
        intervals.iter().any(|&(lo, hi)| lo <= v && v <= hi)
    };
    let sides_consistent = exact_a.iter().all(|&v| consistent_with(v, &intervals_b))
        && exact_b.iter().all(|&v| consistent_with(v, &intervals_a));
    let mut union: BTreeSet<usize> = exact_a.union(&exact_b).copied().collect();
    union.insert(sn_rho.lo.min(sn_rho.hi));
    let covers_up_to_lo = (1..=sn_rho.lo).all(|v| union.contains(&v));

    Ok(RankSweepReport {
        achieved,
        exact_a,
        exact_b,
        sides_consistent,
        covers_up_to_lo,
        sn_rho,
    })
}

/// Two-copy bound report.
#[derive(Debug, Clone)]
pub struct TwoCopyReport {
    pub sn_sigma: SnBound,
    pub sn_rho2: SnBound,
    pub sn_sigma2: SnBound,
    pub k: usize,
    pub m_dim: usize,
    /// `sn(sigma^(x2)) <= min{sn(rho^(x2)), (M-k)^2}` (interval semantics).
    pub copies_ok: bool,
    /// `sn(rho^(x2)) <= sn(sigma)^2 + 2k sn(sigma) + k^2`.
    pub expansion_ok: bool,
}

/// Check the two-copy inequalities for `(rho, P)`.
pub fn two_copy_bound_check(
    rho: &DensityOp,
    p: &LocalProjector,
    side: Side,
    budget: &Budget,
    tol: &Tolerances,
) -> Result<TwoCopyReport> {
    if rho.dims().len() != 2 {
        return Err(Error::input("two_copy_bound_check expects a two-party state"));
    }
    let cut = Bipartition::first_vs_rest(2);
    let m_dim = match side {
        Side::A => rho.dims().get(0),
        Side::B => rho.dims().get(1),
    };
    let k = p.kernel_dim;
    let projected = apply_local(rho, p, side, tol)?;
    let sigma = projected
        .op
        .ok_or_else(|| Error::precondition("projection is degenerate"))?;
    let sn_sigma = certify::sn_bounds(&sigma, &cut, budget, tol)?;

    let rho2 = states::tensor_power_regrouped(rho, 2)?;
    let sigma2 = states::tensor_power_regrouped(&sigma, 2)?;
    let cut2 = states::regrouped_cut(2);
    let sn_rho2 = certify::sn_bounds(&rho2, &cut2, budget, tol)?;
    let sn_sigma2 = certify::sn_bounds(&sigma2, &cut2, budget, tol)?;

    let cap = (m_dim - k) * (m_dim - k);
    let copies_ok = sn_sigma2.lo <= sn_rho2.hi.min(cap);
    let rhs = sn_sigma.hi * sn_sigma.hi + 2 * k * sn_sigma.hi + k * k;
    let expansion_ok = sn_rho2.lo <= rhs;
    Ok(TwoCopyReport {
        sn_sigma,
        sn_rho2,
        sn_sigma2,
        k,
        m_dim,
        copies_ok,
        expansion_ok,
    })
}
