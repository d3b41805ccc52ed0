/// Relative tolerances used by rank decisions, PSD verdicts and
/// reconstruction checks.
///
/// All of them are *relative*: `rank` and `orth` scale with the largest
/// singular value, `psd` with the trace, `herm` with the largest matrix entry
/// and `recon` with the trace (or the vector norm). Suitable for
/// double-precision decompositions at ambient dimension up to a few thousand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Singular values below `rank * sigma_max` count as zero.
    pub rank: f64,
    /// Eigenvalues above `-psd * trace` count as nonnegative.
    pub psd: f64,
    /// Hermiticity deviation allowed, relative to the largest entry.
    pub herm: f64,
    /// Reconstruction error allowed, relative to the trace / norm.
    pub recon: f64,
    /// Orthonormality deviation allowed for vector families.
    pub orth: f64,
    /// Absolute-squared tail mass below `cert * trace^2` certifies a
    /// decomposition search hit (before independent re-verification).
    pub cert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-9,
            psd: 1e-9,
            herm: 1e-10,
            recon: 1e-8,
            orth: 1e-8,
            cert: 1e-12,
        }
    }
}

impl Tolerances {
    /// Tolerances with a custom relative rank/PSD threshold, leaving the
    /// remaining fields at their defaults.
    pub fn with_rank(tol: f64) -> Self {
        Tolerances {
            rank: tol,
            psd: tol,
            ..Tolerances::default()
        }
    }
}
