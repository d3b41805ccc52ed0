//! Schmidt-number machinery for finite-dimensional quantum states.
//!
//! The crate provides a dense complex-matrix substrate ([`tensor`]), a zoo of
//! named states ([`states`]), partial-transpose criteria ([`ppt`]),
//! witness-based lower bounds ([`witness`]), certified Schmidt-number
//! intervals ([`certify`]), local-projection bounds ([`proj`]) and
//! multipartite tensor-rank machinery ([`multi`]).
//!
//! States are *not* assumed trace-normalized: every tolerance in the crate is
//! relative (scaled by the trace, the largest singular value or the largest
//! matrix entry). Everything is a pure function of its inputs; all stochastic
//! searches take explicit seeds and are reproducible.

pub mod certify;
pub mod error;
pub mod linalg;
pub mod multi;
pub mod ppt;
pub mod proj;
pub mod states;
pub mod tensor;
pub mod tolerance;
pub mod witness;

pub use error::{Error, Result};
pub use tensor::{Bipartition, DensityOp, DimVec, PureState, SchmidtDecomp};
pub use tolerance::Tolerances;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVec = nalgebra::DVector<C64>;

/// Largest ambient dimension accepted when building composite states.
pub const MAX_AMBIENT_DIM: usize = 4096;
