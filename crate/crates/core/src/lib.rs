//! Angle distortion of real linear maps.
//!
//! A linear map `T` sends a pair of vectors at cosine `c` to a pair whose
//! cosine may differ from `c`. [`eps::eps_hat`] computes the worst such
//! deviation exactly from the two extreme singular values of `T`, and
//! [`eps::extremal_witness`] builds a pair attaining it. The remaining
//! modules provide the SVD it rests on ([`linalg`]), the angle relations
//! and samplers ([`angle`]), a sampling cross-check and bound/invariance
//! verifier ([`verify`]), matrix file I/O ([`io`]) and the CLI ([`cli`]).

pub mod angle;
pub mod cli;
pub mod corpus;
pub mod eps;
pub mod error;
pub mod io;
pub mod linalg;
pub mod verify;

pub use angle::AngleConstant;
pub use eps::{eps_hat, EpsReport};
pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};

/// A map is treated as non-injective when `[T] <= INJECTIVE_REL_TOL * ||T||`.
pub const INJECTIVE_REL_TOL: f64 = 1e-12;

/// Norms at or below this count as zero.
pub const ZERO_NORM: f64 = 1e-300;
