//! # factorcert
//!
//! Certificates for factorizable quantum channels on matrix algebras.
//!
//! A quantum channel `T` on `M_n` is stored in Kraus form with the convention
//!
//! ```text
//! T(x) = Σ_i a_i* x a_i
//! ```
//!
//! (note the adjoint on the LEFT, unlike most of the literature). A channel has an
//! *exact factorization* through `M_n ⊗ M_k` when a unitary `u` exists with
//! `T(x) = (id_n ⊗ τ_k)(u* (x ⊗ 1_k) u)`, where `τ_k` is the normalized trace.
//!
//! The crate provides:
//!
//! - [`linalg`]: dense complex matrices, Kronecker products (left factor outermost),
//!   normalized partial traces over the right factor, exact rationals.
//! - [`channels`]: Kraus channels, Choi matrices, the completely depolarizing channel
//!   and its Weyl mixture.
//! - [`certificates`]: rational-mixture, matrix-algebra and direct-sum factorization
//!   certificates with their verifiers.
//! - [`constructions`]: lifting a rational mixture `T ⊗ S_k = Σ c_i ad(u_i)` into a
//!   factorization, pushing factorizations along trace-preserving embeddings, and
//!   collapsing direct sums into a single matrix algebra.
//! - [`free_group`]: exact symbolic checks of factorizations through free group
//!   von Neumann algebras.
//! - [`io`]: the JSON document formats used by the `factorcert` CLI.

#![forbid(unsafe_code)]

pub mod certificates;
pub mod channels;
pub mod constructions;
mod error;
pub mod free_group;
pub mod io;
pub mod linalg;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default verification tolerance (Frobenius norm).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Spectral cutoff used when extracting Kraus operators from a Choi matrix.
pub const KRAUS_RANK_CUTOFF: f64 = 1e-9;

/// Resource bounds applied to every construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest matrix dimension that may be materialized.
    pub max_dim: usize,
    /// Largest common denominator accepted when expanding rational coefficients.
    pub max_lcm: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_dim: 4096,
            max_lcm: 1_000_000,
        }
    }
}

impl Limits {
    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.max_dim {
            Err(Error::DimensionLimit {
                dim,
                max: self.max_dim,
            })
        } else {
            Ok(())
        }
    }
}
