//! Dense complex matrices, tensor and direct-sum structure, normalized traces and
//! exact rationals.
//!
//! Tensor convention: in `kron(a, b)` the left factor is the outer (coarse block)
//! index, and every partial trace traces out the right (inner) factor.

mod matrix;
mod rational;

pub use matrix::{
    block_repeat, direct_sum, gram_vectors, is_psd, is_unitary, kron, kron_with_limit,
    normalized_trace, partial_trace_right, unitarity_error, ComplexMatrix,
};
pub use rational::{lcm_reduce, LcmExpansion, Rational};
