//! Simulation primitives for the Fourier Fishing and Fourier Checking
//! oracle problems at classically tractable sizes.
//!
//! The crate covers four layers:
//!
//! - [`fourier`]: Boolean functions as ±1 truth tables, the normalized
//!   Walsh–Hadamard transform, the forrelation statistic `p(f,g)`, and the
//!   good-tuple / fishing-success predicates.
//! - [`distributions`]: samplers for the uniform and forrelated function
//!   distributions, the secretly biased families built from an `n`-bit
//!   secret, biased bit strings, and exact / limiting probability
//!   evaluators for the biased mixture.
//! - [`quantum`] and [`classical`]: exact single-query simulation of the
//!   quantum fishing and checking algorithms (they reduce to one transform
//!   plus sampling), the `O(sqrt(N))`-query classical checking algorithm
//!   with its calibration search, and the greedy/quantum coefficient
//!   finders used in the secret-recovery experiments.
//! - [`independence`]: k-terms over `(f,g)` pairs, orthant probabilities
//!   under the forrelated measure, and the Gaussian affine-subspace
//!   density ratio behind its almost k-wise independence.
//!
//! Everything is deterministic given an [`RngStream`]; floating-point math
//! goes through [`libm`] so results are bit-identical across platforms.
//! The crate is `no_std` (with `alloc`).

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classical;
pub mod distributions;
mod error;
pub mod fourier;
pub mod independence;
pub mod quantum;
pub mod rng;

pub use error::Error;
pub use fourier::{BooleanFunction, SpectrumVector};
pub use rng::RngStream;

/// Largest supported qubit count. A truth table at this size is a vector
/// of 2^24 doubles (128 MiB); beyond that the exact-integer invariants of
/// the unnormalized transform would also start to lose headroom in f64.
pub const MAX_QUBITS: u32 = 24;

pub(crate) fn check_qubits(n: u32) -> Result<(), Error> {
    if n == 0 || n > MAX_QUBITS {
        Err(Error::QubitCountOutOfRange(n))
    } else {
        Ok(())
    }
}

/// `(-1)^{popcount(bits)}` as a float.
#[inline]
pub(crate) fn parity_sign(bits: usize) -> f64 {
    if bits.count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}
