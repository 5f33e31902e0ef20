//! Boolean functions, the normalized Walsh–Hadamard transform, and the
//! forrelation statistic.
//!
//! Conventions used throughout the crate:
//!
//! - A function on `n` bits is a length-`N = 2^n` sign vector indexed by
//!   `x` as an integer; bit `i` of the index is input bit `x_{i+1}`, so
//!   `x . z` is the parity of `x & z`.
//! - The transform carries the `1/sqrt(N)` normalization,
//!   `fhat(z) = N^{-1/2} * sum_x (-1)^{x.z} f(x)`, which makes it an
//!   involution and gives Parseval's identity `sum_z fhat(z)^2 = N` for
//!   ±1-valued `f`.
//!
//! For ±1 inputs the unnormalized butterfly stays integer-valued, and all
//! integers involved fit a f64 mantissa exactly up to [`crate::MAX_QUBITS`]
//! qubits. Threshold predicates (`is_good`, `ff_success`) therefore compare
//! in exact u64 arithmetic rather than through rounded floats.

use alloc::vec::Vec;

use crate::{check_qubits, Error, MAX_QUBITS};

/// Truth table of `f: {0,1}^n -> {-1,+1}` stored as a sign vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    n: u32,
    values: Vec<i8>,
}

impl BooleanFunction {
    /// Wraps a sign vector; `values` must have exactly `2^n` entries, each ±1.
    pub fn new(n: u32, values: Vec<i8>) -> Result<Self, Error> {
        check_qubits(n)?;
        let len = 1usize << n;
        if values.len() != len {
            return Err(Error::InvalidArgument("truth table length must be 2^n"));
        }
        if let Some(index) = values.iter().position(|v| *v != 1 && *v != -1) {
            return Err(Error::InvalidSignValue { index });
        }
        Ok(Self { n, values })
    }

    /// Builds the table by evaluating `f` on every point of the domain.
    pub fn from_fn(n: u32, mut f: impl FnMut(usize) -> i8) -> Result<Self, Error> {
        check_qubits(n)?;
        let len = 1usize << n;
        Self::new(n, (0..len).map(|x| f(x)).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `N = 2^n`.
    pub fn domain_size(&self) -> usize {
        1usize << self.n
    }

    pub fn value(&self, x: usize) -> i8 {
        self.values[x]
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// The sign vector widened to f64, suitable as transform input.
    pub fn sign_vector(&self) -> Vec<f64> {
        self.values.iter().map(|&v| f64::from(v)).collect()
    }
}

/// Normalized Fourier coefficients of a Boolean function.
///
/// Only constructed through [`fourier`], so Parseval's identity holds by
/// construction (exactly, up to the final scaling).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumVector {
    n: u32,
    coeffs: Vec<f64>,
}

impl SpectrumVector {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeff(&self, z: usize) -> f64 {
        self.coeffs[z]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `sum_z fhat(z)^2 - N`, which should vanish to rounding error.
    pub fn parseval_residual(&self) -> f64 {
        let total: f64 = self.coeffs.iter().map(|c| c * c).sum();
        total - self.coeffs.len() as f64
    }
}

/// In-place unnormalized butterfly: `out(z) = sum_x (-1)^{x.z} in(x)`.
///
/// O(N log N) adds/subtracts; exact whenever all intermediate values stay
/// within the f64 mantissa (always the case for ±1 inputs at n <= 24).
pub(crate) fn butterfly_in_place(values: &mut [f64]) -> Result<(), Error> {
    let len = values.len();
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let mut half = 1;
    while half < len {
        let mut block = 0;
        while block < len {
            for i in block..block + half {
                let a = values[i];
                let b = values[i + half];
                values[i] = a + b;
                values[i + half] = a - b;
            }
            block += 2 * half;
        }
        half *= 2;
    }
    Ok(())
}

/// In-place normalized Walsh–Hadamard transform (an involution).
pub fn wht_in_place(values: &mut [f64]) -> Result<(), Error> {
    butterfly_in_place(values)?;
    let scale = 1.0 / libm::sqrt(values.len() as f64);
    for v in values.iter_mut() {
        *v *= scale;
    }
    Ok(())
}

/// Normalized Walsh–Hadamard transform of a copy of `values`.
pub fn wht(values: &[f64]) -> Result<Vec<f64>, Error> {
    let mut out = values.to_vec();
    wht_in_place(&mut out)?;
    Ok(out)
}

/// Unnormalized Walsh spectrum of `f`; every entry is an exact
/// integer-valued f64 in `[-N, N]`, and `fhat(z)` is `spectrum[z]/sqrt(N)`.
pub(crate) fn integer_spectrum(f: &BooleanFunction) -> Vec<f64> {
    let mut spec = f.sign_vector();
    // Cannot fail: the length is 2^n by construction.
    butterfly_in_place(&mut spec).expect("truth table length is a power of two");
    spec
}

/// Normalized Fourier transform of `f`.
pub fn fourier(f: &BooleanFunction) -> SpectrumVector {
    let mut coeffs = integer_spectrum(f);
    let scale = 1.0 / libm::sqrt(f.domain_size() as f64);
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    SpectrumVector { n: f.n, coeffs }
}

/// The forrelation statistic
/// `p(f,g) = N^{-3} (sum_{x,y} f(x) (-1)^{x.y} g(y))^2 = <fhat, g>^2 / N^2`.
///
/// Computed with one transform; the double sum collapses because summing
/// over `x` first yields `sqrt(N) * fhat(y)`. Always in `[0, 1]`.
pub fn forrelation_value(f: &BooleanFunction, g: &BooleanFunction) -> Result<f64, Error> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch { left: f.n(), right: g.n() });
    }
    let spec = integer_spectrum(f);
    // Exact integer in [-N^2, N^2]: sum of (integer spectrum) * (+/-1).
    let dot: f64 = spec
        .iter()
        .zip(g.values())
        .map(|(s, &gv)| s * f64::from(gv))
        .sum();
    let n_f = f.domain_size() as f64;
    let t = dot / n_f; // exact: division by a power of two
    // Cauchy-Schwarz bounds |dot| by N^{3/2}; clamp the one rounding step.
    Ok((t * t / n_f).min(1.0))
}

/// Ceiling of `num * count / den` for the success quotas.
fn quota(count: usize, num: usize, den: usize) -> usize {
    (num * count).div_ceil(den)
}

/// Spectral mass of a tuple above the two magnitude thresholds, in exact
/// unnormalized units (`S = sqrt(N) * fhat` is integer-valued).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoodTupleMass {
    /// Sum of `S^2` over coefficients with `|fhat| >= 1` (`S^2 >= N`).
    pub mass_at_least_one: u64,
    /// Sum of `S^2` over coefficients with `|fhat| >= 2` (`S^2 >= 4N`).
    pub mass_at_least_two: u64,
    /// `N^2 n`, the unnormalized equivalent of the mass scale `N n`.
    pub scale: u64,
}

impl GoodTupleMass {
    /// `mass_{|fhat| >= 1} >= 0.8 N n`, compared exactly as
    /// `5 * mass >= 4 * N^2 n` in u64.
    pub fn first_condition(&self) -> bool {
        5 * self.mass_at_least_one >= 4 * self.scale
    }

    /// `mass_{|fhat| >= 2} >= 0.26 N n`, compared exactly as
    /// `50 * mass >= 13 * N^2 n` in u64.
    pub fn second_condition(&self) -> bool {
        50 * self.mass_at_least_two >= 13 * self.scale
    }
}

/// Thresholded spectral masses of an `n`-tuple of functions on `n` bits.
pub fn good_tuple_mass(fs: &[BooleanFunction]) -> Result<GoodTupleMass, Error> {
    let n = fs.len() as u32;
    if fs.is_empty() {
        return Err(Error::InvalidArgument("tuple must contain n functions"));
    }
    if n > MAX_QUBITS || fs.iter().any(|f| f.n() != n) {
        return Err(Error::InvalidArgument(
            "tuple size must equal the qubit count of every function",
        ));
    }
    let big_n = 1u64 << n;
    let mut mass1: u64 = 0;
    let mut mass2: u64 = 0;
    for f in fs {
        for s in integer_spectrum(f) {
            let s = s as i64;
            let sq = (s * s) as u64;
            if sq >= big_n {
                mass1 += sq;
            }
            if sq >= 4 * big_n {
                mass2 += sq;
            }
        }
    }
    Ok(GoodTupleMass {
        mass_at_least_one: mass1,
        mass_at_least_two: mass2,
        scale: big_n * big_n * u64::from(n), // fits u64 at n <= 24
    })
}

/// The good-tuple predicate: the spectral mass on coefficients with
/// `|fhat| >= 1` reaches `0.8*N*n` and the mass on `|fhat| >= 2` reaches
/// `0.26*N*n`. Both comparisons are exact.
pub fn is_good(fs: &[BooleanFunction]) -> Result<bool, Error> {
    let mass = good_tuple_mass(fs)?;
    Ok(mass.first_condition() && mass.second_condition())
}

/// The fishing success predicate: at least `ceil(0.75 n)` of the outputs
/// satisfy `|fhat_i(z_i)| >= 1` and at least `ceil(0.25 n)` satisfy
/// `|fhat_i(z_i)| >= 2`.
pub fn ff_success(zs: &[usize], fs: &[BooleanFunction]) -> Result<bool, Error> {
    if zs.len() != fs.len() || fs.is_empty() {
        return Err(Error::InvalidArgument("one output string per function"));
    }
    let n = fs[0].n();
    if fs.iter().any(|f| f.n() != n) {
        return Err(Error::InvalidArgument("tuple functions disagree on qubit count"));
    }
    let big_n = 1u64 << n;
    let mut count1 = 0usize;
    let mut count2 = 0usize;
    for (f, &z) in fs.iter().zip(zs) {
        if z >= f.domain_size() {
            return Err(Error::InvalidArgument("output index outside the domain"));
        }
        let spec = integer_spectrum(f);
        let s = spec[z] as i64;
        let sq = (s * s) as u64;
        if sq >= big_n {
            count1 += 1;
        }
        if sq >= 4 * big_n {
            count2 += 1;
        }
    }
    let tuple = fs.len();
    Ok(count1 >= quota(tuple, 3, 4) && count2 >= quota(tuple, 1, 4))
}
