//! Samplers and probability evaluators for the function distributions:
//! the uniform distribution over sign vectors, the forrelated distribution
//! generated by a Gaussian field, the secretly biased families indexed by
//! an `n`-bit secret, and biased bit strings.
//!
//! Sign convention: `sgn(a) = +1` for `a >= 0` and `-1` otherwise. With
//! continuous fields a zero entry has measure zero, but the tie rule is
//! fixed so sampling is deterministic.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::fourier::{butterfly_in_place, integer_spectrum, BooleanFunction};
use crate::{check_qubits, parity_sign, Error};

const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
fn sgn(a: f64) -> i8 {
    if a >= 0.0 {
        1
    } else {
        -1
    }
}

/// The real vector of i.i.d. standard normal draws generating a forrelated pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianField {
    n: u32,
    values: Vec<f64>,
}

impl GaussianField {
    pub fn new(n: u32, values: Vec<f64>) -> Result<Self, Error> {
        check_qubits(n)?;
        if values.len() != 1usize << n {
            return Err(Error::InvalidArgument("field length must be 2^n"));
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// How a [`FunctionPair`] was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Uniform,
    Forrelated,
}

/// A pair `(f, g)` with its generation mode; forrelated pairs retain the
/// generating field.
#[derive(Debug, Clone)]
pub struct FunctionPair {
    pub f: BooleanFunction,
    pub g: BooleanFunction,
    pub provenance: Provenance,
    pub field: Option<GaussianField>,
}

/// Every entry ±1 by an independent fair coin.
pub fn sample_uniform_function<R: Rng + ?Sized>(
    n: u32,
    rng: &mut R,
) -> Result<BooleanFunction, Error> {
    check_qubits(n)?;
    let len = 1usize << n;
    let mut values = Vec::with_capacity(len);
    let mut word = 0u64;
    let mut bits_left = 0u32;
    for _ in 0..len {
        if bits_left == 0 {
            word = rng.random();
            bits_left = 64;
        }
        values.push(if word & 1 == 1 { 1 } else { -1 });
        word >>= 1;
        bits_left -= 1;
    }
    BooleanFunction::new(n, values)
}

/// An independent uniform pair (provenance `Uniform`, no field).
pub fn sample_uniform_pair<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<FunctionPair, Error> {
    let f = sample_uniform_function(n, rng)?;
    let g = sample_uniform_function(n, rng)?;
    Ok(FunctionPair { f, g, provenance: Provenance::Uniform, field: None })
}

/// A fresh Gaussian field of `2^n` i.i.d. `N(0,1)` entries.
pub fn sample_gaussian_field<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<GaussianField, Error> {
    check_qubits(n)?;
    let len = 1usize << n;
    let values = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    GaussianField::new(n, values)
}

/// The deterministic part of forrelated sampling: `f = sgn(v)`,
/// `g = sgn(vhat)` for a given field `v`.
pub fn pair_from_field(field: GaussianField) -> Result<FunctionPair, Error> {
    let n = field.n();
    let f = BooleanFunction::new(n, field.values().iter().map(|&v| sgn(v)).collect())?;
    let mut transformed = field.values().to_vec();
    // Signs are scale-invariant, so the unnormalized butterfly suffices.
    butterfly_in_place(&mut transformed)?;
    let g = BooleanFunction::new(n, transformed.iter().map(|&v| sgn(v)).collect())?;
    Ok(FunctionPair { f, g, provenance: Provenance::Forrelated, field: Some(field) })
}

/// One draw from the forrelated distribution.
pub fn sample_forrelated_pair<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<FunctionPair, Error> {
    pair_from_field(sample_gaussian_field(n, rng)?)
}

/// The inner product `flat(w)^T H flat(Hw)` of the two unit sign vectors
/// derived from the field; its square equals the forrelation statistic of
/// the generated pair.
///
/// `flat(u)` is the unit vector with entries `sgn(u_x)/sqrt(N)` and `H` the
/// normalized transform, so the value reduces to `<f, ghat> / N`.
pub fn forrelation_overlap(field: &GaussianField) -> Result<f64, Error> {
    if field.values().iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateInput("all-zero field"));
    }
    let len = field.values().len();
    let mut g: Vec<f64> = field.values().to_vec();
    butterfly_in_place(&mut g)?;
    for v in g.iter_mut() {
        *v = f64::from(sgn(*v));
    }
    butterfly_in_place(&mut g)?; // exact integers: unnormalized spectrum of g
    let dot: f64 = field
        .values()
        .iter()
        .zip(&g)
        .map(|(&v, &ghat)| f64::from(sgn(v)) * ghat)
        .sum();
    Ok(dot / (len as f64 * libm::sqrt(len as f64)))
}

/// `flat(w)^T w = sum_x |v_x| / (sqrt(N) ||v||_2)`, the alignment between
/// the field and its flattened sign vector.
pub fn flat_alignment(field: &GaussianField) -> Result<f64, Error> {
    let norm_sq: f64 = field.values().iter().map(|v| v * v).sum();
    if norm_sq == 0.0 {
        return Err(Error::DegenerateInput("all-zero field"));
    }
    let abs_sum: f64 = field.values().iter().map(|v| libm::fabs(*v)).sum();
    let len = field.values().len() as f64;
    Ok(abs_sum / (libm::sqrt(len) * libm::sqrt(norm_sq)))
}

/// Which way the per-entry bias tilts relative to the secret's character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasBranch {
    /// `Pr[f(x) = 1] = 1/2 + (-1)^{s.x} / (2 sqrt(N))`.
    Plus,
    /// `Pr[f(x) = 1] = 1/2 - (-1)^{s.x} / (2 sqrt(N))`.
    Minus,
    /// Fair mixture of the two; the coin is drawn internally and withheld.
    Mixture,
}

/// A secretly biased family: secret string and branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BiasSpec {
    pub secret: usize,
    pub branch: BiasBranch,
}

fn check_secret(n: u32, secret: usize) -> Result<(), Error> {
    check_qubits(n)?;
    if secret >= 1usize << n {
        return Err(Error::InvalidArgument("secret must be an n-bit string"));
    }
    Ok(())
}

fn sample_with_sign<R: Rng + ?Sized>(
    secret: usize,
    n: u32,
    sign: f64,
    rng: &mut R,
) -> BooleanFunction {
    let len = 1usize << n;
    let tilt = sign / (2.0 * libm::sqrt(len as f64));
    let values = (0..len)
        .map(|x| {
            let p_one = 0.5 + parity_sign(x & secret) * tilt;
            if rng.random::<f64>() < p_one {
                1
            } else {
                -1
            }
        })
        .collect();
    BooleanFunction::new(n, values).expect("constructed values are signs")
}

/// Draws one function from the chosen biased family. For the mixture the
/// branch coin is consumed from `rng` first and not revealed; tests that
/// need it use [`sample_biased_function_with_branch`].
pub fn sample_biased_function<R: Rng + ?Sized>(
    spec: &BiasSpec,
    n: u32,
    rng: &mut R,
) -> Result<BooleanFunction, Error> {
    check_secret(n, spec.secret)?;
    let sign = match spec.branch {
        BiasBranch::Plus => 1.0,
        BiasBranch::Minus => -1.0,
        BiasBranch::Mixture => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
    };
    Ok(sample_with_sign(spec.secret, n, sign, rng))
}

/// Mixture draw that also reveals which branch the hidden coin selected.
/// Draws identically to [`sample_biased_function`] with `BiasBranch::Mixture`.
pub fn sample_biased_function_with_branch<R: Rng + ?Sized>(
    secret: usize,
    n: u32,
    rng: &mut R,
) -> Result<(BooleanFunction, BiasBranch), Error> {
    check_secret(n, secret)?;
    let branch = if rng.random::<bool>() { BiasBranch::Plus } else { BiasBranch::Minus };
    let sign = if branch == BiasBranch::Plus { 1.0 } else { -1.0 };
    Ok((sample_with_sign(secret, n, sign, rng), branch))
}

/// A probability reported both linearly and in log space; the linear value
/// underflows to zero once `2^{-N}` factors exceed f64 range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Likelihood {
    pub prob: f64,
    pub ln_prob: f64,
}

/// `ln(e^a + e^b)` without overflow.
fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}

/// Exact probability of observing `f` under the secret mixture for a given
/// secret: `(prod_x pA(x) + prod_x pB(x)) / 2`, where `pA`/`pB` are the
/// per-entry probabilities of the observed sign in the two branches.
///
/// Evaluated in log space (the products scale like `2^{-N}`); restricted to
/// `n <= 16` to bound the O(N) scan.
pub fn exact_mixture_prob(f: &BooleanFunction, secret: usize) -> Result<Likelihood, Error> {
    let n = f.n();
    if n > 16 {
        return Err(Error::InvalidArgument("exact probabilities supported for n <= 16"));
    }
    check_secret(n, secret)?;
    let tilt = 1.0 / (2.0 * libm::sqrt(f.domain_size() as f64));
    let mut ln_plus = 0.0;
    let mut ln_minus = 0.0;
    for (x, &v) in f.values().iter().enumerate() {
        let t = parity_sign(x & secret) * f64::from(v) * tilt;
        ln_plus += libm::log(0.5 + t);
        ln_minus += libm::log(0.5 - t);
    }
    let ln_prob = ln_add_exp(ln_plus, ln_minus) - LN_2;
    Ok(Likelihood { prob: libm::exp(ln_prob), ln_prob })
}

/// The large-N limit of [`exact_mixture_prob`] as a function of the biased
/// coefficient alone: `(e^t + e^{-t}) / (2 sqrt(e) 2^N)` at `t = fhat(s)`.
pub fn limit_mixture_prob(fhat_s: f64, n: u32) -> Likelihood {
    let t = libm::fabs(fhat_s);
    let big_n = libm::exp2(f64::from(n));
    // ln(e^t + e^{-t}) = t + ln(1 + e^{-2t})
    let ln_prob = t + libm::log1p(libm::exp(-2.0 * t)) - LN_2 - 0.5 - big_n * LN_2;
    Likelihood { prob: libm::exp(ln_prob), ln_prob }
}

/// `m` independent bits, each 1 with probability `1/2 + epsilon`.
pub fn sample_biased_string<R: Rng + ?Sized>(
    m: usize,
    epsilon: f64,
    rng: &mut R,
) -> Result<Vec<bool>, Error> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::InvalidArgument("epsilon must lie in [0, 1/2]"));
    }
    let p = 0.5 + epsilon;
    Ok((0..m).map(|_| rng.random::<f64>() < p).collect())
}

/// Unnormalized-spectrum helper shared with the quantum and classical
/// modules: `fhat(z) = spectrum[z] / sqrt(N)` with exact integer entries.
pub(crate) fn unnormalized_spectrum(f: &BooleanFunction) -> Vec<f64> {
    integer_spectrum(f)
}
