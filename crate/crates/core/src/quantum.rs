//! Exact classical simulation of the two quantum query algorithms.
//!
//! Neither needs a statevector engine: the fishing circuit is one query,
//! a layer of Hadamards, and a measurement, so its outcome distribution is
//! `Pr[z] = fhat(z)^2 / N`; the checking circuit accepts with probability
//! exactly `p(f,g)`. Simulation is therefore one transform plus sampling,
//! with no gate-level error, and scales to the full supported size.

use alloc::vec::Vec;

use rand::Rng;

use crate::distributions::unnormalized_spectrum;
use crate::fourier::{ff_success, forrelation_value, BooleanFunction};
use crate::Error;

/// Promise thresholds on `p(f,g)` and the midpoint used to amplify the
/// checking decision over repeated runs.
pub const PROMISE_FORRELATED: f64 = 0.05;
pub const PROMISE_UNIFORM: f64 = 0.01;
pub const FC_DECISION_THRESHOLD: f64 = 0.03;

/// Result of one fishing run over a tuple of functions.
#[derive(Debug, Clone, PartialEq)]
pub struct FishingOutcome {
    /// Measured string per function.
    pub outputs: Vec<usize>,
    /// `|fhat_i(z_i)|` per function.
    pub magnitudes: Vec<f64>,
    /// The success predicate evaluated on (outputs, tuple).
    pub success: bool,
}

/// Measurement distribution of the fishing circuit: `Pr[z] = fhat(z)^2 / N`.
///
/// Entries are exact dyadic rationals summing to exactly 1 (integer
/// Parseval divided by a power of two).
pub fn ff_output_distribution(f: &BooleanFunction) -> Vec<f64> {
    let len = f.domain_size() as f64;
    unnormalized_spectrum(f)
        .iter()
        .map(|s| (s * s) / (len * len))
        .collect()
}

/// Inverse-CDF draw from a probability vector: O(N) to build the running
/// sum, O(log N) per draw, deterministic given the generator.
fn sample_index<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let mut cdf = Vec::with_capacity(probabilities.len());
    let mut running = 0.0;
    for p in probabilities {
        running += p;
        cdf.push(running);
    }
    let u = rng.random::<f64>() * running;
    cdf.partition_point(|&c| c <= u).min(probabilities.len() - 1)
}

/// One fishing run: measure each function's circuit independently and
/// evaluate the success predicate on the results.
pub fn ff_run<R: Rng + ?Sized>(
    fs: &[BooleanFunction],
    rng: &mut R,
) -> Result<FishingOutcome, Error> {
    if fs.is_empty() || fs.iter().any(|f| f.n() as usize != fs.len()) {
        return Err(Error::InvalidArgument("need n functions on n bits"));
    }
    let mut outputs = Vec::with_capacity(fs.len());
    let mut magnitudes = Vec::with_capacity(fs.len());
    for f in fs {
        let dist = ff_output_distribution(f);
        let z = sample_index(&dist, rng);
        outputs.push(z);
        magnitudes.push(libm::sqrt(dist[z] * f.domain_size() as f64));
    }
    let success = ff_success(&outputs, fs)?;
    Ok(FishingOutcome { outputs, magnitudes, success })
}

/// Exact single-run acceptance probability of the checking circuit, which
/// is the forrelation statistic itself.
pub fn fc_accept_probability(f: &BooleanFunction, g: &BooleanFunction) -> Result<f64, Error> {
    forrelation_value(f, g)
}

/// Simulates `repetitions` independent runs of the checking circuit and
/// accepts iff the empirical acceptance frequency exceeds the midpoint of
/// the promise gap.
pub fn fc_run<R: Rng + ?Sized>(
    f: &BooleanFunction,
    g: &BooleanFunction,
    repetitions: u32,
    rng: &mut R,
) -> Result<bool, Error> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be at least 1"));
    }
    let p = fc_accept_probability(f, g)?;
    let mut accepts = 0u32;
    for _ in 0..repetitions {
        if rng.random::<f64>() < p {
            accepts += 1;
        }
    }
    Ok(f64::from(accepts) / f64::from(repetitions) > FC_DECISION_THRESHOLD)
}

/// Where a pair sits relative to the promise gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromiseVerdict {
    /// `p(f,g) >= 0.05`.
    Forrelated,
    /// `p(f,g) <= 0.01`.
    Uniformish,
    /// Strictly inside the gap.
    OutsidePromise,
}

/// Classifies a pair by its exact statistic against the promise thresholds.
pub fn classify_promise(
    f: &BooleanFunction,
    g: &BooleanFunction,
) -> Result<PromiseVerdict, Error> {
    let p = fc_accept_probability(f, g)?;
    Ok(if p >= PROMISE_FORRELATED {
        PromiseVerdict::Forrelated
    } else if p <= PROMISE_UNIFORM {
        PromiseVerdict::Uniformish
    } else {
        PromiseVerdict::OutsidePromise
    })
}
