//! How much does the extremum deque remember?
//!
//! After a full pass over `d` values, the deque holds exactly the values that
//! are at least as strong as everything after them (the suffix extrema), with
//! equal values merged into one counted entry. For inputs with no ties the
//! strongest value always survives and evicts everything older, so averaging
//! over its position gives the recurrence
//!
//! ```text
//! g(n) = 1 + (1/n) * (g(1) + g(2) + ... + g(n-1)),    g(1) = 1
//! ```
//!
//! whose closed form is the n-th harmonic number. This module computes that
//! expectation three independent ways so each can check the others:
//!
//! - [`g_recurrence`] evaluates the recurrence in exact rational arithmetic.
//! - [`brute_force_expected_length`] enumerates all `d!` permutations and
//!   feeds each through a real [`MonotonicDeque`], averaging exactly.
//! - [`simulate_expected_length`] runs seeded Monte Carlo trials over a
//!   configurable input distribution and reports mean and standard error.
//!
//! Exact rationals are kept all the way through; floats appear only at the
//! reporting boundary. Every trial derives its own RNG stream from the base
//! seed and the trial index, so results are reproducible and trials are
//! independent of evaluation order.

use crate::error::{Error, Result};
use crate::maxdeque::{MonotonicDeque, Polarity};
use crate::value::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

/// Largest width accepted by [`brute_force_expected_length`]; 10! is the
/// biggest factorial that enumerates in sensible test time.
pub const ENUMERATION_LIMIT: usize = 10;

/// Exact expected remembered-entry count for width `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedLength {
    pub d: usize,
    /// Expectation as an exact rational; always in `[1, d]`.
    pub exact: BigRational,
}

impl ExpectedLength {
    fn new(d: usize, exact: BigRational) -> ExpectedLength {
        debug_assert!(exact >= BigRational::one());
        debug_assert!(exact <= BigRational::from_integer(BigInt::from(d)));
        ExpectedLength { d, exact }
    }

    /// Float view for reporting; the stored value stays exact.
    pub fn to_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::NAN)
    }

    /// Render as `numer/denom`, or just the integer when the denominator is 1.
    pub fn fraction(&self) -> String {
        self.exact.to_string()
    }
}

/// Input distribution for [`simulate_expected_length`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionKind {
    /// A uniformly random permutation of `1..=d` (no ties).
    UniformPermutation,
    /// Independent normal draws; ties are possible and merge in the deque.
    Normal { mean: f64, std_dev: f64 },
    /// The strictly increasing ramp `1..=d`.
    Increasing,
    /// The strictly decreasing ramp `d..=1`.
    Decreasing,
}

impl DistributionKind {
    /// Stable label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            DistributionKind::UniformPermutation => "uniform-permutation",
            DistributionKind::Normal { .. } => "normal",
            DistributionKind::Increasing => "increasing",
            DistributionKind::Decreasing => "decreasing",
        }
    }
}

/// A distribution plus the base seed all trial streams derive from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub seed: u64,
}

/// Monte Carlo estimate of the expected remembered-entry count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationResult {
    pub d: usize,
    pub trials: u64,
    pub mean: f64,
    /// Standard error of the mean; 0 when every trial agrees or `trials` is 1.
    pub std_error: f64,
}

/// Monotone input shapes with known extreme behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
}

/// Number of entries a max-polarity deque remembers after entering every
/// value in order. This is the primitive the three estimators share.
pub fn remembered_length<T: Scalar>(values: &[T]) -> Result<usize> {
    let mut deque = MonotonicDeque::new(Polarity::Max);
    for &v in values {
        deque.enter(v)?;
    }
    Ok(deque.len())
}

/// Expected remembered-entry count by the averaging recurrence, evaluated in
/// exact rational arithmetic. Equals the d-th harmonic number.
pub fn g_recurrence(d: usize) -> Result<ExpectedLength> {
    if d == 0 {
        return Err(Error::ZeroWidth);
    }
    let mut prefix = BigRational::zero();
    let mut g = BigRational::one();
    for n in 2..=d {
        prefix += g;
        g = BigRational::one() + &prefix / BigRational::from_integer(BigInt::from(n));
    }
    Ok(ExpectedLength::new(d, g))
}

/// Exact expectation by enumerating all `d!` permutations of `1..=d` and
/// feeding each through a real deque. Guarded by [`ENUMERATION_LIMIT`].
pub fn brute_force_expected_length(d: usize) -> Result<ExpectedLength> {
    if d == 0 {
        return Err(Error::ZeroWidth);
    }
    if d > ENUMERATION_LIMIT {
        return Err(Error::WidthTooLarge(d, ENUMERATION_LIMIT));
    }

    // Heap's algorithm: every iteration applies one swap, visiting each
    // permutation exactly once.
    let mut values: Vec<i64> = (1..=d as i64).collect();
    let mut control = vec![0usize; d];
    let mut total: u64 = remembered_length(&values)? as u64;
    let mut visited: u64 = 1;
    let mut i = 0;
    while i < d {
        if control[i] < i {
            if i % 2 == 0 {
                values.swap(0, i);
            } else {
                values.swap(control[i], i);
            }
            total += remembered_length(&values)? as u64;
            visited += 1;
            control[i] += 1;
            i = 0;
        } else {
            control[i] = 0;
            i += 1;
        }
    }

    let factorial: u64 = (1..=d as u64).product();
    debug_assert_eq!(visited, factorial);
    let exact = BigRational::new(BigInt::from(total), BigInt::from(visited));
    Ok(ExpectedLength::new(d, exact))
}

/// Remembered-entry count for a constructed monotone ramp of width `d`, fed
/// through the deque rather than assumed. Increasing inputs collapse to one
/// entry; decreasing inputs keep all `d`.
pub fn extreme_case_length(kind: Trend, d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::ZeroWidth);
    }
    let ramp: Vec<i64> = match kind {
        Trend::Increasing => (1..=d as i64).collect(),
        Trend::Decreasing => (1..=d as i64).rev().collect(),
    };
    remembered_length(&ramp)
}

/// Monte Carlo estimate over `trials` independent inputs of width `d`.
///
/// Trial `t` draws from a `ChaCha12` generator seeded with the base seed and
/// moved to stream `t`, so any subset of trials can be reproduced or run in
/// any order. Length sums are accumulated in 128-bit integers and the
/// variance numerator `n * sum_sq - sum^2` is formed exactly before the only
/// float rounding at the end. Deterministic kinds (increasing, decreasing)
/// are measured once; every trial would repeat the same value, so the mean is
/// exact and the standard error is 0.
pub fn simulate_expected_length(
    spec: &DistributionSpec,
    d: usize,
    trials: u64,
) -> Result<SimulationResult> {
    if d == 0 {
        return Err(Error::ZeroWidth);
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }

    match spec.kind {
        DistributionKind::Increasing | DistributionKind::Decreasing => {
            let trend = match spec.kind {
                DistributionKind::Increasing => Trend::Increasing,
                _ => Trend::Decreasing,
            };
            let len = extreme_case_length(trend, d)?;
            return Ok(SimulationResult {
                d,
                trials,
                mean: len as f64,
                std_error: 0.0,
            });
        }
        DistributionKind::Normal { mean, std_dev } => {
            if !std_dev.is_finite() || std_dev <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "normal std_dev must be finite and positive, got {std_dev}"
                )));
            }
            if !mean.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "normal mean must be finite, got {mean}"
                )));
            }
        }
        DistributionKind::UniformPermutation => {}
    }

    let base = ChaCha12Rng::seed_from_u64(spec.seed);
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;

    match spec.kind {
        DistributionKind::UniformPermutation => {
            let mut buf: Vec<i64> = (1..=d as i64).collect();
            for trial in 0..trials {
                let mut rng = base.clone();
                rng.set_stream(trial);
                // Reset to sorted order so each trial is a self-contained
                // shuffle of the same starting list.
                for (i, slot) in buf.iter_mut().enumerate() {
                    *slot = (i as i64) + 1;
                }
                buf.shuffle(&mut rng);
                let len = remembered_length(&buf)? as u128;
                sum += len;
                sum_sq += len * len;
            }
        }
        DistributionKind::Normal { mean, std_dev } => {
            let dist = Normal::new(mean, std_dev).expect("parameters validated above");
            let mut buf: Vec<f64> = Vec::with_capacity(d);
            for trial in 0..trials {
                let mut rng = base.clone();
                rng.set_stream(trial);
                buf.clear();
                for _ in 0..d {
                    buf.push(dist.sample(&mut rng));
                }
                let len = remembered_length(&buf)? as u128;
                sum += len;
                sum_sq += len * len;
            }
        }
        DistributionKind::Increasing | DistributionKind::Decreasing => unreachable!(),
    }

    let n = trials as f64;
    let mean = sum as f64 / n;
    let std_error = if trials > 1 {
        // Exact integer numerator avoids cancellation when lengths barely vary.
        let numer = (trials as u128 * sum_sq - sum * sum) as f64;
        let sample_var = numer / (n * (n - 1.0));
        (sample_var / n).sqrt()
    } else {
        0.0
    };

    Ok(SimulationResult {
        d,
        trials,
        mean,
        std_error,
    })
}
