// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by validation and numerical routines across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value: {0}")]
    NonFiniteValue(f64),
    #[error("query point is NaN")]
    InvalidQueryPoint,
    #[error("sample size must be positive")]
    ZeroSampleSize,
    #[error("cdf returned {value} outside [0, 1] at x = {at}")]
    InvalidCdf { value: f64, at: f64 },
    #[error("confidence level {0} outside (0, 1)")]
    InvalidLevel(f64),
    #[error("epsilon {0} outside [0, 1]")]
    InvalidEpsilon(f64),
    #[error("lambda {lambda} outside [0, {max}]")]
    InvalidLambda { lambda: f64, max: f64 },
    #[error("j = {j} outside the hitting-time support 0..={max}")]
    OutOfSupport { j: u64, max: u64 },
    #[error("statistic {0} outside its valid range")]
    InvalidStatistic(f64),
    #[error("sample sizes must satisfy 1 <= m <= n, got n = {n}, m = {m}")]
    SampleSizeOrder { n: u64, m: u64 },
    #[error("lattice index out of range: k = {k} not in 1..={n} or l = {l} not in 0..={m}")]
    InvalidLatticeIndex { n: u64, m: u64, k: u64, l: u64 },
    #[error("lattice level k/n - l/m = {0} is not positive")]
    NonPositiveDelta(f64),
    #[error("rank r = {r} must be at least 1 for sample size {n}")]
    InvalidRank { r: u64, n: u64 },
    #[error("observed statistic {observed} is not on the lattice for n = {n}, m = {m} (within 1e-9)")]
    OffLattice { observed: f64, n: u64, m: u64 },
    #[error("series argument lambda = {0} must be positive")]
    SeriesDomain(f64),
    #[error("tolerance {0} must be positive and finite")]
    InvalidTolerance(f64),
    #[error("alpha = {alpha} is outside the invertible range [{min:e}, {max:e}] of the bisection bracket")]
    BracketExhausted { alpha: f64, min: f64, max: f64 },
    #[error("argument {0} outside the open unit interval (0, 1)")]
    OutsideUnitInterval(f64),
    #[error("quadrature tolerance not reached: achieved {achieved:e}, requested {requested:e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },
    #[error("covariance matrix is not positive semidefinite: min eigenvalue {min_eig:e}")]
    NotPsd { min_eig: f64 },
    #[error("Cholesky factorization failed after jitter: pivot {pivot:e} at index {index}")]
    CholeskyFailure { pivot: f64, index: usize },
    #[error("maximum-likelihood fit failed: {0}")]
    MleFailure(String),
    #[error("invalid parameter vector for family {family}: {reason}")]
    InvalidTheta { family: &'static str, reason: String },
    #[error("grid must be strictly increasing with at least 2 points")]
    InvalidGrid,
    #[error("enumeration space of {size:.3e} interleavings exceeds the cap of {cap:.1e}")]
    EnumerationTooLarge { size: f64, cap: f64 },
    #[error("{0}")]
    InvalidArgument(String),
}
