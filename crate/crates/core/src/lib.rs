// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact and asymptotic distributions for Kolmogorov-Smirnov statistics.
//!
//! The crate covers four related problems:
//!
//! * **One-sample finite-n laws** ([`one_sample`]): the exact tail of the
//!   one-sided discrepancy between an empirical CDF and a continuous null,
//!   and the full law of the first index at which the sample path crosses a
//!   shifted boundary.
//! * **Two-sample finite-n laws** ([`two_sample`]): exact one-sided tails
//!   on the discrete lattice of attainable values, by a reflection-counting
//!   closed form, exact path counting, or an asymptotic fallback.
//! * **Limit laws** ([`asymptotic`]): the Kolmogorov series, its inverse
//!   for critical values, exponential tail bounds, and the hitting density
//!   of the Brownian bridge.
//! * **Estimated-parameter goodness of fit** ([`gof`]): calibrated
//!   p-values when the null family's parameters are fit from the same data,
//!   via a simulated Gaussian limit process or a parametric bootstrap.
//!
//! [`oracle`] holds slow, independent recomputations (simulation and
//! exhaustive enumeration) used to validate everything else. Generic
//! numeric entry points accept any scalar implementing [`real::Real`];
//! the `*64` aliases below fix `f64` for callers that don't care.

pub mod asymptotic;
pub mod empirical;
mod error;
pub mod gof;
pub mod one_sample;
pub mod oracle;
pub mod quad;
pub mod real;
pub mod rng;
pub(crate) mod special;
pub mod two_sample;

pub use error::KsError;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, KsError>;

/// [`empirical::Sample`] over `f64`.
pub type Sample64 = empirical::Sample<f64>;
/// [`empirical::KsStatistics`] over `f64`.
pub type KsStatistics64 = empirical::KsStatistics<f64>;
/// [`empirical::ConfidenceBand`] over `f64`.
pub type ConfidenceBand64 = empirical::ConfidenceBand<f64>;
/// [`asymptotic::TailResult`] over `f64`.
pub type TailResult64 = asymptotic::TailResult<f64>;
/// [`one_sample::HittingTimeLaw`] over `f64`.
pub type HittingTimeLaw64 = one_sample::HittingTimeLaw<f64>;
