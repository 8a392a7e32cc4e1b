// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Independent cross-checks for the analytic distributions.
//!
//! Everything here recomputes probabilities from first principles: tails by
//! direct simulation, finite-sample laws by exhaustive enumeration of
//! orderings, and test procedures by resampling under a known null. None of
//! it calls the closed-form tail routines it exists to validate, so an
//! agreement between the two is evidence rather than tautology.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::empirical::{ks_one_sample, ks_two_sample, Sample, Side};
use crate::error::KsError;
use crate::gof::{bootstrap_pvalue, dbr_test, GofMethod, ParametricFamily};
use crate::rng::{derive, substream};
use crate::special::binomial_capped;
use crate::two_sample::ENUMERATION_CAP;
use crate::Result;

use rand::Rng;

/// Fewer replicates than this give standard errors too wide to check
/// anything at the tolerances used across the crate.
pub const MIN_MC_REPS: u64 = 1000;

/// A Monte Carlo proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub se: f64,
    pub reps: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, reps: u64, seed: u64) -> Self {
        let estimate = hits as f64 / reps as f64;
        let se = (estimate * (1.0 - estimate) / reps as f64).sqrt();
        McEstimate { estimate, se, reps, seed }
    }
}

fn check_reps(reps: u64) -> Result<()> {
    if reps < MIN_MC_REPS {
        return Err(KsError::InvalidArgument(format!(
            "need at least {MIN_MC_REPS} replicates, got {reps}"
        )));
    }
    Ok(())
}

fn uniform_sample(rng: &mut impl Rng, n: u64) -> Sample<f64> {
    let values: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    Sample::new(values).expect("uniform draws are finite and nonempty")
}

/// Estimate `P(stat > eps)` under uniformity by direct simulation.
/// Replicate `r` uses RNG substream `r` of `seed`.
pub fn mc_one_sample_tail(
    n: u64,
    eps: f64,
    side: Side,
    reps: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(KsError::ZeroSampleSize);
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(KsError::InvalidEpsilon(eps));
    }
    check_reps(reps)?;
    let hits: u64 = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r);
            let sample = uniform_sample(&mut rng, n);
            let stats = ks_one_sample(&sample, |t| t).expect("identity cdf is valid on (0,1)");
            u64::from(stats.by_side(side) > eps)
        })
        .sum();
    Ok(McEstimate::from_hits(hits, reps, seed))
}

/// Estimate `P(stat >= level)` for two samples with a common continuous
/// distribution. The comparison is made in units of `1/(n*m)`, where both
/// the statistic and any lattice-valued `level` are exact integers, so no
/// hit is ever decided by float roundoff.
pub fn mc_two_sample_tail(
    n: u64,
    m: u64,
    level: f64,
    side: Side,
    reps: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n == 0 || m == 0 {
        return Err(KsError::ZeroSampleSize);
    }
    if !(0.0..=1.0).contains(&level) {
        return Err(KsError::InvalidStatistic(level));
    }
    check_reps(reps)?;
    let scale = (n * m) as f64;
    let scaled_level = (level * scale).round() as i64;
    let hits: u64 = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r);
            let x = uniform_sample(&mut rng, n);
            let y = uniform_sample(&mut rng, m);
            let stat = ks_two_sample(&x, &y).by_side(side);
            u64::from((stat * scale).round() as i64 >= scaled_level)
        })
        .sum();
    Ok(McEstimate::from_hits(hits, reps, seed))
}

/// Empirical law of the boundary hitting index from simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct McHittingTime {
    pub n: u64,
    pub lambda: f64,
    pub epsilon: f64,
    /// `counts[j]` = replicates whose first boundary crossing was at index j.
    pub counts: Vec<u64>,
    /// Replicates that never crossed.
    pub infinity: u64,
    pub reps: u64,
    pub seed: u64,
}

impl McHittingTime {
    pub fn frequency(&self, j: usize) -> f64 {
        self.counts[j] as f64 / self.reps as f64
    }

    pub fn frequency_infinity(&self) -> f64 {
        self.infinity as f64 / self.reps as f64
    }

    pub fn se(&self, j: usize) -> f64 {
        let p = self.frequency(j);
        (p * (1.0 - p) / self.reps as f64).sqrt()
    }
}

/// Simulate the first index `j` at which the j-th order statistic of `n`
/// uniforms exceeds `eps + j/n`, with `eps = lambda / sqrt(n)`. No crossing
/// counts toward `infinity`.
pub fn mc_hitting_time(n: u64, lambda: f64, reps: u64, seed: u64) -> Result<McHittingTime> {
    if n == 0 {
        return Err(KsError::ZeroSampleSize);
    }
    let max = (n as f64).sqrt();
    if !(lambda > 0.0 && lambda <= max) {
        return Err(KsError::InvalidLambda { lambda, max });
    }
    check_reps(reps)?;
    let eps = lambda / max;
    let per_rep: Vec<Option<usize>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r);
            let mut values: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            (0..n as usize).find(|&j| values[j] > eps + j as f64 / n as f64)
        })
        .collect();
    let mut counts = vec![0_u64; n as usize + 1];
    let mut infinity = 0;
    for hit in per_rep {
        match hit {
            Some(j) => counts[j] += 1,
            None => infinity += 1,
        }
    }
    Ok(McHittingTime { n, lambda, epsilon: eps, counts, infinity, reps, seed })
}

/// One atom of an exactly enumerated statistic distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactAtom {
    /// Statistic value in units of `1/(n*m)`.
    pub scaled: i64,
    /// The statistic value as an exact rational.
    pub value: BigRational,
    /// Orderings attaining this value.
    pub count: u64,
    pub prob: BigRational,
}

/// Exact finite-sample distribution of a two-sample statistic obtained by
/// enumerating every ordering of the pooled sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub n: u64,
    pub m: u64,
    pub statistic: Side,
    /// Atoms in increasing order of value.
    pub atoms: Vec<ExactAtom>,
    /// Total orderings enumerated; equals the sum of atom counts.
    pub total: u64,
}

impl ExactDistribution {
    /// `P(stat >= s / (n*m))` as an exact rational.
    pub fn tail_at_scaled(&self, s: i64) -> BigRational {
        let hits: u64 = self
            .atoms
            .iter()
            .filter(|a| a.scaled >= s)
            .map(|a| a.count)
            .sum();
        BigRational::new(BigInt::from(hits), BigInt::from(self.total))
    }
}

fn walk_orderings(
    i: u64,
    j: u64,
    n: u64,
    m: u64,
    h: i64,
    extreme: i64,
    statistic: Side,
    hist: &mut BTreeMap<i64, u64>,
) {
    let extreme = match statistic {
        Side::Plus => extreme.max(h),
        Side::Minus => extreme.max(-h),
        Side::Two => extreme.max(h.abs()),
    };
    if i == n && j == m {
        *hist.entry(extreme).or_insert(0) += 1;
        return;
    }
    if i < n {
        walk_orderings(i + 1, j, n, m, h + m as i64, extreme, statistic, hist);
    }
    if j < m {
        walk_orderings(i, j + 1, n, m, h - n as i64, extreme, statistic, hist);
    }
}

/// Enumerate all `C(n+m, n)` orderings of the pooled sample and tabulate
/// the chosen statistic. The prefix after `i` of the first sample and `j`
/// of the second has `F_n - G_m = (i*m - j*n) / (n*m)`, so the walk tracks
/// that integer numerator directly and every tabulated value is exact.
pub fn enumerate_interleavings(n: u64, m: u64, statistic: Side) -> Result<ExactDistribution> {
    if n == 0 || m == 0 {
        return Err(KsError::ZeroSampleSize);
    }
    if n + m > 64 {
        return Err(KsError::InvalidArgument(format!(
            "pooled size {} too large to enumerate",
            n + m
        )));
    }
    match binomial_capped(n + m, n, ENUMERATION_CAP) {
        Some(_) => {}
        None => {
            // The cap fits in f64 exactly; the true size only matters for
            // the error message, so a float estimate is enough.
            let ln_size = crate::special::ln_binomial(n + m, n);
            return Err(KsError::EnumerationTooLarge {
                size: ln_size.exp(),
                cap: ENUMERATION_CAP as f64,
            });
        }
    }
    let mut hist = BTreeMap::new();
    walk_orderings(0, 0, n, m, 0, 0, statistic, &mut hist);
    let total: u64 = hist.values().sum();
    let denom = BigInt::from(total);
    let scale = BigInt::from(n * m);
    let atoms = hist
        .into_iter()
        .map(|(scaled, count)| ExactAtom {
            scaled,
            value: BigRational::new(BigInt::from(scaled), scale.clone()),
            count,
            prob: BigRational::new(BigInt::from(count), denom.clone()),
        })
        .collect();
    Ok(ExactDistribution { n, m, statistic, atoms, total })
}

/// Knobs for the inner test run inside [`null_calibration`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Grid size handed to the dbr procedure.
    pub grid_size: usize,
    /// Monte Carlo replicates inside each test (reference draws for dbr,
    /// resamples for the bootstrap).
    pub sim_reps: u64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions { grid_size: 100, sim_reps: 2000 }
    }
}

/// Observed size of a goodness-of-fit procedure under its own null.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Rejections divided by successful replicates.
    pub rejection_rate: f64,
    pub rejections: u64,
    /// Replicates whose fit failed and were excluded.
    pub failures: u64,
    pub replicates: u64,
    /// Largest |base - refined| p-value gap seen across replicates when the
    /// method reports one (dbr only).
    pub max_grid_shift: Option<f64>,
}

/// Draw `n_replicates` datasets of size `n` at the true parameter
/// `theta0`, run the chosen test on each, and count rejections at level
/// `alpha` (reject when `p <= alpha`).
///
/// Replicate `idx` derives its own seed from `seed`, then splits it into a
/// sampling stream and a test-internal seed, so the result is independent
/// of evaluation order and thread count.
pub fn null_calibration(
    fam: &dyn ParametricFamily,
    theta0: &[f64],
    n: usize,
    n_replicates: u64,
    alpha: f64,
    method: GofMethod,
    seed: u64,
    opts: &CalibrationOptions,
) -> Result<Calibration> {
    fam.check_theta(theta0)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(KsError::InvalidLevel(alpha));
    }
    if n_replicates == 0 {
        return Err(KsError::InvalidArgument("need at least one replicate".into()));
    }
    let mut rejections = 0;
    let mut failures = 0;
    let mut max_shift: Option<f64> = None;
    for idx in 0..n_replicates {
        let rep_seed = derive(seed, idx);
        let mut rng = substream(rep_seed, 0);
        let mut values = Vec::with_capacity(n);
        fam.sample_into(theta0, &mut rng, n, &mut values);
        let sample = Sample::new(values)?;
        let test_seed = derive(rep_seed, 1);
        let p = match method {
            GofMethod::Dbr => match dbr_test(&sample, fam, opts.grid_size, opts.sim_reps, test_seed)
            {
                Ok(t) => {
                    let shift = (t.base_p - t.refined_p).abs();
                    max_shift = Some(max_shift.map_or(shift, |m: f64| m.max(shift)));
                    Ok(t.tail.p)
                }
                Err(e) => Err(e),
            },
            GofMethod::Bootstrap => {
                bootstrap_pvalue(&sample, fam, opts.sim_reps, test_seed).map(|t| t.p)
            }
        };
        match p {
            Ok(p) => {
                if p <= alpha {
                    rejections += 1;
                }
            }
            Err(KsError::MleFailure(_)) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    let successes = n_replicates - failures;
    if successes == 0 {
        return Err(KsError::MleFailure("every calibration replicate failed".into()));
    }
    Ok(Calibration {
        rejection_rate: rejections as f64 / successes as f64,
        rejections,
        failures,
        replicates: n_replicates,
        max_grid_shift: max_shift,
    })
}
