// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Goodness-of-fit p-values with estimated parameters.
//!
//! Two calibrated procedures for `H0: X ~ F(.; theta)` with theta unknown:
//!
//! * `dbr`: compare `sqrt(n) * D_n(theta_hat)` against Monte Carlo draws of
//!   the sup of the estimated limit Gaussian process on a quantile grid.
//! * `bootstrap`: refit on parametric resamples drawn at `theta_hat` and
//!   compare the observed statistic against the resampled ones.

use rayon::prelude::*;

use super::covariance::{build_covariance_grid, quantile_grid};
use super::family::ParametricFamily;
use super::simulate::simulate_sup_abs_pair;
use crate::asymptotic::{Method, TailResult};
use crate::empirical::{ks_one_sample, Sample};
use crate::error::KsError;
use crate::rng::substream;
use crate::Result;

/// Which goodness-of-fit procedure to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GofMethod {
    Dbr,
    Bootstrap,
}

impl std::fmt::Display for GofMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GofMethod::Dbr => write!(f, "dbr"),
            GofMethod::Bootstrap => write!(f, "bootstrap"),
        }
    }
}

/// If the p-value moves by at least this much when the grid is refined,
/// the refined value is reported instead.
pub const GRID_DOUBLING_TOL: f64 = 0.005;

/// Result of the discretized-bridge-reference test.
#[derive(Debug, Clone, PartialEq)]
pub struct DbrTest {
    pub tail: TailResult<f64>,
    pub theta_hat: Vec<f64>,
    /// `sqrt(n) * D_n(theta_hat)`.
    pub observed: f64,
    /// P-value on the requested grid.
    pub base_p: f64,
    /// P-value on the grid with doubled resolution.
    pub refined_p: f64,
    /// Whether the refined value was adopted.
    pub doubled: bool,
    /// Grid size whose p-value is reported in `tail`.
    pub grid_size: usize,
}

fn fit_and_observe(
    sample: &Sample<f64>,
    fam: &dyn ParametricFamily,
) -> Result<(Vec<f64>, f64)> {
    if sample.n() <= fam.dim() {
        return Err(KsError::InvalidArgument(format!(
            "need more than {} observations to estimate {} parameters",
            fam.dim(),
            fam.dim()
        )));
    }
    let theta_hat = fam.fit_mle(sample.values())?;
    fam.check_theta(&theta_hat)?;
    let stats = ks_one_sample(sample, |t| fam.cdf(&theta_hat, t))?;
    let observed = (sample.n() as f64).sqrt() * stats.d;
    Ok((theta_hat, observed))
}

/// Run the discretized-bridge-reference test.
///
/// The reference process is simulated once on a grid of `2 * grid_size + 1`
/// quantile points; the requested grid is the odd-indexed subset, so both
/// p-values come from the same Gaussian draws. A replicate counts toward
/// the p-value when its sup strictly exceeds the observed statistic.
pub fn dbr_test(
    sample: &Sample<f64>,
    fam: &dyn ParametricFamily,
    grid_size: usize,
    reps: u64,
    seed: u64,
) -> Result<DbrTest> {
    if grid_size < 2 {
        return Err(KsError::InvalidGrid);
    }
    let (theta_hat, observed) = fit_and_observe(sample, fam)?;

    let fine_size = 2 * grid_size + 1;
    let fine = quantile_grid(fam, &theta_hat, fine_size)?;
    // Fine point 2i - 1 sits at quantile level i / (grid_size + 1).
    let coarse_idx: Vec<usize> = (1..=grid_size).map(|i| 2 * i - 1).collect();
    let cg = build_covariance_grid(fam, &theta_hat, &fine)?;
    let pairs = simulate_sup_abs_pair(&cg, &coarse_idx, reps, seed)?;

    let base_hits = pairs.iter().filter(|&&(_, c)| c > observed).count();
    let refined_hits = pairs.iter().filter(|&&(f, _)| f > observed).count();
    let base_p = base_hits as f64 / reps as f64;
    let refined_p = refined_hits as f64 / reps as f64;
    let doubled = (base_p - refined_p).abs() >= GRID_DOUBLING_TOL;
    let (p, grid_used) = if doubled { (refined_p, fine_size) } else { (base_p, grid_size) };
    let tail = TailResult {
        p,
        method: Method::MonteCarlo,
        err: (p * (1.0 - p) / reps as f64).sqrt(),
        terms_used: 0,
    };
    Ok(DbrTest { tail, theta_hat, observed, base_p, refined_p, doubled, grid_size: grid_used })
}

/// P-value-only wrapper around [`dbr_test`].
pub fn dbr_pvalue(
    sample: &Sample<f64>,
    fam: &dyn ParametricFamily,
    grid_size: usize,
    reps: u64,
    seed: u64,
) -> Result<TailResult<f64>> {
    Ok(dbr_test(sample, fam, grid_size, reps, seed)?.tail)
}

/// Result of the parametric bootstrap test.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapTest {
    pub tail: TailResult<f64>,
    pub theta_hat: Vec<f64>,
    /// `sqrt(n) * D_n(theta_hat)`.
    pub observed: f64,
    /// Replicates dropped because their refit failed.
    pub failures: u64,
}

enum RepOutcome {
    Hit,
    Miss,
    Failed,
}

/// Run the parametric bootstrap test.
///
/// Each replicate draws `n` observations at `theta_hat`, refits, and
/// recomputes the normalized statistic; a replicate counts toward the
/// p-value when its statistic is at least the observed one. Replicates
/// whose refit fails are dropped; more than 1% of them is an error.
pub fn bootstrap_test(
    sample: &Sample<f64>,
    fam: &dyn ParametricFamily,
    reps: u64,
    seed: u64,
) -> Result<BootstrapTest> {
    if reps == 0 {
        return Err(KsError::InvalidArgument("reps must be at least 1".into()));
    }
    let (theta_hat, observed) = fit_and_observe(sample, fam)?;
    let n = sample.n();
    let sqrt_n = (n as f64).sqrt();

    let outcomes: Vec<RepOutcome> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r);
            let mut values = Vec::with_capacity(n);
            fam.sample_into(&theta_hat, &mut rng, n, &mut values);
            let rep = || -> Result<bool> {
                let resample = Sample::new(values.clone())?;
                let theta_star = fam.fit_mle(resample.values())?;
                let stats = ks_one_sample(&resample, |t| fam.cdf(&theta_star, t))?;
                Ok(sqrt_n * stats.d >= observed)
            };
            match rep() {
                Ok(true) => RepOutcome::Hit,
                Ok(false) => RepOutcome::Miss,
                Err(_) => RepOutcome::Failed,
            }
        })
        .collect();

    let hits = outcomes.iter().filter(|o| matches!(o, RepOutcome::Hit)).count() as u64;
    let failures = outcomes.iter().filter(|o| matches!(o, RepOutcome::Failed)).count() as u64;
    if failures * 100 > reps {
        return Err(KsError::MleFailure(format!(
            "{failures} of {reps} bootstrap refits failed"
        )));
    }
    let denom = (reps - failures) as f64;
    let p = hits as f64 / denom;
    let tail = TailResult {
        p,
        method: Method::MonteCarlo,
        err: (p * (1.0 - p) / denom).sqrt(),
        terms_used: 0,
    };
    Ok(BootstrapTest { tail, theta_hat, observed, failures })
}

/// P-value-only wrapper around [`bootstrap_test`].
pub fn bootstrap_pvalue(
    sample: &Sample<f64>,
    fam: &dyn ParametricFamily,
    reps: u64,
    seed: u64,
) -> Result<TailResult<f64>> {
    Ok(bootstrap_test(sample, fam, reps, seed)?.tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gof::family::{ExponentialFamily, NormalFamily};

    fn normal_sample(n: usize, seed: u64) -> Sample<f64> {
        let mut rng = substream(seed, 0);
        let mut values = Vec::new();
        NormalFamily.sample_into(&[0.7, 2.25], &mut rng, n, &mut values);
        Sample::new(values).unwrap()
    }

    #[test]
    fn dbr_is_deterministic_and_sane() {
        let sample = normal_sample(60, 101);
        let a = dbr_test(&sample, &NormalFamily, 20, 400, 5).unwrap();
        let b = dbr_test(&sample, &NormalFamily, 20, 400, 5).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.tail.p));
        assert_eq!(a.tail.method, Method::MonteCarlo);
        // Both fractions are counts over 400.
        assert!((a.base_p * 400.0).fract().abs() < 1e-9);
        assert!((a.refined_p * 400.0).fract().abs() < 1e-9);
        let reported = if a.doubled { a.refined_p } else { a.base_p };
        assert_eq!(a.tail.p, reported);
    }

    #[test]
    fn dbr_p_is_location_scale_invariant_for_normal() {
        let sample = normal_sample(80, 2024);
        let shifted: Vec<f64> = sample.values().iter().map(|&x| 3.0 * x + 2.0).collect();
        let shifted = Sample::new(shifted).unwrap();
        let a = dbr_test(&sample, &NormalFamily, 30, 500, 9).unwrap();
        let b = dbr_test(&shifted, &NormalFamily, 30, 500, 9).unwrap();
        assert!((a.observed - b.observed).abs() < 1e-12);
        assert_eq!(a.tail.p, b.tail.p);
        assert_eq!(a.base_p, b.base_p);
    }

    #[test]
    fn dbr_rejects_degenerate_input() {
        let flat = Sample::new(vec![1.0; 12]).unwrap();
        assert!(matches!(
            dbr_test(&flat, &NormalFamily, 10, 50, 1),
            Err(KsError::MleFailure(_))
        ));
        let tiny = Sample::new(vec![0.3, 0.9]).unwrap();
        assert!(matches!(
            dbr_test(&tiny, &NormalFamily, 10, 50, 1),
            Err(KsError::InvalidArgument(_))
        ));
        let sample = normal_sample(20, 3);
        assert!(matches!(dbr_test(&sample, &NormalFamily, 1, 50, 1), Err(KsError::InvalidGrid)));
    }

    #[test]
    fn dbr_p_decreases_in_the_observed_statistic() {
        // Same reference draws, larger observed value, smaller tail mass:
        // compare a well-fitting sample against one pushed off-family.
        let good = normal_sample(100, 77);
        let mut warped: Vec<f64> = good.values().to_vec();
        for v in warped.iter_mut() {
            *v = v.abs();
        }
        let warped = Sample::new(warped).unwrap();
        let pg = dbr_test(&good, &NormalFamily, 25, 600, 4).unwrap();
        let pw = dbr_test(&warped, &NormalFamily, 25, 600, 4).unwrap();
        assert!(pw.observed > pg.observed);
        assert!(pw.tail.p <= pg.tail.p, "pw={} pg={}", pw.tail.p, pg.tail.p);
    }

    #[test]
    fn bootstrap_is_deterministic_and_sane() {
        let sample = normal_sample(40, 55);
        let a = bootstrap_test(&sample, &NormalFamily, 200, 8).unwrap();
        let b = bootstrap_test(&sample, &NormalFamily, 200, 8).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.failures, 0);
        assert!((0.0..=1.0).contains(&a.tail.p));
        assert!((a.tail.p * 200.0).fract().abs() < 1e-9);
    }

    #[test]
    fn bootstrap_single_rep_is_zero_or_one() {
        let sample = normal_sample(30, 12);
        let t = bootstrap_test(&sample, &NormalFamily, 1, 99).unwrap();
        assert!(t.tail.p == 0.0 || t.tail.p == 1.0);
    }

    #[test]
    fn bootstrap_works_for_exponential_family() {
        let mut rng = substream(500, 0);
        let mut values = Vec::new();
        ExponentialFamily.sample_into(&[1.7], &mut rng, 50, &mut values);
        let sample = Sample::new(values).unwrap();
        let t = bootstrap_test(&sample, &ExponentialFamily, 300, 6).unwrap();
        assert!((0.0..=1.0).contains(&t.tail.p));
        assert!((t.theta_hat[0] - 1.7).abs() < 0.6);
    }

    #[test]
    fn methods_agree_on_a_clear_rejection() {
        // Data far from exponential: both procedures should reject hard.
        let values: Vec<f64> = (1..=60).map(|i| 10.0 + 0.001 * i as f64).collect();
        let sample = Sample::new(values).unwrap();
        let d = dbr_test(&sample, &ExponentialFamily, 20, 400, 2).unwrap();
        let b = bootstrap_test(&sample, &ExponentialFamily, 400, 2).unwrap();
        assert!(d.tail.p < 0.01, "dbr p = {}", d.tail.p);
        assert!(b.tail.p < 0.01, "bootstrap p = {}", b.tail.p);
    }
}
