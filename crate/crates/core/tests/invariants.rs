// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Randomized invariant checks across the public API.
//!
//! Unit tests inside each module pin known values; the properties here
//! throw arbitrary inputs at the crate and assert the structural facts
//! that must hold for every input: orderings, bounds, lattice membership,
//! monotonicity, domination, and seed determinism.

use proptest::prelude::*;

use ksdist::asymptotic::{
    bb_hitting_density, dkwm_bound_lambda, kolmogorov_series_tail, Sided,
};
use ksdist::empirical::{dkwm_band, ks_one_sample, ks_two_sample, Side};
use ksdist::gof::{build_covariance_grid, quantile_grid, NormalFamily};
use ksdist::one_sample::{sbt_tail, support_max, tau_pmf_at_eps};
use ksdist::oracle::mc_one_sample_tail;
use ksdist::two_sample::{
    feller_tail, two_sample_exact_pvalue, TwoSampleEngine,
};
use ksdist::{KsError, Sample64};

/// A valid continuous CDF covering the generated value range: a linear
/// ramp on [-1e6, 1e6], clamped outside.
fn ramp_cdf(t: f64) -> f64 {
    (0.5 + t / 2e6).clamp(0.0, 1.0)
}

fn finite_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6f64..1e6, 1..max_len)
}

/// Equal sample size n and a rank 1..=n on its statistic lattice.
fn size_and_rank() -> impl Strategy<Value = (u64, u64)> {
    (1u64..=32).prop_flat_map(|n| (Just(n), 1u64..=n))
}

proptest! {
    #[test]
    fn one_sample_statistics_ordered_and_bounded(values in finite_values(150)) {
        let sample = Sample64::new(values).unwrap();
        let stats = ks_one_sample(&sample, ramp_cdf).unwrap();
        prop_assert!(stats.d_plus >= 0.0 && stats.d_plus <= 1.0);
        prop_assert!(stats.d_minus >= 0.0 && stats.d_minus <= 1.0);
        prop_assert!(stats.d == stats.d_plus.max(stats.d_minus));
        prop_assert!(stats.by_side(Side::Two) == stats.d);
        prop_assert!(stats.by_side(Side::Plus) == stats.d_plus);
        prop_assert!(stats.by_side(Side::Minus) == stats.d_minus);
    }

    #[test]
    fn band_contains_ecdf_within_half_width(
        values in finite_values(120),
        level in 0.5f64..0.999,
    ) {
        let sample = Sample64::new(values).unwrap();
        let band = dkwm_band(&sample, level).unwrap();
        let eps = band.epsilon;
        let last = sample.values()[sample.n() - 1];
        let mut probes: Vec<f64> = sample.values().to_vec();
        probes.push(last + 1.0);
        probes.push(sample.values()[0] - 1.0);
        for t in probes {
            let e: f64 = sample.ecdf(t).unwrap();
            let lo = band.lower.value_at(t);
            let hi = band.upper.value_at(t);
            prop_assert!(lo <= e && e <= hi, "band must contain the ecdf at {t}");
            prop_assert!(hi - lo <= 2.0 * eps + 1e-15);
        }
    }

    #[test]
    fn one_sided_tail_monotone_in_eps(
        n in 1u64..80,
        e1 in 0.0f64..=1.0,
        e2 in 0.0f64..=1.0,
    ) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let t_lo: f64 = sbt_tail(n, lo).unwrap();
        let t_hi: f64 = sbt_tail(n, hi).unwrap();
        prop_assert!((0.0..=1.0).contains(&t_lo));
        prop_assert!((0.0..=1.0).contains(&t_hi));
        prop_assert!(t_lo >= t_hi, "tail must not increase with the level");
    }

    #[test]
    fn tail_is_total_hitting_mass(n in 1u64..60, eps in 0.001f64..0.999) {
        let tail: f64 = sbt_tail(n, eps).unwrap();
        let mass: f64 = (0..=support_max(n, eps))
            .map(|j| {
                let p: f64 = tau_pmf_at_eps(n, eps, j).unwrap();
                assert!(p >= 0.0, "pmf atom must be nonnegative");
                p
            })
            .sum();
        prop_assert!((tail - mass).abs() <= 1e-11);
    }

    #[test]
    fn swapping_samples_exchanges_one_sided_statistics(
        xs in finite_values(40),
        ys in finite_values(40),
    ) {
        let x = Sample64::new(xs).unwrap();
        let y = Sample64::new(ys).unwrap();
        let xy = ks_two_sample(&x, &y);
        let yx = ks_two_sample(&y, &x);
        prop_assert!(xy.d_plus.to_bits() == yx.d_minus.to_bits());
        prop_assert!(xy.d_minus.to_bits() == yx.d_plus.to_bits());
        prop_assert!(xy.d.to_bits() == yx.d.to_bits());
    }

    #[test]
    fn two_sample_pvalue_lives_on_the_lattice(
        xs in finite_values(20),
        ys in finite_values(20),
    ) {
        let x = Sample64::new(xs).unwrap();
        let y = Sample64::new(ys).unwrap();
        let nm = (x.n() * y.n()) as f64;
        let d_plus = ks_two_sample(&x, &y).d_plus;
        prop_assert!((d_plus - (d_plus * nm).round() / nm).abs() <= 1e-9);

        let test = two_sample_exact_pvalue(x.n() as u64, y.n() as u64, d_plus).unwrap();
        prop_assert!((0.0..=1.0).contains(&test.tail.p));

        // A level wedged strictly between lattice points must be refused.
        let probe = (d_plus - 0.37 / nm).max(0.37 / nm);
        let refused = matches!(
            two_sample_exact_pvalue(x.n() as u64, y.n() as u64, probe),
            Err(KsError::OffLattice { .. })
        );
        prop_assert!(refused, "off-lattice level {probe} must be refused");
    }

    #[test]
    fn equal_sizes_route_to_the_closed_form((n, r) in size_and_rank()) {
        let level = r as f64 / n as f64;
        let test = two_sample_exact_pvalue(n, n, level).unwrap();
        prop_assert!(test.engine == TwoSampleEngine::ExactFeller);
        prop_assert!(test.tail.p == feller_tail(n, r).unwrap());
    }

    #[test]
    fn limit_tail_bounded_and_monotone(l1 in 0.05f64..5.0, l2 in 0.05f64..5.0) {
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let t_lo: f64 = kolmogorov_series_tail(lo, 1e-12).unwrap().p;
        let t_hi: f64 = kolmogorov_series_tail(hi, 1e-12).unwrap().p;
        prop_assert!((0.0..=1.0).contains(&t_lo));
        prop_assert!((0.0..=1.0).contains(&t_hi));
        prop_assert!(t_lo >= t_hi - 1e-12);
    }

    #[test]
    fn exponential_bound_dominates_limit_tail(lambda in 0.05f64..5.0) {
        let bound: f64 = dkwm_bound_lambda(lambda, Sided::Two).unwrap();
        let tail: f64 = kolmogorov_series_tail(lambda, 1e-12).unwrap().p;
        prop_assert!(bound >= tail - 1e-15);
    }

    #[test]
    fn hitting_density_nonnegative_and_finite(
        lambda in 0.05f64..3.0,
        s in 1e-6f64..0.999_999,
    ) {
        let f: f64 = bb_hitting_density(lambda, s).unwrap();
        prop_assert!(f.is_finite() && f >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_covariance_grids_stay_psd(
        mu in -5.0f64..5.0,
        var in 0.1f64..10.0,
        g in 5usize..40,
    ) {
        let fam = NormalFamily;
        let theta = [mu, var];
        let grid = quantile_grid(&fam, &theta, g).unwrap();
        let cg = build_covariance_grid(&fam, &theta, &grid).unwrap();
        prop_assert!(cg.jitter_applied <= 1e-8);
    }

    #[test]
    fn monte_carlo_streams_are_seed_deterministic(
        n in 1u64..30,
        eps in 0.05f64..0.5,
        seed in any::<u64>(),
    ) {
        let a = mc_one_sample_tail(n, eps, Side::Two, 1000, seed).unwrap();
        let b = mc_one_sample_tail(n, eps, Side::Two, 1000, seed).unwrap();
        prop_assert!(a.estimate.to_bits() == b.estimate.to_bits());
        prop_assert!(a.se.to_bits() == b.se.to_bits());
    }
}
