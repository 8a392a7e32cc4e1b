// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Empirical distribution functions, supremum statistics, and distribution-free
//! confidence bands.
//!
//! The ECDF convention is right-continuous: `F_n(t) = #{x_i <= t} / n`. All
//! supremum statistics are computed from order statistics, which attain the
//! supremum exactly at jump points, so no grid search is involved.

use crate::error::KsError;
use crate::real::Real;
use crate::Result;

/// A validated, sorted sample. Construction rejects NaN and infinities and
/// records whether tied observations are present.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<F: Real> {
    values: Vec<F>,
    has_ties: bool,
}

impl<F: Real> Sample<F> {
    pub fn new(mut values: Vec<F>) -> Result<Self> {
        if values.is_empty() {
            return Err(KsError::EmptySample);
        }
        for &v in &values {
            if !v.is_finite() {
                return Err(KsError::NonFiniteValue(v.as_f64()));
            }
        }
        values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values are ordered"));
        let has_ties = values.windows(2).any(|w| w[0] == w[1]);
        Ok(Self { values, has_ties })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Sorted ascending.
    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    /// `F_n(t)`, the fraction of observations at or below `t`.
    pub fn ecdf(&self, t: F) -> Result<F> {
        if t.is_nan() {
            return Err(KsError::InvalidQueryPoint);
        }
        let count = self.values.partition_point(|x| *x <= t);
        Ok(F::of_count(count as u64) / F::of_count(self.values.len() as u64))
    }
}

/// Which supremum discrepancy a tail query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// sup (reference - ECDF), or for two samples sup (G_m - F_n).
    Minus,
    /// sup (ECDF - reference), or for two samples sup (F_n - G_m).
    Plus,
    /// sup of the absolute difference.
    Two,
}

/// One-sided and two-sided supremum discrepancies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsStatistics<F: Real> {
    /// sup_t (F_n(t) - G(t)), floored at zero.
    pub d_plus: F,
    /// sup_t (G(t) - F_n(t)), floored at zero.
    pub d_minus: F,
    /// max(d_plus, d_minus).
    pub d: F,
}

impl<F: Real> KsStatistics<F> {
    fn from_sides(d_plus: F, d_minus: F) -> Self {
        let zero = F::zero();
        let d_plus = d_plus.max(zero);
        let d_minus = d_minus.max(zero);
        Self { d_plus, d_minus, d: d_plus.max(d_minus) }
    }

    pub fn by_side(&self, side: Side) -> F {
        match side {
            Side::Minus => self.d_minus,
            Side::Plus => self.d_plus,
            Side::Two => self.d,
        }
    }
}

/// Supremum discrepancies between the sample ECDF and a reference CDF.
///
/// `cdf` must be a distribution function; each evaluation at a sample point is
/// checked to lie in `[0, 1]`. With the sorted values `x_(1) <= ... <= x_(n)`,
///
/// ```text
/// d_plus  = max_i ( i/n - G(x_(i)) )
/// d_minus = max_i ( G(x_(i)) - (i-1)/n )
/// ```
///
/// which equal the suprema over all t because the ECDF only moves at jumps.
pub fn ks_one_sample<F: Real, C>(sample: &Sample<F>, cdf: C) -> Result<KsStatistics<F>>
where
    C: Fn(F) -> F,
{
    let n = F::of_count(sample.n() as u64);
    let mut d_plus = F::neg_infinity();
    let mut d_minus = F::neg_infinity();
    for (i, &x) in sample.values().iter().enumerate() {
        let g = cdf(x);
        if !(g >= F::zero() && g <= F::one()) {
            return Err(KsError::InvalidCdf { value: g.as_f64(), at: x.as_f64() });
        }
        let hi = F::of_count(i as u64 + 1) / n;
        let lo = F::of_count(i as u64) / n;
        d_plus = d_plus.max(hi - g);
        d_minus = d_minus.max(g - lo);
    }
    Ok(KsStatistics::from_sides(d_plus, d_minus))
}

/// Supremum discrepancies between two sample ECDFs, `d_plus` being
/// `sup_t (F_n(t) - G_m(t))` for `x`'s ECDF `F_n` and `y`'s ECDF `G_m`.
///
/// The walk visits each distinct pooled value once, consuming all tied copies
/// from both samples before evaluating, which is exactly the right-continuous
/// difference at that point.
pub fn ks_two_sample<F: Real>(x: &Sample<F>, y: &Sample<F>) -> KsStatistics<F> {
    let (xv, yv) = (x.values(), y.values());
    let (n, m) = (F::of_count(xv.len() as u64), F::of_count(yv.len() as u64));
    let (mut i, mut j) = (0usize, 0usize);
    let mut d_plus = F::zero();
    let mut d_minus = F::zero();
    while i < xv.len() || j < yv.len() {
        let v = match (xv.get(i), yv.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < xv.len() && xv[i] == v {
            i += 1;
        }
        while j < yv.len() && yv[j] == v {
            j += 1;
        }
        let diff = F::of_count(i as u64) / n - F::of_count(j as u64) / m;
        d_plus = d_plus.max(diff);
        d_minus = d_minus.max(-diff);
    }
    KsStatistics::from_sides(d_plus, d_minus)
}

/// A right-continuous step function given by its value before the first knot
/// and the value at and after each knot.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<F: Real> {
    pub initial: F,
    /// Strictly increasing knot positions paired with the value from that
    /// knot (inclusive) to the next.
    pub knots: Vec<(F, F)>,
}

impl<F: Real> StepFunction<F> {
    pub fn value_at(&self, t: F) -> F {
        let idx = self.knots.partition_point(|&(k, _)| k <= t);
        if idx == 0 {
            self.initial
        } else {
            self.knots[idx - 1].1
        }
    }
}

/// Distribution-free confidence band for the true CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceBand<F: Real> {
    pub level: F,
    /// Half-width: `sqrt(ln(2 / (1 - level)) / (2n))`.
    pub epsilon: F,
    pub lower: StepFunction<F>,
    pub upper: StepFunction<F>,
}

/// Two-sided band `[F_n - eps, F_n + eps]` clamped to `[0, 1]`, with the
/// half-width chosen so the exponential tail bound `2 exp(-2 n eps^2)`
/// equals `1 - level`. Coverage is therefore at least `level` for any
/// continuous true CDF.
pub fn dkwm_band<F: Real>(sample: &Sample<F>, level: F) -> Result<ConfidenceBand<F>> {
    if !(level > F::zero() && level < F::one()) {
        return Err(KsError::InvalidLevel(level.as_f64()));
    }
    let n = F::of_count(sample.n() as u64);
    let two = F::of_f64(2.0);
    let epsilon = ((two / (F::one() - level)).ln() / (two * n)).sqrt();

    let nn = sample.n() as u64;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let values = sample.values();
    let mut i = 0usize;
    while i < values.len() {
        let v = values[i];
        let mut j = i;
        while j < values.len() && values[j] == v {
            j += 1;
        }
        let ecdf = F::of_count(j as u64) / F::of_count(nn);
        lower.push((v, (ecdf - epsilon).max(F::zero())));
        upper.push((v, (ecdf + epsilon).min(F::one())));
        i = j;
    }
    Ok(ConfidenceBand {
        level,
        epsilon,
        lower: StepFunction { initial: F::zero(), knots: lower },
        upper: StepFunction { initial: epsilon.min(F::one()), knots: upper },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(values: &[f64]) -> Sample<f64> {
        Sample::new(values.to_vec()).unwrap()
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(Sample::<f64>::new(vec![]), Err(KsError::EmptySample)));
        assert!(matches!(
            Sample::new(vec![0.1, f64::NAN]),
            Err(KsError::NonFiniteValue(_))
        ));
        assert!(matches!(
            Sample::new(vec![0.1, f64::INFINITY]),
            Err(KsError::NonFiniteValue(_))
        ));
    }

    #[test]
    fn sorts_and_flags_ties() {
        let sm = s(&[0.3, 0.1, 0.3]);
        assert_eq!(sm.values(), &[0.1, 0.3, 0.3]);
        assert!(sm.has_ties());
        assert!(!s(&[0.3, 0.1]).has_ties());
    }

    #[test]
    fn ecdf_step_values() {
        let sm = s(&[0.25, 0.75]);
        assert_eq!(sm.ecdf(0.1).unwrap(), 0.0);
        assert_eq!(sm.ecdf(0.25).unwrap(), 0.5);
        assert_eq!(sm.ecdf(0.5).unwrap(), 0.5);
        assert_eq!(sm.ecdf(0.75).unwrap(), 1.0);
        assert_eq!(sm.ecdf(2.0).unwrap(), 1.0);
        assert!(sm.ecdf(f64::NAN).is_err());
    }

    #[test]
    fn ecdf_with_ties_jumps_by_multiplicity() {
        let sm = s(&[0.5, 0.5, 0.9]);
        assert_eq!(sm.ecdf(0.4999).unwrap(), 0.0);
        assert!((sm.ecdf(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn one_sample_statistics_two_point_case() {
        // Uniform reference, x = {0.25, 0.75}:
        // d_plus peaks just at 0.25 (1/2 - 1/4), d_minus just below 0.75 (3/4 - 1/2).
        let stats = ks_one_sample(&s(&[0.25, 0.75]), |t: f64| t.clamp(0.0, 1.0)).unwrap();
        assert!((stats.d_plus - 0.25).abs() < 1e-15);
        assert!((stats.d_minus - 0.25).abs() < 1e-15);
        assert!((stats.d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn one_sample_statistics_match_dense_grid_oracle() {
        // Independent supremum: dense mesh plus points just below each jump.
        let values = [0.11, 0.32, 0.33, 0.64, 0.91];
        let sm = s(&values);
        let cdf = |t: f64| t.clamp(0.0, 1.0);
        let stats = ks_one_sample(&sm, cdf).unwrap();

        let mut grid: Vec<f64> = (0..=1_000_000).map(|i| i as f64 * 1e-6).collect();
        for v in values {
            grid.push(v - 1e-12);
            grid.push(v);
        }
        let mut d_plus: f64 = 0.0;
        let mut d_minus: f64 = 0.0;
        for t in grid {
            let e = sm.ecdf(t).unwrap();
            d_plus = d_plus.max(e - cdf(t));
            d_minus = d_minus.max(cdf(t) - e);
        }
        assert!((stats.d_plus - d_plus).abs() < 1e-9);
        assert!((stats.d_minus - d_minus).abs() < 1e-9);
    }

    #[test]
    fn one_sample_rejects_bad_cdf() {
        let bad = ks_one_sample(&s(&[0.5]), |_t: f64| 1.5);
        assert!(matches!(bad, Err(KsError::InvalidCdf { .. })));
    }

    #[test]
    fn two_sample_statistics_swap_antisymmetry() {
        let x = s(&[0.1, 0.4, 0.8]);
        let y = s(&[0.2, 0.3, 0.5, 0.9]);
        let xy = ks_two_sample(&x, &y);
        let yx = ks_two_sample(&y, &x);
        assert_eq!(xy.d_plus, yx.d_minus);
        assert_eq!(xy.d_minus, yx.d_plus);
        assert_eq!(xy.d, yx.d);
    }

    #[test]
    fn two_sample_identical_samples_give_zero() {
        let x = s(&[0.1, 0.2, 0.3]);
        let stats = ks_two_sample(&x, &x.clone());
        assert_eq!(stats.d, 0.0);
    }

    #[test]
    fn two_sample_disjoint_samples_give_one() {
        let x = s(&[1.0, 2.0]);
        let y = s(&[3.0, 4.0, 5.0]);
        let stats = ks_two_sample(&x, &y);
        assert_eq!(stats.d_plus, 1.0);
        assert_eq!(stats.d, 1.0);
        assert_eq!(stats.d_minus, 0.0);
    }

    #[test]
    fn two_sample_handles_cross_ties() {
        // Shared value 0.5 must advance both counters together.
        let x = s(&[0.5]);
        let y = s(&[0.5]);
        let stats = ks_two_sample(&x, &y);
        assert_eq!(stats.d, 0.0);
    }

    #[test]
    fn band_half_width_formula() {
        // 1 - level = 2/e  =>  eps = sqrt(ln(e)/ (2*2)) = 1/2 at n = 2.
        let level = 1.0 - 2.0 / std::f64::consts::E;
        let band = dkwm_band(&s(&[0.2, 0.8]), level).unwrap();
        assert!((band.epsilon - 0.5).abs() < 1e-15);
    }

    #[test]
    fn band_clamps_and_brackets_ecdf() {
        let sm = s(&[0.1, 0.5, 0.9, 0.9]);
        let band = dkwm_band(&sm, 0.95).unwrap();
        for &(t, lo) in &band.lower.knots {
            let e = sm.ecdf(t).unwrap();
            let up = band.upper.value_at(t);
            assert!((0.0..=1.0).contains(&lo));
            assert!((0.0..=1.0).contains(&up));
            assert!(lo <= e && e <= up);
        }
        assert!(band.lower.value_at(f64::NEG_INFINITY) == 0.0);
        assert!(band.upper.value_at(2.0) == 1.0);
    }

    #[test]
    fn band_rejects_bad_level() {
        assert!(dkwm_band(&s(&[0.5]), 1.0).is_err());
        assert!(dkwm_band(&s(&[0.5]), 0.0).is_err());
    }

    #[test]
    fn f32_statistics_track_f64() {
        let data64 = [0.11f64, 0.52, 0.37, 0.93, 0.74];
        let data32: Vec<f32> = data64.iter().map(|&v| v as f32).collect();
        let s64 = ks_one_sample(&Sample::new(data64.to_vec()).unwrap(), |t: f64| {
            t.clamp(0.0, 1.0)
        })
        .unwrap();
        let s32 = ks_one_sample(&Sample::new(data32).unwrap(), |t: f32| t.clamp(0.0, 1.0))
            .unwrap();
        assert!((s64.d - s32.d as f64).abs() < 1e-6);
    }
}
