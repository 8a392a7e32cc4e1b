// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Limiting distributions and finite-sample exponential bounds: the
//! alternating series for the two-sided supremum, its inverse for critical
//! values, the exponential concentration bound for ECDF deviations, and the
//! first-hitting density of a Brownian bridge at a negative level.

use crate::error::KsError;
use crate::real::Real;
use crate::special::KahanSum;
use crate::Result;

/// How a tail probability was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Asymptotic,
    Bound,
    MonteCarlo,
    Enumeration,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Exact => "exact",
            Method::Asymptotic => "asymptotic",
            Method::Bound => "bound",
            Method::MonteCarlo => "monte-carlo",
            Method::Enumeration => "enumeration",
        };
        f.write_str(s)
    }
}

/// A tail probability together with how it was computed and how precise it is.
/// `err` is a truncation bound for series, a standard error for Monte Carlo,
/// and zero for exact routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailResult<F: Real> {
    pub p: F,
    pub method: Method,
    pub err: F,
    pub terms_used: u32,
}

/// Tail of the limit law of `sqrt(n) * D_n` (equivalently
/// `sqrt(nm/(n+m)) * D_{n,m}`):
///
/// ```text
/// P(sup |bridge| > lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
/// ```
///
/// The alternating series has strictly decreasing terms, so truncating when
/// the next term drops below `tol` leaves an error no larger than that term.
pub fn kolmogorov_series_tail<F: Real>(lambda: F, tol: F) -> Result<TailResult<F>> {
    let lam = lambda.as_f64();
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(KsError::SeriesDomain(lam));
    }
    let tol = tol.as_f64();
    if !(tol > 0.0) {
        return Err(KsError::InvalidTolerance(tol));
    }
    let mut sum = KahanSum::new();
    let mut terms = 0u32;
    let mut sign = 1.0f64;
    let mut err;
    let mut k = 1u64;
    loop {
        let term = 2.0 * (-2.0 * (k * k) as f64 * lam * lam).exp();
        sum.add(sign * term);
        terms += 1;
        sign = -sign;
        k += 1;
        err = 2.0 * (-2.0 * (k * k) as f64 * lam * lam).exp();
        if err < tol {
            break;
        }
    }
    Ok(TailResult {
        p: F::of_f64(sum.value().clamp(0.0, 1.0)),
        method: Method::Asymptotic,
        err: F::of_f64(err),
        terms_used: terms,
    })
}

/// Bisection bracket for [`kolmogorov_critical`]. Covers every target tail
/// in roughly (1e-87, 1 - 4e-6); callers outside it get a bracket error
/// rather than an extrapolated value.
pub const CRITICAL_BRACKET: (f64, f64) = (1e-3, 10.0);

/// Inverse of [`kolmogorov_series_tail`]: the level whose tail probability is
/// `alpha`, to within `tol` in probability units.
pub fn kolmogorov_critical<F: Real>(alpha: F, tol: F) -> Result<F> {
    let a = alpha.as_f64();
    if !(a > 0.0 && a < 1.0) {
        return Err(KsError::InvalidLevel(a));
    }
    let tol_f = tol.as_f64();
    if !(tol_f > 0.0) {
        return Err(KsError::InvalidTolerance(tol_f));
    }
    let (mut lo, mut hi) = CRITICAL_BRACKET;
    let inner_tol = (tol_f / 10.0).min(1e-15);
    let tail = |lam: f64| -> Result<f64> {
        Ok(kolmogorov_series_tail(lam, inner_tol)?.p)
    };
    // The tail is strictly decreasing in lambda.
    if tail(lo)? < a || tail(hi)? > a {
        return Err(KsError::BracketExhausted { alpha: a, min: lo, max: hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tail(mid)? > a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    if (tail(mid)? - a).abs() > tol_f {
        return Err(KsError::BracketExhausted { alpha: a, min: lo, max: hi });
    }
    Ok(F::of_f64(mid))
}

/// Asymptotic p-value for a two-sided two-sample discrepancy `observed_d`,
/// evaluated at `lambda = sqrt(nm/(n+m)) * observed_d`.
pub fn two_sample_asymptotic_pvalue<F: Real>(n: u64, m: u64, observed_d: F) -> Result<TailResult<F>> {
    if n == 0 || m == 0 {
        return Err(KsError::ZeroSampleSize);
    }
    let d = observed_d.as_f64();
    if d.is_nan() || !(0.0..=1.0).contains(&d) {
        return Err(KsError::InvalidStatistic(d));
    }
    if d == 0.0 {
        return Ok(TailResult {
            p: F::one(),
            method: Method::Asymptotic,
            err: F::zero(),
            terms_used: 1,
        });
    }
    let scale = ((n as f64) * (m as f64) / (n as f64 + m as f64)).sqrt();
    kolmogorov_series_tail(F::of_f64(scale * d), F::of_f64(1e-12))
}

/// One- or two-sided variant of an exponential deviation bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sided {
    One,
    Two,
}

/// Exponential upper bound on ECDF deviation probabilities:
/// `P(D_n^- > eps) <= exp(-2 n eps^2)` one-sided, and twice that for the
/// two-sided statistic, both clamped to 1.
pub fn dkwm_bound<F: Real>(n: u64, eps: F, sided: Sided) -> Result<F> {
    if n == 0 {
        return Err(KsError::ZeroSampleSize);
    }
    let e = eps.as_f64();
    if e.is_nan() || e < 0.0 {
        return Err(KsError::InvalidEpsilon(e));
    }
    dkwm_bound_lambda(F::of_f64((n as f64).sqrt() * e), sided)
}

/// The same bound in normalized units `lambda = sqrt(n) * eps`:
/// `min(1, c * exp(-2 lambda^2))` with c = 1 or 2.
pub fn dkwm_bound_lambda<F: Real>(lambda: F, sided: Sided) -> Result<F> {
    let lam = lambda.as_f64();
    if lam.is_nan() || lam < 0.0 {
        return Err(KsError::InvalidLambda { lambda: lam, max: f64::INFINITY });
    }
    let factor = match sided {
        Sided::One => 1.0,
        Sided::Two => 2.0,
    };
    Ok(F::of_f64((factor * (-2.0 * lam * lam).exp()).min(1.0)))
}

/// Density of the first time a standard Brownian bridge hits the level
/// `-lambda`:
///
/// ```text
/// f_lambda(s) = lambda / sqrt(2 pi) * s^(-3/2) * (1 - s)^(-1/2) * exp(-lambda^2 / (2 s (1 - s)))
/// ```
///
/// for s in (0,1). This is the Brownian first-passage density at `s` tilted
/// by the bridge's return condition; its total mass is exp(-2 lambda^2), the
/// probability that the bridge ever reaches the level, and that identity
/// pins the (1 - s) exponent. Evaluated in log space so the `s^(-3/2)` pole
/// near 0 cannot overflow before the exponential kills it.
pub fn bb_hitting_density<F: Real>(lambda: F, s: F) -> Result<F> {
    let lam = lambda.as_f64();
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(KsError::SeriesDomain(lam));
    }
    let sv = s.as_f64();
    if !(sv > 0.0 && sv < 1.0) {
        return Err(KsError::OutsideUnitInterval(sv));
    }
    let ln = lam.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() - 1.5 * sv.ln()
        - 0.5 * (1.0 - sv).ln()
        - lam * lam / (2.0 * sv * (1.0 - sv));
    Ok(F::of_f64(ln.exp()))
}
