// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact finite-sample law of the one-sided one-sample statistic.
//!
//! For n iid uniform observations the event `{D_n^- > eps}` is the event that
//! the centered empirical process ever crosses the moving boundary, and the
//! crossing can only happen at the lattice times `eps + j/n`. The tail
//! probability is
//!
//! ```text
//! P(D_n^- > eps) = (1-eps)^n
//!     + eps * sum_{j=1}^{floor(n(1-eps))} C(n,j) (eps + j/n)^{j-1} (1 - eps - j/n)^{n-j}
//! ```
//!
//! and each summand (the `j = 0` term being `(1-eps)^n`) is the probability
//! that the first crossing happens exactly at `eps + j/n`. By symmetry of the
//! uniform order statistics the same function is the tail of `D_n^+`.
//!
//! Terms are evaluated in log space through `ln_gamma` and accumulated with
//! compensated summation in ascending `j`; both the tail and the probability
//! mass function share the same per-term routine, so the identity between
//! them holds to roundoff by construction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::KsError;
use crate::real::Real;
use crate::special::{big_binomial, ln_binomial, ln_factorial, KahanSum};
use crate::Result;

/// Additive nudge applied before flooring `n(1 - eps)` so boundary cases
/// where the product is an exact integer are not lost to representation
/// error. The term it may spuriously admit has a zero factor anyway.
pub const SUPPORT_FLOOR_NUDGE: f64 = 1e-12;

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_nan() || !(0.0..=1.0).contains(&eps) {
        return Err(KsError::InvalidEpsilon(eps));
    }
    Ok(())
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(KsError::ZeroSampleSize);
    }
    if n > i32::MAX as u64 {
        return Err(KsError::InvalidArgument(format!(
            "sample size {n} exceeds the supported range"
        )));
    }
    Ok(())
}

/// Largest crossing index: `floor(n(1 - eps))`, nudged.
pub fn support_max(n: u64, eps: f64) -> u64 {
    let raw = (n as f64) * (1.0 - eps) + SUPPORT_FLOOR_NUDGE;
    (raw.floor() as u64).min(n)
}

/// ln of `C(n,j) (eps + j/n)^(j-1) (1 - eps - j/n)^(n-j)` for `j >= 1`.
/// Returns -inf when the second base is zero (or negative from roundoff)
/// with a positive exponent; a zero exponent skips its factor entirely.
fn ln_term_body(n: u64, eps: f64, j: u64) -> f64 {
    debug_assert!(j >= 1 && j <= n);
    let nf = n as f64;
    let mut acc = ln_binomial(n, j);
    if j > 1 {
        acc += (j - 1) as f64 * (eps + j as f64 / nf).ln();
    }
    if n > j {
        let base = (n - j) as f64 / nf - eps;
        if base <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += (n - j) as f64 * base.ln();
    }
    acc
}

/// Crossing probability mass at index `j`, without validation.
fn atom_prob(n: u64, eps: f64, j: u64) -> f64 {
    if j == 0 {
        return (1.0 - eps).powi(n as i32);
    }
    if eps == 0.0 {
        return 0.0;
    }
    let lt = ln_term_body(n, eps, j);
    if lt == f64::NEG_INFINITY {
        0.0
    } else {
        eps * lt.exp()
    }
}

/// `P(D_n^- > eps)` for a sample of n iid draws from a continuous CDF; by
/// symmetry also `P(D_n^+ > eps)`. Exact finite-sample value.
pub fn sbt_tail<F: Real>(n: u64, eps: F) -> Result<F> {
    check_n(n)?;
    let e = eps.as_f64();
    check_eps(e)?;
    let jmax = support_max(n, e);
    let mut sum = KahanSum::new();
    for j in 1..=jmax {
        let lt = ln_term_body(n, e, j);
        if lt != f64::NEG_INFINITY {
            sum.add(lt.exp());
        }
    }
    let p = (1.0 - e).powi(n as i32) + e * sum.value();
    Ok(F::of_f64(p.clamp(0.0, 1.0)))
}

/// Exact-arithmetic evaluation of the same tail for rational `eps`.
/// Intended as a ground-truth cross-check for moderate n.
pub fn sbt_tail_exact(n: u64, eps: &BigRational) -> Result<BigRational> {
    check_n(n)?;
    if eps.is_negative() || eps > &BigRational::one() {
        return Err(KsError::InvalidEpsilon(eps.to_f64().unwrap_or(f64::NAN)));
    }
    let nr = BigRational::from_integer(BigInt::from(n));
    let one = BigRational::one();
    let jmax_exact = ((&one - eps) * &nr).floor().to_integer();
    let jmax = jmax_exact.to_u64().expect("floor of n(1-eps) fits u64").min(n);

    let mut sum = BigRational::zero();
    for j in 1..=jmax {
        let jr = BigRational::from_integer(BigInt::from(j));
        let base1 = eps + &jr / &nr;
        let base2 = &one - eps - &jr / &nr;
        let mut term = BigRational::from_integer(big_binomial(n, j));
        if j > 1 {
            term *= base1.pow((j - 1) as i32);
        }
        if n > j {
            term *= base2.pow((n - j) as i32);
        }
        sum += term;
    }
    Ok((&one - eps).pow(n as i32) + eps * sum)
}

/// First-crossing time law of the one-sided empirical discrepancy at level
/// `eps = lambda / sqrt(n)`: atoms at `eps + j/n` plus the mass of never
/// crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingTimeLaw<F: Real> {
    pub n: u64,
    pub lambda: F,
    pub epsilon: F,
    pub atoms: Vec<HittingAtom<F>>,
    pub prob_infinity: F,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingAtom<F: Real> {
    pub j: u64,
    /// `eps + j/n`.
    pub support_point: F,
    pub prob: F,
}

fn check_lambda(n: u64, lambda: f64) -> Result<f64> {
    let max = (n as f64).sqrt();
    if lambda.is_nan() || lambda < 0.0 || lambda > max {
        return Err(KsError::InvalidLambda { lambda, max });
    }
    Ok(lambda / max)
}

/// Probability that the first crossing happens at `eps + j/n`, with
/// `eps = lambda / sqrt(n)`.
pub fn tau_pmf<F: Real>(n: u64, lambda: F, j: u64) -> Result<F> {
    check_n(n)?;
    let eps = check_lambda(n, lambda.as_f64())?;
    tau_pmf_at_eps(n, F::of_f64(eps), j)
}

/// Same mass function parameterized by `eps` directly.
pub fn tau_pmf_at_eps<F: Real>(n: u64, eps: F, j: u64) -> Result<F> {
    check_n(n)?;
    let e = eps.as_f64();
    check_eps(e)?;
    let jmax = support_max(n, e);
    if j > jmax {
        return Err(KsError::OutOfSupport { j, max: jmax });
    }
    Ok(F::of_f64(atom_prob(n, e, j)))
}

/// The full hitting-time law at level `lambda` in `[0, sqrt(n)]`.
pub fn tau_law<F: Real>(n: u64, lambda: F) -> Result<HittingTimeLaw<F>> {
    check_n(n)?;
    let eps = check_lambda(n, lambda.as_f64())?;
    let jmax = support_max(n, eps);
    let mut atoms = Vec::with_capacity(jmax as usize + 1);
    let mut total = KahanSum::new();
    for j in 0..=jmax {
        let p = atom_prob(n, eps, j);
        total.add(p);
        atoms.push(HittingAtom {
            j,
            support_point: F::of_f64(eps + j as f64 / n as f64),
            prob: F::of_f64(p),
        });
    }
    let prob_infinity = (1.0 - total.value()).clamp(0.0, 1.0);
    Ok(HittingTimeLaw {
        n,
        lambda,
        epsilon: F::of_f64(eps),
        atoms,
        prob_infinity: F::of_f64(prob_infinity),
    })
}

/// Volume of the ordered slab `{0 <= u_1 <= ... <= u_j, u_i <= eps + (i-1)/n}`:
/// `eps (eps + j/n)^(j-1) / j!`, an Abel-type identity. The empty region at
/// `j = 0` has volume 1.
pub fn birnbaum_integral<F: Real>(eps: F, j: u64, n: u64) -> Result<F> {
    check_n(n)?;
    let e = eps.as_f64();
    if e.is_nan() || e < 0.0 {
        return Err(KsError::InvalidEpsilon(e));
    }
    if j == 0 {
        return Ok(F::one());
    }
    let ln = e.ln() + (j - 1) as f64 * (e + j as f64 / n as f64).ln() - ln_factorial(j);
    Ok(F::of_f64(ln.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn single_observation_tail_is_linear() {
        // n = 1: the only crossing opportunity is X_1 > eps.
        for eps in [0.0, 0.1, 0.37, 0.9, 1.0] {
            let p: f64 = sbt_tail(1, eps).unwrap();
            assert!((p - (1.0 - eps)).abs() < 1e-15, "eps={eps} p={p}");
        }
    }

    #[test]
    fn two_observations_at_half() {
        let p: f64 = sbt_tail(2, 0.5).unwrap();
        assert!((p - 0.25).abs() < 1e-12);
    }

    #[test]
    fn boundary_values_are_exact() {
        for n in [1u64, 2, 7, 100, 1000] {
            assert_eq!(sbt_tail::<f64>(n, 0.0).unwrap(), 1.0);
            assert_eq!(sbt_tail::<f64>(n, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn tail_is_monotone_in_eps() {
        for n in [3u64, 10, 37] {
            let mut last = 1.0f64;
            for i in 1..=99 {
                let p: f64 = sbt_tail(n, i as f64 / 100.0).unwrap();
                assert!(p <= last + 1e-15, "n={n} i={i}");
                last = p;
            }
        }
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(matches!(sbt_tail::<f64>(0, 0.5), Err(KsError::ZeroSampleSize)));
        assert!(matches!(sbt_tail::<f64>(5, -0.1), Err(KsError::InvalidEpsilon(_))));
        assert!(matches!(sbt_tail::<f64>(5, 1.1), Err(KsError::InvalidEpsilon(_))));
        assert!(matches!(sbt_tail::<f64>(5, f64::NAN), Err(KsError::InvalidEpsilon(_))));
    }

    #[test]
    fn exact_rational_matches_float_route() {
        // Rational eps = i/32 across moderate n. The float route goes
        // through exp/ln per term, so allow a few hundred ulps.
        for n in 1..=30u64 {
            for i in 1..32i64 {
                let eps = i as f64 / 32.0;
                let float: f64 = sbt_tail(n, eps).unwrap();
                let exact = sbt_tail_exact(n, &ratio(i, 32)).unwrap();
                let exact_f = exact.to_f64().unwrap();
                if exact_f == 0.0 {
                    assert_eq!(float, 0.0);
                } else {
                    let rel = ((float - exact_f) / exact_f).abs();
                    assert!(rel <= 5e-13, "n={n} eps={eps} rel={rel:e}");
                }
            }
        }
    }

    #[test]
    fn hitting_pmf_small_cases() {
        // n = 2, eps = 0.5 (lambda = sqrt(2)/2): hit at time 0.5 iff X_(1) > 0.5.
        let lambda = 0.5 * 2f64.sqrt();
        let p0: f64 = tau_pmf(2, lambda, 0).unwrap();
        assert!((p0 - 0.25).abs() < 1e-15);
        let p1: f64 = tau_pmf(2, lambda, 1).unwrap();
        assert_eq!(p1, 0.0);
        assert!(matches!(
            tau_pmf::<f64>(2, lambda, 2),
            Err(KsError::OutOfSupport { .. })
        ));
    }

    #[test]
    fn law_masses_sum_to_one() {
        for (n, eps) in [(1u64, 0.3), (2, 0.5), (10, 0.2), (25, 0.07), (40, 0.61)] {
            let lambda = eps * (n as f64).sqrt();
            let law: HittingTimeLaw<f64> = tau_law(n, lambda).unwrap();
            let total: f64 = law.atoms.iter().map(|a| a.prob).sum::<f64>() + law.prob_infinity;
            assert!((total - 1.0).abs() < 1e-12, "n={n} eps={eps} total={total}");
            let tail: f64 = sbt_tail(n, eps).unwrap();
            let hit: f64 = law.atoms.iter().map(|a| a.prob).sum();
            assert!((hit - tail).abs() < 1e-12);
        }
    }

    #[test]
    fn law_at_zero_level_hits_immediately() {
        let law: HittingTimeLaw<f64> = tau_law(10, 0.0).unwrap();
        assert_eq!(law.prob_infinity, 0.0);
        assert_eq!(law.atoms[0].prob, 1.0);
        assert!(law.atoms.iter().skip(1).all(|a| a.prob == 0.0));
    }

    #[test]
    fn law_single_observation() {
        let law: HittingTimeLaw<f64> = tau_law(1, 0.3).unwrap();
        assert!((law.prob_infinity - 0.3).abs() < 1e-15);
        assert_eq!(law.atoms.len(), 1);
        assert!((law.atoms[0].prob - 0.7).abs() < 1e-15);
        assert!((law.atoms[0].support_point - 0.3).abs() < 1e-15);
    }

    #[test]
    fn law_rejects_lambda_outside_range() {
        assert!(matches!(
            tau_law::<f64>(4, 2.1),
            Err(KsError::InvalidLambda { .. })
        ));
        assert!(matches!(
            tau_law::<f64>(4, -0.1),
            Err(KsError::InvalidLambda { .. })
        ));
    }

    #[test]
    fn slab_volume_agrees_with_closed_form() {
        // j = 1: eps * (eps + 1/n)^0 / 1! = eps.
        let v: f64 = birnbaum_integral(0.5, 1, 2).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        // j = 0 is the empty product.
        let v0: f64 = birnbaum_integral(0.5, 0, 2).unwrap();
        assert_eq!(v0, 1.0);
        // j = 2, eps = 0.2, n = 10: eps^2/2 + eps/n = 0.04.
        let v2: f64 = birnbaum_integral(0.2, 2, 10).unwrap();
        assert!((v2 - 0.04).abs() < 1e-15);
    }

    #[test]
    fn slab_volume_agrees_with_nested_quadrature() {
        // Outer-of-inner adaptive quadrature of the ordered 2-volume
        // {0 <= u1 <= u2, u1 <= eps, u2 <= eps + 1/n}.
        let (eps, n) = (0.2f64, 10u64);
        let cap2 = eps + 1.0 / n as f64;
        let inner = |u1: f64| crate::quad::integrate(|_| 1.0, u1, cap2, 1e-12).unwrap().value;
        let outer = crate::quad::integrate(inner, 0.0, eps, 1e-10).unwrap().value;
        let v: f64 = birnbaum_integral(eps, 2, n).unwrap();
        assert!((outer - v).abs() < 1e-8, "quad={outer} closed={v}");

        // And the 3-volume {u1 <= eps, u2 <= eps + 1/n, u3 <= eps + 2/n}.
        let cap3 = eps + 2.0 / n as f64;
        let inner2 = |u1: f64| {
            crate::quad::integrate(
                |u2| crate::quad::integrate(|_| 1.0, u2, cap3, 1e-12).unwrap().value,
                u1,
                cap2,
                1e-11,
            )
            .unwrap()
            .value
        };
        let outer3 = crate::quad::integrate(inner2, 0.0, eps, 1e-9).unwrap().value;
        let v3: f64 = birnbaum_integral(eps, 3, n).unwrap();
        assert!((outer3 - v3).abs() < 1e-7, "quad={outer3} closed={v3}");
    }

    #[test]
    fn support_floor_handles_exact_integer_products() {
        // 50 * (1 - 0.98) ... representation error must not drop the last index.
        assert_eq!(support_max(50, 0.02), 49);
        assert_eq!(support_max(50, 0.98), 1);
        assert_eq!(support_max(10, 0.2), 8);
        assert_eq!(support_max(3, 1.0), 0);
        assert_eq!(support_max(3, 0.0), 3);
    }
}
