// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Log-gamma helpers and compensated summation used by the tail formulas.

/// Natural log of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// ln(k!)
pub fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// ln C(n, k). Requires k <= n.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// C(n, k) as an exact big integer. Requires k <= n; the running product
/// stays integral because each prefix is itself a binomial coefficient.
pub fn big_binomial(n: u64, k: u64) -> num_bigint::BigInt {
    use num_traits::One;
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = num_bigint::BigInt::one();
    for i in 0..k {
        acc = acc * num_bigint::BigInt::from(n - i) / num_bigint::BigInt::from(i + 1);
    }
    acc
}

/// C(n, k) when it does not exceed `cap`, else None. The running prefix is
/// nondecreasing, so the first overflow of the cap is final.
pub fn binomial_capped(n: u64, k: u64, cap: u64) -> Option<u64> {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // Each prefix C(n-k+i, i) is integral, so the division is exact.
        acc = acc * (n - k + i) as u128 / i as u128;
        if acc > cap as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Kahan-compensated accumulator. Summation order is part of the numeric
/// contract for the tail identities, so callers add terms in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
