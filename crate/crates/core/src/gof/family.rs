// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Parametric families for goodness-of-fit testing with estimated
//! parameters.
//!
//! A family supplies its CDF, the gradient of the CDF in the parameters, the
//! influence function psi of its estimator (the kernel of the asymptotically
//! linear expansion `sqrt(n)(theta_hat - theta) = n^{-1/2} sum psi(X_i) + o_P(1)`),
//! a sampler, and a fitter. Closed forms for `h(t) = int_{-inf}^t psi dF` and
//! `Sigma = E[psi psi^T]` are optional; quadrature fills the gap.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::KsError;
use crate::Result;

/// A distribution family indexed by a real parameter vector, together with
/// the estimator pieces needed for the estimated-parameter limit process.
///
/// Implementations must keep `E[influence(theta, X)] = 0` under the family's
/// own law at `theta`; the covariance construction silently produces the
/// wrong process otherwise.
pub trait ParametricFamily: Send + Sync {
    fn name(&self) -> &str;

    /// Length of the parameter vector.
    fn dim(&self) -> usize;

    fn check_theta(&self, theta: &[f64]) -> Result<()>;

    fn cdf(&self, theta: &[f64], t: f64) -> f64;

    fn pdf(&self, theta: &[f64], t: f64) -> f64;

    /// Inverse CDF, defined for u in (0, 1).
    fn quantile(&self, theta: &[f64], u: f64) -> f64;

    /// Gradient of the CDF in theta at fixed t.
    fn dcdf_dtheta(&self, theta: &[f64], t: f64) -> Vec<f64>;

    /// Influence function of the estimator at theta.
    fn influence(&self, theta: &[f64], x: f64) -> Vec<f64>;

    /// Append n draws from the family at theta.
    fn sample_into(&self, theta: &[f64], rng: &mut dyn RngCore, n: usize, out: &mut Vec<f64>);

    /// Maximum-likelihood fit. Errors on degenerate input rather than
    /// returning a boundary estimate.
    fn fit_mle(&self, values: &[f64]) -> Result<Vec<f64>>;

    /// Closed form for `h(t) = int_{-inf}^t psi dF` when available.
    fn h_closed_form(&self, _theta: &[f64], _t: f64) -> Option<Vec<f64>> {
        None
    }

    /// Closed form for `Sigma = E[psi psi^T]` when available.
    fn sigma_closed_form(&self, _theta: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    /// Support endpoints; infinite ends are truncated at extreme quantiles
    /// by the quadrature fallbacks.
    fn support(&self, _theta: &[f64]) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

fn std_dev(theta: &[f64]) -> f64 {
    theta[1].sqrt()
}

/// Normal family, `theta = (mu, sigma^2)`, MLE `(mean, biased variance)`.
///
/// ```text
/// psi(x)   = (x - mu, (x - mu)^2 - sigma^2)
/// h(t)     = (-sigma phi(z), -sigma^2 z phi(z)),  z = (t - mu)/sigma
/// dF/dmu      = -phi(z)/sigma
/// dF/dsigma^2 = -z phi(z) / (2 sigma^2)
/// Sigma    = diag(sigma^2, 2 sigma^4)
/// ```
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalFamily;

impl NormalFamily {
    fn dist(theta: &[f64]) -> Normal {
        Normal::new(theta[0], std_dev(theta)).expect("validated parameters")
    }
}

impl ParametricFamily for NormalFamily {
    fn name(&self) -> &str {
        "normal"
    }

    fn dim(&self) -> usize {
        2
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != 2 {
            return Err(KsError::InvalidTheta {
                family: "normal",
                reason: format!("expected (mean, variance), got {} values", theta.len()),
            });
        }
        if !theta[0].is_finite() || !theta[1].is_finite() || theta[1] <= 0.0 {
            return Err(KsError::InvalidTheta {
                family: "normal",
                reason: format!("mean {} variance {}", theta[0], theta[1]),
            });
        }
        Ok(())
    }

    fn cdf(&self, theta: &[f64], t: f64) -> f64 {
        Self::dist(theta).cdf(t)
    }

    fn pdf(&self, theta: &[f64], t: f64) -> f64 {
        Self::dist(theta).pdf(t)
    }

    fn quantile(&self, theta: &[f64], u: f64) -> f64 {
        let dist = Self::dist(theta);
        // One Newton step tightens the library's inverse from ~1e-9 to
        // machine precision; skipped in the far tails where pdf underflows.
        let mut q = dist.inverse_cdf(u);
        let density = dist.pdf(q);
        if density > 0.0 && density.is_finite() {
            let step = (dist.cdf(q) - u) / density;
            if step.is_finite() {
                q -= step;
            }
        }
        q
    }

    fn dcdf_dtheta(&self, theta: &[f64], t: f64) -> Vec<f64> {
        let sigma = std_dev(theta);
        let z = (t - theta[0]) / sigma;
        let phi = standard_normal_pdf(z);
        vec![-phi / sigma, -z * phi / (2.0 * theta[1])]
    }

    fn influence(&self, theta: &[f64], x: f64) -> Vec<f64> {
        let c = x - theta[0];
        vec![c, c * c - theta[1]]
    }

    fn sample_into(&self, theta: &[f64], rng: &mut dyn RngCore, n: usize, out: &mut Vec<f64>) {
        let sigma = std_dev(theta);
        out.reserve(n);
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            out.push(theta[0] + sigma * z);
        }
    }

    fn fit_mle(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.is_empty() {
            return Err(KsError::EmptySample);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        if !(var > 0.0) {
            return Err(KsError::MleFailure(
                "sample variance is zero; the normal fit is degenerate".into(),
            ));
        }
        Ok(vec![mean, var])
    }

    fn h_closed_form(&self, theta: &[f64], t: f64) -> Option<Vec<f64>> {
        let sigma = std_dev(theta);
        let z = (t - theta[0]) / sigma;
        let phi = standard_normal_pdf(z);
        Some(vec![-sigma * phi, -theta[1] * z * phi])
    }

    fn sigma_closed_form(&self, theta: &[f64]) -> Option<DMatrix<f64>> {
        let v = theta[1];
        Some(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![v, 2.0 * v * v])))
    }
}

fn standard_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Exponential family, `theta = (rate,)`, MLE `1/mean`.
///
/// ```text
/// psi(x)  = rate - rate^2 x
/// h(t)    = rate^2 t exp(-rate t)
/// dF/drate = t exp(-rate t)
/// Sigma   = rate^2
/// ```
#[derive(Debug, Clone, Copy, Default)]
pub struct ExponentialFamily;

impl ParametricFamily for ExponentialFamily {
    fn name(&self) -> &str {
        "exponential"
    }

    fn dim(&self) -> usize {
        1
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != 1 {
            return Err(KsError::InvalidTheta {
                family: "exponential",
                reason: format!("expected (rate,), got {} values", theta.len()),
            });
        }
        if !theta[0].is_finite() || theta[0] <= 0.0 {
            return Err(KsError::InvalidTheta {
                family: "exponential",
                reason: format!("rate {}", theta[0]),
            });
        }
        Ok(())
    }

    fn cdf(&self, theta: &[f64], t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -(-theta[0] * t).exp_m1()
        }
    }

    fn pdf(&self, theta: &[f64], t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            theta[0] * (-theta[0] * t).exp()
        }
    }

    fn quantile(&self, theta: &[f64], u: f64) -> f64 {
        -(-u).ln_1p() / theta[0]
    }

    fn dcdf_dtheta(&self, theta: &[f64], t: f64) -> Vec<f64> {
        if t <= 0.0 {
            vec![0.0]
        } else {
            vec![t * (-theta[0] * t).exp()]
        }
    }

    fn influence(&self, theta: &[f64], x: f64) -> Vec<f64> {
        let r = theta[0];
        vec![r - r * r * x]
    }

    fn sample_into(&self, theta: &[f64], rng: &mut dyn RngCore, n: usize, out: &mut Vec<f64>) {
        out.reserve(n);
        for _ in 0..n {
            let u: f64 = rng.gen();
            out.push(-(-u).ln_1p() / theta[0]);
        }
    }

    fn fit_mle(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.is_empty() {
            return Err(KsError::EmptySample);
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(KsError::MleFailure(
                "negative observations are outside the exponential support".into(),
            ));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if !(mean > 0.0) {
            return Err(KsError::MleFailure(
                "sample mean is zero; the exponential fit is degenerate".into(),
            ));
        }
        Ok(vec![1.0 / mean])
    }

    fn h_closed_form(&self, theta: &[f64], t: f64) -> Option<Vec<f64>> {
        let r = theta[0];
        if t <= 0.0 {
            Some(vec![0.0])
        } else {
            Some(vec![r * r * t * (-r * t).exp()])
        }
    }

    fn sigma_closed_form(&self, theta: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_element(1, 1, theta[0] * theta[0]))
    }

    fn support(&self, _theta: &[f64]) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// Name-indexed lookup of families, preloaded with the builtins. User code
/// registers additional implementations under fresh names; there is no
/// serialized-code loading.
#[derive(Default)]
pub struct FamilyRegistry {
    families: BTreeMap<String, Arc<dyn ParametricFamily>>,
}

impl FamilyRegistry {
    pub fn with_builtins() -> Self {
        let mut reg = Self::default();
        reg.register(Arc::new(NormalFamily)).expect("fresh registry");
        reg.register(Arc::new(ExponentialFamily)).expect("fresh registry");
        reg
    }

    pub fn register(&mut self, family: Arc<dyn ParametricFamily>) -> Result<()> {
        let name = family.name().to_owned();
        if self.families.contains_key(&name) {
            return Err(KsError::InvalidArgument(format!(
                "family '{name}' is already registered"
            )));
        }
        self.families.insert(name, family);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn ParametricFamily>> {
        self.families.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&str> {
        self.families.keys().map(String::as_str).collect()
    }
}
