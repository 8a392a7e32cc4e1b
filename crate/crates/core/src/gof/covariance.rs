// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Covariance of the limit process when parameters are estimated.
//!
//! With an asymptotically linear estimator, the normalized discrepancy
//! process converges to a mean-zero Gaussian process with
//!
//! ```text
//! Cov(Z(s), Z(t)) = F(s^t) - F(s)F(t)
//!                   - h(t)' dF(s) - h(s)' dF(t)
//!                   + dF(s)' Sigma dF(t)
//! ```
//!
//! where `h(t) = int_{-inf}^t psi dF`, `Sigma = E[psi psi']`, and `dF` is the
//! parameter gradient of the CDF. With a zero influence function this is the
//! Brownian-bridge kernel composed with F.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::family::ParametricFamily;
use crate::error::KsError;
use crate::quad::integrate;
use crate::Result;

/// Quadrature tolerance for the h and Sigma fallbacks.
const QUAD_TOL: f64 = 1e-10;

/// Tail mass beyond which an infinite support end is truncated when
/// integrating. The integrands carry the family density, so the discarded
/// contribution is of this order times the influence magnitude there.
const TAIL_MASS: f64 = 1e-16;

/// Eigenvalues above this (negative) floor count as roundoff; anything
/// below it means the family is misconfigured.
pub const PSD_TOLERANCE: f64 = -1e-8;

fn effective_bounds(fam: &dyn ParametricFamily, theta: &[f64]) -> (f64, f64) {
    let (lo, hi) = fam.support(theta);
    let lo = if lo.is_finite() { lo } else { fam.quantile(theta, TAIL_MASS) };
    let hi = if hi.is_finite() { hi } else { fam.quantile(theta, 1.0 - TAIL_MASS) };
    (lo, hi)
}

/// `h(t) = int_{-inf}^t psi(x) F(dx)`, componentwise. Uses the family's
/// closed form when present, adaptive quadrature otherwise. `h(-inf) = 0`
/// and `h(+inf) = E psi = 0`.
pub fn h_function(fam: &dyn ParametricFamily, theta: &[f64], t: f64) -> Result<Vec<f64>> {
    fam.check_theta(theta)?;
    if let Some(h) = fam.h_closed_form(theta, t) {
        return Ok(h);
    }
    let (lo, _) = effective_bounds(fam, theta);
    if t <= lo {
        return Ok(vec![0.0; fam.dim()]);
    }
    let mut out = Vec::with_capacity(fam.dim());
    for k in 0..fam.dim() {
        let q = integrate(
            |x| fam.influence(theta, x)[k] * fam.pdf(theta, x),
            lo,
            t,
            QUAD_TOL,
        )?;
        out.push(q.value);
    }
    Ok(out)
}

/// `Sigma = E[psi psi']`, closed form or quadrature, checked to be symmetric
/// positive-semidefinite.
pub fn sigma_matrix(fam: &dyn ParametricFamily, theta: &[f64]) -> Result<DMatrix<f64>> {
    fam.check_theta(theta)?;
    let d = fam.dim();
    let sigma = if let Some(s) = fam.sigma_closed_form(theta) {
        s
    } else {
        let (lo, hi) = effective_bounds(fam, theta);
        let mut s = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let q = integrate(
                    |x| {
                        let psi = fam.influence(theta, x);
                        psi[a] * psi[b] * fam.pdf(theta, x)
                    },
                    lo,
                    hi,
                    QUAD_TOL,
                )?;
                s[(a, b)] = q.value;
                s[(b, a)] = q.value;
            }
        }
        s
    };
    if sigma.nrows() != d || sigma.ncols() != d {
        return Err(KsError::InvalidTheta {
            family: "user",
            reason: "sigma dimension mismatch".into(),
        });
    }
    let min_eig = SymmetricEigen::new(sigma.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < PSD_TOLERANCE {
        return Err(KsError::NotPsd { min_eig });
    }
    Ok(sigma)
}

/// The limit-process covariance at a pair of time points.
pub fn covariance(fam: &dyn ParametricFamily, theta: &[f64], s: f64, t: f64) -> Result<f64> {
    fam.check_theta(theta)?;
    let sigma = sigma_matrix(fam, theta)?;
    let h_s = DVector::from_vec(h_function(fam, theta, s)?);
    let h_t = DVector::from_vec(h_function(fam, theta, t)?);
    let df_s = DVector::from_vec(fam.dcdf_dtheta(theta, s));
    let df_t = DVector::from_vec(fam.dcdf_dtheta(theta, t));
    let f_s = fam.cdf(theta, s);
    let f_t = fam.cdf(theta, t);
    let f_min = fam.cdf(theta, s.min(t));
    Ok(f_min - f_s * f_t - h_t.dot(&df_s) - h_s.dot(&df_t) + (df_s.transpose() * &sigma * df_t)[(0, 0)])
}

/// A covariance matrix evaluated on a fixed, strictly increasing grid,
/// with any roundoff-scale eigenvalue deficiency repaired by recorded
/// diagonal jitter.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceGrid {
    pub grid: Vec<f64>,
    pub matrix: DMatrix<f64>,
    pub jitter_applied: f64,
}

/// Evaluation grid at the family's quantiles `{i/(g+1), i = 1..g}`.
pub fn quantile_grid(fam: &dyn ParametricFamily, theta: &[f64], g: usize) -> Result<Vec<f64>> {
    fam.check_theta(theta)?;
    if g < 2 {
        return Err(KsError::InvalidGrid);
    }
    let pts: Vec<f64> = (1..=g)
        .map(|i| fam.quantile(theta, i as f64 / (g as f64 + 1.0)))
        .collect();
    if pts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(KsError::InvalidGrid);
    }
    Ok(pts)
}

/// Assemble the covariance matrix on `grid`. The minimum eigenvalue must be
/// no smaller than [`PSD_TOLERANCE`]; a value in `(PSD_TOLERANCE, 0)` is
/// lifted by adding `|min| + 1e-12` to the diagonal.
pub fn build_covariance_grid(
    fam: &dyn ParametricFamily,
    theta: &[f64],
    grid: &[f64],
) -> Result<CovarianceGrid> {
    fam.check_theta(theta)?;
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(KsError::InvalidGrid);
    }
    let g = grid.len();
    let sigma = sigma_matrix(fam, theta)?;
    let mut f = Vec::with_capacity(g);
    let mut df = Vec::with_capacity(g);
    let mut h = Vec::with_capacity(g);
    for &t in grid {
        f.push(fam.cdf(theta, t));
        df.push(DVector::from_vec(fam.dcdf_dtheta(theta, t)));
        h.push(DVector::from_vec(h_function(fam, theta, t)?));
    }
    let sig_df: Vec<DVector<f64>> = df.iter().map(|v| &sigma * v).collect();

    let mut matrix = DMatrix::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            // grid is increasing, so F(min(s,t)) = f[i].
            let v = f[i] - f[i] * f[j] - h[j].dot(&df[i]) - h[i].dot(&df[j]) + df[i].dot(&sig_df[j]);
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }

    let min_eig = SymmetricEigen::new(matrix.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < PSD_TOLERANCE {
        return Err(KsError::NotPsd { min_eig });
    }
    let mut jitter_applied = 0.0;
    if min_eig < 0.0 {
        jitter_applied = min_eig.abs() + 1e-12;
        for i in 0..g {
            matrix[(i, i)] += jitter_applied;
        }
    }
    Ok(CovarianceGrid { grid: grid.to_vec(), matrix, jitter_applied })
}
