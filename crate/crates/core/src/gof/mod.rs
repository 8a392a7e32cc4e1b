// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Goodness-of-fit testing when the null family's parameters are estimated
//! from the data under test.
//!
//! Estimation changes the null distribution of the KS statistic: the limit
//! is a Gaussian process whose covariance subtracts the estimator's
//! influence. This module provides parametric families with the pieces
//! needed to build that covariance ([`family`]), the covariance assembly
//! with a positive-semidefinite repair ([`covariance`]), coupled Monte
//! Carlo of the sup-norm ([`simulate`]), and the two calibrated test
//! procedures ([`pvalue`]).

pub mod covariance;
pub mod family;
pub mod pvalue;
pub mod simulate;

pub use covariance::{
    build_covariance_grid, covariance, h_function, quantile_grid, sigma_matrix, CovarianceGrid,
};
pub use family::{ExponentialFamily, FamilyRegistry, NormalFamily, ParametricFamily};
pub use pvalue::{
    bootstrap_pvalue, bootstrap_test, dbr_pvalue, dbr_test, BootstrapTest, DbrTest, GofMethod,
    GRID_DOUBLING_TOL,
};
pub use simulate::{psd_cholesky, simulate_sup_abs};
