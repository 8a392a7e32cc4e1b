// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON report types. The schema here is pinned by a golden-file test, so
//! field names and types are a compatibility surface: change them only with
//! a new schema version.
//!
//! Statistics are written as plain JSON numbers (shortest round-trip form,
//! so a reader recovers the same f64 bit pattern). Probabilities are
//! written with 17 significant digits, which also round-trips exactly.

use ksdist::{KsStatistics64, TailResult64};
use serde::Serialize;
use serde_json::value::RawValue;

/// A probability rendered as a raw JSON number with 17 significant digits.
pub fn prob_number(p: f64) -> Box<RawValue> {
    // 1.0e0-style scientific notation is valid JSON and preserves every
    // f64 exactly at 17 significant digits.
    RawValue::from_string(format!("{:.16e}", p)).expect("formatted float is valid JSON")
}

#[derive(Serialize)]
pub struct StatisticReport {
    pub d_plus: f64,
    pub d_minus: f64,
    pub d: f64,
}

impl From<KsStatistics64> for StatisticReport {
    fn from(s: KsStatistics64) -> Self {
        StatisticReport { d_plus: s.d_plus, d_minus: s.d_minus, d: s.d }
    }
}

#[derive(Serialize)]
pub struct PValueReport {
    pub p: Box<RawValue>,
    pub method: String,
    pub err: Box<RawValue>,
    pub terms_used: u32,
}

impl From<TailResult64> for PValueReport {
    fn from(t: TailResult64) -> Self {
        PValueReport {
            p: prob_number(t.p),
            method: t.method.to_string(),
            err: prob_number(t.err),
            terms_used: t.terms_used,
        }
    }
}

/// Method-specific extras carried alongside the headline p-value.
#[derive(Serialize)]
#[serde(untagged)]
pub enum Details {
    Dbr {
        theta_hat: Vec<f64>,
        /// `sqrt(n) * D_n` at the fitted parameter.
        observed: f64,
        base_p: Box<RawValue>,
        refined_p: Box<RawValue>,
        doubled: bool,
        grid_size: usize,
    },
    Bootstrap {
        theta_hat: Vec<f64>,
        observed: f64,
        reps: u64,
        failures: u64,
    },
}

/// The one JSON object every test subcommand prints on stdout.
#[derive(Serialize)]
pub struct TestReport {
    pub test: String,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    pub statistic: StatisticReport,
    pub p_value: PValueReport,
    /// Exact rational p-value as "num/den", when one was computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_exact: Option<String>,
    /// The engine that actually ran (may differ from the requested method
    /// under `--method auto`).
    pub method: String,
    pub dist: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Details>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TestReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
