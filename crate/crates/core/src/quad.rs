// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Simpson quadrature with an absolute-error budget.
//!
//! Used as the fallback for influence-moment integrals and as an independent
//! cross-check for closed-form densities elsewhere in the crate.

use crate::error::KsError;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    /// Accumulated Richardson error estimate; at most the requested tolerance
    /// on success.
    pub error_estimate: f64,
    pub evaluations: usize,
}

const MAX_DEPTH: u32 = 52;

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// The integrand must be finite on the closed interval, endpoints included;
/// callers integrating densities with removable endpoint limits pass a
/// wrapper that returns the limit value.
pub fn integrate<Func>(f: Func, a: f64, b: f64, abs_tol: f64) -> Result<Quadrature>
where
    Func: Fn(f64) -> f64,
{
    if !(abs_tol > 0.0) || !abs_tol.is_finite() {
        return Err(KsError::InvalidTolerance(abs_tol));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(KsError::InvalidArgument(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut state = State { evals: 0, err: 0.0 };
    let flo = state.eval(&f, lo);
    let fhi = state.eval(&f, hi);
    let mid = 0.5 * (lo + hi);
    let fmid = state.eval(&f, mid);
    let whole = simpson(lo, hi, flo, fmid, fhi);
    let value = adapt(&f, lo, flo, mid, fmid, hi, fhi, whole, abs_tol, MAX_DEPTH, &mut state);

    if state.err > abs_tol {
        return Err(KsError::QuadratureNonConvergence {
            achieved: state.err,
            requested: abs_tol,
        });
    }
    Ok(Quadrature {
        value: sign * value,
        error_estimate: state.err,
        evaluations: state.evals,
    })
}

struct State {
    evals: usize,
    err: f64,
}

impl State {
    fn eval<Func: Fn(f64) -> f64>(&mut self, f: &Func, x: f64) -> f64 {
        self.evals += 1;
        f(x)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<Func: Fn(f64) -> f64>(
    f: &Func,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    state: &mut State,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = state.eval(f, lm);
    let frm = state.eval(f, rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // 15 = 2^4 - 1 from the Richardson step of composite Simpson.
    if depth == 0 || delta.abs() <= 15.0 * tol {
        state.err += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    let half = 0.5 * tol;
    adapt(f, a, fa, lm, flm, m, fm, left, half, depth - 1, state)
        + adapt(f, m, fm, rm, frm, b, fb, right, half, depth - 1, state)
}
