// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction for the statistics and distribution routines.
//!
//! Everything numeric in this crate is generic over [`Real`], which is any
//! IEEE float with the conversions we need. `f64` is the workhorse; `f32`
//! works for the empirical statistics when the data arrive in single
//! precision. Tail formulas that need the full double mantissa evaluate
//! internally in `f64` regardless of the exposed scalar.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Nearest representable value to `x`.
    fn of_f64(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to any Real")
    }

    /// Exact for counts below the mantissa width, rounded beyond.
    fn of_count(n: u64) -> Self {
        Self::from_u64(n).expect("u64 converts to any Real")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("any Real widens to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
