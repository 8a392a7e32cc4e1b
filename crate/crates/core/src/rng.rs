// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic substream derivation for Monte Carlo loops.
//!
//! Every replicate draws from its own ChaCha12 stream whose 256-bit key is a
//! SplitMix64 expansion of `(seed, index)`. Replicate `i` therefore sees the
//! same bits no matter how the loop is scheduled, which is what makes the
//! parallel and serial paths bit-identical.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Collapse `(seed, index)` into a single well-mixed 64-bit value.
pub fn derive(seed: u64, index: u64) -> u64 {
    let mut state = seed;
    let a = splitmix64(&mut state);
    state = a ^ index;
    splitmix64(&mut state)
}

/// ChaCha12 stream for replicate `index` of the experiment keyed by `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut state = derive(seed, index);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}
