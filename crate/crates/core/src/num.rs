//! Scalar abstraction for the scoring kernels.
//!
//! Retrieval scores, embedding similarities, the rethink gate and the
//! evaluation metrics are all plain floating-point math, so they are written
//! against this trait and instantiated at `f32` or `f64`. The crate root
//! exports [`crate::Score`] as the default instantiation used by the
//! pipeline and the CLI.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: f32 or f64.
pub trait Scalar:
    Float + FromPrimitive + AddAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion for externally-visible records (traces, reports).
    fn to_f64_lossy(self) -> f64;

    fn from_f64_lossy(v: f64) -> Self;

    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).unwrap_or_else(|| Self::from_f64_lossy(v as f64))
    }
}

impl Scalar for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }

    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }
}

impl Scalar for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }

    fn from_f64_lossy(v: f64) -> Self {
        v
    }
}

/// FNV-1a over a byte string. Stable across platforms and releases, unlike
/// `DefaultHasher`, so it is safe to bake into seeds and index layouts.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// SplitMix64 finalizer, used to spread seed bits.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic per-question RNG seed derived from the global seed and the
/// question id. Questions evaluated concurrently stay independent of
/// scheduling because each owns an RNG seeded this way.
pub fn stable_seed(global_seed: u64, question_id: &str) -> u64 {
    splitmix64(global_seed ^ fnv1a(question_id.as_bytes()))
}
