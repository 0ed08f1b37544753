//! A fast, non-cryptographic hasher for the dynamic-programming tables.
//!
//! The DP keys are short arrays of small integers; FNV-1a over their bytes is
//! both quicker than SipHash and deterministic across runs, which keeps table
//! iteration order stable for a fixed input.

use std::hash::{BuildHasherDefault, Hasher};

/// 64-bit FNV-1a.
#[derive(Default)]
pub struct FnvHasher(u64);

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

impl Hasher for FnvHasher {
    fn finish(&self) -> u64 {
        if self.0 == 0 {
            FNV_OFFSET
        } else {
            self.0
        }
    }

    fn write(&mut self, bytes: &[u8]) {
        let mut h = if self.0 == 0 { FNV_OFFSET } else { self.0 };
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        self.0 = h;
    }
}

pub type FnvBuildHasher = BuildHasherDefault<FnvHasher>;

/// HashMap with the FNV hasher, used for all DP tables.
pub type FnvHashMap<K, V> = std::collections::HashMap<K, V, FnvBuildHasher>;
