//! Stable seed derivation for benchmark runs.
//!
//! The standard library hashers are not guaranteed stable across releases,
//! so per-run seeds come from a fixed FNV-1a / SplitMix64 pipeline that will
//! never change out from under recorded results.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(state: u64, bytes: &[u8]) -> u64 {
    let mut h = state;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one (category, run) cell: hash(base_seed, label, run).
pub fn derive_seed(base_seed: u64, label: &str, run: u64) -> u64 {
    let mut h = fnv1a(FNV_OFFSET, &base_seed.to_le_bytes());
    h = fnv1a(h, label.as_bytes());
    h = fnv1a(h, &run.to_le_bytes());
    splitmix64(h)
}

/// Derives an independent stream from an existing seed (negative sampling,
/// SGD shuffling, ...).
pub fn mix(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable() {
        // Frozen outputs: changing the pipeline would silently re-randomize
        // every recorded benchmark, so these exact values are pinned.
        assert_eq!(derive_seed(42, "months", 0), 0x0f68_a4f6_53b4_3afb);
        assert_eq!(derive_seed(42, "months", 1), 0xc52a_5733_7f28_8252);
        assert_eq!(derive_seed(7, "months", 0), 0xee83_f455_5b97_fe50);
    }

    #[test]
    fn distinct_inputs_give_distinct_seeds() {
        let a = derive_seed(1, "alpha", 0);
        let b = derive_seed(1, "beta", 0);
        let c = derive_seed(1, "alpha", 1);
        let d = derive_seed(2, "alpha", 0);
        assert!(a != b && a != c && a != d && b != c && b != d && c != d);
    }

    #[test]
    fn mix_differs_by_salt() {
        assert_ne!(mix(99, 1), mix(99, 2));
        assert_eq!(mix(99, 1), mix(99, 1));
    }
}
