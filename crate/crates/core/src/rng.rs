//! Seeded randomness: ChaCha8 streams keyed by SplitMix64-mixed seeds.
//!
//! Every generator takes a `u64` seed. Independent sub-streams (one per
//! side, per construction step) are derived by mixing the parent seed with a
//! label, so adding a new consumer never shifts the draws of existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of grid cell `cell`.
pub fn trial_seed(seed_base: u64, cell: u64, trial: u64) -> u64 {
    mix64(mix64(mix64(seed_base) ^ cell) ^ trial.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

/// Child seed for a named sub-stream.
pub fn child_seed(seed: u64, label: &str) -> u64 {
    let h = label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    mix64(seed ^ mix64(h))
}

pub fn stream(seed: u64, label: &str) -> Rng {
    Rng::seed_from_u64(child_seed(seed, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn trial_seeds_distinct_and_stable() {
        let a = trial_seed(7, 0, 0);
        let b = trial_seed(7, 0, 1);
        let c = trial_seed(7, 0, 2);
        assert!(a != b && b != c && a != c);
        assert_eq!(a, trial_seed(7, 0, 0));
        assert_ne!(trial_seed(7, 1, 0), a);
    }

    #[test]
    fn labelled_streams_differ() {
        let x: u64 = stream(1, "left").gen();
        let y: u64 = stream(1, "right").gen();
        assert_ne!(x, y);
        let x2: u64 = stream(1, "left").gen();
        assert_eq!(x, x2);
    }
}
