//! Deterministic seeding.
//!
//! All randomness in the crate comes from ChaCha8 streams. A 64-bit seed
//! selects the key and a [`Stream`] id selects the stream, so different
//! purposes never share draws even when they share a seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const S_MULT: u64 = 0xD1B5_4A32_D192_ED03;
const L_MULT: u64 = 0xABC9_8388_FB8F_AC03;

/// One round of SplitMix64 (Steele, Lea & Flood). A bijection on `u64`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `(s, l)` of a run with master seed `master`:
///
/// ```text
/// h = splitmix64(master)
/// h = splitmix64(h ^ s·0xD1B54A32D192ED03)
/// seed = splitmix64(h ^ l·0xABC98388FB8FAC03)
/// ```
///
/// For a fixed master the map is injective in `s` and, for fixed `s`, in `l`.
pub fn derive_trial_seed(master: u64, s: u64, l: u64) -> u64 {
    let h = splitmix64(master);
    let h = splitmix64(h ^ s.wrapping_mul(S_MULT));
    splitmix64(h ^ l.wrapping_mul(L_MULT))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Truth = 1,
    Ensemble = 2,
    Noise = 3,
    Probe = 4,
    EigenStart = 5,
}

pub fn seeded_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn golden_seed_at_origin() {
        // Frozen from an independent evaluation of the mixing formula.
        assert_eq!(derive_trial_seed(0, 0, 0), 0x2382_75BC_38FC_BE91);
    }

    #[test]
    fn deterministic() {
        assert_eq!(derive_trial_seed(42, 3, 7), derive_trial_seed(42, 3, 7));
    }

    #[test]
    fn no_collisions_between_adjacent_trials() {
        let mut rng = seeded_rng(99, Stream::Probe);
        for _ in 0..1000 {
            let m: u64 = rng.random();
            assert_ne!(derive_trial_seed(m, 0, 0), derive_trial_seed(m, 0, 1));
        }
    }

    #[test]
    fn streams_are_independent() {
        let mut a = seeded_rng(5, Stream::Truth);
        let mut b = seeded_rng(5, Stream::Ensemble);
        let xa: u64 = a.random();
        let xb: u64 = b.random();
        assert_ne!(xa, xb);
    }
}
