use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent purposes a run draws randomness for. Each gets its own family
/// of ChaCha streams so that, for example, adding a heuristic β draw never
/// shifts the shot noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Domain {
    Shot = 1,
    Select = 2,
    Phase = 3,
    Unencoded = 4,
    Encoded = 5,
    ExitRatio = 6,
    Seed = 7,
}

/// The stream for `(domain, a, b)` under `seed`. `a` is typically a round or
/// configuration index and `b` an attempt or shot index.
pub fn stream(seed: u64, domain: Domain, a: u32, b: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain as u64) << 56 | u64::from(a & 0x00ff_ffff) << 32 | u64::from(b));
    rng
}

/// A child seed, for runs launched from an ensemble.
pub fn derive_seed(seed: u64, index: u32) -> u64 {
    stream(seed, Domain::Seed, index, 0).next_u64()
}
