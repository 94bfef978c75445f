use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream index for trial batch `index` of `phase` within experiment `experiment`.
///
/// Distinct triples map to distinct streams with overwhelming probability;
/// each stream of the ChaCha8 generator is an independent 2⁶⁴-block sequence.
pub fn stream_key(experiment: u64, phase: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(experiment) ^ phase) ^ index)
}

/// Deterministic generator for `(seed, stream)`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
