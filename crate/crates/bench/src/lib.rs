//! Deterministic inputs shared by the benchmarks.

use hdk_core::synth::random_manhattan_room;
use hdk_core::LayoutAnnotation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random room with `corners` corners, fixed by `seed`.
pub fn room(corners: usize, seed: u64) -> LayoutAnnotation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_manhattan_room(&mut rng, corners, 1.0).expect("even corner count")
}
