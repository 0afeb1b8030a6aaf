//! Shared fixtures for the criterion benches.

use wctlab_core::verifier::{gen_instance, Family, GeneratorConfig};
use wctlab_core::WctInstance;

/// Dimensions the kernels are timed at.
pub const SIZES: [usize; 3] = [8, 16, 32];

/// A dense generic instance of dimension `n` with no zeroed blocks.
pub fn fixture(n: usize) -> WctInstance {
    let cfg = GeneratorConfig {
        seed: 0x5eed,
        n_min: n,
        n_max: n,
        zero_prob_u: 0.0,
        zero_prob_w: 0.0,
        family: Family::Generic,
        ..GeneratorConfig::default()
    };
    gen_instance(&cfg).expect("bench sizes are within the generator range")
}
