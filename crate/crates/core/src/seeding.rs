//! Sub-seeding of the single user-facing seed.
//!
//! Every random stream in the crate is a ChaCha8 generator whose seed is
//! `derive_seed(root, stream, index)`. The stream tag names the consumer and
//! the index distinguishes instances of that consumer (tree number, fold
//! number). Streams never share state, so the outcome of a run does not depend
//! on the order in which parallel work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Changing any of these changes every published artifact.
pub mod stream {
    pub const TREE: u64 = 1;
    pub const FOLDS: u64 = 2;
    pub const RANDOM_TREES: u64 = 3;
    pub const SYNTHETIC: u64 = 4;
    pub const FOLD_FOREST: u64 = 5;
    pub const BOOTSTRAP: u64 = 6;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(root) ^ stream) ^ index)
}

pub fn rng_for(root: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, stream, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct() {
        let a = derive_seed(0, stream::TREE, 0);
        assert_ne!(a, derive_seed(0, stream::TREE, 1));
        assert_ne!(a, derive_seed(0, stream::FOLDS, 0));
        assert_ne!(a, derive_seed(1, stream::TREE, 0));
        assert_eq!(a, derive_seed(0, stream::TREE, 0));
    }
}
