//! Seed fan-out.
//!
//! Every random stream in a run is derived from one master seed and a
//! textual stream label: the stream seed is the first eight bytes
//! (little endian) of `SHA-256(master.to_le_bytes() || label)`. Labels are
//! hierarchical paths such as `replicate/3/generate` so two streams share
//! state only if their labels are equal.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(master: u64, label: &str) -> Rng {
    seeded(derive_seed(master, label))
}
