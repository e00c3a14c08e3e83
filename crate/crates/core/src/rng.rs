//! Seeding and sampling helpers.
//!
//! Every random stream in the crate is a [`ChaCha20Rng`], whose output is
//! fixed across platforms and library versions. Child streams are keyed by
//! hashing the parent seed with a label or index through SHA-256, so that
//! results never depend on scheduling order.
//!
//! Gaussian variates use the Box–Muller transform on two uniforms from
//! `rng.gen::<f64>()`: `z = sqrt(-2 ln(1 - u1)) · cos(2π u2)`. Only the
//! cosine branch is used, so each normal costs exactly two uniforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub type SimRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Child seed for `(seed, label)`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

/// Child seed for `(seed, index)`.
pub fn derive_seed_indexed(seed: u64, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(b"#");
    h.update(index.to_le_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

/// Standard normal variate (Box–Muller, cosine branch).
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
