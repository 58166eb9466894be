//! Weighted Bergman spaces on the unit disc and ball.
//!
//! The crate covers the structural constants of bounded symmetric domains,
//! the automorphism group of the disc/ball, holomorphic functions stored as
//! coefficient vectors, the holomorphic discrete series and its wavelet
//! transform, Forelli–Rudin type integral estimates, atomic decompositions
//! built from hyperbolic lattices, and the transfer to the upper half-plane.

pub mod analysis;
pub mod atoms;
pub mod cayley;
pub mod domain;
mod error;
pub mod geometry;
pub mod holo;
pub mod quad;
pub mod rep;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Seeded RNG used by everything that needs randomness.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
