//! Counter-based seeding: every `(rng_seed, cell, seed_index)` triple maps to
//! its own independent generator, so work can be split across threads in any
//! order without changing what each unit draws.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Generator for one `(rng_seed, cell, seed_index)` triple.
pub fn stream(rng_seed: u64, cell: u64, seed_index: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(splitmix64(rng_seed) ^ cell) ^ seed_index);
    ChaCha8Rng::seed_from_u64(key)
}

/// Uniform point in the open unit disk.
pub fn unit_disk<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(r, theta)
}

/// Initial pair `(z_{-1}, z_0)` drawn from the unit disk.
pub fn initial_pair(rng_seed: u64, cell: u64, seed_index: u64) -> (Complex64, Complex64) {
    let mut rng = stream(rng_seed, cell, seed_index);
    let zm1 = unit_disk(&mut rng);
    let z0 = unit_disk(&mut rng);
    (zm1, z0)
}
