use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator used by both engines. Fixed per build so that a seed fully
/// determines a trajectory.
pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Uniform draw on `(0, 1]`; a zero from the generator is mapped to one.
pub fn open_closed_unit(rng: &mut SimRng) -> f64 {
    let u: f64 = rng.random();
    if u == 0.0 {
        1.0
    } else {
        u
    }
}

/// Uniform draw on `[0, 1)`.
pub fn closed_open_unit(rng: &mut SimRng) -> f64 {
    rng.random()
}

/// Seed for replicate `index` of a run seeded with `base` (splitmix64 of the
/// pair), so replicates are independent of scheduling order.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
