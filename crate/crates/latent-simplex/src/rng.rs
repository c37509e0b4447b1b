//! Counter-based randomness: every public operation takes an explicit seed
//! and derives independent ChaCha streams from it, so results are
//! reproducible regardless of call order or thread count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Independent stream ids per consumer of a user-supplied seed.
pub(crate) mod stream {
    pub const POWER_INIT: u64 = 1;
    pub const DIRECTION_BASE: u64 = 0x100;
    pub const SPECTRAL: u64 = 0x200;
    pub const GEN_WEIGHTS: u64 = 0x300;
    pub const GEN_OBSERVED: u64 = 0x301;
    pub const GEN_MODEL: u64 = 0x302;
    pub const HAUSDORFF: u64 = 0x400;
    pub const KMEANS: u64 = 0x500;
}

pub(crate) fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn gaussian_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Gaussian vector normalized to unit length; redraws on the (measure-zero)
/// chance the norm underflows.
pub(crate) fn unit_gaussian<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let mut v = gaussian_vec(rng, len);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for x in &mut v {
                *x /= norm;
            }
            return v;
        }
    }
}
