//! Symmetric Dirichlet sampling via normalized Gamma draws.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::rng::{self, stream};

/// One draw from the symmetric Dirichlet(β) on the unit k-simplex.
///
/// Small β (the usual setting is 1/k) concentrates mass near the corners,
/// which is what gives each vertex its share of nearby latent points.
pub fn dirichlet_sample(beta: f64, k: usize, seed: u64) -> Vec<f64> {
    assert!(beta > 0.0, "dirichlet_sample needs beta > 0");
    assert!(k >= 1, "dirichlet_sample needs k >= 1");
    let mut rng = rng::seeded(seed, stream::GEN_WEIGHTS);
    dirichlet_with(beta, k, &mut rng)
}

pub(crate) fn dirichlet_with<R: Rng>(beta: f64, k: usize, rng: &mut R) -> Vec<f64> {
    if k == 1 {
        return vec![1.0];
    }
    let gamma = Gamma::new(beta, 1.0).expect("valid gamma shape");
    for _ in 0..32 {
        let mut draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
        let sum: f64 = draws.iter().sum();
        if sum > 1e-300 {
            for x in &mut draws {
                *x /= sum;
            }
            return draws;
        }
    }
    // All Gamma draws underflowed (possible only for extreme β); fall back
    // to a fully concentrated sample, which is the distribution's limit.
    let mut out = vec![0.0; k];
    out[rng.gen_range(0..k)] = 1.0;
    out
}
