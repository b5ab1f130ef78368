//! Exact posterior over all 61 decomposable graphs on four variables, compared with
//! a sampler run on the same target.

use decograph::mcmc::total_variation;
use decograph::{exact_posterior, run_chain, suff_stats, ChainConfig, HiwParams, PriorSpec, Sampler, Target};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> decograph::Result<()> {
    // AR(1)-like chain 1 - 2 - 3 - 4
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut data = DMatrix::zeros(40, 4);
    for i in 0..40 {
        let mut prev = 0.0;
        for j in 0..4 {
            let z: f64 = StandardNormal.sample(&mut rng);
            prev = 0.7 * prev + z;
            data[(i, j)] = prev;
        }
    }
    let stats = suff_stats(&data)?;
    let hp = HiwParams::default_for(&stats)?;
    let spec = PriorSpec::Pgm { a: 1.0, b: 1.0 };

    let mut exact = exact_posterior(4, &spec, Some((&stats, &hp)))?;
    exact.sort_by(|x, y| y.probability.total_cmp(&x.probability));
    for e in exact.iter().take(5) {
        println!("{:.4}  [{}]", e.probability, e.graph);
    }

    let cfg = ChainConfig { iterations: 200_000, seed: 5, target: Target::Posterior, ..ChainConfig::default() };
    let summary = run_chain(&cfg, &mut Sampler::posterior(spec, stats, hp)?)?;
    println!("total variation, sampler vs exact: {:.4}", total_variation(&exact, &summary));
    Ok(())
}
