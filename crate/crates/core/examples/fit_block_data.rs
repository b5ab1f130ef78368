//! Fit on nine variables in three correlated blocks, then score held-out rows by
//! model averaging under two priors.

use decograph::io::to_dot;
use decograph::{
    bma_log_predictive, diagnostics, run_chains, suff_stats, ChainConfig, HiwParams, PriorSpec, Sampler, Target,
};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> decograph::Result<()> {
    let sigma = DMatrix::from_fn(9, 9, |i, j| {
        if i == j {
            1.0
        } else if i / 3 == j / 3 {
            0.6
        } else {
            0.0
        }
    });
    let l = sigma.cholesky().expect("positive definite").l();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let z = DMatrix::<f64>::from_fn(40, 9, |_, _| StandardNormal.sample(&mut rng));
    let data: DMatrix<f64> = z * l.transpose();
    let train = suff_stats(&data.rows(0, 24).into_owned())?;
    let test = suff_stats(&data.rows(24, 16).into_owned())?;
    let hp = HiwParams::default_for(&train)?;
    let names: Vec<String> = (1..=9).map(|i| format!("x{i}")).collect();

    let cfg = ChainConfig {
        iterations: 100_000,
        burn_in: 10_000,
        thin: 10,
        seed: 2,
        target: Target::Posterior,
        merge_split: 0.2,
        ..ChainConfig::default()
    };
    for spec in [PriorSpec::Pgm { a: 0.01, b: 0.01 }, PriorSpec::Binomial { rho: 0.5 }] {
        let label = spec.family_name();
        let summary = run_chains(&cfg, || Sampler::posterior(spec.clone(), train.clone(), hp.clone()), 2)?;
        let report = bma_log_predictive(&summary.weighted_graphs(), &train, &test, &hp)?;
        let d = diagnostics(&summary);
        println!(
            "{label}: bma log predictive {:.3}, mean cliques {:.2}, mean separators {:.2}",
            report.bma_log_predictive, d.n_c.mean, d.n_s.mean
        );
        println!("{}", to_dot(&summary.top_graphs[0].graph, &names));
    }
    Ok(())
}
