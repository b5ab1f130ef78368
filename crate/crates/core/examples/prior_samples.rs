//! Prior-only chains on 20 vertices: structure statistics under edge-count and
//! clique-based priors.

use decograph::{diagnostics, run_chain, ChainConfig, PriorSpec, Sampler};

fn main() -> decograph::Result<()> {
    let cfg = ChainConfig {
        iterations: 200_000,
        burn_in: 20_000,
        thin: 20,
        seed: 1,
        merge_split: 0.1,
        ..ChainConfig::default()
    };
    for spec in [
        PriorSpec::Binomial { rho: 0.1 },
        PriorSpec::BetaBinomial { alpha: 1.0, beta: 1.0 },
        PriorSpec::Pgm { a: 10.0, b: 0.001 },
        PriorSpec::Pgm { a: 1.0, b: 1.0 },
    ] {
        let name = format!("{spec:?}");
        let d = diagnostics(&run_chain(&cfg, &mut Sampler::prior_only(spec, 20)?)?);
        println!(
            "{name:<48} edges {:6.2}  cliques {:5.2}  separators {:5.2}  acceptance {:.3}",
            d.r.mean, d.n_c.mean, d.n_s.mean, d.acceptance_rate
        );
    }
    Ok(())
}
