//! Gibbs refreshes of the concentration parameter given a fixed number of blocks.

use decograph::west_update_concentration;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> decograph::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (n_c, n) in [(1, 20), (5, 20), (15, 20)] {
        let mut a = 1.0;
        let mut draws = Vec::with_capacity(50_000);
        for t in 0..51_000 {
            a = west_update_concentration(a, n_c, n, 2.0, 1.0, &mut rng)?;
            if t >= 1000 {
                draws.push(a);
            }
        }
        draws.sort_by(f64::total_cmp);
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let q = |p: f64| draws[(p * (draws.len() - 1) as f64) as usize];
        println!(
            "n_c = {n_c:2} of n = {n}: mean {mean:.3}, 5% {:.3}, median {:.3}, 95% {:.3}",
            q(0.05),
            q(0.5),
            q(0.95)
        );
    }
    Ok(())
}
