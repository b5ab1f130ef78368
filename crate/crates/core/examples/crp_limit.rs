//! As the separator weight vanishes, the pgm prior on clique counts approaches the
//! Chinese restaurant process law of the number of tables.

use decograph::{clique_decomposition, crp_clique_count_pmf, enumerate_decomposable_graphs, log_prior, PriorSpec};

fn main() -> decograph::Result<()> {
    let n = 6;
    let graphs = enumerate_decomposable_graphs(n)?;
    for a in [0.5, 1.0, 2.0] {
        let spec = PriorSpec::Pgm { a, b: 1e-8 };
        let mut mass = vec![0.0; n + 1];
        for g in &graphs {
            let d = clique_decomposition(g)?;
            mass[d.clique_count()] += log_prior(&spec, g, &d)?.exp();
        }
        let total: f64 = mass.iter().sum();
        let crp = crp_clique_count_pmf(n, a)?;
        println!("a = {a}: E(n_c) = {:.4}, var(n_c) = {:.4}", crp.mean, crp.variance);
        for (k, (m, p)) in mass.iter().skip(1).zip(&crp.pmf).enumerate() {
            println!("  k = {}: prior {:.6}  crp {p:.6}", k + 1, m / total);
        }
    }
    Ok(())
}
