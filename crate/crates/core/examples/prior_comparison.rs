//! Log prior of a few graphs on six vertices under every prior family.

use decograph::{clique_decomposition, log_prior, LabeledGraph, PriorSpec};

fn main() -> decograph::Result<()> {
    let graphs = [
        ("empty", LabeledGraph::empty(6)?),
        ("two triangles", LabeledGraph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])?),
        ("path", LabeledGraph::from_edges(6, (0..5).map(|i| (i, i + 1)))?),
        ("complete", LabeledGraph::complete(6)?),
    ];
    let families = [
        PriorSpec::Uniform,
        PriorSpec::Binomial { rho: 0.2 },
        PriorSpec::BetaBinomial { alpha: 1.0, beta: 1.0 },
        PriorSpec::Cohesion { clique_weights: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0], separator_weights: vec![1.0; 6] },
        PriorSpec::Pgm { a: 0.5, b: 0.01 },
        PriorSpec::TwoParam { a1: 0.2, a2: 0.5, b1: 0.1, b2: 100.0 },
        PriorSpec::FiniteCapacity { c1: 4.5, c2: 1.0, d1: 3.5, d2: 1.0 },
    ];
    print!("{:<16}", "family");
    for (name, _) in &graphs {
        print!("{name:>15}");
    }
    println!();
    for spec in &families {
        print!("{:<16}", spec.family_name());
        for (_, g) in &graphs {
            print!("{:>15.3}", log_prior(spec, g, &clique_decomposition(g)?)?);
        }
        println!();
    }
    Ok(())
}
