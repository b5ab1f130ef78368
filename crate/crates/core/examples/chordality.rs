//! Decomposability checks, clique decompositions and small-n graph counts.

use decograph::{clique_decomposition, enumerate_decomposable_graphs, is_decomposable, LabeledGraph};

fn main() -> decograph::Result<()> {
    let square = LabeledGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])?;
    println!("4-cycle [{square}] decomposable: {}", is_decomposable(&square));

    let chorded = square.flipped(0, 2);
    let d = clique_decomposition(&chorded)?;
    println!("with chord 1-3 [{chorded}]:");
    println!("  cliques {:?}", d.cliques());
    println!("  separators {:?}", d.separators());

    for n in 1..=5 {
        println!("n = {n}: {} decomposable graphs", enumerate_decomposable_graphs(n)?.len());
    }
    Ok(())
}
