mod common;

use std::f64::consts::PI;

use decograph::chordal::clique_decomposition_from;
use decograph::likelihood::MarginalScorer;
use decograph::special::log_multivariate_gamma;
use decograph::{
    clique_decomposition, enumerate_decomposable_graphs, log_component_marginal, log_marginal_likelihood,
    log_predictive, log_sublikelihood, suff_stats, GaussianSuffStats, HiwParams, LabeledGraph, VertexSet,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

fn hp(n: usize, delta: f64, tau: f64) -> HiwParams {
    HiwParams::isotropic(n, delta, tau).unwrap()
}

#[test]
fn scatter_matches_pairwise_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data = common::random_matrix(&mut rng, 10, 3);
    let stats = suff_stats(&data).unwrap();
    // S = (1 / 2N) Σ_s Σ_t (y_s − y_t)(y_s − y_t)ᵀ
    let mut s = DMatrix::zeros(3, 3);
    for a in 0..10 {
        for b in 0..10 {
            let d = (data.row(a) - data.row(b)).transpose();
            s += &d * d.transpose();
        }
    }
    s /= 20.0;
    assert!((stats.scatter - s).abs().max() < 1e-10);

    let one = suff_stats(&DMatrix::from_row_slice(1, 2, &[3.0, -1.0])).unwrap();
    assert_eq!(one.scatter, DMatrix::zeros(2, 2));
    let two = suff_stats(&DMatrix::from_row_slice(2, 1, &[0.0, 2.0])).unwrap();
    assert_eq!((two.mean[0], two.scatter[(0, 0)]), (1.0, 2.0));
}

#[test]
fn multivariate_gamma_direct_sums() {
    let p2 = 0.5 * PI.ln() + ln_gamma(3.0) + ln_gamma(2.5);
    assert!((log_multivariate_gamma(2, 3.0).unwrap() - p2).abs() < 1e-12);
    let p3 = 1.5 * PI.ln() + ln_gamma(5.0) + ln_gamma(4.5) + ln_gamma(4.0);
    assert!((log_multivariate_gamma(3, 5.0).unwrap() - p3).abs() < 1e-12);
    assert!((log_multivariate_gamma(1, 2.7).unwrap() - ln_gamma(2.7)).abs() < 1e-14);
    assert!(log_multivariate_gamma(3, 1.0).is_err());
}

#[test]
fn univariate_component_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data = common::random_matrix(&mut rng, 6, 1) * 1.7;
    let stats = suff_stats(&data).unwrap();
    let (delta, phi): (f64, f64) = (3.0, 2.0);
    let oracle = common::univariate_marginal_by_quadrature(&stats, delta, phi);
    let got = log_component_marginal(VertexSet::singleton(0), &stats, &hp(1, delta, phi)).unwrap();
    assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
}

#[test]
fn bivariate_component_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data = common::random_matrix(&mut rng, 3, 2);
    let stats = suff_stats(&data).unwrap();
    let oracle = common::bivariate_marginal_by_quadrature(&stats);
    let got = log_component_marginal(VertexSet::from_vertices([0, 1]), &stats, &hp(2, 3.0, 1.0)).unwrap();
    assert!((got - oracle).abs() < 1e-4, "{got} vs {oracle}");
}

#[test]
fn empty_sample_has_zero_marginal() {
    let stats = GaussianSuffStats::empty(3);
    assert_eq!(log_component_marginal(VertexSet::full(3), &stats, &hp(3, 3.0, 1.0)).unwrap(), 0.0);
}

#[test]
fn complete_graph_matches_niw_chain_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for n in 1..=6 {
        for &(rows, delta, tau) in &[(n + 3, 3.0, 1.0), (12, 5.5, 0.4), (30, 3.0, 2.5)] {
            let sigma = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.3 });
            let data = common::sample_mvn(&mut rng, &sigma, rows) * 1.3;
            let stats = suff_stats(&data).unwrap();
            let g = LabeledGraph::complete(n).unwrap();
            let got = log_marginal_likelihood(&clique_decomposition(&g).unwrap(), &stats, &hp(n, delta, tau)).unwrap();
            let psi = DMatrix::identity(n, n) * tau;
            let oracle = common::niw_chain(&common::centered_rows(&data), delta + n as f64 - 1.0, &psi);
            assert!((got - oracle).abs() < 1e-8, "n={n} rows={rows}: {got} vs {oracle}");
        }
    }
}

#[test]
fn complete_graph_predictive_matches_niw_chain_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n = 4;
    let sigma = common::block_covariance(2, 2, 0.6);
    let train = common::sample_mvn(&mut rng, &sigma, 15);
    let test = common::sample_mvn(&mut rng, &sigma, 6).add_scalar(0.4);
    let (st, se) = (suff_stats(&train).unwrap(), suff_stats(&test).unwrap());
    let (delta, tau) = (3.0, 1.2);
    let g = LabeledGraph::complete(n).unwrap();
    let got = log_predictive(&clique_decomposition(&g).unwrap(), &st, &se, &hp(n, delta, tau)).unwrap();

    // Posterior after the centered training rows, then test rows shifted so their outer
    // products add the between-sample term of the pooled scatter.
    let nu = delta + n as f64 - 1.0;
    let tr_rows = common::centered_rows(&train);
    let mut psi = DMatrix::identity(n, n) * tau;
    for y in &tr_rows {
        psi += y * y.transpose();
    }
    let (n1, n2): (f64, f64) = (15.0, 6.0);
    let d: DVector<f64> = (train.row_mean() - test.row_mean()).transpose();
    let shift = d * (n1 * n2 / (n1 + n2) / n2).sqrt();
    let te_rows: Vec<DVector<f64>> = common::centered_rows(&test).into_iter().map(|y| y + &shift).collect();
    let oracle = common::niw_chain(&te_rows, nu + n1, &psi);
    assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
}

#[test]
fn predictive_chain_rule_and_empty_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = common::random_matrix(&mut rng, 9, 3);
    let b = common::random_matrix(&mut rng, 4, 3);
    let (sa, sb) = (suff_stats(&a).unwrap(), suff_stats(&b).unwrap());
    let pooled = suff_stats(&DMatrix::from_fn(13, 3, |i, j| if i < 9 { a[(i, j)] } else { b[(i - 9, j)] })).unwrap();
    let h = hp(3, 3.0, 1.0);
    for g in enumerate_decomposable_graphs(3).unwrap() {
        let d = clique_decomposition(&g).unwrap();
        let lhs = log_predictive(&d, &sa, &sb, &h).unwrap() + log_marginal_likelihood(&d, &sa, &h).unwrap();
        assert!((lhs - log_marginal_likelihood(&d, &pooled, &h).unwrap()).abs() < 1e-10);
        assert_eq!(log_predictive(&d, &sa, &GaussianSuffStats::empty(3), &h).unwrap(), 0.0);
    }
    let d = clique_decomposition(&LabeledGraph::empty(3).unwrap()).unwrap();
    assert!(log_predictive(&d, &sa, &GaussianSuffStats::empty(2), &h).is_err());
}

#[test]
fn empty_graph_is_sum_of_univariate_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let stats = suff_stats(&common::random_matrix(&mut rng, 7, 4)).unwrap();
    let h = hp(4, 3.0, 0.8);
    let d = clique_decomposition(&LabeledGraph::empty(4).unwrap()).unwrap();
    let sum: f64 = (0..4).map(|v| log_component_marginal(VertexSet::singleton(v), &stats, &h).unwrap()).sum();
    assert!((log_marginal_likelihood(&d, &stats, &h).unwrap() - sum).abs() < 1e-12);
}

#[test]
fn marginal_is_invariant_to_perfect_ordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for n in 2..=5 {
        let stats = suff_stats(&common::random_matrix(&mut rng, 12, n)).unwrap();
        let h = hp(n, 3.0, 1.0);
        for g in enumerate_decomposable_graphs(n).unwrap() {
            let base = log_marginal_likelihood(&clique_decomposition(&g).unwrap(), &stats, &h).unwrap();
            for start in 1..n {
                let d = clique_decomposition_from(&g, start).unwrap();
                let v = log_marginal_likelihood(&d, &stats, &h).unwrap();
                assert!((v - base).abs() < 1e-10, "[{g}] from {start}");
            }
        }
    }
}

#[test]
fn disconnected_graph_is_sum_over_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    // components {0,1,2} (path) and {3,4} (edge), block-diagonal scale
    let sigma = common::block_covariance(1, 3, 0.5);
    let left = common::sample_mvn(&mut rng, &sigma, 10);
    let right = common::sample_mvn(&mut rng, &common::block_covariance(1, 2, -0.4), 10);
    let data = DMatrix::from_fn(10, 5, |i, j| if j < 3 { left[(i, j)] } else { right[(i, j - 3)] });
    let mut phi = DMatrix::identity(5, 5);
    phi[(0, 1)] = 0.3;
    phi[(1, 0)] = 0.3;
    phi[(3, 4)] = -0.2;
    phi[(4, 3)] = -0.2;
    let h = HiwParams::new(4.0, phi.clone()).unwrap();
    let g = LabeledGraph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
    let whole = log_marginal_likelihood(&clique_decomposition(&g).unwrap(), &suff_stats(&data).unwrap(), &h).unwrap();

    let part = |cols: std::ops::Range<usize>, g: LabeledGraph| {
        let k = cols.len();
        let sub = data.columns(cols.start, k).into_owned();
        let hp = HiwParams::new(4.0, phi.view((cols.start, cols.start), (k, k)).into_owned()).unwrap();
        log_marginal_likelihood(&clique_decomposition(&g).unwrap(), &suff_stats(&sub).unwrap(), &hp).unwrap()
    };
    let split = part(0..3, LabeledGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap())
        + part(3..5, LabeledGraph::complete(2).unwrap());
    assert!((whole - split).abs() < 1e-10);
}

#[test]
fn matched_scaling_preserves_graph_comparisons() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let data = common::sample_mvn(&mut rng, &common::block_covariance(2, 2, 0.7), 14);
    let c = 3.7;
    let (s1, s2) = (suff_stats(&data).unwrap(), suff_stats(&(&data * c)).unwrap());
    let (h1, h2) = (hp(4, 3.0, 0.9), hp(4, 3.0, 0.9 * c * c));
    let graphs = enumerate_decomposable_graphs(4).unwrap();
    let score = |g: &LabeledGraph, s: &GaussianSuffStats, h: &HiwParams| {
        log_marginal_likelihood(&clique_decomposition(g).unwrap(), s, h).unwrap()
    };
    let (b1, b2) = (score(&graphs[0], &s1, &h1), score(&graphs[0], &s2, &h2));
    for g in &graphs {
        assert!(((score(g, &s1, &h1) - b1) - (score(g, &s2, &h2) - b2)).abs() < 1e-8, "[{g}]");
    }
}

#[test]
fn sublikelihood_matches_per_observation_densities() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let data = common::random_matrix(&mut rng, 5, 3);
    let stats = suff_stats(&data).unwrap();
    let (s11, s22, s12) = (1.3, 0.6, -0.4);
    let sigma = DMatrix::from_row_slice(2, 2, &[s11, s12, s12, s22]);
    let set = VertexSet::from_vertices([0, 2]);
    let det = s11 * s22 - s12 * s12;
    let mut oracle = 0.0;
    for y in common::centered_rows(&data) {
        let (x1, x2) = (y[0], y[2]);
        let q = (s22 * x1 * x1 - 2.0 * s12 * x1 * x2 + s11 * x2 * x2) / det;
        oracle += -(2.0 * PI).ln() - 0.5 * det.ln() - 0.5 * q;
    }
    assert!((log_sublikelihood(set, &sigma, &stats).unwrap() - oracle).abs() < 1e-10);

    let ident = log_sublikelihood(set, &DMatrix::identity(2, 2), &stats).unwrap();
    let tr = stats.scatter[(0, 0)] + stats.scatter[(2, 2)];
    assert!((ident - (-5.0 * (2.0 * PI).ln() - 0.5 * tr)).abs() < 1e-10);

    let single = suff_stats(&DMatrix::from_row_slice(1, 1, &[0.0])).unwrap();
    let v = log_sublikelihood(VertexSet::singleton(0), &DMatrix::identity(1, 1), &single).unwrap();
    assert!((v + 0.5 * (2.0 * PI).ln()).abs() < 1e-14);
    assert!(log_sublikelihood(set, &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]), &stats).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scorer_delta_matches_full_recomputation(
        seed in 0u64..1000,
        n in 2usize..=8,
        f1 in prop::collection::vec(0usize..1000, 0..30),
        flip in 0usize..1000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stats = suff_stats(&common::random_matrix(&mut rng, 2 * n, n)).unwrap();
        let h = hp(n, 3.0, 1.0);
        let g = common::decomposable_from_flips(n, &f1);
        let mut extended = f1.clone();
        extended.push(flip);
        let g2 = common::decomposable_from_flips(n, &extended);
        let (d1, d2) = (clique_decomposition(&g).unwrap(), clique_decomposition(&g2).unwrap());
        let mut scorer = MarginalScorer::new(stats.clone(), h.clone()).unwrap();
        let delta = scorer.log_ml_delta(&d1, &d2).unwrap();
        let full = log_marginal_likelihood(&d2, &stats, &h).unwrap() - log_marginal_likelihood(&d1, &stats, &h).unwrap();
        prop_assert!((delta - full).abs() < 1e-9);
        prop_assert!((scorer.log_ml(&d2).unwrap() - log_marginal_likelihood(&d2, &stats, &h).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn scatter_is_symmetric_psd(seed in 0u64..10_000, rows in 1usize..20, cols in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = suff_stats(&common::random_matrix(&mut rng, rows, cols)).unwrap().scatter;
        prop_assert!((&s - s.transpose()).abs().max() < 1e-12);
        let eig = s.symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|&e| e > -1e-9));
    }
}
