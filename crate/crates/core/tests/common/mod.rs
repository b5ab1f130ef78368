#![allow(dead_code)]

use std::f64::consts::PI;

use decograph::chordal::{all_pairs, is_decomposable};
use decograph::{GaussianSuffStats, LabeledGraph};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

/// Rows drawn from N(0, sigma).
pub fn sample_mvn<R: Rng>(rng: &mut R, sigma: &DMatrix<f64>, rows: usize) -> DMatrix<f64> {
    let p = sigma.nrows();
    let l = sigma.clone().cholesky().expect("covariance must be positive definite").l();
    let z = DMatrix::from_fn(rows, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    z * l.transpose()
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Covariance with `blocks` equicorrelated blocks of size `size` and zero cross-block correlation.
pub fn block_covariance(blocks: usize, size: usize, rho: f64) -> DMatrix<f64> {
    let n = blocks * size;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if i / size == j / size {
            rho
        } else {
            0.0
        }
    })
}

/// Decomposable graph reached by applying the legal flips among `pairs` in order.
pub fn decomposable_from_flips(n: usize, pair_indices: &[usize]) -> LabeledGraph {
    let pairs: Vec<(usize, usize)> = all_pairs(n).collect();
    let mut g = LabeledGraph::empty(n).unwrap();
    if pairs.is_empty() {
        return g;
    }
    for &k in pair_indices {
        let (i, j) = pairs[k % pairs.len()];
        let h = g.flipped(i, j);
        if is_decomposable(&h) {
            g = h;
        }
    }
    g
}

/// Every labeled graph on `n` vertices.
pub fn all_graphs(n: usize) -> impl Iterator<Item = LabeledGraph> {
    let m = n * (n - 1) / 2;
    (0..1u64 << m).map(move |mask| LabeledGraph::from_pair_mask(n, mask).unwrap())
}

pub fn centered_rows(data: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let mean: DVector<f64> = data.row_mean().transpose();
    data.row_iter().map(|r| r.transpose() - &mean).collect()
}

/// Log density of a multivariate t with `df` degrees of freedom and scale matrix `scale`.
pub fn ln_mvt(y: &DVector<f64>, df: f64, scale: &DMatrix<f64>) -> f64 {
    let p = y.len() as f64;
    let lu = scale.clone().lu();
    let quad = (y.transpose() * lu.solve(y).unwrap())[(0, 0)];
    ln_gamma((df + p) / 2.0)
        - ln_gamma(df / 2.0)
        - p / 2.0 * (df * PI).ln()
        - 0.5 * lu.determinant().ln()
        - (df + p) / 2.0 * (1.0 + quad / df).ln()
}

/// Joint log density of zero-mean vectors under `Σ ~ IW(nu, psi)` by the predictive chain rule.
pub fn niw_chain(rows: &[DVector<f64>], nu: f64, psi: &DMatrix<f64>) -> f64 {
    let p = psi.nrows() as f64;
    let mut psi_t = psi.clone();
    let mut total = 0.0;
    for (t, y) in rows.iter().enumerate() {
        let df = nu + t as f64 - p + 1.0;
        total += ln_mvt(y, df, &(&psi_t / df));
        psi_t += y * y.transpose();
    }
    total
}

/// One-variable marginal with σ² ~ inverse gamma(δ/2, φ/2), integrated over u = ln σ².
pub fn univariate_marginal_by_quadrature(stats: &GaussianSuffStats, delta: f64, phi: f64) -> f64 {
    let (nobs, s) = (stats.count as f64, stats.scatter[(0, 0)]);
    let ln_prior_norm = delta / 2.0 * (phi / 2.0).ln() - ln_gamma(delta / 2.0);
    let h = 1e-3;
    let mut sum = 0.0;
    for i in 0..30_000 {
        let u = -12.0 + i as f64 * h;
        let x = u.exp();
        let ln_prior = ln_prior_norm - (delta / 2.0 + 1.0) * u - phi / (2.0 * x);
        let ln_lik = -nobs / 2.0 * (2.0 * PI * x).ln() - s / (2.0 * x);
        sum += (ln_prior + ln_lik + u).exp() * h;
    }
    sum.ln()
}

/// Two-variable marginal for three observations, δ = 3 and Φ = I, by trapezoid
/// integration over (ln σ11, ln σ22, atanh ρ).
pub fn bivariate_marginal_by_quadrature(stats: &GaussianSuffStats) -> f64 {
    assert_eq!((stats.count, stats.dim()), (3, 2));
    let s = &stats.scatter;
    // IW with ν = δ + p − 1 = 4 and Ψ = I: normaliser 1 / (2^{νp/2} Γ₂(2)), Γ₂(2) = π/2
    let nu = 4.0;
    let ln_norm = -(nu * 2.0 / 2.0) * 2f64.ln() - (PI / 2.0).ln();
    let (lo, hi, steps) = (-9.0, 9.0, 180);
    let hu = (hi - lo) / steps as f64;
    let hz = 12.0 / steps as f64;
    let w = |k: usize| if k == 0 || k == steps { 0.5 } else { 1.0 };
    let mut total = 0.0;
    for a in 0..=steps {
        let u1 = lo + a as f64 * hu;
        for b in 0..=steps {
            let u2 = lo + b as f64 * hu;
            for c in 0..=steps {
                let z = -6.0 + c as f64 * hz;
                let rho = z.tanh();
                let (s11, s22) = (u1.exp(), u2.exp());
                let s12 = rho * (0.5 * (u1 + u2)).exp();
                let det = s11 * s22 - s12 * s12;
                // Σ^{-1} = [[s22, −s12], [−s12, s11]] / det
                let tr_psi = (s22 + s11) / det;
                let tr_s = (s[(0, 0)] * s22 - 2.0 * s[(0, 1)] * s12 + s[(1, 1)] * s11) / det;
                let ln_prior = ln_norm - (nu + 3.0) / 2.0 * det.ln() - 0.5 * tr_psi;
                let ln_lik = -3.0 * (2.0 * PI).ln() - 1.5 * det.ln() - 0.5 * tr_s;
                let ln_jac = u1 + u2 + 0.5 * (u1 + u2) + (1.0 - rho * rho).ln();
                total += w(a) * w(b) * w(c) * (ln_prior + ln_lik + ln_jac).exp();
            }
        }
    }
    (total * hu * hu * hz).ln()
}
