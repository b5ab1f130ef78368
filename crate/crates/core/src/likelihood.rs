//! Gaussian marginal likelihood under a hyper-inverse Wishart prior.
//!
//! Data are centered by the sample mean and modelled as zero-mean thereafter. For a
//! decomposable graph the marginal likelihood factorizes as the product of clique
//! marginals divided by the product of non-empty separator marginals, each an
//! inverse-Wishart integral in closed form.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::chordal::CliqueDecomposition;
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::special::log_multivariate_gamma;

/// Observation count, means and centered scatter matrix of a data sample.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSuffStats {
    pub count: usize,
    pub mean: DVector<f64>,
    pub scatter: DMatrix<f64>,
}

impl GaussianSuffStats {
    /// Statistics of a sample with no observations.
    pub fn empty(n: usize) -> Self {
        GaussianSuffStats { count: 0, mean: DVector::zeros(n), scatter: DMatrix::zeros(n, n) }
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Statistics of the concatenation of two samples.
    pub fn pooled(&self, other: &GaussianSuffStats) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        if self.count == 0 {
            return Ok(other.clone());
        }
        if other.count == 0 {
            return Ok(self.clone());
        }
        let (n1, n2) = (self.count as f64, other.count as f64);
        let total = n1 + n2;
        let diff = &self.mean - &other.mean;
        let mean = (&self.mean * n1 + &other.mean * n2) / total;
        let scatter = &self.scatter + &other.scatter + (&diff * diff.transpose()) * (n1 * n2 / total);
        Ok(GaussianSuffStats { count: self.count + other.count, mean, scatter })
    }

    /// Per-variable sample variances `S_ii / (N - 1)`.
    pub fn sample_variances(&self) -> DVector<f64> {
        let denom = self.count.saturating_sub(1).max(1) as f64;
        self.scatter.diagonal() / denom
    }
}

/// Mean and centered scatter of an `N × n` data matrix (rows are observations).
pub fn suff_stats(data: &DMatrix<f64>) -> Result<GaussianSuffStats> {
    let (rows, cols) = data.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyData);
    }
    for c in 0..cols {
        for r in 0..rows {
            if !data[(r, c)].is_finite() {
                return Err(Error::NonFinite { row: r + 1, col: c + 1 });
            }
        }
    }
    let mean: DVector<f64> = data.row_mean().transpose();
    let mut centered = data.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let scatter = centered.transpose() * &centered;
    Ok(GaussianSuffStats { count: rows, mean, scatter })
}

/// Hyper-inverse Wishart hyperparameters: degrees of freedom `delta` and scale `phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct HiwParams {
    pub delta: f64,
    pub phi: DMatrix<f64>,
}

impl HiwParams {
    pub fn new(delta: f64, phi: DMatrix<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParams(format!("hiw.delta must be positive, got {delta}")));
        }
        if phi.nrows() != phi.ncols() || phi.clone().cholesky().is_none() {
            return Err(Error::InvalidParams("hiw scale matrix must be symmetric positive definite".into()));
        }
        Ok(HiwParams { delta, phi })
    }

    /// `phi = tau · I`.
    pub fn isotropic(n: usize, delta: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParams(format!("hiw.tau must be positive, got {tau}")));
        }
        Self::new(delta, DMatrix::identity(n, n) * tau)
    }

    /// Default hyperparameters: `delta = 3` and `tau` the mean per-variable sample
    /// variance (1 when that is not positive).
    pub fn default_for(stats: &GaussianSuffStats) -> Result<Self> {
        let tau = stats.sample_variances().mean();
        let tau = if tau > 0.0 && tau.is_finite() { tau } else { 1.0 };
        Self::isotropic(stats.dim(), 3.0, tau)
    }
}

fn submatrix(m: &DMatrix<f64>, set: VertexSet) -> DMatrix<f64> {
    let idx = set.to_vec();
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

fn ln_det_spd(m: DMatrix<f64>) -> Option<f64> {
    let chol = m.cholesky()?;
    let ln_det = 2.0 * chol.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    ln_det.is_finite().then_some(ln_det)
}

/// Log marginal likelihood of the variables in `set` with their covariance integrated
/// against an inverse Wishart with `delta` degrees of freedom and scale `phi_B`.
pub fn log_component_marginal(set: VertexSet, stats: &GaussianSuffStats, hp: &HiwParams) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::InvalidParams("component vertex set must be non-empty".into()));
    }
    if stats.dim() != hp.phi.nrows() {
        return Err(Error::DimensionMismatch(stats.dim(), hp.phi.nrows()));
    }
    if stats.count == 0 {
        return Ok(0.0);
    }
    let p = set.len();
    let pf = p as f64;
    let nobs = stats.count as f64;
    let phi_b = submatrix(&hp.phi, set);
    let post_b = &phi_b + submatrix(&stats.scatter, set);
    let singular = || Error::SingularScale(format!("{set:?}"));
    let ln_det_prior = ln_det_spd(phi_b).ok_or_else(singular)?;
    let ln_det_post = ln_det_spd(post_b).ok_or_else(singular)?;
    let prior_shape = (hp.delta + pf - 1.0) / 2.0;
    let post_shape = (hp.delta + nobs + pf - 1.0) / 2.0;
    Ok(-(nobs * pf / 2.0) * PI.ln() + log_multivariate_gamma(p, post_shape)? - log_multivariate_gamma(p, prior_shape)?
        + prior_shape * ln_det_prior
        - post_shape * ln_det_post)
}

/// Clique marginals over non-empty separator marginals.
pub fn log_marginal_likelihood(d: &CliqueDecomposition, stats: &GaussianSuffStats, hp: &HiwParams) -> Result<f64> {
    let mut total = 0.0;
    for &c in d.cliques() {
        total += log_component_marginal(c, stats, hp)?;
    }
    for s in d.nonempty_separators() {
        total -= log_component_marginal(s, stats, hp)?;
    }
    Ok(total)
}

/// Gaussian log density of the centered sample restricted to `set` under `N(0, sigma)`.
pub fn log_sublikelihood(set: VertexSet, sigma: &DMatrix<f64>, stats: &GaussianSuffStats) -> Result<f64> {
    let p = set.len();
    if sigma.nrows() != p || sigma.ncols() != p {
        return Err(Error::DimensionMismatch(sigma.nrows(), p));
    }
    let chol = sigma.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let ln_det = 2.0 * chol.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    let s_b = submatrix(&stats.scatter, set);
    let trace = (chol.inverse() * s_b).trace();
    let nobs = stats.count as f64;
    Ok(-(nobs * p as f64 / 2.0) * (2.0 * PI).ln() - nobs / 2.0 * ln_det - 0.5 * trace)
}

/// `log p(test | G, train)` as the difference of pooled and training marginals.
pub fn log_predictive(
    d: &CliqueDecomposition,
    train: &GaussianSuffStats,
    test: &GaussianSuffStats,
    hp: &HiwParams,
) -> Result<f64> {
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch(train.dim(), test.dim()));
    }
    if test.count == 0 {
        return Ok(0.0);
    }
    let pooled = train.pooled(test)?;
    Ok(log_marginal_likelihood(d, &pooled, hp)? - log_marginal_likelihood(d, train, hp)?)
}

/// Component marginals memoized by vertex set. One scorer belongs to one chain.
#[derive(Clone, Debug)]
pub struct MarginalScorer {
    stats: GaussianSuffStats,
    hp: HiwParams,
    cache: HashMap<VertexSet, f64>,
}

impl MarginalScorer {
    pub fn new(stats: GaussianSuffStats, hp: HiwParams) -> Result<Self> {
        if stats.dim() != hp.phi.nrows() {
            return Err(Error::DimensionMismatch(stats.dim(), hp.phi.nrows()));
        }
        Ok(MarginalScorer { stats, hp, cache: HashMap::new() })
    }

    pub fn stats(&self) -> &GaussianSuffStats {
        &self.stats
    }

    pub fn hp(&self) -> &HiwParams {
        &self.hp
    }

    pub fn component(&mut self, set: VertexSet) -> Result<f64> {
        if let Some(&v) = self.cache.get(&set) {
            return Ok(v);
        }
        let v = log_component_marginal(set, &self.stats, &self.hp)?;
        self.cache.insert(set, v);
        Ok(v)
    }

    pub fn log_ml(&mut self, d: &CliqueDecomposition) -> Result<f64> {
        let mut total = 0.0;
        for &c in d.cliques() {
            total += self.component(c)?;
        }
        for s in d.nonempty_separators() {
            total -= self.component(s)?;
        }
        Ok(total)
    }

    /// `log_ml(new) - log_ml(old)`, summing only components that differ between
    /// the clique and separator multisets of the two decompositions.
    pub fn log_ml_delta(&mut self, old: &CliqueDecomposition, new: &CliqueDecomposition) -> Result<f64> {
        let (added_c, removed_c) = multiset_difference(new.cliques().iter().copied(), old.cliques().iter().copied());
        let (added_s, removed_s) = multiset_difference(new.nonempty_separators(), old.nonempty_separators());
        let mut delta = 0.0;
        for c in added_c {
            delta += self.component(c)?;
        }
        for c in removed_c {
            delta -= self.component(c)?;
        }
        for s in added_s {
            delta -= self.component(s)?;
        }
        for s in removed_s {
            delta += self.component(s)?;
        }
        Ok(delta)
    }
}

// Elements of `a` not matched in `b`, and of `b` not matched in `a`.
fn multiset_difference(
    a: impl Iterator<Item = VertexSet>,
    b: impl Iterator<Item = VertexSet>,
) -> (Vec<VertexSet>, Vec<VertexSet>) {
    let mut a: Vec<_> = a.collect();
    let mut b: Vec<_> = b.collect();
    a.sort_unstable();
    b.sort_unstable();
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                only_a.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                only_b.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    only_a.extend_from_slice(&a[i..]);
    only_b.extend_from_slice(&b[j..]);
    (only_a, only_b)
}
