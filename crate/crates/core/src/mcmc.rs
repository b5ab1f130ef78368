//! Metropolis–Hastings over decomposable graphs.
//!
//! Each step proposes toggling one vertex pair drawn uniformly from all `n(n-1)/2`
//! pairs. Proposals that leave the decomposable class count as rejections, so the
//! proposal is symmetric and the acceptance ratio is the target ratio.
//!
//! An optional second kernel merges two isolated cliques into one or splits an
//! isolated clique in two. It is mixed in with probability `merge_split` per step
//! and carries its own Hastings correction.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chordal::{clique_decomposition, enumerate_decomposable_graphs, CliqueDecomposition};
use crate::error::{Error, Result};
use crate::graph::{pair_from_index, LabeledGraph, VertexSet};
use crate::likelihood::{log_marginal_likelihood, log_predictive, GaussianSuffStats, HiwParams, MarginalScorer};
use crate::prior::{log_prior_unchecked, PriorSpec};
use crate::special::log_sum_exp;

/// Steps between from-scratch recomputations of the cached scores.
pub const DRIFT_CHECK_INTERVAL: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    PriorOnly,
    Posterior,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialGraph {
    Empty,
    Complete,
    Given(LabeledGraph),
}

#[derive(Clone, Debug)]
pub struct ChainConfig {
    pub iterations: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub seed: u64,
    pub target: Target,
    pub initial_graph: InitialGraph,
    /// Number of most frequent graphs reported in `top_graphs`.
    pub top_k: usize,
    /// Keep every retained graph in order in `kept_graphs`.
    pub record_graphs: bool,
    /// Per-step probability of a clique merge/split move instead of a pair flip.
    pub merge_split: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            iterations: 10_000,
            burn_in: 1_000,
            thin: 1,
            seed: 0,
            target: Target::PriorOnly,
            initial_graph: InitialGraph::Empty,
            top_k: 100,
            record_graphs: false,
            merge_split: 0.0,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParams("chain.iterations must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidParams(format!(
                "chain.burn_in ({}) must be less than chain.iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidParams("chain.thin must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.merge_split) {
            return Err(Error::InvalidParams(format!(
                "chain.merge_split must lie in [0, 1], got {}",
                self.merge_split
            )));
        }
        Ok(())
    }

    /// Whether the state after step `t` (1-based) is retained.
    pub fn keeps(&self, t: u64) -> bool {
        t > self.burn_in && (t - self.burn_in).is_multiple_of(self.thin)
    }
}

/// Current graph with its decomposition and cached scores.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub graph: LabeledGraph,
    pub decomposition: CliqueDecomposition,
    pub log_prior: f64,
    /// Zero when targeting the prior alone.
    pub log_ml: f64,
    pub accept_count: u64,
    pub step_count: u64,
}

impl ChainState {
    pub fn log_target(&self) -> f64 {
        self.log_prior + self.log_ml
    }
}

/// The target density: a prior, optionally multiplied by the marginal likelihood.
pub struct Sampler {
    spec: PriorSpec,
    scorer: Option<MarginalScorer>,
    n: usize,
}

impl Sampler {
    pub fn prior_only(spec: PriorSpec, n: usize) -> Result<Self> {
        spec.validate()?;
        LabeledGraph::empty(n)?;
        Ok(Sampler { spec, scorer: None, n })
    }

    pub fn posterior(spec: PriorSpec, stats: GaussianSuffStats, hp: HiwParams) -> Result<Self> {
        spec.validate()?;
        let n = stats.dim();
        LabeledGraph::empty(n)?;
        Ok(Sampler { spec, scorer: Some(MarginalScorer::new(stats, hp)?), n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> &PriorSpec {
        &self.spec
    }

    pub fn init(&mut self, graph: LabeledGraph) -> Result<ChainState> {
        if graph.n() != self.n {
            return Err(Error::SizeMismatch(self.n, graph.n()));
        }
        let decomposition = clique_decomposition(&graph)?;
        let (log_prior, log_ml) = self.score(&graph, &decomposition)?;
        if log_prior == f64::NEG_INFINITY {
            return Err(Error::InvalidParams("initial graph has zero prior mass".into()));
        }
        Ok(ChainState { graph, decomposition, log_prior, log_ml, accept_count: 0, step_count: 0 })
    }

    /// Scores from scratch, bypassing the incremental path.
    pub fn score(&mut self, g: &LabeledGraph, d: &CliqueDecomposition) -> Result<(f64, f64)> {
        let lp = log_prior_unchecked(&self.spec, g, d)?;
        let lml = match &self.scorer {
            Some(s) => log_marginal_likelihood(d, s.stats(), s.hp())?,
            None => 0.0,
        };
        Ok((lp, lml))
    }

    /// One Metropolis–Hastings step. Returns whether the proposal was accepted.
    pub fn mh_step<R: Rng + ?Sized>(&mut self, state: &mut ChainState, rng: &mut R) -> Result<bool> {
        state.step_count += 1;
        let m = self.n * (self.n - 1) / 2;
        if m == 0 {
            return Ok(false);
        }
        let (i, j) = pair_from_index(self.n, rng.random_range(0..m));
        let proposal = state.graph.flipped(i, j);
        let decomposition = match clique_decomposition(&proposal) {
            Ok(d) => d,
            Err(Error::NotDecomposable) => return Ok(false),
            Err(e) => return Err(e),
        };
        let new_prior = log_prior_unchecked(&self.spec, &proposal, &decomposition)?;
        if new_prior == f64::NEG_INFINITY {
            return Ok(false);
        }
        let ml_delta = match &mut self.scorer {
            Some(s) => s.log_ml_delta(&state.decomposition, &decomposition)?,
            None => 0.0,
        };
        self.accept(state, proposal, decomposition, new_prior, ml_delta, 0.0, rng)
    }

    /// One merge/split step on the isolated cliques (complete connected components).
    ///
    /// With probability one half, two isolated cliques are joined into one; otherwise
    /// an isolated clique with at least two vertices is cut along a uniformly chosen
    /// bipartition. Each move is the exact inverse of the other.
    pub fn merge_split_step<R: Rng + ?Sized>(&mut self, state: &mut ChainState, rng: &mut R) -> Result<bool> {
        state.step_count += 1;
        let isolated = isolated_cliques(&state.graph);
        let splittable = isolated.iter().filter(|c| c.len() >= 2).count();
        let mut proposal = state.graph.clone();
        let log_q_ratio = if rng.random::<bool>() {
            let m = isolated.len();
            if m < 2 {
                return Ok(false);
            }
            let (i, j) = pair_from_index(m, rng.random_range(0..m * (m - 1) / 2));
            let (a, b) = (isolated[i], isolated[j]);
            proposal.set_edges_between(a, b, true);
            let splittable_after = splittable + 1 - (a.len() >= 2) as usize - (b.len() >= 2) as usize;
            // reverse: pick the merged clique, then this bipartition; forward: pick the pair
            ln_pairs(m) - (splittable_after as f64).ln() - ln_bipartitions(a.len() + b.len())
        } else {
            if splittable == 0 {
                return Ok(false);
            }
            let c = *isolated.iter().filter(|c| c.len() >= 2).nth(rng.random_range(0..splittable)).unwrap();
            let (a, b) = random_bipartition(c, rng);
            proposal.set_edges_between(a, b, false);
            (splittable as f64).ln() + ln_bipartitions(c.len()) - ln_pairs(isolated.len() + 1)
        };
        let decomposition = clique_decomposition(&proposal)?;
        let new_prior = log_prior_unchecked(&self.spec, &proposal, &decomposition)?;
        if new_prior == f64::NEG_INFINITY {
            return Ok(false);
        }
        let ml_delta = match &mut self.scorer {
            Some(s) => s.log_ml_delta(&state.decomposition, &decomposition)?,
            None => 0.0,
        };
        self.accept(state, proposal, decomposition, new_prior, ml_delta, log_q_ratio, rng)
    }

    #[allow(clippy::too_many_arguments)]
    fn accept<R: Rng + ?Sized>(
        &self,
        state: &mut ChainState,
        proposal: LabeledGraph,
        decomposition: CliqueDecomposition,
        new_prior: f64,
        ml_delta: f64,
        log_q_ratio: f64,
        rng: &mut R,
    ) -> Result<bool> {
        let log_ratio = new_prior - state.log_prior + ml_delta + log_q_ratio;
        let u: f64 = rng.random();
        if log_ratio >= 0.0 || u.ln() < log_ratio {
            state.graph = proposal;
            state.decomposition = decomposition;
            state.log_prior = new_prior;
            state.log_ml += ml_delta;
            state.accept_count += 1;
            Ok(true)
        } else {
            Ok(false)
        }
    }
}

/// Connected components that are complete.
pub fn isolated_cliques(g: &LabeledGraph) -> Vec<VertexSet> {
    g.connected_components().into_iter().filter(|&c| g.is_complete_set(c)).collect()
}

fn ln_pairs(m: usize) -> f64 {
    ((m * (m - 1) / 2) as f64).ln()
}

// log(2^(k-1) - 1), the number of unordered splits of a k-set into two nonempty parts
fn ln_bipartitions(k: usize) -> f64 {
    let e = (k - 1) as i32;
    e as f64 * std::f64::consts::LN_2 + (-(0.5f64).powi(e)).ln_1p()
}

// The smallest vertex stays in the first part, so each unordered split has one encoding.
fn random_bipartition<R: Rng + ?Sized>(c: VertexSet, rng: &mut R) -> (VertexSet, VertexSet) {
    let rest: Vec<usize> = c.iter().skip(1).collect();
    loop {
        let bits: u64 = rng.random();
        let b = VertexSet::from_vertices(rest.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &v)| v));
        if !b.is_empty() {
            return (c.difference(b), b);
        }
    }
}

/// A distinct graph with its retained-sample count and frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub graph: LabeledGraph,
    pub count: u64,
    pub frequency: f64,
}

/// Per-retained-sample record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub chain: usize,
    pub iteration: u64,
    pub n_c: usize,
    pub n_s: usize,
    pub r: usize,
    pub log_prior: f64,
    pub log_ml: f64,
}

impl TraceRecord {
    pub fn log_target(&self) -> f64 {
        self.log_prior + self.log_ml
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub n: usize,
    pub target: Target,
    pub prior: PriorSpec,
    pub chains: usize,
    pub iterations: u64,
    pub kept: u64,
    pub acceptance_rate: f64,
    /// Largest discrepancy seen between cached and recomputed log targets.
    pub max_score_drift: f64,
    pub top_graphs: Vec<WeightedGraph>,
    pub edge_marginals: Vec<Vec<f64>>,
    /// Every distinct retained graph, most frequent first.
    pub samples: Vec<WeightedGraph>,
    pub traces: Vec<TraceRecord>,
    /// Retained graphs in trace order; filled only when `record_graphs` is set.
    #[serde(skip)]
    pub kept_graphs: Vec<LabeledGraph>,
}

impl ChainSummary {
    /// Retained graphs paired with their frequencies.
    pub fn weighted_graphs(&self) -> Vec<(LabeledGraph, f64)> {
        self.samples.iter().map(|w| (w.graph.clone(), w.frequency)).collect()
    }
}

fn initial_graph(cfg: &ChainConfig, n: usize) -> Result<LabeledGraph> {
    match &cfg.initial_graph {
        InitialGraph::Empty => LabeledGraph::empty(n),
        InitialGraph::Complete => LabeledGraph::complete(n),
        InitialGraph::Given(g) => Ok(g.clone()),
    }
}

/// Runs one chain with its own generator.
pub fn run_chain(cfg: &ChainConfig, sampler: &mut Sampler) -> Result<ChainSummary> {
    run_chain_with_rng(cfg, sampler, &mut ChaCha8Rng::seed_from_u64(cfg.seed), 0)
}

/// Runs `chains` independent chains in parallel, chain `k` on stream `k` of the
/// seed's ChaCha8 generator, and merges them with equal weights.
pub fn run_chains(
    cfg: &ChainConfig,
    make_sampler: impl Fn() -> Result<Sampler> + Sync,
    chains: usize,
) -> Result<ChainSummary> {
    if chains <= 1 {
        return run_chain(cfg, &mut make_sampler()?);
    }
    let results: Vec<Result<ChainSummary>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains)
            .map(|k| {
                let make = &make_sampler;
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    rng.set_stream(k as u64);
                    run_chain_with_rng(cfg, &mut make()?, &mut rng, k)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    });
    merge_summaries(results.into_iter().collect::<Result<Vec<_>>>()?, cfg.top_k)
}

fn run_chain_with_rng(
    cfg: &ChainConfig,
    sampler: &mut Sampler,
    rng: &mut ChaCha8Rng,
    chain: usize,
) -> Result<ChainSummary> {
    cfg.validate()?;
    if cfg.target == Target::Posterior && sampler.scorer.is_none() {
        return Err(Error::InvalidParams("posterior target requires data".into()));
    }
    if cfg.target == Target::PriorOnly {
        sampler.scorer = None;
    }
    let n = sampler.n;
    let mut state = sampler.init(initial_graph(cfg, n)?)?;
    let mut tally: HashMap<LabeledGraph, u64> = HashMap::new();
    let mut traces = Vec::new();
    let mut kept_graphs = Vec::new();
    let mut max_drift: f64 = 0.0;
    for t in 1..=cfg.iterations {
        if cfg.merge_split > 0.0 && rng.random::<f64>() < cfg.merge_split {
            sampler.merge_split_step(&mut state, rng)?;
        } else {
            sampler.mh_step(&mut state, rng)?;
        }
        if t % DRIFT_CHECK_INTERVAL == 0 {
            let (lp, lml) = sampler.score(&state.graph, &state.decomposition)?;
            max_drift = max_drift.max((lp + lml - state.log_target()).abs());
            state.log_prior = lp;
            state.log_ml = lml;
        }
        if cfg.keeps(t) {
            *tally.entry(state.graph.clone()).or_insert(0) += 1;
            if cfg.record_graphs {
                kept_graphs.push(state.graph.clone());
            }
            traces.push(TraceRecord {
                chain,
                iteration: t,
                n_c: state.decomposition.clique_count(),
                n_s: state.decomposition.nonempty_separator_count(),
                r: state.graph.edge_count(),
                log_prior: state.log_prior,
                log_ml: state.log_ml,
            });
        }
    }
    let kept = traces.len() as u64;
    let samples = sorted_samples(tally.into_iter().map(|(g, c)| (g, c, c as f64 / kept as f64)));
    Ok(ChainSummary {
        n,
        target: cfg.target,
        prior: sampler.spec.clone(),
        chains: 1,
        iterations: cfg.iterations,
        kept,
        acceptance_rate: state.accept_count as f64 / state.step_count as f64,
        max_score_drift: max_drift,
        top_graphs: samples.iter().take(cfg.top_k).cloned().collect(),
        edge_marginals: edge_marginals(n, &samples),
        samples,
        traces,
        kept_graphs,
    })
}

fn sorted_samples(items: impl Iterator<Item = (LabeledGraph, u64, f64)>) -> Vec<WeightedGraph> {
    let mut samples: Vec<WeightedGraph> =
        items.map(|(graph, count, frequency)| WeightedGraph { graph, count, frequency }).collect();
    samples.sort_by(|a, b| b.frequency.total_cmp(&a.frequency).then_with(|| a.graph.cmp(&b.graph)));
    samples
}

fn edge_marginals(n: usize, samples: &[WeightedGraph]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n]; n];
    for w in samples {
        for (i, j) in w.graph.edges() {
            out[i][j] += w.frequency;
            out[j][i] += w.frequency;
        }
    }
    out
}

/// Combines chains by averaging graph frequencies with equal weights per chain.
pub fn merge_summaries(parts: Vec<ChainSummary>, top_k: usize) -> Result<ChainSummary> {
    let first = parts.first().ok_or(Error::NoSamples)?;
    let (n, target, prior, iterations) = (first.n, first.target, first.prior.clone(), first.iterations);
    let k = parts.len() as f64;
    let mut merged: HashMap<LabeledGraph, (u64, f64)> = HashMap::new();
    let mut traces = Vec::new();
    let mut kept_graphs = Vec::new();
    let mut kept = 0;
    let mut acceptance = 0.0;
    let mut drift: f64 = 0.0;
    let mut chains = 0;
    for (idx, part) in parts.into_iter().enumerate() {
        if part.n != n {
            return Err(Error::SizeMismatch(n, part.n));
        }
        for w in part.samples {
            let e = merged.entry(w.graph).or_insert((0, 0.0));
            e.0 += w.count;
            e.1 += w.frequency / k;
        }
        traces.extend(part.traces.into_iter().map(|mut t| {
            t.chain = idx;
            t
        }));
        kept_graphs.extend(part.kept_graphs);
        kept += part.kept;
        acceptance += part.acceptance_rate / k;
        drift = drift.max(part.max_score_drift);
        chains += part.chains;
    }
    let samples = sorted_samples(merged.into_iter().map(|(g, (c, f))| (g, c, f)));
    Ok(ChainSummary {
        n,
        target,
        prior,
        chains,
        iterations,
        kept,
        acceptance_rate: acceptance,
        max_score_drift: drift,
        top_graphs: samples.iter().take(top_k).cloned().collect(),
        edge_marginals: edge_marginals(n, &samples),
        samples,
        traces,
        kept_graphs,
    })
}

/// One graph of an exhaustively enumerated target.
#[derive(Clone, Debug)]
pub struct ExactEntry {
    pub graph: LabeledGraph,
    pub decomposition: CliqueDecomposition,
    pub log_weight: f64,
    pub probability: f64,
}

/// Exact normalized target over every decomposable graph on `n` vertices. With data
/// the target is the posterior and `n <= 5`; prior-only allows `n <= 6`.
pub fn exact_posterior(
    n: usize,
    spec: &PriorSpec,
    data: Option<(&GaussianSuffStats, &HiwParams)>,
) -> Result<Vec<ExactEntry>> {
    let limit = if data.is_some() { 5 } else { 6 };
    if n > limit {
        return Err(Error::TooLarge { what: "exact enumeration", n, limit });
    }
    spec.validate()?;
    if let Some((stats, _)) = data {
        if stats.dim() != n {
            return Err(Error::DimensionMismatch(n, stats.dim()));
        }
    }
    let mut entries = Vec::new();
    for graph in enumerate_decomposable_graphs(n)? {
        let decomposition = clique_decomposition(&graph)?;
        let mut log_weight = log_prior_unchecked(spec, &graph, &decomposition)?;
        if let Some((stats, hp)) = data {
            if log_weight.is_finite() {
                log_weight += log_marginal_likelihood(&decomposition, stats, hp)?;
            }
        }
        entries.push(ExactEntry { graph, decomposition, log_weight, probability: 0.0 });
    }
    let weights: Vec<f64> = entries.iter().map(|e| e.log_weight).collect();
    let ln_z = log_sum_exp(&weights);
    for e in &mut entries {
        e.probability = (e.log_weight - ln_z).exp();
    }
    Ok(entries)
}

/// Half the L1 distance between the exact law and a chain's empirical law.
pub fn total_variation(exact: &[ExactEntry], summary: &ChainSummary) -> f64 {
    let empirical: HashMap<&LabeledGraph, f64> = summary.samples.iter().map(|w| (&w.graph, w.frequency)).collect();
    let mut covered = 0.0;
    let mut l1 = 0.0;
    for e in exact {
        let f = empirical.get(&e.graph).copied().unwrap_or(0.0);
        covered += f;
        l1 += (e.probability - f).abs();
    }
    // mass on graphs outside the enumeration (none for a correct sampler)
    l1 += (1.0 - covered).max(0.0);
    0.5 * l1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmaReport {
    /// `log Σ_k w_k p(test | G_k, train)`.
    pub bma_log_predictive: f64,
    /// `Σ_k w_k log p(test | G_k, train)`.
    pub mean_log_predictive: f64,
    pub mean_edge_count: f64,
    pub kept_graphs: usize,
}

/// Model-averaged log predictive density of `test` over weighted graph samples.
/// Weights are normalized internally, so raw counts work as well as frequencies.
pub fn bma_log_predictive(
    samples: &[(LabeledGraph, f64)],
    train: &GaussianSuffStats,
    test: &GaussianSuffStats,
    hp: &HiwParams,
) -> Result<BmaReport> {
    let total: f64 = samples.iter().map(|(_, w)| w).sum();
    if samples.is_empty() || !(total > 0.0) {
        return Err(Error::NoSamples);
    }
    let mut terms = Vec::with_capacity(samples.len());
    let mut mean_lp = 0.0;
    let mut mean_r = 0.0;
    for (g, w) in samples {
        let w = w / total;
        let lp = log_predictive(&clique_decomposition(g)?, train, test, hp)?;
        terms.push(w.ln() + lp);
        mean_lp += w * lp;
        mean_r += w * g.edge_count() as f64;
    }
    Ok(BmaReport {
        bma_log_predictive: log_sum_exp(&terms),
        mean_log_predictive: mean_lp,
        mean_edge_count: mean_r,
        kept_graphs: samples.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

fn moments(xs: impl Iterator<Item = f64> + Clone) -> Moments {
    let k = xs.clone().count() as f64;
    if k == 0.0 {
        return Moments { mean: f64::NAN, variance: f64::NAN };
    }
    let mean = xs.clone().sum::<f64>() / k;
    let variance = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / k;
    Moments { mean, variance }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub acceptance_rate: f64,
    pub kept: u64,
    pub distinct_graphs: usize,
    pub n_c: Moments,
    pub n_s: Moments,
    pub r: Moments,
    pub log_target: Moments,
    /// Frequency mass of the four most visited graphs.
    pub top4_mass: f64,
    pub max_score_drift: f64,
}

pub fn diagnostics(summary: &ChainSummary) -> Diagnostics {
    let tr = &summary.traces;
    Diagnostics {
        acceptance_rate: summary.acceptance_rate,
        kept: summary.kept,
        distinct_graphs: summary.samples.len(),
        n_c: moments(tr.iter().map(|t| t.n_c as f64)),
        n_s: moments(tr.iter().map(|t| t.n_s as f64)),
        r: moments(tr.iter().map(|t| t.r as f64)),
        log_target: moments(tr.iter().map(|t| t.log_target())),
        top4_mass: summary.samples.iter().take(4).map(|w| w.frequency).sum(),
        max_score_drift: summary.max_score_drift,
    }
}
