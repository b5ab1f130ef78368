//! Bayesian structure learning for decomposable Gaussian graphical models.
//!
//! The crate covers the whole pipeline:
//!
//! * [`graph`] and [`chordal`]: labeled graphs, decomposability testing by maximum
//!   cardinality search, and clique/separator decompositions in a perfect ordering.
//! * [`prior`]: prior mass over decomposable graphs. Edge-count priors (uniform,
//!   binomial, beta-binomial) sit next to cohesion priors that score cliques and
//!   separators, including the product graphical model prior
//!   `π(G) ∝ a^{n_c} b^{n_s} Π(|C|-1)! / Π(|S|-1)!` and its two extensions.
//! * [`likelihood`]: the hyper-inverse Wishart marginal likelihood and held-out
//!   predictive densities.
//! * [`mcmc`]: a Metropolis–Hastings sampler (pair flips plus optional clique
//!   merge/split moves), exact enumeration for small graphs, and model-averaged
//!   prediction.
//! * [`config`], [`io`] and [`cli`]: the experiment workbench behind the
//!   `decograph` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons reject NaN

pub mod chordal;
pub mod cli;
pub mod config;
pub mod error;
pub mod graph;
pub mod io;
pub mod likelihood;
pub mod mcmc;
pub mod prior;
pub mod special;

pub use chordal::{
    brute_force_chordal, clique_decomposition, edge_flip_legal, enumerate_decomposable_graphs, is_decomposable,
    CliqueDecomposition, EdgeFlipProposal, FlipAction,
};
pub use error::{Error, Result};
pub use graph::{LabeledGraph, VertexSet};
pub use likelihood::{
    log_component_marginal, log_marginal_likelihood, log_predictive, log_sublikelihood, suff_stats, GaussianSuffStats,
    HiwParams,
};
pub use mcmc::{
    bma_log_predictive, diagnostics, exact_posterior, run_chain, run_chains, ChainConfig, ChainState, ChainSummary,
    InitialGraph, Sampler, Target,
};
pub use prior::{crp_clique_count_pmf, log_prior, log_prior_ratio, west_update_concentration, CrpReference, PriorSpec};
