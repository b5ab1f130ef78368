//! Experiment workbench behind the `decograph` binary.
//!
//! Each command reads an [`ExperimentConfig`], writes its artifacts into the output
//! directory and returns a short human-readable report. All randomness comes from
//! the configured seed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chordal::clique_decomposition;
use crate::config::{fit_initial_graph, ExperimentConfig};
use crate::error::Error;
use crate::io::{self, Dataset};
use crate::likelihood::{suff_stats, GaussianSuffStats, HiwParams};
use crate::mcmc::{
    self, bma_log_predictive, diagnostics, exact_posterior, BmaReport, ChainSummary, InitialGraph, Sampler, Target,
};

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("size limit: {0}")]
    SizeLimit(String),
    #[error("no fit found: {0}")]
    NoFit(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] Error),
}

impl WorkbenchError {
    /// Process exit code: 2 config, 3 data, 4 size limit, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            WorkbenchError::Config(_) | WorkbenchError::NoFit(_) => 2,
            WorkbenchError::Data(_) => 3,
            WorkbenchError::SizeLimit(_) => 4,
            WorkbenchError::Io(_) => 1,
            WorkbenchError::Model(e) => match e {
                Error::TooLarge { .. } | Error::InvalidVertexCount(_) => 4,
                Error::InvalidSpec(_) | Error::InvalidParams(_) => 2,
                Error::EmptyData | Error::NonFinite { .. } | Error::DimensionMismatch(..) | Error::SingularScale(_) => {
                    3
                }
                _ => 1,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    SamplePrior,
    Fit,
    Predict,
    Enumerate,
    Summarize,
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub chains: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), WorkbenchError> {
        if let Some(seed) = self.seed {
            cfg.chain.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(k) = self.chains {
            if k == 0 {
                return Err(WorkbenchError::Config("--chains must be at least 1".into()));
            }
            cfg.chains = k;
        }
        Ok(())
    }
}

/// Loads the config, applies overrides and runs one command.
pub fn run(command: Command, config_path: &Path, overrides: &Overrides) -> Result<String, WorkbenchError> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    overrides.apply(&mut cfg)?;
    match command {
        Command::SamplePrior => cmd_sample_prior(&cfg),
        Command::Fit => cmd_fit(&cfg),
        Command::Predict => cmd_predict(&cfg),
        Command::Enumerate => cmd_enumerate(&cfg),
        Command::Summarize => cmd_summarize(&cfg),
    }
}

/// What `fit` leaves behind for `predict` and `summarize`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub variables: Vec<String>,
    /// 0-based, half-open training rows.
    pub train_rows: (usize, usize),
    pub hiw_delta: f64,
    pub hiw_tau: f64,
    pub summary: ChainSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictRecord {
    pub test_rows: (usize, usize),
    #[serde(flatten)]
    pub report: BmaReport,
}

fn ensure_dir(dir: &Path) -> Result<(), WorkbenchError> {
    fs::create_dir_all(dir).map_err(|e| WorkbenchError::Io(format!("{}: {e}", dir.display())))
}

struct LoadedData {
    dataset: Dataset,
    train: (usize, usize),
    test: (usize, usize),
}

fn load_data(cfg: &ExperimentConfig) -> Result<Option<LoadedData>, WorkbenchError> {
    let Some(data) = &cfg.data else { return Ok(None) };
    let dataset = io::read_dataset(&data.path)?;
    let (train, test) = data.split.resolve(dataset.rows())?;
    Ok(Some(LoadedData { dataset, train, test }))
}

fn require_data(cfg: &ExperimentConfig) -> Result<LoadedData, WorkbenchError> {
    load_data(cfg)?.ok_or_else(|| WorkbenchError::Config("data.path is required for this command".into()))
}

fn stats_of(data: &LoadedData, range: (usize, usize)) -> Result<GaussianSuffStats, WorkbenchError> {
    if range.1 == range.0 {
        return Ok(GaussianSuffStats::empty(data.dataset.names.len()));
    }
    suff_stats(&data.dataset.slice(range.0, range.1)).map_err(|e| WorkbenchError::Data(e.to_string()))
}

fn hiw_for(cfg: &ExperimentConfig, train: &GaussianSuffStats) -> Result<HiwParams, WorkbenchError> {
    let tau = match cfg.hiw_tau {
        Some(t) => t,
        None => HiwParams::default_for(train)?.phi[(0, 0)],
    };
    Ok(HiwParams::isotropic(train.dim(), cfg.hiw_delta, tau)?)
}

fn chain_config(cfg: &ExperimentConfig, n: usize, target: Target) -> Result<mcmc::ChainConfig, WorkbenchError> {
    let mut chain = cfg.chain.clone();
    chain.target = target;
    if let InitialGraph::Given(g) = &chain.initial_graph {
        chain.initial_graph = InitialGraph::Given(fit_initial_graph(g, n)?);
    }
    Ok(chain)
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

fn check_vertex_count(n: usize) -> Result<(), WorkbenchError> {
    if n > crate::graph::MAX_VERTICES {
        return Err(WorkbenchError::SizeLimit(format!("{n} variables exceed the limit of 64")));
    }
    Ok(())
}

/// Samples from the prior alone; writes one DOT file per retained sample, the
/// clique/separator size histogram, the trace and the edge marginals.
pub fn cmd_sample_prior(cfg: &ExperimentConfig) -> Result<String, WorkbenchError> {
    let names = match (cfg.graph_n, &cfg.data) {
        (Some(n), _) => default_names(n),
        (None, Some(_)) => require_data(cfg)?.dataset.names,
        (None, None) => return Err(WorkbenchError::Config("graph.n or data.path is required".into())),
    };
    let n = names.len();
    check_vertex_count(n)?;
    let mut chain = chain_config(cfg, n, Target::PriorOnly)?;
    chain.record_graphs = true;
    let prior = cfg.prior.clone();
    let summary = mcmc::run_chains(&chain, || Sampler::prior_only(prior.clone(), n), cfg.chains)?;

    let samples_dir = cfg.out_dir.join("samples");
    ensure_dir(&samples_dir)?;
    let mut decompositions = Vec::with_capacity(summary.kept_graphs.len());
    for (g, t) in summary.kept_graphs.iter().zip(&summary.traces) {
        let file = samples_dir.join(format!("sample_{}_{:010}.dot", t.chain, t.iteration));
        io::write_file(&file, &io::to_dot(g, &names))?;
        decompositions.push(clique_decomposition(g)?);
    }
    io::write_file(&cfg.out_dir.join("size_histogram.csv"), &io::size_histogram_csv(&decompositions, n))?;
    io::write_file(&cfg.out_dir.join("trace.csv"), &io::trace_csv(&summary.traces))?;
    io::write_file(&cfg.out_dir.join("edge_marginals.csv"), &io::matrix_csv(&names, &summary.edge_marginals))?;
    let diag = diagnostics(&summary);
    io::write_file(&cfg.out_dir.join("diagnostics.json"), &io::to_json(&diag))?;
    Ok(format!(
        "sample-prior: {} prior, n={n}, kept {} samples, acceptance {:.4}\nmean n_c {:.4}, mean n_s {:.4}, mean edges {:.4}\n",
        cfg.prior.family_name(),
        summary.kept,
        summary.acceptance_rate,
        diag.n_c.mean,
        diag.n_s.mean,
        diag.r.mean
    ))
}

/// Runs the posterior chain on the training rows.
pub fn cmd_fit(cfg: &ExperimentConfig) -> Result<String, WorkbenchError> {
    let data = require_data(cfg)?;
    let n = data.dataset.names.len();
    check_vertex_count(n)?;
    let train_len = data.train.1 - data.train.0;
    if train_len < 2 {
        return Err(WorkbenchError::Data(format!("need at least 2 training rows, got {train_len}")));
    }
    let train = stats_of(&data, data.train)?;
    let hp = hiw_for(cfg, &train)?;
    let chain = chain_config(cfg, n, Target::Posterior)?;
    let prior = cfg.prior.clone();
    let summary =
        mcmc::run_chains(&chain, || Sampler::posterior(prior.clone(), train.clone(), hp.clone()), cfg.chains)?;

    ensure_dir(&cfg.out_dir)?;
    let names = &data.dataset.names;
    io::write_file(&cfg.out_dir.join("edge_marginals.csv"), &io::matrix_csv(names, &summary.edge_marginals))?;
    io::write_file(&cfg.out_dir.join("trace.csv"), &io::trace_csv(&summary.traces))?;
    for (rank, w) in summary.top_graphs.iter().take(cfg.top_dot).enumerate() {
        io::write_file(&cfg.out_dir.join(format!("top_{:03}.dot", rank + 1)), &io::to_dot(&w.graph, names))?;
    }
    let top4: f64 = summary.samples.iter().take(4).map(|w| w.frequency).sum();
    let report = format!(
        "fit: {} prior, n={n}, {} training rows, kept {} samples, acceptance {:.4}, top-4 mass {:.4}\n",
        cfg.prior.family_name(),
        train_len,
        summary.kept,
        summary.acceptance_rate,
        top4
    );
    let record = FitRecord {
        variables: names.clone(),
        train_rows: data.train,
        hiw_delta: hp.delta,
        hiw_tau: hp.phi[(0, 0)],
        summary,
    };
    io::write_file(&cfg.out_dir.join(SUMMARY_FILE), &io::to_json(&record))?;
    Ok(report)
}

fn read_fit(cfg: &ExperimentConfig) -> Result<FitRecord, WorkbenchError> {
    let path = cfg.out_dir.join(SUMMARY_FILE);
    let text = fs::read_to_string(&path).map_err(|e| WorkbenchError::NoFit(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| WorkbenchError::NoFit(format!("{}: unreadable fit summary: {e}", path.display())))
}

/// Model-averaged predictive density of the test rows under the fitted samples.
pub fn cmd_predict(cfg: &ExperimentConfig) -> Result<String, WorkbenchError> {
    let fit = read_fit(cfg)?;
    let data = require_data(cfg)?;
    if data.test.1 == data.test.0 {
        return Err(WorkbenchError::Config("test split is empty; set data.train_fraction or data.test_rows".into()));
    }
    if data.dataset.names != fit.variables {
        return Err(WorkbenchError::Data("data columns differ from the fitted variables".into()));
    }
    if data.train != fit.train_rows {
        return Err(WorkbenchError::Config(format!(
            "training rows {:?} differ from those used by fit {:?}",
            data.train, fit.train_rows
        )));
    }
    let train = stats_of(&data, data.train)?;
    let test = stats_of(&data, data.test)?;
    let hp = HiwParams::isotropic(train.dim(), fit.hiw_delta, fit.hiw_tau)?;
    let report = bma_log_predictive(&fit.summary.weighted_graphs(), &train, &test, &hp)?;
    let record = PredictRecord { test_rows: data.test, report };
    ensure_dir(&cfg.out_dir)?;
    io::write_file(&cfg.out_dir.join("predict.json"), &io::to_json(&record))?;
    Ok(format!(
        "predict: {} test rows\nBMA log predictive {:.6}\nmean per-sample log predictive {:.6}\naverage edge count {:.4}\n",
        data.test.1 - data.test.0,
        record.report.bma_log_predictive,
        record.report.mean_log_predictive,
        record.report.mean_edge_count
    ))
}

/// Writes the exact normalized distribution over every decomposable graph.
pub fn cmd_enumerate(cfg: &ExperimentConfig) -> Result<String, WorkbenchError> {
    let data = if cfg.enumerate_use_data { load_data(cfg)? } else { None };
    let n = match (cfg.enumerate_n, &data, cfg.graph_n) {
        (Some(n), _, _) => n,
        (None, Some(d), _) => d.dataset.names.len(),
        (None, None, Some(n)) => n,
        _ => return Err(WorkbenchError::Config("enumerate.n, graph.n or data.path is required".into())),
    };
    let limit = if data.is_some() { 5 } else { 6 };
    if n == 0 || n > limit {
        return Err(WorkbenchError::SizeLimit(format!("enumeration supports 1 <= n <= {limit}, got {n}")));
    }
    let entries = match &data {
        Some(d) => {
            if d.dataset.names.len() != n {
                return Err(WorkbenchError::Config(format!(
                    "enumerate.n = {n} but the data has {} variables",
                    d.dataset.names.len()
                )));
            }
            let train = stats_of(d, d.train)?;
            let hp = hiw_for(cfg, &train)?;
            exact_posterior(n, &cfg.prior, Some((&train, &hp)))?
        }
        None => exact_posterior(n, &cfg.prior, None)?,
    };
    ensure_dir(&cfg.out_dir)?;
    io::write_file(&cfg.out_dir.join("enumerate.csv"), &io::exact_csv(&entries))?;
    let target = if data.is_some() { "posterior" } else { "prior" };
    Ok(format!("enumerate: {} decomposable graphs on n={n}, exact {target}\n", entries.len()))
}

/// Diagnostics of a completed fit.
pub fn cmd_summarize(cfg: &ExperimentConfig) -> Result<String, WorkbenchError> {
    let fit = read_fit(cfg)?;
    let d = diagnostics(&fit.summary);
    io::write_file(&cfg.out_dir.join("diagnostics.json"), &io::to_json(&d))?;
    let mut out = format!(
        "summarize: {} prior, n={}, chains {}, kept {}, distinct graphs {}\n\
         acceptance {:.4}, top-4 mass {:.4}\n\
         n_c mean {:.4} var {:.4}; n_s mean {:.4} var {:.4}; edges mean {:.4} var {:.4}\n",
        fit.summary.prior.family_name(),
        fit.summary.n,
        fit.summary.chains,
        d.kept,
        d.distinct_graphs,
        d.acceptance_rate,
        d.top4_mass,
        d.n_c.mean,
        d.n_c.variance,
        d.n_s.mean,
        d.n_s.variance,
        d.r.mean,
        d.r.variance
    );
    for (rank, w) in fit.summary.top_graphs.iter().take(4).enumerate() {
        out.push_str(&format!("#{} {:.4} [{}]\n", rank + 1, w.frequency, w.graph));
    }
    Ok(out)
}
