//! Experiment configuration in a flat `key = value` format with dotted section names.
//!
//! ```text
//! # comments start with '#'
//! data.path = yields.csv
//! data.train_rows = 1-12
//! data.test_rows = 13-20
//! prior.family = pgm
//! prior.a = 0.01
//! prior.b = 0.01
//! hiw.delta = 3
//! chain.iterations = 200000
//! chain.burn_in = 20000
//! chain.thin = 100
//! chain.seed = 7
//! output.dir = out
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::cli::WorkbenchError;
use crate::graph::LabeledGraph;
use crate::mcmc::{ChainConfig, InitialGraph, Target};
use crate::prior::PriorSpec;

const KNOWN_KEYS: &[&str] = &[
    "data.path",
    "data.train_fraction",
    "data.train_rows",
    "data.test_rows",
    "graph.n",
    "prior.family",
    "prior.rho",
    "prior.alpha",
    "prior.beta",
    "prior.clique_weights",
    "prior.separator_weights",
    "prior.a",
    "prior.b",
    "prior.a1",
    "prior.a2",
    "prior.b1",
    "prior.b2",
    "prior.c1",
    "prior.c2",
    "prior.d1",
    "prior.d2",
    "hiw.delta",
    "hiw.tau",
    "chain.iterations",
    "chain.burn_in",
    "chain.thin",
    "chain.seed",
    "chain.initial",
    "chain.top_k",
    "chain.chains",
    "chain.merge_split",
    "output.dir",
    "output.top_dot",
    "enumerate.n",
    "enumerate.use_data",
];

/// 0-based, half-open row range.
pub type RowRange = (usize, usize);

/// How data rows split into training and test sets. Rows are 0-based, half open.
#[derive(Clone, Debug, PartialEq)]
pub enum SplitRule {
    /// Leading fraction of rows for training, the rest for testing.
    LeadingFraction(f64),
    /// Explicit 1-based inclusive ranges from the config file.
    Ranges { train: (usize, usize), test: Option<(usize, usize)> },
}

impl SplitRule {
    /// Resolves to `(train, test)` row ranges for a table of `rows` rows. The two
    /// ranges never overlap and together cover every row.
    pub fn resolve(&self, rows: usize) -> Result<(RowRange, RowRange), WorkbenchError> {
        match *self {
            SplitRule::LeadingFraction(f) => {
                let train = ((rows as f64) * f).round() as usize;
                let train = train.clamp(1, rows);
                Ok(((0, train), (train, rows)))
            }
            SplitRule::Ranges { train, test } => {
                let (a, b) = train;
                if a != 1 || b < a || b > rows {
                    return Err(WorkbenchError::Config(format!(
                        "data.train_rows must be a leading range 1-k with k <= {rows}, got {a}-{b}"
                    )));
                }
                match test {
                    None => {
                        if b != rows {
                            return Err(WorkbenchError::Config(format!(
                                "data.test_rows missing but data.train_rows ({a}-{b}) does not cover all {rows} rows"
                            )));
                        }
                        Ok(((0, rows), (rows, rows)))
                    }
                    Some((c, d)) => {
                        if c != b + 1 || d != rows {
                            return Err(WorkbenchError::Config(format!(
                                "data.test_rows must be {}-{rows} so that the split is disjoint and exhaustive, got {c}-{d}",
                                b + 1
                            )));
                        }
                        Ok(((0, b), (b, rows)))
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct DataConfig {
    pub path: PathBuf,
    pub split: SplitRule,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub data: Option<DataConfig>,
    /// Vertex count when no data file is given.
    pub graph_n: Option<usize>,
    pub prior: PriorSpec,
    pub hiw_delta: f64,
    /// `None` selects the mean sample variance of the training data.
    pub hiw_tau: Option<f64>,
    pub chain: ChainConfig,
    pub chains: usize,
    pub out_dir: PathBuf,
    pub top_dot: usize,
    pub enumerate_n: Option<usize>,
    pub enumerate_use_data: bool,
}

fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, WorkbenchError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| WorkbenchError::Config(format!("line {}: expected `key = value`", idx + 1)))?;
        let key = k.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(WorkbenchError::Config(format!("line {}: unknown key `{key}`", idx + 1)));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(WorkbenchError::Config(format!("line {}: duplicate key `{key}`", idx + 1)));
        }
    }
    Ok(map)
}

struct Keys(BTreeMap<String, String>);

impl Keys {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, WorkbenchError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| WorkbenchError::Config(format!("{key}: cannot parse `{v}`"))),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T, WorkbenchError> {
        self.get(key)?.ok_or_else(|| WorkbenchError::Config(format!("{key} is required")))
    }

    fn list(&self, key: &str) -> Result<Vec<f64>, WorkbenchError> {
        let raw = self.0.get(key).ok_or_else(|| WorkbenchError::Config(format!("{key} is required")))?;
        raw.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| WorkbenchError::Config(format!("{key}: cannot parse `{s}`"))))
            .collect()
    }

    fn range(&self, key: &str) -> Result<Option<(usize, usize)>, WorkbenchError> {
        let Some(raw) = self.0.get(key) else { return Ok(None) };
        let bad = || WorkbenchError::Config(format!("{key}: expected a 1-based range like 1-12, got `{raw}`"));
        let (a, b) = raw.split_once('-').ok_or_else(bad)?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a == 0 || b < a {
            return Err(bad());
        }
        Ok(Some((a, b)))
    }
}

fn parse_prior(keys: &Keys) -> Result<PriorSpec, WorkbenchError> {
    let family: String = keys.require("prior.family")?;
    let p = |name: &str| keys.require::<f64>(&format!("prior.{name}"));
    let spec = match family.as_str() {
        "uniform" => PriorSpec::Uniform,
        "binomial" => PriorSpec::Binomial { rho: p("rho")? },
        "beta_binomial" => PriorSpec::BetaBinomial { alpha: p("alpha")?, beta: p("beta")? },
        "cohesion" => PriorSpec::Cohesion {
            clique_weights: keys.list("prior.clique_weights")?,
            separator_weights: keys.list("prior.separator_weights")?,
        },
        "pgm" => PriorSpec::Pgm { a: p("a")?, b: p("b")? },
        "two_param" => PriorSpec::TwoParam { a1: p("a1")?, a2: p("a2")?, b1: p("b1")?, b2: p("b2")? },
        "finite_capacity" => PriorSpec::FiniteCapacity { c1: p("c1")?, c2: p("c2")?, d1: p("d1")?, d2: p("d2")? },
        other => return Err(WorkbenchError::Config(format!("prior.family: unknown family `{other}`"))),
    };
    // validation messages lead with the parameter name
    spec.validate().map_err(|e| match e {
        crate::error::Error::InvalidSpec(msg) => WorkbenchError::Config(format!("prior.{msg}")),
        other => WorkbenchError::Config(other.to_string()),
    })?;
    Ok(spec)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, WorkbenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| WorkbenchError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, WorkbenchError> {
        let keys = Keys(parse_kv(text)?);
        let resolve = |p: String| {
            let p = PathBuf::from(p);
            if p.is_absolute() {
                p
            } else {
                base_dir.join(p)
            }
        };

        let data = match keys.get::<String>("data.path")? {
            None => None,
            Some(p) => {
                let fraction: Option<f64> = keys.get("data.train_fraction")?;
                let train = keys.range("data.train_rows")?;
                let test = keys.range("data.test_rows")?;
                let split = match (fraction, train) {
                    (Some(_), Some(_)) => {
                        return Err(WorkbenchError::Config(
                            "data.train_fraction and data.train_rows are mutually exclusive".into(),
                        ))
                    }
                    (Some(f), None) => {
                        if test.is_some() {
                            return Err(WorkbenchError::Config(
                                "data.test_rows requires data.train_rows, not data.train_fraction".into(),
                            ));
                        }
                        if !(f > 0.0 && f <= 1.0) {
                            return Err(WorkbenchError::Config(format!(
                                "data.train_fraction must lie in (0, 1], got {f}"
                            )));
                        }
                        SplitRule::LeadingFraction(f)
                    }
                    (None, Some(train)) => SplitRule::Ranges { train, test },
                    (None, None) => {
                        if test.is_some() {
                            return Err(WorkbenchError::Config("data.test_rows requires data.train_rows".into()));
                        }
                        SplitRule::LeadingFraction(1.0)
                    }
                };
                Some(DataConfig { path: resolve(p), split })
            }
        };

        let graph_n: Option<usize> = keys.get("graph.n")?;
        if let Some(n) = graph_n {
            if n == 0 || n > crate::graph::MAX_VERTICES {
                return Err(WorkbenchError::Config(format!("graph.n must lie in 1..=64, got {n}")));
            }
        }

        let prior = parse_prior(&keys)?;

        let hiw_delta: f64 = keys.get("hiw.delta")?.unwrap_or(3.0);
        if !(hiw_delta > 0.0 && hiw_delta.is_finite()) {
            return Err(WorkbenchError::Config(format!("hiw.delta must be positive, got {hiw_delta}")));
        }
        let hiw_tau: Option<f64> = keys.get("hiw.tau")?;
        if let Some(t) = hiw_tau {
            if !(t > 0.0 && t.is_finite()) {
                return Err(WorkbenchError::Config(format!("hiw.tau must be positive, got {t}")));
            }
        }

        let defaults = ChainConfig::default();
        let initial_graph = match keys.get::<String>("chain.initial")?.as_deref() {
            None | Some("empty") => InitialGraph::Empty,
            Some("complete") => InitialGraph::Complete,
            Some(other) => {
                let edges = other.strip_prefix("edges:").ok_or_else(|| {
                    WorkbenchError::Config(format!(
                        "chain.initial: expected empty, complete or edges:<list>, got `{other}`"
                    ))
                })?;
                // vertex count is unknown until the data is read; parse with the maximum and trim later
                let g = LabeledGraph::parse_edge_list(crate::graph::MAX_VERTICES, edges)
                    .map_err(|e| WorkbenchError::Config(format!("chain.initial: {e}")))?;
                InitialGraph::Given(g)
            }
        };
        let chain = ChainConfig {
            iterations: keys.get("chain.iterations")?.unwrap_or(defaults.iterations),
            burn_in: keys.get("chain.burn_in")?.unwrap_or(defaults.burn_in),
            thin: keys.get("chain.thin")?.unwrap_or(defaults.thin),
            seed: keys.get("chain.seed")?.unwrap_or(defaults.seed),
            target: Target::PriorOnly,
            initial_graph,
            top_k: keys.get("chain.top_k")?.unwrap_or(defaults.top_k),
            record_graphs: false,
            merge_split: keys.get("chain.merge_split")?.unwrap_or(defaults.merge_split),
        };
        chain.validate().map_err(|e| WorkbenchError::Config(e.to_string()))?;
        let chains: usize = keys.get("chain.chains")?.unwrap_or(1);
        if chains == 0 {
            return Err(WorkbenchError::Config("chain.chains must be at least 1".into()));
        }

        Ok(ExperimentConfig {
            data,
            graph_n,
            prior,
            hiw_delta,
            hiw_tau,
            chain,
            chains,
            out_dir: resolve(keys.get("output.dir")?.unwrap_or_else(|| "out".to_string())),
            top_dot: keys.get("output.top_dot")?.unwrap_or(10),
            enumerate_n: keys.get("enumerate.n")?,
            enumerate_use_data: keys.get("enumerate.use_data")?.unwrap_or(true),
        })
    }
}

/// Shrinks a graph parsed against the maximum vertex count down to `n` vertices.
pub(crate) fn fit_initial_graph(g: &LabeledGraph, n: usize) -> Result<LabeledGraph, WorkbenchError> {
    let edges = g.edges();
    if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= n || j >= n) {
        return Err(WorkbenchError::Config(format!("chain.initial: edge {}-{} outside 1..={n}", i + 1, j + 1)));
    }
    LabeledGraph::from_edges(n, edges).map_err(|e| WorkbenchError::Config(format!("chain.initial: {e}")))
}
