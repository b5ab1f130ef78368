//! Prior mass over decomposable graphs.
//!
//! Every family is evaluated in log space and up to its global normalizing constant.
//! Edge-count families (binomial, beta-binomial) depend only on the number of edges;
//! the cohesion families depend only on the multisets of clique and non-empty
//! separator sizes. Empty separators contribute nothing anywhere.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::chordal::CliqueDecomposition;
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::special::{ln_beta, ln_factorial_minus_one, ln_gamma, ln_stirling_first_row};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A prior family over decomposable graphs together with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PriorSpec {
    Uniform,
    /// Independent edges with inclusion probability `rho`.
    Binomial {
        rho: f64,
    },
    /// Binomial with `rho ~ Beta(alpha, beta)` integrated out.
    BetaBinomial {
        alpha: f64,
        beta: f64,
    },
    /// Size-indexed cohesions: entry `k - 1` is the weight of a set of size `k`.
    Cohesion {
        clique_weights: Vec<f64>,
        separator_weights: Vec<f64>,
    },
    /// `a^{n_c} b^{n_s} Π (|C|-1)! / Π (|S|-1)!`
    Pgm {
        a: f64,
        b: f64,
    },
    /// Four-parameter generalisation of `Pgm`; reduces to it when `a1 = b1 = 0`.
    TwoParam {
        a1: f64,
        a2: f64,
        b1: f64,
        b2: f64,
    },
    /// At most `c1` cliques and `d1` non-empty separators.
    FiniteCapacity {
        c1: f64,
        c2: f64,
        d1: f64,
        d2: f64,
    },
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {x}")))
    }
}

impl PriorSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            PriorSpec::Uniform => "uniform",
            PriorSpec::Binomial { .. } => "binomial",
            PriorSpec::BetaBinomial { .. } => "beta_binomial",
            PriorSpec::Cohesion { .. } => "cohesion",
            PriorSpec::Pgm { .. } => "pgm",
            PriorSpec::TwoParam { .. } => "two_param",
            PriorSpec::FiniteCapacity { .. } => "finite_capacity",
        }
    }

    /// Checks the parameter constraints of the family. Error messages name the
    /// offending parameter.
    pub fn validate(&self) -> Result<()> {
        match *self {
            PriorSpec::Uniform => Ok(()),
            PriorSpec::Binomial { rho } => {
                if rho > 0.0 && rho < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!("rho must lie in (0, 1), got {rho}")))
                }
            }
            PriorSpec::BetaBinomial { alpha, beta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)
            }
            PriorSpec::Cohesion { ref clique_weights, ref separator_weights } => {
                for (name, table) in [("clique_weights", clique_weights), ("separator_weights", separator_weights)] {
                    for (k, &w) in table.iter().enumerate() {
                        positive(&format!("{name}[size {}]", k + 1), w)?;
                    }
                }
                Ok(())
            }
            PriorSpec::Pgm { a, b } => {
                positive("a", a)?;
                positive("b", b)
            }
            PriorSpec::TwoParam { a1, a2, b1, b2 } => {
                for (discount, name, mass, mname) in [(a1, "a1", a2, "a2"), (b1, "b1", b2, "b2")] {
                    if !(0.0..1.0).contains(&discount) {
                        return Err(Error::InvalidSpec(format!("{name} must lie in [0, 1), got {discount}")));
                    }
                    if !(mass > -discount) || !mass.is_finite() {
                        return Err(Error::InvalidSpec(format!("{mname} must exceed -{name}, got {mass}")));
                    }
                    // The leading factor of the product is the mass parameter itself.
                    if mass <= 0.0 {
                        return Err(Error::InvalidSpec(format!(
                            "{mname} must be positive for the leading factor to be a valid weight, got {mass}"
                        )));
                    }
                }
                Ok(())
            }
            PriorSpec::FiniteCapacity { c1, c2, d1, d2 } => {
                positive("c1", c1)?;
                positive("c2", c2)?;
                positive("d1", d1)?;
                positive("d2", d2)?;
                if c1 > d1 {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!("c1 must exceed d1, got c1={c1}, d1={d1}")))
                }
            }
        }
    }
}

/// Log prior mass of `g` (with decomposition `d`) up to a constant. Returns
/// `-inf` for graphs the family gives zero mass, e.g. too many cliques under
/// `FiniteCapacity`.
pub fn log_prior(spec: &PriorSpec, g: &LabeledGraph, d: &CliqueDecomposition) -> Result<f64> {
    spec.validate()?;
    log_prior_unchecked(spec, g, d)
}

/// [`log_prior`] without re-validating the parameters; the sampler validates once up front.
pub(crate) fn log_prior_unchecked(spec: &PriorSpec, g: &LabeledGraph, d: &CliqueDecomposition) -> Result<f64> {
    let r = g.edge_count() as f64;
    let m = g.max_edges() as f64;
    let cliques = d.cliques().iter().map(|c| c.len());
    let seps = || d.nonempty_separators().map(|s| s.len());
    let value = match *spec {
        PriorSpec::Uniform => 0.0,
        PriorSpec::Binomial { rho } => r * rho.ln() + (m - r) * (-rho).ln_1p(),
        PriorSpec::BetaBinomial { alpha, beta } => ln_beta(alpha + r, beta + m - r) - ln_beta(alpha, beta),
        PriorSpec::Cohesion { ref clique_weights, ref separator_weights } => {
            let lookup = |table: &[f64], name: &str, k: usize| -> Result<f64> {
                table.get(k - 1).map(|w| w.ln()).ok_or_else(|| {
                    Error::InvalidSpec(format!("{name} has no entry for size {k} (table length {})", table.len()))
                })
            };
            let mut total = 0.0;
            for k in cliques {
                total += lookup(clique_weights, "clique_weights", k)?;
            }
            for k in seps() {
                total -= lookup(separator_weights, "separator_weights", k)?;
            }
            total
        }
        PriorSpec::Pgm { a, b } => {
            let n_c = d.clique_count() as f64;
            let n_s = d.nonempty_separator_count() as f64;
            n_c * a.ln() + n_s * b.ln() + cliques.map(ln_factorial_minus_one).sum::<f64>()
                - seps().map(ln_factorial_minus_one).sum::<f64>()
        }
        PriorSpec::TwoParam { a1, a2, b1, b2 } => {
            let term = |discount: f64, mass: f64, sizes: &mut dyn Iterator<Item = usize>| -> f64 {
                let norm = ln_gamma(1.0 - discount);
                sizes
                    .enumerate()
                    .map(|(j, k)| (mass + discount * j as f64).ln() + ln_gamma(k as f64 - discount) - norm)
                    .sum()
            };
            term(a1, a2, &mut d.cliques().iter().map(|c| c.len())) - term(b1, b2, &mut seps())
        }
        PriorSpec::FiniteCapacity { c1, c2, d1, d2 } => {
            let n_c = d.clique_count() as f64;
            let n_s = d.nonempty_separator_count() as f64;
            if n_c > c1 || n_s > d1 {
                return Ok(f64::NEG_INFINITY);
            }
            // separator term uses separator sizes; see the crate README
            let term = |cap: f64, shape: f64, sizes: &mut dyn Iterator<Item = usize>| -> f64 {
                let norm = ln_gamma(shape);
                sizes.enumerate().map(|(j, k)| (cap - j as f64).ln() + ln_gamma(shape + k as f64) - norm).sum()
            };
            let value = term(c1, c2, &mut d.cliques().iter().map(|c| c.len())) - term(d1, d2, &mut seps());
            if value.is_nan() {
                f64::NEG_INFINITY
            } else {
                value
            }
        }
    };
    Ok(value)
}

/// `log π(g') - log π(g)`.
pub fn log_prior_ratio(
    spec: &PriorSpec,
    g: &LabeledGraph,
    d: &CliqueDecomposition,
    g_new: &LabeledGraph,
    d_new: &CliqueDecomposition,
) -> Result<f64> {
    if g.n() != g_new.n() {
        return Err(Error::SizeMismatch(g.n(), g_new.n()));
    }
    spec.validate()?;
    if g == g_new {
        return Ok(0.0);
    }
    Ok(log_prior_unchecked(spec, g_new, d_new)? - log_prior_unchecked(spec, g, d)?)
}

/// Law of the number of blocks in a Chinese-restaurant partition of `n` items with
/// concentration `a`, the `b -> 0` limit of the `Pgm` prior.
#[derive(Clone, Debug, Serialize)]
pub struct CrpReference {
    pub n: usize,
    pub a: f64,
    /// `pmf[k - 1] = Pr(n_c = k)` for `k = 1..=n`.
    pub pmf: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

pub fn crp_clique_count_pmf(n: usize, a: f64) -> Result<CrpReference> {
    if n == 0 || n > 200 {
        return Err(Error::TooLarge { what: "CRP reference", n, limit: 200 });
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParams(format!("concentration must be positive, got {a}")));
    }
    let ln_s = ln_stirling_first_row(n);
    let ln_norm = ln_gamma(a) - ln_gamma(a + n as f64);
    let pmf = (1..=n).map(|k| (ln_s[k] + k as f64 * a.ln() + ln_norm).exp()).collect();
    let mean = (0..n).map(|i| a / (a + i as f64)).sum();
    let variance = (1..n).map(|i| a * i as f64 / (a + i as f64).powi(2)).sum();
    Ok(CrpReference { n, a, pmf, mean, variance })
}

/// Asymptotic approximation `a·log(1 + n/a) + γ` of the expected number of blocks.
pub fn crp_mean_approximation(n: usize, a: f64) -> f64 {
    a * (1.0 + n as f64 / a).ln() + EULER_GAMMA
}

/// One data-augmentation refresh of the concentration `a` given `n_c` blocks among
/// `n` items, under a `Gamma(shape, rate)` prior.
pub fn west_update_concentration<R: Rng + ?Sized>(
    a_current: f64,
    n_c: usize,
    n: usize,
    gamma_shape: f64,
    gamma_rate: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(a_current > 0.0) || !(gamma_shape > 0.0) || !(gamma_rate > 0.0) || n_c == 0 || n_c > n {
        return Err(Error::InvalidParams(format!(
            "need a>0, shape>0, rate>0, 1<=n_c<=n; got a={a_current}, shape={gamma_shape}, rate={gamma_rate}, n_c={n_c}, n={n}"
        )));
    }
    let eta: f64 = Beta::new(a_current + 1.0, n as f64).map_err(|e| Error::InvalidParams(e.to_string()))?.sample(rng);
    let rate = gamma_rate - eta.ln();
    let k = n_c as f64;
    let odds = (gamma_shape + k - 1.0) / (n as f64 * rate);
    let shape = if rng.random::<f64>() < odds / (1.0 + odds) { gamma_shape + k } else { gamma_shape + k - 1.0 };
    let draw: f64 = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::InvalidParams(e.to_string()))?.sample(rng);
    // Gamma draws can underflow to zero for tiny shapes
    Ok(draw.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::clique_decomposition;

    fn lp(spec: &PriorSpec, g: &LabeledGraph) -> f64 {
        log_prior(spec, g, &clique_decomposition(g).unwrap()).unwrap()
    }

    fn path3() -> LabeledGraph {
        LabeledGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn pgm_n3_weights() {
        let spec = PriorSpec::Pgm { a: 1.0, b: 1.0 };
        assert!((lp(&spec, &LabeledGraph::complete(3).unwrap()).exp() - 2.0).abs() < 1e-12);
        assert!((lp(&spec, &path3()).exp() - 1.0).abs() < 1e-12);
        assert!((lp(&spec, &LabeledGraph::empty(3).unwrap()).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pgm_complete_vs_empty_n20() {
        let spec = PriorSpec::Pgm { a: 1.0, b: 1.0 };
        let gap = lp(&spec, &LabeledGraph::complete(20).unwrap()) - lp(&spec, &LabeledGraph::empty(20).unwrap());
        let ln_19_fact: f64 = (1..=19).map(|k| (k as f64).ln()).sum();
        assert!((gap - ln_19_fact).abs() < 1e-9);
        assert!((gap - 39.3398841872).abs() < 1e-6);
    }

    #[test]
    fn beta_binomial_closed_form() {
        let spec = PriorSpec::BetaBinomial { alpha: 1.0, beta: 1.0 };
        assert!((lp(&spec, &LabeledGraph::empty(3).unwrap()).exp() - 0.25).abs() < 1e-12);
        assert!((lp(&spec, &path3()).exp() - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn binomial_half_is_flat_and_ratio() {
        let half = PriorSpec::Binomial { rho: 0.5 };
        assert!((lp(&half, &path3()) - lp(&half, &LabeledGraph::complete(3).unwrap())).abs() < 1e-12);
        let rho = 0.2;
        let spec = PriorSpec::Binomial { rho };
        let g = path3();
        let h = LabeledGraph::complete(3).unwrap();
        let r = log_prior_ratio(&spec, &g, &clique_decomposition(&g).unwrap(), &h, &clique_decomposition(&h).unwrap())
            .unwrap();
        assert!((r - (rho / (1.0 - rho)).ln()).abs() < 1e-12);
    }

    #[test]
    fn ratio_identity_and_size_mismatch() {
        let spec = PriorSpec::Pgm { a: 1.0, b: 1.0 };
        let g = path3();
        let d = clique_decomposition(&g).unwrap();
        assert_eq!(log_prior_ratio(&spec, &g, &d, &g, &d).unwrap(), 0.0);
        let k3 = LabeledGraph::complete(3).unwrap();
        let r = log_prior_ratio(&spec, &g, &d, &k3, &clique_decomposition(&k3).unwrap()).unwrap();
        assert!((r - 2f64.ln()).abs() < 1e-12);
        let e4 = LabeledGraph::empty(4).unwrap();
        assert!(matches!(
            log_prior_ratio(&spec, &g, &d, &e4, &clique_decomposition(&e4).unwrap()),
            Err(Error::SizeMismatch(3, 4))
        ));
    }

    #[test]
    fn finite_capacity_impossible() {
        let spec = PriorSpec::FiniteCapacity { c1: 2.0, c2: 1.0, d1: 1.0, d2: 1.0 };
        assert_eq!(lp(&spec, &LabeledGraph::empty(3).unwrap()), f64::NEG_INFINITY);
        assert!(lp(&spec, &path3()).is_finite());
        // two non-empty separators exceed d1 = 1
        let p4 = LabeledGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let spec = PriorSpec::FiniteCapacity { c1: 5.0, c2: 1.0, d1: 1.0, d2: 1.0 };
        assert_eq!(lp(&spec, &p4), f64::NEG_INFINITY);
    }

    #[test]
    fn cohesion_tables() {
        // psi_C(B) = a(|B|-1)!, psi_S(B) = (|B|-1)!/b reproduces Pgm
        let (a, b) = (0.7_f64, 0.3_f64);
        let fact = |k: usize| (1..k).map(|x| x as f64).product::<f64>();
        let spec = PriorSpec::Cohesion {
            clique_weights: (1..=4).map(|k| a * fact(k)).collect(),
            separator_weights: (1..=4).map(|k| fact(k) / b).collect(),
        };
        let pgm = PriorSpec::Pgm { a, b };
        let p4 = LabeledGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        assert!((lp(&spec, &p4) - lp(&pgm, &p4)).abs() < 1e-12);
        let short = PriorSpec::Cohesion { clique_weights: vec![1.0], separator_weights: vec![1.0] };
        let d = clique_decomposition(&p4).unwrap();
        assert!(matches!(log_prior(&short, &p4, &d), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let bad = [
            PriorSpec::Binomial { rho: 0.0 },
            PriorSpec::Binomial { rho: 1.0 },
            PriorSpec::BetaBinomial { alpha: 0.0, beta: 1.0 },
            PriorSpec::BetaBinomial { alpha: 1.0, beta: -1.0 },
            PriorSpec::Pgm { a: 0.0, b: 1.0 },
            PriorSpec::Pgm { a: 1.0, b: 0.0 },
            PriorSpec::TwoParam { a1: 1.0, a2: 1.0, b1: 0.0, b2: 1.0 },
            PriorSpec::TwoParam { a1: -0.1, a2: 1.0, b1: 0.0, b2: 1.0 },
            PriorSpec::TwoParam { a1: 0.5, a2: -0.6, b1: 0.0, b2: 1.0 },
            PriorSpec::TwoParam { a1: 0.0, a2: 1.0, b1: 0.2, b2: -0.3 },
            PriorSpec::FiniteCapacity { c1: 2.0, c2: 1.0, d1: 3.0, d2: 1.0 },
            PriorSpec::FiniteCapacity { c1: 2.0, c2: 0.0, d1: 1.0, d2: 1.0 },
            PriorSpec::Cohesion { clique_weights: vec![1.0, 0.0], separator_weights: vec![] },
        ];
        let g = path3();
        let d = clique_decomposition(&g).unwrap();
        for spec in bad {
            assert!(matches!(log_prior(&spec, &g, &d), Err(Error::InvalidSpec(_))), "{spec:?}");
        }
    }

    #[test]
    fn crp_small_cases() {
        let r = crp_clique_count_pmf(3, 1.0).unwrap();
        let want = [1.0 / 3.0, 0.5, 1.0 / 6.0];
        for (p, w) in r.pmf.iter().zip(want) {
            assert!((p - w).abs() < 1e-12);
        }
        assert!((r.mean - 11.0 / 6.0).abs() < 1e-12);
        let one = crp_clique_count_pmf(1, 3.7).unwrap();
        assert_eq!(one.pmf.len(), 1);
        assert!((one.pmf[0] - 1.0).abs() < 1e-12);
        assert!(crp_clique_count_pmf(201, 1.0).is_err());
        assert!(crp_clique_count_pmf(0, 1.0).is_err());
        assert!(crp_clique_count_pmf(5, 0.0).is_err());
    }

    #[test]
    fn crp_normalizes_and_moments() {
        for &a in &[0.01, 1.0, 100.0] {
            for n in [1, 2, 10, 57, 200] {
                let r = crp_clique_count_pmf(n, a).unwrap();
                let total: f64 = r.pmf.iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "n={n} a={a} total={total}");
                let mean: f64 = r.pmf.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum();
                assert!((mean - r.mean).abs() < 1e-10 * r.mean.max(1.0), "n={n} a={a}");
                let var: f64 = r.pmf.iter().enumerate().map(|(i, p)| ((i + 1) as f64 - mean).powi(2) * p).sum();
                assert!((var - r.variance).abs() < 1e-9 * r.variance.max(1.0), "n={n} a={a}");
            }
        }
        let approx = crp_mean_approximation(100, 1.0);
        let exact = crp_clique_count_pmf(100, 1.0).unwrap().mean;
        assert!(((approx - exact) / exact).abs() < 0.05);
    }

    #[test]
    fn west_update_positive_and_validates() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut a = 1.0;
        for _ in 0..1000 {
            a = west_update_concentration(a, 1, 5, 0.1, 0.1, &mut rng).unwrap();
            assert!(a > 0.0);
        }
        assert!(west_update_concentration(1.0, 0, 5, 1.0, 1.0, &mut rng).is_err());
        assert!(west_update_concentration(1.0, 6, 5, 1.0, 1.0, &mut rng).is_err());
        assert!(west_update_concentration(-1.0, 2, 5, 1.0, 1.0, &mut rng).is_err());
    }
}
