//! Log-space special functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub use statrs::function::gamma::ln_gamma;

/// `log((k - 1)!)` for `k >= 1`.
pub fn ln_factorial_minus_one(k: usize) -> f64 {
    debug_assert!(k >= 1);
    ln_gamma(k as f64)
}

/// `log B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Log of the multivariate gamma function,
/// `log Γ_p(x) = p(p-1)/4 · log π + Σ_{j=1}^{p} log Γ(x + (1-j)/2)`.
pub fn log_multivariate_gamma(p: usize, x: f64) -> Result<f64> {
    if p == 0 || !(x > (p as f64 - 1.0) / 2.0) {
        return Err(Error::DomainError { p, x });
    }
    let pf = p as f64;
    let sum: f64 = (1..=p).map(|j| ln_gamma(x + (1.0 - j as f64) / 2.0)).sum();
    Ok(pf * (pf - 1.0) / 4.0 * PI.ln() + sum)
}

/// `log(exp(a) + exp(b))` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Logs of the unsigned Stirling numbers of the first kind, `table[k] = log s(n, k)`
/// for `k = 0..=n`, from `s(j+1, k) = s(j, k-1) + j·s(j, k)`.
pub fn ln_stirling_first_row(n: usize) -> Vec<f64> {
    let mut row = vec![f64::NEG_INFINITY; n + 1];
    row[0] = 0.0; // s(0, 0) = 1
    for j in 0..n {
        let ln_j = (j as f64).ln();
        let mut next = vec![f64::NEG_INFINITY; n + 1];
        for k in 1..=j + 1 {
            next[k] = log_add_exp(row[k - 1], ln_j + row[k]);
        }
        row = next;
    }
    row
}
