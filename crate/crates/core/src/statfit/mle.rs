//! Maximum-likelihood fits of the three-parameter families.
//!
//! The threshold makes the problem nonregular, so the likelihood is profiled
//! over `μ`: for a fixed threshold the Lognormal MLE is closed-form and the
//! Gamma MLE reduces to a one-dimensional digamma equation. The profile is
//! scanned on a log grid of `min(x) − μ` and refined by golden-section search.

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use super::density::{Family, Gamma3Params, Lognormal3Params, ThreeParam};
use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 50;
const MAX_OUTER_ITERATIONS: usize = 500;
const GRID_POINTS: usize = 80;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleFit {
    pub params: ThreeParam,
    pub log_likelihood: f64,
    /// Observed-information standard errors in the order of
    /// [`ThreeParam::as_array`]; `None` when the Hessian is not positive
    /// definite (e.g. a threshold pinned at its bound).
    pub standard_errors: Option<[f64; 3]>,
    pub n: usize,
    /// The threshold sits at its upper bound `min(x) − ε`.
    pub threshold_at_bound: bool,
    pub iterations: usize,
}

/// `ψ′(x)` by upward recurrence and the asymptotic series.
pub(crate) fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x
        + x2 / 2.0
        + (1.0 / x)
            * x2
            * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 * (1.0 / 30.0))))
}

/// Gamma shape solving `ln β − ψ(β) = s` for `s > 0`.
fn gamma_shape(s: f64) -> f64 {
    let mut beta = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    for _ in 0..100 {
        let f = beta.ln() - digamma(beta) - s;
        let df = 1.0 / beta - trigamma(beta);
        let next = beta - f / df;
        let next = if next <= 0.0 { beta / 2.0 } else { next };
        if (next - beta).abs() <= 1e-14 * beta {
            return next;
        }
        beta = next;
    }
    beta
}

/// Fitted parameters and log-likelihood at a fixed threshold.
fn inner_fit(family: Family, xs: &[f64], threshold: f64) -> (ThreeParam, f64) {
    let n = xs.len() as f64;
    let logs: Vec<f64> = xs.iter().map(|&x| (x - threshold).ln()).collect();
    let sum_log: f64 = logs.iter().sum();
    match family {
        Family::Gamma3 => {
            let mean_y = xs.iter().map(|&x| x - threshold).sum::<f64>() / n;
            let s = (mean_y.ln() - sum_log / n).max(1e-300);
            let shape = gamma_shape(s);
            let scale = mean_y / shape;
            let ll = (shape - 1.0) * sum_log - n * shape - n * shape * scale.ln() - n * ln_gamma(shape);
            (
                ThreeParam::Gamma3(Gamma3Params {
                    shape,
                    scale,
                    threshold,
                }),
                ll,
            )
        }
        Family::Lognormal3 => {
            let location = sum_log / n;
            let var = logs.iter().map(|l| (l - location).powi(2)).sum::<f64>() / n;
            let scale = var.sqrt();
            let ll = -sum_log - n * scale.ln() - n * 0.918_938_533_204_672_8 - 0.5 * n;
            (
                ThreeParam::Lognormal3(Lognormal3Params {
                    location,
                    scale,
                    threshold,
                }),
                ll,
            )
        }
    }
}

/// Maximum-likelihood fit of `family` to the finite samples `xs`.
pub fn mle_fit(xs: &[f64], family: Family) -> Result<MleFit> {
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(Error::FitFailed(format!(
            "need at least {MIN_FIT_SAMPLES} finite samples, got {}",
            xs.len()
        )));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::FitFailed("samples must be finite".into()));
    }
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if !(range > 0.0) {
        return Err(Error::FitFailed("samples have zero spread".into()));
    }
    let eps = 1e-6 * range;

    // Profile over u = ln(min − μ) ∈ [ln ε, ln range].
    let (u_lo, u_hi) = (eps.ln(), range.ln());
    let profile = |u: f64| inner_fit(family, xs, min - u.exp()).1;
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| u_lo + (u_hi - u_lo) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&u| profile(u)).collect();
    let best = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::FitFailed("profile likelihood is not finite".into()))?;

    let mut iterations = 0;
    let u_best = if best == 0 {
        grid[0]
    } else {
        let mut a = grid[best - 1];
        let mut b = grid[(best + 1).min(GRID_POINTS - 1)];
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (profile(c), profile(d));
        while (b - a).abs() > 1e-10 {
            iterations += 1;
            if iterations > MAX_OUTER_ITERATIONS {
                return Err(Error::FitFailed(format!(
                    "{family:?} profile search did not converge (bracket [{a}, {b}])"
                )));
            }
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = profile(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = profile(d);
            }
        }
        let mid = 0.5 * (a + b);
        // Keep the grid optimum if the refinement did not improve on it.
        if profile(mid) >= values[best] { mid } else { grid[best] }
    };
    let threshold_at_bound = best == 0;
    let (params, log_likelihood) = inner_fit(family, xs, min - u_best.exp());
    if !log_likelihood.is_finite() {
        return Err(Error::FitFailed("non-finite log-likelihood at optimum".into()));
    }
    let standard_errors = if threshold_at_bound {
        None
    } else {
        observed_information_se(&params, xs)
    };
    Ok(MleFit {
        params,
        log_likelihood,
        standard_errors,
        n: xs.len(),
        threshold_at_bound,
        iterations,
    })
}

/// Standard errors from the inverse of the finite-difference Hessian of the
/// negative log-likelihood.
fn observed_information_se(params: &ThreeParam, xs: &[f64]) -> Option<[f64; 3]> {
    let family = params.family();
    let theta = params.as_array();
    let nll = |v: [f64; 3]| -> f64 {
        match ThreeParam::from_array(family, v) {
            Ok(p) => -p.log_likelihood(xs),
            Err(_) => f64::INFINITY,
        }
    };
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut h = [0.0; 3];
    for (i, hi) in h.iter_mut().enumerate() {
        *hi = 1e-4 * theta[i].abs().max(1e-3);
    }
    // The threshold step must keep every sample inside the support.
    h[2] = h[2].min(0.25 * (min - theta[2]));
    let mut hess = Matrix3::<f64>::zeros();
    let f0 = nll(theta);
    for i in 0..3 {
        for j in i..3 {
            let value = if i == j {
                let mut p = theta;
                p[i] += h[i];
                let fp = nll(p);
                p[i] -= 2.0 * h[i];
                let fm = nll(p);
                (fp - 2.0 * f0 + fm) / (h[i] * h[i])
            } else {
                let eval = |si: f64, sj: f64| {
                    let mut p = theta;
                    p[i] += si * h[i];
                    p[j] += sj * h[j];
                    nll(p)
                };
                (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                    / (4.0 * h[i] * h[j])
            };
            hess[(i, j)] = value;
            hess[(j, i)] = value;
        }
    }
    if hess.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let chol = DMatrix::from_iterator(3, 3, hess.iter().copied()).cholesky()?;
    let cov = chol.inverse();
    Some([cov[(0, 0)].sqrt(), cov[(1, 1)].sqrt(), cov[(2, 2)].sqrt()])
}
