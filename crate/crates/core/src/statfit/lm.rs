//! Weighted nonlinear least squares by Levenberg–Marquardt, and the two
//! curve families used to summarize the characteristic times.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
pub const TOLERANCE: f64 = 1e-5;
const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e16;
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmSettings {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self {
            max_iterations: MAX_ITERATIONS,
            tolerance: TOLERANCE,
        }
    }
}

/// Result of a weighted least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LmFit {
    pub params: Vec<f64>,
    /// Weighted sum of squared residuals.
    pub sse: f64,
    /// `MSE·(JᵀWJ)⁻¹`, with `MSE = SSE/(n − p)` (or 1 when `n = p`).
    pub covariance: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl LmFit {
    pub fn standard_errors(&self) -> Vec<f64> {
        (0..self.params.len())
            .map(|i| self.covariance[(i, i)].max(0.0).sqrt())
            .collect()
    }

    pub fn correlation(&self) -> DMatrix<f64> {
        let se = self.standard_errors();
        let p = se.len();
        DMatrix::from_fn(p, p, |i, j| {
            let d = se[i] * se[j];
            if d > 0.0 {
                self.covariance[(i, j)] / d
            } else if i == j {
                1.0
            } else {
                0.0
            }
        })
    }
}

/// Minimize `Σ w_i (y_i − f(x_i; p))²`. `model(x, p)` returns the value and
/// the gradient with respect to `p`.
pub fn levenberg_marquardt<M>(
    xs: &[f64],
    ys: &[f64],
    weights: &[f64],
    initial: &[f64],
    model: M,
    settings: LmSettings,
) -> Result<LmFit>
where
    M: Fn(f64, &[f64]) -> (f64, Vec<f64>),
{
    let n = xs.len();
    let p = initial.len();
    if ys.len() != n || weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: ys.len().min(weights.len()),
        });
    }
    if n < p {
        return Err(Error::FitFailed(format!(
            "{n} points cannot determine {p} parameters"
        )));
    }
    let evaluate = |params: &[f64]| -> (DVector<f64>, DMatrix<f64>, f64) {
        let mut r = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, p);
        let mut sse = 0.0;
        for i in 0..n {
            let (f, g) = model(xs[i], params);
            let sw = weights[i].sqrt();
            r[i] = sw * (ys[i] - f);
            sse += r[i] * r[i];
            for (c, gc) in g.iter().enumerate() {
                j[(i, c)] = sw * gc;
            }
        }
        (r, j, sse)
    };

    let mut params = initial.to_vec();
    let (mut r, mut j, mut sse) = evaluate(&params);
    if !sse.is_finite() {
        return Err(Error::FitFailed("objective is not finite at the initial point".into()));
    }
    let mut lambda = LAMBDA_INIT;
    let mut converged = sse < 1e-28;
    let mut iterations = 0;
    while !converged && iterations < settings.max_iterations {
        iterations += 1;
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * &r;
        let mut accepted = false;
        while lambda <= LAMBDA_MAX {
            let mut a = jtj.clone();
            for d in 0..p {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(step) = a.cholesky().map(|ch| ch.solve(&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let (tr, tj, tsse) = evaluate(&trial);
            if tsse.is_finite() && tsse <= sse {
                let step_norm = step.norm();
                let param_norm = params.iter().map(|v| v * v).sum::<f64>().sqrt();
                let rel_step = step_norm / (param_norm + settings.tolerance);
                let rel_sse = (sse - tsse) / sse.max(f64::MIN_POSITIVE);
                params = trial;
                r = tr;
                j = tj;
                sse = tsse;
                lambda = (lambda / 10.0).max(1e-12);
                converged = sse < 1e-28 || (rel_step <= settings.tolerance && rel_sse <= settings.tolerance);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No downhill step at any damping: the current point is stationary
            // to working precision.
            converged = true;
        }
    }
    if !converged {
        return Err(Error::FitFailed(format!(
            "Levenberg-Marquardt did not converge in {} iterations (SSE {sse:.6e}, params {params:?})",
            settings.max_iterations
        )));
    }
    let jtj = j.transpose() * &j;
    let inv = jtj
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::FitFailed("singular information matrix at the optimum".into()))?;
    let mse = if n > p { sse / (n - p) as f64 } else { 1.0 };
    Ok(LmFit {
        params,
        sse,
        covariance: inv * mse,
        residuals: r.iter().copied().collect(),
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub value: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ParamEstimate {
    fn new(value: f64, se: f64) -> Self {
        Self {
            value,
            se,
            ci_low: value - Z_95 * se,
            ci_high: value + Z_95 * se,
        }
    }
}

/// Fit of `f_θ(k) = (θ₁θ₃ + θ₂k²)/(θ₃ + k²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaFit {
    pub theta: [ParamEstimate; 3],
    /// Row-major 3×3 correlation matrix of `(θ₁, θ₂, θ₃)`.
    pub correlation: [[f64; 3]; 3],
    pub sse: f64,
    pub iterations: usize,
    /// Some parameter ended up non-positive.
    pub at_boundary: bool,
}

impl ThetaFit {
    pub fn values(&self) -> [f64; 3] {
        [self.theta[0].value, self.theta[1].value, self.theta[2].value]
    }

    pub fn eval(&self, k: f64) -> f64 {
        f_theta(k, self.values())
    }
}

/// Fit of `X_n = Θ₁ n^{Θ₂}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub theta1: ParamEstimate,
    pub theta2: ParamEstimate,
    pub sse: f64,
    pub iterations: usize,
}

impl PowerFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.theta1.value * n.powf(self.theta2.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub x: f64,
    pub value: f64,
    pub error: f64,
}

pub fn f_theta(k: f64, theta: [f64; 3]) -> f64 {
    let k2 = k * k;
    (theta[0] * theta[2] + theta[1] * k2) / (theta[2] + k2)
}

fn f_theta_model(k: f64, p: &[f64]) -> (f64, Vec<f64>) {
    let k2 = k * k;
    let den = p[2] + k2;
    let value = (p[0] * p[2] + p[1] * k2) / den;
    (
        value,
        vec![p[2] / den, k2 / den, (p[0] - p[1]) * k2 / (den * den)],
    )
}

fn rational_model(k: f64, p: &[f64]) -> (f64, Vec<f64>) {
    let k2 = k * k;
    let den = p[2] + k2;
    let value = (p[0] + p[1] * k2) / den;
    (value, vec![1.0 / den, k2 / den, -value / den])
}

fn weights(points: &[DataPoint]) -> Result<Vec<f64>> {
    let scale = points
        .iter()
        .map(|p| p.value.abs())
        .fold(0.0_f64, f64::max)
        .max(1.0);
    points
        .iter()
        .map(|p| {
            if !(p.error >= 0.0) || !p.value.is_finite() || !p.x.is_finite() {
                return Err(Error::InvalidInput(format!("invalid data point {p:?}")));
            }
            Ok(1.0 / p.error.max(1e-12 * scale).powi(2))
        })
        .collect()
}

fn check_k_grid(points: &[DataPoint]) -> Result<()> {
    let mut ks: Vec<f64> = points.iter().map(|p| p.x).collect();
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    if ks.len() < 4 {
        return Err(Error::FitFailed(format!(
            "need at least 4 distinct k values, got {}",
            ks.len()
        )));
    }
    if ks[0] != 0.0 || *ks.last().expect("non-empty") < 100.0 {
        return Err(Error::FitFailed(
            "the k grid must contain k = 0 and some k >= 100".into(),
        ));
    }
    Ok(())
}

/// Multi-start LM over a log grid of `θ₃`, keeping the lowest SSE.
fn fit_rational_family<M>(points: &[DataPoint], model: M, product_form: bool) -> Result<LmFit>
where
    M: Fn(f64, &[f64]) -> (f64, Vec<f64>) + Copy,
{
    check_k_grid(points)?;
    let w = weights(points)?;
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.value).collect();
    let at_zero = points.iter().find(|p| p.x == 0.0).expect("k grid checked").value;
    let far = points
        .iter()
        .max_by(|a, b| a.x.total_cmp(&b.x))
        .expect("non-empty")
        .value;
    let mut best: Option<LmFit> = None;
    let mut last_err = None;
    for e in -3..=3 {
        let t3 = 10f64.powi(e);
        let t1 = if product_form { at_zero } else { at_zero * t3 };
        match levenberg_marquardt(&xs, &ys, &w, &[t1, far, t3], model, LmSettings::default()) {
            Ok(fit) => {
                if best.as_ref().is_none_or(|b| fit.sse < b.sse) {
                    best = Some(fit);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::FitFailed("no start converged".into())))
}

fn theta_fit_from(fit: LmFit) -> ThetaFit {
    let se = fit.standard_errors();
    let corr = fit.correlation();
    let mut correlation = [[0.0; 3]; 3];
    for (i, row) in correlation.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = corr[(i, j)];
        }
    }
    ThetaFit {
        theta: [
            ParamEstimate::new(fit.params[0], se[0]),
            ParamEstimate::new(fit.params[1], se[1]),
            ParamEstimate::new(fit.params[2], se[2]),
        ],
        correlation,
        sse: fit.sse,
        iterations: fit.iterations,
        at_boundary: fit.params.iter().any(|&v| v <= 0.0),
    }
}

/// Weighted LM fit of `f_θ` with weights `1/error²`.
pub fn fit_f_theta(points: &[DataPoint]) -> Result<ThetaFit> {
    fit_rational_family(points, f_theta_model, true).map(theta_fit_from)
}

/// Same data fitted as `(θ₁′ + θ₂k²)/(θ₃ + k²)` with `θ₁′` free; the returned
/// `theta[0]` is `θ₁′`.
pub fn fit_rational_unreparameterized(points: &[DataPoint]) -> Result<ThetaFit> {
    fit_rational_family(points, rational_model, false).map(theta_fit_from)
}

/// Unweighted LM fit of `X_n = Θ₁ n^{Θ₂}`, started from the log-log regression.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit> {
    if points.len() < 3 {
        return Err(Error::FitFailed(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::FitFailed("n values must be distinct".into()));
    }
    if points.iter().any(|&(n, x)| !(n > 0.0 && x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidInput("power-law data must be positive".into()));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let start = [(my - slope * mx).exp(), slope];

    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let w = vec![1.0; xs.len()];
    let fit = levenberg_marquardt(
        &xs,
        &ys,
        &w,
        &start,
        |n, p| {
            let pow = n.powf(p[1]);
            (p[0] * pow, vec![pow, p[0] * pow * n.ln()])
        },
        LmSettings::default(),
    )?;
    let se = fit.standard_errors();
    Ok(PowerFit {
        theta1: ParamEstimate::new(fit.params[0], se[0]),
        theta2: ParamEstimate::new(fit.params[1], se[1]),
        sse: fit.sse,
        iterations: fit.iterations,
    })
}
