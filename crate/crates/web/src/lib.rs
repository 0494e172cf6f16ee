//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every exported function returns a JSON string; the plain Rust functions
//! behind them are public so they can be tested natively.

use pptt_core::ensemble::{sample_generator, Histogram};
use pptt_core::statfit::{fit_power_law, mle_fit, Family, PowerFit, ThreeParam};
use pptt_core::{
    choi_state, ecdf_eval, gell_mann_basis, median_xn, negativity, pptt, sample_pptt_distribution,
    Mode, Propagator, PpttSearchConfig, RngStream,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: usize = 20_000;

#[derive(Debug, Serialize)]
pub struct HistogramView {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub total: usize,
    pub censored: usize,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    /// Expected bin counts under the fitted Gamma3 law; absent when the fit
    /// fails.
    pub gamma3: Option<Gamma3View>,
}

#[derive(Debug, Serialize)]
pub struct Gamma3View {
    pub params: ThreeParam,
    pub expected_counts: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct TrajectoryView {
    pub t: Vec<f64>,
    pub negativity: Vec<f64>,
    pub pptt: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ComposeView {
    pub t: Vec<f64>,
    /// `cdf[n-1][i]` is the `n`-site PPT probability at `t[i]`.
    pub cdf: Vec<Vec<f64>>,
    pub x_n: Vec<f64>,
    pub fit: Option<PowerFit>,
}

fn parse_mode(mode: &str) -> Result<Mode, String> {
    match mode {
        "P" | "p" => Ok(Mode::P),
        "limit" => Ok(Mode::Limit),
        other => Err(format!("mode must be \"P\" or \"limit\", got {other:?}")),
    }
}

fn check_samples(n: usize) -> Result<(), String> {
    if !(2..=MAX_SAMPLES).contains(&n) {
        return Err(format!("samples must be between 2 and {MAX_SAMPLES}, got {n}"));
    }
    Ok(())
}

pub fn histogram_view(
    n_dim: usize,
    k: f64,
    mode: &str,
    samples: usize,
    seed: u64,
    bins: usize,
) -> Result<HistogramView, String> {
    check_samples(samples)?;
    if bins == 0 || bins > 500 {
        return Err(format!("bins must be between 1 and 500, got {bins}"));
    }
    let mode = parse_mode(mode)?;
    let cfg = PpttSearchConfig::default();
    let dist = sample_pptt_distribution(n_dim, k, mode, samples, seed, &cfg).map_err(|e| e.to_string())?;
    let (min, max) = match (dist.min(), dist.max()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err("every sample was censored".into()),
    };
    let hi = if max > min { max } else { min + 1e-9 };
    let hist = Histogram::with_bins(&dist, min, hi, bins);
    let gamma3 = mle_fit(dist.samples(), Family::Gamma3).ok().map(|fit| Gamma3View {
        expected_counts: hist
            .edges
            .windows(2)
            .map(|w| (fit.params.cdf(w[1]) - fit.params.cdf(w[0])) * dist.n_total() as f64)
            .collect(),
        params: fit.params,
    });
    Ok(HistogramView {
        total: dist.n_total(),
        censored: dist.censored_count(),
        min,
        median: dist.median().unwrap_or(f64::NAN),
        mean: dist.mean().unwrap_or(f64::NAN),
        edges: hist.edges,
        counts: hist.counts,
        gamma3,
    })
}

pub fn trajectory_view(
    n_dim: usize,
    k: f64,
    seed: u64,
    t_max: f64,
    steps: usize,
) -> Result<TrajectoryView, String> {
    if !(t_max > 0.0 && t_max.is_finite()) || !(2..=5000).contains(&steps) {
        return Err("need t_max > 0 and 2 <= steps <= 5000".into());
    }
    let basis = gell_mann_basis(n_dim).map_err(|e| e.to_string())?;
    let l = sample_generator(n_dim, k, Mode::P, RngStream::new(seed, 0), &basis)
        .map_err(|e| e.to_string())?;
    let prop = Propagator::new(&l);
    let t: Vec<f64> = (0..steps).map(|i| t_max * i as f64 / (steps - 1) as f64).collect();
    let negativity = t
        .iter()
        .map(|&s| choi_state(&prop.at(s)).map(|rho| negativity(&rho)))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| e.to_string())?;
    let pptt = pptt(&l, &PpttSearchConfig::default())
        .map_err(|e| e.to_string())?
        .tau();
    Ok(TrajectoryView { t, negativity, pptt })
}

pub fn compose_view(
    n_dim: usize,
    k: f64,
    samples: usize,
    seed: u64,
    n_max: u32,
    points: usize,
) -> Result<ComposeView, String> {
    check_samples(samples)?;
    if n_max == 0 || n_max > 50 || !(2..=2000).contains(&points) {
        return Err("need 1 <= n_max <= 50 and 2 <= points <= 2000".into());
    }
    let cfg = PpttSearchConfig::default();
    let dist = sample_pptt_distribution(n_dim, k, Mode::P, samples, seed, &cfg).map_err(|e| e.to_string())?;
    let (lo, hi) = match (dist.min(), dist.max()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err("every sample was censored".into()),
    };
    let t: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let single: Vec<f64> = t.iter().map(|&x| ecdf_eval(&dist, x)).collect();
    let cdf = (1..=n_max)
        .map(|n| single.iter().map(|p| p.powi(n as i32)).collect())
        .collect();
    let x_n: Vec<f64> = (1..=n_max)
        .map(|n| median_xn(&dist, n))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let fit = if x_n.len() >= 3 {
        let pts: Vec<(f64, f64)> = x_n.iter().enumerate().map(|(i, &x)| ((i + 1) as f64, x)).collect();
        fit_power_law(&pts).ok()
    } else {
        None
    };
    Ok(ComposeView { t, cdf, x_n, fit })
}

fn to_js<T: Serialize>(value: Result<T, String>) -> Result<String, JsValue> {
    value
        .and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

/// Histogram of `samples` PPT times as JSON.
#[wasm_bindgen(js_name = sampleHistogram)]
pub fn sample_histogram(
    n_dim: usize,
    k: f64,
    mode: &str,
    samples: usize,
    seed: u32,
    bins: usize,
) -> Result<String, JsValue> {
    to_js(histogram_view(n_dim, k, mode, samples, seed as u64, bins))
}

/// Negativity of the Choi state along one sampled semigroup as JSON.
#[wasm_bindgen(js_name = negativityTrajectory)]
pub fn negativity_trajectory(
    n_dim: usize,
    k: f64,
    seed: u32,
    t_max: f64,
    steps: usize,
) -> Result<String, JsValue> {
    to_js(trajectory_view(n_dim, k, seed as u64, t_max, steps))
}

/// Composed n-site CDFs and the n-site medians as JSON.
#[wasm_bindgen(js_name = composedCdf)]
pub fn composed_cdf(
    n_dim: usize,
    k: f64,
    samples: usize,
    seed: u32,
    n_max: u32,
    points: usize,
) -> Result<String, JsValue> {
    to_js(compose_view(n_dim, k, samples, seed as u64, n_max, points))
}
