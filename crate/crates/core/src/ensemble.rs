//! Monte Carlo estimation of PPT-time distributions and the composition law
//! for memories made of independent sites.

use serde::{Deserialize, Serialize};

use crate::basis::{gell_mann_basis, OperatorBasis};
use crate::dynamics::{pptt_in_units, PpttResult, PpttSearchConfig};
use crate::error::{Error, Result};
use crate::generator::{generator_superop, GeneratorSpec, Superoperator};
use crate::limit::limit_generator;
use crate::rng::RngStream;
use crate::sampling::{sample_gue, sample_kossakowski};

/// Which rescaled generator is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `ℒ^{(k,1)}`, times in units of `1/γ`.
    P,
    /// `ℒ^{(1,1/k)}`, times in units of `1/α`.
    Q,
    /// The strong-Hamiltonian limit generator, times in units of `1/γ`.
    Limit,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::P => "P",
            Mode::Q => "Q",
            Mode::Limit => "limit",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "p" => Ok(Mode::P),
            "Q" | "q" => Ok(Mode::Q),
            "limit" | "Limit" | "LIMIT" => Ok(Mode::Limit),
            other => Err(Error::InvalidInput(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionMeta {
    pub n_dim: usize,
    /// `α/γ`; infinite for the limit generator.
    pub k: f64,
    pub mode: Mode,
    pub n_samples: usize,
    pub master_seed: u64,
}

/// Sorted finite PPT times plus the number of censored runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    censored_count: usize,
    meta: DistributionMeta,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>, censored_count: usize, mut meta: DistributionMeta) -> Result<Self> {
        if samples.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "samples must be finite and non-negative".into(),
            ));
        }
        samples.sort_by(f64::total_cmp);
        meta.n_samples = samples.len() + censored_count;
        Ok(Self {
            samples,
            censored_count,
            meta,
        })
    }

    pub fn from_results(results: &[PpttResult], meta: DistributionMeta) -> Result<Self> {
        let samples: Vec<f64> = results.iter().filter_map(PpttResult::tau).collect();
        let censored = results.len() - samples.len();
        Self::new(samples, censored, meta)
    }

    /// Distribution without provenance, for externally supplied data.
    pub fn from_values(samples: Vec<f64>) -> Result<Self> {
        let meta = DistributionMeta {
            n_dim: 0,
            k: f64::NAN,
            mode: Mode::P,
            n_samples: samples.len(),
            master_seed: 0,
        };
        Self::new(samples, 0, meta)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn censored_count(&self) -> usize {
        self.censored_count
    }

    pub fn meta(&self) -> &DistributionMeta {
        &self.meta
    }

    pub fn n_total(&self) -> usize {
        self.samples.len() + self.censored_count
    }

    pub fn ecdf(&self) -> Ecdf<'_> {
        Ecdf { dist: self }
    }

    pub fn min(&self) -> Option<f64> {
        self.samples.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.samples.last().copied()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.samples.is_empty() {
            None
        } else {
            Some(self.samples.iter().sum::<f64>() / self.samples.len() as f64)
        }
    }

    /// Quantile with linear interpolation between order statistics
    /// (position `level·(n−1)`), censored runs sitting above every finite
    /// sample.
    pub fn quantile(&self, level: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&level) || self.n_total() == 0 {
            return Err(Error::UnattainableQuantile { level });
        }
        let pos = level * (self.n_total() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        if hi >= self.samples.len() {
            return Err(Error::UnattainableQuantile { level });
        }
        let frac = pos - lo as f64;
        Ok(self.samples[lo] + frac * (self.samples[hi] - self.samples[lo]))
    }

    pub fn median(&self) -> Result<f64> {
        self.quantile(0.5)
    }
}

/// A cumulative distribution function on the time axis.
pub trait CumulativeDistribution {
    fn cdf(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> CumulativeDistribution for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Right-continuous empirical CDF; censored runs count as larger than any
/// finite time.
#[derive(Debug, Clone, Copy)]
pub struct Ecdf<'a> {
    dist: &'a EmpiricalDistribution,
}

impl CumulativeDistribution for Ecdf<'_> {
    fn cdf(&self, x: f64) -> f64 {
        ecdf_eval(self.dist, x)
    }
}

pub fn ecdf_eval(dist: &EmpiricalDistribution, x: f64) -> f64 {
    if dist.n_total() == 0 {
        return 0.0;
    }
    let below = dist.samples.partition_point(|&v| v <= x);
    below as f64 / dist.n_total() as f64
}

/// Joint PPT probability of independent sites, `Π_i P̄^{(i)}(T)`.
pub fn compose_local_cdf(cdfs: &[&dyn CumulativeDistribution], t: f64) -> Result<f64> {
    if cdfs.is_empty() {
        return Err(Error::InvalidInput("at least one site is required".into()));
    }
    Ok(cdfs.iter().map(|c| c.cdf(t)).product())
}

/// `n` identical sites: `(P̄(T))ⁿ`.
pub fn uniform_local_cdf<C: CumulativeDistribution + ?Sized>(cdf: &C, n: u32, t: f64) -> f64 {
    cdf.cdf(t).powi(n as i32)
}

/// Density of the `n`-site PPT time, `n P(τ) P̄(τ)^{n−1}`.
pub fn local_density(single_density: f64, single_cdf: f64, n: u32) -> f64 {
    n as f64 * single_density * single_cdf.powi(n as i32 - 1)
}

/// Equal-width histogram of the finite samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Normalization for densities; includes censored runs.
    pub total: usize,
}

impl Histogram {
    /// Freedman–Diaconis bin width `2·IQR·n^{-1/3}`.
    pub fn freedman_diaconis(dist: &EmpiricalDistribution) -> Result<Self> {
        let xs = dist.samples();
        if xs.len() < 2 {
            return Err(Error::InvalidInput(
                "at least two finite samples are needed for a histogram".into(),
            ));
        }
        let finite = EmpiricalDistribution::from_values(xs.to_vec())?;
        let iqr = finite.quantile(0.75)? - finite.quantile(0.25)?;
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        let span = hi - lo;
        let mut width = 2.0 * iqr / (xs.len() as f64).cbrt();
        if !(width > 0.0) {
            width = if span > 0.0 { span / (xs.len() as f64).sqrt() } else { 1.0 };
        }
        let bins = if span > 0.0 { ((span / width).ceil() as usize).max(1) } else { 1 };
        Ok(Self::with_bins(dist, lo, lo + bins as f64 * width, bins))
    }

    pub fn with_bins(dist: &EmpiricalDistribution, lo: f64, hi: f64, bins: usize) -> Self {
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
        let mut counts = vec![0usize; bins];
        for &x in dist.samples() {
            if x < lo || x > hi {
                continue;
            }
            let idx = (((x - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Self {
            edges,
            counts,
            total: dist.n_total(),
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn density_at(&self, x: f64) -> f64 {
        let lo = self.edges[0];
        let hi = *self.edges.last().expect("non-empty edges");
        if x < lo || x > hi || self.total == 0 {
            return 0.0;
        }
        let idx = (((x - lo) / self.bin_width()) as usize).min(self.counts.len() - 1);
        self.counts[idx] as f64 / (self.total as f64 * self.bin_width())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDensity {
    pub density: f64,
    /// `density / cdf`; `None` where the cdf vanishes.
    pub ratio: Option<f64>,
}

/// Density and density-to-cdf ratio of the `n`-site PPT time at `x`, with the
/// single-site density taken from a Freedman–Diaconis histogram.
pub fn local_pdf_and_ratio(dist: &EmpiricalDistribution, n: u32, x: f64) -> Result<LocalDensity> {
    if n == 0 {
        return Err(Error::InvalidInput("number of sites must be >= 1".into()));
    }
    let hist = Histogram::freedman_diaconis(dist)?;
    let p = hist.density_at(x);
    let cdf = ecdf_eval(dist, x);
    let density = local_density(p, cdf, n);
    let joint_cdf = cdf.powi(n as i32);
    let ratio = (joint_cdf > 0.0).then(|| density / joint_cdf);
    Ok(LocalDensity { density, ratio })
}

/// Median of the `n`-site PPT time, `X_n = P̄^{-1}(2^{-1/n})`.
pub fn median_xn(dist: &EmpiricalDistribution, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("number of sites must be >= 1".into()));
    }
    dist.quantile(0.5_f64.powf(1.0 / n as f64))
}

/// Two-sample Kolmogorov–Smirnov distance between sorted samples.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut worst = 0.0_f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        worst = worst.max((i as f64 / na - j as f64 / nb).abs());
    }
    worst
}

/// `sup_x |F(x) − G(x)|` for right-continuous step functions that can only
/// jump at `points`.
pub fn sup_distance<F, G>(points: &[f64], f: &F, g: &G) -> f64
where
    F: CumulativeDistribution + ?Sized,
    G: CumulativeDistribution + ?Sized,
{
    points
        .iter()
        .map(|&x| (f.cdf(x) - g.cdf(x)).abs())
        .fold(0.0, f64::max)
}

/// Generator for one Monte Carlo sample. The stream is consumed by `H` first
/// and then by `K`.
pub fn sample_generator(
    n_dim: usize,
    k: f64,
    mode: Mode,
    stream: RngStream,
    basis: &OperatorBasis,
) -> Result<Superoperator> {
    let mut rng = stream.generator();
    let h = sample_gue(n_dim, &mut rng)?;
    let kos = sample_kossakowski(n_dim, &mut rng)?;
    match mode {
        Mode::P => generator_superop(&GeneratorSpec::dissipation_units(h, kos, k)?, basis),
        Mode::Q => generator_superop(&GeneratorSpec::hamiltonian_units(h, kos, k)?, basis),
        Mode::Limit => limit_generator(&h, &kos, basis),
    }
}

/// PPT time of one sample. Every mode searches the generator normalized to
/// unit dissipative strength, so `cfg` is always read in units of `1/γ`; the
/// Q-mode result is then expressed in units of `1/α`.
pub fn sample_pptt(
    n_dim: usize,
    k: f64,
    mode: Mode,
    stream: RngStream,
    basis: &OperatorBasis,
    cfg: &PpttSearchConfig,
) -> Result<PpttResult> {
    let generator = sample_generator(n_dim, k, mode, stream, basis)?;
    let rate = if mode == Mode::Q { k } else { 1.0 };
    pptt_in_units(&generator, rate, cfg)
}

fn validate_request(n_dim: usize, k: f64, mode: Mode, n_samples: usize) -> Result<()> {
    if !(2..=3).contains(&n_dim) {
        return Err(Error::InvalidInput(format!(
            "system dimension must be 2 or 3, got {n_dim}"
        )));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be >= 1".into()));
    }
    if mode != Mode::Limit && !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("k must be finite and >= 0, got {k}")));
    }
    if mode == Mode::Q && k == 0.0 {
        return Err(Error::InvalidInput(
            "Q mode needs k > 0 (gamma = 1/k diverges at k = 0)".into(),
        ));
    }
    Ok(())
}

/// Per-sample results ordered by `sample_id`. With the `parallel` feature the
/// samples are spread over the current rayon pool; the output does not depend
/// on the number of workers.
pub fn run_samples(
    n_dim: usize,
    k: f64,
    mode: Mode,
    n_samples: usize,
    master_seed: u64,
    cfg: &PpttSearchConfig,
) -> Result<Vec<PpttResult>> {
    validate_request(n_dim, k, mode, n_samples)?;
    cfg.validate()?;
    let basis = gell_mann_basis(n_dim)?;
    let one = |id: u64| sample_pptt(n_dim, k, mode, RngStream::new(master_seed, id), &basis, cfg);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_samples as u64).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_samples as u64).map(one).collect()
    }
}

/// Empirical distribution of `ℒ^{(k,1)}` (mode P) or `ℒ^{(1,1/k)}` (mode Q)
/// PPT times.
pub fn sample_pptt_distribution(
    n_dim: usize,
    k: f64,
    mode: Mode,
    n_samples: usize,
    master_seed: u64,
    cfg: &PpttSearchConfig,
) -> Result<EmpiricalDistribution> {
    let results = run_samples(n_dim, k, mode, n_samples, master_seed, cfg)?;
    let meta = DistributionMeta {
        n_dim,
        k: if mode == Mode::Limit { f64::INFINITY } else { k },
        mode,
        n_samples,
        master_seed,
    };
    EmpiricalDistribution::from_results(&results, meta)
}

/// Empirical distribution of PPT times of the limit generator.
pub fn sample_limit_distribution(
    n_dim: usize,
    n_samples: usize,
    master_seed: u64,
    cfg: &PpttSearchConfig,
) -> Result<EmpiricalDistribution> {
    sample_pptt_distribution(n_dim, f64::INFINITY, Mode::Limit, n_samples, master_seed, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(values: &[f64], censored: usize) -> EmpiricalDistribution {
        let meta = DistributionMeta {
            n_dim: 2,
            k: 0.0,
            mode: Mode::P,
            n_samples: 0,
            master_seed: 0,
        };
        EmpiricalDistribution::new(values.to_vec(), censored, meta).unwrap()
    }

    /// Quantiles of Exp(1) at midpoints: a dense deterministic sample.
    fn exp_sample(n: usize) -> EmpiricalDistribution {
        let xs: Vec<f64> = (0..n)
            .map(|i| -(1.0 - (i as f64 + 0.5) / n as f64).ln())
            .collect();
        dist(&xs, 0)
    }

    #[test]
    fn ecdf_counting() {
        let d = dist(&[3.0, 1.0, 2.0], 0);
        assert_eq!(d.samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(ecdf_eval(&d, 0.5), 0.0);
        assert!((ecdf_eval(&d, 2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(ecdf_eval(&d, 3.0), 1.0);
        assert_eq!(ecdf_eval(&d, 10.0), 1.0);
    }

    #[test]
    fn censored_runs_cap_the_ecdf() {
        let d = dist(&[1.0, 2.0, 3.0], 1);
        assert_eq!(d.n_total(), 4);
        assert_eq!(ecdf_eval(&d, 100.0), 0.75);
        assert!(matches!(d.quantile(0.9), Err(Error::UnattainableQuantile { .. })));
        assert!(d.quantile(0.5).is_ok());
    }

    #[test]
    fn rejects_negative_samples() {
        let meta = DistributionMeta {
            n_dim: 2,
            k: 0.0,
            mode: Mode::P,
            n_samples: 1,
            master_seed: 0,
        };
        assert!(EmpiricalDistribution::new(vec![-1.0], 0, meta).is_err());
    }

    #[test]
    fn single_site_composition_is_the_ecdf() {
        let d = dist(&[0.5, 1.0, 1.5, 2.0], 0);
        let e = d.ecdf();
        for x in [0.2, 0.7, 1.0, 1.9, 3.0] {
            assert_eq!(compose_local_cdf(&[&e], x).unwrap(), ecdf_eval(&d, x));
        }
        assert!(compose_local_cdf(&[], 1.0).is_err());
    }

    #[test]
    fn analytic_two_site_composition() {
        let f = |t: f64| 1.0 - (-t).exp();
        let v = compose_local_cdf(&[&f, &f], 2f64.ln()).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        assert!((uniform_local_cdf(&f, 2, 2f64.ln()) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn composition_non_increasing_in_sites() {
        let d = exp_sample(500);
        let e = d.ecdf();
        for x in [0.1, 0.5, 1.0, 2.0] {
            let mut prev = 1.0;
            for n in 1..=10 {
                let v = uniform_local_cdf(&e, n, x);
                assert!(v <= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn analytic_local_density() {
        let x = 2f64.ln();
        let p = (-x).exp();
        let cdf = 1.0 - p;
        assert!((local_density(p, cdf, 2) - 0.5).abs() < 1e-15);
        assert_eq!(local_density(p, cdf, 1), p);
    }

    #[test]
    fn ratio_is_extensive() {
        let d = exp_sample(2000);
        for x in [0.3, 0.8, 1.5] {
            let one = local_pdf_and_ratio(&d, 1, x).unwrap();
            let three = local_pdf_and_ratio(&d, 3, x).unwrap();
            let (r1, r3) = (one.ratio.unwrap(), three.ratio.unwrap());
            assert!((r3 - 3.0 * r1).abs() <= 1e-12 * r3.abs());
        }
        let below = local_pdf_and_ratio(&d, 2, -1.0).unwrap();
        assert_eq!(below.ratio, None);
    }

    #[test]
    fn single_site_density_matches_histogram() {
        let d = exp_sample(20_000);
        let hist = Histogram::freedman_diaconis(&d).unwrap();
        let got = local_pdf_and_ratio(&d, 1, 1.0).unwrap().density;
        assert_eq!(got, hist.density_at(1.0));
        // Histogram density of Exp(1) near x = 1.
        assert!((got - (-1f64).exp()).abs() < 0.02, "{got}");
        let integral: f64 = hist.counts.iter().sum::<usize>() as f64 / hist.total as f64;
        assert!((integral - 1.0).abs() < 1e-12);
    }

    #[test]
    fn median_xn_against_closed_form() {
        let d = exp_sample(200_000);
        assert!((median_xn(&d, 1).unwrap() - 2f64.ln()).abs() < 1e-3);
        let x2 = -(1.0 - 0.5f64.sqrt()).ln();
        assert!((median_xn(&d, 2).unwrap() - x2).abs() < 1e-3);
        assert_eq!(median_xn(&d, 1).unwrap(), d.median().unwrap());
    }

    #[test]
    fn linear_interpolation_quantile() {
        let d = dist(&[1.0, 2.0, 3.0, 4.0], 0);
        assert!((d.median().unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(d.quantile(0.0).unwrap(), 1.0);
        assert_eq!(d.quantile(1.0).unwrap(), 4.0);
    }

    #[test]
    fn ks_distance_basics() {
        assert_eq!(ks_distance(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(ks_distance(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert!((ks_distance(&[1.0, 2.0, 3.0, 4.0], &[2.5, 3.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn request_validation() {
        let cfg = PpttSearchConfig::default();
        assert!(run_samples(4, 1.0, Mode::P, 10, 0, &cfg).is_err());
        assert!(run_samples(2, 0.0, Mode::Q, 10, 0, &cfg).is_err());
        assert!(run_samples(2, -1.0, Mode::P, 10, 0, &cfg).is_err());
        assert!(run_samples(2, 1.0, Mode::P, 0, 0, &cfg).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = PpttSearchConfig::default();
        let a = sample_pptt_distribution(2, 1.0, Mode::P, 20, 9, &cfg).unwrap();
        let b = sample_pptt_distribution(2, 1.0, Mode::P, 20, 9, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_total(), 20);
    }
}
