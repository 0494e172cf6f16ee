use pptt_core::ensemble::{run_samples, Histogram};
use pptt_core::statfit::{
    anderson_darling, bootstrap_over_grid, data_points, fit_f_theta, fit_power_law, mle_fit,
    AndersonDarling, Family, GridPoint, MleFit, PowerFit, ThetaFit, TimeStatistic, DEFAULT_K_GRID,
};
use pptt_core::{ecdf_eval, median_xn, EmpiricalDistribution, Mode, PpttResult};
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::output::{header, num, read_samples, write_csv, write_json, Provenance, SAMPLE_COLUMNS};

fn with_workers<T>(workers: &WorkerArgs, f: impl FnOnce() -> T + Send) -> CliResult<T>
where
    T: Send,
{
    match workers.workers {
        None => Ok(f()),
        Some(0) => Err(CliError::validation("--workers must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::validation(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn sample_rows(results: &[PpttResult], k: f64, n_dim: usize, mode: Mode) -> Vec<Vec<String>> {
    results
        .iter()
        .enumerate()
        .map(|(id, r)| {
            let (tau, censored) = match r.tau() {
                Some(t) => (num(t), "0"),
                None => (String::new(), "1"),
            };
            vec![
                id.to_string(),
                num(k),
                n_dim.to_string(),
                mode.as_str().to_string(),
                tau,
                censored.to_string(),
            ]
        })
        .collect()
}

fn write_histogram(path: &std::path::Path, head: &str, results: &[PpttResult]) -> CliResult<()> {
    let dist = EmpiricalDistribution::from_results(results, placeholder_meta())?;
    let hist = Histogram::freedman_diaconis(&dist)?;
    let rows = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, c)| vec![num(hist.edges[i]), num(hist.edges[i + 1]), c.to_string()]);
    write_csv(Some(path), head, &["bin_left", "bin_right", "count"], rows)
}

fn placeholder_meta() -> pptt_core::ensemble::DistributionMeta {
    pptt_core::ensemble::DistributionMeta {
        n_dim: 0,
        k: f64::NAN,
        mode: Mode::P,
        n_samples: 0,
        master_seed: 0,
    }
}

fn emit_samples<C: Serialize>(
    command: &str,
    config: &C,
    results: &[PpttResult],
    k: f64,
    n_dim: usize,
    mode: Mode,
    out: Option<&std::path::Path>,
    hist: Option<&std::path::Path>,
) -> CliResult<()> {
    let head = header(command, config)?;
    write_csv(out, &head, &SAMPLE_COLUMNS, sample_rows(results, k, n_dim, mode))?;
    if let Some(path) = hist {
        write_histogram(path, &head, results)?;
    }
    Ok(())
}

pub fn sample(args: &SampleArgs) -> CliResult<()> {
    let mode = match args.mode {
        ModeArg::P => Mode::P,
        ModeArg::Q => Mode::Q,
    };
    let cfg = args.search.config();
    let results = with_workers(&args.workers, || {
        run_samples(args.n_dim, args.k, mode, args.samples, args.seed, &cfg)
    })??;
    emit_samples(
        "sample",
        args,
        &results,
        args.k,
        args.n_dim,
        mode,
        args.out.as_deref(),
        args.hist.as_deref(),
    )
}

pub fn limit_sample(args: &LimitSampleArgs) -> CliResult<()> {
    let cfg = args.search.config();
    let results = with_workers(&args.workers, || {
        run_samples(args.n_dim, f64::INFINITY, Mode::Limit, args.samples, args.seed, &cfg)
    })??;
    emit_samples(
        "limit-sample",
        args,
        &results,
        f64::INFINITY,
        args.n_dim,
        Mode::Limit,
        args.out.as_deref(),
        args.hist.as_deref(),
    )
}

#[derive(Debug, Serialize)]
struct FamilyReport {
    #[serde(flatten)]
    fit: MleFit,
    anderson_darling: AndersonDarling,
}

#[derive(Debug, Serialize)]
struct FitDistReport {
    #[serde(flatten)]
    provenance: Provenance,
    n_finite: usize,
    censored_count: usize,
    fits: Vec<FamilyReport>,
    /// Family with the larger log-likelihood.
    preferred: Option<Family>,
}

pub fn fit_dist(args: &FitDistArgs) -> CliResult<()> {
    let dist = read_samples(&args.from)?;
    let families: &[Family] = match args.family {
        FamilyArg::Gamma3 => &[Family::Gamma3],
        FamilyArg::Lognormal3 => &[Family::Lognormal3],
        FamilyArg::Both => &[Family::Gamma3, Family::Lognormal3],
    };
    let mut fits = Vec::new();
    for &family in families {
        let fit = mle_fit(dist.samples(), family)?;
        let ad = anderson_darling(dist.samples(), |x| fit.params.cdf(x))?;
        fits.push(FamilyReport {
            fit,
            anderson_darling: ad,
        });
    }
    let preferred = fits
        .iter()
        .max_by(|a, b| a.fit.log_likelihood.total_cmp(&b.fit.log_likelihood))
        .map(|f| f.fit.params.family());
    let report = FitDistReport {
        provenance: Provenance::new("fit-dist", args)?,
        n_finite: dist.samples().len(),
        censored_count: dist.censored_count(),
        fits,
        preferred,
    };
    write_json(args.out.as_deref(), &report)
}

#[derive(Debug, Serialize)]
struct FitTimesReport {
    #[serde(flatten)]
    provenance: Provenance,
    statistic: TimeStatistic,
    grid: Vec<GridPoint>,
    fit: ThetaFit,
}

pub fn fit_times(args: &FitTimesArgs) -> CliResult<()> {
    let grid: Vec<f64> = args.k_grid.clone().unwrap_or_else(|| DEFAULT_K_GRID.to_vec());
    let statistic = match args.statistic {
        StatisticArg::Median => TimeStatistic::Median,
        StatisticArg::Mean => TimeStatistic::Mean,
        StatisticArg::Min => TimeStatistic::Min,
    };
    let cfg = args.search.config();
    let series = with_workers(&args.workers, || {
        bootstrap_over_grid(args.n_dim, &grid, args.samples, args.seed, &cfg, args.resamples)
    })??;
    let points = data_points(&series, statistic);
    let fit = fit_f_theta(&points)?;
    if let Some(path) = &args.residuals {
        let head = header("fit-times", args)?;
        let rows = points.iter().map(|p| {
            let fitted = fit.eval(p.x);
            vec![
                num(p.x),
                num(p.value),
                num(p.error),
                num(fitted),
                num(p.value - fitted),
            ]
        });
        write_csv(Some(path), &head, &["k", "value", "error", "fitted", "residual"], rows)?;
    }
    let report = FitTimesReport {
        provenance: Provenance::new("fit-times", args)?,
        statistic,
        grid: series,
        fit,
    };
    write_json(args.out.as_deref(), &report)
}

#[derive(Debug, Serialize)]
struct ComposeReport {
    #[serde(flatten)]
    provenance: Provenance,
    x_n: Vec<(u32, f64)>,
    fit: Option<PowerFit>,
}

pub fn compose(args: &ComposeArgs) -> CliResult<()> {
    if args.n_max == 0 {
        return Err(CliError::validation("--n-max must be at least 1"));
    }
    if args.points < 2 {
        return Err(CliError::validation("--points must be at least 2"));
    }
    let dist = read_samples(&args.from)?;
    let (lo, hi) = match (dist.min(), dist.max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(CliError::validation("sample file has no finite PPT times")),
    };
    let head = header("compose", args)?;
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=args.n_max).map(|n| format!("cdf_{n}")));
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let rows = (0..args.points).map(|i| {
        let t = lo + (hi - lo) * i as f64 / (args.points - 1) as f64;
        let single = ecdf_eval(&dist, t);
        let mut row = vec![num(t)];
        row.extend((1..=args.n_max).map(|n| num(single.powi(n as i32))));
        row
    });
    write_csv(args.out.as_deref(), &head, &column_refs, rows)?;

    let x_n: Vec<(u32, f64)> = (1..=args.n_max)
        .map(|n| Ok((n, median_xn(&dist, n)?)))
        .collect::<Result<_, pptt_core::Error>>()?;
    if let Some(path) = &args.xn_out {
        let rows = x_n.iter().map(|&(n, x)| vec![n.to_string(), num(x)]);
        write_csv(Some(path), &head, &["n", "x_n"], rows)?;
    }
    let fit = if x_n.len() >= 3 {
        let pts: Vec<(f64, f64)> = x_n.iter().map(|&(n, x)| (n as f64, x)).collect();
        Some(fit_power_law(&pts)?)
    } else {
        None
    };
    if let Some(path) = &args.report {
        let report = ComposeReport {
            provenance: Provenance::new("compose", args)?,
            x_n,
            fit,
        };
        write_json(Some(path), &report)?;
    }
    Ok(())
}
