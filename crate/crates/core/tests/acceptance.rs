//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any of them fails.

use std::process::ExitCode;
use std::time::Instant;

use pptt_core::dynamics::pptt_in_units;
use pptt_core::ensemble::{run_samples, sample_generator};
use pptt_core::linalg::{hermitian_eigenvalues, CMatrix};
use pptt_core::statfit::{
    bootstrap_over_grid, data_points, fit_f_theta, fit_power_law, mle_fit, Family, ThetaFit,
    ThreeParam, TimeStatistic, DEFAULT_K_GRID, DEFAULT_RESAMPLES,
};
use pptt_core::*;

const SAMPLES: usize = 2000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn cfg() -> PpttSearchConfig {
    PpttSearchConfig::default()
}

fn gamma3(dist: &EmpiricalDistribution) -> Result<[f64; 3]> {
    let fit = mle_fit(dist.samples(), Family::Gamma3)?;
    match fit.params {
        ThreeParam::Gamma3(p) => Ok([p.shape, p.scale, p.threshold]),
        other => Err(Error::Internal(format!("unexpected family {other:?}"))),
    }
}

fn depolarizer(n: usize) -> Result<Superoperator> {
    dissipator_superop(&KossakowskiMatrix::depolarizing(n)?, &gell_mann_basis(n)?)
}

/// First grid time at which the smallest partial-transpose eigenvalue of the
/// Choi state is non-negative, refined by bisection on the eigenvalue itself.
fn brute_force_threshold(l: &Superoperator, lo: f64, hi: f64, step: f64) -> Result<f64> {
    let min_pt = |t: f64| -> Result<f64> { Ok(min_pt_eigenvalue(&choi_state(&propagator(l, t)?)?)) };
    let mut prev = lo;
    let mut t = lo;
    while t <= hi {
        if min_pt(t)? >= 0.0 {
            let (mut a, mut b) = (prev, t);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if min_pt(m)? >= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        prev = t;
        t += step;
    }
    Err(Error::Internal("no crossing on the grid".into()))
}

fn ac1() -> Result<Outcome> {
    let exact2 = 0.75 * 3f64.ln();
    let exact3 = 8.0 / 9.0 * 4f64.ln();
    let l2 = depolarizer(2)?;
    let l3 = depolarizer(3)?;
    let tau2 = pptt(&l2, &cfg())?.tau().unwrap_or(f64::NAN);
    let tau3 = pptt(&l3, &cfg())?.tau().unwrap_or(f64::NAN);
    let brute2 = brute_force_threshold(&l2, 0.0, 2.0, 1e-3)?;
    let brute3 = brute_force_threshold(&l3, 0.0, 2.0, 1e-3)?;
    let pass = (tau2 - exact2).abs() < 1e-5
        && (tau3 - exact3).abs() < 1e-4
        && (brute2 - exact2).abs() < 1e-8
        && (brute3 - exact3).abs() < 1e-8;
    Ok(check(
        pass,
        format!(
            "qubit {tau2:.7} (exact {exact2:.7}, PT scan {brute2:.9}); qutrit {tau3:.7} (exact {exact3:.7}, PT scan {brute3:.9})"
        ),
    ))
}

fn ac2() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for id in 0..20u64 {
        let n = if id % 2 == 0 { 2 } else { 3 };
        let basis = gell_mann_basis(n)?;
        let k = [0.0, 1.0, 5.0, 20.0][(id % 4) as usize];
        let l = sample_generator(n, k, Mode::P, RngStream::new(202, id), &basis)?;
        let base = pptt(&l, &cfg())?
            .tau()
            .ok_or_else(|| Error::Internal("censored base sample".into()))?;
        for beta in [0.5, 2.0, 10.0] {
            let scaled = pptt(&l.scaled(beta), &cfg())?
                .tau()
                .ok_or_else(|| Error::Internal("censored scaled sample".into()))?;
            worst = worst.max((scaled * beta / base - 1.0).abs());
        }
    }
    Ok(check(worst <= 1e-4, format!("max relative error {worst:.2e} over 20 generators x 3 factors")))
}

struct Samples {
    q0: EmpiricalDistribution,
    q1000: EmpiricalDistribution,
    q5: EmpiricalDistribution,
    q_limit: EmpiricalDistribution,
    t0: EmpiricalDistribution,
    t1000: EmpiricalDistribution,
    t_limit: EmpiricalDistribution,
}

impl Samples {
    fn draw() -> Result<Self> {
        let c = cfg();
        Ok(Self {
            q0: sample_pptt_distribution(2, 0.0, Mode::P, SAMPLES, 1001, &c)?,
            q1000: sample_pptt_distribution(2, 1000.0, Mode::P, SAMPLES, 1002, &c)?,
            q5: sample_pptt_distribution(2, 5.0, Mode::P, SAMPLES, 1003, &c)?,
            q_limit: sample_limit_distribution(2, SAMPLES, 1004, &c)?,
            t0: sample_pptt_distribution(3, 0.0, Mode::P, SAMPLES, 2001, &c)?,
            t1000: sample_pptt_distribution(3, 1000.0, Mode::P, SAMPLES, 2002, &c)?,
            t_limit: sample_limit_distribution(3, SAMPLES, 2004, &c)?,
        })
    }
}

fn ac3(s: &Samples) -> Result<Outcome> {
    let [beta, sigma, mu] = gamma3(&s.q0)?;
    let pass = within(mu, 0.814, 0.854) && within(beta, 2.46, 3.33) && within(sigma, 0.074, 0.100);
    Ok(check(
        pass,
        format!("beta {beta:.4}, sigma {sigma:.5}, mu {mu:.5} (censored {})", s.q0.censored_count()),
    ))
}

fn ac4(s: &Samples) -> Result<Outcome> {
    let [beta, sigma, mu] = gamma3(&s.q1000)?;
    Ok(check(
        within(mu, 0.814, 0.834),
        format!("mu {mu:.5} (beta {beta:.4}, sigma {sigma:.5})"),
    ))
}

fn ac5(s: &Samples) -> Result<Outcome> {
    let mu0 = gamma3(&s.t0)?[2];
    let mu1000 = gamma3(&s.t1000)?[2];
    Ok(check(
        within(mu0, 1.30, 1.36) && within(mu1000, 1.21, 1.26),
        format!("mu(k=0) {mu0:.5}, mu(k=1000) {mu1000:.5}"),
    ))
}

fn ac6(s: &Samples) -> Result<Outcome> {
    let d2 = ks_distance(s.q_limit.samples(), s.q1000.samples());
    let d3 = ks_distance(s.t_limit.samples(), s.t1000.samples());
    let d5 = ks_distance(s.q_limit.samples(), s.q5.samples());
    Ok(check(
        d2 < 0.05 && d3 < 0.06 && d5 < 0.08,
        format!("KS qubit {d2:.4}, qutrit {d3:.4}, qubit limit vs k=5 {d5:.4}"),
    ))
}

fn theta_fit(n_dim: usize, seed: u64, stat: TimeStatistic) -> Result<ThetaFit> {
    let grid = bootstrap_over_grid(n_dim, &DEFAULT_K_GRID, SAMPLES, seed, &cfg(), DEFAULT_RESAMPLES)?;
    fit_f_theta(&data_points(&grid, stat))
}

fn ac7() -> Result<Outcome> {
    let fit = theta_fit(2, 7000, TimeStatistic::Median)?;
    let [t1, t2, t3] = fit.values();
    let pass = within(t1, 1.03, 1.07) && within(t2, 0.85, 0.87) && within(t3, 1.05 / 2.0, 1.05 * 2.0);
    Ok(check(pass, format!("theta = ({t1:.4}, {t2:.4}, {t3:.3})")))
}

fn ac8() -> Result<Outcome> {
    let grid = bootstrap_over_grid(3, &DEFAULT_K_GRID, SAMPLES, 8000, &cfg(), DEFAULT_RESAMPLES)?;
    let median = fit_f_theta(&data_points(&grid, TimeStatistic::Median))?;
    let min = fit_f_theta(&data_points(&grid, TimeStatistic::Min))?;
    let (m2, n2) = (median.values()[1], min.values()[1]);
    Ok(check(
        within(m2, 1.36, 1.41) && within(n2, 1.22, 1.26),
        format!(
            "median theta = ({:.4}, {m2:.4}, {:.3}); min theta = ({:.4}, {n2:.4}, {:.3})",
            median.values()[0],
            median.values()[2],
            min.values()[0],
            min.values()[2]
        ),
    ))
}

fn ac9(s: &Samples) -> Result<Outcome> {
    let points: Vec<(f64, f64)> = (1..=10)
        .map(|n| Ok((n as f64, median_xn(&s.q1000, n)?)))
        .collect::<Result<_>>()?;
    let fit = fit_power_law(&points)?;
    let (a, b) = (fit.theta1.value, fit.theta2.value);
    Ok(check(
        within(a, 0.82, 0.87) && within(b, 0.065, 0.088),
        format!("Theta1 {a:.4}, Theta2 {b:.4}"),
    ))
}

/// Partial transpose of the Choi matrix of `Φ` straight from the definition
/// `Σ_{ij} Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|` with the reference system transposed.
fn pt_choi(phi: &Superoperator) -> CMatrix {
    let n = phi.dim();
    let mut out = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(i, j)] = linalg::ONE;
            let img = phi.apply(&e) / linalg::c(n as f64, 0.0);
            for a in 0..n {
                for b in 0..n {
                    // output index a,b; reference transposed: |j⟩⟨i|
                    out[(a * n + j, b * n + i)] = img[(a, b)];
                }
            }
        }
    }
    out
}

/// First time the two-site product channel is PPT, found by scanning the
/// spectrum of the Kronecker product of the single-site partial transposes.
fn joint_pptt(l1: &Superoperator, l2: &Superoperator, tol: f64) -> Result<f64> {
    let joint_min = |t: f64| -> Result<f64> {
        let a = pt_choi(&propagator(l1, t)?);
        let b = pt_choi(&propagator(l2, t)?);
        Ok(hermitian_eigenvalues(&a.kronecker(&b))[0])
    };
    let step = 0.05;
    let mut t = step;
    let mut prev = 0.0;
    while t <= 20.0 {
        if joint_min(t)? >= -tol {
            let (mut a, mut b) = (prev, t);
            while b - a > 1e-6 {
                let m = 0.5 * (a + b);
                if joint_min(m)? >= -tol {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        prev = t;
        t += step;
    }
    Err(Error::Internal("joint channel not PPT by t = 20".into()))
}

fn ac10() -> Result<Outcome> {
    let basis = gell_mann_basis(2)?;
    let c = cfg();
    let mut joint = Vec::new();
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut worst_pair = 0.0_f64;
    for id in 0..500u64 {
        let l1 = sample_generator(2, 1.0, Mode::P, RngStream::new(1010, id), &basis)?;
        let l2 = sample_generator(2, 1.0, Mode::P, RngStream::new(1011, id), &basis)?;
        let t1 = pptt(&l1, &c)?.tau().unwrap_or(f64::INFINITY);
        let t2 = pptt(&l2, &c)?.tau().unwrap_or(f64::INFINITY);
        let tj = joint_pptt(&l1, &l2, c.psd_tol)?;
        worst_pair = worst_pair.max((tj - t1.max(t2)).abs());
        joint.push(tj);
        first.push(t1);
        second.push(t2);
    }
    let d1 = EmpiricalDistribution::from_values(first)?;
    let d2 = EmpiricalDistribution::from_values(second)?;
    let dj = EmpiricalDistribution::from_values(joint)?;
    let product = |t: f64| ecdf_eval(&d1, t) * ecdf_eval(&d2, t);
    let joint_cdf = |t: f64| ecdf_eval(&dj, t);
    let mut points: Vec<f64> = d1.samples().to_vec();
    points.extend_from_slice(d2.samples());
    points.extend_from_slice(dj.samples());
    let ks = ensemble::sup_distance(&points, &joint_cdf, &product);
    Ok(check(
        ks < 0.08,
        format!("KS(joint, product of marginals) {ks:.4}; max |joint - max(t1,t2)| {worst_pair:.2e}"),
    ))
}

fn ac11() -> Result<Outcome> {
    let c = cfg();
    let mut trace_worst = 0.0_f64;
    let mut choi_worst = 0.0_f64;
    let mut neg_increase = 0.0_f64;
    for n in [2usize, 3] {
        let basis = gell_mann_basis(n)?;
        for (mode, k) in [(Mode::P, 0.0), (Mode::P, 10.0), (Mode::Q, 3.0), (Mode::Limit, 0.0)] {
            for id in 0..100u64 {
                let l = sample_generator(n, k, mode, RngStream::new(1111, id), &basis)?;
                trace_worst = trace_worst.max(l.trace_residual());
                if id < 20 {
                    let prop = Propagator::new(&l);
                    let mut last = f64::INFINITY;
                    for step in 0..=60 {
                        let rho = choi_state(&prop.at(step as f64 * 0.05))?;
                        choi_worst = choi_worst.min(rho.min_eigenvalue());
                        let neg = negativity(&rho);
                        neg_increase = neg_increase.max(neg - last);
                        last = neg;
                    }
                }
            }
        }
    }

    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool");
    let several = rayon::ThreadPoolBuilder::new().num_threads(4).build().expect("pool");
    let a = single.install(|| run_samples(2, 2.0, Mode::P, 300, 77, &c))?;
    let b = several.install(|| run_samples(2, 2.0, Mode::P, 300, 77, &c))?;
    let deterministic = a == b;

    let mut duality = 0.0_f64;
    for k in [0.5, 2.0, 10.0, 1000.0] {
        let p = run_samples(2, k, Mode::P, 200, 12, &c)?;
        let q = run_samples(2, k, Mode::Q, 200, 12, &c)?;
        for (p, q) in p.iter().zip(&q) {
            if let (Some(tp), Some(tq)) = (p.tau(), q.tau()) {
                duality = duality.max((tp - tq / k).abs() / tp);
            } else if p.is_censored() != q.is_censored() {
                duality = f64::INFINITY;
            }
        }
    }
    // The rescaled search is the same one the sampler uses.
    let basis = gell_mann_basis(2)?;
    let l = sample_generator(2, 4.0, Mode::Q, RngStream::new(12, 0), &basis)?;
    let direct = pptt_in_units(&l, 4.0, &c)?.tau().unwrap_or(f64::NAN);
    let sampled = run_samples(2, 4.0, Mode::Q, 1, 12, &c)?[0].tau().unwrap_or(f64::NAN);

    let pass = trace_worst < 1e-10
        && choi_worst >= -1e-9
        && neg_increase <= 1e-9
        && deterministic
        && duality <= 1e-12
        && direct == sampled;
    Ok(check(
        pass,
        format!(
            "trace {trace_worst:.1e}, min Choi eig {choi_worst:.1e}, negativity increase {neg_increase:.1e}, workers 1 vs 4 identical {deterministic}, P/Q duality {duality:.1e}"
        ),
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let samples = Samples::draw();
    let run = |id: usize, f: &dyn Fn() -> Result<Outcome>| {
        let t = Instant::now();
        let outcome = f().unwrap_or_else(|e| check(false, format!("error: {e}")));
        println!(
            "criterion {id:>2}: {} [{:.1}s] {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            outcome.detail
        );
        outcome.pass
    };
    let mut results = vec![run(1, &ac1), run(2, &ac2)];
    match &samples {
        Ok(s) => {
            results.push(run(3, &|| ac3(s)));
            results.push(run(4, &|| ac4(s)));
            results.push(run(5, &|| ac5(s)));
            results.push(run(6, &|| ac6(s)));
        }
        Err(e) => {
            for id in 3..=6 {
                println!("criterion {id:>2}: FAIL sampling error: {e}");
                results.push(false);
            }
        }
    }
    results.push(run(7, &ac7));
    results.push(run(8, &ac8));
    match &samples {
        Ok(s) => results.push(run(9, &|| ac9(s))),
        Err(e) => {
            println!("criterion  9: FAIL sampling error: {e}");
            results.push(false);
        }
    }
    results.push(run(10, &ac10));
    results.push(run(11, &ac11));
    let passed = results.iter().filter(|&&p| p).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.1}s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
