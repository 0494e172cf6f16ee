//! Anderson–Darling goodness-of-fit statistic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AndersonDarling {
    pub a2: f64,
    pub n: usize,
    /// Some `cdf(x_(i))` fell outside `[1e-12, 1 − 1e-12]` and was clamped.
    pub clamped: bool,
}

/// `A² = −n − (1/n) Σ (2i−1) [ln u_i + ln(1 − u_{n+1−i})]` with `u_i = F(x_(i))`.
pub fn anderson_darling<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<AndersonDarling> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("Anderson-Darling needs at least one sample".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("samples must be finite".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let mut clamped = false;
    let u: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let v = cdf(x);
            if !(CLAMP..=1.0 - CLAMP).contains(&v) {
                clamped = true;
            }
            if v.is_nan() {
                CLAMP
            } else {
                v.clamp(CLAMP, 1.0 - CLAMP)
            }
        })
        .collect();
    let n = u.len();
    let nf = n as f64;
    let sum: f64 = (0..n)
        .map(|i| (2 * i + 1) as f64 * (u[i].ln() + (1.0 - u[n - 1 - i]).ln()))
        .sum();
    Ok(AndersonDarling {
        a2: -nf - sum / nf,
        n,
        clamped,
    })
}
