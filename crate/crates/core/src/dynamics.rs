//! Semigroup propagation, Choi states and the PPT time search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::Superoperator;
use crate::linalg::{
    c, eigen_decompose, hermitian_eigenvalues, hermiticity_residual, is_psd_with_shift, trace,
    CMatrix, EigenDecomposition,
};

/// Eigenvector matrices worse conditioned than this fall back to Padé.
pub const MAX_EIGEN_CONDITION: f64 = 1e8;
const TRACE_TOL: f64 = 1e-9;
const CHANNEL_TRACE_TOL: f64 = 1e-8;

/// `t ↦ exp(ℒt)` for a fixed generator. The spectral form is reused across
/// time points; Padé scaling-and-squaring covers defective or badly
/// conditioned generators.
#[derive(Debug, Clone)]
pub struct Propagator {
    generator: Superoperator,
    spectral: Option<EigenDecomposition>,
}

impl Propagator {
    pub fn new(generator: &Superoperator) -> Self {
        let spectral = eigen_decompose(generator.matrix())
            .filter(|eig| eig.condition < MAX_EIGEN_CONDITION);
        Self {
            generator: generator.clone(),
            spectral,
        }
    }

    pub fn is_spectral(&self) -> bool {
        self.spectral.is_some()
    }

    pub fn generator(&self) -> &Superoperator {
        &self.generator
    }

    /// `exp(ℒt)`; the spectral result is checked for trace preservation and
    /// recomputed with Padé if it drifted.
    pub fn at(&self, t: f64) -> Superoperator {
        let dim = self.generator.dim();
        if let Some(eig) = &self.spectral {
            let mut scaled = eig.vectors.clone();
            for (j, lambda) in eig.values.iter().enumerate() {
                { let mut col = scaled.column_mut(j); col *= (lambda * t).exp(); }
            }
            let phi = Superoperator::new(dim, scaled * &eig.inverse).expect("square propagator");
            if phi.trace_defect() <= TRACE_TOL {
                return phi;
            }
        }
        self.pade(t)
    }

    fn pade(&self, t: f64) -> Superoperator {
        let m = (self.generator.matrix() * c(t, 0.0)).exp();
        Superoperator::new(self.generator.dim(), m).expect("square propagator")
    }
}

/// `Φ_t = exp(ℒt)`.
pub fn propagator(generator: &Superoperator, t: f64) -> Result<Superoperator> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(Propagator::new(generator).at(t))
}

/// Bipartite `N²×N²` state on `S⊗S′`, index `a·N + i` for `|a⟩_S|i⟩_{S′}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    dim: usize,
    matrix: CMatrix,
}

impl ChoiState {
    /// Wraps a Hermitian unit-trace matrix.
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        let d2 = dim * dim;
        if matrix.nrows() != d2 || matrix.ncols() != d2 {
            return Err(Error::DimensionMismatch {
                expected: d2,
                actual: matrix.nrows(),
            });
        }
        let herm = hermiticity_residual(&matrix);
        if herm > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "state is not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = trace(&matrix);
        if (tr - c(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidInput(format!("state trace is {tr}, expected 1")));
        }
        Ok(Self { dim, matrix })
    }

    /// `|Ψ_max⟩⟨Ψ_max|` with `|Ψ_max⟩ = N^{-1/2} Σ_i |i⟩|i⟩`.
    pub fn maximally_entangled(dim: usize) -> Self {
        let d2 = dim * dim;
        let mut m = CMatrix::zeros(d2, d2);
        let w = c(1.0 / dim as f64, 0.0);
        for a in 0..dim {
            for b in 0..dim {
                m[(a * dim + a, b * dim + b)] = w;
            }
        }
        Self { dim, matrix: m }
    }

    /// `p |Ψ_max⟩⟨Ψ_max| + (1 − p) I/N²`.
    pub fn isotropic(dim: usize, p: f64) -> Self {
        let d2 = dim * dim;
        let mut m = Self::maximally_entangled(dim).matrix * c(p, 0.0);
        for i in 0..d2 {
            m[(i, i)] += c((1.0 - p) / d2 as f64, 0.0);
        }
        Self { dim, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)[0]
    }

    /// Partial transpose on the second factor.
    pub fn partial_transpose(&self) -> CMatrix {
        let n = self.dim;
        let d2 = n * n;
        CMatrix::from_fn(d2, d2, |row, col| {
            let (a, i) = (row / n, row % n);
            let (b, j) = (col / n, col % n);
            self.matrix[(a * n + j, b * n + i)]
        })
    }

    pub fn pt_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.partial_transpose())
    }
}

fn check_trace_preserving(phi: &Superoperator) -> Result<()> {
    let defect = phi.trace_defect();
    if defect > CHANNEL_TRACE_TOL {
        return Err(Error::InvalidChannel(defect));
    }
    Ok(())
}

/// `(Φ ⊗ Id)(|Ψ_max⟩⟨Ψ_max|)`, obtained by reshuffling the superoperator:
/// `ρ[(a,i),(b,j)] = Φ[a + bN, i + jN] / N`.
pub fn choi_state(phi: &Superoperator) -> Result<ChoiState> {
    check_trace_preserving(phi)?;
    let n = phi.dim();
    let d2 = n * n;
    let m = phi.matrix();
    let w = 1.0 / n as f64;
    let mut rho = CMatrix::from_fn(d2, d2, |row, col| {
        let (a, i) = (row / n, row % n);
        let (b, j) = (col / n, col % n);
        m[(a + b * n, i + j * n)] * w
    });
    // Remove the rounding-level anti-Hermitian part.
    let adj = rho.adjoint();
    rho = (&rho + adj) * c(0.5, 0.0);
    ChoiState::new(n, rho)
}

/// Partially transposed Choi matrix built straight from the superoperator,
/// `ρ^{T_{S′}}[(a,i),(b,j)] = Φ[a + bN, j + iN] / N`. Hot path of the search.
fn pt_choi_matrix(phi: &Superoperator) -> CMatrix {
    let n = phi.dim();
    let d2 = n * n;
    let m = phi.matrix();
    let w = 0.5 / n as f64;
    // Hermitian part; the symmetric eigensolver and Cholesky only read one triangle.
    let raw = |row: usize, col: usize| {
        let (a, i) = (row / n, row % n);
        let (b, j) = (col / n, col % n);
        m[(a + b * n, j + i * n)]
    };
    CMatrix::from_fn(d2, d2, |row, col| (raw(row, col) + raw(col, row).conj()) * w)
}

/// `𝒩 = ½ Σ_l (|λ_l| − λ_l)` over the partial-transpose spectrum.
pub fn negativity(rho: &ChoiState) -> f64 {
    rho.pt_eigenvalues()
        .iter()
        .filter(|&&v| v < 0.0)
        .map(|v| -v)
        .sum()
}

/// Smallest eigenvalue of the partial transpose; PPT iff `≥ −psd_tol`.
pub fn min_pt_eigenvalue(rho: &ChoiState) -> f64 {
    rho.pt_eigenvalues()[0]
}

pub fn is_ppt_channel(phi: &Superoperator, psd_tol: f64) -> Result<bool> {
    let rho = choi_state(phi)?;
    Ok(min_pt_eigenvalue(&rho) >= -psd_tol)
}

/// Search parameters, in the time units of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PpttSearchConfig {
    pub t_max: f64,
    pub coarse_step: f64,
    pub bisect_tol: f64,
    pub psd_tol: f64,
}

impl Default for PpttSearchConfig {
    fn default() -> Self {
        Self {
            t_max: 50.0,
            coarse_step: 0.05,
            bisect_tol: 1e-6,
            psd_tol: 1e-10,
        }
    }
}

impl PpttSearchConfig {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.t_max, self.coarse_step, self.bisect_tol, self.psd_tol]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !all_positive {
            return Err(Error::InvalidInput(
                "search parameters must be finite and positive".into(),
            ));
        }
        if self.coarse_step >= self.t_max {
            return Err(Error::InvalidInput("coarse_step must be below t_max".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PpttResult {
    Found { tau: f64 },
    Censored { t_max: f64 },
}

impl PpttResult {
    pub fn tau(&self) -> Option<f64> {
        match *self {
            PpttResult::Found { tau } => Some(tau),
            PpttResult::Censored { .. } => None,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, PpttResult::Censored { .. })
    }

    fn rescale(self, factor: f64) -> Self {
        match self {
            PpttResult::Found { tau } => PpttResult::Found { tau: tau * factor },
            PpttResult::Censored { t_max } => PpttResult::Censored {
                t_max: t_max * factor,
            },
        }
    }
}

fn check_generator(generator: &Superoperator) -> Result<()> {
    let residual = generator.trace_residual();
    if residual > 1e-10 * (1.0 + generator.max_abs()) {
        return Err(Error::InvalidInput(format!(
            "generator does not preserve the trace (residual {residual:.3e})"
        )));
    }
    Ok(())
}

/// First time at which `exp(ℒt)` is a PPT channel.
///
/// Scans `t = j·coarse_step` for the first PPT point, then bisects the
/// bracketing interval down to `bisect_tol` and reports its midpoint. Once a
/// semigroup element is PPT every later one is, so the first crossing is the
/// PPT time.
pub fn pptt(generator: &Superoperator, cfg: &PpttSearchConfig) -> Result<PpttResult> {
    cfg.validate()?;
    check_generator(generator)?;
    let prop = Propagator::new(generator);
    let is_ppt = |t: f64| is_psd_with_shift(&pt_choi_matrix(&prop.at(t)), cfg.psd_tol);

    if is_ppt(0.0) {
        return Ok(PpttResult::Found { tau: 0.0 });
    }
    let steps = (cfg.t_max / cfg.coarse_step).ceil() as u64;
    let mut lo = 0.0;
    for j in 1..=steps {
        let t = (j as f64 * cfg.coarse_step).min(cfg.t_max);
        if is_ppt(t) {
            let mut hi = t;
            while hi - lo > cfg.bisect_tol {
                let mid = 0.5 * (lo + hi);
                if is_ppt(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(PpttResult::Found {
                tau: 0.5 * (lo + hi),
            });
        }
        lo = t;
    }
    Ok(PpttResult::Censored { t_max: cfg.t_max })
}

/// PPT time of `ℒ` found by searching `rate·ℒ` with `cfg`, so that the grid
/// and tolerances are read in units of `1/rate`. Uses `τ(ℒ) = rate·τ(rate·ℒ)`.
pub fn pptt_in_units(
    generator: &Superoperator,
    rate: f64,
    cfg: &PpttSearchConfig,
) -> Result<PpttResult> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidInput(format!("rate must be positive, got {rate}")));
    }
    Ok(pptt(&generator.scaled(rate), cfg)?.rescale(rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gell_mann_basis;
    use crate::generator::{dissipator_superop, generator_superop, GeneratorSpec};
    use crate::linalg::{max_abs_diff, CVector};
    use crate::rng::RngStream;
    use crate::sampling::{sample_gue, sample_kossakowski, KossakowskiMatrix};

    fn depolarizer(n: usize) -> Superoperator {
        let basis = gell_mann_basis(n).unwrap();
        dissipator_superop(&KossakowskiMatrix::depolarizing(n).unwrap(), &basis).unwrap()
    }

    fn random_generator(n: usize, ratio: f64, id: u64) -> Superoperator {
        let basis = gell_mann_basis(n).unwrap();
        let mut rng = RngStream::new(4242, id).generator();
        let h = sample_gue(n, &mut rng).unwrap();
        let k = sample_kossakowski(n, &mut rng).unwrap();
        generator_superop(&GeneratorSpec::new(h, k, ratio, 1.0).unwrap(), &basis).unwrap()
    }

    #[test]
    fn zero_generator_gives_identity() {
        let phi = propagator(&Superoperator::zeros(2), 3.0).unwrap();
        assert!(max_abs_diff(phi.matrix(), Superoperator::identity(2).matrix()) < 1e-15);
    }

    #[test]
    fn depolarizing_closed_form() {
        let l = depolarizer(2);
        let rate = 4.0 / 3.0;
        let rho = CMatrix::from_row_slice(2, 2, &[c(0.7, 0.), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.)]);
        for t in [0.0, 0.1, 0.8, 2.5] {
            let phi = propagator(&l, t).unwrap();
            let p = (-rate * t).exp();
            let expected = &rho * c(p, 0.) + CMatrix::identity(2, 2) * c((1.0 - p) / 2.0, 0.);
            assert!(max_abs_diff(&phi.apply(&rho), &expected) < 1e-9);
        }
    }

    #[test]
    fn semigroup_law() {
        for n in [2usize, 3] {
            let l = random_generator(n, 1.3, 1);
            let a = propagator(&l, 0.3).unwrap();
            let b = propagator(&l, 0.9).unwrap();
            let ab = propagator(&l, 1.2).unwrap();
            assert!(max_abs_diff(ab.matrix(), a.compose(&b).matrix()) < 1e-8);
            assert!(ab.trace_defect() < 1e-9);
        }
    }

    #[test]
    fn spectral_and_pade_agree() {
        let l = random_generator(3, 20.0, 3);
        let prop = Propagator::new(&l);
        assert!(prop.is_spectral());
        for t in [0.05, 0.7, 3.0] {
            let pade = (l.matrix() * c(t, 0.)).exp();
            assert!(max_abs_diff(prop.at(t).matrix(), &pade) < 1e-10);
        }
    }

    #[test]
    fn negative_time_is_rejected() {
        assert!(propagator(&Superoperator::zeros(2), -1.0).is_err());
    }

    #[test]
    fn identity_channel_choi_is_maximally_entangled() {
        for n in [2usize, 3] {
            let rho = choi_state(&Superoperator::identity(n)).unwrap();
            assert!(max_abs_diff(rho.matrix(), ChoiState::maximally_entangled(n).matrix()) < 1e-15);
            assert!((negativity(&rho) - (n as f64 - 1.0) / 2.0).abs() < 1e-10);
        }
        let rho = choi_state(&Superoperator::identity(2)).unwrap();
        assert!((min_pt_eigenvalue(&rho) + 0.5).abs() < 1e-12);
        assert!(!is_ppt_channel(&Superoperator::identity(2), 1e-10).unwrap());
    }

    fn complete_depolarizer(n: usize) -> Superoperator {
        // ρ ↦ Tr[ρ] I/N : vec(I)/N · vec(I)ᵀ
        let d2 = n * n;
        let mut id = CVector::zeros(d2);
        for i in 0..n {
            id[i + i * n] = c(1.0, 0.0);
        }
        let m = &id * id.transpose() * c(1.0 / n as f64, 0.);
        Superoperator::new(n, m).unwrap()
    }

    #[test]
    fn complete_depolarizer_choi_is_maximally_mixed() {
        for n in [2usize, 3] {
            let phi = complete_depolarizer(n);
            let rho = choi_state(&phi).unwrap();
            let d2 = n * n;
            let expected = CMatrix::identity(d2, d2) * c(1.0 / d2 as f64, 0.);
            assert!(max_abs_diff(rho.matrix(), &expected) < 1e-15);
            assert!((min_pt_eigenvalue(&rho) - 1.0 / d2 as f64).abs() < 1e-12);
            assert!(is_ppt_channel(&phi, 1e-10).unwrap());
        }
    }

    #[test]
    fn depolarizing_choi_is_isotropic() {
        for (n, rate) in [(2usize, 4.0 / 3.0), (3, 9.0 / 8.0)] {
            let l = depolarizer(n);
            for t in [0.2, 1.0] {
                let rho = choi_state(&propagator(&l, t).unwrap()).unwrap();
                let p = (-rate * t).exp();
                assert!(max_abs_diff(rho.matrix(), ChoiState::isotropic(n, p).matrix()) < 1e-9);
            }
        }
    }

    #[test]
    fn werner_negativity_and_threshold() {
        let rho = ChoiState::isotropic(2, 0.5);
        assert!((negativity(&rho) - 0.125).abs() < 1e-12);
        let threshold = ChoiState::isotropic(2, 1.0 / 3.0);
        assert!(min_pt_eigenvalue(&threshold).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_zero_negativity() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.6, 0.), c(0.2, 0.1), c(0.2, -0.1), c(0.4, 0.)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0., 0.3), c(0., -0.3), c(0.5, 0.)]);
        let rho = ChoiState::new(2, a.kronecker(&b)).unwrap();
        assert!(negativity(&rho) < 1e-12);
    }

    #[test]
    fn depolarizing_ppt_window() {
        let l = depolarizer(2);
        assert!(is_ppt_channel(&propagator(&l, 0.9).unwrap(), 1e-10).unwrap());
        assert!(!is_ppt_channel(&propagator(&l, 0.7).unwrap(), 1e-10).unwrap());
    }

    #[test]
    fn non_trace_preserving_channel_is_rejected() {
        let phi = Superoperator::identity(2).scaled(0.5);
        assert!(matches!(choi_state(&phi), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn pptt_of_depolarizers() {
        let cfg = PpttSearchConfig::default();
        let tau2 = pptt(&depolarizer(2), &cfg).unwrap().tau().unwrap();
        assert!((tau2 - 0.75 * 3f64.ln()).abs() < 1e-5, "{tau2}");
        let tau3 = pptt(&depolarizer(3), &cfg).unwrap().tau().unwrap();
        assert!((tau3 - 8.0 / 9.0 * 4f64.ln()).abs() < 1e-4, "{tau3}");
        let doubled = pptt(&depolarizer(2).scaled(2.0), &cfg).unwrap().tau().unwrap();
        assert!((doubled - tau2 / 2.0).abs() < 1e-5);
    }

    #[test]
    fn pure_dephasing_is_censored() {
        let basis = gell_mann_basis(2).unwrap();
        let mut km = CMatrix::zeros(3, 3);
        km[(2, 2)] = c(2.0, 0.);
        let k = KossakowskiMatrix::new(2, km).unwrap();
        let l = dissipator_superop(&k, &basis).unwrap();
        // The coherence decays as e^{-2t}; PT has eigenvalue −e^{-2t}/2, which
        // only crosses the tolerance −psd_tol asymptotically.
        let short = PpttSearchConfig {
            t_max: 5.0,
            ..PpttSearchConfig::default()
        };
        assert_eq!(pptt(&l, &short).unwrap(), PpttResult::Censored { t_max: 5.0 });
        let cfg = PpttSearchConfig::default();
        let tau = pptt(&l, &cfg).unwrap().tau().unwrap();
        let crossing = (0.5 / cfg.psd_tol).ln() / 2.0;
        assert!((tau - crossing).abs() < 1e-5, "{tau} vs {crossing}");
    }

    #[test]
    fn invalid_generator_is_rejected() {
        let l = Superoperator::identity(2);
        assert!(matches!(
            pptt(&l, &PpttSearchConfig::default()),
            Err(Error::InvalidInput(_))
        ));
        let bad = PpttSearchConfig {
            coarse_step: 60.0,
            ..Default::default()
        };
        assert!(pptt(&depolarizer(2), &bad).is_err());
    }

    #[test]
    fn rescaled_search_reports_generator_units() {
        let cfg = PpttSearchConfig::default();
        let direct = pptt(&depolarizer(2), &cfg).unwrap().tau().unwrap();
        let slow = depolarizer(2).scaled(1e-3);
        let tau = pptt_in_units(&slow, 1e3, &cfg).unwrap().tau().unwrap();
        assert!((tau / 1e3 - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn negativity_is_non_increasing() {
        for id in 0..5 {
            let l = random_generator(2, 2.0, 50 + id);
            let prop = Propagator::new(&l);
            let mut prev = f64::INFINITY;
            for step in 0..40 {
                let rho = choi_state(&prop.at(step as f64 * 0.05)).unwrap();
                let neg = negativity(&rho);
                assert!(neg <= prev + 1e-9);
                prev = neg;
            }
        }
    }
}
