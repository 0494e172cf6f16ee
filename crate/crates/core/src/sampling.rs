//! Random ensembles for the Hamiltonian and dissipative parts of a generator.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, hermiticity_residual, trace, CMatrix};
use crate::rng::complex_normal;

const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;

/// Hermitian `N×N` matrix (a Hamiltonian, `ħ = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput("Hamiltonian must be square".into()));
        }
        let residual = hermiticity_residual(&m);
        if residual > HERMITIAN_TOL * (1.0 + crate::linalg::max_abs(&m)) {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (residual {residual:.3e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(&self.0 * c(factor, 0.0))
    }
}

/// Positive semidefinite `(N²−1)×(N²−1)` Kossakowski matrix. Sampled matrices
/// carry `Tr K = N`; hand-built ones only need to be Hermitian and PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct KossakowskiMatrix {
    n: usize,
    matrix: CMatrix,
}

impl KossakowskiMatrix {
    pub fn new(n: usize, matrix: CMatrix) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let d = n * n - 1;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: matrix.nrows(),
            });
        }
        let scale = 1.0 + crate::linalg::max_abs(&matrix);
        let residual = hermiticity_residual(&matrix);
        if residual > HERMITIAN_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "Kossakowski matrix is not Hermitian (residual {residual:.3e})"
            )));
        }
        let min_ev = hermitian_eigenvalues(&matrix)[0];
        if min_ev < -PSD_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "Kossakowski matrix is not positive semidefinite (min eigenvalue {min_ev:.3e})"
            )));
        }
        Ok(Self { n, matrix })
    }

    /// `K(A) = N A†A / Tr(A†A)`; `None` when `A = 0`.
    pub fn from_ginibre(n: usize, a: &CMatrix) -> Option<Result<Self>> {
        let gram = a.adjoint() * a;
        let norm = trace(&gram).re;
        if norm <= 0.0 {
            return None;
        }
        let mut k = gram * c(n as f64 / norm, 0.0);
        // Exact Hermitian symmetry; the product is Hermitian only up to rounding.
        let kt = k.adjoint();
        k = (&k + kt) * c(0.5, 0.0);
        Some(Self::new(n, k))
    }

    /// Depolarizing choice `K = N/(N²−1) · I`.
    pub fn depolarizing(n: usize) -> Result<Self> {
        let d = n * n - 1;
        Self::new(n, CMatrix::identity(d, d) * c(n as f64 / d as f64, 0.0))
    }

    pub fn system_dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }
}

/// GUE draw `H = (G + G†)/2` with `G` i.i.d. complex normal of unit variance:
/// `Var(H_ii) = 1/2`, `Var(Re H_ij) = Var(Im H_ij) = 1/4`.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HermitianMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let h = (&g + g.adjoint()) * c(0.5, 0.0);
    Ok(HermitianMatrix(h))
}

/// Ginibre matrix of size `d×d` with complex normal entries.
pub fn sample_ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| complex_normal(rng))
}

/// Normalized Wishart draw `K = N A†A / Tr(A†A)` with `A` Ginibre of size
/// `(N²−1)×(N²−1)`.
pub fn sample_kossakowski<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<KossakowskiMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    loop {
        let a = sample_ginibre(n * n - 1, rng);
        if let Some(k) = KossakowskiMatrix::from_ginibre(n, &a) {
            return k;
        }
    }
}
