//! GKSL generators as superoperator matrices.
//!
//! `ℒ = −iα[H, ·] + γ 𝒟_K`, with
//! `𝒟_K(ρ) = Σ_mn K_mn (F_n ρ F_m† − ½{F_m† F_n, ρ})`, represented on
//! column-stacked density matrices.

use crate::basis::OperatorBasis;
use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigen, identity, left_mul, max_abs, right_mul, sandwich, unvectorize,
    vectorize, CMatrix, I, ZERO,
};
use crate::sampling::{HermitianMatrix, KossakowskiMatrix};

/// Eigenvalues of `K` below this are treated as zero.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// Linear map on `N×N` matrices stored as an `N²×N²` matrix acting on
/// column-stacked vectors. Used for generators and for propagators alike.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        let d2 = dim * dim;
        if matrix.nrows() != d2 || matrix.ncols() != d2 {
            return Err(Error::DimensionMismatch {
                expected: d2,
                actual: matrix.nrows(),
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: identity(dim * dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(rho)), self.dim)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * c(factor, 0.0),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Superoperator) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// Largest entry of `vec(I)ᵀ M`: zero for a generator that preserves the
    /// trace. For a propagator use [`Superoperator::trace_defect`].
    pub fn trace_residual(&self) -> f64 {
        let n = self.dim;
        (0..n * n)
            .map(|col| {
                (0..n)
                    .map(|i| self.matrix[(i + i * n, col)])
                    .sum::<crate::linalg::C64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of `vec(I)ᵀ Φ − vec(I)ᵀ`: zero for a trace-preserving map.
    pub fn trace_defect(&self) -> f64 {
        let n = self.dim;
        (0..n * n)
            .map(|col| {
                let s: crate::linalg::C64 = (0..n).map(|i| self.matrix[(i + i * n, col)]).sum();
                let target = if col % (n + 1) == 0 { 1.0 } else { 0.0 };
                (s - c(target, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }
}

impl std::ops::Add for &Superoperator {
    type Output = Superoperator;

    fn add(self, rhs: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

/// `(H, K, α, γ)` defining `ℒ^{(α,γ)}_{H,K}`.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub hamiltonian: HermitianMatrix,
    pub kossakowski: KossakowskiMatrix,
    pub alpha: f64,
    pub gamma: f64,
}

impl GeneratorSpec {
    pub fn new(
        hamiltonian: HermitianMatrix,
        kossakowski: KossakowskiMatrix,
        alpha: f64,
        gamma: f64,
    ) -> Result<Self> {
        if hamiltonian.dim() != kossakowski.system_dim() {
            return Err(Error::DimensionMismatch {
                expected: kossakowski.system_dim(),
                actual: hamiltonian.dim(),
            });
        }
        if !(alpha >= 0.0 && gamma >= 0.0) || !alpha.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "alpha and gamma must be finite and non-negative (got {alpha}, {gamma})"
            )));
        }
        if alpha == 0.0 && gamma == 0.0 {
            return Err(Error::DegenerateGenerator);
        }
        Ok(Self {
            hamiltonian,
            kossakowski,
            alpha,
            gamma,
        })
    }

    /// `ℒ^{(k,1)}`: dissipative strength fixed to one, times in `1/γ` units.
    pub fn dissipation_units(h: HermitianMatrix, k: KossakowskiMatrix, ratio: f64) -> Result<Self> {
        Self::new(h, k, ratio, 1.0)
    }

    /// `ℒ^{(1,1/k)}`: Hamiltonian strength fixed to one, times in `1/α` units.
    pub fn hamiltonian_units(h: HermitianMatrix, k: KossakowskiMatrix, ratio: f64) -> Result<Self> {
        if ratio <= 0.0 {
            return Err(Error::InvalidInput(
                "Hamiltonian units need k > 0 (gamma = 1/k)".into(),
            ));
        }
        Self::new(h, k, 1.0, 1.0 / ratio)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// `k = α/γ`, infinite for a purely Hamiltonian generator.
    pub fn ratio(&self) -> f64 {
        if self.gamma == 0.0 {
            f64::INFINITY
        } else {
            self.alpha / self.gamma
        }
    }
}

/// Lindblad operators `L^{(n)} = √λ_n Σ_m conj(U_mn) F_m` from `K = U Λ U†`.
#[derive(Debug, Clone)]
pub struct LindbladOperatorSet {
    pub ops: Vec<CMatrix>,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl LindbladOperatorSet {
    /// Superoperator of `Σ_n (L ρ L† − ½{L†L, ρ})`.
    pub fn superoperator(&self, dim: usize) -> Superoperator {
        lindblad_form(dim, &self.ops)
    }

    /// `Σ_n L^{(n)†} L^{(n)}`.
    pub fn anticommutator_part(&self, dim: usize) -> CMatrix {
        self.ops
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, l| acc + l.adjoint() * l)
    }
}

/// Superoperator of `ρ ↦ Σ_l (L_l ρ L_l† − ½{L_l†L_l, ρ})`.
pub fn lindblad_form(dim: usize, ops: &[CMatrix]) -> Superoperator {
    let d2 = dim * dim;
    let mut m = CMatrix::zeros(d2, d2);
    let mut decay = CMatrix::zeros(dim, dim);
    for l in ops {
        m += sandwich(l, &l.adjoint());
        decay += l.adjoint() * l;
    }
    m -= (left_mul(&decay) + right_mul(&decay)) * c(0.5, 0.0);
    Superoperator { dim, matrix: m }
}

fn check_dims(k: &KossakowskiMatrix, basis: &OperatorBasis) -> Result<()> {
    if k.system_dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            actual: k.system_dim(),
        });
    }
    Ok(())
}

/// Diagonalize `K`, clamp tiny eigenvalues to zero and build the associated
/// Lindblad operators.
pub fn lindblad_operators(
    k: &KossakowskiMatrix,
    basis: &OperatorBasis,
) -> Result<LindbladOperatorSet> {
    check_dims(k, basis)?;
    let residual = crate::linalg::hermiticity_residual(k.matrix());
    if residual > 1e-12 * (1.0 + max_abs(k.matrix())) {
        return Err(Error::InvalidInput(format!(
            "Kossakowski matrix is not Hermitian (residual {residual:.3e})"
        )));
    }
    let (mut eigenvalues, eigenvectors) = hermitian_eigen(k.matrix());
    let n = basis.dim();
    let mut ops = Vec::with_capacity(eigenvalues.len());
    for (col, lambda) in eigenvalues.iter_mut().enumerate() {
        if *lambda < EIGEN_CLAMP {
            *lambda = 0.0;
        }
        let weight = lambda.sqrt();
        let mut op = CMatrix::zeros(n, n);
        for (m, f) in basis.elements().iter().enumerate() {
            let coeff = eigenvectors[(m, col)].conj() * weight;
            if coeff != ZERO {
                op += f * coeff;
            }
        }
        ops.push(op);
    }
    Ok(LindbladOperatorSet {
        ops,
        eigenvalues,
        eigenvectors,
    })
}

/// Matrix of `𝒟_K` computed directly from the double sum over the basis.
pub fn dissipator_superop(k: &KossakowskiMatrix, basis: &OperatorBasis) -> Result<Superoperator> {
    check_dims(k, basis)?;
    let n = basis.dim();
    let d2 = n * n;
    let f = basis.elements();
    let km = k.matrix();
    let mut jump = CMatrix::zeros(d2, d2);
    let mut decay = CMatrix::zeros(n, n);
    for (m, fm) in f.iter().enumerate() {
        let fm_dag = fm.adjoint();
        for (nn, fn_) in f.iter().enumerate() {
            let kmn = km[(m, nn)];
            if kmn == ZERO {
                continue;
            }
            jump += sandwich(fn_, &fm_dag) * kmn;
            decay += (&fm_dag * fn_) * kmn;
        }
    }
    let matrix = jump - (left_mul(&decay) + right_mul(&decay)) * c(0.5, 0.0);
    Ok(Superoperator { dim: n, matrix })
}

/// Superoperator of `−i[H, ·]`.
pub fn commutator_superop(h: &HermitianMatrix) -> Superoperator {
    let hm = h.matrix();
    let matrix = (left_mul(hm) - right_mul(hm)) * (-I);
    Superoperator {
        dim: h.dim(),
        matrix,
    }
}

/// `ℒ = −iα[H, ·] + γ 𝒟_K`.
pub fn generator_superop(spec: &GeneratorSpec, basis: &OperatorBasis) -> Result<Superoperator> {
    if spec.alpha == 0.0 && spec.gamma == 0.0 {
        return Err(Error::DegenerateGenerator);
    }
    check_dims(&spec.kossakowski, basis)?;
    let n = spec.dim();
    let mut matrix = CMatrix::zeros(n * n, n * n);
    if spec.alpha != 0.0 {
        matrix += commutator_superop(&spec.hamiltonian).matrix * c(spec.alpha, 0.0);
    }
    if spec.gamma != 0.0 {
        matrix += dissipator_superop(&spec.kossakowski, basis)?.matrix * c(spec.gamma, 0.0);
    }
    Ok(Superoperator { dim: n, matrix })
}
