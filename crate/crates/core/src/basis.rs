//! Orthonormal traceless operator basis (generalized Gell-Mann matrices).

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

/// Ordered basis `{F_n}` of the traceless Hermitian `N×N` matrices with
/// `Tr[F_m F_n] = δ_mn`.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `max_{m,n} |Tr[F_m† F_n] − δ_mn|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (m, fm) in self.elements.iter().enumerate() {
            for (n, fn_) in self.elements.iter().enumerate() {
                let overlap = fm.conjugate().component_mul(fn_).sum();
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((overlap - c(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Generalized Gell-Mann matrices for `SU(N)`: every symmetric off-diagonal
/// element, then every antisymmetric one (both over pairs `j < k` in
/// lexicographic order), then the `N − 1` diagonal ones.
pub fn gell_mann_basis(n: usize) -> Result<OperatorBasis> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let norm = std::f64::consts::FRAC_1_SQRT_2;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| ((j + 1)..n).map(move |k| (j, k)))
        .collect();
    let mut elements = Vec::with_capacity(n * n - 1);
    for &(j, k) in &pairs {
        let mut m = CMatrix::zeros(n, n);
        m[(j, k)] = c(norm, 0.0);
        m[(k, j)] = c(norm, 0.0);
        elements.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = CMatrix::zeros(n, n);
        m[(j, k)] = c(0.0, -norm);
        m[(k, j)] = c(0.0, norm);
        elements.push(m);
    }
    for l in 1..n {
        let scale = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..l {
            m[(i, i)] = c(scale, 0.0);
        }
        m[(l, l)] = c(-(l as f64) * scale, 0.0);
        elements.push(m);
    }
    Ok(OperatorBasis { dim: n, elements })
}
