//! Small dense complex linear-algebra helpers shared by the generator and
//! dynamics code.
//!
//! Vectorization is column stacking throughout: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
//! nalgebra stores matrices column-major, so `vec` is a plain copy of storage.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };
pub const I: C64 = Complex { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Column-stacking vectorization.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, n: usize) -> CMatrix {
    assert_eq!(v.len(), n * n, "vector length is not a square");
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Superoperator of `X -> A X B`.
pub fn sandwich(a: &CMatrix, b: &CMatrix) -> CMatrix {
    b.transpose().kronecker(a)
}

/// Superoperator of `X -> A X`.
pub fn left_mul(a: &CMatrix) -> CMatrix {
    identity(a.nrows()).kronecker(a)
}

/// Superoperator of `X -> X B`.
pub fn right_mul(b: &CMatrix) -> CMatrix {
    b.transpose().kronecker(&identity(b.nrows()))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of a Hermitian matrix, ascending. The strictly lower triangle
/// is ignored, as usual for symmetric eigensolvers.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending and the
/// eigenvector columns permuted accordingly.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// `U diag(d) U†` for real `d`.
pub fn from_spectrum(values: &[f64], vectors: &CMatrix) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    &scaled * vectors.adjoint()
}

/// Unitary `exp(i s H)` for Hermitian `H` given its spectral decomposition.
pub fn unitary_from_spectrum(values: &[f64], vectors: &CMatrix, s: f64) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let phase = Complex::from_polar(1.0, v * s);
        { let mut col = scaled.column_mut(j); col *= phase; }
    }
    &scaled * vectors.adjoint()
}

/// Right eigendecomposition `M = V diag(λ) V⁻¹` of a general complex matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
    pub inverse: CMatrix,
    /// 1-norm condition number of the (column-normalized) eigenvector matrix.
    pub condition: f64,
}

/// Eigendecomposition through the complex Schur form followed by triangular
/// back substitution. Returns `None` when the Schur iteration fails, when the
/// quasi-triangular factor is not triangular, or when the eigenvector matrix
/// is singular.
pub fn eigen_decompose(m: &CMatrix) -> Option<EigenDecomposition> {
    let n = m.nrows();
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 100 * n.max(10))?;
    let (q, t) = schur.unpack();
    let scale = max_abs(&t).max(f64::MIN_POSITIVE);
    for j in 0..n.saturating_sub(1) {
        if t[(j + 1, j)].norm() > 1e-12 * scale {
            return None;
        }
    }
    let small = f64::EPSILON * scale;
    let mut x = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        x[(k, k)] = ONE;
        for j in (0..k).rev() {
            let mut acc = ZERO;
            for l in (j + 1)..=k {
                acc += t[(j, l)] * x[(l, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = c(small, 0.0);
            }
            x[(j, k)] = -acc / denom;
        }
    }
    let mut vectors = q * x;
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col.unscale_mut(norm);
        }
    }
    let inverse = vectors.clone().try_inverse()?;
    let condition = one_norm(&vectors) * one_norm(&inverse);
    if !condition.is_finite() {
        return None;
    }
    let values = (0..n).map(|k| t[(k, k)]).collect();
    Some(EigenDecomposition {
        values,
        vectors,
        inverse,
        condition,
    })
}

pub fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `true` when `m + shift·I` admits a Cholesky factorization, i.e. the
/// Hermitian matrix `m` has all eigenvalues above `-shift`.
pub fn is_psd_with_shift(m: &CMatrix, shift: f64) -> bool {
    // nalgebra's complex Cholesky takes square roots of negative pivots
    // without failing, so the factorization is done here on real pivots.
    let n = m.nrows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)].re + shift;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) {
            return false;
        }
        let d = pivot.sqrt();
        l[(j, j)] = c(d, 0.0);
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    true
}
