//! Strong-Hamiltonian limit of `ℒ^{(k,1)}`.
//!
//! In the interaction picture the dissipator rotates with `e^{ikHt}`; its time
//! average for `k → ∞` keeps only the secular terms. Writing
//! `Z^{(n)}_{ij} = Π_i L^{(n)} Π_j` with `Π_i` the eigenprojectors of `H`,
//!
//! ```text
//! ℒ_eff = Σ_n [ Σ_{i,j} Z_ii ρ Z_jj† + Σ_{i≠j} Z_ij ρ Z_ij† − ½ Σ_{i,j} {Z_ij† Z_ij, ρ} ]
//! ```
//!
//! which only depends on `H` through its eigenspaces.

use nalgebra::DMatrix;

use crate::basis::OperatorBasis;
use crate::error::{Error, Result};
use crate::generator::{lindblad_form, lindblad_operators, Superoperator, EIGEN_CLAMP};
use crate::linalg::{c, hermitian_eigen, left_mul, max_abs_diff, right_mul, sandwich, CMatrix};
use crate::sampling::{HermitianMatrix, KossakowskiMatrix};

/// Eigenvalues closer than this (relative to the spectral scale) share an
/// eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Spectral projectors of a Hermitian matrix, one per distinct eigenvalue,
/// ordered by ascending eigenvalue.
pub fn eigenprojectors(h: &HermitianMatrix) -> Vec<CMatrix> {
    let (values, vectors) = hermitian_eigen(h.matrix());
    let n = h.dim();
    let scale = 1.0 + values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let mut projectors: Vec<CMatrix> = Vec::new();
    let mut last: Option<f64> = None;
    for (j, &v) in values.iter().enumerate() {
        let col = vectors.column(j);
        let outer = col * col.adjoint();
        match last {
            Some(prev) if (v - prev).abs() <= DEGENERACY_TOL * scale => {
                *projectors.last_mut().expect("cluster exists") += outer;
            }
            _ => projectors.push(outer.into_owned()),
        }
        last = Some(v);
    }
    debug_assert!(projectors.iter().all(|p| p.nrows() == n));
    projectors
}

/// `ℒ_eff` assembled from the `Z` blocks of the Lindblad operators of `K`.
pub fn limit_generator(
    h: &HermitianMatrix,
    k: &KossakowskiMatrix,
    basis: &OperatorBasis,
) -> Result<Superoperator> {
    let n = basis.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: h.dim(),
        });
    }
    let projectors = eigenprojectors(h);
    let ops = lindblad_operators(k, basis)?.ops;
    let d2 = n * n;
    let mut matrix = CMatrix::zeros(d2, d2);
    let mut decay = CMatrix::zeros(n, n);
    for l in &ops {
        // Σ_{i,j} Z_ii ρ Z_jj† = P ρ P† with P the block-diagonal pinching of L.
        let mut pinched = CMatrix::zeros(n, n);
        for (i, pi) in projectors.iter().enumerate() {
            for (j, pj) in projectors.iter().enumerate() {
                let z = pi * l * pj;
                if i == j {
                    pinched += &z;
                } else {
                    matrix += sandwich(&z, &z.adjoint());
                }
                decay += z.adjoint() * &z;
            }
        }
        matrix += sandwich(&pinched, &pinched.adjoint());
    }
    matrix -= (left_mul(&decay) + right_mul(&decay)) * c(0.5, 0.0);
    Superoperator::new(n, matrix)
}

/// Lindblad-form representation of `ℒ_eff` through the 0/1 matrix `A`.
#[derive(Debug, Clone)]
pub struct LimitDecomposition {
    pub dim: usize,
    /// Eigenprojectors `Π_i` of `H`.
    pub projectors: Vec<CMatrix>,
    /// `z_ops[n][m]` is `Z^{(n)}_m` with `m = i·r + j` for `r` eigenspaces.
    pub z_ops: Vec<Vec<CMatrix>>,
    /// Symmetric `r²×r²` coupling matrix.
    pub a: DMatrix<f64>,
    /// Eigenvalues of `A`, ascending, clamped at zero.
    pub eta: Vec<f64>,
    /// Orthonormal eigenvectors of `A` as columns.
    pub v: DMatrix<f64>,
    /// `Y^{(s,n)} = √η_s Σ_m V_{ms} Z^{(n)}_m`, stored `s`-major.
    pub y_ops: Vec<CMatrix>,
}

impl LimitDecomposition {
    pub fn superoperator(&self) -> Superoperator {
        lindblad_form(self.dim, &self.y_ops)
    }

    pub fn num_eigenspaces(&self) -> usize {
        self.projectors.len()
    }
}

/// `A_{mm'} = 1` iff `m = m'`, or both `m` and `m'` address diagonal blocks.
pub fn coupling_matrix(eigenspaces: usize) -> DMatrix<f64> {
    let r = eigenspaces;
    DMatrix::from_fn(r * r, r * r, |m, mp| {
        let diag_m = m / r == m % r;
        let diag_mp = mp / r == mp % r;
        if m == mp || (diag_m && diag_mp) {
            1.0
        } else {
            0.0
        }
    })
}

pub fn limit_lindblad_form(
    h: &HermitianMatrix,
    k: &KossakowskiMatrix,
    basis: &OperatorBasis,
) -> Result<LimitDecomposition> {
    let n = basis.dim();
    let projectors = eigenprojectors(h);
    let r = projectors.len();
    let ops = lindblad_operators(k, basis)?.ops;
    let z_ops: Vec<Vec<CMatrix>> = ops
        .iter()
        .map(|l| {
            (0..r * r)
                .map(|m| &projectors[m / r] * l * &projectors[m % r])
                .collect()
        })
        .collect();

    let a = coupling_matrix(r);
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..r * r).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let mut eta = Vec::with_capacity(r * r);
    let mut v = DMatrix::zeros(r * r, r * r);
    for (dst, &src) in order.iter().enumerate() {
        let value = eig.eigenvalues[src];
        if value < -EIGEN_CLAMP {
            return Err(Error::Internal(format!(
                "coupling matrix has negative eigenvalue {value:.3e}"
            )));
        }
        eta.push(if value < EIGEN_CLAMP { 0.0 } else { value });
        v.set_column(dst, &eig.eigenvectors.column(src));
    }

    let mut y_ops = Vec::with_capacity(r * r * ops.len());
    for (s, &eta_s) in eta.iter().enumerate() {
        let weight = eta_s.sqrt();
        for zn in &z_ops {
            let mut y = CMatrix::zeros(n, n);
            for (m, z) in zn.iter().enumerate() {
                let coeff = weight * v[(m, s)];
                if coeff != 0.0 {
                    y += z * c(coeff, 0.0);
                }
            }
            y_ops.push(y);
        }
    }

    let decomposition = LimitDecomposition {
        dim: n,
        projectors,
        z_ops,
        a,
        eta,
        v,
        y_ops,
    };
    let direct = limit_generator(h, k, basis)?;
    let rebuilt = decomposition.superoperator();
    let diff = max_abs_diff(direct.matrix(), rebuilt.matrix());
    if diff > 1e-10 * (1.0 + direct.max_abs()) {
        return Err(Error::Internal(format!(
            "Lindblad form of the limit generator disagrees by {diff:.3e}"
        )));
    }
    Ok(decomposition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gell_mann_basis;
    use crate::generator::dissipator_superop;
    use crate::rng::RngStream;
    use crate::sampling::{sample_gue, sample_kossakowski};

    fn random_pair(n: usize, id: u64) -> (HermitianMatrix, KossakowskiMatrix) {
        let mut rng = RngStream::new(515, id).generator();
        (
            sample_gue(n, &mut rng).unwrap(),
            sample_kossakowski(n, &mut rng).unwrap(),
        )
    }

    #[test]
    fn qubit_coupling_matrix_and_spectrum() {
        let a = coupling_matrix(2);
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[1., 0., 0., 1., 0., 1., 0., 0., 0., 0., 1., 0., 1., 0., 0., 1.],
        );
        assert_eq!(a, expected);
        let basis = gell_mann_basis(2).unwrap();
        let (h, k) = random_pair(2, 1);
        let dec = limit_lindblad_form(&h, &k, &basis).unwrap();
        let expected_eta = [0.0, 1.0, 1.0, 2.0];
        for (got, want) in dec.eta.iter().zip(expected_eta) {
            assert!((got - want).abs() < 1e-12);
        }
        // The η = 0 family vanishes identically.
        for y in &dec.y_ops[..3] {
            assert!(crate::linalg::max_abs(y) < 1e-15);
        }
    }

    #[test]
    fn projectors_resolve_identity() {
        let (h, _) = random_pair(3, 4);
        let p = eigenprojectors(&h);
        assert_eq!(p.len(), 3);
        let sum = p.iter().fold(CMatrix::zeros(3, 3), |acc, x| acc + x);
        assert!(max_abs_diff(&sum, &CMatrix::identity(3, 3)) < 1e-12);
        for (i, pi) in p.iter().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                let prod = pi * pj;
                let target = if i == j { pi.clone() } else { CMatrix::zeros(3, 3) };
                assert!(max_abs_diff(&prod, &target) < 1e-12);
            }
        }
    }

    #[test]
    fn scalar_hamiltonian_gives_plain_dissipator() {
        for n in [2usize, 3] {
            let basis = gell_mann_basis(n).unwrap();
            let (_, k) = random_pair(n, 2);
            let h = HermitianMatrix::new(CMatrix::identity(n, n) * c(0.7, 0.0)).unwrap();
            let eff = limit_generator(&h, &k, &basis).unwrap();
            let d = dissipator_superop(&k, &basis).unwrap();
            assert!(max_abs_diff(eff.matrix(), d.matrix()) < 1e-12);
            let dec = limit_lindblad_form(&h, &k, &basis).unwrap();
            assert_eq!(dec.num_eigenspaces(), 1);
        }
    }

    #[test]
    fn lindblad_form_matches_direct_sum() {
        for n in [2usize, 3] {
            let basis = gell_mann_basis(n).unwrap();
            for id in 0..10 {
                let (h, k) = random_pair(n, 10 + id);
                let dec = limit_lindblad_form(&h, &k, &basis).unwrap();
                assert_eq!(dec.y_ops.len(), n * n * (n * n - 1));
                let direct = limit_generator(&h, &k, &basis).unwrap();
                assert!(max_abs_diff(direct.matrix(), dec.superoperator().matrix()) < 1e-10);
                assert!(dec.eta.iter().all(|&e| e >= 0.0));
            }
        }
    }

    #[test]
    fn invariant_under_hamiltonian_rescaling() {
        let basis = gell_mann_basis(3).unwrap();
        let (h, k) = random_pair(3, 6);
        let a = limit_generator(&h, &k, &basis).unwrap();
        let b = limit_generator(&h.scaled(5.0), &k, &basis).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
    }
}
