//! Positive-partial-transpose times (PPTT) of randomly sampled GKSL dynamics.
//!
//! The crate samples qubit and qutrit Lindbladians from unitarily invariant
//! ensembles, propagates the associated semigroups, and records the first time
//! at which the Choi state of the channel has a positive partial transpose.
//! On top of the Monte Carlo layer it provides the strong-Hamiltonian limit
//! generator, the composition law for memories of independent sites, and the
//! statistical fitting used to summarize the resulting distributions.

pub mod basis;
pub mod dynamics;
pub mod ensemble;
mod error;
pub mod generator;
pub mod limit;
pub mod linalg;
pub mod rng;
pub mod sampling;
pub mod statfit;

pub use basis::{gell_mann_basis, OperatorBasis};
pub use dynamics::{
    choi_state, is_ppt_channel, min_pt_eigenvalue, negativity, pptt, propagator, ChoiState,
    Propagator, PpttResult, PpttSearchConfig,
};
pub use ensemble::{
    compose_local_cdf, ecdf_eval, ks_distance, local_pdf_and_ratio, median_xn,
    sample_limit_distribution, sample_pptt_distribution, Ecdf, EmpiricalDistribution, Mode,
};
pub use error::{Error, Result};
pub use generator::{
    dissipator_superop, generator_superop, lindblad_operators, GeneratorSpec,
    LindbladOperatorSet, Superoperator,
};
pub use limit::{limit_generator, limit_lindblad_form, LimitDecomposition};
pub use rng::RngStream;
pub use sampling::{sample_gue, sample_kossakowski, HermitianMatrix, KossakowskiMatrix};
