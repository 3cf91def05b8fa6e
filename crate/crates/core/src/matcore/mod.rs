//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here works on `ComplexMatrix`, a row-major `d x d` array of
//! `Complex64`. Hermitian matrices are diagonalised with cyclic Jacobi sweeps
//! and all matrix functions (exponential, logarithm) go through the resulting
//! eigenbasis.

mod density;
mod eig;
mod matrix;

pub use density::{
    frobenius_norm, partial_trace, relative_entropy, trace_distance, trace_norm, DensityOperator,
    StateRole, Subsystem, DENSITY_TOL,
};
pub use eig::{
    exp_hermitian_generator, hermitian_eig, log_psd, SpectralDecomposition, DEGENERACY_GAP,
};
pub use matrix::{
    basis_vector, inner, kron, kron_vec, norm, sigma_x, sigma_y, sigma_z, ComplexMatrix, C64,
    HERMITIAN_TOL, UNITARY_TOL,
};

pub(crate) use eig::check_hermitian;
#[allow(unused_imports)]
pub(crate) use matrix::{ONE, ZERO};
