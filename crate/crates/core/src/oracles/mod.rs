//! Independent ground truth for the closed forms.
//!
//! [`ed`] diagonalizes the Hermitian tilted XY chain on small rings;
//! [`fd`] differentiates the exact generating function numerically.

pub mod ed;
pub mod fd;

pub use ed::{build_hamiltonian, build_sector_hamiltonian, cgf_from_ed, DenseSpectrumProblem};
pub use fd::{fd_cumulants, fd_cumulants_checked, fd_lambda_derivative, FdEstimate};
