//! Dense complex linear algebra: solves, eigen-decompositions, norms.

mod eig;
mod hermitian;
pub mod io;
mod lu;
mod matrix;
mod norms;

pub use eig::{eig, eigenvalues, schur, EigenDecomposition, Schur};
pub use hermitian::{eigh, eigvalsh, HermitianEigen};
pub use lu::{inverse, solve, LuFactors};
pub use matrix::ComplexMatrix;
pub use norms::{inv_sqrt_hpd, operator_norm_2, schur_bound};
pub(crate) use norms::spectral_synthesis;
