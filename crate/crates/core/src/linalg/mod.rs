//! Dense complex linear algebra used by every analysis module.

pub mod eigen;
pub mod matrix;
pub mod solve;
pub mod svd;
pub mod vector;
pub mod youla;

pub use eigen::{eigh, hermitian_eigensystem, kernel_basis, smallest_eigenpair, HermitianEigen, DEFAULT_RANK_TOL};
pub use matrix::CMatrix;
pub use svd::{svd, Svd};
pub use youla::{antisymmetric_block_diagonalize, takagi, BlockDiagonalForm, TakagiForm};
