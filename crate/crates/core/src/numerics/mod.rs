//! Dense real/complex linear algebra used by every other module.

mod eigen;
mod lstsq;
mod matrix;
mod svd;

pub use eigen::{hermitian_eigen, symmetric_eigen, HermitianEigen, SymmetricEigen};
pub use lstsq::{
    has_full_column_rank, least_squares_solve, least_squares_solve_complex, LeastSquares,
};
pub use matrix::{
    inner, kron, kron_vec, vec_norm, ComplexMatrix, Matrix, RealMatrix, Scalar, HERMITIAN_TOL,
};
pub use svd::{
    frobenius_norm, spectral_norm, svd, svd_complex, ComplexSvdResult, SingularValues, SvdResult,
    MAX_SWEEPS, ORTHOGONALITY_TOL, RANK_TOL,
};
