//! Dense linear-algebra kernels. All routines are single-threaded.

mod eigen;
mod matrix;
mod schur;
mod symmetric;

pub use eigen::{nonsym_eigenvalues, ComplexSpectrum, FLUSH_TOLERANCE, MAX_DIMENSION, PAIRING_TOLERANCE};
pub use matrix::RealMatrix;
pub use schur::{schur_block_inverse, try_inverse, BlockInverse, CONDITION_LIMIT};
pub use symmetric::{jacobi_eigen, largest_singular_value, singular_values, symmetric_eigenvalues, symmetric_sqrt};
