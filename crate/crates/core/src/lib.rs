//! Spectra of nonsymmetric correlated Wishart matrices `C = A Bᵗ / T`.
//!
//! `A` and `B` are `N × T` Gaussian matrices whose rows are cross-correlated
//! through an `N × N` matrix η. The crate samples the ensemble, computes the
//! complex eigenvalues of `C`, and evaluates the large-`N` predictions for the
//! boundary of the eigenvalue support and the density inside it.

pub mod analytics;
pub mod correlation;
pub mod error;
pub mod linalg;
pub mod output;
pub mod sampling;
pub mod stats;

pub use correlation::{make_eta, EtaKind, EtaMatrix, EtaSpec, EtaStructure};
pub use error::{Error, Result};
pub use sampling::{form_c, run_ensemble, sample_pair, EnsembleConfig, SpectrumSample};
