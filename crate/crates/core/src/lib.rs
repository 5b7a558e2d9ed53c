//! Spectrum of an unknown density matrix from a single `d`-outcome
//! projective measurement on `d` identical copies.
//!
//! The measurement is built from the anti-symmetrizers `A_k` on the tensor
//! power `H^{⊗d}`. Its outcome probabilities `p_i = tr(P_i ρ^{⊗d})` fix the
//! characteristic polynomial through
//!
//! ```text
//! det(x − ρ) = Σ_i m_i(x) p_i,    m_i(x) = Σ_{k=0}^{d−i+1} (−1)^k x^{d−k}
//! ```
//!
//! and the eigenvalues follow from a one-dimensional root search.
//!
//! Module map:
//!
//! - [`permkit`]: permutations, cycle types and permutation unitaries.
//! - [`projectors`]: anti-symmetrizers, symmetrizers, the nested PVM and `M(x)`.
//! - [`spectral`]: moments, Newton–Girard, polynomial reconstruction and roots.
//! - [`simkit`]: state generation, exact and finite-shot outcome statistics.
//! - [`physreal`]: optical and superconducting realizations of the measurement.
//! - [`verify`]: the operator-identity suite used by `spectra verify`.

pub mod error;
pub mod permkit;
pub mod physreal;
pub mod projectors;
pub mod simkit;
pub mod spectral;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use state::{DensityMatrix, StateFile};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Library version embedded into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
