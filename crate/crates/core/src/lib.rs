//! Spectral gaps of Hill–Schrödinger operators `-u'' + q(x) u` with 1-periodic,
//! possibly distributional, real potentials given by their Fourier coefficients.
//!
//! The crate is organised bottom-up:
//!
//! * [`potential`]: hermitian Fourier coefficient sequences and test families.
//! * [`weights`]: positive weight sequences, their lower/upper orders and the
//!   admissibility test for the potential/gap membership equivalence.
//! * [`seq_spaces`]: weighted two-sided sequence norms and convolution.
//! * [`spectral`]: Fourier–Galerkin gap endpoints, Richardson extrapolation and
//!   the Kronig–Penney discriminant oracle.
//! * [`asymptotics`]: remainders of the gap asymptotics, decay-exponent fits and
//!   finite-scale membership diagnostics.
//! * [`io`]: potential/weight spec files and CSV coefficient tables.

pub mod asymptotics;
pub mod error;
pub mod io;
pub mod potential;
pub mod seq_spaces;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use potential::{sample_potential_family, FourierSequence, PotentialFamily};
pub use seq_spaces::TwoSidedSequence;
pub use spectral::{richardson_extrapolate, spectral_endpoints, SpectralResult};
pub use weights::{OrderEstimate, Weight};

/// Library version, echoed into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
