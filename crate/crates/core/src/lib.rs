//! Two-mode Gaussian entanglement from particle-number counting statistics.
//!
//! The crate is organised bottom-up:
//!
//! * [`gaussian`] covariance matrices, symplectic spectra, PPT classification
//! * [`correlations`] forward maps to `g2`/`g4` and their inversion
//! * [`witnesses`] two-body thresholds and region grids
//! * [`oracle`] truncated Fock-space reference implementation
//! * [`counting`] shot sampling, estimators and the analysis pipeline

pub mod correlations;
pub mod counting;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod witnesses;

pub use error::{Error, Result};
pub use gaussian::{classify, StateClass, SymplecticSpectrum, ThermalTwoModeState};
