//! Reference implementation in a truncated two-mode Fock space.
//!
//! A target state is prepared by a Gaussian circuit (thermal inputs, a
//! passive stage, two single-mode squeezers, a second passive stage) whose
//! action is computed exactly on number states. Everything downstream, the
//! number statistics, field moments and the partial-transpose spectrum, is
//! read off the resulting density matrix without any Gaussian formula.

mod density;
pub mod fock;
mod moments;
pub mod symplectic;
mod synthesis;

pub use density::{FockDensityMatrix, SectorLayout, SectorSymmetry};
pub use moments::{
    field_moments, number_moments, ppt_negativity, FieldMoments, JointNumberDistribution, EIGENVALUE_FLOOR,
    NumberMoments, PptSpectrum,
};
pub use symplectic::{bloch_messiah, circuit_for, williamson, BlochMessiah, GaussianCircuit, PassiveStage, Williamson};
pub use synthesis::{
    auto_cutoff, moment_cutoff, symmetry_for, synthesize_state, thermal_tail, SynthesisOptions, AUTO_CUTOFF_CAP,
    DEFAULT_TAIL_BOUND, MAX_CUTOFF,
};
