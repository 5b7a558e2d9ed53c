//! Physical realizations of the single-setting measurement.
//!
//! - [`optics`]: two-photon polarization Bell analyzer for qubits.
//! - [`circuits`]: superconducting disentangler `U_D` followed by a
//!   computational-basis readout.
//! - [`qutrit`]: nine-mode linear-optical qutrit interferometer and its
//!   three-outcome POVM.
//! - [`fock`]: Fock-space machinery shared by the optical simulations.

pub mod circuits;
pub mod fock;
pub mod optics;
pub mod qutrit;

pub use circuits::{build_ud, verify_disentangler, DisentanglerReport, GateCircuit};
pub use optics::{classify_qubit_event, simulate_bell_analyzer, BeamSplitter, DetectorEvent};
pub use qutrit::{
    derive_m_prime, fock_simulate_qutrit, qutrit_fourier, qutrit_qpovm, symmetrizing_superop, MPrime, PovmResiduals,
    QPovm,
};
