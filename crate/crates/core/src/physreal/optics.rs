//! Two-photon polarization Bell analyzer for qubits.
//!
//! Copy 1 enters arm `a`, copy 2 arm `b`; `|H⟩ = |0⟩`, `|V⟩ = |1⟩`. After a
//! 50:50 beam splitter the output ports `c`, `d` are split by polarizing beam
//! splitters onto threshold detectors
//!
//! ```text
//! D1 = c_H,  D2 = c_V,  D3 = d_V,  D4 = d_H
//! ```
//!
//! so the singlet fires exactly `{D1, D3}` or `{D2, D4}`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::fock::FockSpace;
use crate::state::DensityMatrix;
use crate::{CMatrix, Error, Result, C64};

/// Set of clicked detectors, labelled from 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DetectorEvent {
    clicked: BTreeSet<u8>,
}

impl DetectorEvent {
    pub fn new(clicked: impl IntoIterator<Item = u8>) -> Self {
        Self {
            clicked: clicked.into_iter().collect(),
        }
    }

    /// Threshold detection: detector `α + 1` clicks iff mode `α` is occupied.
    pub fn from_occupation(occupation: &[u8]) -> Self {
        Self::new(
            occupation
                .iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(m, _)| (m + 1) as u8),
        )
    }

    pub fn clicked(&self) -> &BTreeSet<u8> {
        &self.clicked
    }
}

impl fmt::Display for DetectorEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.clicked.iter().map(|d| format!("D{d}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Outcome 1 (`P_1`, singlet) for exactly `{D1, D3}` or `{D2, D4}`; 2 otherwise.
pub fn classify_qubit_event(event: &DetectorEvent) -> Result<u8> {
    let c = event.clicked();
    if c.is_empty() {
        return Err(Error::validation("detector event", "no detector clicked"));
    }
    if let Some(bad) = c.iter().find(|&&d| !(1..=4).contains(&d)) {
        return Err(Error::validation("detector event", format!("unknown detector D{bad}")));
    }
    let pattern: Vec<u8> = c.iter().copied().collect();
    Ok(if pattern == [1, 3] || pattern == [2, 4] { 1 } else { 2 })
}

/// Phase convention of the 50:50 beam splitter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamSplitter {
    /// `a → (c + i d)/√2`, `b → (i c + d)/√2`.
    Symmetric,
    /// `a → (c + d)/√2`, `b → (c − d)/√2`.
    Hadamard,
}

// input modes: a_H, a_V, b_H, b_V
const A_H: usize = 0;
const A_V: usize = 1;
const B_H: usize = 2;
const B_V: usize = 3;
// output modes in detector order
const C_H: usize = 0;
const C_V: usize = 1;
const D_V: usize = 2;
const D_H: usize = 3;

/// `4 × 4` mode matrix `U[out, in]` of beam splitter plus polarizing splitters.
pub fn bell_analyzer_modes(bs: BeamSplitter) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (to_c, to_d, from_b_c, from_b_d) = match bs {
        BeamSplitter::Symmetric => (C64::new(s, 0.0), C64::new(0.0, s), C64::new(0.0, s), C64::new(s, 0.0)),
        BeamSplitter::Hadamard => (C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)),
    };
    let mut u = CMatrix::zeros(4, 4);
    u[(C_H, A_H)] = to_c;
    u[(D_H, A_H)] = to_d;
    u[(C_V, A_V)] = to_c;
    u[(D_V, A_V)] = to_d;
    u[(C_H, B_H)] = from_b_c;
    u[(D_H, B_H)] = from_b_d;
    u[(C_V, B_V)] = from_b_c;
    u[(D_V, B_V)] = from_b_d;
    u
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellAnalyzerOutcome {
    /// Probability of outcome 1 (`P_1`).
    pub p1: f64,
    /// Probability of outcome 2 (`P_2`).
    pub p2: f64,
    /// Probability of each distinct click pattern.
    pub events: Vec<(DetectorEvent, f64)>,
}

/// Two-photon Fock simulation of the analyzer fed with `ρ ⊗ ρ`.
pub fn simulate_bell_analyzer(rho: &DensityMatrix, bs: BeamSplitter) -> Result<BellAnalyzerOutcome> {
    if rho.dim() != 2 {
        return Err(Error::Argument(format!(
            "qubit state required, got dimension {}",
            rho.dim()
        )));
    }
    let space = FockSpace::new(4, 2);
    let induced = space.induced_unitary(&bell_analyzer_modes(bs))?;
    let layout = |copy: usize, level: usize| {
        if copy == 0 {
            [A_H, A_V][level]
        } else {
            [B_H, B_V][level]
        }
    };
    let embedding = space.embed_tensor_basis(2, 2, layout)?;
    let probs = space.output_distribution(&induced, &embedding, &rho.tensor_power(2));

    let mut events: Vec<(DetectorEvent, f64)> = Vec::new();
    let (mut p1, mut p2) = (0.0, 0.0);
    for (i, &p) in probs.iter().enumerate() {
        let event = DetectorEvent::from_occupation(space.occupation(i));
        match classify_qubit_event(&event)? {
            1 => p1 += p,
            _ => p2 += p,
        }
        match events.iter_mut().find(|(e, _)| *e == event) {
            Some((_, q)) => *q += p,
            None => events.push((event, p)),
        }
    }
    events.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(BellAnalyzerOutcome { p1, p2, events })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_examples() {
        assert_eq!(classify_qubit_event(&DetectorEvent::new([1, 3])).unwrap(), 1);
        assert_eq!(classify_qubit_event(&DetectorEvent::new([2, 4])).unwrap(), 1);
        assert_eq!(classify_qubit_event(&DetectorEvent::new([1, 2])).unwrap(), 2);
        assert_eq!(classify_qubit_event(&DetectorEvent::new([1])).unwrap(), 2);
        assert!(classify_qubit_event(&DetectorEvent::new([])).is_err());
        assert!(classify_qubit_event(&DetectorEvent::new([5])).is_err());
    }

    #[test]
    fn mode_matrices_unitary() {
        for bs in [BeamSplitter::Symmetric, BeamSplitter::Hadamard] {
            let u = bell_analyzer_modes(bs);
            let e = &u * u.adjoint() - CMatrix::identity(4, 4);
            assert!(e.iter().all(|z| z.norm() < 1e-15));
        }
    }

    #[test]
    fn product_states() {
        // |HH⟩ bunches: never outcome 1
        let hh = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        for bs in [BeamSplitter::Symmetric, BeamSplitter::Hadamard] {
            let out = simulate_bell_analyzer(&hh, bs).unwrap();
            assert!(out.p1.abs() < 1e-15);
            assert!((out.p1 + out.p2 - 1.0).abs() < 1e-14);
        }
        // maximally mixed: tr(P1 𝟙/4) = 1/4
        let mixed = DensityMatrix::maximally_mixed(2);
        let out = simulate_bell_analyzer(&mixed, BeamSplitter::Symmetric).unwrap();
        assert!((out.p1 - 0.25).abs() < 1e-14);
    }
}
