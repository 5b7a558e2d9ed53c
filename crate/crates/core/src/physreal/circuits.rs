//! Two-qubit gate circuits for the superconducting realization.
//!
//! Gates are `Y_θ = exp(iθσ_y)`, `Z_θ = exp(iθσ_z)` on one qubit and
//! `ZZ_θ = exp(iθ σ_z⊗σ_z)`. Qubit 0 is the first (most significant) factor.
//! A [`GateCircuit`] lists gates in application order, so the operator
//! product reads right to left.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use serde::{Deserialize, Serialize};

use crate::{CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Y { qubit: usize, theta: f64 },
    Z { qubit: usize, theta: f64 },
    Zz { theta: f64 },
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Gate {
    /// `exp(iθP) = cos θ 𝟙 + i sin θ P` for a Pauli string `P`.
    pub fn matrix(&self) -> CMatrix {
        let id2 = CMatrix::identity(2, 2);
        let on = |qubit: usize, g: CMatrix| {
            if qubit == 0 {
                g.kronecker(&id2)
            } else {
                id2.kronecker(&g)
            }
        };
        match *self {
            Gate::Y { qubit, theta } => {
                let (s, co) = theta.sin_cos();
                on(
                    qubit,
                    CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0)]),
                )
            }
            Gate::Z { qubit, theta } => {
                let (s, co) = theta.sin_cos();
                on(
                    qubit,
                    CMatrix::from_row_slice(2, 2, &[c(co, s), c(0.0, 0.0), c(0.0, 0.0), c(co, -s)]),
                )
            }
            Gate::Zz { theta } => {
                let (s, co) = theta.sin_cos();
                let plus = c(co, s);
                let minus = c(co, -s);
                CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![plus, minus, minus, plus]))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GateCircuit {
    gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn then(mut self, gate: Gate) -> Self {
        self.gates.push(gate);
        self
    }

    /// Appends `U_H = Y_{−π/8} Z_{π/2} Y_{π/8}` on `qubit` (so `Y_{π/8}` acts first).
    pub fn then_uh(self, qubit: usize) -> Self {
        self.then(Gate::Y {
            qubit,
            theta: FRAC_PI_8,
        })
        .then(Gate::Z {
            qubit,
            theta: FRAC_PI_2,
        })
        .then(Gate::Y {
            qubit,
            theta: -FRAC_PI_8,
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn matrix(&self) -> CMatrix {
        self.gates
            .iter()
            .fold(CMatrix::identity(4, 4), |acc, g| g.matrix() * acc)
    }
}

/// `U_ZZ = exp(−iπ/4 σ_z⊗σ_z)`, i.e. `exp[−i(π/4J) H_ZZ]` with `H_ZZ = J σ_z⊗σ_z`.
fn uzz() -> Gate {
    Gate::Zz { theta: -FRAC_PI_4 }
}

/// The disentangler `U_D = (U_H ⊗ U_H)(Z_{π/4} ⊗ Z_{π/4}) U_ZZ (𝟙 ⊗ U_H)`.
///
/// Maps `Φ+ → |00⟩`, `Ψ+ → |01⟩`, `Φ− → |10⟩`, `Ψ− → |11⟩` up to phases.
/// Differs from [`ud_circuit_as_printed`] in the final layer (`U_H` on both
/// qubits) and in the sign of the single-qubit `Z` rotations.
pub fn ud_circuit() -> GateCircuit {
    GateCircuit::new()
        .then_uh(1)
        .then(uzz())
        .then(Gate::Z {
            qubit: 0,
            theta: FRAC_PI_4,
        })
        .then(Gate::Z {
            qubit: 1,
            theta: FRAC_PI_4,
        })
        .then_uh(0)
        .then_uh(1)
}

/// `(𝟙 ⊗ U_H)(Z_{−π/4} ⊗ Z_{−π/4}) U_ZZ (𝟙 ⊗ U_H)` taken literally. This is a
/// CNOT-type entangling gate, not a Bell-basis disentangler: every Bell state
/// keeps overlap `1/√2` with two computational basis states.
pub fn ud_circuit_as_printed() -> GateCircuit {
    GateCircuit::new()
        .then_uh(1)
        .then(uzz())
        .then(Gate::Z {
            qubit: 0,
            theta: -FRAC_PI_4,
        })
        .then(Gate::Z {
            qubit: 1,
            theta: -FRAC_PI_4,
        })
        .then_uh(1)
}

pub fn build_ud() -> CMatrix {
    ud_circuit().matrix()
}

/// Textbook Bell measurement: CNOT (control qubit 0), then Hadamard on qubit 0.
pub fn textbook_disentangler() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
    let mut cnot = CMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
        cnot[(r, col)] = c(1.0, 0.0);
    }
    h.kronecker(&CMatrix::identity(2, 2)) * cnot
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn amplitudes(self) -> [C64; 4] {
        let s = FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        match self {
            BellState::PhiPlus => [c(s, 0.0), z, z, c(s, 0.0)],
            BellState::PhiMinus => [c(s, 0.0), z, z, c(-s, 0.0)],
            BellState::PsiPlus => [z, c(s, 0.0), c(s, 0.0), z],
            BellState::PsiMinus => [z, c(s, 0.0), c(-s, 0.0), z],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellState::PhiPlus => "Phi+",
            BellState::PhiMinus => "Phi-",
            BellState::PsiPlus => "Psi+",
            BellState::PsiMinus => "Psi-",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisentanglerRow {
    pub bell: BellState,
    /// Computational basis state `|ij⟩` with the largest overlap, as `"ij"`.
    pub basis: String,
    pub overlap: f64,
    /// Phase of `⟨ij|U|Bell⟩` in radians.
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisentanglerReport {
    pub rows: Vec<DisentanglerRow>,
    /// `|⟨ij|U|B⟩|` for every Bell state (rows) and basis state (columns).
    pub overlap_table: Vec<[f64; 4]>,
    /// All maximal overlaps are `1` within `1e−9` and the targets are distinct.
    pub disentangles: bool,
}

pub const DISENTANGLER_TOLERANCE: f64 = 1e-9;

pub fn verify_disentangler(u: &CMatrix) -> DisentanglerReport {
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for bell in BellState::ALL {
        let v = nalgebra::DVector::from_row_slice(&bell.amplitudes());
        let out = u * v;
        let mags: [f64; 4] = std::array::from_fn(|i| out[i].norm());
        let best = (0..4).max_by(|&a, &b| mags[a].total_cmp(&mags[b])).unwrap();
        rows.push(DisentanglerRow {
            bell,
            basis: format!("{}{}", best >> 1, best & 1),
            overlap: mags[best],
            phase: out[best].arg(),
        });
        table.push(mags);
    }
    let mut targets: Vec<&str> = rows.iter().map(|r| r.basis.as_str()).collect();
    targets.sort();
    targets.dedup();
    let disentangles = targets.len() == 4 && rows.iter().all(|r| r.overlap > 1.0 - DISENTANGLER_TOLERANCE);
    DisentanglerReport {
        rows,
        overlap_table: table,
        disentangles,
    }
}
