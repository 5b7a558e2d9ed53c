//! Density matrices and the JSON state-file format.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{CMatrix, Error, Result, C64};

/// Tolerance for Hermiticity, unit trace and positivity checks.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// A validated `d × d` density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` and wraps it. The matrix is stored as given; no
    /// symmetrization or renormalization is applied.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::validation(
                "density matrix",
                format!("not square: {}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        let d = matrix.nrows();
        if d == 0 {
            return Err(Error::validation("density matrix", "empty matrix"));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("density matrix", "non-finite entry"));
        }
        let herm = max_abs_diff(&matrix, &matrix.adjoint());
        if herm > STATE_TOLERANCE {
            return Err(Error::validation(
                "density matrix",
                format!("not Hermitian: max |ρ − ρ†| = {herm:e}"),
            ));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(Error::validation(
                "density matrix",
                format!("trace is {} + {}i, expected 1", tr.re, tr.im),
            ));
        }
        let hermitian_part = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        let min_eig = hermitian_part
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOLERANCE {
            return Err(Error::validation(
                "density matrix",
                format!("not positive semidefinite: smallest eigenvalue {min_eig:e}"),
            ));
        }
        Ok(Self { matrix })
    }

    pub fn from_diagonal(entries: &[f64]) -> Result<Self> {
        let d = entries.len();
        let m = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(entries[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = 1.0 / dim as f64;
        Self {
            matrix: CMatrix::identity(dim, dim) * C64::new(w, 0.0),
        }
    }

    /// `|ψ⟩⟨ψ|` for the normalized version of `amplitudes`.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::validation("pure state", "zero or non-finite vector"));
        }
        let d = amplitudes.len();
        let m = DMatrix::from_fn(d, d, |i, j| amplitudes[i] * amplitudes[j].conj() / (norm * norm));
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues by direct Hermitian diagonalization, sorted descending.
    /// This is the reference the measurement-based pipeline is checked against.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// `ρ^{⊗k}` with factor 1 as the most significant index block.
    pub fn tensor_power(&self, k: usize) -> CMatrix {
        let mut out = CMatrix::identity(1, 1);
        for _ in 0..k {
            out = out.kronecker(&self.matrix);
        }
        out
    }
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// On-disk state format: `{ "dim": d, "matrix": [[[re, im], ...], ...] }`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text).map_err(|e| Error::validation("state file", e.to_string()))?;
        file.check_shape()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serializes")
    }

    fn check_shape(&self) -> Result<()> {
        if self.matrix.len() != self.dim {
            return Err(Error::validation(
                "state file",
                format!(
                    "field `matrix` has {} rows but `dim` is {}",
                    self.matrix.len(),
                    self.dim
                ),
            ));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.dim {
                return Err(Error::validation(
                    "state file",
                    format!(
                        "field `matrix` row {i} has {} entries but `dim` is {}",
                        row.len(),
                        self.dim
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        self.check_shape()?;
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |i, j| {
            let [re, im] = self.matrix[i][j];
            C64::new(re, im)
        });
        DensityMatrix::new(m)
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let d = rho.dim();
        let m = rho.matrix();
        StateFile {
            dim: d,
            matrix: (0..d)
                .map(|i| (0..d).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        let err = DensityMatrix::new(m).unwrap_err();
        assert!(err.to_string().contains("Hermitian"), "{err}");
    }

    #[test]
    fn rejects_wrong_trace_and_negative() {
        let err = DensityMatrix::from_diagonal(&[0.5, 0.4]).unwrap_err();
        assert!(err.to_string().contains("trace"), "{err}");
        let err = DensityMatrix::from_diagonal(&[1.2, -0.2]).unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
    }

    #[test]
    fn state_file_names_bad_field() {
        let err = StateFile::from_json(r#"{"dim": 2, "matrix": [[[1,0],[0,0]]]}"#).unwrap_err();
        assert!(err.to_string().contains("matrix"), "{err}");
        let err = StateFile::from_json(r#"{"dim": 2, "matrx": []}"#).unwrap_err();
        assert!(
            err.to_string().contains("matrx") || err.to_string().contains("matrix"),
            "{err}"
        );
    }

    #[test]
    fn state_file_round_trip() {
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.2, 0.1]).unwrap();
        let file = StateFile::from_density(&rho);
        let back = StateFile::from_json(&file.to_json()).unwrap().to_density().unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn eigenvalues_sorted_descending() {
        let rho = DensityMatrix::from_diagonal(&[0.2, 0.7, 0.1]).unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[0] - 0.7).abs() < 1e-14 && (ev[2] - 0.1).abs() < 1e-14);
    }
}
