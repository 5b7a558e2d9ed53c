//! Fixed-photon-number Fock spaces and the unitaries induced by linear optics.
//!
//! A passive network acts on creation operators as `a†_j → Σ_i U_ij a†_i`.
//! The induced amplitude between occupation patterns `s → t` is
//! `perm(U[t, s]) / sqrt(Π s_j! Π t_i!)`, where `U[t, s]` repeats row `i`
//! `t_i` times and column `j` `s_j` times.

use std::collections::HashMap;

use nalgebra::DVector;

use crate::{CMatrix, Error, Result, C64};

/// Permanent by Ryser's formula with Gray-code subset updates.
pub fn permanent(m: &CMatrix) -> C64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "permanent of a non-square matrix");
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut subset: u64 = 0;
    for g in 1u64..(1u64 << n) {
        // Gray code: flip bit of the lowest set bit of g
        let bit = g.trailing_zeros() as usize;
        let adding = subset & (1 << bit) == 0;
        subset ^= 1 << bit;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += m[(i, bit)];
            } else {
                *s -= m[(i, bit)];
            }
        }
        let prod = row_sums.iter().fold(C64::new(1.0, 0.0), |acc, s| acc * s);
        let sign = if (n - subset.count_ones() as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += prod * sign;
    }
    total
}

fn factorial(n: u8) -> f64 {
    (1..=n as u64).map(|i| i as f64).product()
}

/// All occupation patterns of `photons` bosons in `modes` modes.
#[derive(Clone, Debug)]
pub struct FockSpace {
    modes: usize,
    photons: usize,
    basis: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl FockSpace {
    pub fn new(modes: usize, photons: usize) -> Self {
        let mut basis = Vec::new();
        let mut current = vec![0u8; modes];
        fn fill(mode: usize, left: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if mode == current.len() - 1 {
                current[mode] = left as u8;
                out.push(current.clone());
                return;
            }
            for n in (0..=left).rev() {
                current[mode] = n as u8;
                fill(mode + 1, left - n, current, out);
            }
        }
        if modes > 0 {
            fill(0, photons, &mut current, &mut basis);
        }
        let index = basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        Self {
            modes,
            photons,
            basis,
            index,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn occupation(&self, i: usize) -> &[u8] {
        &self.basis[i]
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// Induced unitary on this space for the `modes × modes` matrix `u`.
    pub fn induced_unitary(&self, u: &CMatrix) -> Result<CMatrix> {
        if u.nrows() != self.modes || u.ncols() != self.modes {
            return Err(Error::Argument(format!(
                "mode matrix is {}x{}, expected {m}x{m}",
                u.nrows(),
                u.ncols(),
                m = self.modes
            )));
        }
        let n = self.photons;
        let expand = |occ: &[u8]| -> Vec<usize> {
            occ.iter()
                .enumerate()
                .flat_map(|(mode, &k)| std::iter::repeat_n(mode, k as usize))
                .collect()
        };
        let norms: Vec<f64> = self
            .basis
            .iter()
            .map(|occ| occ.iter().map(|&k| factorial(k)).product::<f64>())
            .collect();
        let expanded: Vec<Vec<usize>> = self.basis.iter().map(|o| expand(o)).collect();
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        let mut sub = CMatrix::zeros(n, n);
        for (col, s) in expanded.iter().enumerate() {
            for (row, t) in expanded.iter().enumerate() {
                for (a, &ti) in t.iter().enumerate() {
                    for (b, &sj) in s.iter().enumerate() {
                        sub[(a, b)] = u[(ti, sj)];
                    }
                }
                out[(row, col)] = permanent(&sub) / (norms[row] * norms[col]).sqrt();
            }
        }
        Ok(out)
    }

    /// Fock index of the state with one photon per copy: copy `c` in level
    /// `digits[c]` occupies mode `mode_of(c, digits[c])`.
    pub fn embed_product(&self, digits: &[usize], mode_of: impl Fn(usize, usize) -> usize) -> Result<usize> {
        let mut occ = vec![0u8; self.modes];
        for (c, &l) in digits.iter().enumerate() {
            occ[mode_of(c, l)] += 1;
        }
        self.index_of(&occ)
            .ok_or_else(|| Error::Argument("product state does not lie in this Fock space".into()))
    }

    /// Isometry from `(C^d)^{⊗k}` (factor 1 most significant) into this
    /// space, one photon per copy. Returned as the Fock index of each tensor
    /// basis vector.
    pub fn embed_tensor_basis(
        &self,
        local_dim: usize,
        copies: usize,
        mode_of: impl Fn(usize, usize) -> usize + Copy,
    ) -> Result<Vec<usize>> {
        if copies != self.photons {
            return Err(Error::Argument(format!(
                "{copies} copies need {copies} photons, space has {}",
                self.photons
            )));
        }
        let dim = local_dim.pow(copies as u32);
        let mut digits = vec![0; copies];
        let mut out = Vec::with_capacity(dim);
        for idx in 0..dim {
            let mut rest = idx;
            for c in (0..copies).rev() {
                digits[c] = rest % local_dim;
                rest /= local_dim;
            }
            let f = self.embed_product(&digits, mode_of)?;
            if out.contains(&f) {
                return Err(Error::Argument(
                    "mode layout maps two tensor states to one Fock state".into(),
                ));
            }
            out.push(f);
        }
        Ok(out)
    }

    /// Output occupation probabilities when the state `rho_power` on the
    /// embedded tensor space passes through `induced`.
    pub fn output_distribution(&self, induced: &CMatrix, embedding: &[usize], rho_power: &CMatrix) -> Vec<f64> {
        let dim = self.dim();
        let k = embedding.len();
        // W = Φ(U) V, V the embedding isometry
        let w = CMatrix::from_fn(dim, k, |t, a| induced[(t, embedding[a])]);
        let wr = &w * rho_power;
        (0..dim)
            .map(|t| {
                (0..k)
                    .map(|a| wr[(t, a)] * w[(t, a)].conj())
                    .fold(C64::new(0.0, 0.0), |acc, z| acc + z)
                    .re
            })
            .collect()
    }
}

/// A normalized vector of amplitudes over a [`FockSpace`] basis.
#[derive(Clone, Debug)]
pub struct FockState {
    amplitudes: DVector<C64>,
}

impl FockState {
    pub fn basis(space: &FockSpace, occupation: &[u8]) -> Result<Self> {
        let i = space
            .index_of(occupation)
            .ok_or_else(|| Error::Argument(format!("{occupation:?} is not in the Fock space")))?;
        let mut amplitudes = DVector::zeros(space.dim());
        amplitudes[i] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn from_amplitudes(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::validation("Fock state", format!("norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn evolve(&self, induced: &CMatrix) -> Self {
        Self {
            amplitudes: induced * &self.amplitudes,
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}
