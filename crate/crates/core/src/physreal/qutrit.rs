//! Linear-optical qutrit realization with a three-outcome POVM.
//!
//! Three copies of a path-encoded qutrit occupy nine modes: level `ℓ` of copy
//! `c` sits in mode `3c + ℓ` (0-based). For each level the three copies are
//! mixed by the qutrit Fourier transform; nine threshold detectors are read out
//! in triplets `(D1 D2 D3)`, `(D4 D5 D6)`, `(D7 D8 D9)`.
//!
//! The measured POVM is `Q_1 = (2/3) S_3` (bunching), `Q_2 = S_3/3 + A_3`
//! (anti-bunching), `Q_3 = 𝟙 − Q_1 − Q_2`, and with the symmetrizing
//! superoperator `Ξ`
//!
//! ```text
//! Ξ*(M)(x) = Σ_k m'_k(x) Q_k,   det(x − ρ) = Σ_k m'_k(x) tr(Q_k ρ^{⊗3}).
//! ```

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix3;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::fock::FockSpace;
use crate::permkit::{permutation_unitary, trace_product, DenseLimits, Permutation, TensorOperator};
use crate::projectors::{antisymmetrizer_on, symmetrizer};
use crate::state::{max_abs_diff, DensityMatrix};
use crate::{CMatrix, Error, Result, C64};

/// `F_{jk} = ω^{jk}/√3`, `ω = exp(2πi/3)`.
pub fn qutrit_fourier() -> CMatrix {
    let s = 1.0 / 3f64.sqrt();
    CMatrix::from_fn(3, 3, |j, k| C64::from_polar(s, 2.0 * PI * ((j * k) % 3) as f64 / 3.0))
}

/// Mode index of level `level` of copy `copy` (both 0-based).
pub fn qutrit_mode(copy: usize, level: usize) -> usize {
    3 * copy + level
}

/// `9 × 9` mode matrix applying the Fourier transform across copies at each level.
pub fn qutrit_interferometer() -> CMatrix {
    let f = qutrit_fourier();
    let mut u = CMatrix::zeros(9, 9);
    for level in 0..3 {
        for c_in in 0..3 {
            for c_out in 0..3 {
                u[(qutrit_mode(c_out, level), qutrit_mode(c_in, level))] = f[(c_in, c_out)];
            }
        }
    }
    u
}

/// Coarse-grained event probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QutritEvents {
    /// Exactly one triplet clicked.
    pub bunching: f64,
    /// All three triplets clicked.
    pub anti_bunching: f64,
    /// Exactly two triplets clicked.
    pub other: f64,
}

impl QutritEvents {
    pub fn as_array(&self) -> [f64; 3] {
        [self.bunching, self.anti_bunching, self.other]
    }
}

/// Number of coarse detectors (triplets) that click for an output occupation.
pub fn triplets_clicked(occupation: &[u8]) -> usize {
    occupation.chunks(3).filter(|t| t.iter().any(|&n| n > 0)).count()
}

/// Three-photon, nine-mode Fock simulation of the interferometer fed with `ρ^{⊗3}`.
pub fn fock_simulate_qutrit(rho: &DensityMatrix) -> Result<QutritEvents> {
    if rho.dim() != 3 {
        return Err(Error::Argument(format!(
            "qutrit state required, got dimension {}",
            rho.dim()
        )));
    }
    let space = FockSpace::new(9, 3);
    let induced = space.induced_unitary(&qutrit_interferometer())?;
    let embedding = space.embed_tensor_basis(3, 3, qutrit_mode)?;
    let probs = space.output_distribution(&induced, &embedding, &rho.tensor_power(3));
    let mut events = QutritEvents {
        bunching: 0.0,
        anti_bunching: 0.0,
        other: 0.0,
    };
    for (i, p) in probs.into_iter().enumerate() {
        match triplets_clicked(space.occupation(i)) {
            1 => events.bunching += p,
            3 => events.anti_bunching += p,
            _ => events.other += p,
        }
    }
    Ok(events)
}

/// `Q_1, Q_2, Q_3` on three qutrits.
#[derive(Clone, Debug)]
pub struct QPovm {
    q: [TensorOperator; 3],
}

impl QPovm {
    /// `Q_k`, `k` 1-based.
    pub fn element(&self, k: usize) -> &TensorOperator {
        &self.q[k - 1]
    }

    pub fn elements(&self) -> &[TensorOperator; 3] {
        &self.q
    }

    /// `tr(Q_k ρ^{⊗3})` for `k = 1..3`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<[f64; 3]> {
        if rho.dim() != 3 {
            return Err(Error::Argument(format!(
                "qutrit state required, got dimension {}",
                rho.dim()
            )));
        }
        let power = rho.tensor_power(3);
        Ok(std::array::from_fn(|k| trace_product(self.q[k].matrix(), &power).re))
    }
}

/// Departures of a [`QPovm`] from a valid POVM.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmResiduals {
    /// Largest `|Q_k − Q_k†|` entry.
    pub hermiticity: f64,
    /// Largest `|Σ Q_k − 𝟙|` entry.
    pub completeness: f64,
    /// Smallest eigenvalue over all `Q_k`.
    pub min_eigenvalue: f64,
}

impl QPovm {
    pub fn residuals(&self) -> PovmResiduals {
        let id = CMatrix::identity(27, 27);
        let sum = self.q.iter().fold(CMatrix::zeros(27, 27), |acc, q| acc + q.matrix());
        PovmResiduals {
            hermiticity: self
                .q
                .iter()
                .map(|q| max_abs_diff(q.matrix(), &q.matrix().adjoint()))
                .fold(0.0, f64::max),
            completeness: max_abs_diff(&sum, &id),
            min_eigenvalue: self
                .q
                .iter()
                .flat_map(|q| {
                    q.matrix()
                        .clone()
                        .symmetric_eigenvalues()
                        .iter()
                        .cloned()
                        .collect::<Vec<f64>>()
                })
                .fold(f64::INFINITY, f64::min),
        }
    }
}

pub fn qutrit_qpovm() -> QPovm {
    let limits = DenseLimits::default();
    let s3 = symmetrizer(3, 3, &limits).expect("27-dim fits").into_matrix();
    let a3 = antisymmetrizer_on(3, 3, 3, &limits).expect("27-dim fits").into_matrix();
    let q1 = &s3 * C64::new(2.0 / 3.0, 0.0);
    let q2 = &s3 * C64::new(1.0 / 3.0, 0.0) + &a3;
    let q3 = CMatrix::identity(27, 27) - &q1 - &q2;
    let wrap = |m| TensorOperator::new(3, 3, m).expect("27-dim");
    QPovm {
        q: [wrap(q1), wrap(q2), wrap(q3)],
    }
}

/// `Ξ(A) = (1/k!) Σ_{σ∈S_k} U_σ A U_σ†` for `A` on `k` factors.
pub fn symmetrizing_superop(a: &TensorOperator) -> Result<TensorOperator> {
    let k = a.factors();
    let d = a.local_dim();
    let limits = DenseLimits {
        max_dim: a.dim(),
        ..DenseLimits::default()
    };
    let perms = Permutation::all(k);
    let norm = 1.0 / perms.len() as f64;
    let mut acc = CMatrix::zeros(a.dim(), a.dim());
    for sigma in &perms {
        let u = permutation_unitary(sigma, d, &limits)?.into_matrix();
        acc += &u * a.matrix() * u.adjoint();
    }
    TensorOperator::new(d, k, acc * C64::new(norm, 0.0))
}

/// Polynomial with exact rational coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPoly {
    /// `(numerator, denominator)` of the coefficient of `x^j`.
    coeffs: Vec<(i64, i64)>,
}

impl RationalPoly {
    pub fn new(coeffs: Vec<Ratio<i64>>) -> Self {
        Self {
            coeffs: coeffs.into_iter().map(|r| (*r.numer(), *r.denom())).collect(),
        }
    }

    pub fn coeffs(&self) -> Vec<Ratio<i64>> {
        self.coeffs.iter().map(|&(n, d)| Ratio::new(n, d)).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &(n, d)| acc * x + n as f64 / d as f64)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, r) in self.coeffs().iter().enumerate().rev() {
            if *r.numer() == 0 {
                continue;
            }
            let neg = *r.numer() < 0;
            let mag = Ratio::new(r.numer().abs(), *r.denom());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let one = mag == Ratio::from_integer(1);
            match (j, one) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag} x")?,
                (_, true) => write!(f, "x^{j}")?,
                (_, false) => write!(f, "{mag} x^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `m'_1, m'_2, m'_3` with the largest operator-expansion residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MPrime {
    pub polys: [RationalPoly; 3],
    pub expansion_residual: f64,
}

impl MPrime {
    /// `Σ_k m'_k(x) q_k`.
    pub fn charpoly_value(&self, x: f64, q: &[f64; 3]) -> f64 {
        self.polys.iter().zip(q).map(|(m, qk)| m.eval(x) * qk).sum()
    }
}

/// Expansion residual above which `derive_m_prime` reports a structural error.
pub const M_PRIME_RESIDUAL_TOLERANCE: f64 = 1e-12;

/// Continued-fraction rational approximation with denominator at most `max_den`.
pub fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<Ratio<i64>> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= tol {
            return Some(Ratio::new(h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    (k1 != 0 && (h1 as f64 / k1 as f64 - x).abs() <= tol).then(|| Ratio::new(h1, k1))
}

/// Solves, power by power in `x`, for the coordinates of `Ξ*(M)(x)` in the
/// span of `{Q_1, Q_2, Q_3}` (Gram system in the trace inner product), then
/// rationalizes the coefficients.
pub fn derive_m_prime(povm: &QPovm) -> Result<MPrime> {
    let limits = DenseLimits::default();
    let gram = Matrix3::from_fn(|i, j| trace_product(povm.q[i].matrix(), povm.q[j].matrix()).re);
    let lu = gram.lu();
    let mut coeffs = [[Ratio::from_integer(0i64); 4]; 3];
    let mut worst = 0.0f64;
    for power in 0..=3 {
        // x^power multiplies (−1)^k A_k with k = 3 − power
        let k = 3 - power;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let ak = antisymmetrizer_on(3, k, 3, &limits)?;
        // Ξ is its own adjoint under the trace inner product
        let target = symmetrizing_superop(&ak)?.into_matrix() * C64::new(sign, 0.0);
        let rhs = nalgebra::Vector3::from_fn(|i, _| trace_product(povm.q[i].matrix(), &target).re);
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Structural("Q-POVM Gram matrix is singular".into()))?;
        let rebuilt = (0..3).fold(CMatrix::zeros(27, 27), |acc, i| {
            acc + povm.q[i].matrix() * C64::new(sol[i], 0.0)
        });
        let residual = max_abs_diff(&rebuilt, &target);
        worst = worst.max(residual);
        if residual > M_PRIME_RESIDUAL_TOLERANCE {
            return Err(Error::Structural(format!(
                "Ξ*(M) coefficient of x^{power} is not in span{{Q_k}} (residual {residual:e})"
            )));
        }
        for i in 0..3 {
            coeffs[i][power] = rationalize(sol[i], 1000, 1e-10).ok_or_else(|| {
                Error::Structural(format!(
                    "coefficient {} of m'_{} is not a small rational",
                    sol[i],
                    i + 1
                ))
            })?;
        }
    }
    Ok(MPrime {
        polys: coeffs.map(|c| RationalPoly::new(c.to_vec())),
        expansion_residual: worst,
    })
}
