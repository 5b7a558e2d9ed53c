//! Anti-symmetrizers, symmetrizers and the nested projective measurement.
//!
//! For `n` copies of a `d`-level system the anti-symmetrizers `A_k`
//! (`k = 0..n`, `A_0 = A_1 = 𝟙`) are nested, `A_k A_l = A_l` for `k < l`,
//! so their successive differences
//!
//! ```text
//! P_1 = A_n,   P_i = A_{n−i+1} − A_{n−i+2}   (i = 2..n)
//! ```
//!
//! form a PVM. With `n = d` this is the single-setting measurement.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::permkit::{trace_product, DenseLimits, Permutation, TensorOperator};
use crate::state::DensityMatrix;
use crate::{CMatrix, Error, Result, C64};

/// Singular values below `RANK_TOLERANCE × σ_max` count as zero.
pub const RANK_TOLERANCE: f64 = 1e-8;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `D(k) = d^{n−k} · C(d, k)`: the dimension of the range of `A_k` on `n` copies.
/// Zero for `k > n`.
pub fn antisym_dimension(local_dim: usize, copies: usize, k: usize) -> usize {
    if k > copies {
        return 0;
    }
    local_dim.pow((copies - k) as u32) * binomial(local_dim, k)
}

/// Expected `rank(P_i)` for `i = 1..n`.
pub fn expected_ranks(local_dim: usize, copies: usize) -> Vec<usize> {
    (1..=copies)
        .map(|i| {
            let k = copies - i + 1;
            antisym_dimension(local_dim, copies, k) - antisym_dimension(local_dim, copies, k + 1)
        })
        .collect()
}

/// Numerical rank: number of singular values above `RANK_TOLERANCE` relative to the largest.
pub fn numerical_rank(m: &CMatrix) -> usize {
    let sv = m.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * largest).count()
}

/// `(1/k!) Σ_{σ∈S_k} w(σ) U_σ` on the first `k` of `factors` tensor factors.
fn symmetry_projector(
    local_dim: usize,
    k: usize,
    factors: usize,
    signed: bool,
    limits: &DenseLimits,
) -> Result<TensorOperator> {
    if local_dim < 2 {
        return Err(Error::Argument(format!("local dimension must be ≥ 2, got {local_dim}")));
    }
    if k > factors {
        return Err(Error::Argument(format!("cannot act on {k} of {factors} factors")));
    }
    let dim = limits.check(local_dim, factors)?;
    if k <= 1 {
        return Ok(TensorOperator::identity(local_dim, factors));
    }
    let norm = 1.0 / factorial(k);
    let mut m = CMatrix::zeros(dim, dim);
    let mut digits = vec![0; factors];
    for sigma in Permutation::all(k) {
        let w = if signed { f64::from(sigma.sign()) } else { 1.0 } * norm;
        let sigma = sigma.extend(factors);
        for col in 0..dim {
            let row = sigma.act_on_index(col, local_dim, &mut digits);
            m[(row, col)] += C64::new(w, 0.0);
        }
    }
    TensorOperator::new(local_dim, factors, m)
}

/// `A_k ⊗ 𝟙^{⊗(factors−k)}`.
pub fn antisymmetrizer_on(local_dim: usize, k: usize, factors: usize, limits: &DenseLimits) -> Result<TensorOperator> {
    symmetry_projector(local_dim, k, factors, true, limits)
}

/// `A_k` embedded on the `d`-fold tensor power (`A_0 = 𝟙`).
pub fn antisymmetrizer(local_dim: usize, k: usize, limits: &DenseLimits) -> Result<TensorOperator> {
    if k > local_dim {
        return Err(Error::Argument(format!("k = {k} exceeds d = {local_dim}")));
    }
    antisymmetrizer_on(local_dim, k, local_dim, limits)
}

pub fn symmetrizer_on(local_dim: usize, k: usize, factors: usize, limits: &DenseLimits) -> Result<TensorOperator> {
    symmetry_projector(local_dim, k, factors, false, limits)
}

/// `S_k` on `k` factors.
pub fn symmetrizer(local_dim: usize, k: usize, limits: &DenseLimits) -> Result<TensorOperator> {
    symmetrizer_on(local_dim, k, k, limits)
}

/// `m_i(x)` for `i = 1..n`, integer coefficients in ascending powers of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPolynomials {
    coeffs: Vec<Vec<i64>>,
}

impl MPolynomials {
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients of `m_i`, `i` 1-based; entry `j` multiplies `x^j`.
    pub fn coeffs(&self, i: usize) -> &[i64] {
        &self.coeffs[i - 1]
    }

    pub fn all(&self) -> &[Vec<i64>] {
        &self.coeffs
    }

    pub fn eval(&self, i: usize, x: f64) -> f64 {
        self.coeffs(i).iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }
}

/// `m_i(x) = Σ_{k=0}^{n−i+1} (−1)^k x^{n−k}`.
pub fn m_polynomials(degree: usize) -> MPolynomials {
    let n = degree;
    let coeffs = (1..=n)
        .map(|i| {
            let mut c = vec![0i64; n + 1];
            for k in 0..=(n - i + 1) {
                c[n - k] = if k % 2 == 0 { 1 } else { -1 };
            }
            c
        })
        .collect();
    MPolynomials { coeffs }
}

type FamilyCache = HashMap<(usize, usize), Arc<ProjectorFamily>>;

/// The anti-symmetrizers `A_0..A_n` and PVM `P_1..P_n` on `n` copies of a
/// `d`-level system.
#[derive(Debug)]
pub struct ProjectorFamily {
    local_dim: usize,
    copies: usize,
    antisym: Vec<TensorOperator>,
    pvm: Vec<TensorOperator>,
    ranks: Vec<usize>,
}

impl ProjectorFamily {
    /// Builds the family from scratch. `copies ≤ d`.
    pub fn build(local_dim: usize, copies: usize, limits: &DenseLimits) -> Result<Self> {
        check_family_size(local_dim, copies, limits)?;
        let antisym = (0..=copies)
            .map(|k| antisymmetrizer_on(local_dim, k, copies, limits))
            .collect::<Result<Vec<_>>>()?;
        let pvm = (1..=copies)
            .map(|i| {
                let upper = copies - i + 1;
                let m = if i == 1 {
                    antisym[copies].matrix().clone()
                } else {
                    antisym[upper].matrix() - antisym[upper + 1].matrix()
                };
                TensorOperator::new(local_dim, copies, m)
            })
            .collect::<Result<Vec<_>>>()?;
        let ranks = pvm.iter().map(|p| numerical_rank(p.matrix())).collect();
        Ok(Self {
            local_dim,
            copies,
            antisym,
            pvm,
            ranks,
        })
    }

    /// Shared, lazily built family. Entries are immutable once inserted.
    pub fn cached(local_dim: usize, copies: usize, limits: &DenseLimits) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<FamilyCache>> = OnceLock::new();
        check_family_size(local_dim, copies, limits)?;
        let cache = CACHE.get_or_init(Default::default);
        if let Some(f) = cache.lock().unwrap().get(&(local_dim, copies)) {
            return Ok(Arc::clone(f));
        }
        // Build outside the lock; a racing builder produces an identical family.
        let family = Arc::new(Self::build(local_dim, copies, limits)?);
        let mut guard = cache.lock().unwrap();
        Ok(Arc::clone(guard.entry((local_dim, copies)).or_insert(family)))
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// `A_k` for `k = 0..=n`.
    pub fn antisym(&self, k: usize) -> &TensorOperator {
        &self.antisym[k]
    }

    /// `P_i` for `i = 1..=n`.
    pub fn projector(&self, i: usize) -> &TensorOperator {
        &self.pvm[i - 1]
    }

    pub fn projectors(&self) -> &[TensorOperator] {
        &self.pvm
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `M(x) = Σ_{k=0}^{n} (−1)^k x^{n−k} A_k`.
    pub fn observable_m(&self, x: f64) -> TensorOperator {
        let n = self.copies;
        let dim = self.antisym[0].dim();
        let mut m = CMatrix::zeros(dim, dim);
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            m += self.antisym[k].matrix() * C64::new(sign * x.powi((n - k) as i32), 0.0);
        }
        TensorOperator::new(self.local_dim, n, m).expect("same shape as A_k")
    }

    /// `tr(P_i ρ^{⊗n})` for `i = 1..n`, by dense contraction.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.local_dim {
            return Err(Error::Argument(format!(
                "state has dimension {}, family expects {}",
                rho.dim(),
                self.local_dim
            )));
        }
        let power = rho.tensor_power(self.copies);
        Ok(self.pvm.iter().map(|p| trace_product(p.matrix(), &power).re).collect())
    }
}

fn check_family_size(local_dim: usize, copies: usize, limits: &DenseLimits) -> Result<()> {
    if copies == 0 || copies > local_dim {
        return Err(Error::Argument(format!(
            "number of copies must be in 1..={local_dim}, got {copies}"
        )));
    }
    let required = limits.check(local_dim, copies)?;
    if copies == local_dim && local_dim > limits.max_family_dim {
        let allowed = limits
            .max_family_dim
            .checked_pow(copies as u32)
            .map_or(limits.max_dim, |a| a.min(limits.max_dim));
        return Err(Error::Resource { required, allowed });
    }
    Ok(())
}

/// The full `d`-copy family (cached).
pub fn pvm_family(local_dim: usize, limits: &DenseLimits) -> Result<Arc<ProjectorFamily>> {
    ProjectorFamily::cached(local_dim, local_dim, limits)
}

/// `M(x)` on the `d`-fold tensor power.
pub fn observable_m(local_dim: usize, x: f64, limits: &DenseLimits) -> Result<TensorOperator> {
    Ok(pvm_family(local_dim, limits)?.observable_m(x))
}
