//! Permutations of tensor factors and their unitaries on `H^{⊗k}`.
//!
//! Conventions:
//!
//! - Composition is `(σ∘τ)(i) = σ(τ(i))`.
//! - `U_σ |φ_1 … φ_k⟩ = |φ_{σ(1)} … φ_{σ(k)}⟩`. Under the composition rule
//!   above this gives `U_{σ∘τ} = U_τ U_σ` (an anti-homomorphism).
//! - Tensor factor 1 is the most significant block of the `d^k` basis index.
//!
//! Indices are 0-based internally; `Display` prints 1-based cycle notation.

use std::fmt;

use crate::{CMatrix, Error, Result, C64};

/// Default cap on the total dimension of dense tensor operators.
pub const DEFAULT_MAX_DENSE_DIM: usize = 4096;
/// Default cap on the local dimension for full projector families.
pub const DEFAULT_MAX_FAMILY_DIM: usize = 4;

/// Size guard for dense constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DenseLimits {
    /// Largest allowed `d^k`.
    pub max_dim: usize,
    /// Largest local dimension for which a full `d`-copy projector family is built.
    pub max_family_dim: usize,
}

impl Default for DenseLimits {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DENSE_DIM,
            max_family_dim: DEFAULT_MAX_FAMILY_DIM,
        }
    }
}

impl DenseLimits {
    /// Lifts both caps.
    pub fn unbounded() -> Self {
        Self {
            max_dim: usize::MAX,
            max_family_dim: usize::MAX,
        }
    }

    /// Returns `d^k` if it is within the cap.
    pub fn check(&self, local_dim: usize, factors: usize) -> Result<usize> {
        let required = checked_pow(local_dim, factors).ok_or(Error::Resource {
            required: usize::MAX,
            allowed: self.max_dim,
        })?;
        if required > self.max_dim {
            return Err(Error::Resource {
                required,
                allowed: self.max_dim,
            });
        }
        Ok(required)
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

/// A bijection on `{0, …, k−1}` stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds `σ` from 0-based images, `σ(i) = images[i]`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &v in &images {
            if v >= k {
                return Err(Error::validation(
                    "permutation",
                    format!("image {v} out of range for degree {k}"),
                ));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::validation(
                    "permutation",
                    format!("image {v} appears twice; not a bijection"),
                ));
            }
        }
        Ok(Self { images })
    }

    /// Builds `σ` from 1-based images.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::validation("permutation", "1-based images must be ≥ 1"));
        }
        Self::new(images.iter().map(|&v| v - 1).collect())
    }

    /// Builds `σ ∈ S_k` from disjoint 1-based cycles, e.g. `&[&[1, 2], &[3, 4]]`.
    pub fn from_cycles(k: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        let mut touched = vec![false; k];
        for cycle in cycles {
            for (pos, &e) in cycle.iter().enumerate() {
                if e == 0 || e > k {
                    return Err(Error::validation(
                        "permutation",
                        format!("cycle element {e} out of range 1..={k}"),
                    ));
                }
                if std::mem::replace(&mut touched[e - 1], true) {
                    return Err(Error::validation(
                        "permutation",
                        format!("element {e} appears in more than one cycle"),
                    ));
                }
                let next = cycle[(pos + 1) % cycle.len()];
                images[e - 1] = next - 1;
            }
        }
        Self::new(images)
    }

    pub fn identity(k: usize) -> Self {
        Self {
            images: (0..k).collect(),
        }
    }

    /// Transposition of the 0-based positions `a` and `b`.
    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(a, b);
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ other`, i.e. `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in composition");
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// Canonical cycle list: smallest element first inside each cycle, cycles
    /// ordered by their smallest element. Fixed points appear as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let k = self.degree();
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut counts = vec![0; self.degree()];
        for c in self.cycles() {
            counts[c.len() - 1] += 1;
        }
        CycleType { counts }
    }

    /// `(−1)^(k − #cycles)`.
    pub fn sign(&self) -> i8 {
        let parity = (self.degree() - self.cycles().len()) % 2;
        if parity == 0 {
            1
        } else {
            -1
        }
    }

    /// All `k!` permutations of degree `k` in lexicographic order of their image arrays.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            out.push(Permutation {
                images: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..k).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }

    /// Extends `σ ∈ S_k` to `S_n` (n ≥ k) by fixing `k..n`.
    pub fn extend(&self, n: usize) -> Permutation {
        assert!(n >= self.degree());
        let mut images = self.images.clone();
        images.extend(self.degree()..n);
        Permutation { images }
    }

    /// Index of `U_σ |basis(index)⟩` in the `d^k` computational basis.
    pub(crate) fn act_on_index(&self, index: usize, local_dim: usize, digits: &mut [usize]) -> usize {
        let k = self.degree();
        let mut rest = index;
        for l in (0..k).rev() {
            digits[l] = rest % local_dim;
            rest /= local_dim;
        }
        self.images.iter().fold(0, |acc, &src| acc * local_dim + digits[src])
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nontrivial: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if nontrivial.is_empty() {
            return write!(f, "()");
        }
        for c in nontrivial {
            let parts: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Cycle type `j_m(σ)`: the number of `m`-cycles for `m = 1..k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleType {
    counts: Vec<usize>,
}

impl CycleType {
    /// From explicit counts, `counts[m−1] = j_m`.
    pub fn from_counts(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    /// `j_m`; zero outside `1..=k`.
    pub fn count(&self, m: usize) -> usize {
        if m == 0 {
            return 0;
        }
        self.counts.get(m - 1).copied().unwrap_or(0)
    }

    /// `k = Σ m·j_m`.
    pub fn degree(&self) -> usize {
        self.counts.iter().enumerate().map(|(i, j)| (i + 1) * j).sum()
    }

    /// Largest `m` with `j_m > 0`.
    pub fn max_length(&self) -> usize {
        self.counts.iter().rposition(|&j| j > 0).map_or(0, |i| i + 1)
    }

    /// `Π_m ((−1)^(m−1))^{j_m}`.
    pub fn sign(&self) -> i8 {
        let odd: usize = self
            .counts
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 1)
            .map(|(_, j)| j)
            .sum();
        if odd.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

pub fn cycle_decompose(sigma: &Permutation) -> CycleType {
    sigma.cycle_type()
}

pub fn sign(sigma: &Permutation) -> i8 {
    sigma.sign()
}

/// Dense operator on the `k`-fold tensor power of a `d`-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    local_dim: usize,
    factors: usize,
    matrix: CMatrix,
}

impl TensorOperator {
    pub fn new(local_dim: usize, factors: usize, matrix: CMatrix) -> Result<Self> {
        let dim =
            checked_pow(local_dim, factors).ok_or_else(|| Error::Argument("tensor dimension overflows".into()))?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Argument(format!(
                "matrix is {}x{}, expected {dim}x{dim} for {factors} factors of dimension {local_dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            local_dim,
            factors,
            matrix,
        })
    }

    pub fn identity(local_dim: usize, factors: usize) -> Self {
        let dim = local_dim.pow(factors as u32);
        Self {
            local_dim,
            factors,
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `tr(self · state)` for a `dim × dim` operator `state`.
    pub fn expectation(&self, state: &CMatrix) -> C64 {
        trace_product(&self.matrix, state)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `U_σ` on `(C^d)^{⊗k}` as a dense permutation matrix.
pub fn permutation_unitary(sigma: &Permutation, local_dim: usize, limits: &DenseLimits) -> Result<TensorOperator> {
    if local_dim < 2 {
        return Err(Error::Argument(format!("local dimension must be ≥ 2, got {local_dim}")));
    }
    let k = sigma.degree();
    let dim = limits.check(local_dim, k)?;
    let mut m = CMatrix::zeros(dim, dim);
    let mut digits = vec![0; k];
    for col in 0..dim {
        let row = sigma.act_on_index(col, local_dim, &mut digits);
        m[(row, col)] = C64::new(1.0, 0.0);
    }
    Ok(TensorOperator {
        local_dim,
        factors: k,
        matrix: m,
    })
}

/// `tr(U_σ ρ^{⊗k}) = Π_m (tr ρ^m)^{j_m(σ)}`, with `moments[m−1] = tr ρ^m`.
pub fn moment_trace(cycle_type: &CycleType, moments: &[f64]) -> Result<f64> {
    let needed = cycle_type.max_length();
    if moments.len() < needed {
        return Err(Error::Argument(format!(
            "moment of order {needed} required, only {} supplied",
            moments.len()
        )));
    }
    if let Some(&first) = moments.first() {
        if (first - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!(
                "first moment must be 1 (unit trace), got {first}"
            )));
        }
    }
    Ok((1..=needed)
        .map(|m| moments[m - 1].powi(cycle_type.count(m) as i32))
        .product())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_cycle_type() {
        let ct = Permutation::identity(4).cycle_type();
        assert_eq!(ct.count(1), 4);
        assert_eq!((2..=4).map(|m| ct.count(m)).sum::<usize>(), 0);
    }

    #[test]
    fn paper_example_cycle_type() {
        let sigma = Permutation::from_cycles(7, &[&[1, 2], &[3, 4], &[5, 6, 7]]).unwrap();
        let ct = cycle_decompose(&sigma);
        assert_eq!(ct.count(1), 0);
        assert_eq!(ct.count(2), 2);
        assert_eq!(ct.count(3), 1);
        assert_eq!(ct.degree(), 7);
        assert_eq!(sigma.to_string(), "(1 2)(3 4)(5 6 7)");
        assert_eq!(sigma.sign(), 1);
        assert_eq!(ct.sign(), 1);
    }

    #[test]
    fn five_cycle() {
        let sigma = Permutation::from_cycles(5, &[&[1, 2, 3, 4, 5]]).unwrap();
        let ct = sigma.cycle_type();
        assert_eq!(ct.count(5), 1);
        assert_eq!(ct.count(1), 0);
    }

    #[test]
    fn malformed_images_rejected() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_cycles(3, &[&[1, 2], &[2, 3]]).is_err());
    }

    #[test]
    fn transposition_is_odd() {
        for k in 2..6 {
            for a in 0..k {
                for b in (a + 1)..k {
                    assert_eq!(Permutation::transposition(k, a, b).sign(), -1);
                }
            }
        }
        assert_eq!(Permutation::identity(3).sign(), 1);
    }

    fn inversion_sign(p: &Permutation) -> i8 {
        let im = p.images();
        let mut inv = 0;
        for i in 0..im.len() {
            for j in (i + 1)..im.len() {
                if im[i] > im[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn sign_matches_inversion_count() {
        for k in 1..=6 {
            for p in Permutation::all(k) {
                assert_eq!(p.sign(), inversion_sign(&p), "{p}");
                assert_eq!(p.sign(), p.cycle_type().sign());
            }
        }
    }

    #[test]
    fn all_has_factorial_size() {
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::all(5).len(), 120);
        assert_eq!(Permutation::all(1).len(), 1);
    }

    #[test]
    fn canonical_cycles() {
        let p = Permutation::from_cycles(5, &[&[4, 2], &[5, 3, 1]]).unwrap();
        assert_eq!(p.cycles(), vec![vec![0, 4, 2], vec![1, 3]]);
    }

    #[test]
    fn swap_matrix_qubits() {
        let u = permutation_unitary(&Permutation::transposition(2, 0, 1), 2, &DenseLimits::default()).unwrap();
        let m = u.matrix();
        let one = C64::new(1.0, 0.0);
        assert_eq!(m[(0, 0)], one);
        assert_eq!(m[(2, 1)], one);
        assert_eq!(m[(1, 2)], one);
        assert_eq!(m[(3, 3)], one);
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 4);
    }

    #[test]
    fn three_cycle_factorization() {
        let limits = DenseLimits::default();
        let c123 = Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let t12 = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let t23 = Permutation::from_cycles(3, &[&[2, 3]]).unwrap();
        assert_eq!(t12.compose(&t23), c123);
        let u = |p: &Permutation| permutation_unitary(p, 2, &limits).unwrap().into_matrix();
        // U_{σ∘τ} = U_τ U_σ
        assert_eq!(u(&c123), u(&t23) * u(&t12));
    }

    #[test]
    fn dimension_guard() {
        let limits = DenseLimits::default();
        let err = permutation_unitary(&Permutation::identity(6), 5, &limits).unwrap_err();
        match err {
            Error::Resource { required, allowed } => {
                assert_eq!(required, 15625);
                assert_eq!(allowed, 4096);
            }
            other => panic!("unexpected {other}"),
        }
        assert!(permutation_unitary(&Permutation::identity(2), 1, &limits).is_err());
    }

    #[test]
    fn moment_trace_examples() {
        let sigma = Permutation::from_cycles(7, &[&[1, 2], &[3, 4], &[5, 6, 7]]).unwrap();
        let moments = [1.0, 0.5, 0.3, 0.2, 0.1, 0.05, 0.01];
        let v = moment_trace(&sigma.cycle_type(), &moments).unwrap();
        assert!((v - 0.5f64.powi(2) * 0.3).abs() < 1e-15);
        assert_eq!(
            moment_trace(&Permutation::identity(4).cycle_type(), &[1.0]).unwrap(),
            1.0
        );
        assert_eq!(moment_trace(&sigma.cycle_type(), &[1.0; 7]).unwrap(), 1.0);
        assert!(moment_trace(&sigma.cycle_type(), &[1.0, 0.5]).is_err());
    }
}
