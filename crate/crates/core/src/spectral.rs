//! Reconstruction of the spectrum from outcome probabilities.
//!
//! Pipeline: `p → det(x − ρ) = Σ_i p_i m_i(x) → companion-matrix roots →
//! projection onto the probability simplex`. The moment path
//! (`tr ρ^m → a_k → p_i`) produces the same probabilities without building
//! any tensor-power operator.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::projectors::{m_polynomials, MPolynomials};
use crate::simkit::OutcomeDistribution;
use crate::state::DensityMatrix;
use crate::{Error, Result, C64};

/// Tolerance below which a negative probability is treated as roundoff.
pub const NEGATIVE_PROBABILITY_TOLERANCE: f64 = 1e-10;

/// Power sums `raw[m−1] = tr ρ^m` and signed moments `mu[m−1] = (−1)^{m−1} tr ρ^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    raw: Vec<f64>,
    mu: Vec<f64>,
}

impl MomentVector {
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let mu = raw
            .iter()
            .enumerate()
            .map(|(i, &r)| if i % 2 == 0 { r } else { -r })
            .collect();
        Self { raw, mu }
    }

    /// `tr ρ^m`, `m` 1-based.
    pub fn raw(&self, m: usize) -> f64 {
        self.raw[m - 1]
    }

    /// `μ_m`, `m` 1-based.
    pub fn mu(&self, m: usize) -> f64 {
        self.mu[m - 1]
    }

    pub fn raw_all(&self) -> &[f64] {
        &self.raw
    }

    pub fn order(&self) -> usize {
        self.raw.len()
    }
}

/// `a_0 = 1, a_k = tr(A_k ρ^{⊗k}) = e_k(λ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ASequence {
    a: Vec<f64>,
}

impl ASequence {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.first() != Some(&1.0) {
            return Err(Error::Argument("a-sequence must start with a_0 = 1".into()));
        }
        Ok(Self { a })
    }

    pub fn get(&self, k: usize) -> f64 {
        self.a[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.a
    }

    /// Highest index `n` (the sequence has `n + 1` entries).
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }
}

/// A real polynomial stored by ascending powers; `coeffs[j]` multiplies `x^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    coeffs: Vec<f64>,
}

impl CharPoly {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// `Σ_{k=0}^{n} (−1)^k a_k x^{n−k}`.
    pub fn from_a(a: &ASequence) -> Self {
        let n = a.order();
        let mut coeffs = vec![0.0; n + 1];
        for k in 0..=n {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[n - k] = s * a.get(k);
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

/// Output of the reconstruction together with quality diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    /// Roots of the reconstructed polynomial as found.
    pub raw_roots: Vec<C64>,
    /// Physical spectrum: real, nonnegative, unit sum, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Whether the raw roots needed any correction to be a valid spectrum.
    pub physicalized: bool,
    /// Largest `|Im|` among the raw roots (discarded).
    pub max_imag: f64,
    /// Euclidean distance moved by the simplex projection.
    pub projection_distance: f64,
    /// `1 − Σ p_i` before renormalization of the input probabilities.
    pub normalization_deficit: f64,
}

/// `tr ρ^m` for `m = 1..=k_max` by repeated multiplication.
pub fn moments_exact(rho: &DensityMatrix, k_max: usize) -> MomentVector {
    let mut raw = Vec::with_capacity(k_max);
    let mut power = rho.matrix().clone();
    for m in 1..=k_max {
        if m > 1 {
            power = &power * rho.matrix();
        }
        raw.push(power.trace().re);
    }
    MomentVector::from_raw(raw)
}

/// Newton–Girard recurrence `a_k = (1/k) Σ_{m=1}^{k} μ_m a_{k−m}` for `k = 1..=order`.
pub fn newton_girard(moments: &MomentVector) -> ASequence {
    newton_girard_to(moments, moments.order()).expect("order within range")
}

/// Same as [`newton_girard`] truncated at `order`.
pub fn newton_girard_to(moments: &MomentVector, order: usize) -> Result<ASequence> {
    if order > moments.order() {
        return Err(Error::Argument(format!(
            "a_{order} needs moments through order {order}, have {}",
            moments.order()
        )));
    }
    let mut a = vec![1.0];
    for k in 1..=order {
        let s: f64 = (1..=k).map(|m| moments.mu(m) * a[k - m]).sum();
        a.push(s / k as f64);
    }
    Ok(ASequence { a })
}

/// `p_1 = a_n`, `p_i = a_{n−i+1} − a_{n−i+2}`: the outcome probabilities of
/// the `n`-copy PVM computed from the `a`-sequence.
pub fn probs_from_a(a: &ASequence) -> Result<Vec<f64>> {
    let n = a.order();
    if n == 0 {
        return Err(Error::Argument("a-sequence must have order ≥ 1".into()));
    }
    let p: Vec<f64> = (1..=n)
        .map(|i| {
            if i == 1 {
                a.get(n)
            } else {
                a.get(n - i + 1) - a.get(n - i + 2)
            }
        })
        .collect();
    if let Some((i, &v)) = p.iter().enumerate().find(|(_, &v)| v < -NEGATIVE_PROBABILITY_TOLERANCE) {
        return Err(Error::validation(
            "outcome distribution",
            format!("p_{} = {v:e} is negative; input is not a physical state", i + 1),
        ));
    }
    Ok(p)
}

/// `det(x − ρ) = Σ_i m_i(x) p_i`, after renormalizing `p` to unit sum.
/// Returns the polynomial and the pre-renormalization deficit `1 − Σ p`.
pub fn charpoly_from_probs(p: &[f64], m: &MPolynomials) -> Result<(CharPoly, f64)> {
    if p.len() != m.degree() {
        return Err(Error::Argument(format!(
            "{} probabilities supplied for degree-{} reconstruction",
            p.len(),
            m.degree()
        )));
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite probability".into()));
    }
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numeric(format!("probabilities sum to {total}")));
    }
    let deficit = 1.0 - total;
    if deficit.abs() > 1e-12 {
        log::debug!("renormalizing outcome distribution, deficit {deficit:e}");
    }
    let n = m.degree();
    let mut coeffs = vec![0.0; n + 1];
    for (i, &pi) in p.iter().enumerate() {
        let w = pi / total;
        for (c, &mc) in coeffs.iter_mut().zip(m.coeffs(i + 1)) {
            *c += w * mc as f64;
        }
    }
    Ok((CharPoly { coeffs }, deficit))
}

/// All complex roots, as eigenvalues of the companion matrix.
pub fn roots(poly: &CharPoly) -> Result<Vec<C64>> {
    let c = poly.coeffs();
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite polynomial coefficient".into()));
    }
    let n = poly.degree();
    let lead = c[n];
    if n == 0 || lead == 0.0 {
        return Err(Error::Numeric(format!(
            "degenerate polynomial (degree {n}, leading coefficient {lead})"
        )));
    }
    if n == 1 {
        return Ok(vec![C64::new(-c[0] / lead, 0.0)]);
    }
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -c[i] / lead;
    }
    let ev = companion.complex_eigenvalues();
    let roots: Vec<C64> = ev.iter().map(|z| polish(poly, C64::new(z.re, z.im))).collect();
    if roots.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("root extraction produced NaN".into()));
    }
    Ok(roots)
}

/// A few Newton steps on the original coefficients; kept only while they
/// reduce the residual.
fn polish(poly: &CharPoly, mut z: C64) -> C64 {
    let coeffs = poly.coeffs();
    let derivative: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(j, &c)| j as f64 * c).collect();
    let dpoly = CharPoly::from_coeffs(derivative);
    let mut residual = poly.eval_complex(z).norm();
    for _ in 0..3 {
        let dz = dpoly.eval_complex(z);
        if dz.norm() == 0.0 {
            break;
        }
        let candidate = z - poly.eval_complex(z) / dz;
        let r = poly.eval_complex(candidate).norm();
        if r.is_nan() || r >= residual {
            break;
        }
        z = candidate;
        residual = r;
    }
    z
}

/// Euclidean projection onto `{w : w_i ≥ 0, Σ w_i = 1}` (sort-and-threshold).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn is_valid_spectrum(v: &[f64]) -> bool {
    v.iter().all(|&x| x >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() <= 1e-12
}

/// Real parts, projected onto the simplex when needed, sorted descending.
pub fn physicalize(raw_roots: &[C64]) -> SpectrumEstimate {
    let max_imag = raw_roots.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let real: Vec<f64> = raw_roots.iter().map(|z| z.re).collect();
    let (mut eigenvalues, distance) = if is_valid_spectrum(&real) {
        (real.clone(), 0.0)
    } else {
        let projected = project_to_simplex(&real);
        let dist = real
            .iter()
            .zip(&projected)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        (projected, dist)
    };
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    SpectrumEstimate {
        raw_roots: raw_roots.to_vec(),
        eigenvalues,
        physicalized: max_imag > 0.0 || distance > 0.0,
        max_imag,
        projection_distance: distance,
        normalization_deficit: 0.0,
    }
}

/// Full reconstruction from the `d` outcome probabilities of the `d`-copy PVM.
pub fn determine_eigenvalues(p: &OutcomeDistribution, d: usize) -> Result<SpectrumEstimate> {
    if p.len() != d {
        return Err(Error::Argument(format!(
            "expected {d} outcome probabilities, got {}",
            p.len()
        )));
    }
    reconstruct(p.probs())
}

fn reconstruct(p: &[f64]) -> Result<SpectrumEstimate> {
    let m = m_polynomials(p.len());
    let (poly, deficit) = charpoly_from_probs(p, &m)?;
    let r = roots(&poly)?;
    let mut est = physicalize(&r);
    est.normalization_deficit = deficit;
    Ok(est)
}

/// Predominant eigenvalues from the `r = d − d0` copy measurement, with `d0`
/// eigenvalues known to vanish. The returned spectrum has length `d`.
pub fn partial_eigenvalues(p_reduced: &OutcomeDistribution, d: usize, d0: usize) -> Result<SpectrumEstimate> {
    if d0 >= d {
        return Err(Error::Argument(format!("d0 = {d0} must be smaller than d = {d}")));
    }
    let r = d - d0;
    if p_reduced.len() != r {
        return Err(Error::Argument(format!(
            "expected {r} outcome probabilities for {r} copies, got {}",
            p_reduced.len()
        )));
    }
    let mut est = reconstruct(p_reduced.probs())?;
    est.eigenvalues.extend(std::iter::repeat_n(0.0, d0));
    Ok(est)
}

/// Entropies of a physical spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub von_neumann: f64,
    /// `(α, S_α)` pairs.
    pub renyi: Vec<(f64, f64)>,
    /// `(q, T_q)` pairs.
    pub tsallis: Vec<(f64, f64)>,
}

pub fn von_neumann(spectrum: &[f64]) -> f64 {
    -spectrum.iter().filter(|&&l| l > 0.0).map(|&l| l * l.ln()).sum::<f64>()
}

fn power_sum(spectrum: &[f64], alpha: f64) -> f64 {
    spectrum.iter().filter(|&&l| l > 0.0).map(|&l| l.powf(alpha)).sum()
}

pub fn renyi(spectrum: &[f64], alpha: f64) -> f64 {
    if alpha == 1.0 {
        return von_neumann(spectrum);
    }
    power_sum(spectrum, alpha).ln() / (1.0 - alpha)
}

pub fn tsallis(spectrum: &[f64], q: f64) -> f64 {
    if q == 1.0 {
        return von_neumann(spectrum);
    }
    (1.0 - power_sum(spectrum, q)) / (q - 1.0)
}

pub fn entropies(spectrum: &[f64], alphas: &[f64], qs: &[f64]) -> EntropyReport {
    EntropyReport {
        von_neumann: von_neumann(spectrum),
        renyi: alphas.iter().map(|&a| (a, renyi(spectrum, a))).collect(),
        tsallis: qs.iter().map(|&q| (q, tsallis(spectrum, q))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn moments_of_simple_states() {
        let pure = DensityMatrix::from_diagonal(&[0.0, 1.0, 0.0]).unwrap();
        assert!(moments_exact(&pure, 4).raw_all().iter().all(|&v| v == 1.0));
        let mixed = DensityMatrix::maximally_mixed(2);
        let mv = moments_exact(&mixed, 4);
        for m in 1..=4 {
            assert!((mv.raw(m) - 2f64.powi(1 - m as i32)).abs() < 1e-15);
        }
        assert_eq!(mv.mu(2), -mv.raw(2));
    }

    #[test]
    fn newton_girard_examples() {
        let a = newton_girard(&MomentVector::from_raw(vec![1.0; 4]));
        assert_eq!(a.values(), &[1.0, 1.0, 0.0, 0.0, 0.0]);
        let a = newton_girard(&MomentVector::from_raw(vec![1.0, 0.5]));
        assert!((a.get(2) - 0.25).abs() < 1e-15);
        let a = newton_girard(&MomentVector::from_raw(vec![1.0, 1.0 / 3.0, 1.0 / 9.0]));
        assert!(close(a.values(), &[1.0, 1.0, 1.0 / 3.0, 1.0 / 27.0], 1e-15));
    }

    #[test]
    fn probabilities_from_a_sequence() {
        let pure = ASequence::new(vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(probs_from_a(&pure).unwrap(), vec![0.0, 0.0, 1.0]);
        let mixed = ASequence::new(vec![1.0, 1.0, 1.0 / 3.0, 1.0 / 27.0]).unwrap();
        assert!(close(
            &probs_from_a(&mixed).unwrap(),
            &[1.0 / 27.0, 8.0 / 27.0, 18.0 / 27.0],
            1e-15
        ));
        let qubit = ASequence::new(vec![1.0, 1.0, 0.25]).unwrap();
        assert!(close(&probs_from_a(&qubit).unwrap(), &[0.25, 0.75], 1e-15));
        let bad = ASequence::new(vec![1.0, 1.0, 1.2]).unwrap();
        assert!(probs_from_a(&bad).is_err());
    }

    #[test]
    fn charpoly_examples() {
        let (p, _) = charpoly_from_probs(&[0.0, 1.0], &m_polynomials(2)).unwrap();
        assert_eq!(p.coeffs(), &[0.0, -1.0, 1.0]);
        let (p, _) = charpoly_from_probs(&[0.25, 0.75], &m_polynomials(2)).unwrap();
        assert!(close(p.coeffs(), &[0.25, -1.0, 1.0], 1e-15));
        let (p, _) = charpoly_from_probs(&[1.0 / 27.0, 8.0 / 27.0, 18.0 / 27.0], &m_polynomials(3)).unwrap();
        assert!(close(p.coeffs(), &[-1.0 / 27.0, 1.0 / 3.0, -1.0, 1.0], 1e-15));
        assert!(charpoly_from_probs(&[0.5, 0.5], &m_polynomials(3)).is_err());
    }

    #[test]
    fn renormalization_reports_deficit() {
        let (p, deficit) = charpoly_from_probs(&[0.2, 0.7], &m_polynomials(2)).unwrap();
        assert!((deficit - 0.1).abs() < 1e-15);
        assert!((p.coeffs()[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn roots_examples() {
        let mut r = roots(&CharPoly::from_coeffs(vec![0.0, -1.0, 1.0])).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!(r[0].norm() < 1e-15 && (r[1] - 1.0).norm() < 1e-15);
        let r = roots(&CharPoly::from_coeffs(vec![0.25, -1.0, 1.0])).unwrap();
        assert!(r.iter().all(|z| (z - 0.5).norm() < 1e-7));
        assert!(roots(&CharPoly::from_coeffs(vec![f64::NAN, 1.0])).is_err());
        assert!(roots(&CharPoly::from_coeffs(vec![1.0, 0.0])).is_err());
    }

    #[test]
    fn simplex_projection_examples() {
        assert_eq!(project_to_simplex(&[0.6, 0.6]), vec![0.5, 0.5]);
        let est = physicalize(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert_eq!(est.eigenvalues, vec![1.0, 0.0]);
        assert_eq!(est.max_imag, 0.0);
        assert_eq!(est.projection_distance, 0.0);
        assert!(!est.physicalized);
        let est = physicalize(&[C64::new(0.52, 0.0), C64::new(0.49, 1e-4), C64::new(0.49, -1e-4)]);
        assert!(is_valid_spectrum(&est.eigenvalues));
        assert_eq!(est.max_imag, 1e-4);
        assert!(est.physicalized);
    }

    #[test]
    fn pipeline_examples() {
        let run = |p: Vec<f64>| determine_eigenvalues(&OutcomeDistribution::exact(p), 0).map(|e| e.eigenvalues);
        assert!(run(vec![0.0, 1.0]).is_err());
        let d2 = |p: Vec<f64>| {
            determine_eigenvalues(&OutcomeDistribution::exact(p), 2)
                .unwrap()
                .eigenvalues
        };
        assert!(close(&d2(vec![0.0, 1.0]), &[1.0, 0.0], 1e-15));
        assert!(close(&d2(vec![0.25, 0.75]), &[0.5, 0.5], 1e-7));
        let e = determine_eigenvalues(
            &OutcomeDistribution::exact(vec![1.0 / 27.0, 8.0 / 27.0, 18.0 / 27.0]),
            3,
        )
        .unwrap();
        // triple root: conditioning ~ ε^{1/3}
        assert!(close(&e.eigenvalues, &[1.0 / 3.0; 3], 1e-5), "{:?}", e.eigenvalues);
    }

    #[test]
    fn partial_examples() {
        let pure = OutcomeDistribution::exact(vec![1.0]);
        let e = partial_eigenvalues(&pure, 3, 2).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 0.0, 0.0]);
        // diag(0.7, 0.3, 0): a = (1, 1, 0.21) → p = (0.21, 0.79)
        let p = OutcomeDistribution::exact(vec![0.21, 0.79]);
        let e = partial_eigenvalues(&p, 3, 1).unwrap();
        assert!(close(&e.eigenvalues, &[0.7, 0.3, 0.0], 1e-12), "{:?}", e.eigenvalues);
        assert!(partial_eigenvalues(&p, 2, 2).is_err());
        let full = OutcomeDistribution::exact(vec![0.1, 0.3, 0.6]);
        assert_eq!(
            partial_eigenvalues(&full, 3, 0).unwrap(),
            determine_eigenvalues(&full, 3).unwrap()
        );
    }

    #[test]
    fn entropy_examples() {
        let r = entropies(&[1.0, 0.0, 0.0], &[0.5, 2.0], &[2.0, 3.0]);
        assert_eq!(r.von_neumann, 0.0);
        assert!(r.renyi.iter().chain(&r.tsallis).all(|(_, v)| v.abs() < 1e-15));
        let third = 1.0 / 3.0;
        assert!((von_neumann(&[third; 3]) - 3f64.ln()).abs() < 1e-15);
        assert!((renyi(&[0.5, 0.5], 2.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(renyi(&[0.3, 0.7], 1.0), von_neumann(&[0.3, 0.7]));
        assert_eq!(tsallis(&[0.3, 0.7], 1.0), von_neumann(&[0.3, 0.7]));
    }
}
