//! Measurement simulation: random states, exact outcome distributions,
//! seeded multinomial sampling and shot-noise sweeps.
//!
//! Every random quantity is a pure function of an explicit 64-bit seed.
//! Per-trial seeds in sweeps come from [`derive_seed`], so results do not
//! depend on how trials are scheduled across threads.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::permkit::DenseLimits;
use crate::projectors::ProjectorFamily;
use crate::spectral::{determine_eigenvalues, moments_exact, newton_girard_to, probs_from_a, SpectrumEstimate};
use crate::state::{DensityMatrix, StateFile};
use crate::{CMatrix, Error, Result, C64};

/// Oracle eigenvalue gaps below this tag a state as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-3;

/// Mixing constant for seed derivation (the 64-bit golden ratio).
pub const SEED_MIX_CONSTANT: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    Exact,
    Empirical,
}

/// Outcome probabilities of a PVM, either exact or estimated from counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
    kind: DistributionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
}

impl OutcomeDistribution {
    pub fn exact(probs: Vec<f64>) -> Self {
        Self {
            probs,
            kind: DistributionKind::Exact,
            shots: None,
        }
    }

    pub fn from_counts(counts: &[u64]) -> Self {
        let n: u64 = counts.iter().sum();
        Self {
            probs: counts.iter().map(|&c| c as f64 / n as f64).collect(),
            kind: DistributionKind::Empirical,
            shots: Some(n),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// How to compute `tr(P_i ρ^{⊗r})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbabilityPath {
    /// Contract the dense projectors against `ρ^{⊗r}`.
    Dense,
    /// Moments, Newton–Girard, then successive differences.
    Moments,
}

/// Recipe for a test state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StateSpec {
    /// `|ψ⟩⟨ψ|` with `ψ` a normalized complex Gaussian vector.
    PureHaar {
        dim: usize,
        seed: u64,
    },
    /// `G G† / tr(G G†)` with `G` a `d × d` complex Ginibre matrix.
    GinibreMixed {
        dim: usize,
        seed: u64,
    },
    /// As `GinibreMixed` with a `d × rank` factor.
    RankR {
        dim: usize,
        rank: usize,
        seed: u64,
    },
    Diagonal {
        entries: Vec<f64>,
    },
    Explicit {
        state: StateFile,
    },
}

impl StateSpec {
    pub fn dim(&self) -> usize {
        match self {
            StateSpec::PureHaar { dim, .. } | StateSpec::GinibreMixed { dim, .. } | StateSpec::RankR { dim, .. } => {
                *dim
            }
            StateSpec::Diagonal { entries } => entries.len(),
            StateSpec::Explicit { state } => state.dim,
        }
    }
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    // Column-major fill order is part of the determinism contract.
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

fn normalized_gram(g: &CMatrix) -> CMatrix {
    let w = g * g.adjoint();
    let tr = w.trace().re;
    let mut w = w / C64::new(tr, 0.0);
    // exact Hermiticity
    let n = w.nrows();
    for i in 0..n {
        w[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            w[(j, i)] = w[(i, j)].conj();
        }
    }
    w
}

pub fn generate_state(spec: &StateSpec) -> Result<DensityMatrix> {
    match spec {
        StateSpec::PureHaar { dim, seed } => {
            check_dim(*dim)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let v = gaussian_matrix(*dim, 1, &mut rng);
            DensityMatrix::new(normalized_gram(&v))
        }
        StateSpec::GinibreMixed { dim, seed } => {
            check_dim(*dim)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            DensityMatrix::new(normalized_gram(&gaussian_matrix(*dim, *dim, &mut rng)))
        }
        StateSpec::RankR { dim, rank, seed } => {
            check_dim(*dim)?;
            if *rank == 0 || rank > dim {
                return Err(Error::Argument(format!("rank must be in 1..={dim}, got {rank}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            DensityMatrix::new(normalized_gram(&gaussian_matrix(*dim, *rank, &mut rng)))
        }
        StateSpec::Diagonal { entries } => DensityMatrix::from_diagonal(entries),
        StateSpec::Explicit { state } => state.to_density(),
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Argument(format!("dimension must be ≥ 2, got {dim}")));
    }
    Ok(())
}

/// `tr(P_i ρ^{⊗copies})` for the `copies`-fold PVM.
pub fn exact_distribution(
    rho: &DensityMatrix,
    copies: usize,
    path: ProbabilityPath,
    limits: &DenseLimits,
) -> Result<OutcomeDistribution> {
    let d = rho.dim();
    if copies == 0 || copies > d {
        return Err(Error::Argument(format!("copies must be in 1..={d}, got {copies}")));
    }
    let probs = match path {
        ProbabilityPath::Dense => ProjectorFamily::cached(d, copies, limits)?.probabilities(rho)?,
        ProbabilityPath::Moments => {
            let a = newton_girard_to(&moments_exact(rho, copies), copies)?;
            probs_from_a(&a)?
        }
    };
    Ok(OutcomeDistribution::exact(probs))
}

/// Multinomial counts from `shots` independent inverse-CDF categorical draws.
pub fn sample_counts(p: &OutcomeDistribution, shots: u64, seed: u64) -> Vec<u64> {
    let clipped: Vec<f64> = p.probs().iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let mut cdf = Vec::with_capacity(clipped.len());
    let mut acc = 0.0;
    for v in &clipped {
        acc += v / total;
        cdf.push(acc);
    }
    // last outcome with nonzero weight absorbs u ≥ cdf[last] from roundoff
    let last = clipped.iter().rposition(|&v| v > 0.0).unwrap_or(0);
    let mut counts = vec![0u64; clipped.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        let u: f64 = rng.random();
        let i = cdf.iter().position(|&c| u < c).unwrap_or(last).min(last);
        counts[i] += 1;
    }
    counts
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial` at shot count `shots`:
/// `mix(mix(mix(base + K) + shots·K) + trial·K)` with `K = SEED_MIX_CONSTANT`.
pub fn derive_seed(base_seed: u64, shots: u64, trial: u64) -> u64 {
    let k = SEED_MIX_CONSTANT;
    let s = mix64(base_seed.wrapping_add(k));
    let s = mix64(s.wrapping_add(shots.wrapping_mul(k)));
    mix64(s.wrapping_add(trial.wrapping_mul(k)))
}

/// `shots = 0` requests the exact distribution.
pub const EXACT_SHOTS: u64 = 0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub distribution: OutcomeDistribution,
    pub estimate: SpectrumEstimate,
    pub oracle: Vec<f64>,
    /// Sorted estimate minus sorted oracle.
    pub errors: Vec<f64>,
}

/// One measurement-and-reconstruction run on `d` copies.
pub fn run_trial(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<TrialOutcome> {
    let d = rho.dim();
    let exact = exact_distribution(rho, d, ProbabilityPath::Moments, &DenseLimits::default())?;
    let distribution = if shots == EXACT_SHOTS {
        exact
    } else {
        OutcomeDistribution::from_counts(&sample_counts(&exact, shots, seed))
    };
    let estimate = determine_eigenvalues(&distribution, d)?;
    let oracle = rho.eigenvalues();
    let errors = estimate.eigenvalues.iter().zip(&oracle).map(|(e, o)| e - o).collect();
    Ok(TrialOutcome {
        distribution,
        estimate,
        oracle,
        errors,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Ascending shot counts.
    pub shots_grid: Vec<u64>,
    pub trials: usize,
    pub base_seed: u64,
    /// Fit the slope even when the state is tagged degenerate.
    #[serde(default)]
    pub include_degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub estimate: Vec<f64>,
    pub errors: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub shots: u64,
    /// Root mean square over trials and eigenvalue indices.
    pub rmse: f64,
    pub trials: Vec<TrialRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the fit in natural-log units.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub oracle: Vec<f64>,
    pub degenerate: bool,
    pub points: Vec<SweepPoint>,
    /// Least-squares fit of `ln RMSE` against `ln N`; `None` when undefined.
    pub slope: Option<SlopeFit>,
    pub slope_undefined: bool,
}

/// Smallest gap between adjacent sorted eigenvalues.
pub fn min_gap(sorted_desc: &[f64]) -> f64 {
    sorted_desc
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<SlopeFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    Some(SlopeFit {
        slope,
        intercept,
        residual,
    })
}

fn run_trials(rho: &DensityMatrix, shots: u64, base_seed: u64, trials: usize) -> Result<Vec<TrialRecord>> {
    let one = |t: usize| -> Result<TrialRecord> {
        let seed = derive_seed(base_seed, shots, t as u64);
        let out = run_trial(rho, shots, seed)?;
        Ok(TrialRecord {
            trial: t,
            seed,
            estimate: out.estimate.eigenvalues,
            errors: out.errors,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(one).collect()
    }
}

/// RMSE of the estimated spectrum against the oracle for each shot count.
pub fn sweep(spec: &StateSpec, config: &SweepConfig) -> Result<SweepResult> {
    if config.shots_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("shot grid must be strictly ascending".into()));
    }
    if config.shots_grid.contains(&EXACT_SHOTS) {
        return Err(Error::Argument("shot counts in a sweep must be ≥ 1".into()));
    }
    let rho = generate_state(spec)?;
    let oracle = rho.eigenvalues();
    let degenerate = min_gap(&oracle) < DEGENERACY_GAP;
    let points = config
        .shots_grid
        .iter()
        .map(|&shots| {
            let trials = run_trials(&rho, shots, config.base_seed, config.trials)?;
            let (sum_sq, count) = trials
                .iter()
                .flat_map(|t| t.errors.iter())
                .fold((0.0, 0usize), |(s, c), e| (s + e * e, c + 1));
            let rmse = if count == 0 {
                f64::NAN
            } else {
                (sum_sq / count as f64).sqrt()
            };
            Ok(SweepPoint { shots, rmse, trials })
        })
        .collect::<Result<Vec<_>>>()?;

    let usable = config.trials >= 2
        && points.len() >= 2
        && points.iter().all(|p| p.rmse.is_finite() && p.rmse > 0.0)
        && (!degenerate || config.include_degenerate);
    let slope = if usable {
        let x: Vec<f64> = points.iter().map(|p| (p.shots as f64).ln()).collect();
        let y: Vec<f64> = points.iter().map(|p| p.rmse.ln()).collect();
        fit_line(&x, &y)
    } else {
        None
    };
    Ok(SweepResult {
        config: config.clone(),
        oracle,
        degenerate,
        slope_undefined: slope.is_none(),
        slope,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_state_is_exact() {
        let rho = generate_state(&StateSpec::Diagonal {
            entries: vec![0.7, 0.3],
        })
        .unwrap();
        assert_eq!(rho.matrix()[(0, 0)], C64::new(0.7, 0.0));
        assert_eq!(rho.matrix()[(1, 1)], C64::new(0.3, 0.0));
        assert_eq!(rho.matrix()[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn pure_haar_is_pure() {
        for seed in 0..10 {
            let rho = generate_state(&StateSpec::PureHaar { dim: 4, seed }).unwrap();
            let purity = (rho.matrix() * rho.matrix()).trace().re;
            assert!((purity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ginibre_is_deterministic() {
        let spec = StateSpec::GinibreMixed { dim: 3, seed: 17 };
        let a = generate_state(&spec).unwrap();
        let b = generate_state(&spec).unwrap();
        let bits = |m: &DensityMatrix| {
            m.matrix()
                .iter()
                .map(|z| (z.re.to_bits(), z.im.to_bits()))
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
        let c = generate_state(&StateSpec::GinibreMixed { dim: 3, seed: 18 }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rank_r_has_requested_rank() {
        let rho = generate_state(&StateSpec::RankR {
            dim: 4,
            rank: 2,
            seed: 5,
        })
        .unwrap();
        let ev = rho.eigenvalues();
        assert!(ev[1] > 1e-6 && ev[2].abs() < 1e-12 && ev[3].abs() < 1e-12, "{ev:?}");
        assert!(generate_state(&StateSpec::RankR {
            dim: 3,
            rank: 4,
            seed: 0
        })
        .is_err());
    }

    #[test]
    fn explicit_payload_validated() {
        let bad = StateFile {
            dim: 2,
            matrix: vec![vec![[0.5, 0.0], [0.3, 0.0]], vec![[0.0, 0.0], [0.5, 0.0]]],
        };
        assert!(generate_state(&StateSpec::Explicit { state: bad }).is_err());
    }

    #[test]
    fn exact_distribution_examples() {
        let limits = DenseLimits::default();
        let mixed = DensityMatrix::maximally_mixed(2);
        let p = exact_distribution(&mixed, 2, ProbabilityPath::Dense, &limits).unwrap();
        assert!((p.probs()[0] - 0.25).abs() < 1e-15 && (p.probs()[1] - 0.75).abs() < 1e-15);
        let pure = DensityMatrix::from_diagonal(&[1.0, 0.0, 0.0]).unwrap();
        let p = exact_distribution(&pure, 3, ProbabilityPath::Moments, &limits).unwrap();
        assert_eq!(p.probs(), &[0.0, 0.0, 1.0]);
        let rho = generate_state(&StateSpec::GinibreMixed { dim: 3, seed: 3 }).unwrap();
        let a = exact_distribution(&rho, 3, ProbabilityPath::Dense, &limits).unwrap();
        let b = exact_distribution(&rho, 3, ProbabilityPath::Moments, &limits).unwrap();
        for (x, y) in a.probs().iter().zip(b.probs()) {
            assert!((x - y).abs() < 1e-10);
        }
        assert_eq!(a.kind(), DistributionKind::Exact);
    }

    #[test]
    fn sampling_contracts() {
        let p = OutcomeDistribution::exact(vec![0.0, 1.0]);
        assert_eq!(sample_counts(&p, 1000, 1), vec![0, 1000]);
        let p = OutcomeDistribution::exact(vec![0.25, 0.75]);
        let n = 1_000_000;
        let c = sample_counts(&p, n, 42);
        assert_eq!(c.iter().sum::<u64>(), n);
        let sigma = (0.25 * 0.75 / n as f64).sqrt();
        assert!((c[0] as f64 / n as f64 - 0.25).abs() < 5.0 * sigma);
        assert_eq!(c, sample_counts(&p, n, 42));
    }

    #[test]
    fn derived_seeds_distinct() {
        let mut seeds: Vec<u64> = (0..100)
            .flat_map(|t| [1000, 10000].map(|n| derive_seed(7, n, t)))
            .collect();
        seeds.sort();
        seeds.dedup();
        assert_eq!(seeds.len(), 200);
        assert_eq!(derive_seed(7, 1000, 3), derive_seed(7, 1000, 3));
    }

    #[test]
    fn exact_trial_has_tiny_error() {
        let rho = generate_state(&StateSpec::GinibreMixed { dim: 3, seed: 11 }).unwrap();
        let out = run_trial(&rho, EXACT_SHOTS, 0).unwrap();
        assert!(out.errors.iter().all(|e| e.abs() < 1e-8), "{:?}", out.errors);
    }

    #[test]
    fn small_shot_trial_is_valid_spectrum() {
        let rho = generate_state(&StateSpec::PureHaar { dim: 2, seed: 2 }).unwrap();
        for seed in 0..20 {
            let out = run_trial(&rho, 100, seed).unwrap();
            let ev = &out.estimate.eigenvalues;
            assert!(ev.iter().all(|&v| (0.0..=1.0).contains(&v)));
            assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_trial_sweep_has_no_slope() {
        let spec = StateSpec::Diagonal {
            entries: vec![0.6, 0.3, 0.1],
        };
        let cfg = SweepConfig {
            shots_grid: vec![100, 1000],
            trials: 1,
            base_seed: 1,
            include_degenerate: false,
        };
        let r = sweep(&spec, &cfg).unwrap();
        assert!(r.slope_undefined && r.slope.is_none());
        assert_eq!(r.points.len(), 2);
    }

    #[test]
    fn degenerate_state_tagged() {
        let spec = StateSpec::Diagonal {
            entries: vec![0.5, 0.5],
        };
        let cfg = SweepConfig {
            shots_grid: vec![1000, 10000],
            trials: 20,
            base_seed: 1,
            include_degenerate: false,
        };
        let r = sweep(&spec, &cfg).unwrap();
        assert!(r.degenerate && r.slope_undefined);
        let r = sweep(
            &spec,
            &SweepConfig {
                include_degenerate: true,
                ..cfg
            },
        )
        .unwrap();
        assert!(r.slope.is_some());
    }

    #[test]
    fn unsorted_grid_rejected() {
        let spec = StateSpec::Diagonal {
            entries: vec![0.6, 0.4],
        };
        let cfg = SweepConfig {
            shots_grid: vec![1000, 100],
            trials: 2,
            base_seed: 1,
            include_degenerate: false,
        };
        assert!(sweep(&spec, &cfg).is_err());
    }

    #[test]
    fn line_fit() {
        let x = [1.0, 2.0, 3.0];
        let f = fit_line(&x, &[1.0, -0.0, -1.0]).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-15 && f.residual < 1e-15);
        assert!(fit_line(&[1.0], &[1.0]).is_none());
    }
}
