//! Report builders for each subcommand.

use serde::{Deserialize, Serialize};
use spectra_core::physreal::qutrit::{derive_m_prime, fock_simulate_qutrit, qutrit_qpovm, PovmResiduals};
use spectra_core::simkit::{
    derive_seed, exact_distribution, generate_state, sample_counts, sweep, OutcomeDistribution, ProbabilityPath,
    SweepConfig, SweepResult, EXACT_SHOTS,
};
use spectra_core::spectral::{determine_eigenvalues, entropies, partial_eigenvalues, EntropyReport};
use spectra_core::verify::{identity_suite, IdentityReport};
use spectra_core::{StateFile, VERSION};

use crate::config::{CommandKind, Format, PathChoice, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, to_json, CsvTable, LongTable};

/// Tolerance for every check in the qutrit optics report.
pub const QUTRIT_CHECK_TOLERANCE: f64 = 1e-9;

/// Sample points for the characteristic-polynomial identity.
pub const CHARPOLY_SAMPLE_POINTS: [f64; 5] = [-1.0, 0.0, 0.25, 0.5, 2.0];

/// A finished report and whether its checks passed.
pub struct Rendered {
    pub text: String,
    pub passed: bool,
}

pub fn run(cfg: &RunConfig) -> CliResult<Rendered> {
    match cfg.command {
        CommandKind::Verify => verify(cfg),
        CommandKind::Analyze => analyze(cfg),
        CommandKind::Sweep => run_sweep(cfg),
        CommandKind::QutritOptics => qutrit_optics(cfg),
    }
}

fn config_json(cfg: &RunConfig) -> String {
    serde_json::to_string(cfg).expect("config serializes")
}

fn header(t: &mut LongTable, cfg: &RunConfig) {
    t.text("meta", "version", VERSION);
    t.text("meta", "config", config_json(cfg));
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub config: RunConfig,
    pub identities: IdentityReport,
}

pub fn verify(cfg: &RunConfig) -> CliResult<Rendered> {
    let dim = cfg.dim.ok_or_else(|| CliError::Usage("verify needs --dim".into()))?;
    let identities = identity_suite(dim, &cfg.limits())?;
    let passed = identities.passed;
    let text = match cfg.format {
        Format::Json => to_json(&VerifyReport {
            version: VERSION.into(),
            config: cfg.clone(),
            identities,
        }),
        Format::Csv => {
            let mut t = LongTable::new();
            header(&mut t, cfg);
            for c in &identities.checks {
                t.scalar("check.max_residual", &c.name, c.max_residual);
                t.scalar("check.tolerance", &c.name, c.tolerance);
                t.text("check.pass", &c.name, c.pass.to_string());
            }
            let as_f = |v: &[usize]| v.iter().map(|&r| r as f64).collect::<Vec<_>>();
            t.vector("ranks", "observed", &as_f(&identities.ranks));
            t.vector("ranks", "expected", &as_f(&identities.expected_ranks));
            t.text("summary", "passed", passed.to_string());
            t.render()
        }
    };
    Ok(Rendered { text, passed })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExactProbabilities {
    pub dense: Option<Vec<f64>>,
    pub moments: Option<Vec<f64>>,
    /// Largest `|p_dense − p_moments|` when both paths ran.
    pub path_agreement: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Measurement {
    /// `0` means the exact distribution was used.
    pub shots: u64,
    pub sample_seed: Option<u64>,
    pub counts: Option<Vec<u64>>,
    pub p: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Diagnostics {
    pub physicalized: bool,
    pub max_imag: f64,
    pub projection_distance: f64,
    pub normalization_deficit: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OracleComparison {
    pub spectrum: Vec<f64>,
    /// Reconstructed minus true eigenvalue, both sorted descending.
    pub errors: Vec<f64>,
    pub max_abs_error: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub version: String,
    pub config: RunConfig,
    pub state: StateFile,
    pub copies: usize,
    pub exact_p: ExactProbabilities,
    pub measurement: Measurement,
    /// `[re, im]` pairs.
    pub raw_roots: Vec<[f64; 2]>,
    pub spectrum: Vec<f64>,
    pub diagnostics: Diagnostics,
    pub entropies: EntropyReport,
    pub oracle: OracleComparison,
}

pub fn analyze_report(cfg: &RunConfig) -> CliResult<AnalyzeReport> {
    let rho = generate_state(cfg.state_spec()?)?;
    let d = rho.dim();
    if cfg.d0 >= d {
        return Err(CliError::Usage(format!(
            "--d0 {} must be smaller than the dimension {d}",
            cfg.d0
        )));
    }
    let copies = d - cfg.d0;
    let limits = cfg.limits();
    let run_path = |path| exact_distribution(&rho, copies, path, &limits);
    let dense = match cfg.path {
        PathChoice::Dense | PathChoice::Both => Some(run_path(ProbabilityPath::Dense)?),
        PathChoice::Moments => None,
    };
    let moments = match cfg.path {
        PathChoice::Moments | PathChoice::Both => Some(run_path(ProbabilityPath::Moments)?),
        PathChoice::Dense => None,
    };
    let path_agreement = match (&dense, &moments) {
        (Some(a), Some(b)) => Some(
            a.probs()
                .iter()
                .zip(b.probs())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    let exact = dense
        .clone()
        .or_else(|| moments.clone())
        .expect("at least one path ran");

    let shots = match cfg.shots.as_slice() {
        [] => EXACT_SHOTS,
        [n] => *n,
        _ => return Err(CliError::Usage("analyze takes a single --shots value".into())),
    };
    let (measured, counts, sample_seed) = if shots == EXACT_SHOTS {
        (exact, None, None)
    } else {
        let seed = derive_seed(cfg.seed, shots, 0);
        let counts = sample_counts(&exact, shots, seed);
        (OutcomeDistribution::from_counts(&counts), Some(counts), Some(seed))
    };

    let est = if cfg.d0 == 0 {
        determine_eigenvalues(&measured, d)?
    } else {
        partial_eigenvalues(&measured, d, cfg.d0)?
    };
    let oracle = rho.eigenvalues();
    let errors: Vec<f64> = est.eigenvalues.iter().zip(&oracle).map(|(e, o)| e - o).collect();
    let max_abs_error = errors.iter().map(|e| e.abs()).fold(0.0, f64::max);

    Ok(AnalyzeReport {
        version: VERSION.into(),
        config: cfg.clone(),
        state: StateFile::from_density(&rho),
        copies,
        exact_p: ExactProbabilities {
            dense: dense.map(|p| p.probs().to_vec()),
            moments: moments.map(|p| p.probs().to_vec()),
            path_agreement,
        },
        measurement: Measurement {
            shots,
            sample_seed,
            counts,
            p: measured.probs().to_vec(),
        },
        raw_roots: est.raw_roots.iter().map(|z| [z.re, z.im]).collect(),
        entropies: entropies(&est.eigenvalues, &cfg.renyi, &cfg.tsallis),
        diagnostics: Diagnostics {
            physicalized: est.physicalized,
            max_imag: est.max_imag,
            projection_distance: est.projection_distance,
            normalization_deficit: est.normalization_deficit,
        },
        spectrum: est.eigenvalues,
        oracle: OracleComparison {
            spectrum: oracle,
            errors,
            max_abs_error,
        },
    })
}

fn analyze(cfg: &RunConfig) -> CliResult<Rendered> {
    let r = analyze_report(cfg)?;
    let text = match cfg.format {
        Format::Json => to_json(&r),
        Format::Csv => {
            let mut t = LongTable::new();
            header(&mut t, cfg);
            t.text(
                "state",
                "json",
                serde_json::to_string(&r.state).expect("state serializes"),
            );
            t.text("input", "copies", r.copies.to_string());
            if let Some(p) = &r.exact_p.dense {
                t.vector("exact_p", "dense", p);
            }
            if let Some(p) = &r.exact_p.moments {
                t.vector("exact_p", "moments", p);
            }
            if let Some(a) = r.exact_p.path_agreement {
                t.scalar("exact_p", "path_agreement", a);
            }
            t.text("measurement", "shots", r.measurement.shots.to_string());
            if let Some(seed) = r.measurement.sample_seed {
                t.text("measurement", "sample_seed", seed.to_string());
            }
            t.vector("measurement", "p", &r.measurement.p);
            let re: Vec<f64> = r.raw_roots.iter().map(|z| z[0]).collect();
            let im: Vec<f64> = r.raw_roots.iter().map(|z| z[1]).collect();
            t.vector("raw_roots", "re", &re);
            t.vector("raw_roots", "im", &im);
            t.vector("spectrum", "eigenvalue", &r.spectrum);
            t.text("diagnostics", "physicalized", r.diagnostics.physicalized.to_string());
            t.scalar("diagnostics", "max_imag", r.diagnostics.max_imag);
            t.scalar("diagnostics", "projection_distance", r.diagnostics.projection_distance);
            t.scalar(
                "diagnostics",
                "normalization_deficit",
                r.diagnostics.normalization_deficit,
            );
            t.scalar("entropy", "von_neumann", r.entropies.von_neumann);
            for (a, s) in &r.entropies.renyi {
                t.scalar("entropy", &format!("renyi_{a}"), *s);
            }
            for (q, s) in &r.entropies.tsallis {
                t.scalar("entropy", &format!("tsallis_{q}"), *s);
            }
            t.vector("oracle", "eigenvalue", &r.oracle.spectrum);
            t.vector("oracle", "error", &r.oracle.errors);
            t.scalar("oracle", "max_abs_error", r.oracle.max_abs_error);
            t.render()
        }
    };
    Ok(Rendered { text, passed: true })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub version: String,
    pub config: RunConfig,
    pub state: StateFile,
    pub result: SweepResult,
}

pub fn sweep_report(cfg: &RunConfig) -> CliResult<SweepReport> {
    let spec = cfg.state_spec()?;
    if cfg.shots.is_empty() {
        return Err(CliError::Usage("sweep needs --shots N1,N2,...".into()));
    }
    let sweep_cfg = SweepConfig {
        shots_grid: cfg.shots.clone(),
        trials: cfg.trials,
        base_seed: cfg.seed,
        include_degenerate: cfg.include_degenerate,
    };
    let result = sweep(spec, &sweep_cfg)?;
    Ok(SweepReport {
        version: VERSION.into(),
        config: cfg.clone(),
        state: StateFile::from_density(&generate_state(spec)?),
        result,
    })
}

fn run_sweep(cfg: &RunConfig) -> CliResult<Rendered> {
    let r = sweep_report(cfg)?;
    let text = match cfg.format {
        Format::Json => to_json(&r),
        Format::Csv => {
            let mut t = CsvTable::new(&["record", "N", "trial", "lambda_index", "estimate", "error"]);
            t.row(["version", "", "", "", VERSION]);
            t.row([
                "config".to_string(),
                String::new(),
                String::new(),
                String::new(),
                config_json(cfg),
            ]);
            for (i, l) in r.result.oracle.iter().enumerate() {
                t.row([
                    "oracle".to_string(),
                    String::new(),
                    String::new(),
                    (i + 1).to_string(),
                    fmt_f64(*l),
                ]);
            }
            t.row([
                "degenerate",
                "",
                "",
                "",
                if r.result.degenerate { "true" } else { "false" },
            ]);
            for p in &r.result.points {
                for tr in &p.trials {
                    for (i, (e, err)) in tr.estimate.iter().zip(&tr.errors).enumerate() {
                        t.row([
                            "trial".to_string(),
                            p.shots.to_string(),
                            tr.trial.to_string(),
                            (i + 1).to_string(),
                            fmt_f64(*e),
                            fmt_f64(*err),
                        ]);
                    }
                }
            }
            for p in &r.result.points {
                t.row([
                    "rmse".to_string(),
                    p.shots.to_string(),
                    String::new(),
                    String::new(),
                    fmt_f64(p.rmse),
                ]);
            }
            match &r.result.slope {
                Some(fit) => t.row([
                    "slope".to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    fmt_f64(fit.slope),
                    fmt_f64(fit.residual),
                ]),
                None => t.row(["slope", "", "", "", "undefined"]),
            }
            t.render()
        }
    };
    Ok(Rendered { text, passed: true })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MPrimeEntry {
    pub k: usize,
    pub polynomial: String,
    /// `[numerator, denominator]` of the coefficient of `x^j`, ascending.
    pub coefficients: Vec<[i64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value.abs() <= tolerance,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QutritReport {
    pub version: String,
    pub config: RunConfig,
    pub state: StateFile,
    pub m_prime: Vec<MPrimeEntry>,
    pub expansion_residual: f64,
    pub povm: PovmResiduals,
    /// `tr(Q_k ρ^{⊗3})`, `k = 1, 2, 3`.
    pub operator_probabilities: [f64; 3],
    /// Fock simulation: bunching, anti-bunching, other.
    pub fock_probabilities: [f64; 3],
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn qutrit_report(cfg: &RunConfig) -> CliResult<QutritReport> {
    let rho = match &cfg.state {
        Some(spec) => generate_state(spec)?,
        None => spectra_core::DensityMatrix::maximally_mixed(3),
    };
    if rho.dim() != 3 {
        return Err(CliError::Usage(format!(
            "qutrit-optics needs a qutrit state, got dimension {}",
            rho.dim()
        )));
    }
    let povm = qutrit_qpovm();
    let m = derive_m_prime(&povm)?;
    let q = povm.probabilities(&rho)?;
    let fock = fock_simulate_qutrit(&rho)?.as_array();
    let oracle = rho.eigenvalues();
    let charpoly_residual = CHARPOLY_SAMPLE_POINTS
        .iter()
        .map(|&x| {
            let det: f64 = oracle.iter().map(|l| x - l).product();
            (det - m.charpoly_value(x, &q)).abs()
        })
        .fold(0.0, f64::max);
    let agreement = q.iter().zip(&fock).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let residuals = povm.residuals();
    let tol = QUTRIT_CHECK_TOLERANCE;
    let checks = vec![
        Check::new("m' expansion residual", m.expansion_residual, tol),
        Check::new("Q_k Hermiticity", residuals.hermiticity, tol),
        Check::new("sum_k Q_k - 1", residuals.completeness, tol),
        Check::new("Q_k negativity", (-residuals.min_eigenvalue).max(0.0), tol),
        Check::new("charpoly identity", charpoly_residual, tol),
        Check::new("Fock vs operator", agreement, tol),
    ];
    let passed = checks.iter().all(|c| c.pass);
    Ok(QutritReport {
        version: VERSION.into(),
        config: cfg.clone(),
        state: StateFile::from_density(&rho),
        m_prime: m
            .polys
            .iter()
            .enumerate()
            .map(|(i, p)| MPrimeEntry {
                k: i + 1,
                polynomial: p.to_string(),
                coefficients: p.coeffs().iter().map(|r| [*r.numer(), *r.denom()]).collect(),
            })
            .collect(),
        expansion_residual: m.expansion_residual,
        povm: residuals,
        operator_probabilities: q,
        fock_probabilities: fock,
        checks,
        passed,
    })
}

fn qutrit_optics(cfg: &RunConfig) -> CliResult<Rendered> {
    let r = qutrit_report(cfg)?;
    let passed = r.passed;
    let text = match cfg.format {
        Format::Json => to_json(&r),
        Format::Csv => {
            let mut t = LongTable::new();
            header(&mut t, cfg);
            t.text(
                "state",
                "json",
                serde_json::to_string(&r.state).expect("state serializes"),
            );
            for e in &r.m_prime {
                t.text("m_prime", &format!("m'_{}", e.k), e.polynomial.clone());
            }
            t.vector("probabilities", "operator", &r.operator_probabilities);
            t.vector("probabilities", "fock", &r.fock_probabilities);
            for c in &r.checks {
                t.scalar("check.value", &c.name, c.value);
                t.text("check.pass", &c.name, c.pass.to_string());
            }
            t.text("summary", "passed", passed.to_string());
            t.render()
        }
    };
    Ok(Rendered { text, passed })
}

/// Extracts the embedded [`RunConfig`] from a JSON or CSV report.
pub fn config_from_report(text: &str) -> CliResult<RunConfig> {
    if let Ok(value) = serde_json::from_str::<serde_json::Value>(text) {
        let cfg = value
            .get("config")
            .ok_or_else(|| CliError::Report("JSON report has no `config` field".into()))?;
        return serde_json::from_value(cfg.clone()).map_err(|e| CliError::Report(format!("field `config`: {e}")));
    }
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Report(e.to_string()))?;
        let is_config = match record.get(0) {
            Some("config") => true,
            Some("meta") => record.get(1) == Some("config"),
            _ => false,
        };
        if is_config {
            let json = record
                .iter()
                .rev()
                .find(|f| !f.is_empty())
                .ok_or_else(|| CliError::Report("empty config row".into()))?;
            return serde_json::from_str(json).map_err(|e| CliError::Report(format!("config row: {e}")));
        }
    }
    Err(CliError::Report("no config row found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectra_core::simkit::StateSpec;

    fn analyze_cfg(entries: Vec<f64>) -> RunConfig {
        let mut cfg = RunConfig::new(CommandKind::Analyze);
        cfg.state = Some(StateSpec::Diagonal { entries });
        cfg
    }

    #[test]
    fn maximally_mixed_qubit_exact() {
        let r = analyze_report(&analyze_cfg(vec![0.5, 0.5])).unwrap();
        assert!(r.spectrum.iter().all(|l| (l - 0.5).abs() < 1e-12), "{:?}", r.spectrum);
        assert_eq!(r.measurement.counts, None);
    }

    #[test]
    fn both_paths_agree() {
        let mut cfg = analyze_cfg(vec![0.6, 0.3, 0.1]);
        cfg.path = PathChoice::Both;
        let r = analyze_report(&cfg).unwrap();
        assert!(r.exact_p.path_agreement.unwrap() < 1e-12);
    }

    #[test]
    fn d0_too_large_is_usage() {
        let mut cfg = analyze_cfg(vec![0.5, 0.5]);
        cfg.d0 = 2;
        assert!(matches!(analyze_report(&cfg), Err(CliError::Usage(_))));
    }

    #[test]
    fn config_recovered_from_csv() {
        let mut cfg = analyze_cfg(vec![0.7, 0.3]);
        cfg.format = Format::Csv;
        let text = run(&cfg).unwrap().text;
        assert_eq!(config_from_report(&text).unwrap(), cfg);
    }
}
