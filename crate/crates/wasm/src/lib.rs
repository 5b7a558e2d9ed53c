//! Browser bindings. Every export takes a state recipe as JSON, e.g.
//! `{"kind":"ginibre-mixed","dim":3,"seed":7}` or
//! `{"kind":"diagonal","entries":[0.6,0.3,0.1]}`, and returns a JSON string.

use serde::Serialize;
use spectra_core::permkit::DenseLimits;
use spectra_core::physreal::qutrit::{derive_m_prime, fock_simulate_qutrit, qutrit_qpovm};
use spectra_core::projectors::m_polynomials;
use spectra_core::simkit::{
    derive_seed, exact_distribution, generate_state, sample_counts, sweep, OutcomeDistribution, ProbabilityPath,
    StateSpec, SweepConfig,
};
use spectra_core::spectral::{charpoly_from_probs, determine_eigenvalues};
use spectra_core::{Error, Result};
use wasm_bindgen::prelude::*;

/// Largest shot count accepted per measurement; keeps the page responsive.
pub const MAX_SHOTS: u32 = 10_000_000;

fn parse_spec(state: &str) -> Result<StateSpec> {
    serde_json::from_str(state).map_err(|e| Error::Argument(format!("state recipe: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializes")
}

#[derive(Serialize)]
struct Reconstruction {
    oracle: Vec<f64>,
    exact_p: Vec<f64>,
    measured_p: Vec<f64>,
    /// Ascending coefficients of the reconstructed `det(x − ρ)`.
    char_poly: Vec<f64>,
    raw_roots: Vec<[f64; 2]>,
    spectrum: Vec<f64>,
    max_imag: f64,
    projection_distance: f64,
}

pub fn reconstruct_json(state: &str, shots: u32, seed: u32) -> Result<String> {
    if shots > MAX_SHOTS {
        return Err(Error::Argument(format!("at most {MAX_SHOTS} shots")));
    }
    let rho = generate_state(&parse_spec(state)?)?;
    let d = rho.dim();
    let exact = exact_distribution(&rho, d, ProbabilityPath::Moments, &DenseLimits::default())?;
    let measured = if shots == 0 {
        exact.clone()
    } else {
        let counts = sample_counts(&exact, shots as u64, derive_seed(seed as u64, shots as u64, 0));
        OutcomeDistribution::from_counts(&counts)
    };
    let (poly, _) = charpoly_from_probs(measured.probs(), &m_polynomials(d))?;
    let est = determine_eigenvalues(&measured, d)?;
    Ok(to_json(&Reconstruction {
        oracle: rho.eigenvalues(),
        exact_p: exact.probs().to_vec(),
        measured_p: measured.probs().to_vec(),
        char_poly: poly.coeffs().to_vec(),
        raw_roots: est.raw_roots.iter().map(|z| [z.re, z.im]).collect(),
        spectrum: est.eigenvalues,
        max_imag: est.max_imag,
        projection_distance: est.projection_distance,
    }))
}

#[derive(Serialize)]
struct SweepSummary {
    shots: Vec<u64>,
    rmse: Vec<f64>,
    slope: Option<f64>,
    intercept: Option<f64>,
    degenerate: bool,
}

pub fn sweep_json(state: &str, shots: &[u32], trials: u32, seed: u32) -> Result<String> {
    if shots.iter().any(|&n| n > MAX_SHOTS) {
        return Err(Error::Argument(format!("at most {MAX_SHOTS} shots")));
    }
    let cfg = SweepConfig {
        shots_grid: shots.iter().map(|&n| n as u64).collect(),
        trials: trials as usize,
        base_seed: seed as u64,
        include_degenerate: true,
    };
    let r = sweep(&parse_spec(state)?, &cfg)?;
    Ok(to_json(&SweepSummary {
        shots: r.points.iter().map(|p| p.shots).collect(),
        rmse: r.points.iter().map(|p| p.rmse).collect(),
        slope: r.slope.as_ref().map(|f| f.slope),
        intercept: r.slope.as_ref().map(|f| f.intercept),
        degenerate: r.degenerate,
    }))
}

#[derive(Serialize)]
struct QutritOptics {
    m_prime: Vec<String>,
    operator: [f64; 3],
    fock: [f64; 3],
}

pub fn qutrit_json(state: &str) -> Result<String> {
    let rho = generate_state(&parse_spec(state)?)?;
    let povm = qutrit_qpovm();
    let m = derive_m_prime(&povm)?;
    Ok(to_json(&QutritOptics {
        m_prime: m.polys.iter().map(|p| p.to_string()).collect(),
        operator: povm.probabilities(&rho)?,
        fock: fock_simulate_qutrit(&rho)?.as_array(),
    }))
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

/// Spectrum reconstruction from `shots` sampled outcomes (`0` = exact).
#[wasm_bindgen]
pub fn reconstruct(state: &str, shots: u32, seed: u32) -> std::result::Result<String, JsError> {
    js(reconstruct_json(state, shots, seed))
}

/// RMSE against shot count with the fitted log-log slope.
#[wasm_bindgen(js_name = rmseSweep)]
pub fn rmse_sweep(state: &str, shots: Vec<u32>, trials: u32, seed: u32) -> std::result::Result<String, JsError> {
    js(sweep_json(state, &shots, trials, seed))
}

/// Qutrit interferometer events next to `tr(Q_k ρ^{⊗3})`.
#[wasm_bindgen(js_name = qutritOptics)]
pub fn qutrit_optics(state: &str) -> std::result::Result<String, JsError> {
    js(qutrit_json(state))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn exact_reconstruction() {
        let r = value(&reconstruct_json(r#"{"kind":"diagonal","entries":[0.6,0.3,0.1]}"#, 0, 0).unwrap());
        let spectrum: Vec<f64> = serde_json::from_value(r["spectrum"].clone()).unwrap();
        for (a, b) in spectrum.iter().zip([0.6, 0.3, 0.1]) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(r["char_poly"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn sampled_is_seeded() {
        let s = r#"{"kind":"ginibre-mixed","dim":3,"seed":7}"#;
        assert_eq!(
            reconstruct_json(s, 5000, 1).unwrap(),
            reconstruct_json(s, 5000, 1).unwrap()
        );
        assert_ne!(
            reconstruct_json(s, 5000, 1).unwrap(),
            reconstruct_json(s, 5000, 2).unwrap()
        );
    }

    #[test]
    fn sweep_slope_negative() {
        let r = value(
            &sweep_json(
                r#"{"kind":"diagonal","entries":[0.6,0.3,0.1]}"#,
                &[1000, 10000, 100000],
                20,
                3,
            )
            .unwrap(),
        );
        assert!(r["slope"].as_f64().unwrap() < -0.3);
    }

    #[test]
    fn qutrit_defaults() {
        let r = value(
            &qutrit_json(r#"{"kind":"diagonal","entries":[0.3333333333333333,0.3333333333333333,0.3333333333333334]}"#)
                .unwrap(),
        );
        assert_eq!(r["m_prime"][1], "x^3 - x^2 + x - 1");
        assert!((r["fock"][1].as_f64().unwrap() - 13.0 / 81.0).abs() < 1e-12);
    }

    #[test]
    fn bad_recipe_is_an_error() {
        assert!(reconstruct_json(r#"{"kind":"wishart"}"#, 0, 0).is_err());
        assert!(reconstruct_json(r#"{"kind":"diagonal","entries":[0.5,0.5]}"#, MAX_SHOTS + 1, 0).is_err());
    }
}
