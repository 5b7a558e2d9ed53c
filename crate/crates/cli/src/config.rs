//! The serializable run configuration echoed into every report.

use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use spectra_core::permkit::DenseLimits;
use spectra_core::simkit::StateSpec;
use spectra_core::StateFile;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Verify,
    Analyze,
    Sweep,
    QutritOptics,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PathChoice {
    Dense,
    #[default]
    Moments,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    /// As given on the command line: `file:<path>` or `ensemble:<spec>`.
    pub state_source: Option<String>,
    /// Resolved state recipe. File inputs are stored inline so the config
    /// reruns without the original file.
    pub state: Option<StateSpec>,
    pub dim: Option<usize>,
    pub d0: usize,
    /// One entry for `analyze` (`0` = exact), the shot grid for `sweep`.
    pub shots: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
    pub path: PathChoice,
    pub renyi: Vec<f64>,
    pub tsallis: Vec<f64>,
    pub include_degenerate: bool,
    pub allow_large: bool,
    pub format: Format,
    pub out: Option<String>,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            state_source: None,
            state: None,
            dim: None,
            d0: 0,
            shots: Vec::new(),
            trials: 0,
            seed: 0,
            path: PathChoice::default(),
            renyi: Vec::new(),
            tsallis: Vec::new(),
            include_degenerate: false,
            allow_large: false,
            format: Format::default(),
            out: None,
        }
    }

    pub fn limits(&self) -> DenseLimits {
        if self.allow_large {
            DenseLimits::unbounded()
        } else {
            DenseLimits::default()
        }
    }

    pub fn state_spec(&self) -> CliResult<&StateSpec> {
        self.state
            .as_ref()
            .ok_or_else(|| CliError::Usage("a state is required: pass --state FILE or --ensemble SPEC".into()))
    }
}

/// Reads and validates a JSON state file.
pub fn load_state_file(path: &Path) -> CliResult<StateFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file = StateFile::from_json(&text)?;
    file.to_density()?;
    Ok(file)
}

/// Parses `pure-haar`, `ginibre-mixed`, `rank-R`, `maximally-mixed` or
/// `diagonal:a,b,...`.
pub fn parse_ensemble(spec: &str, dim: Option<usize>, seed: u64) -> CliResult<StateSpec> {
    let need_dim = || dim.ok_or_else(|| CliError::Usage(format!("ensemble `{spec}` needs --dim")));
    if let Some(list) = spec.strip_prefix("diagonal:") {
        let entries = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad diagonal entry `{s}`")))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        if let Some(d) = dim {
            if d != entries.len() {
                return Err(CliError::Usage(format!(
                    "--dim {d} disagrees with {} diagonal entries",
                    entries.len()
                )));
            }
        }
        return Ok(StateSpec::Diagonal { entries });
    }
    match spec {
        "pure-haar" => Ok(StateSpec::PureHaar { dim: need_dim()?, seed }),
        "ginibre-mixed" => Ok(StateSpec::GinibreMixed { dim: need_dim()?, seed }),
        "maximally-mixed" => {
            let d = need_dim()?;
            Ok(StateSpec::Diagonal {
                entries: vec![1.0 / d as f64; d],
            })
        }
        _ => {
            let rank = spec
                .strip_prefix("rank-")
                .and_then(|r| r.parse::<usize>().ok())
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "unknown ensemble `{spec}` (expected pure-haar, ginibre-mixed, rank-R, maximally-mixed or diagonal:a,b,...)"
                    ))
                })?;
            Ok(StateSpec::RankR {
                dim: need_dim()?,
                rank,
                seed,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensembles_parse() {
        assert_eq!(
            parse_ensemble("rank-2", Some(4), 9).unwrap(),
            StateSpec::RankR {
                dim: 4,
                rank: 2,
                seed: 9
            }
        );
        assert_eq!(
            parse_ensemble("diagonal:0.7, 0.2,0.1", None, 0).unwrap(),
            StateSpec::Diagonal {
                entries: vec![0.7, 0.2, 0.1]
            }
        );
        assert!(matches!(parse_ensemble("pure-haar", None, 0), Err(CliError::Usage(_))));
        assert!(matches!(
            parse_ensemble("diagonal:0.5,x", None, 0),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse_ensemble("diagonal:0.5,0.5", Some(3), 0),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(parse_ensemble("wishart", Some(3), 0), Err(CliError::Usage(_))));
    }

    #[test]
    fn config_round_trips() {
        let mut cfg = RunConfig::new(CommandKind::Sweep);
        cfg.state = Some(StateSpec::GinibreMixed { dim: 3, seed: 1 });
        cfg.shots = vec![100, 1000];
        cfg.renyi = vec![2.0];
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
        assert!(text.contains("\"command\":\"sweep\""));
    }
}
