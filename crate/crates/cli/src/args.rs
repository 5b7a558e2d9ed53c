//! Command-line surface and its translation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use spectra_core::simkit::StateSpec;

use crate::config::{load_state_file, parse_ensemble, CommandKind, Format, PathChoice, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "spectra",
    version,
    about = "Density-matrix spectra from a single multi-copy projective measurement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Check the projector and permutation identities for one dimension.
    Verify {
        #[arg(long)]
        dim: usize,
        /// Lift the dense-operator size caps.
        #[arg(long)]
        allow_large: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reconstruct the spectrum of one state, exactly or from sampled counts.
    Analyze(AnalyzeArgs),
    /// RMSE of the reconstructed spectrum against the shot count.
    Sweep(SweepArgs),
    /// Three-outcome qutrit POVM: derived polynomials and Fock cross-check.
    QutritOptics {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rerun the configuration embedded in an earlier report.
    Replay {
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// JSON state file `{ "dim": d, "matrix": [[[re, im], ...], ...] }`.
    #[arg(long, conflicts_with = "ensemble")]
    pub state: Option<PathBuf>,
    /// pure-haar | ginibre-mixed | rank-R | maximally-mixed | diagonal:a,b,...
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Number of eigenvalues known to vanish; measures `d − d0` copies.
    #[arg(long, default_value_t = 0)]
    pub d0: usize,
    /// Measurement shots; 0 uses the exact distribution.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[arg(long, value_enum, default_value_t = PathChoice::Moments)]
    pub path: PathChoice,
    /// Rényi orders to report.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub renyi: Vec<f64>,
    /// Tsallis indices to report.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub tsallis: Vec<f64>,
    #[arg(long)]
    pub allow_large: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Ascending shot counts.
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000,1000000")]
    pub shots: Vec<u64>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Fit the slope even for states with nearly degenerate spectra.
    #[arg(long)]
    pub include_degenerate: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl StateArgs {
    fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        cfg.dim = self.dim;
        cfg.seed = self.seed;
        match (&self.state, &self.ensemble) {
            (Some(path), _) => {
                let file = load_state_file(path)?;
                if let Some(d) = self.dim {
                    if d != file.dim {
                        return Err(CliError::Usage(format!(
                            "--dim {d} disagrees with the state file ({})",
                            file.dim
                        )));
                    }
                }
                cfg.state_source = Some(format!("file:{}", path.display()));
                cfg.state = Some(StateSpec::Explicit { state: file });
            }
            (None, Some(e)) => {
                cfg.state_source = Some(format!("ensemble:{e}"));
                cfg.state = Some(parse_ensemble(e, self.dim, self.seed)?);
            }
            (None, None) => {}
        }
        Ok(())
    }
}

impl OutputArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.format = self.format;
        cfg.out = self.out.as_ref().map(|p| p.display().to_string());
    }
}

/// What `main` should do after parsing.
pub enum Action {
    Run(RunConfig),
    Replay { report: PathBuf, out: Option<PathBuf> },
}

pub fn to_action(command: CliCommand) -> CliResult<Action> {
    let cfg = match command {
        CliCommand::Verify {
            dim,
            allow_large,
            output,
        } => {
            let mut cfg = RunConfig::new(CommandKind::Verify);
            cfg.dim = Some(dim);
            cfg.allow_large = allow_large;
            output.apply(&mut cfg);
            cfg
        }
        CliCommand::Analyze(a) => {
            let mut cfg = RunConfig::new(CommandKind::Analyze);
            a.state.apply(&mut cfg)?;
            cfg.d0 = a.d0;
            cfg.shots = vec![a.shots];
            cfg.path = a.path;
            cfg.renyi = a.renyi;
            cfg.tsallis = a.tsallis;
            cfg.allow_large = a.allow_large;
            a.output.apply(&mut cfg);
            cfg
        }
        CliCommand::Sweep(s) => {
            let mut cfg = RunConfig::new(CommandKind::Sweep);
            s.state.apply(&mut cfg)?;
            cfg.shots = s.shots;
            cfg.trials = s.trials;
            cfg.include_degenerate = s.include_degenerate;
            s.output.apply(&mut cfg);
            cfg
        }
        CliCommand::QutritOptics { state, output } => {
            let mut cfg = RunConfig::new(CommandKind::QutritOptics);
            state.apply(&mut cfg)?;
            output.apply(&mut cfg);
            cfg
        }
        CliCommand::Replay { report, out } => return Ok(Action::Replay { report, out }),
    };
    Ok(Action::Run(cfg))
}
