//! Run configuration: command-line flags and an optional JSON file with the
//! same field names. Flags given on the command line override the file.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use nongauss::qstate::NoiseKind;
use nongauss::statelib::NoisePlacement;
use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Faf,
    Witness,
    BellEstimate,
    SingleEstimate,
    TestBell,
    TestSingle,
    SweepTheta,
    SweepDepol,
    Brickwork,
    Layers,
    EnsembleStats,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Faf => "faf",
            Command::Witness => "witness",
            Command::BellEstimate => "bell-estimate",
            Command::SingleEstimate => "single-estimate",
            Command::TestBell => "test-bell",
            Command::TestSingle => "test-single",
            Command::SweepTheta => "sweep-theta",
            Command::SweepDepol => "sweep-depol",
            Command::Brickwork => "brickwork",
            Command::Layers => "layers",
            Command::EnsembleStats => "ensemble-stats",
        }
    }

    /// Commands whose default output is a table.
    pub fn is_tabular(self) -> bool {
        matches!(self, Command::SweepTheta | Command::SweepDepol | Command::Brickwork | Command::Layers)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Vacuum,
    Basis,
    Plus,
    Ghz,
    Cat,
    Defect,
    Haar,
    SubsetPhase,
    GaussianRandom,
}

impl StateKind {
    pub fn is_random(self) -> bool {
        matches!(self, StateKind::Haar | StateKind::SubsetPhase | StateKind::GaussianRandom)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseArg {
    Depolarizing,
    AmplitudeDamping,
    Dephasing,
    BitFlip,
}

impl From<NoiseArg> for NoiseKind {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::Depolarizing => NoiseKind::Depolarizing,
            NoiseArg::AmplitudeDamping => NoiseKind::AmplitudeDamping,
            NoiseArg::Dephasing => NoiseKind::Dephasing,
            NoiseArg::BitFlip => NoiseKind::BitFlip,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementArg {
    AfterTwoQubitGate,
    AfterLayer,
}

impl From<PlacementArg> for NoisePlacement {
    fn from(p: PlacementArg) -> Self {
        match p {
            PlacementArg::AfterTwoQubitGate => NoisePlacement::AfterTwoQubitGate,
            PlacementArg::AfterLayer => NoisePlacement::AfterLayer,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Every knob that affects a run. Unset fields take per-command defaults,
/// and the resolved values are echoed in the report.
#[derive(Parser, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[command(name = "nongauss", version, about = "Fermionic non-Gaussianity: exact values, estimators, testers and sweeps")]
#[command(allow_negative_numbers = true)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[arg(value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,

    /// JSON file with any of these fields; explicit flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Named state.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateKind>,
    /// Ensemble spec as inline JSON or a file path, e.g. {"kind":"cat","eps":0.5,"n_qubits":4}.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_json: Option<String>,
    /// Circuit spec as inline JSON or a file path; run on |0…0⟩ to make the state.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<String>,
    /// Number of qubits (modes).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// ε² for the cat state √(1−ε²)|0ⁿ⟩ + ε|1ⁿ⟩.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    /// Subset size exponent for subset-phase states.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    /// Basis state index (qubit 0 most significant).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
    /// Global depolarizing strength applied to the prepared state.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depolarize: Option<f64>,

    /// Copies measured in Bell estimates and sweeps
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    /// Single-copy shots per measurement layer
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots_per_layer: Option<usize>,
    /// Trials of the randomized single-pair baseline (0 skips it).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_trials: Option<usize>,
    /// Tester distance parameter ε
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Failure probability δ
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// FAF order.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Master RNG seed; required whenever anything is random
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Comma-separated θ values.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    /// Comma-separated noise strengths.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ps: Option<Vec<f64>>,
    /// Single-qubit noise channel
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseArg>,
    /// Noise strength for brickwork circuits.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Where circuit noise is applied
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<PlacementArg>,
    /// Brickwork depth in layers
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Matchgate strength.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Ensemble draws
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,

    /// Also write the raw Bell record as NDJSON (bell-estimate).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<PathBuf>,
    /// Report path; defaults to $NONGAUSS_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Report format; csv for tabular commands, json otherwise
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// Inline JSON if it starts with '{', otherwise a path to a JSON file.
pub fn load_json_arg<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {what} from {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("malformed {what}"))
}

impl RunConfig {
    /// Overlays explicit flags onto the config file, if one was given.
    pub fn merged(self) -> Result<RunConfig> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
        let file: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("malformed config {}", path.display()))?;
        let mut base = serde_json::to_value(file)?;
        let over = serde_json::to_value(&self)?;
        if let (Some(b), Some(o)) = (base.as_object_mut(), over.as_object()) {
            for (k, v) in o {
                b.insert(k.clone(), v.clone());
            }
        }
        let mut out: RunConfig = serde_json::from_value(base)?;
        out.config = self.config;
        Ok(out)
    }

    pub fn command(&self) -> Result<Command> {
        match self.command {
            Some(c) => Ok(c),
            None => bail!("no command given (on the command line or in the config file)"),
        }
    }

    pub fn require_seed(&self) -> Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None => bail!("--seed is required for {}", self.command.map_or("this command", Command::name)),
        }
    }

    pub fn require_n(&self) -> Result<usize> {
        match self.n {
            Some(n) if n >= 1 => Ok(n),
            Some(_) => bail!("--n must be >= 1"),
            None => bail!("--n is required"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_fields_use_flag_names() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"command":"test-bell","state":"gaussian-random","n":3,"epsilon":0.3,"seed":7,"noise":"amplitude-damping"}"#,
        )
        .unwrap();
        assert_eq!(cfg.command, Some(Command::TestBell));
        assert_eq!(cfg.noise, Some(NoiseArg::AmplitudeDamping));
        assert!(serde_json::from_str::<RunConfig>(r#"{"comand":"faf"}"#).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"command":"faf","state":"cat","n":4,"eps2":0.1}"#).unwrap();
        let cli = RunConfig::try_parse_from(["nongauss", "--config", path.to_str().unwrap(), "--eps2", "0.5"]).unwrap();
        let m = cli.merged().unwrap();
        assert_eq!(m.command, Some(Command::Faf));
        assert_eq!(m.eps2, Some(0.5));
        assert_eq!(m.n, Some(4));
    }

    #[test]
    fn list_flags_split_on_commas() {
        let cli = RunConfig::try_parse_from(["nongauss", "sweep-theta", "--thetas", "0,0.5,1.5", "--ps", "0,0.05"]).unwrap();
        assert_eq!(cli.thetas, Some(vec![0.0, 0.5, 1.5]));
        assert_eq!(cli.ps, Some(vec![0.0, 0.05]));
    }
}
