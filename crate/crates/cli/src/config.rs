//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::CliError;

/// Settings shared by every command. JSON keys are the field names.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Problem (ODE or Lagrangian) from the registry.
    #[arg(long)]
    pub problem: Option<String>,
    /// Scheme name, e.g. DeltaDifferential or Delta3Integral.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Left end of the time interval.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Right end of the time interval.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Number of steps.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Initial state, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Second node of a variational run, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "v0")]
    pub x1: Option<Vec<f64>>,
    /// Initial velocity of a variational run; sets `x1 = x0 + h v0`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v0: Option<Vec<f64>>,
    /// Newton residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
    /// Step counts of a convergence study, comma separated.
    #[arg(long = "Ns", value_delimiter = ',')]
    #[serde(rename = "Ns")]
    pub ns: Option<Vec<usize>>,
    /// Seed of the self-test's random instances.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `flags` win over those of `self`.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            problem: flags.problem.or(self.problem),
            scheme: flags.scheme.or(self.scheme),
            a: flags.a.or(self.a),
            b: flags.b.or(self.b),
            n: flags.n.or(self.n),
            x0: flags.x0.or(self.x0),
            x1: flags.x1.or(self.x1),
            v0: flags.v0.or(self.v0),
            tol: flags.tol.or(self.tol),
            output: flags.output.or(self.output),
            ns: flags.ns.or(self.ns),
            seed: flags.seed.or(self.seed),
        }
    }

    pub fn problem(&self, default: &str) -> String {
        self.problem.clone().unwrap_or_else(|| default.to_string())
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a.unwrap_or(0.0), self.b.unwrap_or(1.0))
    }

    pub fn steps(&self, default: usize) -> Result<usize, CliError> {
        match self.n.unwrap_or(default) {
            0 => Err(CliError::Config("N must be at least 1".into())),
            n => Ok(n),
        }
    }

    pub fn solver(&self) -> Result<dembed::SolverConfig, CliError> {
        let cfg = dembed::SolverConfig { tol: self.tol.unwrap_or(1e-12), ..Default::default() };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_json() {
        let json: RunConfig = serde_json::from_str(r#"{"problem": "decay", "N": 8, "tol": 1e-10}"#).unwrap();
        let flags = RunConfig { n: Some(16), ..Default::default() };
        let merged = json.overlay(flags);
        assert_eq!(merged.problem.as_deref(), Some("decay"));
        assert_eq!(merged.n, Some(16));
        assert_eq!(merged.tol, Some(1e-10));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"steps": 4}"#).is_err());
    }

    #[test]
    fn zero_steps_and_bad_tolerance_are_config_errors() {
        let cfg = RunConfig { n: Some(0), tol: Some(-1.0), ..Default::default() };
        assert!(matches!(cfg.steps(4), Err(CliError::Config(_))));
        assert!(matches!(cfg.solver(), Err(CliError::Config(_))));
    }
}
