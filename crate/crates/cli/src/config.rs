//! Run configuration, loaded from a JSON document.

use std::path::{Path, PathBuf};

use dirac_sea::synth::{random_hermitian, SynthOptions};
use dirac_sea::{BoxConfig, Branch, Mode, PotentialSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "box")]
    pub box_config: BoxConfig,
    pub potential: PotentialSource,
    #[serde(default)]
    pub cutoffs: Cutoffs,
    #[serde(default)]
    pub shift: ShiftRange,
    #[serde(default)]
    pub oracle: OracleParams,
    /// Simpson sub-intervals for numeric f-tables; chosen from the table's
    /// frequency content when absent.
    #[serde(default)]
    pub quadrature_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSource {
    /// `4 cos(k_w z) sin(mt)/t`. Amplitudes use the infinite-time limit;
    /// the oracle integrates over `[−t, t]` (default `400/m`).
    Sinc {
        w: i64,
        #[serde(default)]
        t: Option<f64>,
    },
    Spec(PotentialSpec),
    SpecPath(PathBuf),
    Random {
        seed: u64,
        #[serde(default)]
        options: SynthOptions,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cutoffs {
    /// Vacuum cutoffs `N`, one output row each.
    #[serde(default = "default_n")]
    pub n: Vec<i64>,
    /// f-table window `S`; defaults to the smallest window the command needs.
    #[serde(default)]
    pub s: Option<i64>,
    /// Oracle mode cutoff `M`; defaults to `|r| + 4·reach`.
    #[serde(default)]
    pub m: Option<i64>,
}

fn default_n() -> Vec<i64> {
    vec![10, 50, 100, 200]
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self {
            n: default_n(),
            s: None,
            m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftRange {
    pub branch: Branch,
    pub r_min: i64,
    /// Inclusive; `r_max < r_min` selects no modes.
    pub r_max: i64,
}

impl Default for ShiftRange {
    fn default() -> Self {
        Self {
            branch: Branch::Negative,
            r_min: -10,
            r_max: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleParams {
    pub q: Vec<f64>,
    pub steps: usize,
    pub modes: Vec<Mode>,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            q: vec![1e-2, 2e-3, 1e-3],
            steps: 4000,
            modes: vec![Mode::negative(0)],
        }
    }
}

/// The potential a run operates on, resolved from its [`PotentialSource`].
#[derive(Debug, Clone)]
pub struct ResolvedPotential {
    /// Finite-window potential for the oracle and numeric tables.
    pub spec: PotentialSpec,
    /// Harmonic of the sinc burst; its f-tables use the infinite-time amplitudes.
    pub sinc: Option<i64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        if self.cutoffs.n.iter().any(|&n| n < 0) {
            return Err(CliError::Config("cutoffs.n entries must be >= 0".into()));
        }
        if let Some(s) = self.cutoffs.s {
            if s < 1 {
                return Err(CliError::Config(format!("cutoffs.s must be >= 1, got {s}")));
            }
        }
        if let Some(m) = self.cutoffs.m {
            if m < 0 {
                return Err(CliError::Config(format!("cutoffs.m must be >= 0, got {m}")));
            }
        }
        if self.oracle.q.iter().any(|&q| !(q.is_finite() && q > 0.0)) {
            return Err(CliError::Config("oracle.q entries must be positive".into()));
        }
        if self.oracle.steps < 10 {
            return Err(CliError::Config(format!("oracle.steps must be >= 10, got {}", self.oracle.steps)));
        }
        if matches!(self.quadrature_steps, Some(n) if n < 2) {
            return Err(CliError::Config("quadrature_steps must be >= 2".into()));
        }
        if let PotentialSource::Sinc { w, t } = self.potential {
            if w < 1 {
                return Err(CliError::Config(format!("sinc harmonic w must be >= 1, got {w}")));
            }
            if matches!(t, Some(t) if !(t.is_finite() && t > 0.0)) {
                return Err(CliError::Config("sinc half-width t must be positive".into()));
            }
            self.box_config.require_subluminal_harmonic(w)?;
        }
        Ok(())
    }

    /// Relative paths in `spec_path` are taken from `base`, the directory of
    /// the config file.
    pub fn resolve_potential(&self, base: &Path) -> CliResult<ResolvedPotential> {
        Ok(match &self.potential {
            PotentialSource::Sinc { w, t } => ResolvedPotential {
                spec: PotentialSpec::sinc_burst(*w, t.unwrap_or(400.0 / self.box_config.mass()))?,
                sinc: Some(*w),
            },
            PotentialSource::Spec(spec) => ResolvedPotential {
                spec: spec.clone(),
                sinc: None,
            },
            PotentialSource::SpecPath(p) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                ResolvedPotential {
                    spec: PotentialSpec::from_json(&text)?,
                    sinc: None,
                }
            }
            PotentialSource::Random { seed, options } => ResolvedPotential {
                spec: random_hermitian(&mut ChaCha8Rng::seed_from_u64(*seed), options),
                sinc: None,
            },
        })
    }
}
