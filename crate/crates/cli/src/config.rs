//! JSON configuration files accepted by the subcommands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;
use uplink_training::validate::{Suite, ValidateOptions};
use uplink_training::{PeakPower, Receiver, Scenario, Scheme, SweepSpec, SweepVariable, SystemConfig};

/// Validated scenario from the shared keys `M`, `K`, `T`, `rho_db` and one of
/// `rho_max_ratio` / `rho_max_db` (ratio 1.2 when neither is given).
fn scenario(
    m: usize,
    k: usize,
    t: usize,
    rho_db: f64,
    rho_max_ratio: Option<f64>,
    rho_max_db: Option<f64>,
) -> anyhow::Result<Scenario> {
    let peak = match (rho_max_ratio, rho_max_db) {
        (Some(_), Some(_)) => bail!("give either rho_max_ratio or rho_max_db, not both"),
        (Some(r), None) => PeakPower::Ratio(r),
        (None, Some(db)) => PeakPower::Db(db),
        (None, None) => PeakPower::default(),
    };
    if !rho_db.is_finite() {
        bail!("rho_db must be finite (got {rho_db})");
    }
    let s = Scenario { m, k, t, rho_db, peak };
    s.to_config()?;
    Ok(s)
}

/// Single operating point for `optimize`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub rho_db: f64,
    pub rho_max_ratio: Option<f64>,
    pub rho_max_db: Option<f64>,
    pub receiver: Receiver,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

impl PointConfig {
    pub fn system(&self) -> anyhow::Result<SystemConfig> {
        Ok(scenario(self.m, self.k, self.t, self.rho_db, self.rho_max_ratio, self.rho_max_db)?.to_config()?)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeEntry {
    pub scheme: Scheme,
    pub receiver: Receiver,
}

/// Parameter sweep: the base scenario plus the swept variable.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub rho_db: f64,
    pub rho_max_ratio: Option<f64>,
    pub rho_max_db: Option<f64>,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub schemes: Vec<SchemeEntry>,
    pub output_path: Option<PathBuf>,
}

impl SweepConfig {
    pub fn spec(&self) -> anyhow::Result<SweepSpec> {
        let base = scenario(self.m, self.k, self.t, self.rho_db, self.rho_max_ratio, self.rho_max_db)?;
        let schemes = self.schemes.iter().map(|e| (e.scheme, e.receiver)).collect();
        Ok(SweepSpec::new(base, self.variable, self.values.clone(), schemes)?)
    }
}

/// Validation run. The scenario keys, when present, set the Monte Carlo
/// operating point; otherwise the built-in one is used.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    pub suites: Vec<String>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub rho_db: Option<f64>,
    pub rho_max_ratio: Option<f64>,
    pub rho_max_db: Option<f64>,
    pub configs: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

impl ValidateConfig {
    pub fn suites(&self) -> anyhow::Result<Vec<Suite>> {
        if self.suites.is_empty() {
            bail!("suites must name at least one of closed_form_vs_grid, concavity, quasiconcavity, monte_carlo");
        }
        self.suites
            .iter()
            .map(|s| s.parse::<Suite>().map_err(anyhow::Error::msg))
            .collect()
    }

    pub fn options(&self, seed_override: Option<u64>) -> anyhow::Result<ValidateOptions> {
        let mut opts = ValidateOptions::default();
        match (self.m, self.k, self.t, self.rho_db) {
            (Some(m), Some(k), Some(t), Some(rho_db)) => {
                opts.mc_config = scenario(m, k, t, rho_db, self.rho_max_ratio, self.rho_max_db)?.to_config()?;
            }
            (None, None, None, None) if self.rho_max_ratio.is_none() && self.rho_max_db.is_none() => {}
            _ => bail!("the Monte Carlo operating point needs all of M, K, T and rho_db"),
        }
        if let Some(n) = self.configs {
            if n == 0 {
                bail!("configs must be positive");
            }
            opts.configs = n;
        }
        if let Some(n) = self.trials {
            if n < 2 {
                bail!("trials must be at least 2 (got {n})");
            }
            opts.trials = n;
        }
        if let Some(seed) = seed_override.or(self.seed) {
            opts.seed = seed;
        }
        Ok(opts)
    }
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid configuration {}", path.display()))
}
