//! Comparison schemes and parameter sweeps over antenna count or SNR.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::alpha_star_unconstrained;
use crate::error::{Error, Result};
use crate::joint::optimize;
use crate::model::{db_to_linear, energy_efficiency, rate_at, Receiver, SystemConfig};

/// How the training/data split is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `T_tau = K` with the same power in both phases.
    EqualPower,
    /// `T_tau = K` and the optimal energy fraction, ignoring the peak limit.
    Optimized,
    /// Joint optimum of fraction and duration under average and peak limits.
    PowerLimited,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::EqualPower, Scheme::Optimized, Scheme::PowerLimited];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::EqualPower => "equal_power",
            Scheme::Optimized => "optimized",
            Scheme::PowerLimited => "power_limited",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemePoint {
    pub alpha: f64,
    pub t_tau: f64,
    pub t_d: f64,
    pub rate: f64,
    pub energy_efficiency: f64,
}

pub fn evaluate_scheme(scheme: Scheme, cfg: &SystemConfig, rx: Receiver) -> Result<SchemePoint> {
    let t = cfg.t() as f64;
    let t_max = cfg.max_data_len();
    let (alpha, t_d) = match scheme {
        Scheme::EqualPower => (cfg.k() as f64 / t, t_max),
        Scheme::Optimized => (alpha_star_unconstrained(t_max, cfg, rx), t_max),
        Scheme::PowerLimited => {
            let r = optimize(cfg, rx)?;
            (r.alpha_star, r.t_d_star)
        }
    };
    let rate = rate_at(alpha, t_d, cfg, rx);
    Ok(SchemePoint {
        alpha,
        t_tau: t - t_d,
        t_d,
        rate,
        energy_efficiency: energy_efficiency(rate, cfg.rho())?,
    })
}

/// Peak power given either relative to `rho` or as an absolute level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakPower {
    Ratio(f64),
    Db(f64),
}

impl Default for PeakPower {
    fn default() -> Self {
        PeakPower::Ratio(1.2)
    }
}

/// Scenario with powers in dB, as read from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub m: usize,
    pub k: usize,
    pub t: usize,
    pub rho_db: f64,
    pub peak: PeakPower,
}

impl Scenario {
    pub fn to_config(&self) -> Result<SystemConfig> {
        let rho = db_to_linear(self.rho_db);
        let rho_max = match self.peak {
            PeakPower::Ratio(r) => r * rho,
            PeakPower::Db(db) => db_to_linear(db),
        };
        SystemConfig::new(self.m, self.k, self.t, rho, rho_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "M")]
    Antennas,
    #[serde(rename = "rho_db")]
    RhoDb,
    /// Same SNR sweep, read as an efficiency-versus-rate trade-off curve.
    #[serde(rename = "rate_vs_ee")]
    RateVsEe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub schemes: Vec<(Scheme, Receiver)>,
}

impl SweepSpec {
    pub fn new(
        base: Scenario,
        variable: SweepVariable,
        values: Vec<f64>,
        schemes: Vec<(Scheme, Receiver)>,
    ) -> Result<Self> {
        if schemes.is_empty() {
            return Err(Error::NoSchemes);
        }
        if values
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::ValuesNotIncreasing);
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::BadSweepValue(v));
        }
        if variable == SweepVariable::Antennas {
            if let Some(&v) = values.iter().find(|v| v.fract() != 0.0 || **v < 1.0) {
                return Err(Error::BadSweepValue(v));
            }
        }
        Ok(Self {
            base,
            variable,
            values,
            schemes,
        })
    }

    fn scenario_at(&self, value: f64) -> Scenario {
        let mut s = self.base;
        match self.variable {
            SweepVariable::Antennas => s.m = value as usize,
            SweepVariable::RhoDb | SweepVariable::RateVsEe => s.rho_db = value,
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub scheme: Scheme,
    pub receiver: Receiver,
    pub alpha: f64,
    #[serde(rename = "T_tau")]
    pub t_tau: f64,
    #[serde(rename = "T_d")]
    pub t_d: f64,
    pub rate_bits: f64,
    pub energy_efficiency: f64,
}

/// Rows ordered by value, then by the order schemes were listed.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(f64, Scheme, Receiver)> = spec
        .values
        .iter()
        .flat_map(|&v| spec.schemes.iter().map(move |&(s, r)| (v, s, r)))
        .collect();
    jobs.par_iter()
        .map(|&(value, scheme, receiver)| {
            let cfg = spec.scenario_at(value).to_config()?;
            let p = evaluate_scheme(scheme, &cfg, receiver)?;
            Ok(SweepRow {
                value,
                scheme,
                receiver,
                alpha: p.alpha,
                t_tau: p.t_tau,
                t_d: p.t_d,
                rate_bits: p.rate,
                energy_efficiency: p.energy_efficiency,
            })
        })
        .collect()
}
