//! Scenario data model and the closed-form SINR / sum-rate expressions.
//!
//! All powers are linear. A block of `T` symbols is split into `T_tau`
//! pilot symbols and `T_d = T - T_tau` data symbols; `alpha` is the share of
//! the block energy `rho * T` spent on pilots, so the training energy per
//! user is `alpha * rho * T` and the data power is `(1 - alpha) * rho * T / T_d`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear receiver applied at the base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Receiver {
    #[serde(rename = "MRC", alias = "mrc")]
    Mrc,
    #[serde(rename = "ZF", alias = "zf")]
    Zf,
}

impl Receiver {
    pub const ALL: [Receiver; 2] = [Receiver::Mrc, Receiver::Zf];

    pub fn as_str(self) -> &'static str {
        match self {
            Receiver::Mrc => "MRC",
            Receiver::Zf => "ZF",
        }
    }
}

impl fmt::Display for Receiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Receiver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "MRC" => Ok(Receiver::Mrc),
            "ZF" => Ok(Receiver::Zf),
            other => Err(format!("unknown receiver `{other}` (expected MRC or ZF)")),
        }
    }
}

/// Physical scenario: `M` antennas, `K` single-antenna users, coherence
/// block of `T` symbols, average power `rho` and peak power `rho_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemConfig {
    m: usize,
    k: usize,
    t: usize,
    rho: f64,
    rho_max: f64,
}

impl SystemConfig {
    pub fn new(m: usize, k: usize, t: usize, rho: f64, rho_max: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::NoUsers);
        }
        if m <= k {
            return Err(Error::TooFewAntennas { m, k });
        }
        if t <= k {
            return Err(Error::BlockTooShort { t, k });
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::NonPositivePower {
                name: "rho",
                value: rho,
            });
        }
        if !(rho_max.is_finite() && rho_max > 0.0) {
            return Err(Error::NonPositivePower {
                name: "rho_max",
                value: rho_max,
            });
        }
        if rho_max < rho {
            return Err(Error::PeakBelowAverage { rho, rho_max });
        }
        Ok(Self { m, k, t, rho, rho_max })
    }

    /// Same scenario with `rho_max = ratio * rho`.
    pub fn with_peak_ratio(m: usize, k: usize, t: usize, rho: f64, ratio: f64) -> Result<Self> {
        Self::new(m, k, t, rho, ratio * rho)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Block energy `rho * T`.
    pub fn block_energy(&self) -> f64 {
        self.rho * self.t as f64
    }

    /// Longest admissible data phase, `T - K`.
    pub fn max_data_len(&self) -> f64 {
        (self.t - self.k) as f64
    }

    /// True when `(alpha, t_d)` satisfies the box, duration and both peak
    /// constraints up to the absolute slack `tol`.
    pub fn is_feasible(&self, alpha: f64, t_d: f64, tol: f64) -> bool {
        let t = self.t as f64;
        let e = self.block_energy();
        (-tol..=1.0 + tol).contains(&alpha)
            && t_d > 0.0
            && t_d <= self.max_data_len() + tol
            // pilot peak: rho_tau <= rho_max
            && e * alpha + self.rho_max * t_d <= self.rho_max * t + tol * self.rho_max * t
            // data peak: rho_d <= rho_max
            && -e * alpha - self.rho_max * t_d <= -e + tol * self.rho_max * t
    }
}

/// An operating point `(alpha, T_d)` together with the powers it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSplit {
    alpha: f64,
    t_d: f64,
    t_tau: f64,
    rho_tau: f64,
    rho_d: f64,
}

impl PowerSplit {
    pub fn new(alpha: f64, t_d: f64, cfg: &SystemConfig) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        let max = cfg.max_data_len();
        if !(t_d > 0.0 && t_d <= max) {
            return Err(Error::DataDurationOutOfRange { t_d, max });
        }
        let e = cfg.block_energy();
        let t_tau = cfg.t() as f64 - t_d;
        Ok(Self {
            alpha,
            t_d,
            t_tau,
            rho_tau: alpha * e / t_tau,
            rho_d: (1.0 - alpha) * e / t_d,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t_d(&self) -> f64 {
        self.t_d
    }

    pub fn t_tau(&self) -> f64 {
        self.t_tau
    }

    pub fn rho_tau(&self) -> f64 {
        self.rho_tau
    }

    pub fn rho_d(&self) -> f64 {
        self.rho_d
    }

    /// Per-user pilot energy `T_tau * rho_tau`.
    pub fn training_energy(&self) -> f64 {
        self.t_tau * self.rho_tau
    }
}

/// Coefficients of the SINR rewritten as a rational function of `alpha`
/// for a fixed data duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrCoefficients {
    /// MRC: `1 + (T_d - K) / (rho T (K - 1))`.
    pub a1: f64,
    /// MRC: `(rho T K + T_d) / (rho^2 T^2 (K - 1))`, always positive.
    pub b1: f64,
    /// ZF: `(K rho T + T_d) / (rho T (T_d - K))`; infinite at `T_d = K`.
    pub gamma: f64,
}

impl SinrCoefficients {
    /// Fails for `K = 1`, where the MRC rewrite divides by zero.
    pub fn new(t_d: f64, cfg: &SystemConfig) -> Result<Self> {
        if cfg.k() < 2 {
            return Err(Error::SingleUserRewrite);
        }
        let k = cfg.k() as f64;
        let e = cfg.block_energy();
        Ok(Self {
            a1: 1.0 + (t_d - k) / (e * (k - 1.0)),
            b1: (e * k + t_d) / (e * e * (k - 1.0)),
            gamma: zf_gamma(t_d, cfg),
        })
    }

    /// MRC denominator `alpha^2 - a1 alpha - b1`; negative on (0, 1).
    pub fn mrc_denominator(&self, alpha: f64) -> f64 {
        alpha * alpha - self.a1 * alpha - self.b1
    }
}

pub(crate) fn zf_gamma(t_d: f64, cfg: &SystemConfig) -> f64 {
    let k = cfg.k() as f64;
    let e = cfg.block_energy();
    (k * e + t_d) / (e * (t_d - k))
}

/// MRC effective SINR for per-user pilot energy `e_tau` and data power `rho_d`.
pub fn sinr_mrc(e_tau: f64, rho_d: f64, m: usize, k: usize) -> f64 {
    let num = e_tau * rho_d * (m as f64 - 1.0);
    if num == 0.0 {
        return 0.0;
    }
    num / (e_tau * rho_d * (k as f64 - 1.0) + k as f64 * rho_d + e_tau + 1.0)
}

/// ZF effective SINR; zero when `M = K`.
pub fn sinr_zf(e_tau: f64, rho_d: f64, m: usize, k: usize) -> f64 {
    let num = e_tau * rho_d * (m as f64 - k as f64);
    if num == 0.0 {
        return 0.0;
    }
    num / (k as f64 * rho_d + e_tau + 1.0)
}

pub fn sinr(rx: Receiver, e_tau: f64, rho_d: f64, m: usize, k: usize) -> f64 {
    match rx {
        Receiver::Mrc => sinr_mrc(e_tau, rho_d, m, k),
        Receiver::Zf => sinr_zf(e_tau, rho_d, m, k),
    }
}

/// SINR at `(alpha, t_d)` through the direct form. Total for `t_d > 0`.
pub fn sinr_at(alpha: f64, t_d: f64, cfg: &SystemConfig, rx: Receiver) -> f64 {
    let e = cfg.block_energy();
    sinr(rx, alpha * e, (1.0 - alpha) * e / t_d, cfg.m(), cfg.k())
}

/// Sum-rate lower bound `(T_d / T) K log2(1 + SINR)` without feasibility checks.
pub fn rate_at(alpha: f64, t_d: f64, cfg: &SystemConfig, rx: Receiver) -> f64 {
    if t_d <= 0.0 {
        return 0.0;
    }
    let s = sinr_at(alpha, t_d, cfg, rx);
    t_d / cfg.t() as f64 * cfg.k() as f64 * s.ln_1p() / LN_2
}

/// Sum-rate lower bound in bits/s/Hz for a validated split.
pub fn rate(split: &PowerSplit, cfg: &SystemConfig, rx: Receiver) -> f64 {
    let s = sinr(rx, split.training_energy(), split.rho_d(), cfg.m(), cfg.k());
    split.t_d() / cfg.t() as f64 * cfg.k() as f64 * s.ln_1p() / LN_2
}

/// MRC SINR through the `alpha`-rational rewrite.
pub fn sinr_mrc_alpha(alpha: f64, t_d: f64, cfg: &SystemConfig) -> Result<f64> {
    let c = SinrCoefficients::new(t_d, cfg)?;
    let scale = (cfg.m() as f64 - 1.0) / (cfg.k() as f64 - 1.0);
    let num = alpha * (alpha - 1.0);
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(scale * num / c.mrc_denominator(alpha))
}

/// ZF SINR as a function of `alpha`. Evaluated through the direct form,
/// which stays continuous across `T_d = K`.
pub fn sinr_zf_alpha(alpha: f64, t_d: f64, cfg: &SystemConfig) -> f64 {
    sinr_at(alpha, t_d, cfg, Receiver::Zf)
}

/// ZF SINR through the `gamma` rational form. Singular at `T_d = K`.
pub fn sinr_zf_alpha_rational(alpha: f64, t_d: f64, cfg: &SystemConfig) -> f64 {
    let gamma = zf_gamma(t_d, cfg);
    let e = cfg.block_energy();
    let k = cfg.k() as f64;
    e * (cfg.m() as f64 - k) * alpha * (1.0 - alpha) / ((t_d - k) * (gamma + alpha))
}

/// Energy efficiency `rate / rho` in bits/s/Hz per unit power.
pub fn energy_efficiency(rate_value: f64, rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::NonPositivePower {
            name: "rho",
            value: rho,
        });
    }
    Ok(rate_value / rho)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn config_validation() {
        assert_eq!(
            SystemConfig::new(10, 10, 196, 1.0, 1.2),
            Err(Error::TooFewAntennas { m: 10, k: 10 })
        );
        assert!(matches!(
            SystemConfig::new(20, 10, 10, 1.0, 1.2),
            Err(Error::BlockTooShort { .. })
        ));
        assert!(matches!(
            SystemConfig::new(20, 10, 196, 1.0, 0.9),
            Err(Error::PeakBelowAverage { .. })
        ));
        assert!(matches!(
            SystemConfig::new(20, 10, 196, 0.0, 1.0),
            Err(Error::NonPositivePower { .. })
        ));
        assert!(matches!(SystemConfig::new(20, 0, 196, 1.0, 1.0), Err(Error::NoUsers)));
        assert!(SystemConfig::new(20, 10, 196, 1.0, 1.0).is_ok());
        assert!(SystemConfig::new(20, 10, 11, 1.0, 1.0).is_ok());
    }

    #[test]
    fn too_few_antennas_message() {
        let err = SystemConfig::new(5, 10, 196, 1.0, 1.2).unwrap_err();
        assert!(err.to_string().contains("M must exceed K"));
    }

    #[test]
    fn split_energy_identity() {
        let cfg = SystemConfig::new(20, 10, 196, 0.7, 1.0).unwrap();
        let s = PowerSplit::new(0.3, 150.5, &cfg).unwrap();
        let total = s.rho_tau() * s.t_tau() + s.rho_d() * s.t_d();
        assert!(rel(total, cfg.block_energy()) < 1e-14);
        assert!(rel(s.rho_tau() * s.t_tau(), 0.3 * cfg.block_energy()) < 1e-14);
        assert!(PowerSplit::new(1.1, 100.0, &cfg).is_err());
        assert!(PowerSplit::new(0.5, 0.0, &cfg).is_err());
        assert!(PowerSplit::new(0.5, 186.0 + 1e-9, &cfg).is_err());
        assert!(PowerSplit::new(0.5, 186.0, &cfg).is_ok());
    }

    #[test]
    fn sinr_mrc_examples() {
        assert_eq!(sinr_mrc(5.0, 2.0, 1, 4), 0.0);
        assert_eq!(sinr_mrc(7.0, 0.0, 8, 2), 0.0);
        assert!((sinr_mrc(1.0, 1.0, 2, 2) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn sinr_zf_examples() {
        assert_eq!(sinr_zf(3.0, 5.0, 4, 4), 0.0);
        assert!((sinr_zf(1.0, 1.0, 3, 2) - 0.25).abs() < 1e-15);
        assert_eq!(sinr_zf(0.0, 9.0, 10, 2), 0.0);
    }

    #[test]
    fn rate_hand_evaluation() {
        // alpha rho T = 1 and (1 - alpha) rho T / T_d = 1 with T = 4, T_d = 2:
        // rho T = 3, alpha = 1/3.
        let cfg = SystemConfig::new(3, 2, 4, 0.75, 10.0).unwrap();
        let split = PowerSplit::new(1.0 / 3.0, 2.0, &cfg).unwrap();
        assert!((split.training_energy() - 1.0).abs() < 1e-15);
        assert!((split.rho_d() - 1.0).abs() < 1e-15);
        let expected = 0.5 * 2.0 * 1.25f64.log2();
        assert!(rel(rate(&split, &cfg, Receiver::Zf), expected) < 1e-14);
    }

    #[test]
    fn rate_vanishes_at_edges() {
        let cfg = SystemConfig::new(20, 10, 196, 1.0, 2.0).unwrap();
        for rx in Receiver::ALL {
            let full = PowerSplit::new(1.0, 120.0, &cfg).unwrap();
            assert_eq!(rate(&full, &cfg, rx), 0.0);
            let tiny = PowerSplit::new(0.5, 1e-12, &cfg).unwrap();
            assert!(rate(&tiny, &cfg, rx) < 1e-9);
        }
    }

    #[test]
    fn mrc_alpha_form_matches_direct() {
        let cfg = SystemConfig::new(50, 20, 196, 0.5, 1.0).unwrap();
        let direct = sinr_mrc(0.3 * 0.5 * 196.0, 0.7 * 0.5 * 196.0 / 150.0, 50, 20);
        let rewritten = sinr_mrc_alpha(0.3, 150.0, &cfg).unwrap();
        assert!(rel(rewritten, direct) < 1e-12);
        assert_eq!(sinr_mrc_alpha(0.0, 150.0, &cfg).unwrap(), 0.0);
        assert_eq!(sinr_mrc_alpha(1.0, 150.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn mrc_alpha_form_rejects_single_user() {
        let cfg = SystemConfig::new(4, 1, 10, 1.0, 1.0).unwrap();
        assert_eq!(sinr_mrc_alpha(0.3, 5.0, &cfg), Err(Error::SingleUserRewrite));
    }

    #[test]
    fn zf_alpha_forms_agree() {
        let cfg = SystemConfig::new(20, 10, 196, 1.0, 1.0).unwrap();
        let a = sinr_zf_alpha(0.2, 186.0, &cfg);
        let b = sinr_zf_alpha_rational(0.2, 186.0, &cfg);
        assert!(rel(a, b) < 1e-12);
        assert_eq!(sinr_zf_alpha(0.0, 186.0, &cfg), 0.0);
        assert_eq!(sinr_zf_alpha(1.0, 186.0, &cfg), 0.0);
        // continuous at T_d = K where the rational form is 0/0
        assert!(sinr_zf_alpha(0.4, 10.0, &cfg).is_finite());
    }

    #[test]
    fn energy_efficiency_definition() {
        assert_eq!(energy_efficiency(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(energy_efficiency(2.0, 2.0).unwrap(), 1.0);
        assert!(energy_efficiency(1.0, 0.0).is_err());
        assert!(energy_efficiency(1.0, -1.0).is_err());
    }

    #[test]
    fn receiver_parsing() {
        assert_eq!("mrc".parse::<Receiver>().unwrap(), Receiver::Mrc);
        assert_eq!("ZF".parse::<Receiver>().unwrap(), Receiver::Zf);
        assert!("mmse".parse::<Receiver>().is_err());
    }
}
