//! Joint optimization of the training-energy fraction and the data duration.
//!
//! For fixed `alpha` the rate increases with `T_d`, so the optimum lies on
//! the upper boundary of the feasible region: either the segment
//! `T_d = T - K` or the pilot-peak line `T_d = T - rho T alpha / rho_max`.
//! Comparing the unconstrained optimum `alpha_dag` at `T_d = T - K` with
//! the two corner fractions `alpha1` (pilot peak) and `alpha2` (data peak)
//! decides which boundary holds the maximizer.

use serde::Serialize;

use crate::alpha::{alpha_star_unconstrained, solve_fixed_td};
use crate::error::Result;
use crate::model::{rate, rate_at, PowerSplit, Receiver, SystemConfig};
use crate::search::{golden_section_max, Scan};

/// Golden-section tolerance in `alpha` on the pilot-peak line.
pub const LINE_SEARCH_TOL: f64 = 1e-9;
/// Samples used to check unimodality before the line search.
pub const PRESCAN_POINTS: usize = 1001;
/// Allowed reversal in the pre-scan before it is reported as non-unimodal.
pub const PRESCAN_TOL: f64 = 1e-12;
/// Smallest data duration returned, as a fraction of `T`.
pub const MIN_DATA_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseThresholds {
    /// Fraction at which the pilot-peak line meets `T_d = T - K`.
    pub alpha1: f64,
    /// Fraction at which the data-peak line meets `T_d = T - K`.
    pub alpha2: f64,
    /// Unconstrained optimal fraction at `T_d = T - K`.
    pub alpha_dag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseLabel {
    /// Pilot power is capped; the optimum sits on the pilot-peak line.
    PilotPeakLimited,
    /// Data power is capped; the optimum is `(alpha2, T - K)`.
    DataPeakLimited,
    /// Neither cap binds; the optimum is `(alpha_dag, T - K)`.
    Unconstrained,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::PilotPeakLimited => "PilotPeakLimited",
            CaseLabel::DataPeakLimited => "DataPeakLimited",
            CaseLabel::Unconstrained => "Unconstrained",
        }
    }
}

impl CaseThresholds {
    pub fn case(&self) -> CaseLabel {
        if self.alpha1 < self.alpha_dag {
            CaseLabel::PilotPeakLimited
        } else if self.alpha2 > self.alpha_dag {
            CaseLabel::DataPeakLimited
        } else {
            CaseLabel::Unconstrained
        }
    }
}

pub fn thresholds(cfg: &SystemConfig, rx: Receiver) -> CaseThresholds {
    let e = cfg.block_energy();
    let k = cfg.k() as f64;
    let t_max = cfg.max_data_len();
    CaseThresholds {
        alpha1: cfg.rho_max() * k / e,
        alpha2: 1.0 - cfg.rho_max() * t_max / e,
        // T = 2K gives T_d = K here and the solver returns exactly 1/2.
        alpha_dag: alpha_star_unconstrained(t_max, cfg, rx),
    }
}

/// Data duration on the pilot-peak line for a given fraction.
pub fn case1_line_td(alpha: f64, cfg: &SystemConfig) -> f64 {
    let t = cfg.t() as f64;
    (t - cfg.block_energy() * alpha / cfg.rho_max()).min(cfg.max_data_len())
}

/// Rate along the pilot-peak line `T_d = T - rho T alpha / rho_max`.
pub fn case1_line_rate(alpha: f64, cfg: &SystemConfig, rx: Receiver) -> f64 {
    rate_at(alpha, case1_line_td(alpha, cfg), cfg, rx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineSearchResult {
    pub alpha: f64,
    pub t_d: f64,
    pub rate: f64,
    /// False when the pre-scan found the objective was not unimodal.
    pub unimodal: bool,
}

/// Largest `alpha` on the pilot-peak line that keeps `T_d >= MIN_DATA_FRACTION * T`.
fn case1_alpha_max(cfg: &SystemConfig) -> f64 {
    ((1.0 - MIN_DATA_FRACTION) * cfg.rho_max() / cfg.rho()).min(1.0)
}

/// Maximizes the rate along the pilot-peak line over `[alpha1, 1]`.
pub fn search_case1(cfg: &SystemConfig, rx: Receiver) -> LineSearchResult {
    let th = thresholds(cfg, rx);
    let lo = th.alpha1.min(1.0);
    let hi = case1_alpha_max(cfg).max(lo);
    let f = |a: f64| case1_line_rate(a, cfg, rx);

    let scan = Scan::new(f, lo, hi, PRESCAN_POINTS);
    let unimodal = scan.is_unimodal(PRESCAN_TOL);
    let (alpha, value) = if unimodal {
        golden_section_max(f, lo, hi, LINE_SEARCH_TOL)
    } else {
        log::warn!("rate along the pilot-peak line is not unimodal for {cfg:?} ({rx}); refining the scan maximum");
        let i = scan.argmax;
        let a = scan.xs[i.saturating_sub(1)];
        let b = scan.xs[(i + 1).min(scan.xs.len() - 1)];
        golden_section_max(f, a, b, LINE_SEARCH_TOL)
    };
    let (alpha, value) = if scan.values[scan.argmax] > value {
        (scan.xs[scan.argmax], scan.values[scan.argmax])
    } else {
        (alpha, value)
    };
    LineSearchResult {
        alpha,
        t_d: case1_line_td(alpha, cfg),
        rate: value,
        unimodal,
    }
}

/// Best point restricted to integer training lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegerPoint {
    pub t_tau: usize,
    pub t_d: f64,
    pub alpha: f64,
    pub rate: f64,
    pub clipped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub alpha_star: f64,
    pub t_d_star: f64,
    pub t_tau_star: f64,
    pub rho_tau: f64,
    pub rho_d: f64,
    pub rate_star: f64,
    pub case_label: CaseLabel,
    pub receiver: Receiver,
    pub thresholds: CaseThresholds,
    pub integerized: Option<IntegerPoint>,
}

impl OptimizationResult {
    fn at(
        alpha: f64,
        t_d: f64,
        case_label: CaseLabel,
        th: CaseThresholds,
        cfg: &SystemConfig,
        rx: Receiver,
    ) -> Result<Self> {
        let split = PowerSplit::new(alpha, t_d, cfg)?;
        Ok(Self {
            alpha_star: alpha,
            t_d_star: t_d,
            t_tau_star: split.t_tau(),
            rho_tau: split.rho_tau(),
            rho_d: split.rho_d(),
            rate_star: rate(&split, cfg, rx),
            case_label,
            receiver: rx,
            thresholds: th,
            integerized: None,
        })
    }

    pub fn split(&self, cfg: &SystemConfig) -> Result<PowerSplit> {
        PowerSplit::new(self.alpha_star, self.t_d_star, cfg)
    }
}

/// Jointly optimal `(alpha, T_d)` under the average and peak constraints.
pub fn optimize(cfg: &SystemConfig, rx: Receiver) -> Result<OptimizationResult> {
    let th = thresholds(cfg, rx);
    let t_max = cfg.max_data_len();
    match th.case() {
        CaseLabel::PilotPeakLimited => {
            let line = search_case1(cfg, rx);
            OptimizationResult::at(line.alpha, line.t_d, CaseLabel::PilotPeakLimited, th, cfg, rx)
        }
        CaseLabel::DataPeakLimited => OptimizationResult::at(th.alpha2, t_max, CaseLabel::DataPeakLimited, th, cfg, rx),
        CaseLabel::Unconstrained => OptimizationResult::at(th.alpha_dag, t_max, CaseLabel::Unconstrained, th, cfg, rx),
    }
}

/// Best feasible point with an integer training length `T_tau in {K, ..., T-1}`,
/// attached to the continuous optimum.
pub fn optimize_integer(cfg: &SystemConfig, rx: Receiver) -> Result<OptimizationResult> {
    let mut result = optimize(cfg, rx)?;
    let t = cfg.t();
    let mut best: Option<IntegerPoint> = None;
    for t_tau in cfg.k()..t {
        let t_d = (t - t_tau) as f64;
        let sol = solve_fixed_td(t_d, cfg, rx)?;
        let r = rate_at(sol.alpha_star, t_d, cfg, rx);
        if best.is_none_or(|b| r > b.rate) {
            best = Some(IntegerPoint {
                t_tau,
                t_d,
                alpha: sol.alpha_star,
                rate: r,
                clipped: sol.clipped,
            });
        }
    }
    result.integerized = best;
    Ok(result)
}

/// Rate of the uniform-power baseline: `T_tau = K` and `rho_tau = rho_d = rho`.
pub fn equal_power_rate(cfg: &SystemConfig, rx: Receiver) -> f64 {
    let k = cfg.k() as f64;
    rate_at(k / cfg.t() as f64, cfg.max_data_len(), cfg, rx)
}
