//! Randomized self-checks of the solvers against the grid oracle, the
//! curvature properties the closed forms rely on, and the Monte Carlo model.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alpha::alpha_star_unconstrained;
use crate::error::Result;
use crate::joint::{case1_line_rate, optimize, thresholds, CaseLabel};
use crate::model::{rate, rate_at, sinr, sinr_at, PowerSplit, Receiver, SystemConfig};
use crate::oracle::{grid_argmax, grid_argmax_fixed_td, GridSpec};
use crate::search::super_level_sets_contiguous;
use crate::sim::{empirical_sinr, mmse_moments, MonteCarloSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    ClosedFormVsGrid,
    Concavity,
    Quasiconcavity,
    MonteCarlo,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::ClosedFormVsGrid,
        Suite::Concavity,
        Suite::Quasiconcavity,
        Suite::MonteCarlo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::ClosedFormVsGrid => "closed_form_vs_grid",
            Suite::Concavity => "concavity",
            Suite::Quasiconcavity => "quasiconcavity",
            Suite::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidateOptions {
    /// Random configurations per suite.
    pub configs: usize,
    pub seed: u64,
    pub trials: usize,
    /// Operating point of the Monte Carlo suite.
    pub mc_config: SystemConfig,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            configs: 20,
            seed: 7,
            trials: REFERENCE_TRIALS,
            mc_config: SystemConfig::new(20, 10, 196, 1.0, 1.2).expect("valid default"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    /// Worst observed value; the check passes when `worst <= limit`.
    pub worst: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Metric {
    fn new(name: impl Into<String>, worst: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            worst,
            limit,
            passed: worst <= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub metrics: Vec<Metric>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite, metrics: Vec<Metric>, notes: Vec<String>) -> Self {
        Self {
            suite,
            passed: metrics.iter().all(|m| m.passed),
            metrics,
            notes,
        }
    }
}

/// Random scenario: `2 <= K <= 16`, `K < M <= K + 100`, `K < T <= 300`,
/// `rho` in [-10, 25] dB and `rho_max / rho` in [1, 4].
pub fn random_config(rng: &mut impl Rng) -> SystemConfig {
    let k = rng.gen_range(2..=16);
    let m = rng.gen_range(k + 1..=k + 100);
    let t = rng.gen_range(k + 1..=300);
    let rho = 10f64.powf(rng.gen_range(-1.0..2.5));
    let ratio = rng.gen_range(1.0..4.0);
    SystemConfig::new(m, k, t, rho, ratio * rho).expect("generator respects invariants")
}

fn without_peak(cfg: &SystemConfig) -> SystemConfig {
    SystemConfig::new(cfg.m(), cfg.k(), cfg.t(), cfg.rho(), cfg.rho() * 1e6).expect("larger peak stays valid")
}

fn closed_form_vs_grid(opts: &ValidateOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let fine = GridSpec::new(1e-6, 0.05, 1);
    let joint = GridSpec::default();
    let mut worst_alpha: f64 = 0.0;
    let mut worst_rate: f64 = 0.0;
    for _ in 0..opts.configs {
        let cfg = random_config(&mut rng);
        let free = without_peak(&cfg);
        let t_d = rng.gen_range(0.5..=cfg.max_data_len());
        for rx in Receiver::ALL {
            let closed = alpha_star_unconstrained(t_d, &free, rx);
            let grid = grid_argmax_fixed_td(t_d, &free, rx, &fine);
            worst_alpha = worst_alpha.max((closed - grid.alpha).abs());

            let opt = optimize(&cfg, rx).map(|r| r.rate_star).unwrap_or(f64::NAN);
            let g = grid_argmax(&cfg, rx, &joint);
            worst_rate = worst_rate.max(((opt - g.rate) / g.rate).abs());
        }
    }
    SuiteReport::new(
        Suite::ClosedFormVsGrid,
        vec![
            Metric::new("max |alpha_closed - alpha_grid|", worst_alpha, 2e-6),
            Metric::new("max relative rate gap, joint vs grid", worst_rate, 1e-5),
        ],
        vec![],
    )
}

/// Largest positive second central difference relative to the function scale.
fn worst_convexity(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    values
        .windows(3)
        .map(|w| (w[0] - 2.0 * w[1] + w[2]) / scale)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Cubic whose positivity on (0, 1) gives concavity of the MRC SINR in `alpha`.
pub fn concavity_cubic(a: f64, b: f64, x: f64) -> f64 {
    (a - 1.0) * x.powi(3) + 3.0 * b * x * x - 3.0 * b * x + a * b + b * b
}

/// Closed-form second derivative of `x ln(1 + a / (b + c x))`.
pub fn log_rate_second_derivative(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let num = a * b * c * c * x + a * c * c * (a + b) * x + 2.0 * a * c * (a + b) * b;
    let den = (c * x + b) * (c * x + a + b);
    -num / (den * den)
}

fn concavity(opts: &ValidateOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 1);
    let h = 1e-4;
    let mut worst_alpha = f64::NEG_INFINITY;
    let mut worst_td_curv = f64::NEG_INFINITY;
    let mut worst_td_slope = f64::NEG_INFINITY;
    let mut worst_cubic = f64::NEG_INFINITY;
    let mut worst_fpp = f64::NEG_INFINITY;
    for _ in 0..opts.configs {
        let cfg = random_config(&mut rng);
        let t_d = rng.gen_range(0.5..=cfg.max_data_len());
        let alpha = rng.gen_range(0.01..0.99);
        for rx in Receiver::ALL {
            let xs: Vec<f64> = (0..=(1.0 / h) as usize).map(|i| i as f64 * h).collect();
            let s: Vec<f64> = xs.iter().map(|&a| sinr_at(a, t_d, &cfg, rx)).collect();
            worst_alpha = worst_alpha.max(worst_convexity(&s));

            let tds: Vec<f64> = (1..=400).map(|i| cfg.max_data_len() * i as f64 / 400.0).collect();
            let r: Vec<f64> = tds.iter().map(|&t| rate_at(alpha, t, &cfg, rx)).collect();
            worst_td_curv = worst_td_curv.max(worst_convexity(&r));
            let scale = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            worst_td_slope = worst_td_slope.max(
                r.windows(2)
                    .map(|w| (w[0] - w[1]) / scale)
                    .fold(f64::NEG_INFINITY, f64::max),
            );
        }
        let b = 10f64.powf(rng.gen_range(-3.0..3.0));
        let a = 1.0 - b + 10f64.powf(rng.gen_range(-3.0..3.0));
        for i in 1..1000 {
            worst_cubic = worst_cubic.max(-concavity_cubic(a, b, i as f64 / 1000.0));
        }
        let (pa, pb, pc, px) = (
            10f64.powf(rng.gen_range(-3.0..3.0)),
            10f64.powf(rng.gen_range(-3.0..3.0)),
            10f64.powf(rng.gen_range(-3.0..3.0)),
            10f64.powf(rng.gen_range(-3.0..3.0)),
        );
        worst_fpp = worst_fpp.max(log_rate_second_derivative(pa, pb, pc, px));
    }
    SuiteReport::new(
        Suite::Concavity,
        vec![
            Metric::new("max scaled second difference in alpha", worst_alpha, 1e-13),
            Metric::new("max scaled second difference in T_d", worst_td_curv, 1e-13),
            Metric::new("max scaled decrease in T_d", worst_td_slope, 0.0),
            Metric::new("max -f(x) of the concavity cubic", worst_cubic, 0.0),
            Metric::new("max f''(x) of x ln(1 + a/(b + c x))", worst_fpp, 0.0),
        ],
        vec![],
    )
}

fn quasiconcavity(opts: &ValidateOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 2);
    let mut checked = 0usize;
    let mut broken = 0usize;
    let mut attempts = 0usize;
    while checked < opts.configs && attempts < 200 * opts.configs.max(1) {
        attempts += 1;
        let base = random_config(&mut rng);
        // Tight peak ratios make the pilot-peak case common.
        let ratio = rng.gen_range(1.0..1.3);
        let Ok(cfg) = SystemConfig::new(base.m(), base.k(), base.t(), base.rho(), ratio * base.rho()) else {
            continue;
        };
        for rx in Receiver::ALL {
            let th = thresholds(&cfg, rx);
            if th.case() != CaseLabel::PilotPeakLimited {
                continue;
            }
            let samples: Vec<f64> = (0..1000)
                .map(|i| th.alpha1 + (1.0 - th.alpha1) * i as f64 / 999.0)
                .map(|a| case1_line_rate(a, &cfg, rx))
                .collect();
            checked += 1;
            if !super_level_sets_contiguous(&samples) {
                broken += 1;
            }
        }
    }
    let mut notes = vec![format!("{checked} pilot-peak-limited lines sampled")];
    if checked == 0 {
        notes.push("no pilot-peak-limited configuration was drawn".into());
    }
    SuiteReport::new(
        Suite::Quasiconcavity,
        vec![
            Metric::new("lines with a non-contiguous super-level set", broken as f64, 0.0),
            Metric::new("missing samples", (opts.configs.saturating_sub(checked)) as f64, 0.0),
        ],
        notes,
    )
}

/// Trial count at which the 10% agreement band is expected to hold.
const REFERENCE_TRIALS: usize = 10_000;

fn monte_carlo(opts: &ValidateOptions) -> Result<SuiteReport> {
    let cfg = opts.mc_config;
    let split = PowerSplit::new(cfg.k() as f64 / cfg.t() as f64, cfg.max_data_len(), &cfg)?;
    let spec = MonteCarloSpec::new(opts.trials, opts.seed);
    let mut metrics = Vec::new();
    let mut notes = Vec::new();
    for rx in Receiver::ALL {
        let analytic = sinr(rx, split.training_energy(), split.rho_d(), cfg.m(), cfg.k());
        let emp = empirical_sinr(&split, &cfg, rx, &spec)?;
        let gap = (emp.sinr - analytic).abs();
        let band = (0.1 * analytic).max(3.0 * emp.std_error);
        if opts.trials < REFERENCE_TRIALS || 3.0 * emp.std_error > 0.1 * analytic {
            notes.push(format!(
                "{rx}: confidence band widened ({} trials, 3 SE = {:.3e} against a 10% band of {:.3e})",
                opts.trials,
                3.0 * emp.std_error,
                0.1 * analytic
            ));
        }
        metrics.push(Metric::new(
            format!("{rx} |empirical - analytic| SINR / band"),
            gap / band,
            1.0,
        ));
        let r = rate(&split, &cfg, rx);
        notes.push(format!(
            "{rx}: analytic SINR {analytic:.6}, empirical {:.6} ± {:.2e}, rate {r:.6}",
            emp.sinr, emp.std_error
        ));
    }
    let m = mmse_moments(&split, &cfg, &spec)?;
    let e = split.training_energy();
    metrics.push(Metric::new(
        "estimate variance deviation in SE",
        (m.estimate_var - e / (e + 1.0)).abs() / m.estimate_var_se,
        3.0,
    ));
    metrics.push(Metric::new(
        "error variance deviation in SE",
        (m.error_var - 1.0 / (e + 1.0)).abs() / m.error_var_se,
        3.0,
    ));
    metrics.push(Metric::new(
        "estimate-error cross moment in SE",
        (m.cross.0 / m.cross_se.0).abs(),
        3.0,
    ));
    Ok(SuiteReport::new(Suite::MonteCarlo, metrics, notes))
}

pub fn run_suite(suite: Suite, opts: &ValidateOptions) -> Result<SuiteReport> {
    Ok(match suite {
        Suite::ClosedFormVsGrid => closed_form_vs_grid(opts),
        Suite::Concavity => concavity(opts),
        Suite::Quasiconcavity => quasiconcavity(opts),
        Suite::MonteCarlo => monte_carlo(opts)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn log_rate_curvature_matches_finite_difference() {
        let f = |x: f64| x * (1.0 + 2.0 / (0.5 + 3.0 * x)).ln();
        let x = 0.7;
        let h = 1e-4;
        let fd = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        let exact = log_rate_second_derivative(2.0, 0.5, 3.0, x);
        assert!((fd - exact).abs() < 1e-5 * exact.abs());
    }

    #[test]
    fn cubic_boundary_values() {
        let (a, b) = (1.7, 0.4);
        assert!((concavity_cubic(a, b, 0.0) - b * (a + b)).abs() < 1e-15);
        assert!((concavity_cubic(a, b, 1.0) - (a + b - 1.0) * (b + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn small_suites_pass() {
        let opts = ValidateOptions {
            configs: 3,
            trials: 500,
            ..Default::default()
        };
        for s in [Suite::Concavity, Suite::Quasiconcavity, Suite::MonteCarlo] {
            let r = run_suite(s, &opts).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
