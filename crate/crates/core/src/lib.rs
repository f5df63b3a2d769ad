//! Training-energy and training-duration optimization for the uplink of a
//! multiuser MIMO system with maximum-ratio (MRC) or zero-forcing (ZF)
//! combining and MMSE channel estimates.
//!
//! The sum-rate lower bound
//! `R = (T_d / T) K log2(1 + SINR)` is maximized over the share `alpha` of
//! block energy spent on pilots and the data duration `T_d`, subject to an
//! average power `rho` and a per-phase peak power `rho_max`.
//!
//! ```
//! use uplink_training::{optimize, Receiver, SystemConfig};
//!
//! let rho = 10f64.powf(-0.5); // -5 dB
//! let cfg = SystemConfig::new(20, 10, 196, rho, 1.2 * rho).unwrap();
//! let best = optimize(&cfg, Receiver::Zf).unwrap();
//! assert!(cfg.is_feasible(best.alpha_star, best.t_d_star, 1e-12));
//! ```

pub mod alpha;
pub mod error;
pub mod joint;
pub mod model;
pub mod oracle;
pub mod search;
pub mod sim;
pub mod sweep;
pub mod validate;

pub use alpha::{
    alpha_star_mrc_unconstrained, alpha_star_unconstrained, alpha_star_zf_unconstrained, feasible_alpha,
    solve_fixed_td, FeasibleInterval, FixedTdSolution,
};
pub use error::{Error, Result};
pub use joint::{
    case1_line_rate, equal_power_rate, optimize, optimize_integer, search_case1, thresholds, CaseLabel, CaseThresholds,
    IntegerPoint, OptimizationResult,
};
pub use model::{
    db_to_linear, energy_efficiency, rate, rate_at, sinr_at, sinr_mrc, sinr_mrc_alpha, sinr_zf, sinr_zf_alpha,
    PowerSplit, Receiver, SinrCoefficients, SystemConfig,
};
pub use oracle::{grid_argmax, grid_argmax_fixed_td, GridPoint, GridSpec};
pub use sim::{empirical_rate, empirical_sinr, mmse_moments, simulate_training, MonteCarloSpec};
pub use sweep::{evaluate_scheme, run_sweep, PeakPower, Scenario, Scheme, SweepRow, SweepSpec, SweepVariable};
