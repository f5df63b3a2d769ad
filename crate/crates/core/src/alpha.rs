//! Optimal training-energy fraction for a fixed data duration.
//!
//! For fixed `T_d` the SINR of either receiver is concave in `alpha` on
//! (0, 1) and vanishes at both ends, so the unconstrained optimum is the
//! unique interior stationary point. Under the peak constraint the optimum
//! is that point projected onto the admissible interval.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{sinr_at, zf_gamma, Receiver, SystemConfig};

/// Below this distance from `T_d = K` the closed forms are replaced by 1/2.
pub const TD_EQ_K_TOL: f64 = 1e-9;

/// Admissible `alpha` range `[lo, hi]` for one data duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleInterval {
    pub lo: f64,
    pub hi: f64,
}

impl FeasibleInterval {
    /// `None` when the range is empty or leaves [0, 1].
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        (0.0 <= lo && lo <= hi && hi <= 1.0).then_some(Self { lo, hi })
    }

    pub fn contains(&self, alpha: f64) -> bool {
        self.lo <= alpha && alpha <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Nearest admissible value; the single point wins ties.
    pub fn clamp(&self, alpha: f64) -> f64 {
        alpha.clamp(self.lo, self.hi)
    }
}

/// Intersection of the two peak-power bounds with `0 <= alpha <= 1`.
pub fn feasible_alpha(t_d: f64, cfg: &SystemConfig) -> FeasibleInterval {
    let ratio = cfg.rho_max() / cfg.rho();
    let t_tau = cfg.t() as f64 - t_d;
    let pilot_cap = ratio * t_tau / cfg.t() as f64;
    let hi = pilot_cap.min(1.0);
    let lo = (pilot_cap + 1.0 - ratio).max(0.0);
    // rho_max >= rho makes lo <= hi exactly; rounding can flip them by an ulp.
    let lo = lo.min(hi);
    FeasibleInterval { lo, hi }
}

/// Unconstrained optimal `alpha` for MRC at data duration `t_d`.
///
/// For `K >= 2` this is the (0, 1) root of `(1 - a1) x^2 - 2 b1 x + b1 = 0`,
/// i.e. `b1 / (b1 + sqrt(b1 (a1 + b1 - 1)))`. Since
/// `(a1 + b1 - 1) / b1 = T_d (rho T + 1) / (rho T K + T_d)` exactly, the root
/// is evaluated as `A / (A + sqrt(A B))` with `A = rho T K + T_d` and
/// `B = T_d (rho T + 1)`, which avoids the cancellation in `a1 + b1 - 1` as
/// `a1 -> 1` and also covers `K = 1`, where the coefficient rewrite is
/// undefined.
pub fn alpha_star_mrc_unconstrained(t_d: f64, cfg: &SystemConfig) -> f64 {
    if (t_d - cfg.k() as f64).abs() < TD_EQ_K_TOL {
        return 0.5;
    }
    let e = cfg.block_energy();
    let a = e * cfg.k() as f64 + t_d;
    let b = t_d * (e + 1.0);
    a / (a + (a * b).sqrt())
}

/// Unconstrained optimal `alpha` for ZF at data duration `t_d`.
///
/// `-gamma + sqrt(gamma (gamma + 1))` for `T_d > K` and
/// `-gamma - sqrt(gamma (gamma + 1))` for `T_d < K`, both rewritten over
/// the conjugate so neither branch cancels catastrophically.
pub fn alpha_star_zf_unconstrained(t_d: f64, cfg: &SystemConfig) -> f64 {
    let k = cfg.k() as f64;
    if (t_d - k).abs() < TD_EQ_K_TOL {
        return 0.5;
    }
    let gamma = zf_gamma(t_d, cfg);
    let root = (gamma * (gamma + 1.0)).sqrt();
    if t_d > k {
        gamma / (gamma + root)
    } else {
        -gamma / (-gamma + root)
    }
}

pub fn alpha_star_unconstrained(t_d: f64, cfg: &SystemConfig, rx: Receiver) -> f64 {
    match rx {
        Receiver::Mrc => alpha_star_mrc_unconstrained(t_d, cfg),
        Receiver::Zf => alpha_star_zf_unconstrained(t_d, cfg),
    }
}

/// Optimal `alpha` at fixed `T_d` under the peak constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedTdSolution {
    pub alpha_star: f64,
    pub sinr_at_star: f64,
    /// The peak-power boundary was binding.
    pub clipped: bool,
    pub unconstrained: f64,
    pub interval: FeasibleInterval,
}

pub fn solve_fixed_td(t_d: f64, cfg: &SystemConfig, rx: Receiver) -> Result<FixedTdSolution> {
    let max = cfg.max_data_len();
    if !(t_d > 0.0 && t_d <= max) {
        return Err(Error::DataDurationOutOfRange { t_d, max });
    }
    let unconstrained = alpha_star_unconstrained(t_d, cfg, rx);
    let interval = feasible_alpha(t_d, cfg);
    let alpha_star = interval.clamp(unconstrained);
    Ok(FixedTdSolution {
        alpha_star,
        sinr_at_star: sinr_at(alpha_star, t_d, cfg, rx),
        clipped: !interval.contains(unconstrained),
        unconstrained,
        interval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: usize, k: usize, t: usize, rho: f64, rho_max: f64) -> SystemConfig {
        SystemConfig::new(m, k, t, rho, rho_max).unwrap()
    }

    #[test]
    fn interval_collapses_at_equal_peak() {
        let c = cfg(20, 10, 196, 0.4, 0.4);
        for t_d in [1.0, 50.0, 123.5, 186.0] {
            let iv = feasible_alpha(t_d, &c);
            let expected = (196.0 - t_d) / 196.0;
            assert!((iv.lo - expected).abs() < 1e-15);
            assert!((iv.hi - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn interval_unclipped_for_large_peak() {
        let c = cfg(20, 10, 196, 1.0, 1e3);
        let iv = feasible_alpha(186.0, &c);
        assert_eq!((iv.lo, iv.hi), (0.0, 1.0));
    }

    #[test]
    fn interval_hand_evaluation() {
        let c = cfg(20, 10, 196, 1.0, 1.2);
        let iv = feasible_alpha(186.0, &c);
        assert_eq!(iv.lo, 0.0);
        assert!((iv.hi - 1.2 * 10.0 / 196.0).abs() < 1e-15);
        assert!((iv.hi - 0.061_224_489_795_918_366).abs() < 1e-15);
    }

    #[test]
    fn half_at_td_equal_k() {
        let c = cfg(20, 10, 196, 3.0, 3.0);
        assert_eq!(alpha_star_mrc_unconstrained(10.0, &c), 0.5);
        assert_eq!(alpha_star_zf_unconstrained(10.0, &c), 0.5);
    }

    #[test]
    fn low_snr_tends_to_half() {
        let c = cfg(20, 10, 196, 1e-4, 1e-4);
        for rx in Receiver::ALL {
            assert!((alpha_star_unconstrained(100.0, &c, rx) - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn high_snr_mrc() {
        let c = cfg(20, 10, 196, 1e6, 1e6);
        assert!((alpha_star_mrc_unconstrained(90.0, &c) - 0.25).abs() < 1e-3);
    }

    #[test]
    fn zf_hand_evaluation() {
        let c = cfg(20, 10, 196, 1.0, 1e6);
        let gamma = 2146.0 / 34496.0;
        assert!((zf_gamma(186.0, &c) - gamma).abs() < 1e-15);
        let a = alpha_star_zf_unconstrained(186.0, &c);
        assert!((a - (-gamma + (gamma * (gamma + 1.0)).sqrt())).abs() < 1e-14);
        assert!((a - 0.19486).abs() < 1e-5);
    }

    #[test]
    fn clipping_to_pilot_peak() {
        let c = cfg(20, 10, 196, 1.0, 1.2);
        let sol = solve_fixed_td(186.0, &c, Receiver::Zf).unwrap();
        assert!(sol.clipped);
        assert!((sol.alpha_star - 1.2 * 10.0 / 196.0).abs() < 1e-15);
        assert!(sol.unconstrained > sol.alpha_star);
    }

    #[test]
    fn interior_optimum_is_not_clipped() {
        let c = cfg(20, 10, 196, 1.0, 1e3);
        let sol = solve_fixed_td(186.0, &c, Receiver::Mrc).unwrap();
        assert!(!sol.clipped);
        assert_eq!(sol.alpha_star, sol.unconstrained);
    }

    #[test]
    fn equal_peak_forces_equal_power() {
        let c = cfg(20, 10, 196, 0.3, 0.3);
        let sol = solve_fixed_td(150.0, &c, Receiver::Mrc).unwrap();
        assert!((sol.alpha_star - 46.0 / 196.0).abs() < 1e-15);
        assert!(sol.clipped);
    }

    #[test]
    fn rejects_out_of_range_td() {
        let c = cfg(20, 10, 196, 1.0, 1.2);
        assert!(solve_fixed_td(0.0, &c, Receiver::Mrc).is_err());
        assert!(solve_fixed_td(187.0, &c, Receiver::Zf).is_err());
    }

    #[test]
    fn single_user_mrc_has_a_closed_form() {
        let c = cfg(4, 1, 20, 2.0, 2.0);
        let a = alpha_star_mrc_unconstrained(12.0, &c);
        assert!(a > 0.0 && a < 1.0);
        // MRC and ZF coincide for K = 1.
        assert!((a - alpha_star_zf_unconstrained(12.0, &c)).abs() < 1e-14);
    }
}
