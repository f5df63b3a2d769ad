//! Brute-force maximizer over the feasible `(alpha, T_d)` region.
//!
//! This is the reference the closed forms and the joint solver are checked
//! against. It only evaluates the rate; it never calls into the solvers.

use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::feasible_alpha;
use crate::model::{rate_at, Receiver, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub alpha_step: f64,
    pub td_step: f64,
    /// Local passes, each shrinking both steps tenfold around the incumbent.
    pub refine_iters: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            alpha_step: 1e-3,
            td_step: 0.05,
            refine_iters: 3,
        }
    }
}

impl GridSpec {
    pub fn new(alpha_step: f64, td_step: f64, refine_iters: usize) -> Self {
        assert!(alpha_step > 0.0 && td_step > 0.0, "grid steps must be positive");
        Self {
            alpha_step,
            td_step,
            refine_iters,
        }
    }

    pub fn is_oracle_grade(&self) -> bool {
        self.alpha_step <= 1e-3 && self.td_step <= 0.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub alpha: f64,
    pub t_d: f64,
    pub rate: f64,
}

impl GridPoint {
    /// Higher rate wins; ties go to the lexicographically smaller `(alpha, t_d)`.
    fn better(self, other: Self) -> Self {
        use std::cmp::Ordering::*;
        match self.rate.partial_cmp(&other.rate) {
            Some(Greater) => self,
            Some(Less) => other,
            _ => {
                if (self.alpha, self.t_d) <= (other.alpha, other.t_d) {
                    self
                } else {
                    other
                }
            }
        }
    }
}

const WORST: GridPoint = GridPoint {
    alpha: f64::INFINITY,
    t_d: f64::INFINITY,
    rate: f64::NEG_INFINITY,
};

/// Points `lo, lo + step, ...` strictly below `hi`, then `hi` itself.
fn axis(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = if hi > lo { ((hi - lo) / step).ceil() as usize } else { 0 };
    (0..n)
        .map(move |j| lo + j as f64 * step)
        .filter(move |&x| x < hi)
        .chain(std::iter::once(hi))
}

fn best_in_row(t_d: f64, a_lo: f64, a_hi: f64, step: f64, cfg: &SystemConfig, rx: Receiver) -> GridPoint {
    axis(a_lo, a_hi, step)
        .map(|alpha| GridPoint {
            alpha,
            t_d,
            rate: rate_at(alpha, t_d, cfg, rx),
        })
        .fold(WORST, GridPoint::better)
}

/// Data durations `T - K, T - K - step, ...` down to (excluding) zero.
fn td_rows(t_lo: f64, t_hi: f64, step: f64) -> Vec<f64> {
    let mut rows = Vec::new();
    let mut i = 0usize;
    loop {
        let t_d = t_hi - i as f64 * step;
        if t_d <= 0.0 || t_d < t_lo {
            break;
        }
        rows.push(t_d);
        i += 1;
    }
    rows
}

fn sweep(rows: &[f64], a_window: (f64, f64), a_step: f64, cfg: &SystemConfig, rx: Receiver) -> GridPoint {
    rows.par_iter()
        .map(|&t_d| {
            let iv = feasible_alpha(t_d, cfg);
            let lo = iv.lo.max(a_window.0);
            let hi = iv.hi.min(a_window.1);
            if lo > hi {
                WORST
            } else {
                best_in_row(t_d, lo, hi, a_step, cfg, rx)
            }
        })
        .reduce(|| WORST, GridPoint::better)
}

/// Exhaustive search over the feasible region, then local refinement.
pub fn grid_argmax(cfg: &SystemConfig, rx: Receiver, spec: &GridSpec) -> GridPoint {
    let t_max = cfg.max_data_len();
    let rows = td_rows(0.0, t_max, spec.td_step);
    let mut best = sweep(&rows, (0.0, 1.0), spec.alpha_step, cfg, rx);
    let (mut a_step, mut t_step) = (spec.alpha_step, spec.td_step);
    for _ in 0..spec.refine_iters {
        let window = (best.alpha - a_step, best.alpha + a_step);
        let t_hi = (best.t_d + t_step).min(t_max);
        let t_lo = best.t_d - t_step;
        a_step /= 10.0;
        t_step /= 10.0;
        let mut rows = td_rows(t_lo, t_hi, t_step);
        rows.push(best.t_d);
        best = best.better(sweep(&rows, window, a_step, cfg, rx));
    }
    best
}

/// One-dimensional search over the admissible `alpha` interval at fixed `T_d`.
pub fn grid_argmax_fixed_td(t_d: f64, cfg: &SystemConfig, rx: Receiver, spec: &GridSpec) -> GridPoint {
    let iv = feasible_alpha(t_d, cfg);
    let mut best = best_in_row(t_d, iv.lo, iv.hi, spec.alpha_step, cfg, rx);
    let mut step = spec.alpha_step;
    for _ in 0..spec.refine_iters {
        let lo = (best.alpha - step).max(iv.lo);
        let hi = (best.alpha + step).min(iv.hi);
        step /= 10.0;
        best = best.better(best_in_row(t_d, lo, hi, step, cfg, rx));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_includes_endpoint() {
        let v: Vec<f64> = axis(0.0, 1.0, 0.3).collect();
        assert_eq!(v.len(), 5);
        assert_eq!(*v.last().unwrap(), 1.0);
        let v: Vec<f64> = axis(0.4, 0.4, 0.1).collect();
        assert_eq!(v, vec![0.4]);
    }

    #[test]
    fn tie_break_prefers_smaller_point() {
        let a = GridPoint {
            alpha: 0.2,
            t_d: 5.0,
            rate: 1.0,
        };
        let b = GridPoint {
            alpha: 0.1,
            t_d: 9.0,
            rate: 1.0,
        };
        assert_eq!(a.better(b), b);
        assert_eq!(b.better(a), b);
    }

    #[test]
    fn fixed_td_at_k_gives_half() {
        let c = SystemConfig::new(20, 10, 196, 1.0, 1e6).unwrap();
        for rx in Receiver::ALL {
            let p = grid_argmax_fixed_td(10.0, &c, rx, &GridSpec::new(1e-3, 0.05, 0));
            assert!((p.alpha - 0.5).abs() <= 1e-3);
        }
    }

    #[test]
    fn fixed_td_zf_hand_value() {
        let c = SystemConfig::new(20, 10, 196, 1.0, 1e6).unwrap();
        let p = grid_argmax_fixed_td(186.0, &c, Receiver::Zf, &GridSpec::new(1e-3, 0.05, 0));
        assert!((p.alpha - 0.19486).abs() <= 1e-3);
    }

    #[test]
    fn fixed_td_single_point_interval() {
        let c = SystemConfig::new(20, 10, 196, 1.0, 1.0).unwrap();
        let p = grid_argmax_fixed_td(150.0, &c, Receiver::Mrc, &GridSpec::default());
        assert!((p.alpha - 46.0 / 196.0).abs() < 1e-15);
    }

    #[test]
    fn huge_peak_pushes_td_to_corner() {
        let c = SystemConfig::new(20, 10, 196, 1.0, 1e6).unwrap();
        let p = grid_argmax(&c, Receiver::Mrc, &GridSpec::new(1e-2, 1.0, 1));
        assert_eq!(p.t_d, 186.0);
    }

    #[test]
    fn reported_points_are_feasible() {
        let c = SystemConfig::with_peak_ratio(20, 10, 196, 10.0, 1.02).unwrap();
        for rx in Receiver::ALL {
            let p = grid_argmax(&c, rx, &GridSpec::new(1e-3, 0.5, 2));
            assert!(c.is_feasible(p.alpha, p.t_d, 1e-12));
        }
    }
}
