//! Monte Carlo link-level simulation of pilot training, MMSE estimation and
//! MRC / ZF combining, used to check the closed-form SINR expressions.
//!
//! Each trial draws its randomness from its own ChaCha stream keyed by
//! `(seed, trial)`, so results do not depend on how trials are scheduled.

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{PowerSplit, Receiver, SystemConfig};

type CMat = DMatrix<Complex64>;

const BOOTSTRAP_RESAMPLES: usize = 200;
/// Training lengths within this distance below `K` are accepted as `K`.
const PILOT_LEN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloSpec {
    pub trials: usize,
    pub seed: u64,
    /// Data vectors drawn per channel realization. With 0 the expectation
    /// over symbols and noise is taken in closed form given the channel.
    pub symbols_per_trial: usize,
}

impl MonteCarloSpec {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            symbols_per_trial: 0,
        }
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::NoTrials);
        }
        Ok(())
    }
}

/// One channel draw with its MMSE estimate and the estimation error.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub h: CMat,
    pub h_hat: CMat,
    pub error: CMat,
}

fn trial_rng(seed: u64, trial: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((attempt << 40) | trial);
    rng
}

fn cn(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn cn_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    DMatrix::from_fn(rows, cols, |_, _| cn(rng))
}

/// First `k` rows of the normalized `len`-point DFT matrix; rows are orthonormal.
pub fn pilot_matrix(k: usize, len: usize) -> CMat {
    let scale = 1.0 / (len as f64).sqrt();
    DMatrix::from_fn(k, len, |r, c| {
        let phase = -2.0 * PI * ((r * c) % len) as f64 / len as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// Generator of training-phase realizations for one operating point.
#[derive(Debug, Clone)]
pub struct TrainingSim {
    m: usize,
    k: usize,
    energy: f64,
    pilots: CMat,
    seed: u64,
}

impl TrainingSim {
    pub fn new(split: &PowerSplit, cfg: &SystemConfig, seed: u64) -> Result<Self> {
        let k = cfg.k();
        let t_tau = split.t_tau();
        if t_tau < k as f64 - PILOT_LEN_TOL {
            return Err(Error::TrainingTooShort { t_tau, k });
        }
        // Only the K orthonormal pilot rows matter; a fractional length is rounded.
        let len = (t_tau.round() as usize).max(k);
        Ok(Self {
            m: cfg.m(),
            k,
            energy: split.training_energy(),
            pilots: pilot_matrix(k, len),
            seed,
        })
    }

    pub fn pilots(&self) -> &CMat {
        &self.pilots
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> ChannelRealization {
        let h = cn_matrix(self.m, self.k, rng);
        let noise = cn_matrix(self.m, self.pilots.ncols(), rng);
        let amp = self.energy.sqrt();
        let y = &h * &self.pilots * Complex64::from(amp) + noise;
        let h_hat = y * self.pilots.adjoint() * Complex64::from(amp / (self.energy + 1.0));
        let error = &h - &h_hat;
        ChannelRealization { h, h_hat, error }
    }

    /// Realization for `trial`; the same index always yields the same draw.
    pub fn realization(&self, trial: u64) -> ChannelRealization {
        self.draw(&mut trial_rng(self.seed, trial, 0))
    }
}

/// Stream of training realizations `0..spec.trials`.
pub fn simulate_training(
    split: &PowerSplit,
    cfg: &SystemConfig,
    spec: &MonteCarloSpec,
) -> Result<impl Iterator<Item = ChannelRealization>> {
    spec.check()?;
    let sim = TrainingSim::new(split, cfg, spec.seed)?;
    Ok((0..spec.trials as u64).map(move |i| sim.realization(i)))
}

/// Neumaier-compensated sum.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

fn std_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mu = mean(values);
    let var = compensated_sum(values.iter().map(|v| (v - mu).powi(2))) / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Sample moments of the MMSE estimate and its error over all entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MmseMoments {
    pub estimate_var: f64,
    pub estimate_var_se: f64,
    pub error_var: f64,
    pub error_var_se: f64,
    /// Real and imaginary parts of the mean of `h_hat * conj(error)`.
    pub cross: (f64, f64),
    pub cross_se: (f64, f64),
    pub samples: usize,
}

pub fn mmse_moments(split: &PowerSplit, cfg: &SystemConfig, spec: &MonteCarloSpec) -> Result<MmseMoments> {
    spec.check()?;
    let sim = TrainingSim::new(split, cfg, spec.seed)?;
    let per_trial: Vec<[f64; 4]> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|i| {
            let r = sim.realization(i);
            let n = r.h_hat.len() as f64;
            let est = r.h_hat.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
            let err = r.error.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
            let cross = r
                .h_hat
                .iter()
                .zip(r.error.iter())
                .map(|(a, b)| a * b.conj())
                .sum::<Complex64>()
                / n;
            [est, err, cross.re, cross.im]
        })
        .collect();
    let column = |j: usize| per_trial.iter().map(|v| v[j]).collect::<Vec<f64>>();
    let (est, err, re, im) = (column(0), column(1), column(2), column(3));
    Ok(MmseMoments {
        estimate_var: mean(&est),
        estimate_var_se: std_error(&est),
        error_var: mean(&err),
        error_var_se: std_error(&err),
        cross: (mean(&re), mean(&im)),
        cross_se: (std_error(&re), std_error(&im)),
        samples: spec.trials * cfg.m() * cfg.k(),
    })
}

/// Monte Carlo estimate of the effective SINR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalSinr {
    /// `1 / E[residual / desired]`, averaged over trials and users.
    pub sinr: f64,
    /// Bootstrap standard error of `sinr`.
    pub std_error: f64,
    /// Trial-averaged desired power over trial-averaged residual power.
    pub ratio_of_means: f64,
    /// ZF realizations redrawn because the Gram matrix was singular.
    pub resampled: usize,
}

#[derive(Debug, Clone, Copy)]
struct TrialPowers {
    inv_sinr: f64,
    desired: f64,
    residual: f64,
    resampled: usize,
}

/// Per-user desired and residual powers for one realization.
fn user_powers(
    r: &ChannelRealization,
    g: &CMat,
    rho_d: f64,
    symbols: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<f64>) {
    let k = r.h_hat.ncols();
    let gain = g * &r.h_hat;
    let leak = g * &r.error;
    if symbols == 0 {
        let desired = (0..k).map(|u| rho_d * gain[(u, u)].norm_sqr()).collect();
        let residual = (0..k)
            .map(|u| {
                let inter: f64 = (0..k).filter(|&j| j != u).map(|j| gain[(u, j)].norm_sqr()).sum();
                let err: f64 = (0..k).map(|j| leak[(u, j)].norm_sqr()).sum();
                let noise: f64 = g.row(u).iter().map(|z| z.norm_sqr()).sum();
                rho_d * (inter + err) + noise
            })
            .collect();
        return (desired, residual);
    }
    let amp = Complex64::from(rho_d.sqrt());
    let mix = (&gain + &leak) * amp;
    let mut desired = vec![0.0; k];
    let mut residual = vec![0.0; k];
    for _ in 0..symbols {
        let x = cn_matrix(k, 1, rng);
        let n = cn_matrix(g.ncols(), 1, rng);
        let x_hat = &mix * &x + g * n;
        for u in 0..k {
            let wanted = amp * gain[(u, u)] * x[u];
            desired[u] += wanted.norm_sqr();
            residual[u] += (x_hat[u] - wanted).norm_sqr();
        }
    }
    (desired, residual)
}

fn combiner(rx: Receiver, h_hat: &CMat) -> Option<CMat> {
    match rx {
        Receiver::Mrc => Some(h_hat.adjoint()),
        // The 1/sqrt(rho_d) factor scales signal and residual alike and is omitted.
        Receiver::Zf => {
            let gram = h_hat.adjoint() * h_hat;
            let chol = gram.cholesky()?;
            Some(chol.solve(&h_hat.adjoint()))
        }
    }
}

const MAX_RESAMPLES: u64 = 64;

fn run_trial(sim: &TrainingSim, rx: Receiver, rho_d: f64, symbols: usize, trial: u64) -> TrialPowers {
    let mut attempt = 0;
    loop {
        let mut rng = trial_rng(sim.seed, trial, attempt);
        let r = sim.draw(&mut rng);
        let Some(g) = combiner(rx, &r.h_hat).filter(|g| g.iter().all(|z| z.is_finite())) else {
            attempt += 1;
            assert!(
                attempt < MAX_RESAMPLES,
                "estimated channel is persistently rank deficient"
            );
            continue;
        };
        let (desired, residual) = user_powers(&r, &g, rho_d, symbols, &mut rng);
        let k = desired.len() as f64;
        let inv_sinr = desired.iter().zip(&residual).map(|(d, q)| q / d).sum::<f64>() / k;
        return TrialPowers {
            inv_sinr,
            desired: desired.iter().sum::<f64>() / k,
            residual: residual.iter().sum::<f64>() / k,
            resampled: attempt as usize,
        };
    }
}

fn bootstrap_se(inv: &[f64], seed: u64) -> f64 {
    let n = inv.len();
    if n < 2 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    rng.set_stream(u64::MAX);
    let stats: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let s = compensated_sum((0..n).map(|_| inv[rng.gen_range(0..n)]));
            n as f64 / s
        })
        .collect();
    let mu = mean(&stats);
    (compensated_sum(stats.iter().map(|v| (v - mu).powi(2))) / (stats.len() - 1) as f64).sqrt()
}

/// Empirical effective SINR of `rx` at the given operating point.
pub fn empirical_sinr(
    split: &PowerSplit,
    cfg: &SystemConfig,
    rx: Receiver,
    spec: &MonteCarloSpec,
) -> Result<EmpiricalSinr> {
    spec.check()?;
    let sim = TrainingSim::new(split, cfg, spec.seed)?;
    let rho_d = split.rho_d();
    if rho_d == 0.0 || split.training_energy() == 0.0 {
        return Ok(EmpiricalSinr {
            sinr: 0.0,
            std_error: 0.0,
            ratio_of_means: 0.0,
            resampled: 0,
        });
    }
    let trials: Vec<TrialPowers> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(&sim, rx, rho_d, spec.symbols_per_trial, i))
        .collect();
    let inv: Vec<f64> = trials.iter().map(|t| t.inv_sinr).collect();
    let desired = compensated_sum(trials.iter().map(|t| t.desired));
    let residual = compensated_sum(trials.iter().map(|t| t.residual));
    Ok(EmpiricalSinr {
        sinr: 1.0 / mean(&inv),
        std_error: bootstrap_se(&inv, spec.seed),
        ratio_of_means: desired / residual,
        resampled: trials.iter().map(|t| t.resampled).sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalRate {
    pub rate: f64,
    pub std_error: f64,
    pub sinr: EmpiricalSinr,
}

/// `(T_d / T) K log2(1 + SINR)` from the empirical SINR; the standard error
/// is carried over by the delta method.
pub fn empirical_rate(
    split: &PowerSplit,
    cfg: &SystemConfig,
    rx: Receiver,
    spec: &MonteCarloSpec,
) -> Result<EmpiricalRate> {
    let sinr = empirical_sinr(split, cfg, rx, spec)?;
    let scale = split.t_d() / cfg.t() as f64 * cfg.k() as f64 / LN_2;
    Ok(EmpiricalRate {
        rate: scale * sinr.sinr.ln_1p(),
        std_error: scale * sinr.std_error / (1.0 + sinr.sinr),
        sinr,
    })
}
