use uplink_training::sim::{pilot_matrix, simulate_training};
use uplink_training::{
    empirical_rate, empirical_sinr, mmse_moments, rate_at, sinr_at, MonteCarloSpec, PowerSplit, Receiver, SystemConfig,
};

/// Operating point with `T_tau = K = 10` and per-user pilot energy `energy`.
fn point_with_energy(energy: f64, rho: f64, peak_ratio: f64) -> (SystemConfig, PowerSplit) {
    let cfg = SystemConfig::new(20, 10, 196, rho, peak_ratio * rho).unwrap();
    let alpha = energy / cfg.block_energy();
    let split = PowerSplit::new(alpha, 186.0, &cfg).unwrap();
    (cfg, split)
}

#[test]
fn estimate_variance_at_unit_energy() {
    let (cfg, split) = point_with_energy(1.0, 0.1, 1.2);
    // 5000 trials x 20 x 10 entries = 10^6 samples.
    let m = mmse_moments(&split, &cfg, &MonteCarloSpec::new(5000, 11)).unwrap();
    assert_eq!(m.samples, 1_000_000);
    assert!((m.estimate_var - 0.5).abs() <= 0.005, "{m:?}");
    assert!((m.error_var - 0.5).abs() <= 0.005, "{m:?}");
    assert!(m.cross.0.abs() < 4.0 * m.cross_se.0 + 1e-3);
    assert!(m.cross.1.abs() < 4.0 * m.cross_se.1 + 1e-3);
}

#[test]
fn error_vanishes_at_high_training_energy() {
    let (cfg, split) = point_with_energy(1e6, 1e4, 20.0);
    let m = mmse_moments(&split, &cfg, &MonteCarloSpec::new(500, 3)).unwrap();
    assert!(m.error_var <= 2e-6, "{m:?}");
    assert!((m.estimate_var - 1.0).abs() < 0.02);
}

#[test]
fn estimate_plus_error_is_channel() {
    let (cfg, split) = point_with_energy(2.5, 0.1, 2.0);
    for r in simulate_training(&split, &cfg, &MonteCarloSpec::new(5, 4)).unwrap() {
        let diff = &r.h - &r.h_hat - &r.error;
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
        assert_eq!(r.h.shape(), (20, 10));
    }
}

#[test]
fn longer_pilots_stay_orthonormal() {
    let p = pilot_matrix(3, 7);
    assert_eq!(p.shape(), (3, 7));
    let gram = &p * p.adjoint();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((gram[(i, j)].re - want).abs() < 1e-12 && gram[(i, j)].im.abs() < 1e-12);
        }
    }
}

#[test]
fn empirical_sinr_matches_closed_form() {
    let rho = 10f64.powf(-0.5);
    let cfg = SystemConfig::new(20, 10, 196, rho, 1.2 * rho).unwrap();
    let split = PowerSplit::new(10.0 / 196.0, 186.0, &cfg).unwrap();
    let spec = MonteCarloSpec::new(4000, 21);
    for rx in Receiver::ALL {
        let analytic = sinr_at(split.alpha(), split.t_d(), &cfg, rx);
        let mc = empirical_sinr(&split, &cfg, rx, &spec).unwrap();
        let z = (mc.sinr - analytic) / mc.std_error;
        assert!(z.abs() < 4.0, "{rx}: mc {mc:?} analytic {analytic}");
        let r = empirical_rate(&split, &cfg, rx, &spec).unwrap();
        assert!(r.rate >= rate_at(split.alpha(), split.t_d(), &cfg, rx) - 2.0 * r.std_error - 1e-3);
    }
}

#[test]
fn drawn_symbols_agree_with_expectation() {
    let rho = 1.0;
    let cfg = SystemConfig::new(12, 4, 40, rho, 1.5 * rho).unwrap();
    let split = PowerSplit::new(0.2, 36.0, &cfg).unwrap();
    for rx in Receiver::ALL {
        let exact = empirical_sinr(&split, &cfg, rx, &MonteCarloSpec::new(2000, 9)).unwrap();
        let drawn = MonteCarloSpec {
            symbols_per_trial: 200,
            ..MonteCarloSpec::new(2000, 9)
        };
        let drawn = empirical_sinr(&split, &cfg, rx, &drawn).unwrap();
        let rel = (drawn.sinr - exact.sinr).abs() / exact.sinr;
        assert!(rel < 0.05, "{rx}: {exact:?} vs {drawn:?}");
    }
}

#[test]
fn perfect_csi_limit_for_zf() {
    // 99% of the energy on pilots: training energy ~1.9e6 against K rho_d ~1e3.
    let (cfg, split) = point_with_energy(0.99 * 1.96e6, 1e4, 20.0);
    assert!(split.training_energy() > 1e3 * cfg.k() as f64 * split.rho_d());
    let mc = empirical_sinr(&split, &cfg, Receiver::Zf, &MonteCarloSpec::new(2000, 5)).unwrap();
    // With H_hat -> H the ZF SINR tends to rho_d (M - K).
    let ideal = split.rho_d() * (cfg.m() - cfg.k()) as f64;
    assert!((mc.sinr - ideal).abs() / ideal < 0.01, "{mc:?} vs {ideal}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let (cfg, split) = point_with_energy(3.0, 0.1, 2.0);
    let spec = MonteCarloSpec::new(300, 77);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| empirical_sinr(&split, &cfg, Receiver::Mrc, &spec).unwrap())
    };
    assert_eq!(run(1), run(4));
}
