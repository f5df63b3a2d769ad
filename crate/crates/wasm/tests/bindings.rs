use serde_json::Value;
use uplink_training::{db_to_linear, grid_argmax_fixed_td, GridSpec, Receiver, SystemConfig};
use uplink_training_wasm::{alpha_curve_json, ee_curve_json, optimize_point_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn alpha_curve_peaks_at_reported_optimum() {
    let v = parse(alpha_curve_json(20, 10, 196, -5.0, 1000.0, 186.0, "ZF", 2001).unwrap());
    let alpha = floats(&v["alpha"]);
    let rate = floats(&v["rate"]);
    assert_eq!(alpha.len(), 2001);
    assert_eq!((rate[0], rate[2000]), (0.0, 0.0));
    let star = v["alpha_star"].as_f64().unwrap();
    assert_eq!(v["clipped"], false);
    let best = rate.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(v["rate_star"].as_f64().unwrap() >= best);

    let rho = db_to_linear(-5.0);
    let cfg = SystemConfig::new(20, 10, 196, rho, 1000.0 * rho).unwrap();
    let grid = grid_argmax_fixed_td(186.0, &cfg, Receiver::Zf, &GridSpec::new(1e-5, 1.0, 3));
    assert!((star - grid.alpha).abs() < 1e-5);
}

#[test]
fn alpha_curve_reports_clipping() {
    let v = parse(alpha_curve_json(20, 10, 196, 0.0, 1.2, 186.0, "ZF", 11).unwrap());
    assert_eq!(v["clipped"], true);
    let interval = floats(&v["interval"]);
    assert!((v["alpha_star"].as_f64().unwrap() - interval[1]).abs() < 1e-15);
    assert!(v["alpha_unconstrained"].as_f64().unwrap() > interval[1]);
}

#[test]
fn optimize_point_beats_equal_power() {
    for rx in ["MRC", "ZF"] {
        let v = parse(optimize_point_json(20, 10, 196, -5.0, 1.2, rx).unwrap());
        assert_eq!(v["receiver"], rx);
        assert!(v["rate_bits"].as_f64().unwrap() >= v["equal_power_rate"].as_f64().unwrap());
        assert_eq!(v["case_label"], "PilotPeakLimited");
        let sum = v["T_tau_star"].as_f64().unwrap() + v["T_d_star"].as_f64().unwrap();
        assert!((sum - 196.0).abs() < 1e-9);
    }
}

#[test]
fn ee_curve_has_interior_peak() {
    let v = parse(ee_curve_json(20, 10, 196, 1.2, -20.0, 20.0, 41, "MRC").unwrap());
    assert_eq!(floats(&v["rho_db"]).len(), 41);
    for scheme in ["equal_power", "optimized", "power_limited"] {
        let ee = floats(&v["schemes"][scheme]["energy_efficiency"]);
        let peak = ee.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(peak > ee[0] && peak > ee[40], "{scheme}");
    }
}

#[test]
fn invalid_inputs_are_reported() {
    assert!(optimize_point_json(10, 10, 196, 0.0, 1.2, "MRC")
        .unwrap_err()
        .contains("M must exceed K"));
    assert!(optimize_point_json(20, 10, 196, 0.0, 1.2, "MMSE").is_err());
    assert!(optimize_point_json(20, 10, 196, 0.0, 0.5, "ZF").is_err());
    assert!(alpha_curve_json(20, 10, 196, 0.0, 1.2, 500.0, "ZF", 11).is_err());
    assert!(alpha_curve_json(20, 10, 196, 0.0, 1.2, 100.0, "ZF", 1).is_err());
    assert!(ee_curve_json(20, 10, 196, 1.2, 5.0, -5.0, 11, "ZF").is_err());
    assert!(ee_curve_json(20, 10, 196, 1.2, f64::NAN, 5.0, 11, "ZF").is_err());
}
