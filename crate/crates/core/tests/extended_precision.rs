#![allow(clippy::excessive_precision)]

//! Values frozen from `tests/oracles/extended_precision.py` (mpmath, 50 digits,
//! unscaled hyperbolic definitions).

use ecbrake::model::{self, OperatingPoint, SpeedConvention, TorqueModel};
use ecbrake::regulations::{self, RequirementSpec, VehicleSpec};
use ecbrake::search::{cell_model, RadialMode};
use ecbrake::units::{KmPerHour, Rpm};

fn convention(name: &str) -> SpeedConvention {
    name.parse().unwrap()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

const REFLECTIONS: [(u32, u32, f64, &str, f64, f64); 5] = [
    (
        1,
        1,
        1000.0,
        "rad_s",
        -0.19089458579621569029,
        -0.020754640002128417895,
    ),
    (
        3,
        5,
        8000.0,
        "rad_s",
        -0.00003139798854811175983,
        -1.3578725152967043285e-6,
    ),
    (
        5,
        3,
        4000.0,
        "rpm",
        -0.0012355550989287545261,
        -0.000026256974314481512325,
    ),
    (
        29,
        29,
        8000.0,
        "rad_s",
        -1.467162839589078414e-28,
        -4.925603492735131911e-31,
    ),
    (1, 1, 0.0, "rad_s", -0.039488880596220043704, 0.0),
];

const MAGNETISATION: [(u32, u32, f64); 3] = [
    (1, 1, 977562.67131045539564),
    (3, 5, 19374.511485830141249),
    (2, 3, 145295.78028149254747),
];

const TORQUES: [(f64, f64, f64, f64, &str, f64); 7] = [
    (0.03, 0.11, 57e7, 1000.0, "rad_s", 173.18132820767525975),
    (0.03, 0.11, 57e7, 8000.0, "rad_s", 58.681699601814649922),
    (0.03, 0.11, 57e7, 8000.0, "rpm", 20.6190685300884779),
    (0.04, 0.11, 57e7, 1000.0, "rad_s", 175.93487199603395265),
    (0.03, 0.11, 5.7e7, 1000.0, "rad_s", 510.41574669115952865),
    (0.002, 0.002, 57e7, 8000.0, "rad_s", 0.35159148235053112784),
    (0.04, 0.11, 57e7, 2000.0, "rpm", 40.496699427419182511),
];

#[test]
fn reflection_coefficients_match_extended_precision() {
    let m = TorqueModel::table_defaults();
    for (n, k, rpm, conv, re, im) in REFLECTIONS {
        let op = OperatingPoint::new(Rpm(rpm), convention(conv));
        let r = model::reflection_coefficient(n, k, &m, &op).unwrap();
        let expected = num_complex::Complex64::new(re, im);
        let err = (r - expected).norm() / expected.norm();
        assert!(
            err < 1e-12,
            "({n},{k}) {rpm} {conv}: {r} vs {expected}, rel {err:e}"
        );
    }
}

#[test]
fn magnetisation_matches_extended_precision() {
    let m = TorqueModel::table_defaults();
    for (n, k, expected) in MAGNETISATION {
        let v = model::magnetization_coefficient(n, k, &m);
        assert!(rel(v, expected) < 1e-13, "({n},{k}) {v} vs {expected}");
    }
}

#[test]
fn torques_match_extended_precision() {
    for (b, w_m, sigma, rpm, conv, expected) in TORQUES {
        let mut m = cell_model(
            &TorqueModel::table_defaults(),
            b,
            w_m,
            RadialMode::FixedOuterRadius,
        );
        m.materials.sigma = sigma;
        let t = model::torque(&m, &OperatingPoint::new(Rpm(rpm), convention(conv))).unwrap();
        assert!(
            rel(t, expected) < 1e-11,
            "b={b} w_m={w_m} sigma={sigma} {rpm} {conv}: {t} vs {expected}"
        );
    }
}

#[test]
fn regulation_values_match_exact_decimals() {
    let vehicle = VehicleSpec::default();
    let req = RequirementSpec::default();
    let total = regulations::required_total_torque(&vehicle, &req).value();
    assert!(rel(total, 971.6) <= f64::EPSILON);
    let per_wheel =
        regulations::per_wheel_torque(regulations::required_total_torque(&vehicle, &req), &vehicle)
            .value();
    assert!(rel(per_wheel, 242.9) <= f64::EPSILON);
    let t = regulations::handover_time(&req, KmPerHour(160.0))
        .unwrap()
        .value();
    assert!(rel(t, 9.7222222222222222222) <= f64::EPSILON);
}
