//! Run configuration: strict TOML with unit-suffixed values.
//!
//! ```toml
//! [geometry]
//! b = "30 mm"
//! w_m = "110 mm"
//!
//! [materials]
//! conductivity = "5.7e7 S/m"
//!
//! [grid]
//! b_step = "2 mm"
//! speeds = ["1000 rpm", "8000 rpm"]
//! ```
//!
//! Every absent field falls back to a default and the source of every
//! effective value is kept for the verbose echo.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use toml::Value;

use super::quantity::{parse_quantity, Dimension};
use crate::error::{Error, Result};
use crate::model::{
    BrakeGeometry, MagnetSpec, MaterialSpec, SpeedConvention, TorqueModel, Truncation, MU0,
    TABULATED_SIGMA,
};
use crate::regulations::{RequirementSpec, VehicleSpec};
use crate::search::{
    default_reference, GridRange, PublishedTorque, RadialMode, SweepGrid, DEFAULT_SPEEDS_RPM,
};
use crate::units::{Kilograms, KmPerHour, Metres, MetresPerSecondSquared, NewtonMetres, Rpm};

/// Allowed magnet thickness, metres.
pub const B_BOUNDS: (f64, f64) = (0.002, 0.040);
/// Allowed radial extrusion, metres.
pub const W_M_BOUNDS: (f64, f64) = (0.002, 0.110);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    User,
    /// Default taken from design table `n`.
    Table(u8),
    /// Default from the vehicle of the requirement example.
    RequirementExample,
    BuiltIn,
    Derived,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::User => f.write_str("user"),
            Source::Table(4) => f.write_str("Table 4 Solution 1 default"),
            Source::Table(n) => write!(f, "Table {n} default"),
            Source::RequirementExample => f.write_str("requirement example default"),
            Source::BuiltIn => f.write_str("built-in default"),
            Source::Derived => f.write_str("derived"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoLine {
    pub key: String,
    pub value: String,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `λ = 1`, or the configured `calibration.lambda`.
    pub model: TorqueModel,
    pub grid: SweepGrid,
    pub vehicle: VehicleSpec,
    pub requirement: RequirementSpec,
    pub calibration_reference: PublishedTorque,
    pub lambda: Option<f64>,
    pub convention: Option<SpeedConvention>,
    pub echo: Vec<EchoLine>,
}

impl Default for RunConfig {
    fn default() -> Self {
        load_config_str("", "<defaults>").expect("defaults are valid")
    }
}

impl RunConfig {
    /// One line per effective parameter with its provenance.
    pub fn echo_text(&self) -> String {
        let mut out = String::new();
        for line in &self.echo {
            out.push_str(&format!(
                "{:<32} {:<36} ({})\n",
                line.key, line.value, line.source
            ));
        }
        out
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    geometry: RawGeometry,
    magnets: RawMagnets,
    materials: RawMaterials,
    truncation: RawTruncation,
    grid: RawGrid,
    vehicle: RawVehicle,
    requirement: RawRequirement,
    calibration: RawCalibration,
    model: RawModel,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawGeometry {
    r2: Option<Value>,
    r3: Option<Value>,
    b: Option<Value>,
    w_m: Option<Value>,
    air_gap: Option<Value>,
    plate_thickness: Option<Value>,
    back_iron_thickness: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawMagnets {
    pole_pairs: Option<i64>,
    pole_arc_ratio: Option<f64>,
    remanence: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawMaterials {
    mu0: Option<Value>,
    conductivity: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawTruncation {
    n_max: Option<i64>,
    k_max: Option<i64>,
    band_tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawGrid {
    b_min: Option<Value>,
    b_max: Option<Value>,
    b_step: Option<Value>,
    w_m_min: Option<Value>,
    w_m_max: Option<Value>,
    w_m_step: Option<Value>,
    speeds: Option<Vec<Value>>,
    r1: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawVehicle {
    mass: Option<Value>,
    wheel_effective_radius: Option<Value>,
    max_speed: Option<Value>,
    braked_wheels: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawRequirement {
    min_deceleration: Option<Value>,
    test_speed_fraction: Option<f64>,
    handover_speed: Option<Value>,
    per_wheel_torque: Option<Value>,
    speed_min: Option<Value>,
    speed_max: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawCalibration {
    lambda: Option<f64>,
    reference_b: Option<Value>,
    reference_w_m: Option<Value>,
    reference_speed: Option<Value>,
    reference_torque: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawModel {
    speed_convention: Option<String>,
}

/// Plain decimal for moderate magnitudes, scientific notation otherwise.
fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn range_error(field: &str, message: impl Into<String>) -> Error {
    Error::Range {
        field: field.to_string(),
        message: message.into(),
    }
}

struct Loader {
    echo: Vec<EchoLine>,
}

impl Loader {
    fn record(&mut self, key: &str, value: String, source: Source) {
        self.echo.push(EchoLine {
            key: key.to_string(),
            value,
            source,
        });
    }

    fn quantity(
        &mut self,
        key: &str,
        raw: Option<&Value>,
        dim: Dimension,
        default: f64,
        source: Source,
    ) -> Result<f64> {
        let (value, source) = match raw {
            None => (default, source),
            Some(Value::String(text)) => (parse_quantity(key, text, dim)?, Source::User),
            Some(Value::Integer(_) | Value::Float(_)) => {
                return Err(Error::Unit {
                    field: key.to_string(),
                    message: format!(
                        "missing unit; write it as a string such as \"{} {}\"",
                        raw.unwrap(),
                        dim.example_unit()
                    ),
                })
            }
            Some(other) => {
                return Err(Error::Unit {
                    field: key.to_string(),
                    message: format!("expected a quantity string, found {}", other.type_str()),
                })
            }
        };
        self.record(
            key,
            format!("{} {}", format_number(value), dim.canonical_unit()),
            source,
        );
        Ok(value)
    }

    fn positive(
        &mut self,
        key: &str,
        raw: Option<&Value>,
        dim: Dimension,
        default: f64,
        source: Source,
    ) -> Result<f64> {
        let v = self.quantity(key, raw, dim, default, source)?;
        if !(v > 0.0) {
            return Err(range_error(
                key,
                format!("must be positive, got {v} {}", dim.canonical_unit()),
            ));
        }
        Ok(v)
    }

    fn bounded(
        &mut self,
        key: &str,
        raw: Option<&Value>,
        default: f64,
        source: Source,
        bounds: (f64, f64),
        table: &str,
    ) -> Result<f64> {
        let v = self.quantity(key, raw, Dimension::Length, default, source)?;
        if !(bounds.0 <= v && v <= bounds.1) {
            return Err(range_error(
                key,
                format!(
                    "{} mm lies outside the {table} range [{}, {}] mm",
                    format_number(v * 1e3),
                    format_number(bounds.0 * 1e3),
                    format_number(bounds.1 * 1e3)
                ),
            ));
        }
        Ok(v)
    }

    fn number(&mut self, key: &str, raw: Option<f64>, default: f64, source: Source) -> f64 {
        let (v, s) = raw.map_or((default, source), |v| (v, Source::User));
        self.record(key, format_number(v), s);
        v
    }

    fn count(&mut self, key: &str, raw: Option<i64>, default: u32, source: Source) -> Result<u32> {
        let (v, s) = raw.map_or((i64::from(default), source), |v| (v, Source::User));
        let v = u32::try_from(v)
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| range_error(key, format!("must be a positive integer, got {v}")))?;
        self.record(key, v.to_string(), s);
        Ok(v)
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("cannot read {}", path.display()), e))?;
    load_config_str(&text, &path.display().to_string())
}

/// Parses configuration text; `origin` labels parse errors.
pub fn load_config_str(text: &str, origin: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        Error::Parse {
            path: origin.to_string(),
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    build(raw)
}

fn build(raw: RawConfig) -> Result<RunConfig> {
    let mut l = Loader { echo: Vec::new() };
    let defaults = BrakeGeometry::table_defaults();
    let g = &raw.geometry;

    let b = l.bounded(
        "geometry.b",
        g.b.as_ref(),
        defaults.magnet_thickness,
        Source::Table(4),
        B_BOUNDS,
        "Table 1/Table 2",
    )?;
    let w_m = l.bounded(
        "geometry.w_m",
        g.w_m.as_ref(),
        defaults.radial_extrusion(),
        Source::Table(4),
        W_M_BOUNDS,
        "Table 1",
    )?;
    let r2 = l.positive(
        "geometry.r2",
        g.r2.as_ref(),
        Dimension::Length,
        defaults.r2,
        Source::Table(1),
    )?;
    let r3 = l.positive(
        "geometry.r3",
        g.r3.as_ref(),
        Dimension::Length,
        defaults.r3,
        Source::Table(1),
    )?;
    let r1 = r2 - w_m;
    l.record(
        "geometry.r1",
        format!("{} m", format_number(r1)),
        Source::Derived,
    );
    if !(r1 > 0.0) {
        return Err(range_error(
            "geometry.w_m",
            format!("w_m = {w_m} m leaves no inner radius below r2 = {r2} m"),
        ));
    }
    if r2 > r3 {
        return Err(range_error(
            "geometry.r2",
            format!("r2 = {r2} m exceeds the disc radius r3 = {r3} m"),
        ));
    }
    let air_gap = l.positive(
        "geometry.air_gap",
        g.air_gap.as_ref(),
        Dimension::Length,
        defaults.air_gap,
        Source::Table(2),
    )?;
    let plate_thickness = l.positive(
        "geometry.plate_thickness",
        g.plate_thickness.as_ref(),
        Dimension::Length,
        defaults.plate_thickness,
        Source::Table(2),
    )?;
    let back_iron_thickness = l.positive(
        "geometry.back_iron_thickness",
        g.back_iron_thickness.as_ref(),
        Dimension::Length,
        defaults.back_iron_thickness,
        Source::Table(2),
    )?;
    let geometry = BrakeGeometry {
        r1,
        r2,
        r3,
        magnet_thickness: b,
        air_gap,
        plate_thickness,
        back_iron_thickness,
    };

    let magnet_defaults = MagnetSpec::table_defaults();
    let pole_pairs = l.count(
        "magnets.pole_pairs",
        raw.magnets.pole_pairs,
        magnet_defaults.pole_pairs,
        Source::Table(2),
    )?;
    let pole_arc_ratio = l.number(
        "magnets.pole_arc_ratio",
        raw.magnets.pole_arc_ratio,
        magnet_defaults.pole_arc_ratio,
        Source::Table(2),
    );
    if !(pole_arc_ratio > 0.0 && pole_arc_ratio < 1.0) {
        return Err(range_error(
            "magnets.pole_arc_ratio",
            format!("must lie in (0, 1), got {pole_arc_ratio}"),
        ));
    }
    let remanence = l.quantity(
        "magnets.remanence",
        raw.magnets.remanence.as_ref(),
        Dimension::FluxDensity,
        magnet_defaults.remanence,
        Source::Table(3),
    )?;
    if !(remanence >= 0.0) {
        return Err(range_error(
            "magnets.remanence",
            format!("must be non-negative, got {remanence} T"),
        ));
    }

    let mu0 = l.positive(
        "materials.mu0",
        raw.materials.mu0.as_ref(),
        Dimension::Permeability,
        MU0,
        Source::Table(3),
    )?;
    let sigma = l.quantity(
        "materials.conductivity",
        raw.materials.conductivity.as_ref(),
        Dimension::Conductivity,
        TABULATED_SIGMA,
        Source::Table(3),
    )?;
    if !(sigma >= 0.0) {
        return Err(range_error(
            "materials.conductivity",
            format!("must be non-negative, got {sigma} S/m"),
        ));
    }

    let truncation_defaults = Truncation::default();
    let n_max = l.count(
        "truncation.n_max",
        raw.truncation.n_max,
        truncation_defaults.n_max,
        Source::BuiltIn,
    )?;
    let k_max = l.count(
        "truncation.k_max",
        raw.truncation.k_max,
        truncation_defaults.k_max,
        Source::BuiltIn,
    )?;
    let band_tolerance = l.number(
        "truncation.band_tolerance",
        raw.truncation.band_tolerance,
        truncation_defaults.band_tolerance,
        Source::BuiltIn,
    );
    if !(band_tolerance >= 0.0) {
        return Err(range_error(
            "truncation.band_tolerance",
            "must be non-negative",
        ));
    }

    let grid_defaults = SweepGrid::default();
    let rg = &raw.grid;
    let b_range = GridRange::new(
        l.bounded(
            "grid.b_min",
            rg.b_min.as_ref(),
            grid_defaults.b_range.min,
            Source::Table(1),
            B_BOUNDS,
            "Table 1/Table 2",
        )?,
        l.bounded(
            "grid.b_max",
            rg.b_max.as_ref(),
            grid_defaults.b_range.max,
            Source::Table(1),
            B_BOUNDS,
            "Table 1/Table 2",
        )?,
        l.positive(
            "grid.b_step",
            rg.b_step.as_ref(),
            Dimension::Length,
            grid_defaults.b_range.step,
            Source::BuiltIn,
        )?,
    );
    let wm_range = GridRange::new(
        l.bounded(
            "grid.w_m_min",
            rg.w_m_min.as_ref(),
            grid_defaults.wm_range.min,
            Source::Table(1),
            W_M_BOUNDS,
            "Table 1",
        )?,
        l.bounded(
            "grid.w_m_max",
            rg.w_m_max.as_ref(),
            grid_defaults.wm_range.max,
            Source::Table(1),
            W_M_BOUNDS,
            "Table 1",
        )?,
        l.positive(
            "grid.w_m_step",
            rg.w_m_step.as_ref(),
            Dimension::Length,
            grid_defaults.wm_range.step,
            Source::BuiltIn,
        )?,
    );
    for (name, r) in [("grid.b_min", b_range), ("grid.w_m_min", wm_range)] {
        if r.min > r.max {
            return Err(range_error(
                name,
                format!("minimum {} m exceeds maximum {} m", r.min, r.max),
            ));
        }
    }
    let speeds_rpm = match &rg.speeds {
        None => {
            let text = DEFAULT_SPEEDS_RPM
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            l.record("grid.speeds", format!("[{text}] rpm"), Source::BuiltIn);
            DEFAULT_SPEEDS_RPM.iter().copied().map(Rpm).collect()
        }
        Some(values) => {
            if values.is_empty() {
                return Err(range_error("grid.speeds", "speed list is empty"));
            }
            let mut speeds = Vec::with_capacity(values.len());
            for (i, v) in values.iter().enumerate() {
                let key = format!("grid.speeds[{i}]");
                let text = v.as_str().ok_or_else(|| Error::Unit {
                    field: key.clone(),
                    message: "expected a quantity string such as \"1000 rpm\"".into(),
                })?;
                speeds.push(Rpm(parse_quantity(&key, text, Dimension::ShaftSpeed)?));
            }
            let text = speeds
                .iter()
                .map(|s| format_number(s.value()))
                .collect::<Vec<_>>()
                .join(", ");
            l.record("grid.speeds", format!("[{text}] rpm"), Source::User);
            speeds
        }
    };
    let radial_mode = match &rg.r1 {
        None => RadialMode::FixedOuterRadius,
        Some(_) => RadialMode::FixedInnerRadius(l.positive(
            "grid.r1",
            rg.r1.as_ref(),
            Dimension::Length,
            0.0,
            Source::User,
        )?),
    };

    let vd = VehicleSpec::default();
    let rv = &raw.vehicle;
    let vehicle = VehicleSpec {
        mass: Kilograms(l.positive(
            "vehicle.mass",
            rv.mass.as_ref(),
            Dimension::Mass,
            vd.mass.value(),
            Source::RequirementExample,
        )?),
        wheel_effective_radius: Metres(l.positive(
            "vehicle.wheel_effective_radius",
            rv.wheel_effective_radius.as_ref(),
            Dimension::Length,
            vd.wheel_effective_radius.value(),
            Source::RequirementExample,
        )?),
        max_speed: KmPerHour(l.quantity(
            "vehicle.max_speed",
            rv.max_speed.as_ref(),
            Dimension::VehicleSpeed,
            vd.max_speed.value(),
            Source::RequirementExample,
        )?),
        braked_wheels: l.count(
            "vehicle.braked_wheels",
            rv.braked_wheels,
            vd.braked_wheels,
            Source::RequirementExample,
        )?,
    };
    if vehicle.max_speed.value() < 0.0 {
        return Err(range_error("vehicle.max_speed", "must be non-negative"));
    }

    let rd = RequirementSpec::default();
    let rr = &raw.requirement;
    let requirement = RequirementSpec {
        min_deceleration: MetresPerSecondSquared(l.positive(
            "requirement.min_deceleration",
            rr.min_deceleration.as_ref(),
            Dimension::Acceleration,
            rd.min_deceleration.value(),
            Source::RequirementExample,
        )?),
        test_speed_fraction: l.number(
            "requirement.test_speed_fraction",
            rr.test_speed_fraction,
            rd.test_speed_fraction,
            Source::RequirementExample,
        ),
        handover_speed: KmPerHour(l.quantity(
            "requirement.handover_speed",
            rr.handover_speed.as_ref(),
            Dimension::VehicleSpeed,
            rd.handover_speed.value(),
            Source::RequirementExample,
        )?),
        per_wheel_torque: NewtonMetres(l.quantity(
            "requirement.per_wheel_torque",
            rr.per_wheel_torque.as_ref(),
            Dimension::Torque,
            rd.per_wheel_torque.value(),
            Source::Table(1),
        )?),
        speed_range_rpm: (
            Rpm(l.quantity(
                "requirement.speed_min",
                rr.speed_min.as_ref(),
                Dimension::ShaftSpeed,
                rd.speed_range_rpm.0.value(),
                Source::Table(1),
            )?),
            Rpm(l.quantity(
                "requirement.speed_max",
                rr.speed_max.as_ref(),
                Dimension::ShaftSpeed,
                rd.speed_range_rpm.1.value(),
                Source::Table(1),
            )?),
        ),
    };
    let f = requirement.test_speed_fraction;
    if !(f > 0.0 && f <= 1.0) {
        return Err(range_error(
            "requirement.test_speed_fraction",
            format!("must lie in (0, 1], got {f}"),
        ));
    }
    if !(requirement.speed_range_rpm.0.value() < requirement.speed_range_rpm.1.value()) {
        return Err(range_error(
            "requirement.speed_min",
            "must be below requirement.speed_max",
        ));
    }
    if requirement.per_wheel_torque.value() < 0.0 {
        return Err(range_error(
            "requirement.per_wheel_torque",
            "must be non-negative",
        ));
    }

    let rc = &raw.calibration;
    let lambda = rc.lambda;
    match lambda {
        Some(v) if !(v > 0.0 && v.is_finite()) => {
            return Err(range_error(
                "calibration.lambda",
                format!("must be positive, got {v}"),
            ));
        }
        Some(v) => l.record("calibration.lambda", format_number(v), Source::User),
        None => {}
    }
    let reference_default = default_reference();
    let calibration_reference = PublishedTorque {
        solution: reference_default.solution,
        b: l.bounded(
            "calibration.reference_b",
            rc.reference_b.as_ref(),
            reference_default.b,
            Source::Table(4),
            B_BOUNDS,
            "Table 1/Table 2",
        )?,
        w_m: l.bounded(
            "calibration.reference_w_m",
            rc.reference_w_m.as_ref(),
            reference_default.w_m,
            Source::Table(4),
            W_M_BOUNDS,
            "Table 1",
        )?,
        speed: Rpm(l.quantity(
            "calibration.reference_speed",
            rc.reference_speed.as_ref(),
            Dimension::ShaftSpeed,
            reference_default.speed.value(),
            Source::Table(4),
        )?),
        torque: l.quantity(
            "calibration.reference_torque",
            rc.reference_torque.as_ref(),
            Dimension::Torque,
            reference_default.torque,
            Source::Table(4),
        )?,
    };

    let convention = match &raw.model.speed_convention {
        None => None,
        Some(text) => {
            let c: SpeedConvention = text.parse().map_err(|_| Error::Unit {
                field: "model.speed_convention".into(),
                message: format!("expected `rad_s` or `rpm`, got {text:?}"),
            })?;
            l.record(
                "model.speed_convention",
                c.as_str().to_string(),
                Source::User,
            );
            Some(c)
        }
    };

    let model = TorqueModel {
        geometry,
        magnets: MagnetSpec {
            pole_pairs,
            pole_arc_ratio,
            remanence,
        },
        materials: MaterialSpec { mu0, sigma },
        truncation: Truncation {
            n_max,
            k_max,
            band_tolerance,
        },
        lambda_scale: lambda.unwrap_or(1.0),
        calibration: None,
    };
    model.validate()?;

    Ok(RunConfig {
        model,
        grid: SweepGrid {
            b_range,
            wm_range,
            speeds_rpm,
            radial_mode,
        },
        vehicle,
        requirement,
        calibration_reference,
        lambda,
        convention,
        echo: l.echo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_table_defaults() {
        let c = load_config_str("", "empty.toml").unwrap();
        assert_eq!(c.model, TorqueModel::table_defaults());
        assert_eq!(c.grid, SweepGrid::default());
        assert_eq!(c.vehicle, VehicleSpec::default());
        assert_eq!(c.requirement, RequirementSpec::default());
        assert_eq!(c.lambda, None);
        assert_eq!(c.convention, None);
        assert!(c.echo.iter().all(|e| e.source != Source::User));
    }

    #[test]
    fn solution_one_geometry() {
        let c =
            load_config_str("[geometry]\nb = \"30 mm\"\nw_m = \"110 mm\"\n", "s1.toml").unwrap();
        assert_eq!(c.model.geometry.magnet_thickness, 0.03);
        assert_eq!(c.model.geometry, BrakeGeometry::table_defaults());
        assert_eq!(
            c.echo
                .iter()
                .find(|e| e.key == "geometry.b")
                .unwrap()
                .source,
            Source::User
        );
    }

    #[test]
    fn negative_thickness_is_range_error() {
        let err = load_config_str("[geometry]\nb = \"-1 mm\"\n", "x.toml").unwrap_err();
        assert_eq!(err.code(), "RANGE_ERROR");
        assert!(err.to_string().contains("[2, 40] mm"), "{err}");
        let err = load_config_str("[geometry]\nw_m = \"111 mm\"\n", "x.toml").unwrap_err();
        assert!(err.to_string().contains("Table 1"));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = load_config_str("[geometry]\nb = \"30 mm\"\nbogus = 1\n", "x.toml").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 1)),
            other => panic!("{other:?}"),
        }
        let err = load_config_str("[geometry\n", "x.toml").unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");
    }

    #[test]
    fn unit_errors() {
        let err = load_config_str("[geometry]\nb = 30\n", "x.toml").unwrap_err();
        assert_eq!(err.code(), "UNIT_ERROR");
        assert!(err.to_string().contains("geometry.b"));
        let err = load_config_str("[materials]\nconductivity = \"5 T\"\n", "x.toml").unwrap_err();
        assert!(err.to_string().contains("materials.conductivity"));
        let err = load_config_str("[model]\nspeed_convention = \"hz\"\n", "x.toml").unwrap_err();
        assert_eq!(err.code(), "UNIT_ERROR");
    }

    #[test]
    fn user_values_are_converted_once() {
        let text = r#"
[materials]
conductivity = "5.7e7 S/m"
[grid]
b_min = "30 mm"
b_max = "30 mm"
w_m_min = "110 mm"
w_m_max = "110 mm"
speeds = ["1000 rpm", "8000 rpm"]
[calibration]
lambda = 2.5
[model]
speed_convention = "rpm"
"#;
        let c = load_config_str(text, "x.toml").unwrap();
        assert_eq!(c.model.materials.sigma, 5.7e7);
        assert_eq!(c.grid.cell_count(), 1);
        assert_eq!(c.grid.speeds_rpm, vec![Rpm(1000.0), Rpm(8000.0)]);
        assert_eq!(c.model.lambda_scale, 2.5);
        assert_eq!(c.convention, Some(SpeedConvention::Rpm));
    }
}
