//! Braking-requirement arithmetic for lightweight vehicles.
//!
//! The high-speed test is run at a fraction of the vehicle's top speed and
//! must hold a minimum deceleration; the torque needed for that deceleration
//! at the wheel is split evenly over the braked wheels. Values are carried at
//! full precision; [`RequirementReport`] also exposes the rounded figures
//! quoted in the usual worked example (972 N·m, 243 N·m).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{
    Kilograms, KmPerHour, Metres, MetresPerSecondSquared, NewtonMetres, Rpm, Seconds,
};

/// Upper mass bound of the lightweight-vehicle class.
pub const LIGHTWEIGHT_MASS_LIMIT: Kilograms = Kilograms(3500.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpec {
    pub mass: Kilograms,
    pub wheel_effective_radius: Metres,
    pub max_speed: KmPerHour,
    pub braked_wheels: u32,
}

impl Default for VehicleSpec {
    fn default() -> Self {
        VehicleSpec {
            mass: Kilograms(1735.0),
            wheel_effective_radius: Metres(0.14),
            max_speed: KmPerHour(200.0),
            braked_wheels: 4,
        }
    }
}

/// Non-fatal findings from validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    HeavierThanLightweightClass { mass: Kilograms },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::HeavierThanLightweightClass { mass } => write!(
                f,
                "vehicle mass {mass} exceeds the {LIGHTWEIGHT_MASS_LIMIT} lightweight-vehicle limit"
            ),
        }
    }
}

impl VehicleSpec {
    pub fn validate(&self) -> Result<Vec<Warning>> {
        let m = self.mass.value();
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "vehicle mass must be positive, got {}",
                self.mass
            )));
        }
        if !(self.wheel_effective_radius.value() > 0.0
            && self.wheel_effective_radius.value().is_finite())
        {
            return Err(Error::InvalidInput(format!(
                "wheel effective radius must be positive, got {}",
                self.wheel_effective_radius
            )));
        }
        if !(self.max_speed.value() >= 0.0 && self.max_speed.value().is_finite()) {
            return Err(Error::InvalidInput(format!(
                "max speed must be non-negative, got {}",
                self.max_speed
            )));
        }
        if self.braked_wheels < 1 {
            return Err(Error::InvalidInput(
                "at least one wheel must be braked".into(),
            ));
        }
        let mut warnings = Vec::new();
        if m > LIGHTWEIGHT_MASS_LIMIT.value() {
            warnings.push(Warning::HeavierThanLightweightClass { mass: self.mass });
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RequirementSpec {
    pub min_deceleration: MetresPerSecondSquared,
    pub test_speed_fraction: f64,
    pub handover_speed: KmPerHour,
    /// Target the design search ranks against.
    pub per_wheel_torque: NewtonMetres,
    pub speed_range_rpm: (Rpm, Rpm),
}

impl Default for RequirementSpec {
    fn default() -> Self {
        RequirementSpec {
            min_deceleration: MetresPerSecondSquared(4.0),
            test_speed_fraction: 0.8,
            handover_speed: KmPerHour(20.0),
            per_wheel_torque: NewtonMetres(243.0),
            speed_range_rpm: (Rpm(1000.0), Rpm(8000.0)),
        }
    }
}

impl RequirementSpec {
    pub fn validate(&self) -> Result<()> {
        let f = self.test_speed_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "test speed fraction must lie in (0, 1], got {f}"
            )));
        }
        if !(self.min_deceleration.value() > 0.0 && self.min_deceleration.value().is_finite()) {
            return Err(Error::InvalidInput(format!(
                "minimum deceleration must be positive, got {}",
                self.min_deceleration
            )));
        }
        let (low, high) = self.speed_range_rpm;
        if !(low.value() < high.value()) {
            return Err(Error::InvalidInput(format!(
                "speed range must satisfy low < high, got [{low}, {high}]"
            )));
        }
        if !(self.per_wheel_torque.value() >= 0.0) {
            return Err(Error::InvalidInput(
                "per-wheel torque target must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Same requirement, targeting the per-wheel torque derived for `vehicle`.
    pub fn derived_for(mut self, vehicle: &VehicleSpec) -> Self {
        self.per_wheel_torque = per_wheel_torque(required_total_torque(vehicle, &self), vehicle);
        self
    }
}

/// `fraction × V_max`.
pub fn test_speed(vehicle: &VehicleSpec, req: &RequirementSpec) -> KmPerHour {
    KmPerHour(req.test_speed_fraction * vehicle.max_speed.value())
}

/// `m·a·r`, unrounded.
pub fn required_total_torque(vehicle: &VehicleSpec, req: &RequirementSpec) -> NewtonMetres {
    NewtonMetres(
        vehicle.mass.value()
            * req.min_deceleration.value()
            * vehicle.wheel_effective_radius.value(),
    )
}

pub fn per_wheel_torque(total: NewtonMetres, vehicle: &VehicleSpec) -> NewtonMetres {
    NewtonMetres(total.value() / f64::from(vehicle.braked_wheels))
}

/// Time to decelerate from `test_speed` to the handover speed.
pub fn handover_time(req: &RequirementSpec, test_speed: KmPerHour) -> Result<Seconds> {
    if !(test_speed.value() > req.handover_speed.value()) {
        return Err(Error::InvalidSpeeds {
            test_speed: test_speed.value(),
            handover_speed: req.handover_speed.value(),
        });
    }
    let delta = KmPerHour(test_speed.value() - req.handover_speed.value()).to_metres_per_second();
    Ok(Seconds(delta.value() / req.min_deceleration.value()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequirementReport {
    pub test_speed: KmPerHour,
    pub total_torque: NewtonMetres,
    pub per_wheel_torque: NewtonMetres,
    /// Total rounded to whole N·m.
    pub rounded_total_torque: NewtonMetres,
    /// Rounded total split over the braked wheels.
    pub rounded_per_wheel_torque: NewtonMetres,
    pub handover_time: Seconds,
    pub warnings: Vec<Warning>,
}

pub fn requirement_report(
    vehicle: &VehicleSpec,
    req: &RequirementSpec,
) -> Result<RequirementReport> {
    let warnings = vehicle.validate()?;
    req.validate()?;
    let speed = test_speed(vehicle, req);
    let total = required_total_torque(vehicle, req);
    let rounded_total = NewtonMetres(total.value().round());
    Ok(RequirementReport {
        test_speed: speed,
        total_torque: total,
        per_wheel_torque: per_wheel_torque(total, vehicle),
        rounded_total_torque: rounded_total,
        rounded_per_wheel_torque: per_wheel_torque(rounded_total, vehicle),
        handover_time: handover_time(req, speed)?,
        warnings,
    })
}

impl fmt::Display for RequirementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "test speed        {:.1} km/h", self.test_speed.value())?;
        writeln!(
            f,
            "total torque      {:.4} N·m (rounded {} N·m)",
            self.total_torque.value(),
            self.rounded_total_torque.value()
        )?;
        writeln!(
            f,
            "per-wheel torque  {:.4} N·m (rounded {} N·m)",
            self.per_wheel_torque.value(),
            self.rounded_per_wheel_torque.value()
        )?;
        writeln!(f, "handover time     {:.3} s", self.handover_time.value())?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}
