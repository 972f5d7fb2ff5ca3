//! Unit-tagged scalar quantities.
//!
//! Internal computation is strict SI. The newtypes here exist so that a speed
//! in km/h, a shaft speed in rpm and an angular speed in rad/s can never be
//! mixed up silently; every conversion is an explicit method call.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! quantity {
    ($(#[$meta:meta])* $name:ident, $unit:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub f64);

        impl $name {
            pub const UNIT: &'static str = $unit;

            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)?;
                write!(f, " {}", $unit)
            }
        }

        impl std::ops::Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self(-self.0)
            }
        }
    };
}

quantity!(
    /// Shaft (slip) speed in revolutions per minute.
    Rpm,
    "rpm"
);
quantity!(
    /// Angular speed in radians per second.
    RadPerSec,
    "rad/s"
);
quantity!(
    /// Vehicle speed in kilometres per hour.
    KmPerHour,
    "km/h"
);
quantity!(MetresPerSecond, "m/s");
quantity!(MetresPerSecondSquared, "m/s^2");
quantity!(Kilograms, "kg");
quantity!(Metres, "m");
quantity!(NewtonMetres, "N·m");
quantity!(Seconds, "s");
quantity!(Watts, "W");

impl Rpm {
    /// ω = 2π·rpm/60.
    pub fn to_rad_per_sec(self) -> RadPerSec {
        RadPerSec(self.0 * (2.0 * PI) / 60.0)
    }
}

impl RadPerSec {
    pub fn to_rpm(self) -> Rpm {
        Rpm(self.0 * 60.0 / (2.0 * PI))
    }
}

impl KmPerHour {
    pub fn to_metres_per_second(self) -> MetresPerSecond {
        MetresPerSecond(self.0 / 3.6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rpm_conversion() {
        assert!((Rpm(60.0).to_rad_per_sec().value() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(Rpm(0.0).to_rad_per_sec().value(), 0.0);
        let back = Rpm(8000.0).to_rad_per_sec().to_rpm().value();
        assert!((back - 8000.0).abs() < 1e-9);
    }

    #[test]
    fn kmh_conversion() {
        assert_eq!(KmPerHour(36.0).to_metres_per_second().value(), 10.0);
    }

    #[test]
    fn display_carries_unit() {
        assert_eq!(KmPerHour(160.0).to_string(), "160 km/h");
        assert_eq!(NewtonMetres(243.0).to_string(), "243 N·m");
    }
}
