//! Unit-suffixed numbers such as `"30 mm"` or `"57e7 S/m"`.

use crate::error::{Error, Result};

/// Physical dimension of a configuration value and its accepted units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    ShaftSpeed,
    FluxDensity,
    Conductivity,
    Permeability,
    Mass,
    VehicleSpeed,
    Acceleration,
    Torque,
}

impl Dimension {
    /// `(unit, factor to SI)`.
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Length => &[
                ("m", 1.0),
                ("cm", 1e-2),
                ("mm", 1e-3),
                ("um", 1e-6),
                ("µm", 1e-6),
            ],
            Dimension::ShaftSpeed => &[("rpm", 1.0)],
            Dimension::FluxDensity => &[("T", 1.0), ("mT", 1e-3)],
            Dimension::Conductivity => &[("S/m", 1.0), ("MS/m", 1e6)],
            Dimension::Permeability => &[("H/m", 1.0)],
            Dimension::Mass => &[("kg", 1.0), ("t", 1e3)],
            Dimension::VehicleSpeed => &[("km/h", 1.0)],
            Dimension::Acceleration => &[("m/s^2", 1.0), ("m/s²", 1.0)],
            Dimension::Torque => &[
                ("N·m", 1.0),
                ("N*m", 1.0),
                ("N m", 1.0),
                ("Nm", 1.0),
                ("kN·m", 1e3),
            ],
        }
    }

    /// The unit values are reported in.
    pub fn canonical_unit(self) -> &'static str {
        self.units()[0].0
    }

    /// The unit suggested in error messages.
    pub fn example_unit(self) -> &'static str {
        match self {
            Dimension::Length => "mm",
            other => other.canonical_unit(),
        }
    }

    fn expected(self) -> String {
        self.units()
            .iter()
            .map(|(u, _)| format!("`{u}`"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn split_number(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    if let Some((number, unit)) = text.split_once(char::is_whitespace) {
        if let Ok(v) = number.parse::<f64>() {
            return Some((v, unit.trim()));
        }
    }
    (1..=text.len())
        .rev()
        .filter(|&i| text.is_char_boundary(i))
        .find_map(|i| text[..i].parse::<f64>().ok().map(|v| (v, text[i..].trim())))
}

/// Parses `"<number> <unit>"` into SI. Errors name `field`.
pub fn parse_quantity(field: &str, text: &str, dimension: Dimension) -> Result<f64> {
    let unit_error = |message: String| Error::Unit {
        field: field.to_string(),
        message,
    };
    let (value, unit) = split_number(text)
        .ok_or_else(|| unit_error(format!("cannot read a number from {text:?}")))?;
    if unit.is_empty() {
        return Err(unit_error(format!(
            "{text:?} has no unit; expected one of {}",
            dimension.expected()
        )));
    }
    let factor = dimension
        .units()
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|&(_, f)| f)
        .ok_or_else(|| {
            unit_error(format!(
                "unknown unit `{unit}`; expected one of {}",
                dimension.expected()
            ))
        })?;
    if !value.is_finite() {
        return Err(unit_error(format!("{text:?} is not a finite number")));
    }
    Ok(value * factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_and_without_space() {
        assert_eq!(
            parse_quantity("b", "30 mm", Dimension::Length).unwrap(),
            0.03
        );
        assert_eq!(
            parse_quantity("b", "30mm", Dimension::Length).unwrap(),
            0.03
        );
        assert_eq!(
            parse_quantity("b", "0.11 m", Dimension::Length).unwrap(),
            0.11
        );
        assert_eq!(
            parse_quantity("sigma", "57e7 S/m", Dimension::Conductivity).unwrap(),
            57e7
        );
        assert_eq!(
            parse_quantity("t", "243 N m", Dimension::Torque).unwrap(),
            243.0
        );
        assert_eq!(
            parse_quantity("t", "243 N·m", Dimension::Torque).unwrap(),
            243.0
        );
        assert_eq!(
            parse_quantity("b", "-1 mm", Dimension::Length).unwrap(),
            -0.001
        );
    }

    #[test]
    fn unit_errors_name_the_field() {
        for bad in ["30", "30 kg", "mm", "thirty mm", "inf mm"] {
            let err = parse_quantity("geometry.b", bad, Dimension::Length).unwrap_err();
            assert_eq!(err.code(), "UNIT_ERROR", "{bad}");
            assert!(err.to_string().contains("geometry.b"));
        }
    }
}
