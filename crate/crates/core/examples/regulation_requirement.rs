//! Braking-torque requirement for the default vehicle and a heavier variant.

use ecbrake::regulations::{requirement_report, RequirementSpec, VehicleSpec};
use ecbrake::units::Kilograms;

fn main() -> ecbrake::Result<()> {
    let req = RequirementSpec::default();
    println!("{}", requirement_report(&VehicleSpec::default(), &req)?);

    // Light commercial van, above the lightweight class.
    let van = VehicleSpec {
        mass: Kilograms(3900.0),
        ..VehicleSpec::default()
    };
    let report = requirement_report(&van, &req)?;
    println!("{report}");
    println!("{} warning(s)", report.warnings.len());
    Ok(())
}
