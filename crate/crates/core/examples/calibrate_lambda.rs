//! Fits the series scale to the published Solution 1 torque at 8000 rpm and
//! prints the held-out residuals under both speed conventions.

use ecbrake::io::report::calibration_report;
use ecbrake::model::{self, OperatingPoint, TorqueModel};
use ecbrake::search::{calibrate_against_published, default_reference};

fn main() -> ecbrake::Result<()> {
    let result = calibrate_against_published(&TorqueModel::table_defaults())?;
    print!("{}", calibration_report(&result));

    let calibrated = TorqueModel::table_defaults().calibrated(result.tag());
    let reference = default_reference();
    let op = OperatingPoint::new(reference.speed, result.convention_used);
    println!(
        "\ncalibrated torque at the reference point: {} N·m (published {})",
        model::torque(&calibrated, &op)?,
        reference.torque
    );
    Ok(())
}
