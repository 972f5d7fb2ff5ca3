//! Torque and dissipated power of the Solution 1 brake from standstill to 8000 rpm.

use ecbrake::model::{self, OperatingPoint, SpeedConvention, TorqueModel};
use ecbrake::units::Rpm;

fn main() -> ecbrake::Result<()> {
    let brake = TorqueModel::table_defaults();
    for convention in [SpeedConvention::RadiansPerSecond, SpeedConvention::Rpm] {
        println!("speed convention: {convention}");
        println!("{:>8} {:>12} {:>12}", "rpm", "torque N·m", "power kW");
        for rpm in (0..=8000).step_by(500) {
            let op = OperatingPoint::new(Rpm(f64::from(rpm)), convention);
            let t = model::torque(&brake, &op)?;
            let p = model::dissipated_power(t, &op);
            println!("{rpm:>8} {t:>12.3} {:>12.3}", p.value() / 1e3);
        }
        println!();
    }
    Ok(())
}
