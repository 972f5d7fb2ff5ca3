//! Closed-form reflection coefficients against the finite-difference field solution,
//! plus a mesh refinement study and a finite-permeability back iron.

use ecbrake::model::{reflection_coefficient, OperatingPoint, SpeedConvention, TorqueModel};
use ecbrake::oracle::{
    oracle_check, refinement_study, solve_harmonic_bvp_with, IronClosure, OracleSettings,
};

fn main() -> ecbrake::Result<()> {
    let model = TorqueModel::table_defaults();
    let report = oracle_check(&model, SpeedConvention::RadiansPerSecond, 128);
    println!(
        "max relative error {:.3e}, passed {}",
        report.max_relative_error,
        report.passed()
    );

    let op = OperatingPoint::rpm(4000.0);
    let study = refinement_study(1, 1, &model, &op, &[16, 32, 64, 128, 256])?;
    for e in &study.entries {
        println!("mesh {:>4}: r = {:.12}", e.mesh, e.r_raw);
    }
    println!("observed order {:?}", study.observed_order);

    let closed = reflection_coefficient(1, 1, &model, &op)?;
    for mu_r in [10.0, 100.0, 1000.0, 1e6] {
        let settings = OracleSettings {
            closure: IronClosure::Finite {
                relative_permeability: mu_r,
            },
            ..OracleSettings::default()
        };
        let r = solve_harmonic_bvp_with(1, 1, &model, &op, 64, &settings)?.r_numeric;
        println!(
            "mu_r {mu_r:>9}: |r - r_ideal| / |r_ideal| = {:.3e}",
            (r - closed).norm() / closed.norm()
        );
    }
    Ok(())
}
