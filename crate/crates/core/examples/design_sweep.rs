//! Coarse sweep over magnet thickness and radial extrusion, ranked against 243 N·m.

use ecbrake::io::report::ranking_table;
use ecbrake::model::{SpeedConvention, TorqueModel};
use ecbrake::search::{rank_solutions, run_sweep, GridRange, SweepGrid};

fn main() -> ecbrake::Result<()> {
    let grid = SweepGrid {
        b_range: GridRange::new(0.004, 0.040, 0.004),
        wm_range: GridRange::new(0.010, 0.110, 0.010),
        ..SweepGrid::default()
    };
    let model = TorqueModel::table_defaults().with_lambda(4.0);
    let result = run_sweep(&model, &grid, SpeedConvention::RadiansPerSecond)?;
    println!(
        "{} entries, fingerprint {}",
        result.entries.len(),
        result.model_fingerprint
    );

    let target = 243.0;
    print!(
        "{}",
        ranking_table(&rank_solutions(&result, target, false)?, target, 5)
    );
    match rank_solutions(&result, target, true) {
        Ok(feasible) => print!("\nfeasible only:\n{}", ranking_table(&feasible, target, 5)),
        Err(e) => println!("\nfeasible only: {e}"),
    }
    Ok(())
}
