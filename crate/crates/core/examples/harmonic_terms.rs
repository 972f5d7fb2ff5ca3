//! The largest series contributions and the convergence of the truncated sum.

use ecbrake::model::{self, harmonic_term, OperatingPoint, TorqueModel, Truncation};

fn main() -> ecbrake::Result<()> {
    let model = TorqueModel::table_defaults();
    let op = OperatingPoint::rpm(1000.0);

    let mut terms = Vec::new();
    for n in 1..=9 {
        for k in 1..=9 {
            terms.push(harmonic_term(n, k, &model, &op)?);
        }
    }
    terms.sort_by(|a, b| b.contribution.norm().total_cmp(&a.contribution.norm()));
    println!(
        "{:>3} {:>3} {:>14} {:>10} {:>24}",
        "n", "k", "M_nk A/m", "a_nk 1/m", "r_nk"
    );
    for t in terms.iter().take(8) {
        println!(
            "{:>3} {:>3} {:>14.3} {:>10.2} {:>24.6}",
            t.n, t.k, t.m_nk, t.a_nk, t.r_nk
        );
    }

    println!();
    for order in [5, 10, 20, 30, 60, 120] {
        let truncated = model
            .clone()
            .with_truncation(Truncation::unchecked(order, order));
        let b = model::torque_breakdown(&truncated, &op)?;
        println!(
            "{order:>4} x {order:<4} torque {:>14.9} N·m, last band {:.2e}",
            b.torque,
            b.band_ratio()
        );
    }
    Ok(())
}
