//! Plain-text reports printed by the command-line front end.

use std::fmt::Write as _;

use crate::model::SpeedConvention;
use crate::oracle::{OracleReport, AGREEMENT_TOLERANCE};
use crate::search::{CalibrationResult, DesignSolution, RequirementCheck};
use crate::units::Rpm;

use super::export::format_float;

/// How the effective `λ` was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaSource {
    Flag,
    Config,
    Sidecar,
    Unit,
}

impl LambdaSource {
    pub fn as_str(self) -> &'static str {
        match self {
            LambdaSource::Flag => "flag",
            LambdaSource::Config => "config",
            LambdaSource::Sidecar => "sidecar",
            LambdaSource::Unit => "uncalibrated",
        }
    }
}

/// One `[[torque]]` record per speed; readable as TOML.
pub fn torque_records(
    rows: &[(Rpm, f64)],
    lambda: f64,
    source: LambdaSource,
    convention: SpeedConvention,
) -> String {
    let mut out = String::new();
    for &(speed, torque) in rows {
        let _ = writeln!(out, "# {:.3} N·m at {} rpm", torque, speed.value());
        let _ = writeln!(out, "[[torque]]");
        let _ = writeln!(out, "speed_rpm = {}", format_float(speed.value()));
        let _ = writeln!(out, "torque_Nm = {}", format_float(torque));
        let _ = writeln!(out, "lambda = {}", format_float(lambda));
        let _ = writeln!(out, "lambda_source = \"{}\"", source.as_str());
        let _ = writeln!(out, "speed_convention = \"{}\"", convention.as_str());
        let _ = writeln!(out, "status = \"ok\"");
        out.push('\n');
    }
    out
}

/// Ranked cells as columns, one row per variable.
pub fn ranking_table(solutions: &[DesignSolution], target: f64, top: usize) -> String {
    let shown = &solutions[..top.min(solutions.len())];
    let mut rows: Vec<(String, Vec<String>)> = vec![
        (
            "Variable".into(),
            (1..=shown.len()).map(|i| format!("Rank {i}")).collect(),
        ),
        (
            "w_m (m)".into(),
            shown.iter().map(|s| format!("{}", s.w_m)).collect(),
        ),
        (
            "b (m)".into(),
            shown.iter().map(|s| format!("{}", s.b)).collect(),
        ),
    ];
    if let Some(first) = shown.first() {
        for (i, (speed, _)) in first.torque_by_speed.iter().enumerate() {
            rows.push((
                format!("T_e @ {} rpm", speed.value()),
                shown
                    .iter()
                    .map(|s| format!("{:.3}", s.torque_by_speed[i].1))
                    .collect(),
            ));
        }
    }
    rows.push((
        "average".into(),
        shown
            .iter()
            .map(|s| format!("{:.3}", s.avg_torque))
            .collect(),
    ));
    rows.push((
        "minimum".into(),
        shown
            .iter()
            .map(|s| format!("{:.3}", s.min_torque))
            .collect(),
    ));
    rows.push((
        "|avg - target|".into(),
        shown
            .iter()
            .map(|s| format!("{:.3}", s.objective))
            .collect(),
    ));
    rows.push((
        "min >= target".into(),
        shown
            .iter()
            .map(|s| if s.feasible { "yes" } else { "no" }.to_string())
            .collect(),
    ));

    let label_width = rows
        .iter()
        .map(|(l, _)| l.chars().count())
        .max()
        .unwrap_or(0);
    let cell_width = rows
        .iter()
        .flat_map(|(_, c)| c.iter().map(|v| v.len()))
        .max()
        .unwrap_or(0)
        .max(8);
    let mut out = format!(
        "target {target} N·m, {} of {} cells shown\n",
        shown.len(),
        solutions.len()
    );
    for (label, cells) in rows {
        let _ = write!(out, "{label:<label_width$}");
        for c in cells {
            let _ = write!(out, "  {c:>cell_width$}");
        }
        out.push('\n');
    }
    out
}

pub fn calibration_report(result: &CalibrationResult) -> String {
    let mut out = String::new();
    let r = &result.reference;
    let _ = writeln!(
        out,
        "reference: solution {} (b = {} m, w_m = {} m) at {} rpm, {} N·m",
        r.solution,
        r.b,
        r.w_m,
        r.speed.value(),
        r.torque
    );
    let _ = writeln!(out, "lambda_star = {}", format_float(result.lambda_star));
    let _ = writeln!(out, "convention_used = {}", result.convention_used);
    let _ = writeln!(out, "fingerprint = {}", result.fingerprint);
    for fit in &result.fits {
        let _ = writeln!(
            out,
            "\n[{}] lambda = {:.6}, T(lambda=1) = {:.6} N·m, max |residual| = {:.4}",
            fit.convention, fit.lambda_star, fit.reference_base_torque, fit.max_abs_residual
        );
        let _ = writeln!(
            out,
            "  solution  speed_rpm   published   predicted   rel_error"
        );
        for res in &fit.residuals {
            let _ = writeln!(
                out,
                "  {:>8}  {:>9}  {:>10.3}  {:>10.3}  {:>+10.4}",
                res.solution,
                res.speed.value(),
                res.published,
                res.predicted,
                res.relative_error
            );
        }
    }
    out
}

pub fn oracle_report_text(report: &OracleReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "mesh {} points per layer (Richardson from {} and {})",
        report.mesh,
        report.mesh,
        2 * report.mesh
    );
    let _ = writeln!(
        out,
        "  n  k  speed_rpm   |r_closed|     rel_error    residual"
    );
    for r in &report.records {
        let _ = writeln!(
            out,
            "  {}  {}  {:>9}  {:.6e}  {:.3e}  {:.1e}",
            r.n,
            r.k,
            r.speed.value(),
            r.closed_form.norm(),
            r.relative_error,
            r.residual
        );
    }
    for f in &report.failures {
        let _ = writeln!(
            out,
            "  {}  {}  {:>9}  {}: {}",
            f.n,
            f.k,
            f.speed.value(),
            f.code,
            f.message
        );
    }
    if let Some(study) = &report.refinement {
        let _ = writeln!(out, "refinement study at (1, 1), 4000 rpm:");
        for e in &study.entries {
            let _ = writeln!(
                out,
                "  mesh {:>5}  |r - r_finest| = {:.3e}",
                e.mesh, e.error_vs_finest
            );
        }
        for ratio in &study.successive_ratios {
            let _ = writeln!(out, "  successive difference ratio {ratio:.3}");
        }
        match study.observed_order {
            Some(p) => {
                let _ = writeln!(out, "  observed order {p:.3}");
            }
            None => {
                let _ = writeln!(out, "  observed order: differences at rounding level");
            }
        }
    }
    let _ = writeln!(
        out,
        "max relative error {:.3e} vs gate {:e}: {}",
        report.max_relative_error,
        AGREEMENT_TOLERANCE,
        if report.passed() { "PASS" } else { "FAIL" }
    );
    out
}

pub fn requirement_check_text(check: &RequirementCheck) -> String {
    let mut out = format!("target {} N·m\n", check.target);
    for m in &check.margins {
        let _ = writeln!(
            out,
            "  {:>6} rpm  {:>10.3} N·m  margin {:>+9.3}  {}",
            m.speed.value(),
            m.torque,
            m.margin,
            if m.passed { "ok" } else { "short" }
        );
    }
    let _ = writeln!(out, "{}", if check.passed { "PASS" } else { "FAIL" });
    out
}
