//! Design-space sweep over magnet thickness `b` and radial extrusion `w_m`,
//! ranking against a per-wheel torque target, and fitting of the series
//! scale `λ` to the published solution torques.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{self, CalibrationTag, OperatingPoint, SpeedConvention, TorqueModel};
use crate::regulations::RequirementSpec;
use crate::units::Rpm;

/// Evenly spaced values `min, min + step, …` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridRange {
    pub fn new(min: f64, max: f64, step: f64) -> Self {
        GridRange { min, max, step }
    }

    /// A range holding exactly one value.
    pub fn single(value: f64) -> Self {
        GridRange {
            min: value,
            max: value,
            step: 1.0,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} range is not finite")));
        }
        if !(self.min <= self.max) || !(self.step > 0.0) {
            return Err(Error::InvalidInput(format!(
                "{name} range needs min <= max and step > 0 (min={}, max={}, step={})",
                self.min, self.max, self.step
            )));
        }
        Ok(())
    }

    /// Number of grid values. Both endpoints are included when the span is a
    /// whole number of steps (to within 1e-9 of a step).
    pub fn len(&self) -> usize {
        let steps = (self.max - self.min) / self.step;
        let nearest = steps.round();
        let whole = if (steps - nearest).abs() <= 1e-9 {
            nearest
        } else {
            steps.floor()
        };
        whole as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Values snapped to the nanometre so that decimal grid points such as
    /// 0.03 or 0.11 are reproduced exactly.
    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| ((self.min + i as f64 * self.step) * 1e9).round() / 1e9)
            .collect()
    }
}

/// How `w_m` fixes the magnet radii.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum RadialMode {
    /// `R2` from the template, `R1 = R2 − w_m`.
    #[default]
    FixedOuterRadius,
    /// Given `R1`, `R2 = R1 + w_m`.
    FixedInnerRadius(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub b_range: GridRange,
    pub wm_range: GridRange,
    pub speeds_rpm: Vec<Rpm>,
    pub radial_mode: RadialMode,
}

pub const DEFAULT_SPEEDS_RPM: [f64; 5] = [1000.0, 2000.0, 4000.0, 6000.0, 8000.0];

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            b_range: GridRange::new(0.002, 0.040, 0.001),
            wm_range: GridRange::new(0.002, 0.110, 0.002),
            speeds_rpm: DEFAULT_SPEEDS_RPM.iter().copied().map(Rpm).collect(),
            radial_mode: RadialMode::FixedOuterRadius,
        }
    }
}

impl SweepGrid {
    /// One `(b, w_m)` cell at the default speeds.
    pub fn single_cell(b: f64, w_m: f64) -> Self {
        SweepGrid {
            b_range: GridRange::single(b),
            wm_range: GridRange::single(w_m),
            ..SweepGrid::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.b_range.validate("b")?;
        self.wm_range.validate("w_m")?;
        if self.speeds_rpm.is_empty() {
            return Err(Error::InvalidInput("speed list is empty".into()));
        }
        if self.speeds_rpm.iter().any(|s| !s.value().is_finite()) {
            return Err(Error::InvalidInput("speeds must be finite".into()));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.b_range.len() * self.wm_range.len()
    }

    pub fn entry_count(&self) -> usize {
        self.cell_count() * self.speeds_rpm.len()
    }
}

/// The template with `b` and `w_m` applied.
pub fn cell_model(template: &TorqueModel, b: f64, w_m: f64, mode: RadialMode) -> TorqueModel {
    let mut geometry = template.geometry.with_magnet_thickness(b);
    match mode {
        RadialMode::FixedOuterRadius => geometry = geometry.with_radial_extrusion(w_m),
        RadialMode::FixedInnerRadius(r1) => {
            geometry.r1 = r1;
            geometry.r2 = r1 + w_m;
        }
    }
    template.clone().with_geometry(geometry)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub b: f64,
    pub w_m: f64,
    pub speed: Rpm,
    /// Absent when the evaluation failed.
    pub torque: Option<f64>,
    /// `"ok"` or the error code.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// b-major, then `w_m`, then speed.
    pub entries: Vec<SweepEntry>,
    pub model_fingerprint: String,
    pub convention: SpeedConvention,
}

fn hash_lines(lines: &[String]) -> String {
    let mut hasher = Sha256::new();
    for line in lines {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

fn bits(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn physics_lines(model: &TorqueModel) -> Vec<String> {
    let g = &model.geometry;
    vec![
        format!("r2={}", bits(g.r2)),
        format!("r3={}", bits(g.r3)),
        format!("air_gap={}", bits(g.air_gap)),
        format!("plate_thickness={}", bits(g.plate_thickness)),
        format!("back_iron_thickness={}", bits(g.back_iron_thickness)),
        format!("pole_pairs={}", model.magnets.pole_pairs),
        format!("pole_arc_ratio={}", bits(model.magnets.pole_arc_ratio)),
        format!("remanence={}", bits(model.magnets.remanence)),
        format!("mu0={}", bits(model.materials.mu0)),
        format!("sigma={}", bits(model.materials.sigma)),
        format!("n_max={}", model.truncation.n_max),
        format!("k_max={}", model.truncation.k_max),
        format!("band_tolerance={}", bits(model.truncation.band_tolerance)),
    ]
}

/// SHA-256 over every model input except `λ` and the swept magnet block
/// (`b`, `R1`). Identifies the physics a calibration applies to.
pub fn physics_fingerprint(model: &TorqueModel) -> String {
    hash_lines(&physics_lines(model))
}

/// SHA-256 over the full template, grid and speed convention.
pub fn sweep_fingerprint(
    template: &TorqueModel,
    grid: &SweepGrid,
    convention: SpeedConvention,
) -> String {
    let mut lines = physics_lines(template);
    lines.push(format!("r1={}", bits(template.geometry.r1)));
    lines.push(format!(
        "magnet_thickness={}",
        bits(template.geometry.magnet_thickness)
    ));
    lines.push(format!("lambda={}", bits(template.lambda_scale)));
    lines.push(format!("convention={}", convention.as_str()));
    for (name, r) in [("b", grid.b_range), ("w_m", grid.wm_range)] {
        lines.push(format!(
            "{name}={},{},{}",
            bits(r.min),
            bits(r.max),
            bits(r.step)
        ));
    }
    match grid.radial_mode {
        RadialMode::FixedOuterRadius => lines.push("radial=outer".into()),
        RadialMode::FixedInnerRadius(r1) => lines.push(format!("radial=inner,{}", bits(r1))),
    }
    let speeds: Vec<String> = grid.speeds_rpm.iter().map(|s| bits(s.value())).collect();
    lines.push(format!("speeds={}", speeds.join(",")));
    hash_lines(&lines)
}

fn evaluate_cell(
    template: &TorqueModel,
    grid: &SweepGrid,
    convention: SpeedConvention,
    b: f64,
    w_m: f64,
) -> Vec<SweepEntry> {
    let cell = cell_model(template, b, w_m, grid.radial_mode);
    grid.speeds_rpm
        .iter()
        .map(|&speed| {
            let (torque, status) =
                match model::torque(&cell, &OperatingPoint::new(speed, convention)) {
                    Ok(t) => (Some(t), "ok".to_string()),
                    Err(e) => (None, e.code().to_string()),
                };
            SweepEntry {
                b,
                w_m,
                speed,
                torque,
                status,
            }
        })
        .collect()
}

/// Evaluates the torque at every grid point. Failing points are recorded
/// with their error code; they never abort the sweep.
pub fn run_sweep(
    template: &TorqueModel,
    grid: &SweepGrid,
    convention: SpeedConvention,
) -> Result<SweepResult> {
    grid.validate()?;
    let cells: Vec<(f64, f64)> = grid
        .b_range
        .points()
        .into_iter()
        .flat_map(|b| grid.wm_range.points().into_iter().map(move |w| (b, w)))
        .collect();
    let entries = cells
        .par_iter()
        .map(|&(b, w_m)| evaluate_cell(template, grid, convention, b, w_m))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(SweepResult {
        entries,
        model_fingerprint: sweep_fingerprint(template, grid, convention),
        convention,
    })
}

/// [`run_sweep`] on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(
    template: &TorqueModel,
    grid: &SweepGrid,
    convention: SpeedConvention,
    threads: usize,
) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_sweep(template, grid, convention))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignSolution {
    pub b: f64,
    pub w_m: f64,
    /// In sweep speed order.
    pub torque_by_speed: Vec<(Rpm, f64)>,
    pub avg_torque: f64,
    pub min_torque: f64,
    /// `|avg_torque − target|`.
    pub objective: f64,
    /// `min_torque ≥ target`.
    pub feasible: bool,
}

impl DesignSolution {
    pub fn new(b: f64, w_m: f64, torque_by_speed: Vec<(Rpm, f64)>, target: f64) -> Self {
        let count = torque_by_speed.len() as f64;
        let avg_torque = torque_by_speed.iter().map(|(_, t)| t).sum::<f64>() / count;
        let min_torque = torque_by_speed
            .iter()
            .map(|&(_, t)| t)
            .fold(f64::INFINITY, f64::min);
        DesignSolution {
            b,
            w_m,
            torque_by_speed,
            avg_torque,
            min_torque,
            objective: (avg_torque - target).abs(),
            feasible: min_torque >= target,
        }
    }

    pub fn torque_at(&self, speed: Rpm) -> Option<f64> {
        self.torque_by_speed
            .iter()
            .find(|(s, _)| *s == speed)
            .map(|&(_, t)| t)
    }
}

/// Cells whose torque is known at every sweep speed, in sweep order.
pub fn solutions(result: &SweepResult, target: f64) -> Vec<DesignSolution> {
    let mut out = Vec::new();
    let mut i = 0;
    let entries = &result.entries;
    while i < entries.len() {
        let (b, w_m) = (entries[i].b, entries[i].w_m);
        let mut j = i;
        let mut torques = Vec::new();
        let mut complete = true;
        while j < entries.len() && entries[j].b == b && entries[j].w_m == w_m {
            match entries[j].torque {
                Some(t) => torques.push((entries[j].speed, t)),
                None => complete = false,
            }
            j += 1;
        }
        if complete {
            out.push(DesignSolution::new(b, w_m, torques, target));
        }
        i = j;
    }
    out
}

/// Sorted by `|avg − target|`, ties broken by smaller `b`, then smaller `w_m`.
pub fn rank_solutions(
    result: &SweepResult,
    target: f64,
    feasible_only: bool,
) -> Result<Vec<DesignSolution>> {
    if result.entries.is_empty() {
        return Err(Error::InvalidInput("sweep result is empty".into()));
    }
    let mut ranked = solutions(result, target);
    if feasible_only {
        ranked.retain(|s| s.feasible);
        if ranked.is_empty() {
            return Err(Error::EmptyFeasibleSet { target });
        }
    } else if ranked.is_empty() {
        return Err(Error::InvalidInput(
            "no cell was evaluated successfully at every speed".into(),
        ));
    }
    ranked.sort_by(|x, y| {
        x.objective
            .total_cmp(&y.objective)
            .then(x.b.total_cmp(&y.b))
            .then(x.w_m.total_cmp(&y.w_m))
    });
    Ok(ranked)
}

/// One published solution torque.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PublishedTorque {
    pub solution: u8,
    pub b: f64,
    pub w_m: f64,
    pub speed: Rpm,
    pub torque: f64,
}

const fn published(solution: u8, b: f64, speed: f64, torque: f64) -> PublishedTorque {
    PublishedTorque {
        solution,
        b,
        w_m: 0.11,
        speed: Rpm(speed),
        torque,
    }
}

/// The two published designs, five speeds each.
pub const PUBLISHED_SOLUTIONS: [PublishedTorque; 10] = [
    published(1, 0.03, 1000.0, 250.179),
    published(1, 0.03, 2000.0, 252.359),
    published(1, 0.03, 4000.0, 253.229),
    published(1, 0.03, 6000.0, 253.229),
    published(1, 0.03, 8000.0, 253.802),
    published(2, 0.04, 1000.0, 307.630),
    published(2, 0.04, 2000.0, 315.286),
    published(2, 0.04, 4000.0, 315.28),
    published(2, 0.04, 6000.0, 316.177),
    published(2, 0.04, 8000.0, 316.710),
];

/// Solution 1 at 8000 rpm.
pub fn default_reference() -> PublishedTorque {
    PUBLISHED_SOLUTIONS[4]
}

pub fn published_solution(solution: u8) -> Vec<PublishedTorque> {
    PUBLISHED_SOLUTIONS
        .iter()
        .copied()
        .filter(|p| p.solution == solution)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResidual {
    pub speed: Rpm,
    pub solution: u8,
    pub predicted: f64,
    pub published: f64,
    /// `(predicted − published)/published`.
    pub relative_error: f64,
}

/// Fit under one speed convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionFit {
    pub convention: SpeedConvention,
    pub lambda_star: f64,
    /// Uncalibrated torque at the reference point.
    pub reference_base_torque: f64,
    /// Calibrated torque at the reference point; equals the reference torque.
    pub reference_fit: f64,
    pub residuals: Vec<CalibrationResidual>,
    pub max_abs_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub lambda_star: f64,
    pub reference: PublishedTorque,
    /// Held-out residuals under the selected convention.
    pub residuals: Vec<CalibrationResidual>,
    pub convention_used: SpeedConvention,
    /// Both conventions, in [`SpeedConvention::ALL`] order.
    pub fits: Vec<ConventionFit>,
    /// [`physics_fingerprint`] of the template.
    pub fingerprint: String,
}

impl CalibrationResult {
    pub fn tag(&self) -> CalibrationTag {
        CalibrationTag {
            lambda_star: self.lambda_star,
            convention: self.convention_used,
            fingerprint: self.fingerprint.clone(),
        }
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.relative_error.abs())
            .fold(0.0, f64::max)
    }

    pub fn fit(&self, convention: SpeedConvention) -> Option<&ConventionFit> {
        self.fits.iter().find(|f| f.convention == convention)
    }
}

/// Smallest adjustment of `ratio` (within a few ulps) for which
/// `ratio · base == target`, if one exists.
fn exact_scale(target: f64, base: f64) -> f64 {
    let ratio = target / base;
    let mut best = ratio;
    let mut best_gap = (best * base - target).abs();
    let mut candidates = [ratio; 8];
    let (mut up, mut down) = (ratio, ratio);
    for i in 0..4 {
        up = up.next_up();
        down = down.next_down();
        candidates[2 * i] = up;
        candidates[2 * i + 1] = down;
    }
    for c in std::iter::once(ratio).chain(candidates) {
        let gap = (c * base - target).abs();
        if gap < best_gap {
            best = c;
            best_gap = gap;
        }
        if gap == 0.0 {
            return c;
        }
    }
    best
}

fn base_torque(template: &TorqueModel, b: f64, w_m: f64, op: &OperatingPoint) -> Result<f64> {
    let cell = cell_model(template, b, w_m, RadialMode::FixedOuterRadius).with_lambda(1.0);
    model::torque(&cell, op).map_err(|e| Error::AtSpeed {
        rpm: op.slip.value(),
        source: Box::new(e),
    })
}

fn fit_convention(
    template: &TorqueModel,
    reference: &PublishedTorque,
    held_out: &[PublishedTorque],
    convention: SpeedConvention,
) -> Result<ConventionFit> {
    let base = base_torque(
        template,
        reference.b,
        reference.w_m,
        &OperatingPoint::new(reference.speed, convention),
    )?;
    if base == 0.0 || !base.is_finite() {
        return Err(Error::ZeroReference);
    }
    let lambda_star = exact_scale(reference.torque, base);
    let residuals = held_out
        .iter()
        .map(|p| {
            let predicted = lambda_star
                * base_torque(
                    template,
                    p.b,
                    p.w_m,
                    &OperatingPoint::new(p.speed, convention),
                )?;
            Ok(CalibrationResidual {
                speed: p.speed,
                solution: p.solution,
                predicted,
                published: p.torque,
                relative_error: (predicted - p.torque) / p.torque,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs_residual = residuals
        .iter()
        .map(|r| r.relative_error.abs())
        .fold(0.0, f64::max);
    Ok(ConventionFit {
        convention,
        lambda_star,
        reference_base_torque: base,
        reference_fit: lambda_star * base,
        residuals,
        max_abs_residual,
    })
}

/// Fits `λ* = T_ref / T(λ = 1)` at `reference` under both speed conventions
/// and keeps the convention with the smaller maximum held-out residual.
pub fn calibrate_lambda(
    template: &TorqueModel,
    reference: &PublishedTorque,
    held_out: &[PublishedTorque],
) -> Result<CalibrationResult> {
    template.validate()?;
    if !(reference.torque.is_finite()) {
        return Err(Error::InvalidInput(
            "reference torque must be finite".into(),
        ));
    }
    let fits = SpeedConvention::ALL
        .iter()
        .map(|&c| fit_convention(template, reference, held_out, c))
        .collect::<Result<Vec<_>>>()?;
    let best = fits
        .iter()
        .min_by(|x, y| x.max_abs_residual.total_cmp(&y.max_abs_residual))
        .expect("two conventions");
    Ok(CalibrationResult {
        lambda_star: best.lambda_star,
        reference: *reference,
        residuals: best.residuals.clone(),
        convention_used: best.convention,
        fits: fits.clone(),
        fingerprint: physics_fingerprint(template),
    })
}

/// Calibration on Solution 1 at 8000 rpm against the nine other published torques.
pub fn calibrate_against_published(template: &TorqueModel) -> Result<CalibrationResult> {
    let reference = default_reference();
    let held_out: Vec<PublishedTorque> = PUBLISHED_SOLUTIONS
        .iter()
        .copied()
        .filter(|p| *p != reference)
        .collect();
    calibrate_lambda(template, &reference, &held_out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedMargin {
    pub speed: Rpm,
    pub torque: f64,
    /// `torque − target`.
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequirementCheck {
    pub target: f64,
    pub margins: Vec<SpeedMargin>,
    pub passed: bool,
}

/// PASS when the torque meets the per-wheel target at every speed.
pub fn check_requirement(
    solution: &DesignSolution,
    req: &RequirementSpec,
) -> Result<RequirementCheck> {
    let (low, high) = req.speed_range_rpm;
    for end in [low, high] {
        if solution.torque_at(end).is_none() {
            return Err(Error::InvalidInput(format!(
                "solution has no torque at the range endpoint {end}"
            )));
        }
    }
    let target = req.per_wheel_torque.value();
    let margins: Vec<SpeedMargin> = solution
        .torque_by_speed
        .iter()
        .map(|&(speed, torque)| SpeedMargin {
            speed,
            torque,
            margin: torque - target,
            passed: torque >= target,
        })
        .collect();
    let passed = margins.iter().all(|m| m.passed);
    Ok(RequirementCheck {
        target,
        margins,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> SweepGrid {
        SweepGrid {
            b_range: GridRange::new(0.01, 0.03, 0.01),
            wm_range: GridRange::new(0.05, 0.11, 0.06),
            speeds_rpm: vec![Rpm(1000.0), Rpm(8000.0)],
            radial_mode: RadialMode::FixedOuterRadius,
        }
    }

    #[test]
    fn grid_points_hit_decimal_values() {
        let grid = SweepGrid::default();
        let b = grid.b_range.points();
        let w = grid.wm_range.points();
        assert_eq!(b.len(), 39);
        assert_eq!(w.len(), 55);
        assert_eq!((b[0], b[38]), (0.002, 0.04));
        assert!(b.contains(&0.03) && b.contains(&0.04));
        assert!(w.contains(&0.11));
        assert_eq!(grid.entry_count(), 39 * 55 * 5);
        assert_eq!(
            GridRange::new(0.0, 1.0, 0.3).points(),
            vec![0.0, 0.3, 0.6, 0.9]
        );
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(GridRange::new(1.0, 0.0, 0.1).validate("b").is_err());
        assert!(GridRange::new(0.0, 1.0, 0.0).validate("b").is_err());
        let mut grid = SweepGrid::default();
        grid.speeds_rpm.clear();
        assert!(run_sweep(
            &TorqueModel::table_defaults(),
            &grid,
            SpeedConvention::default()
        )
        .is_err());
    }

    #[test]
    fn single_cell_sweep_has_one_entry_per_speed() {
        let grid = SweepGrid::single_cell(0.03, 0.11);
        let result = run_sweep(
            &TorqueModel::table_defaults(),
            &grid,
            SpeedConvention::default(),
        )
        .unwrap();
        assert_eq!(result.entries.len(), 5);
        assert!(result.entries.iter().all(|e| e.status == "ok"));
        let ranked = rank_solutions(&result, 1e6, false).unwrap();
        assert_eq!(ranked.len(), 1);
        assert_eq!((ranked[0].b, ranked[0].w_m), (0.03, 0.11));
    }

    #[test]
    fn sweep_order_is_b_major() {
        let result = run_sweep(
            &TorqueModel::table_defaults(),
            &small_grid(),
            SpeedConvention::default(),
        )
        .unwrap();
        let keys: Vec<(f64, f64, f64)> = result
            .entries
            .iter()
            .map(|e| (e.b, e.w_m, e.speed.value()))
            .collect();
        assert_eq!(keys.len(), 12);
        assert_eq!(keys[0], (0.01, 0.05, 1000.0));
        assert_eq!(keys[1], (0.01, 0.05, 8000.0));
        assert_eq!(keys[2], (0.01, 0.11, 1000.0));
        assert_eq!(keys[4], (0.02, 0.05, 1000.0));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let m = TorqueModel::table_defaults();
        let one = run_sweep_with_threads(&m, &small_grid(), SpeedConvention::Rpm, 1).unwrap();
        let four = run_sweep_with_threads(&m, &small_grid(), SpeedConvention::Rpm, 4).unwrap();
        let bits = |r: &SweepResult| {
            r.entries
                .iter()
                .map(|e| e.torque.map(f64::to_bits))
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&one), bits(&four));
        assert_eq!(one.model_fingerprint, four.model_fingerprint);
    }

    #[test]
    fn failing_cells_are_recorded_not_fatal() {
        let m = TorqueModel::table_defaults().with_truncation(crate::model::Truncation {
            band_tolerance: 0.0,
            ..Default::default()
        });
        let result = run_sweep(&m, &small_grid(), SpeedConvention::default()).unwrap();
        assert_eq!(result.entries.len(), 12);
        assert!(result
            .entries
            .iter()
            .all(|e| e.torque.is_none() && e.status == "NON_CONVERGED"));
        assert!(rank_solutions(&result, 243.0, false).is_err());
    }

    #[test]
    fn fingerprints() {
        let m = TorqueModel::table_defaults();
        let grid = SweepGrid::default();
        let base = sweep_fingerprint(&m, &grid, SpeedConvention::default());
        assert_eq!(base.len(), 64);
        assert_ne!(base, sweep_fingerprint(&m, &grid, SpeedConvention::Rpm));
        assert_ne!(
            base,
            sweep_fingerprint(
                &m.clone().with_lambda(2.0),
                &grid,
                SpeedConvention::default()
            )
        );

        let p = physics_fingerprint(&m);
        assert_eq!(p, physics_fingerprint(&m.clone().with_lambda(3.0)));
        assert_eq!(
            p,
            physics_fingerprint(&cell_model(&m, 0.01, 0.05, RadialMode::FixedOuterRadius))
        );
        let mut other = m.clone();
        other.materials.sigma = 5.7e7;
        assert_ne!(p, physics_fingerprint(&other));
    }

    fn synthetic(torques: &[(f64, f64, f64)]) -> SweepResult {
        SweepResult {
            entries: torques
                .iter()
                .map(|&(b, w_m, t)| SweepEntry {
                    b,
                    w_m,
                    speed: Rpm(1000.0),
                    torque: Some(t),
                    status: "ok".into(),
                })
                .collect(),
            model_fingerprint: String::new(),
            convention: SpeedConvention::default(),
        }
    }

    #[test]
    fn ranking_order_and_tie_break() {
        let result = synthetic(&[
            (0.02, 0.1, 5.0),
            (0.01, 0.1, 5.0),
            (0.01, 0.05, 5.0),
            (0.03, 0.1, 1.0),
        ]);
        let ranked = rank_solutions(&result, 0.0, false).unwrap();
        let order: Vec<(f64, f64)> = ranked.iter().map(|s| (s.b, s.w_m)).collect();
        assert_eq!(
            order,
            vec![(0.03, 0.1), (0.01, 0.05), (0.01, 0.1), (0.02, 0.1)]
        );
    }

    #[test]
    fn feasible_only_filters_and_can_be_empty() {
        let result = synthetic(&[(0.01, 0.1, 100.0), (0.02, 0.1, 300.0)]);
        let ranked = rank_solutions(&result, 243.0, true).unwrap();
        assert_eq!(ranked.len(), 1);
        assert_eq!(ranked[0].b, 0.02);
        let err = rank_solutions(&result, 400.0, true).unwrap_err();
        assert_eq!(err.code(), "EMPTY_FEASIBLE_SET");
    }

    #[test]
    fn exact_scale_hits_target() {
        for (t, b) in [(253.802, 58.68), (1.0, 3.0), (250.179, 0.1234567)] {
            let l = exact_scale(t, b);
            assert_eq!(l * b, t);
        }
    }

    #[test]
    fn calibration_fits_reference_exactly() {
        let result = calibrate_against_published(&TorqueModel::table_defaults()).unwrap();
        assert_eq!(result.residuals.len(), 9);
        assert_eq!(result.fits.len(), 2);
        for fit in &result.fits {
            assert_eq!(fit.reference_fit, 253.802);
        }
        assert!(result.lambda_star > 0.0);
        let chosen = result.fit(result.convention_used).unwrap();
        let other = result
            .fits
            .iter()
            .find(|f| f.convention != result.convention_used)
            .unwrap();
        assert!(chosen.max_abs_residual <= other.max_abs_residual);
    }

    #[test]
    fn identity_calibration() {
        let m = TorqueModel::table_defaults();
        let op = OperatingPoint::new(Rpm(8000.0), SpeedConvention::default());
        let t = model::torque(&m, &op).unwrap();
        let reference = PublishedTorque {
            solution: 1,
            b: m.geometry.magnet_thickness,
            w_m: m.geometry.radial_extrusion(),
            speed: Rpm(8000.0),
            torque: t,
        };
        let result = calibrate_lambda(&m, &reference, &[]).unwrap();
        assert_eq!(
            result.fit(SpeedConvention::default()).unwrap().lambda_star,
            1.0
        );
    }

    #[test]
    fn zero_reference_rejected() {
        let reference = PublishedTorque {
            speed: Rpm(0.0),
            ..default_reference()
        };
        let err = calibrate_lambda(&TorqueModel::table_defaults(), &reference, &[]).unwrap_err();
        assert_eq!(err.code(), "ZERO_REFERENCE");
    }

    #[test]
    fn requirement_check_against_published_torques() {
        let req = RequirementSpec::default();
        let as_solution = |id| {
            let rows = published_solution(id);
            DesignSolution::new(
                rows[0].b,
                rows[0].w_m,
                rows.iter().map(|p| (p.speed, p.torque)).collect(),
                243.0,
            )
        };
        let one = check_requirement(&as_solution(1), &req).unwrap();
        assert!(one.passed);
        assert!((one.margins[0].margin - 7.179).abs() < 1e-9);
        let two = check_requirement(&as_solution(2), &req).unwrap();
        assert!(two.passed);
        for (a, b) in one.margins.iter().zip(&two.margins) {
            assert!(b.margin > a.margin);
        }

        let zeros = DesignSolution::new(
            0.03,
            0.11,
            DEFAULT_SPEEDS_RPM.iter().map(|&s| (Rpm(s), 0.0)).collect(),
            243.0,
        );
        let check = check_requirement(&zeros, &req).unwrap();
        assert!(!check.passed);
        assert!(check.margins.iter().all(|m| !m.passed));

        let partial = DesignSolution::new(0.03, 0.11, vec![(Rpm(1000.0), 300.0)], 243.0);
        assert!(check_requirement(&partial, &req).is_err());
    }
}
