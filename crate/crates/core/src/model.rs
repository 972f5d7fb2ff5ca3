//! Mean-radius analytical torque model of an axial-flux permanent-magnet
//! eddy-current brake.
//!
//! The annular coupling is unrolled at the mean radius `R_m` into a linear
//! problem and the magnet excitation is expanded in a double Fourier series
//! over the radial index `n` and circumferential index `k`. Each harmonic sees
//! the layer stack (magnet, air gap, conducting plate, back irons) through a
//! complex reflection coefficient, and the braking torque is
//!
//! ```text
//! T = λ/2 · μ0 · p² · τ · R3 · Re Σ_n Σ_k  j·k · M_nk²/a_nk · r_nk · sinh(a_nk·b)
//! ```
//!
//! with `τ = π·R_m/p`, `a_nk = √((nπ/R3)² + (kπ/τ)²)` and the diffusion
//! eigenvalue `γ_nk = √(a_nk² + j·σ·μ0·N·R_m·kπ/τ)`.
//!
//! Sign convention: a positive torque opposes a positive slip. The real part
//! of the series is positive for positive slip, so no sign flip is applied.
//!
//! The hyperbolic terms are evaluated in exponentially rescaled form so the
//! product `r_nk·sinh(a_nk·b)` stays finite for arbitrarily high harmonics.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyper::{cosh_scaled, cosh_scaled_complex, sinh_scaled, sinh_scaled_complex};
use crate::units::{RadPerSec, Rpm, Watts};

/// Permeability of free space, 4π×10⁻⁷ H/m.
pub const MU0: f64 = 4e-7 * PI;

/// Plate conductivity as printed in the material table, 57×10⁷ S/m.
///
/// Copper is 5.7×10⁷ S/m, so the printed value is most likely a typo; it is
/// kept as the default only because it is the literal tabulated value.
pub const TABULATED_SIGMA: f64 = 57e7;

/// Radii and axial thicknesses of the coupling stack, all in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrakeGeometry {
    /// Magnet ring inner radius `R1`.
    pub r1: f64,
    /// Magnet ring outer radius `R2`.
    pub r2: f64,
    /// Conducting disc radius `R3`.
    pub r3: f64,
    /// Axial magnet thickness `b`.
    pub magnet_thickness: f64,
    /// Air gap `c`.
    pub air_gap: f64,
    /// Conducting plate thickness `d`.
    pub plate_thickness: f64,
    /// Back-iron thickness (not the eigenvalue `a_nk`).
    pub back_iron_thickness: f64,
}

impl BrakeGeometry {
    /// Disc and magnet radii of the design tables with the Solution-1 magnet
    /// block (b = 30 mm, w_m = 110 mm).
    pub fn table_defaults() -> Self {
        BrakeGeometry {
            r1: 0.0,
            r2: 0.112,
            r3: 0.140,
            magnet_thickness: 0.030,
            air_gap: 0.001,
            plate_thickness: 0.002,
            back_iron_thickness: 0.002,
        }
        .with_radial_extrusion(0.110)
    }

    /// Places the inner radius at `r2 − w_m`.
    pub fn with_radial_extrusion(mut self, w_m: f64) -> Self {
        self.r1 = self.r2 - w_m;
        self
    }

    pub fn with_magnet_thickness(mut self, b: f64) -> Self {
        self.magnet_thickness = b;
        self
    }

    /// Radial width of the magnet ring, `w_m = r2 − r1`.
    pub fn radial_extrusion(&self) -> f64 {
        self.r2 - self.r1
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.r1,
            self.r2,
            self.r3,
            self.magnet_thickness,
            self.air_gap,
            self.plate_thickness,
            self.back_iron_thickness,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "geometry contains a non-finite value".into(),
            ));
        }
        if !(0.0 < self.r1 && self.r1 < self.r2 && self.r2 <= self.r3) {
            return Err(Error::InvalidInput(format!(
                "radii must satisfy 0 < r1 < r2 <= r3 (r1={}, r2={}, r3={})",
                self.r1, self.r2, self.r3
            )));
        }
        for (name, v) in [
            ("magnet_thickness", self.magnet_thickness),
            ("air_gap", self.air_gap),
            ("plate_thickness", self.plate_thickness),
            ("back_iron_thickness", self.back_iron_thickness),
        ] {
            if v <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnetSpec {
    /// Number of pole pairs `p`.
    pub pole_pairs: u32,
    /// Pole-arc to pole-pitch ratio `α`, in (0, 1).
    pub pole_arc_ratio: f64,
    /// Remanence `B_r` in tesla.
    pub remanence: f64,
}

impl MagnetSpec {
    pub fn table_defaults() -> Self {
        MagnetSpec {
            pole_pairs: 4,
            pole_arc_ratio: 0.444,
            remanence: 1.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pole_pairs < 1 {
            return Err(Error::InvalidInput("pole_pairs must be at least 1".into()));
        }
        if !(self.pole_arc_ratio > 0.0 && self.pole_arc_ratio < 1.0) {
            return Err(Error::InvalidInput(format!(
                "pole_arc_ratio must lie in (0, 1), got {}",
                self.pole_arc_ratio
            )));
        }
        if !(self.remanence >= 0.0 && self.remanence.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "remanence must be non-negative, got {}",
                self.remanence
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    /// Vacuum permeability in H/m.
    pub mu0: f64,
    /// Plate conductivity in S/m.
    pub sigma: f64,
}

impl MaterialSpec {
    pub fn table_defaults() -> Self {
        MaterialSpec {
            mu0: MU0,
            sigma: TABULATED_SIGMA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "mu0 must be positive, got {}",
                self.mu0
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sigma must be non-negative, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// How the slip speed enters the diffusion eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum SpeedConvention {
    /// `N` is the angular speed in rad/s, so `σ·μ0·N·R_m` is a velocity term in 1/m.
    #[default]
    #[serde(rename = "rad_s")]
    RadiansPerSecond,
    /// `N` is the raw shaft speed in rpm.
    #[serde(rename = "rpm")]
    Rpm,
}

impl SpeedConvention {
    pub const ALL: [SpeedConvention; 2] = [SpeedConvention::RadiansPerSecond, SpeedConvention::Rpm];

    pub fn as_str(self) -> &'static str {
        match self {
            SpeedConvention::RadiansPerSecond => "rad_s",
            SpeedConvention::Rpm => "rpm",
        }
    }
}

impl fmt::Display for SpeedConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpeedConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rad_s" | "rad/s" => Ok(SpeedConvention::RadiansPerSecond),
            "rpm" => Ok(SpeedConvention::Rpm),
            other => Err(Error::InvalidInput(format!(
                "unknown speed convention `{other}` (expected rad_s or rpm)"
            ))),
        }
    }
}

/// Slip speed plus the convention that decides how it enters the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub slip: Rpm,
    pub convention: SpeedConvention,
}

impl OperatingPoint {
    pub fn new(slip: Rpm, convention: SpeedConvention) -> Self {
        OperatingPoint { slip, convention }
    }

    pub fn rpm(rpm: f64) -> Self {
        OperatingPoint::new(Rpm(rpm), SpeedConvention::default())
    }

    /// Physical angular slip speed.
    pub fn angular_speed(&self) -> RadPerSec {
        self.slip.to_rad_per_sec()
    }

    /// The number that multiplies `σ·μ0·R_m·kπ/τ` inside `γ_nk`.
    pub fn series_speed(&self) -> f64 {
        match self.convention {
            SpeedConvention::RadiansPerSecond => self.slip.to_rad_per_sec().value(),
            SpeedConvention::Rpm => self.slip.value(),
        }
    }
}

/// Limits of the double harmonic sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub n_max: u32,
    pub k_max: u32,
    /// Largest accepted ratio between the real part of the last added band
    /// (all terms with `n = n_max` or `k = k_max`) and the real part of the sum.
    pub band_tolerance: f64,
}

impl Truncation {
    pub const DEFAULT_BAND_TOLERANCE: f64 = 0.05;

    pub fn new(n_max: u32, k_max: u32) -> Self {
        Truncation {
            n_max,
            k_max,
            band_tolerance: Self::DEFAULT_BAND_TOLERANCE,
        }
    }

    /// Same limits with the convergence check switched off.
    pub fn unchecked(n_max: u32, k_max: u32) -> Self {
        Truncation {
            n_max,
            k_max,
            band_tolerance: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 || self.k_max < 1 {
            return Err(Error::InvalidInput(
                "n_max and k_max must be at least 1".into(),
            ));
        }
        if self.band_tolerance.is_nan() || self.band_tolerance < 0.0 {
            return Err(Error::InvalidInput(
                "band_tolerance must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::new(30, 30)
    }
}

/// Marks a model whose `λ` came from a fit against reference torques.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTag {
    pub lambda_star: f64,
    pub convention: SpeedConvention,
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorqueModel {
    pub geometry: BrakeGeometry,
    pub magnets: MagnetSpec,
    pub materials: MaterialSpec,
    pub truncation: Truncation,
    /// Multiplicative scale `λ` on the whole series.
    pub lambda_scale: f64,
    pub calibration: Option<CalibrationTag>,
}

impl Default for TorqueModel {
    fn default() -> Self {
        TorqueModel::table_defaults()
    }
}

impl TorqueModel {
    pub fn table_defaults() -> Self {
        TorqueModel {
            geometry: BrakeGeometry::table_defaults(),
            magnets: MagnetSpec::table_defaults(),
            materials: MaterialSpec::table_defaults(),
            truncation: Truncation::default(),
            lambda_scale: 1.0,
            calibration: None,
        }
    }

    pub fn with_geometry(mut self, geometry: BrakeGeometry) -> Self {
        self.geometry = geometry;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda_scale = lambda;
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    /// Attaches a fitted `λ`, replacing the current scale.
    pub fn calibrated(mut self, tag: CalibrationTag) -> Self {
        self.lambda_scale = tag.lambda_star;
        self.calibration = Some(tag);
        self
    }

    /// `"calibrated"`, `"uncalibrated"` (λ = 1, no record) or `"manual"`.
    pub fn lambda_label(&self) -> &'static str {
        if self.calibration.is_some() {
            "calibrated"
        } else if self.lambda_scale == 1.0 {
            "uncalibrated"
        } else {
            "manual"
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.magnets.validate()?;
        self.materials.validate()?;
        self.truncation.validate()?;
        if !(self.lambda_scale > 0.0 && self.lambda_scale.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "lambda_scale must be positive, got {}",
                self.lambda_scale
            )));
        }
        Ok(())
    }
}

/// Intermediate quantities of one `(n, k)` harmonic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicTerm {
    pub n: u32,
    pub k: u32,
    pub m_nk: f64,
    pub a_nk: f64,
    pub gamma_nk: Complex64,
    /// Reflection coefficient of the layer stack. Underflows to zero for very
    /// thick magnets; `contribution` is computed without forming it.
    pub r_nk: Complex64,
    /// `j·k·(M_nk²/a_nk)·r_nk·sinh(a_nk·b)`.
    pub contribution: Complex64,
}

/// `R_m = (R1 + R2)/2`.
pub fn mean_radius(geometry: &BrakeGeometry) -> f64 {
    0.5 * (geometry.r1 + geometry.r2)
}

/// `τ = π·R_m/p`.
pub fn pole_pitch(geometry: &BrakeGeometry, magnets: &MagnetSpec) -> f64 {
    PI * mean_radius(geometry) / f64::from(magnets.pole_pairs)
}

/// `sin(π·x)` with exact zeros at integer `x`.
fn sin_pi(x: f64) -> f64 {
    // reduce to [-1, 1]
    let r = x - 2.0 * (0.5 * x).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

fn circumferential_factor(k: u32, alpha: f64) -> f64 {
    sin_pi(f64::from(k) * alpha * 0.5)
}

fn radial_factor(n: u32, geometry: &BrakeGeometry) -> f64 {
    sin_pi(f64::from(n) * 0.5 * (geometry.r2 - geometry.r1) / geometry.r3)
}

fn magnetization_amplitude(n: u32, k: u32, model: &TorqueModel) -> f64 {
    16.0 * model.magnets.remanence / (PI * PI * model.materials.mu0 * f64::from(n) * f64::from(k))
}

/// `M_nk = 16·B_r/(π²·μ0·n·k) · sin(kαπ/2) · sin(n·(π/2)·(R2−R1)/R3)`.
pub fn magnetization_coefficient(n: u32, k: u32, model: &TorqueModel) -> f64 {
    magnetization_amplitude(n, k, model)
        * circumferential_factor(k, model.magnets.pole_arc_ratio)
        * radial_factor(n, &model.geometry)
}

fn radial_wavenumber(n: u32, geometry: &BrakeGeometry) -> f64 {
    f64::from(n) * PI / geometry.r3
}

fn circumferential_wavenumber(k: u32, tau: f64) -> f64 {
    f64::from(k) * PI / tau
}

/// `a_nk² = (nπ/R3)² + (kπ/τ)²`.
fn spatial_eigenvalue_squared(n: u32, k: u32, model: &TorqueModel) -> f64 {
    let tau = pole_pitch(&model.geometry, &model.magnets);
    let x = radial_wavenumber(n, &model.geometry);
    let y = circumferential_wavenumber(k, tau);
    x * x + y * y
}

/// `a_nk = √((nπ/R3)² + (kπ/τ)²)`, in 1/m.
pub fn spatial_eigenvalue(n: u32, k: u32, model: &TorqueModel) -> f64 {
    spatial_eigenvalue_squared(n, k, model).sqrt()
}

/// Imaginary part of `γ_nk²`: `σ·μ0·N·R_m·kπ/τ`.
pub(crate) fn diffusion_term(k: u32, model: &TorqueModel, op: &OperatingPoint) -> f64 {
    let tau = pole_pitch(&model.geometry, &model.magnets);
    model.materials.sigma
        * model.materials.mu0
        * op.series_speed()
        * mean_radius(&model.geometry)
        * circumferential_wavenumber(k, tau)
}

/// `μ0·N·R_m·kπ/τ`, the eddy-current term per unit conductivity.
pub(crate) fn diffusion_per_conductivity(k: u32, model: &TorqueModel, op: &OperatingPoint) -> f64 {
    let tau = pole_pitch(&model.geometry, &model.magnets);
    model.materials.mu0
        * op.series_speed()
        * mean_radius(&model.geometry)
        * circumferential_wavenumber(k, tau)
}

/// Principal square root of `re + j·im` for `re > 0`.
fn principal_sqrt(re: f64, im: f64) -> Complex64 {
    if im == 0.0 {
        return Complex64::new(re.sqrt(), 0.0);
    }
    let modulus = re.hypot(im);
    let t = (0.5 * (re.abs() + modulus)).sqrt();
    if re >= 0.0 {
        Complex64::new(t, im / (2.0 * t))
    } else {
        Complex64::new(im.abs() / (2.0 * t), t.copysign(im))
    }
}

/// `γ_nk = √(a_nk² + j·σ·μ0·N·R_m·kπ/τ)`, principal branch.
///
/// Returns exactly `a_nk` when the diffusion term vanishes.
pub fn diffusion_eigenvalue(n: u32, k: u32, model: &TorqueModel, op: &OperatingPoint) -> Complex64 {
    principal_sqrt(
        spatial_eigenvalue_squared(n, k, model),
        diffusion_term(k, model, op),
    )
}

/// Rescaled pieces of the reflection coefficient.
///
/// With `E = exp(a(b+c) + γd)` the true numerator is `−e^{a(b+c)}e^{γd}·e^{−ab}·numerator`
/// and the denominator is `e^{a(b+c)}e^{γd}·denominator`.
struct ScaledReflection {
    numerator: Complex64,
    denominator: Complex64,
}

fn scaled_reflection(a: f64, gamma: Complex64, geometry: &BrakeGeometry) -> ScaledReflection {
    let b = geometry.magnet_thickness;
    let c = geometry.air_gap;
    let d = geometry.plate_thickness;
    let ratio = Complex64::new(a, 0.0) / gamma;
    let sh_gd = sinh_scaled_complex(gamma * d);
    let ch_gd = cosh_scaled_complex(gamma * d);
    let numerator = sh_gd * cosh_scaled(a * c) + ratio * sinh_scaled(a * c) * ch_gd;
    let denominator = sh_gd * cosh_scaled(a * (b + c)) + ratio * sinh_scaled(a * (b + c)) * ch_gd;
    ScaledReflection {
        numerator,
        denominator,
    }
}

const DENOMINATOR_FLOOR: f64 = 1e-300;

fn checked_reflection(
    n: u32,
    k: u32,
    a: f64,
    gamma: Complex64,
    geometry: &BrakeGeometry,
) -> Result<ScaledReflection> {
    let s = scaled_reflection(a, gamma, geometry);
    let magnitude = s.denominator.norm();
    if !(magnitude >= DENOMINATOR_FLOOR) {
        return Err(Error::DegenerateDenominator { n, k, magnitude });
    }
    Ok(s)
}

/// Layer reflection coefficient
///
/// ```text
///        cosh(ac)·sinh(γd) + (a/γ)·sinh(ac)·cosh(γd)
/// r = − ─────────────────────────────────────────────────────
///       cosh(a(b+c))·sinh(γd) + (a/γ)·sinh(a(b+c))·cosh(γd)
/// ```
///
/// evaluated after dividing numerator and denominator by `e^{a(b+c)}·e^{γd}`.
pub fn reflection_coefficient(
    n: u32,
    k: u32,
    model: &TorqueModel,
    op: &OperatingPoint,
) -> Result<Complex64> {
    let a = spatial_eigenvalue(n, k, model);
    let gamma = diffusion_eigenvalue(n, k, model, op);
    let s = checked_reflection(n, k, a, gamma, &model.geometry)?;
    let attenuation = (-a * model.geometry.magnet_thickness).exp();
    Ok(-attenuation * s.numerator / s.denominator)
}

/// Per-model quantities shared by every harmonic.
struct SeriesContext<'a> {
    model: &'a TorqueModel,
    tau: f64,
    diffusion_per_k: f64,
}

impl<'a> SeriesContext<'a> {
    fn new(model: &'a TorqueModel, op: &OperatingPoint) -> Self {
        SeriesContext {
            model,
            tau: pole_pitch(&model.geometry, &model.magnets),
            diffusion_per_k: diffusion_term(1, model, op),
        }
    }

    fn term(&self, n: u32, k: u32, m_nk: f64) -> Result<HarmonicTerm> {
        let g = &self.model.geometry;
        let x = radial_wavenumber(n, g);
        let y = circumferential_wavenumber(k, self.tau);
        let a2 = x * x + y * y;
        let a = a2.sqrt();
        let gamma = principal_sqrt(a2, self.diffusion_per_k * f64::from(k));
        let s = checked_reflection(n, k, a, gamma, g)?;
        let b = g.magnet_thickness;
        let quotient = s.numerator / s.denominator;
        let r_nk = -(-a * b).exp() * quotient;
        // r·sinh(ab) = −sinh(ab)e^{−ab}·numerator/denominator
        let r_sinh = -sinh_scaled(a * b) * quotient;
        let weight = f64::from(k) * m_nk * m_nk / a;
        let contribution = Complex64::i() * (weight * r_sinh);
        Ok(HarmonicTerm {
            n,
            k,
            m_nk,
            a_nk: a,
            gamma_nk: gamma,
            r_nk,
            contribution,
        })
    }
}

/// All intermediate quantities of one harmonic.
pub fn harmonic_term(
    n: u32,
    k: u32,
    model: &TorqueModel,
    op: &OperatingPoint,
) -> Result<HarmonicTerm> {
    if n < 1 || k < 1 {
        return Err(Error::InvalidInput("harmonic indices start at 1".into()));
    }
    SeriesContext::new(model, op).term(n, k, magnetization_coefficient(n, k, model))
}

/// Full result of one series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueBreakdown {
    /// λ-scaled torque in N·m.
    pub torque: f64,
    /// Torque with λ = 1.
    pub unscaled_torque: f64,
    /// `Σ Σ j·k·(M²/a)·r·sinh(ab)`.
    pub series_sum: Complex64,
    /// `Σ Σ |contribution|`.
    pub magnitude_sum: f64,
    /// Sum over the last band (`n = n_max` or `k = k_max`).
    pub last_band: Complex64,
    /// `μ0·p²·τ·R3/2`.
    pub prefactor: f64,
}

impl TorqueBreakdown {
    /// `|Re(last band)| / |Re(sum)|`, zero when both vanish.
    pub fn band_ratio(&self) -> f64 {
        let band = self.last_band.re.abs();
        let total = self.series_sum.re.abs();
        if band <= 1e-12 * self.magnitude_sum {
            0.0
        } else {
            band / total
        }
    }
}

/// Evaluates the series and reports everything needed for diagnostics.
/// Does not apply the convergence check.
pub fn torque_breakdown(model: &TorqueModel, op: &OperatingPoint) -> Result<TorqueBreakdown> {
    model.validate()?;
    let ctx = SeriesContext::new(model, op);
    let Truncation { n_max, k_max, .. } = model.truncation;

    let circumferential: Vec<f64> = (1..=k_max)
        .map(|k| circumferential_factor(k, model.magnets.pole_arc_ratio))
        .collect();

    let mut series_sum = Complex64::new(0.0, 0.0);
    let mut last_band = Complex64::new(0.0, 0.0);
    let mut magnitude_sum = 0.0;
    for n in 1..=n_max {
        let radial = radial_factor(n, &model.geometry);
        for k in 1..=k_max {
            let m_nk =
                magnetization_amplitude(n, k, model) * circumferential[(k - 1) as usize] * radial;
            if m_nk == 0.0 {
                continue;
            }
            let term = ctx.term(n, k, m_nk)?;
            series_sum += term.contribution;
            magnitude_sum += term.contribution.norm();
            if n == n_max || k == k_max {
                last_band += term.contribution;
            }
        }
    }

    let prefactor = 0.5
        * model.materials.mu0
        * f64::from(model.magnets.pole_pairs).powi(2)
        * ctx.tau
        * model.geometry.r3;
    let unscaled_torque = prefactor * series_sum.re;
    Ok(TorqueBreakdown {
        torque: model.lambda_scale * unscaled_torque,
        unscaled_torque,
        series_sum,
        magnitude_sum,
        last_band,
        prefactor,
    })
}

/// Braking torque in N·m, positive when opposing positive slip.
pub fn torque(model: &TorqueModel, op: &OperatingPoint) -> Result<f64> {
    let breakdown = torque_breakdown(model, op)?;
    let ratio = breakdown.band_ratio();
    let tolerance = model.truncation.band_tolerance;
    if !(ratio <= tolerance) {
        return Err(Error::NonConverged {
            n_max: model.truncation.n_max,
            k_max: model.truncation.k_max,
            ratio,
            tolerance,
        });
    }
    Ok(breakdown.torque)
}

/// One torque per operating point, order preserved.
pub fn torque_speed_curve(
    model: &TorqueModel,
    speeds: &[OperatingPoint],
) -> Result<Vec<(Rpm, f64)>> {
    if speeds.is_empty() {
        return Err(Error::InvalidInput("speed list is empty".into()));
    }
    speeds
        .iter()
        .map(|op| {
            torque(model, op)
                .map(|t| (op.slip, t))
                .map_err(|e| Error::AtSpeed {
                    rpm: op.slip.value(),
                    source: Box::new(e),
                })
        })
        .collect()
}

/// Steady-state power `P = T·ω`.
pub fn dissipated_power(torque: f64, op: &OperatingPoint) -> Watts {
    Watts(torque * op.angular_speed().value())
}
