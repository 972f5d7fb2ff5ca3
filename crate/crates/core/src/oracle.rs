//! Finite-difference solution of the per-harmonic layer problem.
//!
//! For one harmonic `(n, k)` the normal flux density `B_z(z)` through the
//! stack satisfies, layer by layer,
//!
//! ```text
//! B_z'' = (a_nk² + j·σ·μ0·N·R_m·kπ/τ)·B_z − a_nk²·μ0·M_nk·[magnet layer]
//! ```
//!
//! with `B_z` and `B_z'/μ_r` continuous at every interface (normal flux and
//! tangential field continuity) and `B_z' = 0` where the stack meets an
//! infinitely permeable back iron (the tangential field vanishes there). In
//! the magnet the exact solution is `μ0·M_nk·(1 + r·cosh(a_nk·z))`, so the
//! reflection coefficient is read off at the magnet/air-gap node as
//! `r = (B_z(b)/(μ0·M_nk) − 1)/cosh(a_nk·b)`.
//!
//! Discretisation: a three-point scheme on a uniform mesh per layer whose
//! stencil is exponentially fitted to `a_nk`. The non-conducting part of the
//! operator is therefore reproduced exactly; the eddy-current term is
//! integrated against the cell Green's function with linear interpolation,
//! which makes the scheme second-order whenever `σ·N ≠ 0`. The reported value
//! is Richardson-extrapolated from meshes `m` and `2m`, with a third solve at
//! `4m` to estimate the extrapolation error.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{self, OperatingPoint, SpeedConvention, TorqueModel};
use crate::units::Rpm;

/// Agreement gate between the closed form and the extrapolated numeric value.
pub const AGREEMENT_TOLERANCE: f64 = 1e-6;

/// Harmonics and slip speeds of the standard cross-check.
pub const SAMPLE_HARMONICS: [u32; 3] = [1, 3, 5];
pub const SAMPLE_SPEEDS_RPM: [f64; 4] = [0.0, 1000.0, 4000.0, 8000.0];

/// How the outer back irons close the problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IronClosure {
    /// Infinitely permeable back irons: flux-normal boundaries directly on the
    /// magnet and plate faces.
    Infinite,
    /// Back irons meshed as layers of finite permeability, flux-normal on
    /// their outer faces.
    Finite { relative_permeability: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub thickness: f64,
    pub relative_permeability: f64,
    pub conductivity: f64,
    pub is_source: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    /// Bottom to top.
    pub layers: Vec<Layer>,
    pub mesh_points_per_layer: usize,
}

impl LayerStack {
    pub const MIN_MESH: usize = 8;

    /// Back iron (finite closure only), magnet, air gap, plate, back iron.
    pub fn from_model(
        model: &TorqueModel,
        closure: IronClosure,
        mesh_points_per_layer: usize,
    ) -> Self {
        let g = &model.geometry;
        let mut layers = Vec::with_capacity(5);
        let iron = |mu_r| Layer {
            thickness: g.back_iron_thickness,
            relative_permeability: mu_r,
            conductivity: 0.0,
            is_source: false,
        };
        if let IronClosure::Finite {
            relative_permeability,
        } = closure
        {
            layers.push(iron(relative_permeability));
        }
        layers.push(Layer {
            thickness: g.magnet_thickness,
            relative_permeability: 1.0,
            conductivity: 0.0,
            is_source: true,
        });
        layers.push(Layer {
            thickness: g.air_gap,
            relative_permeability: 1.0,
            conductivity: 0.0,
            is_source: false,
        });
        layers.push(Layer {
            thickness: g.plate_thickness,
            relative_permeability: 1.0,
            conductivity: model.materials.sigma,
            is_source: false,
        });
        if let IronClosure::Finite {
            relative_permeability,
        } = closure
        {
            layers.push(iron(relative_permeability));
        }
        LayerStack {
            layers,
            mesh_points_per_layer,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mesh_points_per_layer < Self::MIN_MESH {
            return Err(Error::InvalidInput(format!(
                "mesh must have at least {} points per layer, got {}",
                Self::MIN_MESH,
                self.mesh_points_per_layer
            )));
        }
        if self.layers.iter().filter(|l| l.is_source).count() != 1 {
            return Err(Error::InvalidInput(
                "exactly one layer must carry the magnet source".into(),
            ));
        }
        for l in &self.layers {
            if !(l.thickness > 0.0 && l.thickness.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "layer thickness must be positive, got {}",
                    l.thickness
                )));
            }
            if !(l.relative_permeability > 0.0) || !(l.conductivity >= 0.0) {
                return Err(Error::InvalidInput(
                    "layer permeability must be positive and conductivity non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.layers.len() * self.mesh_points_per_layer + 1
    }

    fn source_index(&self) -> usize {
        self.layers.iter().position(|l| l.is_source).unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    pub closure: IronClosure,
    /// Largest accepted relative error estimate of the extrapolated value.
    pub extrapolation_tolerance: f64,
    /// Largest accepted relative residual of each discrete solve.
    pub residual_tolerance: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            closure: IronClosure::Infinite,
            extrapolation_tolerance: 1e-4,
            residual_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    /// Richardson-extrapolated reflection coefficient.
    pub r_numeric: Complex64,
    /// Second-order value on the requested mesh alone.
    pub r_raw: Complex64,
    /// Nodes of the requested mesh.
    pub grid_size: usize,
    pub mesh_points_per_layer: usize,
    /// Largest relative residual over the solves used.
    pub residual_norm: f64,
    /// Relative error estimate of `r_numeric`.
    pub error_estimate: f64,
}

/// Tridiagonal system stored with explicit row margins:
/// row `i` reads `lower·(f[i-1] − f[i]) + upper·(f[i+1] − f[i]) + margin·f[i] = rhs`.
struct MarginSystem {
    lower: Vec<Complex64>,
    upper: Vec<Complex64>,
    margin: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

impl MarginSystem {
    fn zeros(size: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); size];
        MarginSystem {
            lower: z.clone(),
            upper: z.clone(),
            margin: z.clone(),
            rhs: z,
        }
    }

    /// Thomas elimination carried out on the pivot margins `β_i + upper_i`,
    /// which never requires subtracting two nearly equal O(1/h) numbers.
    fn solve(&self) -> Result<Vec<Complex64>> {
        let size = self.rhs.len();
        let mut pivot = vec![Complex64::new(0.0, 0.0); size];
        let mut forward = vec![Complex64::new(0.0, 0.0); size];
        let mut pivot_margin = Complex64::new(0.0, 0.0);
        for i in 0..size {
            let mu = if i == 0 {
                self.margin[0]
            } else {
                self.margin[i] - self.lower[i] * pivot_margin / pivot[i - 1]
            };
            let beta = mu - self.upper[i];
            if !(beta.norm() > 0.0) || !beta.is_finite() {
                return Err(Error::SingularSystem(format!("zero pivot at row {i}")));
            }
            let carried = if i == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                self.lower[i] * forward[i - 1]
            };
            pivot[i] = beta;
            forward[i] = (self.rhs[i] - carried) / beta;
            pivot_margin = mu;
        }
        let mut f = vec![Complex64::new(0.0, 0.0); size];
        f[size - 1] = forward[size - 1];
        for i in (0..size - 1).rev() {
            f[i] = forward[i] - self.upper[i] / pivot[i] * f[i + 1];
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("non-finite solution".into()));
        }
        Ok(f)
    }

    /// Normwise backward error `‖A·f − rhs‖∞ / (‖A‖∞·‖f‖∞ + ‖rhs‖∞)`.
    fn relative_residual(&self, f: &[Complex64]) -> f64 {
        let size = f.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut residual: f64 = 0.0;
        let mut matrix_norm: f64 = 0.0;
        for i in 0..size {
            let left = if i > 0 {
                self.lower[i] * (f[i - 1] - f[i])
            } else {
                zero
            };
            let right = if i + 1 < size {
                self.upper[i] * (f[i + 1] - f[i])
            } else {
                zero
            };
            residual = residual.max((left + right + self.margin[i] * f[i] - self.rhs[i]).norm());
            let diagonal = self.margin[i] - self.lower[i] - self.upper[i];
            matrix_norm =
                matrix_norm.max(self.lower[i].norm() + self.upper[i].norm() + diagonal.norm());
        }
        let field_norm = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let rhs_norm = self.rhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let scale = matrix_norm * field_norm + rhs_norm;
        if scale > 0.0 {
            residual / scale
        } else {
            0.0
        }
    }
}

/// `1/x − csch x`.
fn inverse_minus_csch(x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        x * (1.0 / 6.0
            + x2 * (-7.0 / 360.0
                + x2 * (31.0 / 15120.0 + x2 * (-127.0 / 604_800.0 + x2 * 73.0 / 3_421_440.0))))
    } else {
        1.0 / x - 1.0 / x.sinh()
    }
}

/// One discrete solve on the stack.
#[derive(Debug, Clone)]
pub struct RawSolution {
    pub r: Complex64,
    /// `B_z` at every node, normalised by the source amplitude `μ0·M_nk`.
    pub field: Vec<Complex64>,
    pub residual_norm: f64,
}

/// Assembles and solves the discrete problem for one harmonic.
pub fn solve_on_stack(
    n: u32,
    k: u32,
    model: &TorqueModel,
    op: &OperatingPoint,
    stack: &LayerStack,
) -> Result<RawSolution> {
    stack.validate()?;
    model.validate()?;
    let a = model::spatial_eigenvalue(n, k, model);
    let per_sigma = model::diffusion_per_conductivity(k, model, op);

    let m = stack.mesh_points_per_layer;
    let mut sys = MarginSystem::zeros(stack.node_count());

    // source normalised to unit amplitude: B_z'' − a²·B_z = −a² in the magnet
    for (layer_index, layer) in stack.layers.iter().enumerate() {
        let x = a * layer.thickness / m as f64;
        let w = 1.0 / layer.relative_permeability;
        let e = Complex64::new(0.0, layer.conductivity * per_sigma);
        let source = if layer.is_source { -a * a } else { 0.0 };
        let half_tanh = (0.5 * x).tanh();

        let off = w * (Complex64::new(a / x.sinh(), 0.0) - e * (inverse_minus_csch(x) / a));
        // diagonal minus both couplings: −w·tanh(x/2)·(a² + e)/a per cell
        let cell_margin = -(w * half_tanh / a) * (Complex64::new(a * a, 0.0) + e);
        let source_flux = w * source / a * half_tanh;

        for cell in 0..m {
            let left = layer_index * m + cell;
            sys.upper[left] += off;
            sys.margin[left] += cell_margin;
            sys.rhs[left] += source_flux;
            sys.lower[left + 1] += off;
            sys.margin[left + 1] += cell_margin;
            sys.rhs[left + 1] += source_flux;
        }
    }

    let field = sys.solve()?;
    let residual_norm = sys.relative_residual(&field);
    let interface = (stack.source_index() + 1) * m;
    let b = stack.layers[stack.source_index()].thickness;
    let r = (field[interface] - 1.0) / (a * b).cosh();
    Ok(RawSolution {
        r,
        field,
        residual_norm,
    })
}

fn raw_solve(
    n: u32,
    k: u32,
    model: &TorqueModel,
    op: &OperatingPoint,
    mesh: usize,
    settings: &OracleSettings,
) -> Result<RawSolution> {
    let stack = LayerStack::from_model(model, settings.closure, mesh);
    let raw = solve_on_stack(n, k, model, op, &stack)?;
    if !(raw.residual_norm <= settings.residual_tolerance) {
        return Err(Error::SingularSystem(format!(
            "relative residual {:e} exceeds {:e}",
            raw.residual_norm, settings.residual_tolerance
        )));
    }
    Ok(raw)
}

/// Solves harmonic `(n, k)` on `mesh` points per layer with default settings.
pub fn solve_harmonic_bvp(
    n: u32,
    k: u32,
    model: &TorqueModel,
    op: &OperatingPoint,
    mesh: usize,
) -> Result<OracleResult> {
    solve_harmonic_bvp_with(n, k, model, op, mesh, &OracleSettings::default())
}

pub fn solve_harmonic_bvp_with(
    n: u32,
    k: u32,
    model: &TorqueModel,
    op: &OperatingPoint,
    mesh: usize,
    settings: &OracleSettings,
) -> Result<OracleResult> {
    if n < 1 || k < 1 {
        return Err(Error::InvalidInput("harmonic indices start at 1".into()));
    }
    let coarse = raw_solve(n, k, model, op, mesh, settings)?;
    let fine = raw_solve(n, k, model, op, 2 * mesh, settings)?;
    let finest = raw_solve(n, k, model, op, 4 * mesh, settings)?;
    let extrapolated = (4.0 * fine.r - coarse.r) / 3.0;
    let check = (4.0 * finest.r - fine.r) / 3.0;
    let scale = extrapolated.norm();
    let error_estimate = if scale > 0.0 {
        (extrapolated - check).norm() / scale
    } else {
        0.0
    };
    if !(error_estimate <= settings.extrapolation_tolerance) {
        return Err(Error::NoConvergence {
            estimate: error_estimate,
            tolerance: settings.extrapolation_tolerance,
        });
    }
    Ok(OracleResult {
        r_numeric: extrapolated,
        r_raw: coarse.r,
        grid_size: LayerStack::from_model(model, settings.closure, mesh).node_count(),
        mesh_points_per_layer: mesh,
        residual_norm: coarse
            .residual_norm
            .max(fine.residual_norm)
            .max(finest.residual_norm),
        error_estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementEntry {
    pub mesh: usize,
    pub r_raw: Complex64,
    /// `|r(mesh) − r(finest)|`.
    pub error_vs_finest: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub entries: Vec<RefinementEntry>,
    /// `|r_i − r_{i+1}| / |r_{i+1} − r_{i+2}|` for consecutive triples.
    pub successive_ratios: Vec<f64>,
    /// Order estimated from the three finest meshes; `None` when the
    /// differences are at rounding level.
    pub observed_order: Option<f64>,
}

/// Raw second-order solutions on a sequence of meshes.
pub fn refinement_study(
    n: u32,
    k: u32,
    model: &TorqueModel,
    op: &OperatingPoint,
    meshes: &[usize],
) -> Result<RefinementReport> {
    if meshes.len() < 3 {
        return Err(Error::InvalidInput(
            "a refinement study needs at least three meshes".into(),
        ));
    }
    if meshes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "meshes must be strictly increasing".into(),
        ));
    }
    let settings = OracleSettings::default();
    let values = meshes
        .iter()
        .map(|&m| raw_solve(n, k, model, op, m, &settings).map(|s| s.r))
        .collect::<Result<Vec<_>>>()?;
    let finest = *values.last().expect("non-empty");
    let entries = meshes
        .iter()
        .zip(&values)
        .map(|(&mesh, &r)| RefinementEntry {
            mesh,
            r_raw: r,
            error_vs_finest: (r - finest).norm(),
        })
        .collect();

    let differences: Vec<f64> = values.windows(2).map(|w| (w[0] - w[1]).norm()).collect();
    let successive_ratios: Vec<f64> = differences.windows(2).map(|d| d[0] / d[1]).collect();
    let scale = finest.norm();
    let observed_order = {
        let last = differences.len() - 1;
        let (d0, d1) = (differences[last - 1], differences[last]);
        let resolvable = d1 > 1e-13 * scale && d0 > d1;
        let refinement = meshes[meshes.len() - 2] as f64 / meshes[meshes.len() - 3] as f64;
        resolvable.then(|| (d0 / d1).ln() / refinement.ln())
    };
    Ok(RefinementReport {
        entries,
        successive_ratios,
        observed_order,
    })
}

/// One row of the cross-check report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRecord {
    pub n: u32,
    pub k: u32,
    pub speed: Rpm,
    pub closed_form: Complex64,
    pub numeric: Complex64,
    pub relative_error: f64,
    pub mesh: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleFailure {
    pub n: u32,
    pub k: u32,
    pub speed: Rpm,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub mesh: usize,
    pub records: Vec<OracleRecord>,
    pub failures: Vec<OracleFailure>,
    pub max_relative_error: f64,
    /// Refinement study at `(1, 1)`, 4000 rpm on meshes `m, 2m, 4m`.
    pub refinement: Option<RefinementReport>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.max_relative_error < AGREEMENT_TOLERANCE
    }
}

/// Closed form against the numeric solution over the standard sample set.
pub fn oracle_check(model: &TorqueModel, convention: SpeedConvention, mesh: usize) -> OracleReport {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for &n in &SAMPLE_HARMONICS {
        for &k in &SAMPLE_HARMONICS {
            for &rpm in &SAMPLE_SPEEDS_RPM {
                let op = OperatingPoint::new(Rpm(rpm), convention);
                let outcome = model::reflection_coefficient(n, k, model, &op).and_then(|closed| {
                    solve_harmonic_bvp(n, k, model, &op, mesh).map(|num| (closed, num))
                });
                match outcome {
                    Ok((closed, num)) => records.push(OracleRecord {
                        n,
                        k,
                        speed: Rpm(rpm),
                        closed_form: closed,
                        numeric: num.r_numeric,
                        relative_error: (num.r_numeric - closed).norm() / closed.norm(),
                        mesh,
                        residual: num.residual_norm,
                    }),
                    Err(e) => failures.push(OracleFailure {
                        n,
                        k,
                        speed: Rpm(rpm),
                        code: e.code(),
                        message: e.to_string(),
                    }),
                }
            }
        }
    }
    let max_relative_error = records.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    let refinement = refinement_study(
        1,
        1,
        model,
        &OperatingPoint::new(Rpm(4000.0), convention),
        &[mesh, 2 * mesh, 4 * mesh],
    )
    .ok();
    OracleReport {
        mesh,
        records,
        failures,
        max_relative_error,
        refinement,
    }
}
