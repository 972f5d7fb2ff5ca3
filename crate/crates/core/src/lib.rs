#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Design library for axial-flux permanent-magnet eddy-current brakes.
//!
//! - [`model`]: mean-radius harmonic torque series.
//! - [`oracle`]: finite-difference solution of the per-harmonic layer problem,
//!   used to cross-check the closed-form reflection coefficient.
//! - [`regulations`]: torque requirement from braking regulations.
//! - [`search`]: grid sweep, ranking and λ calibration.
//! - [`io`]: configuration files, CSV export, reports and the CLI.

pub mod error;
pub mod hyper;
pub mod io;
pub mod model;
pub mod oracle;
pub mod regulations;
pub mod search;
pub mod units;

pub use error::{Error, ExitClass, Result};
pub use model::{
    BrakeGeometry, CalibrationTag, HarmonicTerm, MagnetSpec, MaterialSpec, OperatingPoint,
    SpeedConvention, TorqueModel, Truncation,
};
