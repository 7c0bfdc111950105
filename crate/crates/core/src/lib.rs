//! Simulation and analysis of two-mode SU(1,1) interferometers with
//! asymmetric internal loss, an idler seed and unbalanced gains.
//!
//! Three independent routes compute the signal photon statistics:
//!
//! * [`gaussian`]: exact covariance-matrix propagation (the working engine),
//! * [`closed_form`]: analytic photon number and visibility expressions,
//! * [`fock`]: truncated photon-number brute force for small gains.
//!
//! [`metrics`] derives visibility and phase sensitivity from the engine and
//! [`sweep`] drives parameter scans, figure data and the validation suite.

pub mod closed_form;
pub mod config;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod metrics;
pub mod optimize;
pub mod sweep;

pub use config::InterferometerConfig;
pub use error::{Error, Result};
pub use fock::{FockOracle, FockRun};
pub use gaussian::{run_interferometer, GaussianTwoModeState, Mode, PhotonStats};
pub use metrics::{optimal_sensitivity, SensitivityReport, ShotNoiseConvention};
pub use sweep::{
    run_sweep, Axis, Figure, Metric, SweepFile, SweepRow, SweepSpec, ValidationReport,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
