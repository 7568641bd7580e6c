//! Two-particle Bohmian trajectories for double-slit and two-double-slit
//! interference.
//!
//! The crate is organised bottom-up:
//!
//! * [`wavefunction`]: Gaussian slit packets, the symmetrized pair
//!   wavefunction, its normalization and the joint densities.
//! * [`velocity`]: the guidance-law velocity field in closed form and via a
//!   finite-difference oracle on the wavefunction.
//! * [`rk45`] and [`trajectory`]: adaptive Dormand-Prince integration of pair
//!   trajectories.
//! * [`four_slit`]: the two-double-slit wavefunctions and their reduction to
//!   the double-slit problem.
//! * [`sampling`] and [`ensemble`]: seeded sampling of initial conditions,
//!   batch integration and the statistics comparing Bohmian endpoints with
//!   the quantum-mechanical density.
//!
//! All public interfaces take and return SI quantities. Internally lengths are
//! measured in units of the initial packet width and times in units of
//! `2 m sigma0^2 / hbar`.

// Validation uses `!(a <= b)` so that NaN is rejected along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod ensemble;
pub mod error;
pub mod four_slit;
pub mod histogram;
pub mod params;
pub mod quadrature;
pub mod rk45;
pub mod sampling;
pub mod trajectory;
pub mod velocity;
pub mod wavefunction;

pub use checks::PropertyCheck;
pub use ensemble::{run_ensemble, run_pairs, DensityDistance, EnsembleResult, RunOptions};
pub use error::{Error, Result};
pub use four_slit::SlitRegion;
pub use params::{PhysicalParams, Scales, ELECTRON_MASS, HBAR};
pub use sampling::{SamplerConfig, SamplingMethod};
pub use trajectory::{
    integrate_trajectory, BohmianFlow, IntegratorConfig, Trajectory, TrajectorySample,
    TrajectoryStatus,
};
pub use velocity::{PairVelocity, VelocityFieldTerms};
pub use wavefunction::{ComplexAmplitude, PairConfiguration, Slit, SpinStatistics};
