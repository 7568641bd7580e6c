use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Electron rest mass, kg (CODATA 2018).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Reduced Planck constant, J s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Physical constants and slit geometry.
///
/// `slit_offset` is the height `Y` of the slit centres above and below the
/// symmetry plane; `source_half_separation` is the half-distance `d` between
/// the two double slits of the four-slit setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Particle mass, kg.
    pub mass: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Initial packet half-width, m.
    pub sigma0: f64,
    /// Slit-centre offset from the symmetry plane, m.
    pub slit_offset: f64,
    /// Longitudinal wavenumber, 1/m.
    pub kx: f64,
    /// Transverse wavenumber, 1/m.
    pub ky: f64,
    /// Four-slit half-separation, m.
    pub source_half_separation: f64,
    /// Slit-to-detector distance, m.
    pub flight_distance: f64,
}

impl PhysicalParams {
    /// Electron, `sigma0 = 1 um`, `Y = 5 sigma0`, `ky = 0`, 0.2 m flight path,
    /// with the longitudinal wavenumber set from `x_velocity = hbar kx / m`.
    pub fn baseline(x_velocity: f64) -> Self {
        let sigma0 = 1.0e-6;
        Self {
            mass: ELECTRON_MASS,
            hbar: HBAR,
            sigma0,
            slit_offset: 5.0 * sigma0,
            kx: ELECTRON_MASS * x_velocity / HBAR,
            ky: 0.0,
            source_half_separation: 1.0e-3,
            flight_distance: 0.2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("hbar", self.hbar),
            ("sigma0", self.sigma0),
            ("slit_offset", self.slit_offset),
            ("kx", self.kx),
            ("flight_distance", self.flight_distance),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(field, format!("must be finite and > 0, got {value}")));
            }
        }
        if !self.ky.is_finite() {
            return Err(Error::invalid("ky", "must be finite"));
        }
        if !(self.source_half_separation.is_finite() && self.source_half_separation >= 0.0) {
            return Err(Error::invalid(
                "source_half_separation",
                format!("must be finite and >= 0, got {}", self.source_half_separation),
            ));
        }
        Ok(())
    }

    pub(crate) fn require_zero_ky(&self) -> Result<()> {
        if self.ky != 0.0 {
            return Err(Error::NonzeroKy { ky: self.ky });
        }
        Ok(())
    }

    /// Longitudinal velocity `hbar kx / m`.
    pub fn x_velocity(&self) -> f64 {
        self.hbar * self.kx / self.mass
    }

    /// Time for a particle to cover the slit-to-detector distance.
    pub fn flight_time(&self) -> f64 {
        self.flight_distance / self.x_velocity()
    }

    /// Replace `kx` so that `hbar kx / m` equals `x_velocity`.
    pub fn with_x_velocity(mut self, x_velocity: f64) -> Self {
        self.kx = self.mass * x_velocity / self.hbar;
        self
    }

    pub fn scales(&self) -> Scales {
        Scales::new(self)
    }
}

/// Units used for internal arithmetic.
///
/// Raw SI intermediates such as `hbar^2 t^2 + 4 m^2 sigma0^4` sit near
/// `1e-84`; expressing lengths in `sigma0` and times in
/// `tau = 2 m sigma0^2 / hbar` keeps every intermediate of order one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub length: f64,
    pub time: f64,
    /// `length / time`.
    pub velocity: f64,
    /// `Y / sigma0`.
    pub offset: f64,
}

impl Scales {
    pub fn new(p: &PhysicalParams) -> Self {
        let length = p.sigma0;
        let time = 2.0 * p.mass * p.sigma0 * p.sigma0 / p.hbar;
        Self {
            length,
            time,
            velocity: length / time,
            offset: p.slit_offset / p.sigma0,
        }
    }

    /// Dimensionless time `hbar t / (2 m sigma0^2)`.
    #[inline]
    pub fn tau(&self, t: f64) -> f64 {
        t / self.time
    }
}
