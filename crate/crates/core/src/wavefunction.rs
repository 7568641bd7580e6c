//! Slit packets, the symmetrized pair wavefunction and its densities.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::{PhysicalParams, Scales};

/// Value type of one-particle and pair wavefunctions.
pub type ComplexAmplitude = Complex64;

/// Exchange symmetry of the pair: bosons take the `+` branch of every `±`,
/// fermions the `-` branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinStatistics {
    Boson,
    Fermion,
}

impl SpinStatistics {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            SpinStatistics::Boson => 1.0,
            SpinStatistics::Fermion => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpinStatistics::Boson => "boson",
            SpinStatistics::Fermion => "fermion",
        }
    }
}

/// A point in two-particle configuration space at time `t` (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairConfiguration {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub t: f64,
}

impl PairConfiguration {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64, t: f64) -> Self {
        Self { x1, y1, x2, y2, t }
    }

    /// Both particles at the slit plane `x = 0`.
    pub fn transverse(y1: f64, y2: f64, t: f64) -> Self {
        Self::new(0.0, y1, 0.0, y2, t)
    }

    /// Particle labels exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.x2, self.y2, self.x1, self.y1, self.t)
    }

    /// Reflected in the `y = 0` plane.
    pub fn mirrored(&self) -> Self {
        Self::new(self.x1, -self.y1, self.x2, -self.y2, self.t)
    }
}

/// The four slit packets. `B`, `A'` and `B'` are reflections of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slit {
    A,
    B,
    APrime,
    BPrime,
}

/// `(k x) mod 2 pi`, with the rounding residual of the product restored.
///
/// `kx x` reaches `1e10` rad over a 0.2 m flight path; plain multiplication
/// would leave microradian noise in phases that finite differences resolve.
/// The reduction uses the exact `fmod`, so the offset from the inexact `TAU`
/// is common to nearby arguments and cancels in differences.
#[inline]
pub(crate) fn reduced_phase(k: f64, x: f64) -> f64 {
    let p = k * x;
    let residual = k.mul_add(x, -p);
    p.rem_euclid(TAU) + residual
}

/// Complex width `sigma_t = sigma0 (1 + i hbar t / (2 m sigma0^2))`, in metres.
pub fn sigma_t(t: f64, p: &PhysicalParams) -> ComplexAmplitude {
    let s = p.scales().tau(t);
    Complex64::new(p.sigma0, p.sigma0 * s)
}

/// Dimensionless Gaussian envelope `(2 pi)^(-1/4) (1 + i s)^(-1/2) exp(-eta^2 / (4 (1 + i s)))`.
#[inline]
pub(crate) fn packet_profile(eta: f64, s: f64) -> Complex64 {
    let width = Complex64::new(1.0, s);
    let norm = (2.0 * PI).powf(-0.25);
    (-(eta * eta) / (4.0 * width)).exp() * norm / width.sqrt()
}

/// Transverse factor (envelope and `ky` phase) and longitudinal phase of the
/// upper-slit packet; the packet is `transverse * exp(i phase)`.
#[inline]
fn packet_factors(x: f64, y: f64, t: f64, p: &PhysicalParams, sc: &Scales) -> (Complex64, f64) {
    let s = sc.tau(t);
    let drift = p.hbar * p.ky * t / p.mass;
    let eta = (y - p.slit_offset - drift) / sc.length;
    let envelope = packet_profile(eta, s) / sc.length.sqrt();
    let transverse = if p.ky == 0.0 {
        envelope
    } else {
        envelope * Complex64::from_polar(1.0, reduced_phase(p.ky, y - p.slit_offset - 0.5 * drift))
    };
    let half_kx_velocity_t = 0.5 * p.hbar * p.kx * t / p.mass;
    let phase = reduced_phase(p.kx, x) - reduced_phase(p.kx, half_kx_velocity_t);
    (transverse, phase)
}

fn psi_a(x: f64, y: f64, t: f64, p: &PhysicalParams, sc: &Scales) -> Complex64 {
    let (transverse, phase) = packet_factors(x, y, t, p, sc);
    transverse * Complex64::from_polar(1.0, phase)
}

/// One-particle slit wavefunction (units `m^-1/2`).
///
/// `A` is the freely spreading Gaussian leaving the upper slit; `B` mirrors it
/// in `y`, `A'` in `x`, and `B'` in both.
pub fn psi_slit(slit: Slit, x: f64, y: f64, t: f64, p: &PhysicalParams) -> ComplexAmplitude {
    let sc = p.scales();
    match slit {
        Slit::A => psi_a(x, y, t, p, &sc),
        Slit::B => psi_a(x, -y, t, p, &sc),
        Slit::APrime => psi_a(-x, y, t, p, &sc),
        Slit::BPrime => psi_a(-x, -y, t, p, &sc),
    }
}

/// `|N|^2 = 1 / (2 (1 ± exp(-Y^2 / sigma0^2)))`.
///
/// This normalizes the pair density for `ky = 0`; `N` itself is taken real
/// and positive.
pub fn normalization_sq(stats: SpinStatistics, p: &PhysicalParams) -> f64 {
    let a = p.slit_offset / p.sigma0;
    normalization_sq_scaled(stats, a)
}

#[inline]
pub(crate) fn normalization_sq_scaled(stats: SpinStatistics, offset: f64) -> f64 {
    0.5 / (1.0 + stats.sign() * (-offset * offset).exp())
}

/// Normalized symmetrized pair wavefunction (units `m^-1`).
///
/// Exchanging the particles multiplies the value by `+1` for bosons and `-1`
/// for fermions.
pub fn psi_pair(stats: SpinStatistics, c: &PairConfiguration, p: &PhysicalParams) -> ComplexAmplitude {
    let sc = p.scales();
    let n = normalization_sq(stats, p).sqrt();
    // Each term carries one packet at x1 and one at x2, so the longitudinal
    // phase factors out of the sum.
    let (a1, phase1) = packet_factors(c.x1, c.y1, c.t, p, &sc);
    let (b1, _) = packet_factors(c.x1, -c.y1, c.t, p, &sc);
    let (a2, phase2) = packet_factors(c.x2, c.y2, c.t, p, &sc);
    let (b2, _) = packet_factors(c.x2, -c.y2, c.t, p, &sc);
    let longitudinal = Complex64::from_polar(n, phase1 + phase2);
    longitudinal * (a1 * b2 + stats.sign() * (a2 * b1))
}

/// `|Psi(r1, r2, t)|^2` (units `m^-2`).
pub fn joint_density(c: &PairConfiguration, stats: SpinStatistics, p: &PhysicalParams) -> f64 {
    psi_pair(stats, c, p).norm_sqr()
}

/// Born density of the transverse coordinates at `t = 0`,
/// `|N|^2 (2 pi sigma0^2)^-1 (F + G ± 2H)`, valid for `ky = 0` only.
pub fn initial_density(y1: f64, y2: f64, stats: SpinStatistics, p: &PhysicalParams) -> Result<f64> {
    p.require_zero_ky()?;
    let two_var = 2.0 * p.sigma0 * p.sigma0;
    let big_y = p.slit_offset;
    let f = (-((y1 - big_y).powi(2) + (y2 + big_y).powi(2)) / two_var).exp();
    let g = (-((y2 - big_y).powi(2) + (y1 + big_y).powi(2)) / two_var).exp();
    let h = (-(y1 * y1 + y2 * y2 + 2.0 * big_y * big_y) / two_var).exp();
    let value = normalization_sq(stats, p) / (PI * two_var) * (f + g + 2.0 * stats.sign() * h);
    // F + G - 2H = (sqrt F - sqrt G)^2 >= 0; clamp rounding below zero.
    Ok(value.max(0.0))
}

/// Transverse pair amplitude in scaled units (lengths in `sigma0`,
/// `s = hbar t / (2 m sigma0^2)`), without normalization or x phases.
#[inline]
pub(crate) fn pair_profile(eta1: f64, eta2: f64, s: f64, offset: f64, stats: SpinStatistics) -> Complex64 {
    let direct = packet_profile(eta1 - offset, s) * packet_profile(eta2 + offset, s);
    let exchange = packet_profile(eta2 - offset, s) * packet_profile(eta1 + offset, s);
    direct + stats.sign() * exchange
}

/// Normalized transverse density per `sigma0^2` in scaled units (`ky = 0`).
#[inline]
pub(crate) fn density_scaled(eta1: f64, eta2: f64, s: f64, offset: f64, stats: SpinStatistics) -> f64 {
    normalization_sq_scaled(stats, offset) * pair_profile(eta1, eta2, s, offset, stats).norm_sqr()
}

/// Maximum of the scaled `t = 0` density, located by a grid search.
pub(crate) fn initial_density_peak_scaled(stats: SpinStatistics, offset: f64) -> f64 {
    let half = offset + 4.0;
    let n = 161;
    let step = 2.0 * half / (n - 1) as f64;
    let mut peak = 0.0f64;
    for i in 0..n {
        let e1 = -half + i as f64 * step;
        for j in 0..n {
            let e2 = -half + j as f64 * step;
            peak = peak.max(density_scaled(e1, e2, 0.0, offset, stats));
        }
    }
    peak
}
